"""Semántica de orden parcial: compilación de documentos a grafos de eventos.

Cada mensaje aporta un evento send (en la lifeline emisora) y uno recv (en la
receptora). El orden se genera con dos reglas: send precede a su recv, y los
eventos de una misma lifeline siguen el orden del documento. Los fragmentos
opt/loop se expanden con un FragmentExpansion que fija cada elección.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from graphlib import CycleError, TopologicalSorter
from typing import Iterator, Mapping, Optional

from dfci.core.errors import CyclicOrder, ExpansionOutOfBounds, InvalidDocument, UnresolvedReference
from dfci.msc.model import Fragment, MessageSpec, MscDocument
from dfci.msc.validation import IssueCategory, validate_document

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    SEND = "send"
    RECV = "recv"


@dataclass(frozen=True, order=True)
class Event:
    msg_id: str
    kind: EventKind
    lifeline: str
    instance: int = 0

    @property
    def label(self) -> tuple[str, str]:
        return self.msg_id, self.kind.value

    def __str__(self) -> str:
        suffix = f"#{self.instance}" if self.instance else ""
        return f"{self.kind.value} {self.msg_id}{suffix}@{self.lifeline}"


@dataclass(frozen=True)
class FragmentChoice:
    """Elección para un punto de decisión: opt (taken) o loop (iterations)"""
    taken: bool = True
    iterations: tuple["FragmentExpansion", ...] = ()


@dataclass(frozen=True)
class FragmentExpansion:
    """
    Elecciones por id de punto de decisión (F0, F1... para fragmentos y
    "<msg_id>?" para mensajes opcionales). Cubre los puntos alcanzables sin
    cruzar un loop; cada iteración de un loop lleva su propia expansión.
    """
    choices: tuple[tuple[str, FragmentChoice], ...] = ()

    @classmethod
    def of(cls, choices: Mapping[str, FragmentChoice]) -> "FragmentExpansion":
        return cls(tuple(sorted(choices.items())))

    def get(self, choice_id: str) -> Optional[FragmentChoice]:
        for key, choice in self.choices:
            if key == choice_id:
                return choice
        return None


@dataclass(frozen=True)
class Occurrence:
    """Aparición concreta de un mensaje en una expansión"""
    message: MessageSpec
    instance: int
    context: tuple[tuple[str, int], ...]  # (fragmento, iteración) de fuera a dentro


@dataclass(frozen=True)
class EventGraph:
    events: tuple[Event, ...]
    order: frozenset[tuple[Event, Event]]
    optionality: Mapping[Event, tuple[str, ...]] = field(default_factory=dict, compare=False)
    positions: Mapping[Event, int] = field(default_factory=dict, compare=False)
    document: Optional[MscDocument] = field(default=None, compare=False)

    def precedes(self, a: Event, b: Event) -> bool:
        return (a, b) in self.order

    def predecessors(self) -> dict[Event, set[Event]]:
        preds = {event: set() for event in self.events}
        for a, b in self.order:
            preds[b].add(a)
        return preds

    def lifeline_events(self, lifeline: str) -> list[Event]:
        return [e for e in self.events if e.lifeline == lifeline]


def _require_valid(doc: MscDocument) -> None:
    issues = validate_document(doc)
    if not issues:
        return
    unresolved = [i for i in issues if i.category is IssueCategory.UNRESOLVED_REFERENCE]
    if unresolved:
        raise UnresolvedReference(unresolved[0].message, issues)
    raise InvalidDocument(issues[0].message, issues)


def _build_graph(doc: MscDocument, occurrences, contexts) -> EventGraph:
    """Construye el orden (cierre transitivo) a partir de apariciones en orden de documento"""
    events: list[Event] = []
    positions: dict[Event, int] = {}
    optionality: dict[Event, tuple[str, ...]] = {}
    edges: set[tuple[Event, Event]] = set()
    last_on: dict[str, Event] = {}

    for position, (occ, context) in enumerate(zip(occurrences, contexts)):
        msg = occ.message
        send = Event(msg.msg_id, EventKind.SEND, doc.canonical(msg.sender), occ.instance)
        recv = Event(msg.msg_id, EventKind.RECV, doc.canonical(msg.receiver), occ.instance)
        edges.add((send, recv))
        for event in (send, recv):
            previous = last_on.get(event.lifeline)
            if previous is not None:
                edges.add((previous, event))
            last_on[event.lifeline] = event
            events.append(event)
            positions[event] = position
            optionality[event] = context

    preds = {event: set() for event in events}
    for a, b in edges:
        preds[b].add(a)
    try:
        topo = list(TopologicalSorter(preds).static_order())
    except CycleError as exc:
        raise CyclicOrder(f"orden cíclico en el documento {doc.name}: {exc.args[1]}") from exc

    # Cierre transitivo siguiendo el orden topológico
    ancestors: dict[Event, set[Event]] = {}
    for event in topo:
        acc: set[Event] = set()
        for pred in preds[event]:
            acc.add(pred)
            acc |= ancestors[pred]
        ancestors[event] = acc
    order = frozenset((a, b) for b, before in ancestors.items() for a in before)

    return EventGraph(
        events=tuple(events),
        order=order,
        optionality=optionality,
        positions=positions,
        document=doc,
    )


def compile(doc: MscDocument) -> EventGraph:
    """
    Compila un documento válido a su grafo de eventos sin expandir: cada mensaje
    aporta un send y un recv, y el contexto opt/loop queda en `optionality`.
    """
    _require_valid(doc)
    fragment_ids = doc.fragment_ids()
    occurrences, contexts = [], []
    for item, enclosing in doc.iter_items():
        if isinstance(item, MessageSpec):
            context = tuple(fragment_ids[id(frag)] for frag in enclosing)
            if item.optional:
                context += (item.choice_id,)
            occurrences.append(Occurrence(item, 0, ()))
            contexts.append(context)
    graph = _build_graph(doc, occurrences, contexts)
    logger.debug("Documento %s compilado: %d eventos", doc.name, len(graph.events))
    return graph


def flatten(doc: MscDocument, expansion: FragmentExpansion) -> list[Occurrence]:
    """Secuencia de apariciones en orden de documento para una expansión"""
    fragment_ids = doc.fragment_ids()
    counters: dict[str, int] = {}
    result: list[Occurrence] = []

    def need(exp: FragmentExpansion, choice_id: str) -> FragmentChoice:
        choice = exp.get(choice_id)
        if choice is None:
            raise ExpansionOutOfBounds(f"la expansión no fija el punto de decisión {choice_id}")
        return choice

    def emit(msg: MessageSpec, context):
        instance = counters.get(msg.msg_id, 0)
        counters[msg.msg_id] = instance + 1
        result.append(Occurrence(msg, instance, context))

    def walk(items, exp: FragmentExpansion, context):
        for item in items:
            if isinstance(item, MessageSpec):
                if item.optional and not need(exp, item.choice_id).taken:
                    continue
                emit(item, context)
            elif isinstance(item, Fragment):
                fid = fragment_ids[id(item)]
                choice = need(exp, fid)
                if item.is_loop:
                    count = len(choice.iterations)
                    if count < item.lower or (item.max_iter is not None and count > item.max_iter):
                        raise ExpansionOutOfBounds(
                            f"{fid}: {count} iteraciones fuera de [{item.lower}, {item.max_iter or '*'}]"
                        )
                    for n, inner in enumerate(choice.iterations):
                        walk(item.body, inner, context + ((fid, n),))
                elif choice.taken:
                    walk(item.body, exp, context + ((fid, 0),))

    walk(doc.body, expansion, ())
    return result


def expand(graph: EventGraph, expansion: FragmentExpansion) -> EventGraph:
    """Grafo expandido: una instancia de evento por aparición"""
    doc = graph.document
    if doc is None:
        raise ExpansionOutOfBounds("el grafo no conserva su documento de origen")
    occurrences = flatten(doc, expansion)
    contexts = [tuple(f"{fid}#{n}" for fid, n in occ.context) for occ in occurrences]
    return _build_graph(doc, occurrences, contexts)


def uniform_expansion(doc: MscDocument, take: bool = True, loops: int = 1) -> FragmentExpansion:
    """Expansión homogénea: todos los opt iguales y `loops` iteraciones (dentro de cotas)"""
    fragment_ids = doc.fragment_ids()

    def build(items) -> FragmentExpansion:
        choices: dict[str, FragmentChoice] = {}

        def visit(items):
            for item in items:
                if isinstance(item, MessageSpec) and item.optional:
                    choices[item.choice_id] = FragmentChoice(taken=take)
                elif isinstance(item, Fragment):
                    fid = fragment_ids[id(item)]
                    if item.is_loop:
                        count = max(loops, item.lower)
                        if item.max_iter is not None:
                            count = min(count, item.max_iter)
                        choices[fid] = FragmentChoice(iterations=tuple(build(item.body) for _ in range(count)))
                    else:
                        choices[fid] = FragmentChoice(taken=take)
                        visit(item.body)

        visit(items)
        return FragmentExpansion.of(choices)

    return build(doc.body)


def enumerate_expansions(doc: MscDocument, loop_cap: Optional[int] = None) -> Iterator[FragmentExpansion]:
    """
    Todas las expansiones del documento. Los loops sin cota se limitan a
    `loop_cap` iteraciones; sin `loop_cap` se rechazan.
    """
    fragment_ids = doc.fragment_ids()

    def options(items) -> list[dict[str, FragmentChoice]]:
        # Producto cartesiano de las elecciones de cada punto de este nivel
        partial: list[dict[str, FragmentChoice]] = [{}]
        for item in items:
            if isinstance(item, MessageSpec) and item.optional:
                partial = [{**p, item.choice_id: FragmentChoice(taken=t)} for p in partial for t in (True, False)]
            elif isinstance(item, Fragment):
                fid = fragment_ids[id(item)]
                if item.is_loop:
                    high = item.max_iter if item.max_iter is not None else loop_cap
                    if high is None:
                        raise ExpansionOutOfBounds(f"{fid}: loop sin cota superior")
                    body_options = [FragmentExpansion.of(o) for o in options(item.body)]
                    choices = []
                    for count in range(item.lower, high + 1):
                        for combo in itertools.product(body_options, repeat=count):
                            choices.append(FragmentChoice(iterations=tuple(combo)))
                    partial = [{**p, fid: c} for p in partial for c in choices]
                else:
                    inner = options(item.body)
                    taken = [{fid: FragmentChoice(taken=True), **o} for o in inner]
                    skipped = {fid: FragmentChoice(taken=False)}
                    partial = [{**p, **c} for p in partial for c in taken + [skipped]]
        return partial

    for choice_map in options(doc.body):
        yield FragmentExpansion.of(choice_map)
