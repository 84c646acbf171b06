"""Comprobación de conformidad de trazas contra un documento MSC.

Cada lifeline recorre su proyección del documento con un cursor (pila de
marcos contenedor/índice/iteración). Las decisiones de fragmentos (opt
tomado, iteración de loop, mensaje opcional) son globales: se comparten entre
lifelines a través de un mapa indexado por la ruta dinámica del punto de
decisión. La búsqueda avanza evento a evento manteniendo una frontera de
configuraciones y solo ramifica al llegar a un punto aún no decidido.
"""
from __future__ import annotations

import logging
from enum import Enum
from typing import Iterator, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict

from dfci.conformance.trace import TraceEvent, ordered, require_protocol
from dfci.msc.graph import EventKind, _require_valid
from dfci.msc.model import Fragment, MessageSpec, MscDocument

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    CONFORMANT = "conformant"
    NONCONFORMANT = "nonconformant"


class ViolationKind(str, Enum):
    MISSING_MESSAGE = "MissingMessage"
    ORDER_VIOLATION = "OrderViolation"
    UNKNOWN_MESSAGE = "UnknownMessage"
    LIFELINE_MISMATCH = "LifelineMismatch"
    RECV_BEFORE_SEND = "RecvBeforeSend"
    LOOP_BOUND_EXCEEDED = "LoopBoundExceeded"


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    msg_id: str
    seq: Union[int, Literal["end"]]
    explanation: str

    def sort_key(self):
        position = (1, 0) if self.seq == "end" else (0, self.seq)
        return position, self.msg_id


class ConformanceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    violations: tuple[Violation, ...] = ()

    @property
    def conformant(self) -> bool:
        return self.verdict is Verdict.CONFORMANT

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    @classmethod
    def of(cls, violations: Sequence[Violation]) -> "ConformanceReport":
        first: dict[ViolationKind, Violation] = {}
        for violation in sorted(violations, key=Violation.sort_key):
            first.setdefault(violation.kind, violation)
        kept = tuple(sorted(first.values(), key=Violation.sort_key))
        return cls(verdict=Verdict.NONCONFORMANT if kept else Verdict.CONFORMANT, violations=kept)


# Un marco es (contenedor, índice, iteración); contenedor None = cuerpo raíz
Frame = tuple[Optional[str], int, int]
Cursor = tuple[Frame, ...]
Decisions = frozenset


class _Walker:
    """Recorrido de la proyección de una lifeline con decisiones compartidas"""

    def __init__(self, doc: MscDocument, trace_length: int):
        self.doc = doc
        self.fragments = dict(doc.fragments())
        self.fragment_ids = doc.fragment_ids()
        self.bodies = {None: doc.body, **{fid: frag.body for fid, frag in self.fragments.items()}}
        self.participants = {fid: doc.lifelines_of(frag.body) for fid, frag in self.fragments.items()}
        self.slack = trace_length // 2 + 1

    @staticmethod
    def path(frames: Cursor) -> tuple:
        return tuple((container, iteration) for container, _, iteration in frames[1:])

    def involves(self, msg: MessageSpec, lifeline: str) -> bool:
        return lifeline in (self.doc.canonical(msg.sender), self.doc.canonical(msg.receiver))

    def _options(self, decisions: dict, key, forced: Optional[bool]):
        if key in decisions:
            return [(decisions[key], None)]
        if forced is not None:
            return [(forced, None)]
        return [(True, (key, True)), (False, (key, False))]

    def _loop_forced(self, frag: Fragment, iteration: int) -> Optional[bool]:
        if iteration < frag.lower:
            return True
        if frag.max_iter is not None and iteration >= frag.max_iter:
            return False
        if iteration >= frag.lower + self.slack:
            return False
        return None

    def settle(self, lifeline: str, cursor: Cursor, decisions: Decisions,
               only_false: bool = False) -> Iterator[tuple[Cursor, Decisions, Optional[MessageSpec]]]:
        """
        Avanza el cursor sin consumir eventos hasta el siguiente mensaje en el
        que interviene la lifeline (o hasta el final, con mensaje None).
        Con `only_false` los puntos sin decidir se resuelven como no tomados.
        """
        table = dict(decisions)
        frames = list(cursor)
        while True:
            container, index, iteration = frames[-1]
            body = self.bodies[container]
            if index >= len(body):
                if container is None:
                    yield tuple(frames), decisions, None
                    return
                frames.pop()
                frag = self.fragments[container]
                if not frag.is_loop:
                    frames[-1] = (frames[-1][0], frames[-1][1] + 1, frames[-1][2])
                    continue
                key = (self.path(frames), container, iteration + 1)
                yield from self._branch(
                    lifeline, frames, decisions, table, key, self._loop_forced(frag, iteration + 1), only_false,
                    taken=(container, 0, iteration + 1),
                )
                return
            item = body[index]
            if isinstance(item, MessageSpec):
                if not self.involves(item, lifeline):
                    frames[-1] = (container, index + 1, iteration)
                    continue
                if not item.optional:
                    yield tuple(frames), decisions, item
                    return
                key = (self.path(frames), item.choice_id)
                yield from self._branch(lifeline, frames, decisions, table, key, None, only_false, stop=item)
                return
            if isinstance(item, Fragment):
                fid = self.fragment_ids[id(item)]
                if lifeline not in self.participants[fid]:
                    frames[-1] = (container, index + 1, iteration)
                    continue
                if item.is_loop:
                    key = (self.path(frames), fid, 0)
                    forced = self._loop_forced(item, 0)
                else:
                    key = (self.path(frames), fid)
                    forced = None
                yield from self._branch(lifeline, frames, decisions, table, key, forced, only_false,
                                        taken=(fid, 0, 0))
                return
            frames[-1] = (container, index + 1, iteration)

    def _branch(self, lifeline, frames, decisions, table, key, forced, only_false, taken=None, stop=None):
        if only_false and forced is None and key not in table:
            forced = False
        for value, recorded in self._options(table, key, forced):
            branch_decisions = decisions | {recorded} if recorded is not None else decisions
            if value:
                if stop is not None:
                    yield tuple(frames), branch_decisions, stop
                    continue
                next_frames = tuple(frames) + (taken,)
            else:
                top = frames[-1]
                next_frames = tuple(frames[:-1]) + ((top[0], top[1] + 1, top[2]),)
            yield from self.settle(lifeline, next_frames, branch_decisions, only_false)

    @staticmethod
    def step_past(cursor: Cursor) -> Cursor:
        container, index, iteration = cursor[-1]
        return cursor[:-1] + ((container, index + 1, iteration),)


def _prepass(doc: MscDocument, trace: Sequence[TraceEvent]) -> tuple[list[Violation], list[TraceEvent]]:
    violations: list[Violation] = []
    searchable: list[TraceEvent] = []
    sends: dict[str, int] = {}
    recvs: dict[str, int] = {}
    counts: dict[tuple[str, EventKind], int] = {}
    for event in trace:
        msg = doc.message(event.msg_id)
        if msg is None:
            violations.append(Violation(
                kind=ViolationKind.UNKNOWN_MESSAGE, msg_id=event.msg_id, seq=event.seq,
                explanation=f"el mensaje {event.msg_id} no existe en {doc.name}",
            ))
            continue
        if (doc.canonical(event.sender), doc.canonical(event.receiver)) != (
            doc.canonical(msg.sender), doc.canonical(msg.receiver)
        ):
            violations.append(Violation(
                kind=ViolationKind.LIFELINE_MISMATCH, msg_id=event.msg_id, seq=event.seq,
                explanation=(f"{event.sender} -> {event.receiver} no coincide con "
                             f"{msg.sender} -> {msg.receiver}"),
            ))
            continue
        if event.kind is EventKind.SEND:
            sends[event.msg_id] = sends.get(event.msg_id, 0) + 1
        else:
            if recvs.get(event.msg_id, 0) >= sends.get(event.msg_id, 0):
                violations.append(Violation(
                    kind=ViolationKind.RECV_BEFORE_SEND, msg_id=event.msg_id, seq=event.seq,
                    explanation=f"recepción de {event.msg_id} sin envío previo",
                ))
            recvs[event.msg_id] = recvs.get(event.msg_id, 0) + 1
        key = (event.msg_id, event.kind)
        counts[key] = counts.get(key, 0) + 1
        limit = doc.max_occurrences(event.msg_id)
        if limit is not None and counts[key] > limit:
            violations.append(Violation(
                kind=ViolationKind.LOOP_BOUND_EXCEEDED, msg_id=event.msg_id, seq=event.seq,
                explanation=f"{event.msg_id} aparece más de {limit} veces",
            ))
        searchable.append(event)
    return violations, searchable


def _complete(walker: _Walker, lifelines: list[str], cursors: tuple[Cursor, ...],
              decisions: Decisions) -> tuple[bool, list[MessageSpec]]:
    """Intenta llevar todas las lifelines al final sin consumir eventos"""
    blocked: list[MessageSpec] = []
    for lifeline, cursor in zip(lifelines, cursors):
        cursor, decisions, pending = next(walker.settle(lifeline, cursor, decisions, only_false=True))
        if pending is not None:
            blocked.append(pending)
    return not blocked, blocked


def check_trace(doc: MscDocument, trace: Sequence[TraceEvent], prefix: bool = False) -> ConformanceReport:
    """
    Conformidad de una traza: existe una expansión del documento de la que la
    traza es exactamente una linealización. Con `prefix` basta con que sea
    prefijo de una traza conforme.
    """
    _require_valid(doc)
    events = ordered(trace)
    require_protocol(doc.name, events)
    violations, searchable = _prepass(doc, events)

    walker = _Walker(doc, len(searchable))
    lifelines = [lifeline.id for lifeline in doc.lifelines]
    slot = {lifeline: n for n, lifeline in enumerate(lifelines)}
    start: Cursor = ((None, 0, 0),)
    frontier = {(tuple(start for _ in lifelines), frozenset())}

    for event in searchable:
        lifeline = doc.canonical(event.lifeline)
        n = slot[lifeline]
        following = set()
        for cursors, decisions in frontier:
            for cursor, new_decisions, msg in walker.settle(lifeline, cursors[n], decisions):
                if msg is None or msg.msg_id != event.msg_id:
                    continue
                moved = cursors[:n] + (walker.step_past(cursor),) + cursors[n + 1:]
                following.add((moved, new_decisions))
        if not following:
            violations.append(Violation(
                kind=ViolationKind.ORDER_VIOLATION, msg_id=event.msg_id, seq=event.seq,
                explanation=f"{event.kind.value} {event.msg_id} no está habilitado en esta posición",
            ))
            logger.debug("Frontera vacía en seq=%s", event.seq)
            return ConformanceReport.of(violations)
        frontier = following

    if not prefix:
        blocked_by: list[MessageSpec] = []
        completed = False
        for cursors, decisions in frontier:
            ok, blocked = _complete(walker, lifelines, cursors, decisions)
            if ok:
                completed = True
                break
            blocked_by.extend(blocked)
        if not completed:
            order = doc.msg_ids()
            missing = min(blocked_by, key=lambda m: (order.index(m.msg_id), m.msg_id))
            violations.append(Violation(
                kind=ViolationKind.MISSING_MESSAGE, msg_id=missing.msg_id, seq="end",
                explanation=f"falta el mensaje obligatorio {missing.msg_id} ({missing.label})",
            ))
    return ConformanceReport.of(violations)
