"""Simulador determinista de protocolos MSC.

Un único planificador ejecuta a todos los actores: entre los eventos
habilitados elige el de menor (posición en el documento, msg_id). Los fallos
se aplican después, como cirugía sobre la traza y el registro de custodia.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from datetime import timedelta, timezone
from typing import NamedTuple, Optional

from dfci.conformance.trace import TraceEvent
from dfci.core.config import settings
from dfci.core.errors import ConfigOutOfBounds
from dfci.core.timestamps import parse_timestamp
from dfci.custody.ledger import CustodyAction, CustodyChain, EntryDraft, append_entry, open_chain
from dfci.msc.graph import (
    EventKind,
    FragmentChoice,
    FragmentExpansion,
    Occurrence,
    _require_valid,
    compile,
    expand,
    flatten,
)
from dfci.msc.model import Fragment, MessageSpec, MscDocument, Phase
from dfci.sim.config import OptPolicy, SimConfig
from dfci.sim.faults import apply_faults
from dfci.sim.rng import SeededRandom

logger = logging.getLogger(__name__)

TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


class SimulationResult(NamedTuple):
    trace: list[TraceEvent]
    chain: Optional[CustodyChain]


@dataclass
class Emitted:
    """Evento en construcción: la marca de tiempo es la de emisión, el seq se asigna al final"""
    message: MessageSpec
    instance: int
    kind: EventKind
    digest: str
    ts: str
    meta: dict[str, str] = field(default_factory=dict)

    def key(self) -> tuple[str, int]:
        return self.message.msg_id, self.instance


@dataclass
class PendingEntry:
    """Entrada de custodia enlazada a una aparición de mensaje"""
    action: CustodyAction
    actor: str
    occurrence: tuple[str, int]
    at_send: bool
    digest: str


def occurrence_digest(doc_name: str, msg_id: str, instance: int, seed: int) -> str:
    return hashlib.sha256(f"{doc_name}:{msg_id}:{instance}:{seed}".encode("utf-8")).hexdigest()


def timestamp(seq: int) -> str:
    base = parse_timestamp(settings.BASE_TS).astimezone(timezone.utc)
    return (base + timedelta(minutes=seq)).strftime(TS_FORMAT)


def expansion_from_config(doc: MscDocument, config: SimConfig, rng: SeededRandom) -> FragmentExpansion:
    """Fija cada punto de decisión según la configuración; `random` consume el generador"""
    fragment_ids = doc.fragment_ids()
    known = {fid for fid, _ in doc.fragments()} | {m.choice_id for m in doc.messages() if m.optional}
    for choice_id in (*config.loop_iterations, *config.opt_policy):
        if choice_id not in known:
            raise ConfigOutOfBounds(f"punto de decisión desconocido en la configuración: {choice_id}")

    def take(choice_id: str) -> bool:
        policy = config.policy_for(choice_id)
        if policy is OptPolicy.RANDOM:
            return rng.coin()
        return policy is OptPolicy.TAKE

    def build(items) -> FragmentExpansion:
        choices: dict[str, FragmentChoice] = {}
        for item in items:
            if isinstance(item, MessageSpec) and item.optional:
                choices[item.choice_id] = FragmentChoice(taken=take(item.choice_id))
            elif isinstance(item, Fragment):
                fid = fragment_ids[id(item)]
                if item.is_loop:
                    count = max(config.iterations_for(fid), item.lower)
                    high = item.max_iter if item.max_iter is not None else settings.LOOP_CAP
                    if count > high:
                        raise ConfigOutOfBounds(f"{fid}: {count} iteraciones superan el máximo {high}")
                    choices[fid] = FragmentChoice(iterations=tuple(build(item.body) for _ in range(count)))
                elif take(fid):
                    choices[fid] = FragmentChoice(taken=True)
                    choices.update(build(item.body).choices)
                else:
                    choices[fid] = FragmentChoice(taken=False)
        return FragmentExpansion.of(choices)

    return build(doc.body)


def schedule(doc: MscDocument, expansion: FragmentExpansion) -> list[tuple[Occurrence, EventKind]]:
    """Orden de ejecución: menor (posición, msg_id) entre los eventos habilitados"""
    occurrences = flatten(doc, expansion)
    graph = expand(compile(doc), expansion)
    by_key = {(occ.message.msg_id, occ.instance): occ for occ in occurrences}
    preds = graph.predecessors()
    done: set = set()
    order: list[tuple[Occurrence, EventKind]] = []
    while len(done) < len(graph.events):
        enabled = [e for e in graph.events if e not in done and preds[e] <= done]
        event = min(enabled, key=lambda e: (graph.positions[e], e.msg_id, e.kind is EventKind.RECV))
        done.add(event)
        order.append((by_key[(event.msg_id, event.instance)], event.kind))
    return order


def _custody_plan(doc: MscDocument, occurrences: list[Occurrence], seed: int) -> list[PendingEntry]:
    """Entradas de custodia emitidas en las fronteras de fase del tramo custodiado"""
    if doc.custody_span is None:
        return []
    start_id, end_id = doc.custody_span
    starts = [n for n, occ in enumerate(occurrences) if occ.message.msg_id == start_id]
    ends = [n for n, occ in enumerate(occurrences) if occ.message.msg_id == end_id]
    if not starts or not ends:
        return []
    first, last = starts[0], ends[-1]
    plan: list[PendingEntry] = []
    custodian: Optional[str] = None
    examined = presented = False
    for n in range(first, last + 1):
        occ = occurrences[n]
        msg = occ.message
        sender, receiver = doc.canonical(msg.sender), doc.canonical(msg.receiver)
        digest = occurrence_digest(doc.name, msg.msg_id, occ.instance, seed)
        key = (msg.msg_id, occ.instance)
        if n == first:
            custodian = sender
            plan.append(PendingEntry(CustodyAction.SEIZE, sender, key, True, digest))
        elif n == last:
            plan.append(PendingEntry(CustodyAction.PRESENT, sender, key, False, digest))
        elif msg.phase is Phase.COLLECTION:
            if msg.optional:
                plan.append(PendingEntry(CustodyAction.SEAL, sender, key, False, digest))
            else:
                plan.append(PendingEntry(CustodyAction.TRANSFER, receiver, key, False, digest))
        elif msg.phase is Phase.EXAMINATION and not examined:
            examined = True
            plan.append(PendingEntry(CustodyAction.EXAMINE, sender, key, False, digest))
        elif msg.phase is Phase.PRESENTATION and not presented and sender == custodian:
            presented = True
            plan.append(PendingEntry(CustodyAction.PRESENT, sender, key, False, digest))
    return plan


def finalize(doc: MscDocument, emitted: list[Emitted]) -> list[TraceEvent]:
    """Numera los eventos tras los fallos; cada uno conserva su marca de emisión"""
    return [
        TraceEvent(
            seq=seq,
            ts=item.ts,
            protocol=doc.name,
            msg_id=item.message.msg_id,
            kind=item.kind,
            sender=item.message.sender,
            receiver=item.message.receiver,
            payload_digest=item.digest,
            meta=dict(item.meta),
        )
        for seq, item in enumerate(emitted)
    ]


def build_chain(case_id: str, evidence_id: str, plan: list[PendingEntry],
                emitted: list[Emitted]) -> Optional[CustodyChain]:
    """Sella las entradas del plan con la marca de tiempo de su evento enlazado"""
    if not plan:
        return None
    stamps: dict[tuple[tuple[str, int], EventKind], str] = {}
    for item in emitted:
        stamps.setdefault((item.key(), item.kind), item.ts)
    chain: Optional[CustodyChain] = None
    for pending in plan:
        kind = EventKind.SEND if pending.at_send else EventKind.RECV
        draft = EntryDraft(
            ts=stamps[(pending.occurrence, kind)],
            actor=pending.actor,
            action=pending.action,
            evidence_id=evidence_id,
            payload_digest=pending.digest,
        )
        chain = open_chain(case_id, draft) if chain is None else append_entry(chain, draft)
    return chain


def simulate(doc: MscDocument, config: SimConfig) -> SimulationResult:
    """
    Ejecuta el documento con la configuración dada. Sin fallos, la traza es
    conforme y, si el documento declara tramo de custodia, la cadena es
    válida y lo cubre.
    """
    _require_valid(doc)
    for rule in config.faults:
        if doc.message(rule.target) is None:
            raise ConfigOutOfBounds(f"la regla de fallo apunta a un mensaje inexistente: {rule.target}")
    rng = SeededRandom(config.seed)
    expansion = expansion_from_config(doc, config, rng)
    order = schedule(doc, expansion)
    occurrences = flatten(doc, expansion)
    plan = _custody_plan(doc, occurrences, config.seed)

    links = {pending.occurrence: str(index) for index, pending in enumerate(plan)}
    emitted = []
    for n, (occ, kind) in enumerate(order):
        key = (occ.message.msg_id, occ.instance)
        emitted.append(Emitted(
            message=occ.message,
            instance=occ.instance,
            kind=kind,
            digest=occurrence_digest(doc.name, key[0], key[1], config.seed),
            ts=timestamp(n),
            meta={"custody_entry": links[key]} if key in links else {},
        ))

    chain = build_chain(config.case_id or doc.name, config.evidence_id, plan, emitted)
    emitted, chain = apply_faults(config.faults, emitted, chain, plan, rng)
    trace = finalize(doc, emitted)
    logger.info("Simulación de %s (semilla %d): %d eventos", doc.name, config.seed, len(trace))
    return SimulationResult(trace=trace, chain=chain)

