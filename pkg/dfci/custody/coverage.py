"""Cobertura de la custodia sobre el tramo declarado de una traza"""
from __future__ import annotations

from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict

from dfci.conformance.trace import TraceEvent, ordered
from dfci.core.errors import BrokenChain, NoCustodySpan
from dfci.core.timestamps import parse_timestamp
from dfci.custody.ledger import CustodyAction, CustodyChain, verify_chain
from dfci.msc.model import MscDocument


class CoverageGap(BaseModel):
    model_config = ConfigDict(frozen=True)

    where: str  # "start", "end", "examine"
    msg_id: Optional[str] = None
    entry_index: Optional[int] = None
    explanation: str


class CoverageReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    covered: bool
    gaps: tuple[CoverageGap, ...] = ()


class DigestMismatch(BaseModel):
    """Discrepancia entre traza y registro; sin `seq` ni `msg_id` si la entrada no tiene evento enlazado"""
    model_config = ConfigDict(frozen=True)

    seq: Optional[int] = None
    msg_id: Optional[str] = None
    entry_index: int
    explanation: str


def check_custody_coverage(doc: MscDocument, trace: Sequence[TraceEvent], chain: CustodyChain) -> CoverageReport:
    """
    La custodia cubre el tramo si una incautación precede al primer evento del
    mensaje inicial, una presentación (o la última entrada) sigue al último
    evento del mensaje final y todos los exámenes quedan entre ambos.
    """
    if doc.custody_span is None:
        raise NoCustodySpan(f"el documento {doc.name} no declara tramo de custodia")
    result = verify_chain(chain)
    if not result.valid:
        raise BrokenChain(f"cadena {chain.case_id} rota en la entrada {result.index}: {result.message}")

    start_id, end_id = doc.custody_span
    events = ordered(trace)
    gaps: list[CoverageGap] = []
    start_events = [e for e in events if e.msg_id == start_id]
    end_events = [e for e in events if e.msg_id == end_id]

    start_ts = parse_timestamp(start_events[0].ts) if start_events else None
    end_ts = parse_timestamp(end_events[-1].ts) if end_events else None
    if start_ts is None:
        gaps.append(CoverageGap(where="start", msg_id=start_id,
                                explanation=f"la traza no contiene el mensaje inicial {start_id}"))
    if end_ts is None:
        gaps.append(CoverageGap(where="end", msg_id=end_id,
                                explanation=f"la traza no contiene el mensaje final {end_id}"))

    seizures = [e for e in chain.entries if e.action is CustodyAction.SEIZE]
    seize_ts = min((parse_timestamp(e.ts) for e in seizures), default=None)
    if start_ts is not None and (seize_ts is None or seize_ts > start_ts):
        gaps.append(CoverageGap(where="start", msg_id=start_id,
                                explanation=f"ninguna incautación precede al mensaje {start_id}"))

    closers = [e for e in chain.entries if e.action is CustodyAction.PRESENT]
    if chain.entries:
        closers.append(chain.entries[-1])
    close_ts = max((parse_timestamp(e.ts) for e in closers), default=None)
    if end_ts is not None and (close_ts is None or close_ts < end_ts):
        gaps.append(CoverageGap(where="end", msg_id=end_id,
                                explanation=f"la custodia termina antes del mensaje {end_id}"))

    for entry in chain.entries:
        if entry.action is not CustodyAction.EXAMINE:
            continue
        instant = parse_timestamp(entry.ts)
        if (seize_ts is not None and instant < seize_ts) or (close_ts is not None and instant > close_ts):
            gaps.append(CoverageGap(where="examine", entry_index=entry.index,
                                    explanation=f"el examen {entry.index} queda fuera del tramo custodiado"))

    return CoverageReport(covered=not gaps, gaps=tuple(gaps))


def cross_check_digests(trace: Sequence[TraceEvent], chain: CustodyChain) -> list[DigestMismatch]:
    """
    Compara los eventos enlazados (meta custody_entry) con el digest de su
    entrada e informa de las entradas a las que no enlaza ningún evento.
    """
    mismatches: list[DigestMismatch] = []
    by_index = {entry.index: entry for entry in chain.entries}
    linked: set[int] = set()
    for event in ordered(trace):
        link = event.meta.get("custody_entry")
        if link is None:
            continue
        index = int(link) if link.isdigit() else -1
        linked.add(index)
        entry = by_index.get(index)
        if entry is None:
            mismatches.append(DigestMismatch(seq=event.seq, msg_id=event.msg_id, entry_index=index,
                                             explanation=f"la entrada {link} no existe en la cadena"))
        elif entry.payload_digest != event.payload_digest:
            mismatches.append(DigestMismatch(seq=event.seq, msg_id=event.msg_id, entry_index=entry.index,
                                             explanation=f"el digest de {event.msg_id} no coincide con la entrada {entry.index}"))
    for entry in chain.entries:
        if entry.index not in linked:
            mismatches.append(DigestMismatch(entry_index=entry.index,
                                             explanation=f"ningún evento enlaza la entrada {entry.index}"))
    return mismatches
