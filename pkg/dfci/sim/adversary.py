"""Matriz de detección: qué detector salta ante cada fallo inyectado"""
from __future__ import annotations

import logging
from enum import Enum
from typing import Iterable, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict

from dfci.conformance.checker import check_trace
from dfci.conformance.objectives import check_objectives
from dfci.conformance.trace import TraceEvent
from dfci.custody.coverage import check_custody_coverage, cross_check_digests
from dfci.custody.ledger import CustodyChain, verify_chain
from dfci.msc.model import MscDocument
from dfci.sim.config import FaultKind, FaultRule, FaultSide, SimConfig
from dfci.sim.simulator import simulate

logger = logging.getLogger(__name__)

LEDGER_KINDS = (FaultKind.DROP, FaultKind.TAMPER)


class Detector(str, Enum):
    CONFORMANCE = "conformance"
    OBJECTIVE = "objective"
    CUSTODY = "custody"
    DIGEST = "digest"


class DetectionRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    msg_id: str
    kind: FaultKind
    side: FaultSide
    seed: int
    detectors: tuple[Detector, ...] = ()

    @property
    def detected(self) -> bool:
        return bool(self.detectors)


class DetectionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    protocol: str
    rows: tuple[DetectionRow, ...] = ()

    def row(self, msg_id: str, kind: FaultKind, side: FaultSide = FaultSide.TRACE,
            seed: Optional[int] = None) -> Optional[DetectionRow]:
        for row in self.rows:
            if (row.msg_id, row.kind, row.side) == (msg_id, kind, side) and seed in (None, row.seed):
                return row
        return None

    def to_frame(self) -> pd.DataFrame:
        records = [
            {
                "msg_id": row.msg_id,
                "kind": row.kind.value,
                "side": row.side.value,
                "seed": row.seed,
                "detectors": ",".join(d.value for d in row.detectors) or "none",
            }
            for row in self.rows
        ]
        return pd.DataFrame(records, columns=["msg_id", "kind", "side", "seed", "detectors"])

    def to_text(self) -> str:
        if not self.rows:
            return "(sin filas)\n"
        return self.to_frame().to_string(index=False) + "\n"

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def detect(doc: MscDocument, trace: Sequence[TraceEvent], chain: Optional[CustodyChain]) -> tuple[Detector, ...]:
    """Detectores que señalan algún problema en una traza y su cadena"""
    fired: list[Detector] = []
    conformance = check_trace(doc, trace)
    if not conformance.conformant:
        fired.append(Detector.CONFORMANCE)
    if not check_objectives(doc, trace, conformance).all_satisfied:
        fired.append(Detector.OBJECTIVE)
    if chain is not None:
        if not verify_chain(chain).valid or (
            doc.custody_span is not None and not check_custody_coverage(doc, trace, chain).covered
        ):
            fired.append(Detector.CUSTODY)
        if cross_check_digests(trace, chain):
            fired.append(Detector.DIGEST)
    return tuple(fired)


def adversary_matrix(doc: MscDocument, kinds: Iterable[FaultKind], seeds: Sequence[int],
                     include_ledger: bool = False) -> DetectionReport:
    """
    Simula cada (mensaje, tipo, semilla) con un único fallo de probabilidad 1
    y anota los detectores que lo señalan. Con `include_ledger` se añaden
    las filas de manipulación del registro de custodia.
    """
    ordered_kinds = [k for k in FaultKind if k in set(kinds)]
    sides = [FaultSide.TRACE]
    if include_ledger and doc.custody_span is not None:
        sides.append(FaultSide.LEDGER)
    rows: list[DetectionRow] = []
    for msg_id in doc.msg_ids():
        for kind in ordered_kinds:
            for side in sides:
                if side is FaultSide.LEDGER and kind not in LEDGER_KINDS:
                    continue
                for seed in seeds:
                    rule = FaultRule(target=msg_id, kind=kind, probability=1, side=side)
                    trace, chain = simulate(doc, SimConfig(seed=seed, faults=(rule,)))
                    rows.append(DetectionRow(msg_id=msg_id, kind=kind, side=side, seed=seed,
                                             detectors=detect(doc, trace, chain)))
    logger.info("Matriz de detección de %s: %d filas", doc.name, len(rows))
    return DetectionReport(protocol=doc.name, rows=tuple(rows))
