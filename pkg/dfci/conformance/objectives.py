"""Evaluación de objetivos funcionales sobre una traza"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict

from dfci.conformance.checker import ConformanceReport, check_trace
from dfci.conformance.trace import TraceEvent, ordered, require_protocol
from dfci.msc.graph import EventKind
from dfci.msc.model import And, Conformant, Eventually, MscDocument, Or, Responds


class ObjectiveStatus(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"


class ObjectiveResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    status: ObjectiveStatus
    witness: Optional[int] = None
    missing: tuple[str, ...] = ()

    @property
    def satisfied(self) -> bool:
        return self.status is ObjectiveStatus.SATISFIED


class ObjectiveReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    results: tuple[ObjectiveResult, ...] = ()

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.results)

    def result(self, objective_id: str) -> Optional[ObjectiveResult]:
        return next((r for r in self.results if r.id == objective_id), None)


@dataclass(frozen=True)
class _Outcome:
    ok: bool
    witness: Optional[int]
    missing: tuple[str, ...]


def _union(*groups: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(sorted({m for group in groups for m in group}))


class _Evaluator:
    def __init__(self, doc: MscDocument, trace: list[TraceEvent], conformance: Optional[ConformanceReport] = None):
        self.doc = doc
        self.trace = trace
        self._conformance = conformance

    def conformance(self) -> ConformanceReport:
        if self._conformance is None:
            self._conformance = check_trace(self.doc, self.trace)
        return self._conformance

    def evaluate(self, pred) -> _Outcome:
        if isinstance(pred, Eventually):
            seqs = [e.seq for e in self.trace if e.msg_id == pred.msg_id and e.kind is EventKind.RECV]
            if seqs:
                return _Outcome(True, min(seqs), ())
            return _Outcome(False, None, (pred.msg_id,))
        if isinstance(pred, Responds):
            pending = 0
            witness = None
            for event in self.trace:
                if event.msg_id == pred.request and event.kind is EventKind.SEND:
                    pending += 1
                elif event.msg_id == pred.answer and event.kind is EventKind.RECV and pending:
                    pending -= 1
                    witness = event.seq
            if pending:
                return _Outcome(False, None, (pred.answer,))
            return _Outcome(True, witness, ())
        if isinstance(pred, Conformant):
            report = self.conformance()
            if report.conformant:
                return _Outcome(True, None, ())
            return _Outcome(False, None, _union(tuple(v.msg_id for v in report.violations)))
        left = self.evaluate(pred.left)
        right = self.evaluate(pred.right)
        if isinstance(pred, And):
            witnesses = [w for w in (left.witness, right.witness) if w is not None]
            ok = left.ok and right.ok
            return _Outcome(ok, max(witnesses) if ok and witnesses else None, _union(left.missing, right.missing))
        if isinstance(pred, Or):
            satisfied = [o.witness for o in (left, right) if o.ok and o.witness is not None]
            if left.ok or right.ok:
                return _Outcome(True, min(satisfied) if satisfied else None, ())
            return _Outcome(False, None, _union(left.missing, right.missing))
        raise TypeError(f"predicado desconocido: {pred!r}")


def check_objectives(doc: MscDocument, trace: Sequence[TraceEvent],
                     conformance: Optional[ConformanceReport] = None) -> ObjectiveReport:
    """
    Evalúa cada objetivo del documento con independencia de la conformidad
    (salvo el átomo `conformant`, que reutiliza `conformance` si se pasa).
    """
    events = ordered(trace)
    require_protocol(doc.name, events)
    evaluator = _Evaluator(doc, events, conformance)
    results = []
    for objective in doc.objectives:
        outcome = evaluator.evaluate(objective.predicate)
        results.append(ObjectiveResult(
            id=objective.id,
            status=ObjectiveStatus.SATISFIED if outcome.ok else ObjectiveStatus.VIOLATED,
            witness=outcome.witness if outcome.ok else None,
            missing=() if outcome.ok else outcome.missing,
        ))
    return ObjectiveReport(results=tuple(results))
