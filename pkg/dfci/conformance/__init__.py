from dfci.conformance.trace import TraceEvent, dump_trace, dumps_trace, load_trace, loads_trace
from dfci.conformance.checker import ConformanceReport, Verdict, Violation, ViolationKind, check_trace
from dfci.conformance.objectives import ObjectiveReport, ObjectiveResult, ObjectiveStatus, check_objectives
from dfci.conformance.oracle import oracle_check

__all__ = [
    'TraceEvent', 'dump_trace', 'dumps_trace', 'load_trace', 'loads_trace',
    'ConformanceReport', 'Verdict', 'Violation', 'ViolationKind', 'check_trace',
    'ObjectiveReport', 'ObjectiveResult', 'ObjectiveStatus', 'check_objectives',
    'oracle_check',
]
