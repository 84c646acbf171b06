from dfci.sim.config import FaultKind, FaultRule, FaultSide, OptPolicy, SimConfig, parse_fault
from dfci.sim.rng import SeededRandom
from dfci.sim.simulator import SimulationResult, simulate
from dfci.sim.adversary import DetectionReport, DetectionRow, Detector, adversary_matrix, detect

__all__ = [
    'FaultKind', 'FaultRule', 'FaultSide', 'OptPolicy', 'SimConfig', 'parse_fault',
    'SeededRandom', 'SimulationResult', 'simulate',
    'DetectionReport', 'DetectionRow', 'Detector', 'adversary_matrix', 'detect',
]
