"""Generador determinista de 64 bits (PCG64 de numpy)"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

_SCALE = 2**64


class SeededRandom:
    """
    Envoltorio sobre `numpy.random.PCG64`. Solo se usan extracciones crudas
    de 64 bits para que la secuencia sea reproducible entre versiones.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._bits = np.random.PCG64(seed)

    def next_u64(self) -> int:
        return int(self._bits.random_raw())

    def chance(self, probability: Fraction) -> bool:
        """Cierto con probabilidad exacta `probability`"""
        return Fraction(self.next_u64(), _SCALE) < probability

    def below(self, bound: int) -> int:
        return self.next_u64() % bound

    def coin(self) -> bool:
        return self.next_u64() & 1 == 1
