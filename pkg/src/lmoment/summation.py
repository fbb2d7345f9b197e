"""Deterministic compensated summation helpers.

Scalar reductions go through :func:`math.fsum` (exactly rounded, so the
result does not depend on term order).  Array accumulations that run over
many passes use :class:`KahanAccumulator`, a vectorised Neumaier sum whose
result depends only on the fixed order in which passes are added.
"""

from __future__ import annotations

import math

import numpy as np


def fsum_complex(values) -> complex:
    arr = np.asarray(values, dtype=complex)
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def fsum_array(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


class KahanAccumulator:
    """Elementwise Neumaier-compensated running sum of equally shaped arrays."""

    def __init__(self, shape, dtype=float):
        self.total = np.zeros(shape, dtype=dtype)
        self.comp = np.zeros(shape, dtype=dtype)

    def add(self, x) -> None:
        t = self.total + x
        big = np.abs(self.total) >= np.abs(x)
        # the rounding error of t is recovered from whichever operand is larger
        self.comp += np.where(big, (self.total - t) + x, (x - t) + self.total)
        self.total = t

    def result(self) -> np.ndarray:
        return self.total + self.comp
