"""Block counts T_{i,j} of the congruence mu = nv (mod q), mu != nv, and
the block-sum upper bound on M2.

u runs over the e-adic block [e^i, e^{i+1}) and v over [e^j, e^{j+1}),
both capped at q^2.  Two independent counters are provided: a direct
enumeration of quadruples and the divisor route, which writes
mu = nv + kq, fixes (m, u, k) and counts the splits of nv = mu - kq.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import arith
from .arith import GuardError
from .averages import m2
from .lvalues import HarmonicClassTable, harmonic_class_table

BRUTE_VOLUME_LIMIT = 10**9
BOUND_VOLUME_LIMIT = 10**8


def j_of(q: int) -> int:
    if q < 2:
        raise ValueError("q must be >= 2")
    return math.floor(2.0 * math.log(q))


def _block_start(i: int) -> int:
    if i == 0:
        return 1
    x = math.exp(i)
    c = math.ceil(x)
    # e^i is irrational; a float landing within rounding of an integer would
    # make the ceiling ambiguous
    if abs(x - round(x)) <= 4 * math.ulp(x):
        raise ArithmeticError(f"e^{i} is too close to an integer to place the block boundary")
    return c


@dataclass(frozen=True)
class BlockSpec:
    """An (i, j) pair of e-adic blocks for (u, v)."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise ValueError("block indices must be nonnegative")

    @staticmethod
    def range_of(k: int, cap: int | None = None) -> tuple[int, int]:
        """Half-open integer range [lo, hi) of the k-th block, cut at ``cap``."""
        lo, hi = _block_start(k), _block_start(k + 1)
        if cap is not None:
            hi = min(hi, cap + 1)
            lo = min(lo, hi)
        return lo, hi

    def u_range(self, q: int) -> tuple[int, int]:
        return self.range_of(self.i, q * q)

    def v_range(self, q: int) -> tuple[int, int]:
        return self.range_of(self.j, q * q)

    def swapped(self) -> "BlockSpec":
        return BlockSpec(self.j, self.i)


def block_specs(q: int) -> list[BlockSpec]:
    big_j = j_of(q)
    return [BlockSpec(i, j) for i in range(big_j + 1) for j in range(i, big_j + 1)]


def brute_volume(q: int, n: int, spec: BlockSpec) -> int:
    ulo, uhi = spec.u_range(q)
    vlo, vhi = spec.v_range(q)
    return n * n * (uhi - ulo) * (vhi - vlo)


def t_bruteforce(q: int, n: int, spec: BlockSpec) -> int:
    """Count (m, n, u, v) directly, one (m, n) pair at a time."""
    vol = brute_volume(q, n, spec)
    if vol > BRUTE_VOLUME_LIMIT:
        raise GuardError(f"brute-force volume {vol} exceeds {BRUTE_VOLUME_LIMIT}; use t_divisor")
    ulo, uhi = spec.u_range(q)
    vlo, vhi = spec.v_range(q)
    u = np.arange(ulo, uhi, dtype=np.int64)
    v = np.arange(vlo, vhi, dtype=np.int64)
    count = 0
    for a in range(1, n + 1):
        mu = a * u
        for b in range(1, n + 1):
            nv = b * v
            diff = mu[:, None] - nv[None, :]
            count += int(np.count_nonzero((diff % q == 0) & (diff != 0)))
    return count


def k_window(q: int, n: int, spec: BlockSpec) -> int:
    """Largest |k| that needs visiting: |mu - nv| < N e^{max(i,j)+1}, plus one for rounding."""
    return math.floor(math.exp(max(spec.i, spec.j) + 1) * n / q) + 1


def t_divisor(q: int, n: int, spec: BlockSpec, k_extra: int = 0) -> int:
    """Sum over m <= N, u in the i-block and 1 <= |k| <= K of
    divisor_pairs_in_box(mu - kq, N, j-block), for mu - kq >= 1.

    Products x = mu are tallied first.  For each x the sum over k runs along
    the residue class of x mod q, so cumulative sums along that class give
    every k-window in O(1).
    """
    ulo, uhi = spec.u_range(q)
    vlo, vhi = spec.v_range(q)
    if ulo >= uhi or vlo >= vhi:
        return 0
    big_k = k_window(q, n, spec) + k_extra
    x_max = n * (uhi - 1)
    s_max = n * (vhi - 1)

    hist = arith.divisor_pairs_table(x_max, n, ulo, uhi)  # (m, u) with mu = x
    size = max(x_max + big_k * q, s_max) + 1
    rows = -(-size // q)
    cnt = np.zeros(rows * q, dtype=np.int64)
    cnt[: s_max + 1] = arith.divisor_pairs_table(s_max, n, vlo, vhi)
    cls = np.cumsum(cnt.reshape(rows, q), axis=0).ravel()  # cls[s] = cnt[s] + cls[s - q]

    def at(idx):
        return np.where(idx >= 0, cls[np.clip(idx, 0, None)], 0)

    x = np.flatnonzero(hist)
    weight = hist[x]
    below = at(x - q) - at(x - (big_k + 1) * q)  # k = 1..K, s = x - kq
    above = at(x + big_k * q) - at(x)  # k = -1..-K, s = x + |k| q
    return int(np.dot(weight, below + above))


def t_table(q: int, n: int, brute: bool = True) -> list[dict]:
    """One record per block pair i <= j: counts by both routes when feasible."""
    rows = []
    for spec in block_specs(q):
        td = t_divisor(q, n, spec)
        tb = t_bruteforce(q, n, spec) if brute and brute_volume(q, n, spec) <= BRUTE_VOLUME_LIMIT else None
        rows.append({"i": spec.i, "j": spec.j, "T_brute": tb, "T_divisor": td, "equal": None if tb is None else tb == td})
    return rows


def block_sum_bound(q: int, n: int, table: HarmonicClassTable | None = None) -> tuple[float, float, bool]:
    """(2 phi(q) sum_{i<=j} e^{-i-j} T_{i,j}, M2, bound >= M2)."""
    if n * q * q > BOUND_VOLUME_LIMIT:
        raise GuardError(f"block_sum_bound limited to N q^2 <= {BOUND_VOLUME_LIMIT}")
    table = table if table is not None else harmonic_class_table(q)
    terms = [math.exp(-spec.i - spec.j) * t_divisor(q, n, spec) for spec in block_specs(q)]
    bound = 2.0 * arith.euler_phi(q) * math.fsum(terms)
    value = m2(q, n, table)
    return bound, value, bound >= value
