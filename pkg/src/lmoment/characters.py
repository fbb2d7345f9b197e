"""Dirichlet characters modulo q via the CRT decomposition of (Z/qZ)*.

A character is indexed by an exponent tuple ``t`` with ``0 <= t_j < order_j``
and takes the value ``exp(2 pi i sum_j t_j d_j(a) / order_j)`` at a unit ``a``
whose discrete logarithms are ``d_j(a)``.  Characters are ordered
lexicographically by exponent tuple; batch transforms return arrays in the
same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterator

import numpy as np

from . import arith
from .summation import fsum_complex


@dataclass(frozen=True)
class Component:
    modulus: int  # the prime power p^e this cyclic factor lives in
    generator: int  # generator as a residue mod ``modulus``
    order: int
    lift: int  # generator lifted to Z/qZ (1 on the other prime powers)


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    q: int
    factorization: arith.Factorization
    components: tuple[Component, ...]
    dlog: np.ndarray = field(repr=False)  # shape (q, r); -1 rows mark non-units

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(c.order for c in self.components)

    @property
    def phi(self) -> int:
        return math.prod(self.orders)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(1, *self.orders)

    @cached_property
    def units(self) -> np.ndarray:
        if not self.components:
            return np.flatnonzero(np.gcd(np.arange(self.q), self.q) == 1)
        return np.flatnonzero(self.dlog[:, 0] >= 0)

    @cached_property
    def roots(self) -> np.ndarray:
        n = self.exponent
        k = np.arange(n)
        out = np.exp(2j * np.pi * k / n)
        quarter = (4 * k) % n == 0
        out[quarter] = np.array([1, 1j, -1, -1j])[(4 * k[quarter]) // n]
        return out

    def character(self, exponents) -> "Character":
        exponents = tuple(int(t) % o for t, o in zip(exponents, self.orders))
        if len(exponents) != len(self.components):
            raise ValueError("exponent tuple length does not match the group rank")
        return Character(self, exponents)

    def principal(self) -> "Character":
        return Character(self, (0,) * len(self.components))

    def __iter__(self) -> Iterator["Character"]:
        for t in product(*(range(o) for o in self.orders)):
            yield Character(self, t)

    def transform(self, f) -> np.ndarray:
        """``sum_a chi(a) f(a)`` for every character, in lexicographic order.

        ``f`` is indexed by residues 0..q-1; values at non-units are ignored.
        The sum is a multidimensional DFT over the exponent lattice.
        """
        f = np.asarray(f)
        if not self.components:
            return np.array([complex(f[self.units].sum())])
        grid = np.zeros(self.orders, dtype=complex)
        u = self.units
        grid[tuple(self.dlog[u].T)] = f[u]
        return (np.fft.ifftn(grid) * self.phi).ravel()

    def value_matrix(self) -> np.ndarray:
        """Dense table ``V[k, a] = chi_k(a)``; only sensible for small q."""
        return np.array([chi.values() for chi in self])


@dataclass(frozen=True)
class Character:
    group: CharacterGroup = field(repr=False)
    exponents: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @property
    def index(self) -> int:
        return int(np.ravel_multi_index(self.exponents, self.group.orders)) if self.exponents else 0

    @property
    def is_real(self) -> bool:
        return all(2 * t % o == 0 for t, o in zip(self.exponents, self.group.orders))

    @property
    def parity(self) -> int:
        return int(round(self(self.q - 1).real))

    def _phase_index(self, d: np.ndarray) -> np.ndarray:
        g = self.group
        scale = np.array([g.exponent // o for o in g.orders], dtype=np.int64)
        return (d @ (np.array(self.exponents, dtype=np.int64) * scale)) % g.exponent

    def __call__(self, a: int) -> complex:
        a %= self.q
        g = self.group
        if not g.components:
            return 1.0 + 0j if math.gcd(a, self.q) == 1 else 0j
        d = g.dlog[a]
        if d[0] < 0:
            return 0j
        return complex(g.roots[int(self._phase_index(d))])

    def values(self) -> np.ndarray:
        """chi(a) for a = 0..q-1."""
        g = self.group
        out = np.zeros(self.q, dtype=complex)
        u = g.units
        if not g.components:
            out[u] = 1.0
            return out
        out[u] = g.roots[self._phase_index(g.dlog[u])]
        return out

    def conjugate(self) -> "Character":
        return Character(self.group, tuple((-t) % o for t, o in zip(self.exponents, self.group.orders)))


def _local_dlog(p: int, e: int) -> tuple[list[tuple[int, int]], np.ndarray]:
    """Components of (Z/p^e)* and a dlog table indexed by residues mod p^e."""
    mod = p**e
    comps = arith.local_unit_components(p, e)
    table = np.full((mod, len(comps)), -1, dtype=np.int64)
    if not comps:
        return comps, table
    # walk every product of generator powers; each unit is hit exactly once
    orders = [o for _, o in comps]
    powers = []
    for g, o in comps:
        pw = np.empty(o, dtype=np.int64)
        x = 1
        for k in range(o):
            pw[k] = x
            x = x * g % mod
        powers.append(pw)
    grids = np.meshgrid(*[np.arange(o) for o in orders], indexing="ij")
    elem = np.ones(grids[0].shape, dtype=np.int64)
    for pw, gr in zip(powers, grids):
        elem = elem * pw[gr] % mod
    for j, gr in enumerate(grids):
        table[elem.ravel(), j] = gr.ravel()
    return comps, table


def build_group(q: int) -> CharacterGroup:
    if q < 2:
        raise ValueError(f"build_group: q={q} must be >= 2")
    f = arith.factorize(q)
    residues = np.arange(q, dtype=np.int64)
    comps: list[Component] = []
    columns = []
    for p, e in f.pairs:
        local, table = _local_dlog(p, e)
        mod = p**e
        local_col = table[residues % mod]
        for j, (g, o) in enumerate(local):
            comps.append(Component(mod, g, o, arith.crt_lift(g, mod, q)))
            columns.append(local_col[:, j])
    if columns:
        dlog = np.stack(columns, axis=1)
        # a residue is a unit only if it is a unit modulo every prime power
        bad = np.gcd(residues, q) != 1
        dlog[bad] = -1
    else:
        dlog = np.zeros((q, 0), dtype=np.int64)
    return CharacterGroup(q, f, tuple(comps), dlog)


def evaluate(chi: Character, a: int) -> complex:
    return chi(a)


def enumerate_nonprincipal(group: CharacterGroup) -> list[Character]:
    return [chi for chi in group if not chi.is_principal]


def incomplete_sum(chi: Character, n: int) -> complex:
    """sum_{1 <= k <= n} chi(k)."""
    if n < 1:
        raise ValueError("incomplete_sum needs N >= 1")
    vals = chi.values()
    return fsum_complex(vals[np.arange(1, n + 1) % chi.q])


def incomplete_sums(group: CharacterGroup, n: int) -> np.ndarray:
    """incomplete_sum for every character of ``group`` at once."""
    counts = np.bincount(np.arange(1, n + 1) % group.q, minlength=group.q)
    return group.transform(counts.astype(float))


def conjugate(chi: Character) -> Character:
    return chi.conjugate()
