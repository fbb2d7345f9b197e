import math
import random

import mpmath
import numpy as np
import pytest

from lmoment.characters import build_group, conjugate, enumerate_nonprincipal
from lmoment.lvalues import (
    EULER_GAMMA,
    PrincipalCharacterError,
    b_trunc,
    class_partial_sums,
    digamma_rational,
    digamma_table,
    harmonic_class_table,
    l_one,
    l_one_oracle,
    l_values,
)

mpmath.mp.dps = 30


def test_euler_gamma_literal():
    assert EULER_GAMMA == float(mpmath.euler)


@pytest.mark.parametrize(
    "a, q, closed",
    [
        (1, 2, -EULER_GAMMA - 2 * math.log(2)),
        (1, 4, -EULER_GAMMA - 3 * math.log(2) - math.pi / 2),
        (1, 3, -EULER_GAMMA - 1.5 * math.log(3) - math.pi / (2 * math.sqrt(3))),
    ],
)
def test_digamma_closed_forms(a, q, closed):
    assert abs(digamma_rational(a, q) - closed) <= 1e-12
    assert abs(digamma_rational(a, q) - float(mpmath.digamma(mpmath.mpf(a) / q))) <= 1e-12


def test_digamma_examples_rounded():
    # quoted to ten places
    assert abs(digamma_rational(1, 2) - -1.9635100260) <= 1e-10
    assert abs(digamma_rational(1, 4) - -4.2274535333) <= 1e-10


@pytest.mark.parametrize("a, q", [(0, 5), (5, 5), (-1, 5), (1, 1)])
def test_digamma_range(a, q):
    with pytest.raises(ValueError):
        digamma_rational(a, q)


@pytest.mark.parametrize("q", [2, 3, 7, 30, 97, 360, 1009, 10007])
def test_digamma_table_against_mpmath(q):
    t = digamma_table(q)
    assert math.isnan(t.values[0])
    rng = random.Random(q)
    sample = list(range(1, min(q, 40))) + [rng.randrange(1, q) for _ in range(40)] + [q - 1]
    for a in sample:
        ref = float(mpmath.digamma(mpmath.mpf(a) / q))
        assert abs(t.values[a] - ref) <= max(1e-11, t.abs_error[a])
        assert abs(t.values[a] - digamma_rational(a, q)) <= 1e-11


@pytest.mark.parametrize("q", [2, 4, 10, 64, 1000])
def test_digamma_half_and_reflection(q):
    t = digamma_table(q)
    if q % 2 == 0:
        assert abs(t.values[q // 2] - (-EULER_GAMMA - 2 * math.log(2))) <= 1e-10
    for a in range(1, q):
        x = a / q
        lhs = t.values[q - a] - t.values[a]
        assert abs(lhs - math.pi / math.tan(math.pi * x)) <= 1e-9


def test_l_one_anchors():
    (c3,) = enumerate_nonprincipal(build_group(3))
    (c4,) = enumerate_nonprincipal(build_group(4))
    assert abs(l_one(c3).value - math.pi / (3 * math.sqrt(3))) <= 1e-12
    assert abs(l_one(c4).value - math.pi / 4) <= 1e-12
    g5 = build_group(5)
    quad = g5.character((2,))
    assert quad.is_real
    ref = 2 / math.sqrt(5) * math.log((1 + math.sqrt(5)) / 2)
    assert abs(l_one(quad).value - ref) <= 1e-12
    assert round(l_one(quad).value.real, 10) == 0.4304089410


def test_l_one_mpmath_real_characters():
    # mpmath's series is reliable for real characters; its complex path is not used
    for q in (7, 8, 12, 24):
        g = build_group(q)
        for chi in enumerate_nonprincipal(g):
            if not chi.is_real:
                continue
            coeffs = [int(round(chi(a).real)) for a in range(q)]
            with mpmath.workdps(15):
                ref = float(mpmath.dirichlet(1, coeffs))
            assert abs(l_one(chi).value - ref) <= 1e-10


def test_l_one_formula_with_mpmath_digamma():
    for q in (5, 7, 16, 45):
        for chi in enumerate_nonprincipal(build_group(q)):
            ref = -sum(mpmath.mpc(chi(a)) * mpmath.digamma(mpmath.mpf(a) / q) for a in range(1, q)) / q
            assert abs(l_one(chi).value - complex(ref)) <= 1e-12


def test_l_one_principal_raises():
    with pytest.raises(PrincipalCharacterError):
        l_one(build_group(7).principal())
    with pytest.raises(PrincipalCharacterError):
        l_one_oracle(build_group(7).principal())


def test_l_one_error_bound_small_at_large_q():
    g = build_group(10007)
    table = digamma_table(10007)
    for exps in [(1,), (5003,), (10005,)]:
        lv = l_one(g.character(exps), table)
        assert lv.method == "digamma"
        assert lv.error_bound <= 1e-10


def test_l_values_batch_matches_pointwise():
    for q in (3, 24, 101, 128):
        g = build_group(q)
        t = digamma_table(q)
        batch = l_values(g, t)
        assert np.isnan(batch[0])
        for chi in enumerate_nonprincipal(g):
            assert abs(batch[chi.index] - l_one(chi, t).value) <= 1e-12


def test_oracle_examples():
    (c4,) = enumerate_nonprincipal(build_group(4))
    (c3,) = enumerate_nonprincipal(build_group(3))
    r4 = l_one_oracle(c4, 10**7)
    r3 = l_one_oracle(c3, 10**7)
    assert abs(r4.value - math.pi / 4) <= 4e-7
    assert abs(r3.value - math.pi / (3 * math.sqrt(3))) <= 3e-7
    assert r4.method == "partial-sum" and r4.error_bound == 4e-7
    with pytest.raises(ValueError):
        l_one_oracle(build_group(11).character((1,)), 100)


def test_class_partial_sums_direct():
    for q, m in [(3, 10), (7, 100), (10, 1234), (97, 5000)]:
        h = class_partial_sums(q, m)
        ref = [math.fsum(1.0 / n for n in range(1, m + 1) if n % q == c) for c in range(q)]
        assert np.allclose(h, ref, rtol=1e-14, atol=0)


def test_conjugate_symmetry():
    for q in range(3, 201):
        g = build_group(q)
        table = digamma_table(q)
        lv = l_values(g, table)
        for chi in enumerate_nonprincipal(g):
            assert abs(lv[conjugate(chi).index] - np.conj(lv[chi.index])) <= 1e-10


def test_real_characters_give_real_values():
    for q in (5, 8, 12, 15, 24, 40, 105):
        for chi in enumerate_nonprincipal(build_group(q)):
            if chi.is_real:
                assert abs(l_one(chi).value.imag) <= 1e-10


def test_b_trunc_examples():
    h2 = harmonic_class_table(2)
    assert abs(b_trunc(build_group(2).principal(), h2) - 4 / 3) <= 1e-15
    h4 = harmonic_class_table(4)
    (c4,) = enumerate_nonprincipal(build_group(4))
    assert abs(b_trunc(c4, h4) - (h4[1] - h4[3])) <= 1e-15
    h3 = harmonic_class_table(3)
    (c3,) = enumerate_nonprincipal(build_group(3))
    assert abs(b_trunc(c3, h3) - l_one(c3).value) <= 2 / 3
    with pytest.raises(ValueError):
        b_trunc(c3, h4)


def test_b_trunc_row_orthogonality():
    for q in range(2, 51):
        g = build_group(q)
        h = harmonic_class_table(q)
        total = sum(b_trunc(chi, h) for chi in g)
        ref = g.phi * math.fsum(1.0 / u for u in range(1, q * q + 1) if u % q == 1)
        assert abs(total - ref) <= 1e-9


def test_b_trunc_within_abel_bound_of_l_one():
    for q in (5, 11, 24, 97):
        h = harmonic_class_table(q)
        for chi in enumerate_nonprincipal(build_group(q)):
            assert abs(b_trunc(chi, h) - l_one(chi).value) <= 2 / q


def test_oracle_within_its_own_bound_at_smaller_cutoff():
    for q in range(3, 102, 7):
        m = 10**8 // q
        sums = class_partial_sums(q, m)
        table = digamma_table(q)
        for chi in enumerate_nonprincipal(build_group(q)):
            exact = l_one(chi, table)
            approx = l_one_oracle(chi, m, sums)
            assert abs(exact.value - approx.value) <= approx.error_bound + exact.error_bound
