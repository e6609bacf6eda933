import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxball.equilibrium import (
    DensityVector,
    Partition,
    determinant,
    epsilon,
    equilibrium_csv,
    eta,
    partition_Z,
    schur,
    stationary_pi,
)
from boxball.tableau import rectangular_tableaux


def schur_by_tableaux(lam, w):
    """Oracle: sum of monomials over semistandard tableaux of shape lam (rectangles only)."""
    a, c = len(lam), lam[0]
    total = 0
    for t in rectangular_tableaux(a, c, len(w) - 1):
        term = 1
        for v in t.letters():
            term *= w[v]
        total += term
    return total


def random_p(rng, kappa):
    v = [rng.random() + 0.05 for _ in range(kappa + 1)]
    s = sum(v)
    return [x / s for x in v]


def test_printed_schur_values():
    p = [F(1, 2), F(1, 3), F(1, 6)]
    assert schur((1,), p) == 1
    brute = sum(p[0] ** i * p[1] ** j * p[2] ** (5 - i - j) for i in range(6) for j in range(6 - i))
    assert schur((5,), p) == brute
    assert schur((1, 1), [F(3), F(7)]) == 21
    assert schur((), [2, 3]) == 1
    assert schur((1, 1, 1), [2, 3]) == 0


@pytest.mark.parametrize("lam, kappa", [((2, 2), 2), ((3,), 3), ((1, 1, 1), 3), ((2, 2, 2), 3)])
def test_schur_matches_tableau_sum(lam, kappa):
    w = [F(k + 2, k + 5) for k in range(kappa + 1)]
    assert schur(lam, w) == schur_by_tableaux(lam, w)
    assert schur(lam, w, method="bialternant") == schur_by_tableaux(lam, w)


def test_bialternant_rejects_repeats():
    with pytest.raises(ValueError):
        schur((2, 1), [F(1, 3)] * 3, method="bialternant")
    assert schur((2, 1), [F(1, 3)] * 3) == 8 * F(1, 27)


def test_float_evaluators_agree():
    rng = random.Random(3)
    for _ in range(100):
        kappa = rng.randint(1, 5)
        lam = sorted((rng.randint(0, 8) for _ in range(kappa + 1)), reverse=True)
        w = random_p(rng, kappa)
        x, y = schur(lam, w), schur(lam, w, method="bialternant")
        assert abs(x - y) <= 1e-12 * abs(x)


def test_determinant():
    assert determinant([[F(2), F(1)], [F(1), F(3)]]) == 5
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([]) == 1


def test_partition_Z_single_color():
    p = [F(2, 3), F(1, 3)]
    q = p[1] / p[0]
    for c in range(1, 7):
        assert partition_Z(c, 1, p) == p[0] ** c * (1 - q ** (c + 1)) / (1 - q)
        assert partition_Z(c, 1, [F(1, 2)] * 2) == F(c + 1, 2**c)


def test_stationary_pi():
    p = [F(1, 2), F(1, 3), F(1, 6)]
    pi = stationary_pi(5, 1, p)
    assert sum(pi.values()) == 1
    Z = partition_Z(5, 1, p)
    for t, v in pi.items():
        m = t.counts(2)
        assert v == p[0] ** m[0] * p[1] ** m[1] * p[2] ** m[2] / Z
    assert sorted(stationary_pi(1, 1, p).values()) == sorted(p)
    with pytest.raises(OverflowError):
        stationary_pi(6, 2, DensityVector.uniform(4), cap=10)


def test_epsilon_examples():
    p1 = F(1, 3)
    p = [1 - p1, p1]
    q = p1 / (1 - p1)
    for c in range(1, 6):
        assert epsilon(c, 1, p) == p1 * (1 - q**c) / (1 - q ** (c + 1))
        assert epsilon(c, 1, [F(1, 2)] * 2) == F(c, 2 * (c + 1))
    p = [F(1, 2), F(1, 3), F(1, 6)]
    assert epsilon(1, 1, p) == p[0] * p[1] + p[1] * p[2] + p[2] * p[0]
    u = DensityVector.uniform(2)
    assert epsilon(1, 1, u) == F(1, 3)
    assert epsilon(2, 1, u) == F(4, 9)
    assert epsilon(0, 1, u) == 0


@pytest.mark.parametrize("c, a, kappa", [(1, 1, 1), (3, 1, 2), (2, 2, 2), (2, 2, 3), (1, 3, 3)])
def test_epsilon_sum_equals_ratio(c, a, kappa):
    p = [F(k + 1, 1) for k in range(kappa + 1)]
    s = sum(p)
    p = [v / s for v in p]
    assert epsilon(c, a, p, method="sum") == epsilon(c, a, p)
    assert 0 < epsilon(c, a, p) < 1


def test_eta_examples():
    half = [F(1, 2)] * 2
    for i in range(1, 8):
        assert eta(i, 1, half) == F(1, 2 * i * (i + 1))
    assert eta(2, 1, DensityVector.uniform(2)) == F(1, 9)
    p = [F(3, 4), F(1, 4)]
    for i in range(1, 6):
        assert eta(i, 1, p) == eta(i, 1, p[::-1])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 6), st.data())
def test_pluecker_exact(kappa, i, data):
    a = data.draw(st.integers(1, kappa))
    raw = data.draw(st.lists(st.integers(1, 9), min_size=kappa + 1, max_size=kappa + 1))
    p = [F(v, sum(raw)) for v in raw]
    e = eta(i, a, p)
    assert e == epsilon(i, a, p) - epsilon(i - 1, a, p)
    assert 0 < e <= 1


def test_density_vector():
    assert DensityVector.uniform(3).strictly_decreasing is False
    assert DensityVector.uniform(3).weakly_decreasing
    d = DensityVector.principal(F(1, 2), 2)
    assert d.values == (F(4, 7), F(2, 7), F(1, 7)) and d.strictly_decreasing
    with pytest.raises(ValueError):
        DensityVector.of([F(1, 2), F(1, 3)])
    with pytest.raises(ValueError):
        DensityVector.of([1.2, -0.2])
    assert Partition.of([2, 1, 0]).trimmed() == (2, 1)
    with pytest.raises(ValueError):
        Partition.of([1, 2])


def test_csv():
    lines = equilibrium_csv(DensityVector.uniform(2), 2).splitlines()
    assert lines[0] == "kappa,a,i,p0,p1,p2,epsilon,eta"
    assert lines[1].endswith("0.333333333333,0.333333333333")
    assert len(lines) == 5
