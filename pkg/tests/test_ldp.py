import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from boxball.equilibrium import epsilon, eta, stationary_pi
from boxball.ldp import (
    Lambda,
    Lambda_prime_at_zero,
    PerronError,
    asymptotic_variance,
    build_joint_kernel,
    build_single_kernel,
    g_energy,
    g_row,
    kernel_triplets,
    legendre,
    perron_root,
    rate_csv,
    rate_function,
    stationary_vector,
    tilt,
)
from boxball.tableau import ground_tableau, rectangular_tableaux

UNIFORM2 = [F(1, 3)] * 3


def random_p(rng, kappa):
    v = [rng.random() + 0.1 for _ in range(kappa + 1)]
    s = sum(v)
    return [x / s for x in v]


def cubic(x, t, p):
    p0, p1, p2 = p
    s = p0 * p1 + p1 * p2 + p2 * p0
    return x**3 - x**2 - x * (math.exp(t) - 1) * s - p0 * p1 * p2 * (math.exp(t) - 1) ** 2


def sextic(x, t):
    e = math.exp(t)
    return (x**6 - x**5 - (2 * e - 1) / 3 * x**4 - (4 * e**2 - 12 * e + 1) / 27 * x**3
            + e * (5 * e - 2) / 27 * x**2 + 2 * e**2 * (e - 2) / 81 * x - e**3 * (e + 8) / 3**6)


@pytest.mark.parametrize("c, a, kappa", [(1, 1, 1), (3, 1, 1), (2, 1, 2), (2, 2, 2), (2, 2, 3)])
def test_single_kernel_stationary_product_measure(c, a, kappa):
    p = [F(k + 2, 1) for k in range(kappa + 1)]
    s = sum(p)
    p = [v / s for v in p]
    P = build_single_kernel(c, a, p)
    assert P.stochastic and P.irreducible()
    pi_c = stationary_pi(c, a, p)
    pi = [pi_c[C] * p[x] for C, x in P.space.states]
    assert P.left_multiply(pi) == pi


def test_example_53_matrix_source_tilt():
    p = (0.5, 0.3, 0.2)
    P = build_single_kernel(1, 1, p)
    assert [(C.rows[0][0], x) for C, x in P.space.states] == [
        (0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2)
    ]
    t = 0.7
    M = tilt(P, g_energy(P.space), t, weight="source").toarray()
    e = math.exp(t)
    p0, p1, p2 = p
    rows = [
        [p0, 0, 0, p1, 0, 0, p2, 0, 0],
        [p0, 0, 0, p1, 0, 0, p2, 0, 0],
        [p0, 0, 0, p1, 0, 0, p2, 0, 0],
        [0, p0 * e, 0, 0, p1 * e, 0, 0, p2 * e, 0],
        [0, p0, 0, 0, p1, 0, 0, p2, 0],
        [0, p0, 0, 0, p1, 0, 0, p2, 0],
        [0, 0, p0 * e, 0, 0, p1 * e, 0, 0, p2 * e],
        [0, 0, p0 * e, 0, 0, p1 * e, 0, 0, p2 * e],
        [0, 0, p0, 0, 0, p1, 0, 0, p2],
    ]
    np.testing.assert_allclose(M, np.array(rows), rtol=1e-15)
    target = tilt(P, g_energy(P.space), t).toarray()
    assert perron_root(target) == pytest.approx(perron_root(M), rel=1e-13)
    assert tilt(P, g_energy(P.space), 0).toarray() == pytest.approx(P.dense())


def test_example_53_cubic_and_anchor():
    rng = random.Random(11)
    for _ in range(3):
        p = random_p(rng, 2)
        P = build_single_kernel(1, 1, p)
        g = g_energy(P.space)
        for t in (-3.0, -0.5, 0.0, 0.4, 2.0, 5.0):
            x = perron_root(tilt(P, g, t))
            assert abs(cubic(x, t, p)) / max(1.0, x**3) < 1e-10
        want = p[0] * p[1] + p[1] * p[2] + p[2] * p[0]
        assert Lambda_prime_at_zero(P, g) == pytest.approx(want, abs=1e-8)
        assert Lambda_prime_at_zero(P, g, method="eigen") == pytest.approx(want, abs=1e-12)


def test_example_53_asymptotes():
    p = (0.5, 0.3, 0.2)
    P = build_single_kernel(1, 1, p)
    g = g_energy(P.space)
    assert Lambda(P, g, -30) == pytest.approx(math.log(max(p)), abs=1e-10)
    # Lambda - 2t/3 -> log(p0 p1 p2)/3 with an e^{-t/3} correction
    C = math.log(p[0] * p[1] * p[2]) / 3
    assert abs(Lambda(P, g, 30) - 20 - C) < 1e-2
    assert abs(Lambda(P, g, 60) - 40 - C) < 1e-6


def test_example_54():
    P = build_single_kernel(2, 1, UNIFORM2)
    assert P.n == 18
    g = g_energy(P.space)
    for t in (-4.0, -1.0, 0.0, 0.5, 1.0, 3.0, 6.0):
        x = perron_root(tilt(P, g, t))
        assert abs(sextic(x, t)) / max(1.0, x**6) < 1e-9
    assert Lambda_prime_at_zero(P, g) == pytest.approx(4 / 9, abs=1e-8)
    assert Lambda(P, g, -30) == pytest.approx(-math.log(3), abs=1e-8)
    C = -math.log(3 * (math.sqrt(5) - 1) / 2)
    assert abs(Lambda(P, g, 60) - 40 - C) < 1e-6


def test_joint_chain_reachability():
    for c, a, kappa in [(1, 1, 2), (2, 1, 2), (1, 2, 2), (2, 2, 3)]:
        p = [F(1, kappa + 1)] * (kappa + 1)
        P = build_joint_kernel(c, a, p)
        assert P.stochastic and P.irreducible()
        pairs = P.space.carriers
        assert pairs[0] == (ground_tableau(a, c), ground_tableau(a, c + 1))
        assert {C1 for C1, _ in pairs} == set(rectangular_tableaux(a, c, kappa))
        # first marginal of the joint stationary law is the single one
        pi = stationary_vector(P)
        pi_c = stationary_pi(c, a, p)
        marg = {}
        for w, ((C1, _), x) in zip(pi, P.space.states):
            marg[C1] = marg.get(C1, 0.0) + w
        for C, v in pi_c.items():
            assert marg[C] == pytest.approx(float(v), abs=1e-12)


def test_joint_chain_returns_to_ground():
    P = build_joint_kernel(2, 1, (0.5, 0.3, 0.2))
    M = P.dense()
    cum = np.cumsum(M, axis=1)
    rng = np.random.default_rng(5)
    u = rng.random(100_000)
    s, hits = 0, 0
    ground = {P.space.index[(P.space.carriers[0], x)] for x in range(3)}
    for k in range(len(u)):
        s = min(int(np.searchsorted(cum[s], u[k], side="right")), P.n - 1)
        hits += s in ground
    assert hits > 0


@pytest.mark.parametrize("c, a, p", [
    (1, 1, (F(2, 3), F(1, 3))),
    (1, 1, UNIFORM2),
    (2, 1, (F(1, 2), F(1, 3), F(1, 6))),
    (1, 2, UNIFORM2),
    (1, 2, (F(2, 5), F(3, 10), F(1, 5), F(1, 10))),
])
def test_row_functional_anchor(c, a, p):
    P = build_joint_kernel(c, a, p)
    g = g_row(P.space)
    assert set(np.unique(g)) <= {-1.0, 0.0, 1.0}
    want = float(eta(c + 1, a, p))
    assert Lambda_prime_at_zero(P, g) == pytest.approx(want, abs=1e-8)
    assert Lambda_prime_at_zero(P, g_energy(P.space), method="eigen") == pytest.approx(
        float(epsilon(c, a, p)), abs=1e-12)


def test_asymptotic_variance_matches_curvature():
    for c, p in [(1, (0.6, 0.4)), (2, (0.5, 0.3, 0.2))]:
        P = build_single_kernel(c, 1, p)
        g = g_energy(P.space)
        h = 1e-3
        curv = (Lambda(P, g, h) - 2 * Lambda(P, g, 0) + Lambda(P, g, -h)) / h**2
        assert asymptotic_variance(P, g) == pytest.approx(curv, rel=1e-4)
    # hand value for kappa = 1, c = 1, p1 = 0.4
    P = build_single_kernel(1, 1, (0.6, 0.4))
    assert asymptotic_variance(P, g_energy(P.space)) == pytest.approx(0.0672, abs=1e-12)


def test_convexity_and_rate_shape():
    P = build_single_kernel(1, 1, UNIFORM2)
    g = g_energy(P.space)
    ts = np.linspace(-20, 20, 81)
    lam = np.array([Lambda(P, g, t) for t in ts])
    assert (np.diff(lam, 2) >= -1e-9).all()
    anchor = 1 / 3
    us = [0.05, 0.15, 0.25, 0.3, anchor, 0.4, 0.5, 0.6]
    rf = rate_function(P, g, ts, us)
    assert rf.anchor == pytest.approx(anchor, abs=1e-8)
    assert (rf.rate >= -1e-12).all()
    assert rf.rate[us.index(anchor)] <= 1e-8
    left = rf.rate[:5]
    right = rf.rate[4:]
    assert (np.diff(left) <= 1e-12).all() and (np.diff(right) >= -1e-12).all()
    assert rf.bounded.all()
    assert rf.finite_range() == (0.05, 0.6)
    csv = rate_csv(rf)
    assert csv.startswith("t,Lambda") and "u,rate,bounded" in csv


def test_legendre_of_quadratic_and_cap():
    r = legendre(lambda t: t * t / 2, 1.5, detail=True)
    assert r.value == pytest.approx(1.125, abs=1e-9) and r.bounded
    assert r.t_star == pytest.approx(1.5, abs=1e-6)
    # linear Lambda: transform is unbounded for u above the slope
    r = legendre(lambda t: 0.5 * t, 0.7, detail=True)
    assert not r.bounded and r.value == pytest.approx(20.0)


def test_perron_root_basics():
    assert perron_root(np.eye(4)) == pytest.approx(1.0)
    assert perron_root(np.array([[2.0]])) == 2.0
    M = np.array([[0.0, 2.0], [8.0, 0.0]]) + 1e-3
    w = np.linalg.eigvals(M)
    assert perron_root(M) == pytest.approx(max(w.real), rel=1e-12)
    # a periodic matrix has no dominant eigenvalue, so the bounds never meet
    with pytest.raises(PerronError):
        perron_root(np.array([[0.0, 2.0], [3.0, 0.0]]), maxiter=5)


def test_triplets():
    P = build_single_kernel(1, 1, (F(1, 2), F(1, 2)))
    lines = kernel_triplets(P).splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) == 1 + 8
    assert "1/2" in lines[1]
