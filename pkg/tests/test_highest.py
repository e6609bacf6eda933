import math
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest

from boxball.bbs import Configuration, parse_configuration
from boxball.highest import (
    RejectionBudgetExceeded,
    ballot_count,
    chamber_points,
    decay_exponent,
    highest_frequency,
    in_chamber,
    is_highest,
    prob_highest_exact,
    sample_highest,
)


def brute_ballot(m):
    """Count monotone lattice paths 0 -> m that stay in the chamber."""
    r = len(m)
    ways = {tuple([0] * r): 1}
    for _ in range(sum(m)):
        nxt = {}
        for pt, w in ways.items():
            for k in range(r):
                q = list(pt)
                q[k] += 1
                if q[k] <= m[k] and in_chamber(q):
                    nxt[tuple(q)] = nxt.get(tuple(q), 0) + w
        ways = nxt
    return ways.get(tuple(m), 0)


def brute_prob(n, p):
    total = F(0)
    for w in product(range(len(p)), repeat=n):
        if is_highest(w, len(p) - 1):
            pr = F(1)
            for v in w:
                pr *= p[v]
            total += pr
    return total


def test_is_highest_examples():
    assert is_highest(Configuration.of((0, 0, 0), 2))
    assert not is_highest(Configuration.of((1, 0), 1))
    assert not is_highest(parse_configuration("1 1 2 1 4 0 1 0 1 2 1 4 2 0 4 4 2 0 1 2", 4))
    assert is_highest(Configuration.of((0, 1, 0, 2, 1), 2))
    assert not is_highest(Configuration.of((0, 2), 2))


def test_ballot_small_values():
    assert ballot_count((1, 1)) == 1
    assert ballot_count((2, 1)) == 2
    assert ballot_count((5, 0, 0)) == 1
    with pytest.warns(UserWarning):
        assert ballot_count((1, 2)) == 0


def test_ballot_matches_brute_force():
    for r in range(1, 5):
        for total in range(0, 9):
            for m in chamber_points(total, r):
                assert ballot_count(m) == brute_ballot(m)


def test_chamber_points():
    pts = list(chamber_points(4, 2))
    assert pts == [(4, 0), (3, 1), (2, 2)]
    assert all(in_chamber(m) for m in chamber_points(7, 3))


@pytest.mark.parametrize("n, p", [
    (1, (F(3, 5), F(2, 5))),
    (6, (F(3, 5), F(2, 5))),
    (5, (F(1, 2), F(1, 3), F(1, 6))),
    (4, (F(1, 4),) * 4),
])
def test_exact_probability_matches_enumeration(n, p):
    assert prob_highest_exact(n, p) == brute_prob(n, p)
    assert prob_highest_exact(1, p) == p[0]


def test_float_path_agrees_with_exact():
    p = (F(1, 2), F(1, 3), F(1, 6))
    exact = prob_highest_exact(12, p)
    assert prob_highest_exact(12, [float(v) for v in p]) == pytest.approx(float(exact), rel=1e-12)


def test_single_color_limit():
    p0 = F(7, 10)
    limit = (2 * p0 - 1) / p0
    assert limit == F(4, 7)
    assert float(prob_highest_exact(400, (0.7, 0.3))) == pytest.approx(float(limit), abs=1e-6)


def test_uniform_slope():
    ns = np.arange(8, 21)
    ps = [float(prob_highest_exact(int(n), [F(1, 3)] * 3)) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(ps), 1)[0]
    assert -1.9 <= slope <= -1.1


def test_guard():
    with pytest.raises(OverflowError, match="Monte Carlo"):
        prob_highest_exact(10_000, [0.25] * 4)


def test_decay_exponent():
    assert decay_exponent((0.5, 0.3, 0.2)) == 0
    assert decay_exponent((F(1, 3),) * 3) == F(3, 2)
    assert decay_exponent((0.5, 0.5)) == F(1, 2)
    with pytest.raises(ValueError):
        decay_exponent((0.2, 0.8))


@pytest.mark.parametrize("n, p", [(10, (0.6, 0.4)), (30, (0.5, 0.3, 0.2)), (50, (0.7, 0.3))])
def test_monte_carlo_matches_exact(n, p):
    f, se = highest_frequency(n, p, trials=40_000, seed=9)
    exact = prob_highest_exact(n, p)
    assert abs(f - exact) <= 3 * se


def test_sample_highest():
    s = sample_highest(40, (0.5, 0.3, 0.2), seed=2, count=25)
    assert len(s.configs) == 25
    assert all(is_highest(c) for c in s.configs)
    assert 0 < s.acceptance_rate <= 1
    again = sample_highest(40, (0.5, 0.3, 0.2), seed=2, count=25)
    assert [c.cells for c in again.configs] == [c.cells for c in s.configs]


def test_acceptance_rate_single_color():
    s = sample_highest(2000, (0.7, 0.3), seed=4, count=1000)
    se = math.sqrt(s.acceptance_rate * (1 - s.acceptance_rate) / s.draws)
    assert abs(s.acceptance_rate - 4 / 7) <= 4 * se + 2e-3


def test_rejection_budget():
    with pytest.raises(RejectionBudgetExceeded, match="rate"):
        sample_highest(400, (1 / 3,) * 3, seed=1, count=10, budget=200)
    with pytest.raises(ValueError):
        sample_highest(10, (0.2, 0.8), seed=1)
