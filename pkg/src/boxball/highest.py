"""Highest states, Weyl-chamber lattice paths and the ballot count.

A configuration of length n is read as a lattice path in Z^{kappa+1}: letter k
adds the unit vector e_{k+1}.  It is highest iff the path stays in the chamber
m_1 >= m_2 >= ... >= m_{kappa+1}.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .bbs import Configuration
from .rng import sample_letters, stream

__all__ = [
    "ChamberPoint",
    "in_chamber",
    "is_highest",
    "ballot_count",
    "chamber_points",
    "prob_highest_exact",
    "decay_exponent",
    "HighestSample",
    "sample_highest",
    "highest_frequency",
]

ENUMERATION_GUARD = 10**7


@dataclass(frozen=True)
class ChamberPoint:
    m: tuple[int, ...]

    @property
    def inside(self) -> bool:
        return in_chamber(self.m)


def in_chamber(m: Sequence[int]) -> bool:
    return all(v >= 0 for v in m) and all(m[i] >= m[i + 1] for i in range(len(m) - 1))


def is_highest(x, kappa: int | None = None) -> bool:
    cells = x.cells if isinstance(x, Configuration) else tuple(x)
    if kappa is None:
        kappa = x.kappa if isinstance(x, Configuration) else max(cells, default=0)
    counts = [0] * (kappa + 1)
    for v in cells:
        counts[v] += 1
        if v and counts[v] > counts[v - 1]:
            return False
    return True


def ballot_count(m: Sequence[int]) -> int:
    """Number of monotone lattice paths from the origin to ``m`` inside the chamber.

    Points outside the chamber give 0 with a warning.
    """
    m = tuple(int(v) for v in m)
    if not in_chamber(m):
        warnings.warn(f"{m} lies outside the Weyl chamber; count is 0", stacklevel=2)
        return 0
    r = len(m)
    num = math.factorial(sum(m))
    for i in range(r):
        for j in range(i + 1, r):
            num *= m[i] - m[j] + j - i
    den = 1
    for k in range(1, r + 1):
        den *= math.factorial(m[k - 1] + r - k)
    q, rem = divmod(num, den)
    assert rem == 0
    return q


def chamber_points(n: int, r: int) -> Iterator[tuple[int, ...]]:
    """Partitions of n with at most r parts, padded to length r."""

    def rec(rest: int, cap: int, left: int):
        if left == 0:
            if rest == 0:
                yield ()
            return
        for v in range(min(rest, cap), -1, -1):
            if v * left < rest:
                break
            for tail in rec(rest - v, v, left - 1):
                yield (v,) + tail

    yield from rec(n, n, r)


def prob_highest_exact(n: int, p, guard: int = ENUMERATION_GUARD):
    """P(X^{n,p} is highest).  Exact for Fraction densities, log-space floats otherwise."""
    p = tuple(p.values) if hasattr(p, "values") else tuple(p)
    kappa = len(p) - 1
    if math.comb(n + kappa, kappa) > guard:
        raise OverflowError(
            f"C({n + kappa},{kappa}) exceeds {guard}; use Monte Carlo (highest_frequency)"
        )
    exact = all(isinstance(v, (int, Fraction)) for v in p)
    if exact:
        total = Fraction(0)
        for m in chamber_points(n, kappa + 1):
            w = Fraction(ballot_count(m))
            for k, mk in enumerate(m):
                w *= Fraction(p[k]) ** mk
            total += w
        return total
    logp = [math.log(float(v)) for v in p]
    terms = []
    for m in chamber_points(n, kappa + 1):
        terms.append(_log_ballot(m) + sum(mk * lp for mk, lp in zip(m, logp)))
    top = max(terms)
    return math.exp(top) * math.fsum(math.exp(t - top) for t in terms)


def _log_ballot(m: Sequence[int]) -> float:
    r = len(m)
    s = math.lgamma(sum(m) + 1)
    for i in range(r):
        for j in range(i + 1, r):
            s += math.log(m[i] - m[j] + j - i)
    return s - sum(math.lgamma(m[k - 1] + r - k + 1) for k in range(1, r + 1))


def decay_exponent(p, rel: float = 1e-12) -> Fraction:
    """Half the number of tied pairs p_i = p_j; P(highest) decays like n^{-that}."""
    p = tuple(p.values) if hasattr(p, "values") else tuple(p)
    if any(p[i] < p[i + 1] and not math.isclose(p[i], p[i + 1], rel_tol=rel)
           for i in range(len(p) - 1)):
        raise ValueError(f"densities must be weakly decreasing: {p}")
    ties = sum(
        1 for i in range(len(p)) for j in range(i + 1, len(p))
        if p[i] == p[j] or math.isclose(float(p[i]), float(p[j]), rel_tol=rel)
    )
    return Fraction(ties, 2)


def _highest_rows(batch: np.ndarray, kappa: int) -> np.ndarray:
    """Boolean mask of highest rows in a (trials, n) letter array."""
    ok = np.ones(batch.shape[0], dtype=bool)
    prev = np.cumsum(batch == 0, axis=1, dtype=np.int32)
    for k in range(1, kappa + 1):
        cur = np.cumsum(batch == k, axis=1, dtype=np.int32)
        ok &= (cur <= prev).all(axis=1)
        prev = cur
    return ok


@dataclass
class HighestSample:
    configs: list[Configuration]
    draws: int
    accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.draws if self.draws else math.nan


class RejectionBudgetExceeded(RuntimeError):
    pass


def sample_highest(n: int, p, seed: int | None = None, count: int = 1,
                   budget: int = 10**7, batch: int | None = None) -> HighestSample:
    """Draw ``count`` configurations of X^{n,p} conditioned to be highest, by rejection."""
    p = tuple(p.values) if hasattr(p, "values") else tuple(p)
    kappa = len(p) - 1
    decay_exponent(p)  # rejects non-monotone densities
    if batch is None:
        batch = max(1, min(4096, 2_000_000 // max(n, 1)))
    out: list[Configuration] = []
    draws = accepted = 0
    block = 0
    while len(out) < count:
        if draws >= budget:
            rate = accepted / draws
            raise RejectionBudgetExceeded(
                f"{draws} draws gave {accepted} highest states (rate {rate:.3g})"
            )
        rng = stream(seed, 1, block)
        block += 1
        size = min(batch, budget - draws)
        letters = sample_letters(rng, p, (size, n))
        ok = _highest_rows(letters, kappa)
        draws += size
        accepted += int(ok.sum())
        for row in letters[ok]:
            if len(out) < count:
                out.append(Configuration(tuple(int(v) for v in row), kappa))
    return HighestSample(out, draws, accepted)


def highest_frequency(n: int, p, trials: int, seed: int | None = None) -> tuple[float, float]:
    """Monte Carlo P(highest) and its standard error."""
    p = tuple(p.values) if hasattr(p, "values") else tuple(p)
    kappa = len(p) - 1
    batch = max(1, min(trials, 2_000_000 // max(n, 1)))
    hits = done = 0
    block = 0
    while done < trials:
        size = min(batch, trials - done)
        letters = sample_letters(stream(seed, 2, block), p, (size, n))
        hits += int(_highest_rows(letters, kappa).sum())
        done += size
        block += 1
    f = hits / trials
    return f, math.sqrt(max(f * (1 - f), 1e-300) / trials)
