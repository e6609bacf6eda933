"""Monte Carlo experiments on i.i.d. random configurations.

Carriers run off closed transition tables as numpy arrays so many trials can be
stepped together.  Randomness comes from :mod:`boxball.rng`; each block of
trials owns one stream keyed by (seed, experiment id, block).
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bbs import Configuration
from .carrier import carrier_table
from .equilibrium import epsilon, eta
from .highest import sample_highest
from .ldp import asymptotic_variance, build_joint_kernel, build_single_kernel, g_energy, g_row
from .rng import resolve_seed, sample_letters, stream

__all__ = [
    "ExperimentReport",
    "sample_config",
    "TableCarrier",
    "table_carrier",
    "row_lengths",
    "estimate_rows",
    "estimate_energy",
    "shape_curve",
    "empirical_shape",
    "shape_distance",
    "shape_svg",
    "carrier_occupation",
    "row_functional",
    "VarianceEstimate",
    "limiting_variance",
    "exact_limiting_variance",
    "persistence_experiment",
]

TABLE_CAP = 200_000


@dataclass
class ExperimentReport:
    name: str
    seed: int
    samples: int
    estimates: dict = field(default_factory=dict)  # label -> (value, standard error)
    targets: dict = field(default_factory=dict)  # label -> (value, where it comes from)
    tolerance: float | None = None
    passed: bool | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    def judge(self, tol: float | None = None, n_se: float = 3.0) -> bool:
        """Pass iff every estimate sits within ``tol`` (or ``n_se`` standard errors) of its target."""
        self.tolerance = tol
        ok = True
        for key, (target, _) in self.targets.items():
            value, se = self.estimates[key]
            bound = tol if tol is not None else n_se * se
            ok &= abs(value - float(target)) <= bound
        self.passed = bool(ok)
        return self.passed

    def summary(self) -> str:
        lines = [f"{self.name}: seed={self.seed} samples={self.samples} time={self.wall_time:.3g}s"]
        for key, (value, se) in self.estimates.items():
            line = f"  {key}: {value:.12g} +- {se:.3g}"
            if key in self.targets:
                t, src = self.targets[key]
                line += f"  target {float(t):.12g} ({src})"
            lines.append(line)
        if self.passed is not None:
            lines.append(f"  {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["estimate", "value", "stderr", "target", "target_source"])
        for key, (value, se) in self.estimates.items():
            t, src = self.targets.get(key, (None, ""))
            w.writerow([key, f"{value:.12g}", f"{se:.12g}", "" if t is None else f"{float(t):.12g}", src])
        return buf.getvalue()


def _p(p) -> tuple:
    p = tuple(p.values) if hasattr(p, "values") else tuple(p)
    if len(p) < 2 or any(v <= 0 for v in p) or abs(sum(float(v) for v in p) - 1) > 1e-12:
        raise ValueError(f"invalid densities {p}")
    return p


def sample_config(n: int, p, seed: int | None = None, trial: int = 0) -> Configuration:
    """i.i.d. letters from ``p`` on sites 1..n."""
    p = _p(p)
    if n == 0:
        return Configuration((), len(p) - 1)
    letters = sample_letters(stream(seed, 0, trial), p, n)
    return Configuration(tuple(int(v) for v in letters), len(p) - 1)


@dataclass(frozen=True)
class TableCarrier:
    """Closed carrier table: ``nxt[s, x]`` next state, ``bl[s]`` bottom-left entry."""

    nxt: np.ndarray
    bl: np.ndarray
    emit: np.ndarray


_TABLES: dict = {}


def table_carrier(a: int, c: int, kappa: int) -> TableCarrier:
    key = (a, c, kappa)
    if key not in _TABLES:
        t = carrier_table(a, c, kappa)
        t.close(cap=TABLE_CAP)
        k1 = kappa + 1
        nxt = np.array([[t.step(s, x)[1] for x in range(k1)] for s in range(len(t.states))], dtype=np.int32)
        emit = np.array([[t.step(s, x)[0] for x in range(k1)] for s in range(len(t.states))], dtype=np.int8)
        _TABLES[key] = TableCarrier(nxt, np.array(t.bottom_left, dtype=np.int8), emit)
    return _TABLES[key]


def _energies(letters: np.ndarray, a: int, c: int, kappa: int) -> np.ndarray:
    """E_c^(a) of each row of a (trials, n) letter array."""
    if letters.shape[0] == 1:
        return np.array([carrier_table(a, c, kappa).energy(letters[0].tolist())])
    tc = table_carrier(a, c, kappa)
    s = np.zeros(letters.shape[0], dtype=np.int32)
    e = np.zeros(letters.shape[0], dtype=np.int64)
    for k in range(letters.shape[1]):
        x = letters[:, k]
        e += x > tc.bl[s]
        s = tc.nxt[s, x]
    return e


def row_lengths(letters: np.ndarray, a: int, imax: int, kappa: int) -> np.ndarray:
    """rho_i^(a) for i = 1..imax of each row; shape (trials, imax)."""
    letters = np.atleast_2d(letters)
    E = np.zeros((letters.shape[0], imax + 1), dtype=np.int64)
    for c in range(1, imax + 1):
        E[:, c] = _energies(letters, a, c, kappa)
    return np.diff(E, axis=1)


def _rows_or_list(i) -> list[int]:
    return [i] if isinstance(i, int) else list(i)


def estimate_rows(n: int, p, a: int, i, trials: int = 1, seed: int | None = None,
                  conditioned: bool = False, tol: float | None = None) -> ExperimentReport:
    """Row lengths rho_i^(a)/n against their limits eta_i^(a).

    ``conditioned=True`` draws highest states by rejection.  Pass/fail uses
    ``tol`` when given, otherwise three standard errors.
    """
    p = _p(p)
    kappa = len(p) - 1
    rows = _rows_or_list(i)
    seed = resolve_seed(seed)
    t0 = time.perf_counter()
    if conditioned:
        sample = sample_highest(n, p, seed=seed, count=trials)
        letters = np.array([cfg.cells for cfg in sample.configs], dtype=np.int8)
    else:
        letters = np.stack([sample_letters(stream(seed, 0, t), p, n) for t in range(trials)])
    rho = row_lengths(letters, a, max(rows), kappa) / n
    rep = ExperimentReport(
        f"rows a={a}{' conditioned' if conditioned else ''}", seed, trials,
    )
    for r in rows:
        vals = rho[:, r - 1]
        se = vals.std(ddof=1) / math.sqrt(trials) if trials > 1 else 0.0
        rep.estimates[f"rho_{r}/n"] = (float(vals.mean()), float(se))
        rep.targets[f"rho_{r}/n"] = (eta(r, a, p), "Schur ratio")
    if conditioned:
        rep.extra["acceptance_rate"] = sample.acceptance_rate
    rep.wall_time = time.perf_counter() - t0
    rep.judge(tol)
    return rep


def estimate_energy(n: int, p, a: int, c: int, trials: int, seed: int | None = None) -> ExperimentReport:
    """n^{-1} E_c^(a) against epsilon_c^(a)."""
    p = _p(p)
    kappa = len(p) - 1
    seed = resolve_seed(seed)
    t0 = time.perf_counter()
    rng = stream(seed, 3, 0)
    letters = sample_letters(rng, p, (trials, n))
    e = _energies(letters, a, c, kappa) / n
    rep = ExperimentReport(f"energy a={a} c={c}", seed, trials)
    rep.estimates["E/n"] = (float(e.mean()), float(e.std(ddof=1) / math.sqrt(trials)))
    rep.targets["E/n"] = (epsilon(c, a, p), "Schur ratio")
    rep.wall_time = time.perf_counter() - t0
    rep.judge()
    return rep


def shape_curve(p, i_max: int) -> dict[int, list[tuple[float, int]]]:
    """Limit boundary points (eta_i^(a), i) of each scaled diagram."""
    p = _p(p)
    return {a: [(float(eta(i, a, p)), i) for i in range(1, i_max + 1)] for a in range(1, len(p))}


def empirical_shape(n: int, p, seed: int | None = None, i_max: int = 20) -> dict[int, list[tuple[float, int]]]:
    """Rescaled boundary (rho_i^(a)/n, i) of one random configuration."""
    p = _p(p)
    kappa = len(p) - 1
    letters = sample_letters(stream(seed, 4, 0), p, (1, n))
    out = {}
    for a in range(1, kappa + 1):
        rho = row_lengths(letters, a, i_max, kappa)[0] / n
        out[a] = [(float(r), i) for i, r in enumerate(rho, start=1)]
    return out


def shape_distance(emp: dict, limit: dict) -> float:
    """Sup over diagrams and shared rows of the horizontal gap between two curves."""
    d = 0.0
    for a in emp:
        for (x1, _), (x2, _) in zip(emp[a], limit[a]):
            d = max(d, abs(x1 - x2))
    return d


def shape_svg(curves: dict[str, list[tuple[float, int]]], width: float = 400, height: float = 300) -> str:
    xmax = max((x for pts in curves.values() for x, _ in pts), default=1.0) or 1.0
    ymax = max((y for pts in curves.values() for _, y in pts), default=1) or 1
    colors = ["black", "red", "blue", "green", "orange", "purple"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}">']
    for k, (label, pts) in enumerate(curves.items()):
        path = " ".join(f"{x / xmax * width:.4g},{height - y / ymax * height:.4g}" for x, y in pts)
        parts.append(f'<polyline fill="none" stroke="{colors[k % len(colors)]}" points="{path}">'
                     f"<title>{label}</title></polyline>")
    parts.append("</svg>\n")
    return "\n".join(parts)


def carrier_occupation(c: int, a: int, p, steps: int, seed: int | None = None) -> dict:
    """Empirical law of the B_c^(a) carrier along one long i.i.d. sweep."""
    p = _p(p)
    kappa = len(p) - 1
    t = carrier_table(a, c, kappa)
    tc = table_carrier(a, c, kappa)
    letters = sample_letters(stream(seed, 5, 0), p, steps).tolist()
    nxt = tc.nxt.tolist()
    counts = [0] * len(nxt)
    s = 0
    for x in letters:
        s = nxt[s][x]
        counts[s] += 1
    return {t.states[i]: k / steps for i, k in enumerate(counts) if k}


def row_functional(c: int, a: int, p):
    """Kernel and functional whose additive sum along the chain is rho_c^(a).

    Row 1 is the first energy itself; row c >= 2 is the energy difference
    carried by the joint (c-1, c) chain.
    """
    if c == 1:
        P = build_single_kernel(1, a, p)
        return P, g_energy(P.space)
    P = build_joint_kernel(c - 1, a, p)
    return P, g_row(P.space)


def exact_limiting_variance(c: int, a: int, p) -> float:
    P, g = row_functional(c, a, p)
    return asymptotic_variance(P, g)


@dataclass(frozen=True)
class VarianceEstimate:
    regenerative: float
    regenerative_se: float
    batch_means: float
    blocks: int
    steps: int
    exact: float | None = None


def _increments(c: int, a: int, kappa: int):
    """(tables, step) pair for the per-site increment of rho_c^(a)."""
    if c == 1:
        return [table_carrier(a, 1, kappa)]
    return [table_carrier(a, c - 1, kappa), table_carrier(a, c, kappa)]


def limiting_variance(c: int, a: int, p, steps: int = 10**6, seed: int | None = None,
                      batches: int | None = None, min_blocks: int = 100,
                      exact: bool = True) -> VarianceEstimate:
    """gamma^2 of rho_c^(a) from one long sweep.

    Regeneration times are the sites where every carrier involved sits at its
    ground state; the block sums of centered increments are i.i.d. there.
    The batch-means cross-check uses about sqrt(steps) batches by default.
    """
    p = _p(p)
    kappa = len(p) - 1
    tabs = _increments(c, a, kappa)
    nxt = [t.nxt.tolist() for t in tabs]
    bl = [t.bl.tolist() for t in tabs]
    letters = sample_letters(stream(seed, 6, 0), p, steps).tolist()
    g = np.empty(steps, dtype=np.int8)
    regen = np.zeros(steps + 1, dtype=bool)
    if len(tabs) == 1:
        n1, b1 = nxt[0], bl[0]
        s = 0
        for k, x in enumerate(letters):
            regen[k] = s == 0
            g[k] = x > b1[s]
            s = n1[s][x]
        regen[steps] = s == 0
    else:
        (n1, n2), (b1, b2) = nxt, bl
        s1 = s2 = 0
        for k, x in enumerate(letters):
            regen[k] = s1 == 0 and s2 == 0
            g[k] = (x > b2[s2]) - (x > b1[s1])
            s1, s2 = n1[s1][x], n2[s2][x]
        regen[steps] = s1 == 0 and s2 == 0
    cuts = np.flatnonzero(regen)
    if len(cuts) - 1 < min_blocks:
        raise RuntimeError(f"only {len(cuts) - 1} regeneration blocks in {steps} steps; increase steps")
    csum = np.concatenate([[0], np.cumsum(g, dtype=np.int64)])
    Y = np.diff(csum[cuts]).astype(float)
    tau = np.diff(cuts).astype(float)
    mu = Y.sum() / tau.sum()
    Z = Y - mu * tau
    gamma2 = float((Z**2).sum() / tau.sum())
    # delta-method standard error of the ratio estimator
    nb = len(Z)
    W = Z**2 - gamma2 * tau
    se = float(math.sqrt(W.var(ddof=1) * nb) / tau.sum())
    used = cuts[-1] - cuts[0]
    if batches is None:
        batches = max(20, math.isqrt(used))
    blen = used // batches
    bm = np.diff(csum[cuts[0]: cuts[0] + blen * batches + 1: blen]) / blen
    batch = float(bm.var(ddof=1) * blen)
    ex = exact_limiting_variance(c, a, p) if exact else None
    return VarianceEstimate(gamma2, se, batch, nb, steps, ex)


def persistence_experiment(c: int, a: int, p, n_grid: Sequence[int], trials: int,
                           seed: int | None = None, block: int = 1 << 17,
                           gamma2: float | None = None) -> ExperimentReport:
    """P(rho_bar(1) >= 0, ..., rho_bar(n) >= 0) for each n in ``n_grid``.

    rho_bar(k) = rho_c^(a)(X^{k,p}) - eta_c^(a) k with the exact eta, compared in
    integers against its rational value.  Only surviving trials are stepped.
    """
    p = _p(p)
    kappa = len(p) - 1
    seed = resolve_seed(seed)
    t0 = time.perf_counter()
    target = Fraction(eta(c, a, [Fraction(v) for v in p])).limit_denominator(10**12)
    num, den = target.numerator, target.denominator
    n_grid = sorted(n_grid)
    nmax = n_grid[-1]
    tabs = _increments(c, a, kappa)
    survivors = np.zeros(len(n_grid), dtype=np.int64)
    for b, start in enumerate(range(0, trials, block)):
        size = min(block, trials - start)
        rng = stream(seed, 7, b)
        states = [np.zeros(size, dtype=np.int32) for _ in tabs]
        S = np.zeros(size, dtype=np.int64)
        gi = 0
        for k in range(1, nmax + 1):
            x = sample_letters(rng, p, len(S))
            if len(tabs) == 1:
                inc = x > tabs[0].bl[states[0]]
            else:
                inc = (x > tabs[1].bl[states[1]]).astype(np.int64) - (x > tabs[0].bl[states[0]])
            S = S + inc
            for j, t in enumerate(tabs):
                states[j] = t.nxt[states[j], x]
            alive = S * den >= num * k
            if not alive.all():
                S = S[alive]
                states = [s[alive] for s in states]
            while gi < len(n_grid) and n_grid[gi] == k:
                survivors[gi] += len(S)
                gi += 1
            if len(S) == 0:
                break
    rep = ExperimentReport(f"persistence a={a} c={c}", seed, trials)
    probs = survivors / trials
    for n, P in zip(n_grid, probs):
        rep.estimates[f"P(n={n})"] = (float(P), float(math.sqrt(P * (1 - P) / trials)))
    ok = probs > 0
    if ok.sum() >= 2:
        slope = float(np.polyfit(np.log(np.array(n_grid)[ok]), np.log(probs[ok]), 1)[0])
    else:
        slope = math.nan
    rep.extra["slope"] = slope
    if gamma2 is None:
        gamma2 = exact_limiting_variance(c, a, p)
    eps = float(epsilon(c, a, p))
    pref = math.sqrt(gamma2) / ((1 - eps) * math.sqrt(2 * math.pi))
    rep.extra.update(gamma2=gamma2, epsilon=eps, prefactor=pref)
    n_last = n_grid[-1]
    rep.extra["prefactor_ratio"] = float(probs[-1] * math.sqrt(n_last) / pref) if probs[-1] > 0 else 0.0
    rep.targets[f"P(n={n_last})"] = (pref / math.sqrt(n_last), "asymptotic law")
    rep.wall_time = time.perf_counter() - t0
    return rep
