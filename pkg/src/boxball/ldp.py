"""Carrier Markov chains, tilted kernels, Perron roots and rate functions.

The single chain lives on pairs (C, x): carrier C in B_c^(a) about to meet the
fresh letter x.  The joint chain runs the B_c^(a) and B_{c+1}^(a) carriers over
the same letters, restricted to the pairs reachable from the two ground states.
Both orders states x-major: all carriers for x=0, then x=1, and so on.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .carrier import carrier_table
from .tableau import Tableau, rectangular_tableaux

__all__ = [
    "StateSpace",
    "MarkovKernel",
    "build_single_kernel",
    "build_joint_kernel",
    "g_energy",
    "g_row",
    "tilt",
    "perron_root",
    "PerronResult",
    "stationary_vector",
    "Lambda",
    "Lambda_prime_at_zero",
    "LegendreResult",
    "legendre",
    "RateFunction",
    "rate_function",
    "asymptotic_variance",
    "rate_csv",
    "kernel_triplets",
]

DEFAULT_CAP = 200_000


@dataclass
class StateSpace:
    kind: str  # "single" or "joint"
    kappa: int
    a: int
    c: int
    carriers: list  # Tableau (single) or (Tableau, Tableau) (joint)
    states: list = field(default_factory=list)  # (carrier, x)
    index: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.states)


@dataclass
class MarkovKernel:
    space: StateSpace
    rows: np.ndarray
    cols: np.ndarray
    values: list  # exact entries (Fraction or float), aligned with rows/cols

    @property
    def n(self) -> int:
        return len(self.space)

    def sparse(self) -> sparse.csr_matrix:
        vals = np.array([float(v) for v in self.values])
        return sparse.csr_matrix((vals, (self.rows, self.cols)), shape=(self.n, self.n))

    def dense(self) -> np.ndarray:
        return self.sparse().toarray()

    def row_sums(self) -> list:
        out = [0] * self.n
        for r, v in zip(self.rows, self.values):
            out[r] = out[r] + v
        return out

    @property
    def stochastic(self) -> bool:
        exact = all(isinstance(v, (int, Fraction)) for v in self.values)
        return all((s == 1) if exact else abs(s - 1) < 1e-12 for s in self.row_sums())

    def irreducible(self) -> bool:
        ncomp, _ = connected_components(self.sparse(), directed=True, connection="strong")
        return ncomp == 1

    def left_multiply(self, pi: Sequence) -> list:
        """pi P with the kernel's own scalar type."""
        out = [0] * self.n
        for r, c, v in zip(self.rows, self.cols, self.values):
            out[c] = out[c] + pi[r] * v
        return out


def _p(p) -> tuple:
    return tuple(p.values) if hasattr(p, "values") else tuple(p)


def build_single_kernel(c: int, a: int, p, cap: int = DEFAULT_CAP) -> MarkovKernel:
    """Chain (C, x) -> (C', x') with C' the carrier after R(C, x), x' ~ p."""
    p = _p(p)
    kappa = len(p) - 1
    B = rectangular_tableaux(a, c, kappa, cap=cap)
    if len(B) * (kappa + 1) > cap:
        raise OverflowError(f"single chain has {len(B) * (kappa + 1)} states > cap {cap}")
    table = carrier_table(a, c, kappa)
    space = StateSpace("single", kappa, a, c, B)
    nb = len(B)
    bidx = {t: i for i, t in enumerate(B)}
    for x in range(kappa + 1):
        for t in B:
            space.index[(t, x)] = len(space.states)
            space.states.append((t, x))
    rows, cols, vals = [], [], []
    for x in range(kappa + 1):
        for i, t in enumerate(B):
            s = table.intern(t)
            _, s2 = table.step(s, x)
            j = bidx[table.states[s2]]
            src = x * nb + i
            for x2 in range(kappa + 1):
                rows.append(src)
                cols.append(x2 * nb + j)
                vals.append(p[x2])
    return MarkovKernel(space, np.array(rows), np.array(cols), vals)


def build_joint_kernel(c: int, a: int, p, cap: int = DEFAULT_CAP) -> MarkovKernel:
    """Joint chain of the B_c^(a) and B_{c+1}^(a) carriers fed the same letters."""
    p = _p(p)
    kappa = len(p) - 1
    t1, t2 = carrier_table(a, c, kappa), carrier_table(a, c + 1, kappa)
    pairs = [(0, 0)]
    seen = {(0, 0): 0}
    k = 0
    while k < len(pairs):
        s1, s2 = pairs[k]
        for x in range(kappa + 1):
            nxt = (t1.step(s1, x)[1], t2.step(s2, x)[1])
            if nxt not in seen:
                seen[nxt] = len(pairs)
                pairs.append(nxt)
                if len(pairs) * (kappa + 1) > cap:
                    raise OverflowError(f"joint chain exceeds {cap} states")
        k += 1
    carriers = [(t1.states[s1], t2.states[s2]) for s1, s2 in pairs]
    space = StateSpace("joint", kappa, a, c, carriers)
    npairs = len(pairs)
    for x in range(kappa + 1):
        for pair in carriers:
            space.index[(pair, x)] = len(space.states)
            space.states.append((pair, x))
    rows, cols, vals = [], [], []
    for x in range(kappa + 1):
        for i, (s1, s2) in enumerate(pairs):
            j = seen[(t1.step(s1, x)[1], t2.step(s2, x)[1])]
            for x2 in range(kappa + 1):
                rows.append(x * npairs + i)
                cols.append(x2 * npairs + j)
                vals.append(p[x2])
    return MarkovKernel(space, np.array(rows), np.array(cols), vals)


def g_energy(space: StateSpace) -> np.ndarray:
    """H(C, x) on single states, H(C_1, x) on joint states."""
    if space.kind == "single":
        return np.array([float(x > C.bottom_left) for C, x in space.states])
    return np.array([float(x > C1.bottom_left) for (C1, _), x in space.states])


def g_row(space: StateSpace) -> np.ndarray:
    """H(C_2, x) - H(C_1, x); its sum over a sweep is the (c+1)-th row length."""
    if space.kind != "joint":
        raise ValueError("row functional needs the joint chain")
    return np.array(
        [float(x > C2.bottom_left) - float(x > C1.bottom_left) for (C1, C2), x in space.states]
    )


def tilt(P, g: np.ndarray, t: float, weight: str = "target"):
    """P(x, y) e^{t g(y)} (``weight="target"``) or P(x, y) e^{t g(x)} (``"source"``).

    Both weightings are similar matrices and share their Perron root.
    """
    M = P.sparse() if isinstance(P, MarkovKernel) else P
    d = np.exp(t * np.asarray(g, dtype=float))
    if weight == "target":
        return M @ sparse.diags(d) if sparse.issparse(M) else M * d[None, :]
    if weight == "source":
        return sparse.diags(d) @ M if sparse.issparse(M) else M * d[:, None]
    raise ValueError(f"unknown weight {weight!r}")


@dataclass(frozen=True)
class PerronResult:
    value: float
    lower: float
    upper: float
    vector: np.ndarray
    iterations: int


class PerronError(RuntimeError):
    pass


DENSE_LIMIT = 600


def perron_root(M, tol: float = 1e-14, maxiter: int = 100_000, vector: bool = False):
    """Spectral radius of a nonnegative primitive matrix by power iteration.

    Stops when the Collatz-Wielandt bounds min/max of (Mv)_i / v_i agree to
    ``tol`` relative.  Dense matrices up to DENSE_LIMIT rows are squared
    repeatedly so the iterate reaches high powers of M in few steps.  Without
    convergence the bounds are accepted once they stop tightening below 1e-10.
    """
    if sparse.issparse(M):
        n = M.shape[0]
        if n <= DENSE_LIMIT:
            M = M.toarray()
    else:
        M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 1:
        val = float(M[0, 0])
        res = PerronResult(val, val, val, np.ones(1), 0)
        return res if vector else val
    v = np.ones(n)
    dense = not sparse.issparse(M)
    A = M / max(np.abs(M).max(), 1e-300) if dense else None
    lo, hi = 0.0, math.inf
    best, stale = math.inf, 0
    for it in range(1, maxiter + 1):
        if dense and it <= 60:
            A = A @ A
            A /= A.max()
            w = A @ v
            v = w / w.max()
        else:
            w = M @ v
            v = w / w.max()
        Mv = M @ v
        if not (v > 0).all():
            continue
        ratios = Mv / v
        lo, hi = float(ratios.min()), float(ratios.max())
        gap = (hi - lo) / hi
        if gap <= tol:
            break
        # rounding floor: accept once the bounds stop tightening
        if gap < best * 0.999:
            best, stale = gap, 0
        else:
            stale += 1
            if stale >= 50 and gap < 1e-10:
                break
    else:
        raise PerronError(f"power iteration stalled: bounds [{lo}, {hi}] after {maxiter} steps")
    # one extra step polishes the vector; the weighted mean sits inside the bounds
    w = M @ v
    val = float(w.sum() / v.sum())
    val = min(max(val, lo), hi)
    if vector:
        return PerronResult(val, lo, hi, v / v.sum(), it)
    return val


def stationary_vector(P) -> np.ndarray:
    M = P.sparse() if isinstance(P, MarkovKernel) else P
    res = perron_root(M.T, vector=True)
    return res.vector / res.vector.sum()


def Lambda(P, g, t: float, weight: str = "target") -> float:
    return math.log(perron_root(tilt(P, g, t, weight)))


def Lambda_prime_at_zero(P, g, method: str = "fd", h: float = 1e-5) -> float:
    """d/dt Lambda at t=0: central difference, or the stationary mean of g."""
    if method == "fd":
        return (Lambda(P, g, h) - Lambda(P, g, -h)) / (2 * h)
    if method == "eigen":
        pi = stationary_vector(P)
        return float(pi @ np.asarray(g, dtype=float))
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class LegendreResult:
    u: float
    value: float
    t_star: float
    bounded: bool  # False when the bracket hit the cap; value is then a lower bound


_GOLD = (math.sqrt(5) - 1) / 2


def legendre(Lam: Callable[[float], float], u: float, t_cap: float = 100.0,
             tol: float = 1e-9, detail: bool = False):
    """sup_t [u t - Lam(t)] by golden section on an expanding bracket.

    The bracket stops at |t| = t_cap: past about 100 the tilted Perron vector
    spans more than the double range.  A sup still climbing there is returned
    as a lower bound with ``bounded=False``.
    """
    f = lambda t: u * t - Lam(t)  # noqa: E731
    lo, hi = -1.0, 1.0
    bounded = True
    # expand each side until f drops off
    while f(hi) > f(hi / 2) and hi < t_cap:
        hi = min(2 * hi, t_cap)
    while f(lo) > f(lo / 2) and lo > -t_cap:
        lo = max(2 * lo, -t_cap)
    if (hi >= t_cap and f(hi) > f(hi - 1e-3)) or (lo <= -t_cap and f(lo) > f(lo + 1e-3)):
        bounded = False
    a, b = lo, hi
    x1, x2 = b - _GOLD * (b - a), a + _GOLD * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLD * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLD * (b - a)
            f1 = f(x1)
    t_star = (a + b) / 2
    cands = [(f(t_star), t_star), (f(lo), lo), (f(hi), hi)]
    val, t_star = max(cands)
    res = LegendreResult(u, val, t_star, bounded)
    return res if detail else val


@dataclass
class RateFunction:
    t: np.ndarray
    Lambda: np.ndarray
    u: np.ndarray
    rate: np.ndarray
    bounded: np.ndarray
    anchor: float  # Lambda'(0)

    def finite_range(self) -> tuple[float, float]:
        """Observed u-range on which the transform stayed inside the bracket."""
        ok = self.u[self.bounded]
        return (float(ok.min()), float(ok.max())) if len(ok) else (math.nan, math.nan)


def rate_function(P, g, t_grid: Sequence[float], u_grid: Sequence[float]) -> RateFunction:
    cache: dict[float, float] = {}

    def Lam(t: float) -> float:
        if t not in cache:
            cache[t] = Lambda(P, g, t)
        return cache[t]

    lam = np.array([Lam(float(t)) for t in t_grid])
    res = [legendre(Lam, float(u), detail=True) for u in u_grid]
    return RateFunction(
        np.asarray(t_grid, dtype=float), lam, np.asarray(u_grid, dtype=float),
        np.array([r.value for r in res]), np.array([r.bounded for r in res]),
        Lambda_prime_at_zero(P, g),
    )


def asymptotic_variance(P, g, weight: str = "source") -> float:
    """Var_pi[g] + 2 sum_k Cov_pi[g(Z_0), g(Z_k)] via the fundamental matrix.

    ``weight="target"`` counts g at the arrival state, which only shifts the sum
    by one step and leaves the variance unchanged.
    """
    M = P.dense() if isinstance(P, MarkovKernel) else np.asarray(P, dtype=float)
    g = np.asarray(g, dtype=float)
    pi = stationary_vector(M)
    gbar = g - pi @ g
    n = len(g)
    # (I - P + 1 pi) h = gbar solves the Poisson equation with pi h = 0
    h = np.linalg.solve(np.eye(n) - M + np.outer(np.ones(n), pi), gbar)
    return float(pi @ (gbar * (2 * h - gbar)))


def rate_csv(rf: RateFunction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "Lambda"])
    for t, L in zip(rf.t, rf.Lambda):
        w.writerow([f"{t:.12g}", f"{L:.12g}"])
    w.writerow([])
    w.writerow(["u", "rate", "bounded"])
    for u, r, b in zip(rf.u, rf.rate, rf.bounded):
        w.writerow([f"{u:.12g}", f"{r:.12g}", int(b)])
    return buf.getvalue()


def kernel_triplets(P: MarkovKernel) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "value"])
    for r, c, v in zip(P.rows, P.cols, P.values):
        w.writerow([int(r), int(c), str(v)])
    return buf.getvalue()
