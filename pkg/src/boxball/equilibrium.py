"""Schur polynomial evaluators and the equilibrium quantities built from them.

All routines are generic over the scalar type: pass ``Fraction`` densities for
exact answers, floats for speed.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .tableau import Tableau, rectangular_tableaux

__all__ = [
    "Partition",
    "DensityVector",
    "complete_homogeneous",
    "determinant",
    "schur",
    "partition_Z",
    "stationary_pi",
    "epsilon",
    "eta",
    "equilibrium_csv",
]


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        p = self.parts
        if any(v < 0 for v in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"not a partition: {p}")

    @classmethod
    def of(cls, parts: Sequence[int]) -> "Partition":
        return cls(tuple(int(v) for v in parts))

    @classmethod
    def rectangle(cls, c: int, a: int) -> "Partition":
        """(c^a): ``a`` rows of length ``c``."""
        return cls((c,) * a)

    def trimmed(self) -> tuple[int, ...]:
        p = list(self.parts)
        while p and p[-1] == 0:
            p.pop()
        return tuple(p)

    def __len__(self) -> int:
        return len(self.trimmed())


@dataclass(frozen=True)
class DensityVector:
    """Ball density p_0..p_kappa; p_0 is the density of empty boxes."""

    values: tuple

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("need at least p_0 and p_1")
        if any(v <= 0 for v in self.values):
            raise ValueError(f"densities must be positive: {self.values}")
        total = sum(self.values)
        exact = all(isinstance(v, (int, Fraction)) for v in self.values)
        if (total != 1) if exact else abs(total - 1) > 1e-12:
            raise ValueError(f"densities sum to {total}, not 1")

    @classmethod
    def of(cls, values: Sequence) -> "DensityVector":
        return cls(tuple(values))

    @classmethod
    def uniform(cls, kappa: int, exact: bool = True) -> "DensityVector":
        v = Fraction(1, kappa + 1) if exact else 1.0 / (kappa + 1)
        return cls((v,) * (kappa + 1))

    @classmethod
    def principal(cls, q, kappa: int) -> "DensityVector":
        """p_a proportional to q^a."""
        norm = sum(q**a for a in range(kappa + 1))
        return cls(tuple(q**a / norm for a in range(kappa + 1)))

    @property
    def kappa(self) -> int:
        return len(self.values) - 1

    @property
    def strictly_decreasing(self) -> bool:
        v = self.values
        return all(v[i] > v[i + 1] for i in range(len(v) - 1))

    @property
    def weakly_decreasing(self) -> bool:
        v = self.values
        return all(v[i] >= v[i + 1] for i in range(len(v) - 1))

    def __getitem__(self, i: int):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def _values(p) -> tuple:
    return p.values if isinstance(p, DensityVector) else tuple(p)


def _parts(lam) -> tuple[int, ...]:
    return lam.trimmed() if isinstance(lam, Partition) else Partition.of(lam).trimmed()


def complete_homogeneous(kmax: int, w: Sequence) -> list:
    """[h_0, ..., h_kmax] of the variables ``w``."""
    one = w[0] ** 0 if len(w) else 1
    h = [one] + [one * 0] * kmax
    for x in w:
        for k in range(1, kmax + 1):
            h[k] = h[k] + x * h[k - 1]
    return h


def determinant(m: list[list]):
    """Gaussian elimination with largest-modulus pivots; exact on Fractions."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    det = a[0][0] ** 0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            return a[0][0] * 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        inv = a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / inv
            if f:
                for k in range(col, n):
                    a[r][k] = a[r][k] - f * a[col][k]
    return det


def schur(lam, w: Sequence, method: str = "jt"):
    """s_lambda(w) by Jacobi-Trudi (default) or the bialternant formula.

    The bialternant path divides by the Vandermonde determinant and rejects
    repeated variables.  Float inputs are evaluated exactly on their binary
    values and rounded once: both determinants cancel catastrophically in
    floating point once the rectangle grows past a few rows.
    """
    w = tuple(w)
    if any(isinstance(x, float) for x in w) and all(isinstance(x, (int, float, Fraction)) for x in w):
        return float(_schur(_parts(lam), tuple(Fraction(x) for x in w), method))
    if all(isinstance(x, int) for x in w):
        v = _schur(_parts(lam), tuple(Fraction(x) for x in w), method)
        return v.numerator if v.denominator == 1 else v
    return _schur(_parts(lam), w, method)


def _schur(parts: tuple[int, ...], w: tuple, method: str):
    n = len(w)
    one = w[0] ** 0 if n else 1
    if not parts:
        return one
    if len(parts) > n:
        return one * 0
    if method == "jt":
        l = len(parts)
        h = complete_homogeneous(parts[0] + l, w)

        def hk(k):
            return h[k] if k >= 0 else one * 0

        return determinant([[hk(parts[i] - i + j) for j in range(l)] for i in range(l)])
    if method == "bialternant":
        if len(set(w)) < n:
            raise ValueError("bialternant formula needs distinct variables")
        lam_full = parts + (0,) * (n - len(parts))
        num = determinant([[x ** (lam_full[j] + n - 1 - j) for j in range(n)] for x in w])
        den = determinant([[x ** (n - 1 - j) for j in range(n)] for x in w])
        return num / den
    raise ValueError(f"unknown method {method!r}")


def _check_a(a: int, kappa: int) -> None:
    if not 1 <= a <= kappa:
        raise ValueError(f"a={a} outside 1..{kappa}")


def partition_Z(c: int, a: int, p):
    """Normalising constant of the stationary carrier law on B_c^(a)."""
    p = _values(p)
    _check_a(a, len(p) - 1)
    return schur((c,) * a, p)


def stationary_pi(c: int, a: int, p, cap: int = 200_000) -> dict[Tableau, object]:
    """pi(C) proportional to prod_i p_i^{m_i(C)} over B_c^(a)."""
    p = _values(p)
    kappa = len(p) - 1
    _check_a(a, kappa)
    states = rectangular_tableaux(a, c, kappa, cap=cap)
    Z = partition_Z(c, a, p)
    out = {}
    for t in states:
        w = p[0] ** 0
        for v in t.letters():
            w = w * p[v]
        out[t] = w / Z
    return out


def epsilon(c: int, a: int, p, method: str = "ratio"):
    """Mean local energy of a stationary B_c^(a) carrier meeting a fresh ball.

    ``method="ratio"`` uses s_(c^a,1)/s_(c^a); ``"sum"`` averages
    P(x > bottom-left) over the enumerated stationary law.
    """
    p = _values(p)
    kappa = len(p) - 1
    _check_a(a, kappa)
    if c == 0:
        return p[0] * 0
    if method == "ratio":
        return schur((c,) * a + (1,), p) / schur((c,) * a, p)
    if method == "sum":
        tail = [sum(p[z + 1:], p[0] * 0) for z in range(kappa + 1)]
        return sum((pi * tail[t.bottom_left] for t, pi in stationary_pi(c, a, p).items()), p[0] * 0)
    raise ValueError(f"unknown method {method!r}")


def eta(i: int, a: int, p):
    """Limiting i-th row length per site of the a-th Young diagram."""
    p = _values(p)
    kappa = len(p) - 1
    _check_a(a, kappa)
    if i < 1:
        raise ValueError("i must be >= 1")
    s = lambda lam: schur(lam, p)  # noqa: E731
    return s(((i - 1),) * (a - 1)) * s((i,) * (a + 1)) / (s((i,) * a) * s((i - 1,) * a))


def equilibrium_csv(p, imax: int) -> str:
    p = _values(p)
    kappa = len(p) - 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kappa", "a", "i"] + [f"p{k}" for k in range(kappa + 1)] + ["epsilon", "eta"])
    for a in range(1, kappa + 1):
        for i in range(1, imax + 1):
            w.writerow([kappa, a, i, *(f"{float(v):.12g}" for v in p),
                        f"{float(epsilon(i, a, p)):.12g}", f"{float(eta(i, a, p)):.12g}"])
    return buf.getvalue()
