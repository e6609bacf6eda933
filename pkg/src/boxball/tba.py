"""Closed-form TBA quantities at principal densities p_a proportional to q^a.

Everything here is an explicit rational function of q; the residual helpers
check the Q-system, the Y-system, the second order difference equation for phi
and the equation of state relating densities to the fugacities z.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

from .carrier import cartan
from .equilibrium import schur

__all__ = [
    "PrincipalParams",
    "fugacities",
    "Q",
    "y",
    "y_closed",
    "phi",
    "xi",
    "eta_principal",
    "eta_rational_limit",
    "tail_sum",
    "q_system_residual",
    "y_system_residual",
    "deq_residual",
    "equation_of_state_residual",
    "first_column_estimate",
    "tba_csv",
]


@dataclass(frozen=True)
class PrincipalParams:
    q: float
    kappa: int

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError(f"q={self.q} outside (0, 1)")
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")

    @property
    def p(self) -> tuple[float, ...]:
        q, k = self.q, self.kappa
        return tuple(q**a * (1 - q) / (1 - q ** (k + 1)) for a in range(k + 1))

    @property
    def z(self) -> tuple[float, ...]:
        """z_0..z_{kappa+1}; z_a = q^{-a(kappa+1-a)/2}."""
        q, k = self.q, self.kappa
        return tuple(q ** (-a * (k + 1 - a) / 2) for a in range(k + 2))

    @property
    def w(self) -> tuple[float, ...]:
        z = self.z
        return tuple(z[a] / z[a - 1] for a in range(1, self.kappa + 2))

    @property
    def u(self) -> float:
        return math.prod(self.p)

    @property
    def beta(self) -> tuple[float, ...]:
        """Chemical potentials, e^{beta_a} = p_{a-1}/p_a; all equal -log q."""
        p = self.p
        return tuple(math.log(p[a - 1] / p[a]) for a in range(1, self.kappa + 1))


def fugacities(p: Sequence[float]) -> tuple[float, ...]:
    """z_0..z_{kappa+1} from densities: z_a = u^{-a/(kappa+1)} p_0...p_{a-1}."""
    p = tuple(float(v) for v in p)
    k = len(p) - 1
    u = math.prod(p)
    return tuple(u ** (-a / (k + 1)) * math.prod(p[:a]) for a in range(k + 2))


def _w(src) -> tuple[float, ...]:
    if isinstance(src, PrincipalParams):
        return src.w
    z = tuple(src)
    return tuple(z[a] / z[a - 1] for a in range(1, len(z)))


def Q(i: int, a: int, src) -> float:
    """Q_i^(a) = s_(i^a)(w); ``src`` is PrincipalParams or z_0..z_{kappa+1}."""
    if i == -1:
        return 0.0
    if i < -1:
        raise ValueError("i must be >= -1")
    if i == 0:
        return 1.0
    return float(schur((i,) * a, _w(src)))


def _kappa(src) -> int:
    return src.kappa if isinstance(src, PrincipalParams) else len(tuple(src)) - 2


def y(i: int, a: int, src) -> float:
    """y_i^(a) from the Q-ratio; y_0 = 0."""
    k = _kappa(src)
    den = 1.0
    for b in (a - 1, a + 1):
        if 1 <= b <= k:
            den *= Q(i, b, src)
    return Q(i - 1, a, src) * Q(i + 1, a, src) / den


def y_closed(i: int, a: int, params: PrincipalParams) -> float:
    q, k = params.q, params.kappa
    return q ** (-i) * (1 - q**i) * (1 - q ** (i + k + 1)) / ((1 - q**a) * (1 - q ** (k + 1 - a)))


def phi(i: int | float, a: int, params: PrincipalParams) -> float:
    """Scaled vacancy; ``i=math.inf`` gives the limit value."""
    q, k = params.q, params.kappa
    if i == 0:
        return 1.0 if a == 1 else 0.0
    if math.isinf(i):
        p = params.p
        return (a == 1) - sum(cartan(a, b) * sum(p[b:]) for b in range(1, k + 1))
    # (1-q^i)/(1-q^{i+a-1}) is cancelled for a=1 so i=0 stays finite
    head = 1.0 if a == 1 else (1 - q**i) / (1 - q ** (i + a - 1))
    return (
        q ** (a - 1) * (1 - q) ** 2 * head * (1 - q ** (i + k + 1)) * (1 + q ** (i + a))
        / ((1 - q ** (k + 1)) * (1 - q ** (i + a)) * (1 - q ** (i + a + 1)))
    )


def xi(i: int, a: int, params: PrincipalParams) -> float:
    """Scaled column multiplicity phi/y."""
    if i < 1:
        raise ValueError("i must be >= 1")
    return phi(i, a, params) / y_closed(i, a, params)


def eta_principal(i: int, a: int, params: PrincipalParams) -> float:
    q, k = params.q, params.kappa
    return (
        q ** (i + a - 1) * (1 - q) * (1 - q**a) * (1 - q ** (k + 1 - a))
        / ((1 - q ** (k + 1)) * (1 - q ** (i + a - 1)) * (1 - q ** (i + a)))
    )


def eta_rational_limit(i: int, a: int, kappa: int) -> float:
    """q -> 1 value of eta_principal."""
    return a * (kappa + 1 - a) / ((kappa + 1) * (i + a - 1) * (i + a))


def tail_sum(i: int, a: int, params: PrincipalParams, J: int) -> float:
    """sum_{j=i}^{J} xi_j; approaches eta_principal(i) geometrically in J."""
    return math.fsum(xi(j, a, params) for j in range(i, J + 1))


def q_system_residual(i: int, a: int, src) -> float:
    k = _kappa(src)
    prod = 1.0
    for b in (a - 1, a + 1):
        if 1 <= b <= k:
            prod *= Q(i, b, src)
    lhs = Q(i, a, src) ** 2
    return (lhs - Q(i - 1, a, src) * Q(i + 1, a, src) - prod) / lhs


def y_system_residual(i: int, a: int, params: PrincipalParams) -> float:
    k = params.kappa
    Y = lambda j, b: y_closed(j, b, params) if j else 0.0  # noqa: E731
    lhs = (1 + Y(i, a)) ** 2 / ((1 + Y(i - 1, a)) * (1 + Y(i + 1, a)))
    rhs = math.prod((1 + 1 / Y(i, b)) ** cartan(a, b) for b in range(1, k + 1))
    return lhs / rhs - 1


def deq_residual(i: int, a: int, params: PrincipalParams) -> float:
    k = params.kappa
    lhs = phi(i - 1, a, params) - 2 * phi(i, a, params) + phi(i + 1, a, params)
    rhs = sum(cartan(a, b) * phi(i, b, params) / y_closed(i, b, params) for b in range(1, k + 1))
    return lhs - rhs


def _log_q11(z: Sequence[float]) -> float:
    return math.log(sum(z[b + 1] / z[b] for b in range(len(z) - 1)))


def equation_of_state_residual(p: Sequence[float], method: str = "analytic",
                               h: float = 1e-6) -> tuple[float, ...]:
    """Residuals z_a d/dz_a log Q_1^(1) - delta_{a,1} + sum_b C_ab (p_b+...+p_kappa)."""
    p = tuple(float(v) for v in p)
    k = len(p) - 1
    if any(p[i] <= p[i + 1] for i in range(k)):
        raise ValueError("equation of state needs strictly decreasing densities")
    z = fugacities(p)
    out = []
    for a in range(1, k + 1):
        if method == "analytic":
            w = [z[b] / z[b - 1] for b in range(1, k + 2)]
            d = (w[a - 1] - w[a]) / sum(w)
        elif method == "fd":
            up, dn = list(z), list(z)
            up[a] += h
            dn[a] -= h
            d = z[a] * (_log_q11(up) - _log_q11(dn)) / (2 * h)
        else:
            raise ValueError(f"unknown method {method!r}")
        out.append(d - (a == 1) + sum(cartan(a, b) * sum(p[b:]) for b in range(1, k + 1)))
    return tuple(out)


def first_column_estimate(n: float, a: int, params: PrincipalParams, leading: bool = False) -> float:
    """Logarithmic estimate of the first column length of the a-th diagram.

    ``leading=True`` keeps only the dominant term -log n / log q.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    q, k = params.q, params.kappa
    if leading:
        return -math.log(n) / math.log(q)
    arg = q ** (a - 1) * (1 - q) * (1 - q**a) * (1 - q ** (k + 1 - a)) * n / (1 - q ** (k + 1))
    return -math.log(arg) / math.log(q)


def tba_csv(params: PrincipalParams, imax: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "kappa", "a", "i", "y", "phi", "xi", "eta"])
    for a in range(1, params.kappa + 1):
        for i in range(1, imax + 1):
            w.writerow([params.q, params.kappa, a, i] + [
                f"{v:.12g}" for v in (y_closed(i, a, params), phi(i, a, params),
                                      xi(i, a, params), eta_principal(i, a, params))])
    return buf.getvalue()
