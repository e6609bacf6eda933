"""Carrier sweeps, the energy matrix and the invariant Young diagrams."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

from .tableau import Tableau, combinatorial_R, ground_tableau

__all__ = [
    "CarrierTable",
    "carrier_table",
    "CarrierPath",
    "run_carrier",
    "carrier_energy",
    "EnergyMatrix",
    "energy_matrix",
    "YoungTuple",
    "young_diagrams",
    "cartan",
    "VacancyTable",
    "vacancies",
    "fermionic_count",
    "energy_matrix_csv",
    "young_csv",
    "young_svg",
]


def _cells_kappa(x, kappa: int | None) -> tuple[Sequence[int], int]:
    if hasattr(x, "cells"):
        return x.cells, x.kappa if kappa is None else kappa
    cells = tuple(x)
    if kappa is None:
        kappa = max(cells, default=1) or 1
    return cells, kappa


class CarrierTable:
    """Lazily filled transition table of R on B_c^(a)(kappa).

    States are interned as integers in discovery order; state 0 is the ground
    tableau U_c^(a).  ``step`` returns ``(emitted letter, next state)``.
    """

    def __init__(self, a: int, c: int, kappa: int):
        if not 1 <= a <= kappa or c < 1:
            raise ValueError(f"bad carrier a={a}, c={c}, kappa={kappa}")
        self.a, self.c, self.kappa = a, c, kappa
        self.states: list[Tableau] = []
        self.index: dict[Tableau, int] = {}
        self.bottom_left: list[int] = []
        self._next: list[list[int]] = []
        self._emit: list[list[int]] = []
        self.intern(ground_tableau(a, c))

    def intern(self, t: Tableau) -> int:
        i = self.index.get(t)
        if i is None:
            i = len(self.states)
            self.index[t] = i
            self.states.append(t)
            self.bottom_left.append(t.bottom_left)
            self._next.append([-1] * (self.kappa + 1))
            self._emit.append([0] * (self.kappa + 1))
        return i

    def step(self, s: int, x: int) -> tuple[int, int]:
        nxt = self._next[s][x]
        if nxt < 0:
            y, S = combinatorial_R(self.states[s], x)
            nxt = self.intern(S)
            self._next[s][x] = nxt
            self._emit[s][x] = y
        return self._emit[s][x], nxt

    def energy(self, cells: Sequence[int]) -> int:
        """Total local energy of a sweep started at the ground state."""
        nxt, bl = self._next, self.bottom_left
        s = 0
        e = 0
        for x in cells:
            if x > bl[s]:
                e += 1
            t = nxt[s][x]
            if t < 0:
                t = self.step(s, x)[1]
            s = t
        return e

    def close(self, cap: int | None = None) -> None:
        """Explore every state reachable from the ground state."""
        i = 0
        while i < len(self.states):
            for x in range(self.kappa + 1):
                self.step(i, x)
            i += 1
            if cap is not None and len(self.states) > cap:
                raise OverflowError(f"carrier state space exceeds {cap}")


@lru_cache(maxsize=None)
def carrier_table(a: int, c: int, kappa: int) -> CarrierTable:
    return CarrierTable(a, c, kappa)


@dataclass(frozen=True)
class CarrierPath:
    states: tuple[Tableau, ...]
    emissions: tuple[int, ...]
    energies: tuple[int, ...]

    @property
    def total_energy(self) -> int:
        return sum(self.energies)


def run_carrier(x, a: int, c: int, kappa: int | None = None) -> CarrierPath:
    """Sweep a B_c^(a) carrier over the stored cells of ``x``.

    ``states[k]`` is the carrier after scanning sites 1..k, ``energies[k]`` is
    ``H(states[k], x(k+1))``.
    """
    cells, kappa = _cells_kappa(x, kappa)
    table = carrier_table(a, c, kappa)
    s = 0
    states = [table.states[0]]
    emissions, energies = [], []
    for v in cells:
        energies.append(int(v > table.bottom_left[s]))
        y, s = table.step(s, v)
        emissions.append(y)
        states.append(table.states[s])
    return CarrierPath(tuple(states), tuple(emissions), tuple(energies))


def carrier_energy(x, a: int, c: int, kappa: int | None = None) -> int:
    """E_c^(a)(x).  Empty boxes past the support carry zero energy."""
    cells, kappa = _cells_kappa(x, kappa)
    return carrier_table(a, c, kappa).energy(cells)


@dataclass(frozen=True)
class EnergyMatrix:
    """Rows c = 1..c_max of E_c^(a); every row past c_max equals the last one."""

    kappa: int
    rows: tuple[tuple[int, ...], ...]

    def __getitem__(self, key: tuple[int, int]) -> int:
        c, a = key
        if c < 1 or not 1 <= a <= self.kappa:
            raise IndexError(key)
        if c == 0:
            return 0
        return self.rows[min(c, len(self.rows)) - 1][a - 1]

    def entry(self, c: int, a: int) -> int:
        return 0 if c == 0 else self[c, a]

    def column(self, a: int) -> tuple[int, ...]:
        return tuple(r[a - 1] for r in self.rows)

    @property
    def stabilized(self) -> tuple[bool, ...]:
        if len(self.rows) == 1:
            return tuple(v == 0 for v in self.rows[0])
        return tuple(self.rows[-1][a] == self.rows[-2][a] for a in range(self.kappa))


def energy_matrix(x, kappa: int | None = None) -> EnergyMatrix:
    """Energy matrix of ``x`` up to its first repeated row.

    A column stops growing once two consecutive entries agree: the increments are
    row lengths of a Young diagram, so one zero increment forces all later ones.
    The number of balls bounds the number of rows.
    """
    cells, kappa = _cells_kappa(x, kappa)
    balls = sum(1 for v in cells if v)
    prev = [0] * kappa
    done = [False] * kappa
    rows: list[tuple[int, ...]] = []
    c = 0
    while True:
        c += 1
        row = []
        for a in range(1, kappa + 1):
            if done[a - 1]:
                row.append(prev[a - 1])
                continue
            e = carrier_energy(cells, a, c, kappa)
            if e == prev[a - 1]:
                done[a - 1] = True
            row.append(e)
        rows.append(tuple(row))
        if all(done) or c > balls:
            break
        prev = row
    return EnergyMatrix(kappa, tuple(rows))


@dataclass(frozen=True)
class YoungTuple:
    diagrams: tuple[tuple[int, ...], ...]

    @property
    def kappa(self) -> int:
        return len(self.diagrams)

    def rows(self, a: int) -> tuple[int, ...]:
        return self.diagrams[a - 1]

    def rho(self, i: int, a: int) -> int:
        d = self.diagrams[a - 1]
        return d[i - 1] if i <= len(d) else 0

    def size(self, a: int) -> int:
        return sum(self.diagrams[a - 1])

    def energy(self, i: int, a: int) -> int:
        return sum(self.diagrams[a - 1][:i])

    def column_multiplicities(self, a: int) -> tuple[int, ...]:
        """``m_i`` = number of columns of length i, for i = 1..(number of rows)."""
        d = self.diagrams[a - 1]
        return tuple(d[i] - (d[i + 1] if i + 1 < len(d) else 0) for i in range(len(d)))

    def conjugate(self, a: int) -> tuple[int, ...]:
        d = self.diagrams[a - 1]
        return tuple(sum(1 for r in d if r >= j) for j in range(1, (d[0] if d else 0) + 1))


def young_diagrams(E: EnergyMatrix) -> YoungTuple:
    diagrams = []
    for a in range(1, E.kappa + 1):
        col = (0,) + E.column(a)
        rho = [col[i] - col[i - 1] for i in range(1, len(col))]
        if any(r < 0 for r in rho) or any(rho[i] < rho[i + 1] for i in range(len(rho) - 1)):
            raise ValueError(f"energy column {a} is not concave: {col[1:]}")
        while rho and rho[-1] == 0:
            rho.pop()
        diagrams.append(tuple(rho))
    return YoungTuple(tuple(diagrams))


def cartan(a: int, b: int) -> int:
    """Cartan matrix of sl_{kappa+1}, 1-based indices."""
    return 2 if a == b else (-1 if abs(a - b) == 1 else 0)


@dataclass(frozen=True)
class VacancyTable:
    n: int
    values: tuple[tuple[int, ...], ...]  # values[i-1][a-1] = v_i^(a)
    at_infinity: tuple[int, ...]

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, a = key
        if i > len(self.values):
            return self.at_infinity[a - 1]
        return self.values[i - 1][a - 1]


def vacancies(Y: YoungTuple, n: int, check: bool = True) -> VacancyTable:
    kappa = Y.kappa
    depth = max((len(d) for d in Y.diagrams), default=0)
    depth = max(depth, 1)

    def v(energy_of) -> tuple[int, ...]:
        return tuple(
            n * (a == 1) - sum(cartan(a, b) * energy_of(b) for b in range(1, kappa + 1))
            for a in range(1, kappa + 1)
        )

    values = tuple(v(lambda b, i=i: Y.energy(i, b)) for i in range(1, depth + 1))
    inf = v(lambda b: Y.size(b))
    table = VacancyTable(n, values, inf)
    if check:
        for i, row in enumerate(values + (inf,), start=1):
            for a, val in enumerate(row, start=1):
                if val < 0:
                    where = "infinity" if i > len(values) else str(i)
                    raise ValueError(f"negative vacancy v_{where}^({a}) = {val} at n={n}")
    return table


def fermionic_count(Y: YoungTuple, n: int) -> int:
    """Number of highest states of length n with diagrams Y (binomial product)."""
    try:
        vac = vacancies(Y, n)
    except ValueError:
        return 0
    total = 1
    for a in range(1, Y.kappa + 1):
        for i, m in enumerate(Y.column_multiplicities(a), start=1):
            if m:
                total *= comb(vac[i, a] + m, m)
    return total


def energy_matrix_csv(E: EnergyMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c"] + [f"E_a{a}" for a in range(1, E.kappa + 1)])
    for c, row in enumerate(E.rows, start=1):
        w.writerow([c, *row])
    return buf.getvalue()


def young_csv(Y: YoungTuple, vac: VacancyTable | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["a", "i", "rho", "E", "m"]
    if vac is not None:
        header.append("vacancy")
    w.writerow(header)
    for a in range(1, Y.kappa + 1):
        mult = Y.column_multiplicities(a)
        for i, r in enumerate(Y.rows(a), start=1):
            row = [a, i, r, Y.energy(i, a), mult[i - 1]]
            if vac is not None:
                row.append(vac[i, a])
            w.writerow(row)
    return buf.getvalue()


def young_svg(rows: Sequence[int], cell: float = 10.0, flip: bool = True) -> str:
    """Outline of a Young diagram; ``flip`` puts the first row at the bottom."""
    rows = [r for r in rows if r]
    width = (rows[0] if rows else 0) * cell
    height = len(rows) * cell
    pts = [(0.0, 0.0)]
    y = 0.0
    for r in rows:
        pts.append((r * cell, y))
        y += cell
        pts.append((r * cell, y))
    pts.append((0.0, y))
    if flip:
        pts = [(px, height - py) for px, py in pts]
    path = " ".join(f"{px:g},{py:g}" for px, py in pts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}">'
        f'<polygon points="{path}" fill="none" stroke="black"/></svg>\n'
    )
