"""Box-ball configurations and their time evolution.

A configuration is a finite word over ``0..kappa`` indexed from site 1; every
site past the stored cells is empty.  ``0`` is an empty box, ``1..kappa`` are
ball colors.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .carrier import carrier_table

__all__ = [
    "Configuration",
    "Soliton",
    "parse_configuration",
    "format_configuration",
    "apply_K",
    "evolve",
    "trajectory",
    "evolve_by_carrier",
    "soliton_blocks",
    "soliton_decomposition",
]


@dataclass(frozen=True)
class Configuration:
    cells: tuple[int, ...]
    kappa: int

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        bad = [v for v in self.cells if not 0 <= v <= self.kappa]
        if bad:
            raise ValueError(f"letters {sorted(set(bad))} outside 0..{self.kappa}")

    @classmethod
    def of(cls, cells: Iterable[int], kappa: int | None = None) -> "Configuration":
        cells = tuple(int(v) for v in cells)
        if kappa is None:
            kappa = max(cells, default=1) or 1
        return cls(cells, kappa)

    def normalized(self) -> "Configuration":
        n = len(self.cells)
        while n and self.cells[n - 1] == 0:
            n -= 1
        return Configuration(self.cells[:n], self.kappa)

    def padded(self, length: int) -> "Configuration":
        if length <= len(self.cells):
            return self
        return Configuration(self.cells + (0,) * (length - len(self.cells)), self.kappa)

    def ball_counts(self) -> tuple[int, ...]:
        """Number of balls of each color 1..kappa."""
        m = [0] * self.kappa
        for v in self.cells:
            if v:
                m[v - 1] += 1
        return tuple(m)

    @property
    def total_balls(self) -> int:
        return sum(1 for v in self.cells if v)

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, site: int) -> int:
        """Letter at 1-based ``site``; zero past the stored cells."""
        if site < 1:
            raise IndexError("sites are numbered from 1")
        return self.cells[site - 1] if site <= len(self.cells) else 0

    def same_state(self, other: "Configuration") -> bool:
        return self.normalized().cells == other.normalized().cells

    def __str__(self) -> str:
        return format_configuration(self)


@dataclass(frozen=True)
class Soliton:
    colors: tuple[int, ...]
    position: int

    @property
    def length(self) -> int:
        return len(self.colors)


_TOKEN = re.compile(r"\s*(\d+)\s*")


def parse_configuration(text: str, kappa: int | None = None) -> Configuration:
    """Read contiguous digits (``"1121401"``), spaced digits or comma-separated integers.

    Raises ``ValueError`` naming the 1-based column of the first bad character.
    """
    s = text.strip()
    if "," in s:
        cells = []
        col = 1
        for part in s.split(","):
            if not part.strip().isdigit():
                raise ValueError(f"column {col}: expected an integer, got {part.strip()!r}")
            cells.append(int(part))
            col += len(part) + 1
    else:
        cells = []
        for col, ch in enumerate(s, start=1):
            if ch.isspace():
                continue
            if not ch.isdigit():
                raise ValueError(f"column {col}: unexpected character {ch!r}")
            cells.append(int(ch))
    return Configuration.of(cells, kappa)


def format_configuration(x, width: int | None = None, sep: str = " ") -> str:
    cells = x.cells if isinstance(x, Configuration) else tuple(x)
    if width is not None:
        cells = cells[:width] + (0,) * max(0, width - len(cells))
    if any(v > 9 for v in cells):
        sep = ","
    return sep.join(str(v) for v in cells)


def _as_config(x, kappa: int | None = None) -> Configuration:
    if isinstance(x, Configuration):
        return x
    return Configuration.of(x, kappa)


def apply_K(x, a: int, kappa: int | None = None) -> Configuration:
    """Move every color-``a`` ball, leftmost first, to the nearest empty site on its right."""
    x = _as_config(x, kappa)
    if not 1 <= a <= x.kappa:
        raise ValueError(f"color {a} outside 1..{x.kappa}")
    cells = list(x.cells)
    positions = [i for i, v in enumerate(cells) if v == a]
    cells.extend([0] * (len(positions) + 1))
    for i in positions:
        j = i + 1
        while cells[j]:
            j += 1
        cells[i], cells[j] = 0, a
    return Configuration(tuple(cells), x.kappa).normalized()


def evolve(x, kappa: int | None = None) -> Configuration:
    """One time step ``K_1 o K_2 o ... o K_kappa``."""
    x = _as_config(x, kappa)
    for a in range(x.kappa, 0, -1):
        x = apply_K(x, a)
    return x


def trajectory(x, steps: int, kappa: int | None = None) -> list[Configuration]:
    x = _as_config(x, kappa)
    out = [x]
    for _ in range(steps):
        x = evolve(x)
        out.append(x)
    return out


def evolve_by_carrier(x, a: int, c: int, kappa: int | None = None) -> Configuration:
    """Configuration emitted by a B_c^(a) carrier swept from the ground state.

    Sites past the support are scanned until the carrier sits in a state that
    absorbs an empty box without change.
    """
    x = _as_config(x, kappa)
    if not 1 <= a <= x.kappa or c < 1:
        raise ValueError(f"bad carrier shape a={a}, c={c}")
    table = carrier_table(a, c, x.kappa)
    s = 0
    out = []
    for v in x.cells:
        y, s = table.step(s, v)
        out.append(y)
    while True:
        y, s2 = table.step(s, 0)
        if y == 0 and s2 == s:
            break
        out.append(y)
        s = s2
    return Configuration(tuple(out), x.kappa).normalized()


def soliton_blocks(x) -> list[Soliton]:
    """Maximal non-increasing runs of balls, left to right."""
    cells = _as_config(x).cells
    blocks: list[Soliton] = []
    run: list[int] = []
    start = 0
    for i, v in enumerate(cells, start=1):
        if v and run and v <= run[-1]:
            run.append(v)
            continue
        if run:
            blocks.append(Soliton(tuple(run), start))
            run = []
        if v:
            run, start = [v], i
    if run:
        blocks.append(Soliton(tuple(run), start))
    return blocks


def soliton_decomposition(x) -> list[Soliton] | None:
    """Soliton list if ``x`` is already a non-interacting sequence of solitons, else None.

    Lengths must be non-decreasing left to right and the gap after each block must
    be at least its length when the next block is longer.  Equal-length neighbours
    travel in lockstep at any gap, so those pairs are confirmed by one time step.
    """
    blocks = soliton_blocks(x)
    tight = False
    for left, right in zip(blocks, blocks[1:]):
        if left.length > right.length:
            return None
        gap = right.position - (left.position + left.length)
        if gap < left.length:
            if left.length < right.length:
                return None
            tight = True
    if tight:
        moved = soliton_blocks(evolve(x))
        if [(b.colors, b.position + b.length) for b in blocks] != [(b.colors, b.position) for b in moved]:
            return None
    return blocks
