"""Semistandard tableaux, Schensted insertion and the combinatorial R on B_c^(a) x B_1^(1).

Tableaux are immutable tuples of rows.  Rectangular tableaux of height ``a`` and
width ``c`` with letters in ``0..kappa`` form the carrier set ``B_c^(a)``; ragged
shapes only show up as intermediate products of insertion.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

__all__ = [
    "Tableau",
    "row_insert",
    "insert_word",
    "column_insert",
    "row_word",
    "reverse_row_word",
    "product",
    "combinatorial_R",
    "local_energy",
    "ground_tableau",
    "lowest_tableau",
    "rectangular_tableaux",
    "parse_tableau",
    "format_tableau",
    "row_counts_R",
    "counts_of_row",
    "row_from_counts",
]


@dataclass(frozen=True)
class Tableau:
    rows: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "Tableau":
        return cls(tuple(tuple(int(v) for v in r) for r in rows))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def size(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def bottom_left(self) -> int:
        return self.rows[-1][0]

    def is_rectangular(self) -> bool:
        return all(len(r) == self.width for r in self.rows)

    def is_semistandard(self) -> bool:
        shape = self.shape
        if any(shape[i] < shape[i + 1] for i in range(len(shape) - 1)):
            return False
        if any(len(r) == 0 for r in self.rows):
            return False
        for r in self.rows:
            if any(r[j] > r[j + 1] for j in range(len(r) - 1)):
                return False
        for i in range(len(self.rows) - 1):
            upper, lower = self.rows[i], self.rows[i + 1]
            if any(upper[j] >= lower[j] for j in range(len(lower))):
                return False
        return True

    def letters(self) -> list[int]:
        return [v for r in self.rows for v in r]

    def counts(self, kappa: int) -> tuple[int, ...]:
        """Letter multiplicities ``m_0, ..., m_kappa``."""
        m = [0] * (kappa + 1)
        for v in self.letters():
            m[v] += 1
        return tuple(m)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __str__(self) -> str:
        return format_tableau(self)


def _as_tableau(t) -> Tableau:
    return t if isinstance(t, Tableau) else Tableau.of(t)


def _check_carrier(t: Tableau, kappa: int | None = None) -> None:
    if not t.rows or not t.is_rectangular() or not t.is_semistandard():
        raise ValueError(f"not a rectangular semistandard tableau: {t.rows!r}")
    if kappa is not None and (t.rows[0][0] < 0 or t.rows[-1][-1] > kappa):
        raise ValueError(f"tableau {t.rows!r} has letters outside 0..{kappa}")


def row_insert(t, x: int) -> Tableau:
    """Schensted row insertion ``t <- x``."""
    rows = [list(r) for r in _as_tableau(t).rows]
    for r in rows:
        # leftmost entry strictly greater than x gets bumped
        j = _first_greater(r, x)
        if j == len(r):
            r.append(x)
            return Tableau(tuple(tuple(r_) for r_ in rows))
        r[j], x = x, r[j]
    rows.append([x])
    return Tableau(tuple(tuple(r_) for r_ in rows))


def _first_greater(row: Sequence[int], x: int) -> int:
    lo, hi = 0, len(row)
    while lo < hi:
        mid = (lo + hi) // 2
        if row[mid] > x:
            hi = mid
        else:
            lo = mid + 1
    return lo


def insert_word(t, word: Iterable[int]) -> Tableau:
    t = _as_tableau(t)
    for x in word:
        t = row_insert(t, x)
    return t


def column_insert(t, x: int) -> Tableau:
    """Schensted column insertion ``x -> t``.

    In each column the topmost entry ``>= x`` is replaced by ``x`` and carried to
    the next column; if no such entry exists ``x`` lands at the bottom of the column.
    """
    rows = [list(r) for r in _as_tableau(t).rows]
    j = 0
    while True:
        col_len = sum(1 for r in rows if len(r) > j)
        i = next((i for i in range(col_len) if rows[i][j] >= x), None)
        if i is None:
            if col_len == len(rows):
                rows.append([x])
            else:
                rows[col_len].append(x)
            return Tableau(tuple(tuple(r) for r in rows))
        rows[i][j], x = x, rows[i][j]
        j += 1


def row_word(t) -> tuple[int, ...]:
    """Rows read from the bottom row up, each left to right."""
    return tuple(v for r in reversed(_as_tableau(t).rows) for v in r)


def reverse_row_word(t) -> tuple[int, ...]:
    return row_word(t)[::-1]


def product(s, t) -> Tableau:
    """Schensted product ``s . t = (s <- row(t))``."""
    return insert_word(s, row_word(t))


def combinatorial_R(C, x: int, kappa: int | None = None) -> tuple[int, Tableau]:
    """Image ``(y, S)`` of ``(C, x)`` under R: B_c^(a) x B_1^(1) -> B_1^(1) x B_c^(a).

    Letters above the bottom-left entry go through reverse bumping from the bottom
    row up; the rest are column inserted from the first column to the last.
    """
    C = _as_tableau(C)
    _check_carrier(C, kappa)
    if kappa is not None and not 0 <= x <= kappa:
        raise ValueError(f"letter {x} outside 0..{kappa}")
    return _R(C.rows, x)


@lru_cache(maxsize=1 << 18)
def _R(rows: tuple[tuple[int, ...], ...], x: int) -> tuple[int, Tableau]:
    new = [list(r) for r in rows]
    if x > rows[-1][0]:
        for r in reversed(new):
            # rightmost entry strictly smaller than x
            j = _first_greater(r, x - 1) - 1
            r[j], x = x, r[j]
    else:
        for j in range(len(new[0])):
            i = next(i for i in range(len(new)) if new[i][j] >= x)
            new[i][j], x = x, new[i][j]
    return x, Tableau(tuple(tuple(r) for r in new))


def local_energy(C, x: int) -> int:
    """1 if ``x`` exceeds the bottom-left entry of ``C``, else 0."""
    return int(x > _as_tableau(C).bottom_left)


def ground_tableau(a: int, c: int) -> Tableau:
    """U_c^(a): row i filled with the letter i-1."""
    return Tableau(tuple((i,) * c for i in range(a)))


def lowest_tableau(a: int, c: int, kappa: int) -> Tableau:
    return Tableau(tuple((kappa - a + 1 + i,) * c for i in range(a)))


def rectangular_tableaux(a: int, c: int, kappa: int, cap: int | None = None) -> list[Tableau]:
    """All of B_c^(a)(kappa) in lexicographic order of the row-major entries.

    The first element is always the ground tableau.
    """
    if not 1 <= a <= kappa + 1 or c < 1:
        raise ValueError(f"no tableaux of shape {a}x{c} over 0..{kappa}")
    out: list[Tableau] = []

    def extend(prefix: list[tuple[int, ...]]):
        i = len(prefix)
        if i == a:
            out.append(Tableau(tuple(prefix)))
            if cap is not None and len(out) > cap:
                raise OverflowError(f"|B_{c}^({a})| exceeds cap {cap}")
            return
        above = prefix[-1] if prefix else None
        for row in combinations_with_replacement(range(kappa + 1), c):
            if above is not None and any(row[j] <= above[j] for j in range(c)):
                continue
            # letters in row i of a column-strict tableau of height a are within [i, kappa-a+1+i]
            if row[0] < i or row[-1] > kappa - a + 1 + i:
                continue
            extend(prefix + [row])

    extend([])
    return out


def parse_tableau(text: str) -> Tableau:
    """Parse ``"011/234"`` or ``"0,1,1/2,3,4"`` into a tableau."""
    rows = []
    for chunk in text.strip().split("/"):
        chunk = chunk.strip()
        if "," in chunk:
            rows.append(tuple(int(v) for v in chunk.split(",")))
        else:
            rows.append(tuple(int(v) for v in chunk))
    t = Tableau(tuple(rows))
    if not t.is_semistandard():
        raise ValueError(f"not semistandard: {text!r}")
    return t


def format_tableau(t) -> str:
    t = _as_tableau(t)
    wide = any(v > 9 for v in t.letters())
    sep = "," if wide else ""
    return "/".join(sep.join(str(v) for v in r) for r in t.rows)


# Height-one carriers as count vectors (c_1, ..., c_kappa); c_0 is implied by the width.

def counts_of_row(row: Sequence[int], kappa: int) -> tuple[int, ...]:
    m = [0] * kappa
    for v in row:
        if v:
            m[v - 1] += 1
    return tuple(m)


def row_from_counts(counts: Sequence[int], c: int) -> tuple[int, ...]:
    zeros = c - sum(counts)
    return (0,) * zeros + tuple(v for v, k in enumerate(counts, start=1) for _ in range(k))


def row_counts_R(counts: tuple[int, ...], c: int, x: int) -> tuple[int, tuple[int, ...]]:
    """R on B_c^(1) in count coordinates.

    Returns ``(y, counts')``.  Equivalent to :func:`combinatorial_R` on the
    single-row tableau with these letter counts.
    """
    m = list(counts)
    zeros = c - sum(m)

    def present(v: int) -> bool:
        return zeros > 0 if v == 0 else m[v - 1] > 0

    smallest = next(v for v in range(len(m) + 1) if present(v))
    top = x - 1 if x > smallest else len(m)
    y = next(v for v in range(top, -1, -1) if present(v))
    if y:
        m[y - 1] -= 1
    if x:
        m[x - 1] += 1
    return y, tuple(m)
