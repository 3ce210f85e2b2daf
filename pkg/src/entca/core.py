"""Domain types, exact combinatorics and the coverage predicate.

All column and row indices are 0-based.  Symbols are the integers
``0 .. v-1``.  A column is stored as a tuple of ints; an empty slot is
``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional, Sequence

Column = tuple[int, ...]

#: enumeration guard for the brute-force oracles
MAX_ENUMERATION = 10**8


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class CAParams:
    """Covering-array parameters with balanced columns, ``N = m * v``."""

    t: int
    k: int
    v: int
    m: int

    def __post_init__(self):
        for name in ("t", "k", "v", "m"):
            if not isinstance(getattr(self, name), int):
                raise TypeError(f"{name} must be an int")
        if self.t < 2:
            raise ValueError(f"strength t must be >= 2, got {self.t}")
        if self.v < 2:
            raise ValueError(f"alphabet size v must be >= 2, got {self.v}")
        if self.k < self.t:
            raise ValueError(f"need k >= t, got k={self.k}, t={self.t}")
        if self.m < 1:
            raise ValueError(f"multiplicity m must be >= 1, got {self.m}")

    @property
    def N(self) -> int:
        return self.m * self.v


def is_balanced(col: Sequence[int], v: int, m: int) -> bool:
    if len(col) != m * v:
        return False
    counts = [0] * v
    for a in col:
        if not 0 <= a < v:
            return False
        counts[a] += 1
    return all(c == m for c in counts)


def balanced_column(entries: Sequence[int], v: int, m: int) -> Column:
    """Return ``entries`` as a column tuple, raising if it is not balanced."""
    col = tuple(int(a) for a in entries)
    if not is_balanced(col, v, m):
        raise ValueError(f"column is not balanced for v={v}, m={m}: {col}")
    return col


def balanced_columns(v: int, m: int) -> Iterator[Column]:
    """Yield every balanced column (distinct permutations of the multiset)
    in lexicographic order."""
    n = m * v
    counts = [m] * v
    prefix: list[int] = []

    def rec():
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for a in range(v):
            if counts[a]:
                counts[a] -= 1
                prefix.append(a)
                yield from rec()
                prefix.pop()
                counts[a] += 1

    yield from rec()


@dataclass(frozen=True)
class PartialArray:
    """``k`` column slots, each ``None`` (empty) or a column of ``n_rows``
    symbols.

    Balance is not enforced here: arrays built by the engine are balanced
    by construction, while e.g. juxtaposed arrays need not be.  Use
    :meth:`check_balanced` where it matters.
    """

    t: int
    v: int
    n_rows: int
    slots: tuple[Optional[Column], ...]

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        for idx, col in enumerate(self.slots):
            if col is None:
                continue
            if len(col) != self.n_rows:
                raise ValueError(
                    f"column {idx} has {len(col)} entries, expected {self.n_rows}"
                )
            if any(not 0 <= a < self.v for a in col):
                raise ValueError(f"column {idx} has a symbol outside [0, {self.v})")

    @classmethod
    def empty(cls, params: CAParams) -> "PartialArray":
        return cls(params.t, params.v, params.N, (None,) * params.k)

    @classmethod
    def from_columns(cls, t: int, v: int, columns: Sequence[Optional[Sequence[int]]],
                     n_rows: Optional[int] = None) -> "PartialArray":
        cols = tuple(None if c is None else tuple(c) for c in columns)
        if n_rows is None:
            filled = [c for c in cols if c is not None]
            if not filled:
                raise ValueError("n_rows is required when every slot is empty")
            n_rows = len(filled[0])
        return cls(t, v, n_rows, cols)

    @property
    def k(self) -> int:
        return len(self.slots)

    def empty_slots(self) -> list[int]:
        return [i for i, c in enumerate(self.slots) if c is None]

    def is_full(self) -> bool:
        return all(c is not None for c in self.slots)

    def check_balanced(self) -> None:
        if self.n_rows % self.v:
            raise ValueError(f"N={self.n_rows} is not a multiple of v={self.v}")
        m = self.n_rows // self.v
        for idx, col in enumerate(self.slots):
            if col is not None and not is_balanced(col, self.v, m):
                raise ValueError(f"column {idx} is not balanced")

    def rows(self) -> list[tuple[Optional[int], ...]]:
        return [
            tuple(None if c is None else c[r] for c in self.slots)
            for r in range(self.n_rows)
        ]


def phi(A: PartialArray) -> int:
    """Index of the first empty slot, or -1 when every slot is filled."""
    for i, col in enumerate(A.slots):
        if col is None:
            return i
    return -1


def colex_subsets(n: int, r: int) -> Iterator[tuple[int, ...]]:
    """All r-subsets of ``range(n)`` as ascending tuples, in colex order."""
    if r == 0:
        yield ()
        return
    for last in range(r - 1, n):
        for head in colex_subsets(last, r - 1):
            yield head + (last,)


def tuple_code(row: Sequence[int], v: int) -> int:
    code = 0
    for a in row:
        code = code * v + a
    return code


def decode_tuple(code: int, v: int, t: int) -> tuple[int, ...]:
    out = []
    for _ in range(t):
        code, a = divmod(code, v)
        out.append(a)
    return tuple(reversed(out))


def _occupancy(columns: Sequence[Column], v: int) -> int:
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ValueError("columns have different lengths")
    seen = 0
    for row in zip(*columns):
        seen |= 1 << tuple_code(row, v)
    return seen


def is_a_covering(columns: Sequence[Column], v: int) -> bool:
    """True iff the rows of the subarray contain every tuple of ``V^t``,
    with ``t = len(columns)``."""
    return _occupancy(columns, v) == (1 << v ** len(columns)) - 1


def missing_tuple(columns: Sequence[Column], v: int) -> Optional[tuple[int, ...]]:
    """Smallest (in mixed-radix order) tuple not covered, or None."""
    seen = _occupancy(columns, v)
    full = v ** len(columns)
    missing = ~seen & ((1 << full) - 1)
    if not missing:
        return None
    low = (missing & -missing).bit_length() - 1
    return decode_tuple(low, v, len(columns))


@dataclass
class VerifyReport:
    t: int
    k: int
    v: int
    n_rows: int
    empty_slots: list[int] = field(default_factory=list)
    failures: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.empty_slots and not self.failures

    def summary(self) -> str:
        if self.valid:
            return f"valid CA({self.n_rows};{self.t},{self.k},{self.v})"
        parts = []
        if self.empty_slots:
            parts.append(f"{len(self.empty_slots)} empty column(s)")
        if self.failures:
            parts.append(f"{len(self.failures)} uncovered {self.t}-subset(s)")
        return "not a covering array: " + ", ".join(parts)

    def to_dict(self) -> dict:
        return {
            "t": self.t, "k": self.k, "v": self.v, "N": self.n_rows,
            "valid": self.valid,
            "empty_slots": self.empty_slots,
            "failures": [{"columns": list(tau), "missing": list(miss)}
                         for tau, miss in self.failures],
        }


def verify_ca(A: PartialArray) -> VerifyReport:
    """Check every fully filled t-subset (colex order) and list empty slots."""
    report = VerifyReport(A.t, A.k, A.v, A.n_rows, empty_slots=A.empty_slots())
    for tau in colex_subsets(A.k, A.t):
        cols = [A.slots[i] for i in tau]
        if any(c is None for c in cols):
            continue
        miss = missing_tuple(cols, A.v)
        if miss is not None:
            report.failures.append((tau, miss))
    return report


def multinomial_I_size(m: int, v: int) -> int:
    """Number of balanced columns, ``(mv)! / (m!)^v``."""
    if m < 1 or v < 1:
        raise ValueError("m and v must be positive")
    return math.factorial(m * v) // math.factorial(m) ** v


def noncovering_upper_bound(params: CAParams) -> int:
    """``v^t |I| (v^(t-1) - 1)^m (v^(t-1))^(m(v-1))``, the counting bound
    on non-covering balanced N x t arrays."""
    t, v, m = params.t, params.v, params.m
    return (v**t * multinomial_I_size(m, v) * (v ** (t - 1) - 1) ** m
            * (v ** (t - 1)) ** (m * (v - 1)))


def count_noncovering_arrays(params: CAParams) -> int:
    """Exact number of ``N x t`` arrays of balanced columns that miss some
    tuple of ``V^t``, by brute-force enumeration."""
    t, v, m = params.t, params.v, params.m
    size = multinomial_I_size(m, v)
    if size**t > MAX_ENUMERATION:
        raise EnumerationTooLarge(
            f"|I|^t = {size}^{t} exceeds the enumeration guard {MAX_ENUMERATION}"
        )
    if params.N < v**t:
        # pigeonhole: nothing can cover
        return size**t
    cols = list(balanced_columns(v, m))
    return sum(1 for sub in product(cols, repeat=t) if not is_a_covering(sub, v))


# -- array text format ----------------------------------------------------

def _fmt_symbol(a: int) -> str:
    return str(a)


def format_array(A: PartialArray) -> str:
    lines = [f"ca {A.t} {A.k} {A.v} {A.n_rows}"]
    for row in A.rows():
        lines.append(" ".join("-" if a is None else _fmt_symbol(a) for a in row))
    return "\n".join(lines) + "\n"


def parse_array(text: str) -> PartialArray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("line 1: empty array file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "ca":
        raise ValueError("line 1: expected 'ca <t> <k> <v> <N>'")
    try:
        t, k, v, n = (int(x) for x in head[1:])
    except ValueError:
        raise ValueError("line 1: header fields must be integers") from None
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} rows, found {len(lines) - 1}")
    cells: list[list[Optional[int]]] = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != k:
            raise ValueError(f"line {lineno}: expected {k} entries, found {len(parts)}")
        row = []
        for p in parts:
            if p == "-":
                row.append(None)
                continue
            try:
                a = int(p)
            except ValueError:
                raise ValueError(f"line {lineno}: bad symbol {p!r}") from None
            if not 0 <= a < v:
                raise ValueError(f"line {lineno}: symbol {a} outside [0, {v})")
            row.append(a)
        cells.append(row)
    slots: list[Optional[Column]] = []
    for c in range(k):
        col = [cells[r][c] for r in range(n)]
        if all(a is None for a in col):
            slots.append(None)
        elif any(a is None for a in col):
            raise ValueError(f"column {c} is partially empty")
        else:
            slots.append(tuple(col))  # type: ignore[arg-type]
    return PartialArray(t, v, n, tuple(slots))
