"""Decoding an engine output ``(A, record)`` back to its input, and the
record file grammar.

Record file::

    record <t> <k> <v> <N> <seed|explicit>
    S
    B <i_1> ... <i_{t-1}> | <col_1> ... <col_t>

Indices are 0-based and ascending.  A column is its N symbols joined
without separators when v <= 10, comma-separated otherwise; the t
columns are listed in ascending column-index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .core import Column, PartialArray, is_balanced
from .engine import SUCCESS, Backtrack, RecordEntry


class RecordError(ValueError):
    """A record is malformed or inconsistent with an array."""


@dataclass(frozen=True)
class RecordHeader:
    t: int
    k: int
    v: int
    n_rows: int
    source: Union[int, str] = "explicit"

    @property
    def m(self) -> int:
        return self.n_rows // self.v


# -- decoding -------------------------------------------------------------

def _fill_order(k: int, record: Sequence[RecordEntry]) -> list[int]:
    """Column filled at every iteration, with consistency checks.  The
    empty set is tracked as a bitmask."""
    empty = (1 << k) - 1
    order = []
    for j, entry in enumerate(record):
        if not empty:
            raise RecordError(f"entry {j}: array already full, no column to fill")
        i = (empty & -empty).bit_length() - 1
        order.append(i)
        if isinstance(entry, Backtrack):
            bits = 0
            for c in entry.tau_hat:
                if not 0 <= c < k:
                    raise RecordError(f"entry {j}: column index {c} out of range")
                bits |= 1 << c
            if bits & empty:
                raise RecordError(f"entry {j}: back-track names an empty column")
            empty |= bits
        else:
            empty &= ~(1 << i)
    return order


def empty_sets(k: int, record: Sequence[RecordEntry]) -> list[frozenset[int]]:
    """Empty-column sets at the start of every iteration, plus the set
    after the last one (``len(record) + 1`` sets)."""
    order = _fill_order(k, record)
    cur = frozenset(range(k))
    out = [cur]
    for i, entry in zip(order, record):
        if isinstance(entry, Backtrack):
            cur = cur | frozenset(entry.tau_hat)
        else:
            cur = cur - {i}
        out.append(cur)
    return out


def _rank(tau_hat: tuple[int, ...], i: int) -> tuple[tuple[int, ...], int]:
    tau = tuple(sorted(tau_hat + (i,)))
    return tau, tau.index(i)


def _unwind(A: PartialArray, record: Sequence[RecordEntry], on_state=None) -> list[Column]:
    """Walk the record backwards from ``A``; returns the input columns
    and calls ``on_state(j, slots)`` with the array at the start of
    every iteration j (descending)."""
    order = _fill_order(A.k, record)
    cur = list(A.slots)
    inputs: list[Column] = [()] * len(record)
    for j in range(len(record) - 1, -1, -1):
        i, entry = order[j], record[j]
        if isinstance(entry, Backtrack):
            tau, h = _rank(entry.tau_hat, i)
            if len(entry.content) != len(tau):
                raise RecordError(f"entry {j}: expected {len(tau)} columns of content")
            for c in tau:
                if cur[c] is not None:
                    raise RecordError(f"entry {j}: column {c} should be empty after back-track")
            for c, col in zip(tau, entry.content):
                if c != i:
                    cur[c] = col
            inputs[j] = entry.content[h]
        else:
            col = cur[i]
            if col is None:
                raise RecordError(f"entry {j}: success line but column {i} is empty")
            inputs[j] = col
            cur[i] = None
        if on_state is not None:
            on_state(j, cur)
    if any(c is not None for c in cur):
        raise RecordError("record does not lead back to the empty array")
    return inputs


def reconstruct_states(A: PartialArray, record: Sequence[RecordEntry]) -> list[PartialArray]:
    """Arrays at the start of every iteration, forward-indexed; the first
    is the empty array and the last is ``A`` itself."""
    states = [A]
    _unwind(A, record, lambda j, slots: states.append(
        PartialArray(A.t, A.v, A.n_rows, tuple(slots))))
    states.reverse()
    return states


def recover_input(A: PartialArray, record: Sequence[RecordEntry]) -> list[Column]:
    """The unique input column sequence that makes the engine emit
    ``(A, record)``."""
    return _unwind(A, record)


# -- record text ------------------------------------------------------------

def _fmt_col(col: Column, v: int) -> str:
    if v <= 10:
        return "".join(str(a) for a in col)
    return ",".join(str(a) for a in col)


def _parse_col(tok: str, header: RecordHeader, lineno: int) -> Column:
    try:
        if header.v <= 10:
            col = tuple(int(ch) for ch in tok)
        else:
            col = tuple(int(x) for x in tok.split(","))
    except ValueError:
        raise RecordError(f"line {lineno}: bad column {tok!r}") from None
    if len(col) != header.n_rows:
        raise RecordError(f"line {lineno}: column has {len(col)} symbols, expected {header.n_rows}")
    if not is_balanced(col, header.v, header.m):
        raise RecordError(f"line {lineno}: recorded column is not balanced")
    return col


def emit_record(header: RecordHeader, entries: Sequence[RecordEntry]) -> str:
    lines = [f"record {header.t} {header.k} {header.v} {header.n_rows} {header.source}"]
    for e in entries:
        if isinstance(e, Backtrack):
            idx = " ".join(str(c) for c in e.tau_hat)
            cols = " ".join(_fmt_col(c, header.v) for c in e.content)
            lines.append(f"B {idx} | {cols}")
        else:
            lines.append("S")
    return "\n".join(lines) + "\n"


def parse_header(line: str) -> RecordHeader:
    parts = line.split()
    if len(parts) != 6 or parts[0] != "record":
        raise RecordError("line 1: expected 'record <t> <k> <v> <N> <seed|explicit>'")
    try:
        t, k, v, n = (int(x) for x in parts[1:5])
    except ValueError:
        raise RecordError("line 1: t, k, v, N must be integers") from None
    if t < 2 or v < 2 or k < t or n < 1 or n % v:
        raise RecordError("line 1: invalid parameters")
    src: Union[int, str] = parts[5]
    if src != "explicit":
        try:
            src = int(src)
        except ValueError:
            raise RecordError("line 1: source must be an integer seed or 'explicit'") from None
    return RecordHeader(t, k, v, n, src)


def parse_record(text: str) -> tuple[RecordHeader, list[RecordEntry]]:
    if text and not text.endswith("\n"):
        raise RecordError("record must end with a newline")
    lines = text.split("\n")[:-1]
    if not lines:
        raise RecordError("line 1: missing header")
    header = parse_header(lines[0])
    entries: list[RecordEntry] = []
    for lineno, ln in enumerate(lines[1:], start=2):
        if ln == "S":
            entries.append(SUCCESS)
            continue
        if not ln.startswith("B "):
            raise RecordError(f"line {lineno}: expected 'S' or 'B ...'")
        left, sep, right = ln[2:].partition(" | ")
        if not sep:
            raise RecordError(f"line {lineno}: missing ' | ' separator")
        try:
            tau_hat = tuple(int(x) for x in left.split(" "))
        except ValueError:
            raise RecordError(f"line {lineno}: bad column index list") from None
        if len(tau_hat) != header.t - 1:
            raise RecordError(f"line {lineno}: expected {header.t - 1} indices")
        if any(not 0 <= c < header.k for c in tau_hat):
            raise RecordError(f"line {lineno}: column index out of range")
        if any(a >= b for a, b in zip(tau_hat, tau_hat[1:])):
            raise RecordError(f"line {lineno}: indices must be strictly increasing")
        toks = right.split(" ")
        if len(toks) != header.t:
            raise RecordError(f"line {lineno}: expected {header.t} columns")
        content = tuple(_parse_col(tok, header, lineno) for tok in toks)
        entries.append(Backtrack(tau_hat, content))
    return header, entries


def header_for(A: PartialArray, source: Optional[Union[int, str]] = None) -> RecordHeader:
    return RecordHeader(A.t, A.k, A.v, A.n_rows, "explicit" if source is None else source)
