"""Entropy-compression constructor with an invertible execution record.

The constructor fills the first empty column with the next input column,
then looks for an uncovered t-subset through that column.  The first one
found (colex order of the other t-1 indices) is wiped and logged as a
back-track line; otherwise a success line is logged.

Random input columns come from numpy's PCG64 generator seeded with the
run seed; each column is a Fisher-Yates shuffle (``Generator.permuted``)
of the sorted multiset with m copies of every symbol, drawn in blocks of
:data:`BLOCK` columns.  Column j therefore depends only on the seed, not
on the budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .core import CAParams, Column, PartialArray, colex_subsets, verify_ca

BLOCK = 256


class InputExhausted(RuntimeError):
    """The input ran out before the iteration budget was used up."""


@dataclass(frozen=True)
class Success:
    def __repr__(self):
        return "S"


SUCCESS = Success()


@dataclass(frozen=True)
class Backtrack:
    tau_hat: tuple[int, ...]
    content: tuple[Column, ...]


RecordEntry = Union[Success, Backtrack]


class InputStream:
    """A budgeted source of balanced columns.

    ``source`` is either an explicit sequence of columns or a seed for
    the PCG64 column generator.
    """

    def __init__(self, params: CAParams, budget: int,
                 columns: Optional[Sequence[Sequence[int]]] = None,
                 seed: Optional[int] = None):
        if (columns is None) == (seed is None):
            raise ValueError("give exactly one of columns or seed")
        if budget < 0:
            raise ValueError("budget must be non-negative")
        self.params = params
        self.budget = budget
        self.seed = seed
        self._columns = None if columns is None else [tuple(c) for c in columns]

    @classmethod
    def explicit(cls, params: CAParams, columns: Sequence[Sequence[int]],
                 budget: Optional[int] = None) -> "InputStream":
        return cls(params, len(columns) if budget is None else budget, columns=columns)

    @classmethod
    def seeded(cls, params: CAParams, seed: int, budget: int) -> "InputStream":
        return cls(params, budget, seed=seed)

    @property
    def label(self) -> str:
        return "explicit" if self.seed is None else str(self.seed)

    def __iter__(self) -> Iterator[Column]:
        if self._columns is not None:
            p = self.params
            ref = tuple(a for a in range(p.v) for _ in range(p.m))
            for j, col in enumerate(self._columns):
                if tuple(sorted(col)) != ref:
                    raise ValueError(f"input column {j} is not balanced: {col}")
                yield col
            return
        yield from random_columns(self.params, self.seed)


def random_columns(params: CAParams, seed: int) -> Iterator[Column]:
    rng = np.random.Generator(np.random.PCG64(seed))
    base = np.tile(np.repeat(np.arange(params.v, dtype=np.int64), params.m), (BLOCK, 1))
    while True:
        for row in rng.permuted(base, axis=1).tolist():
            yield tuple(row)


@dataclass
class RunResult:
    array: PartialArray
    record: list[RecordEntry]
    seed: Optional[int] = None
    states: Optional[list[PartialArray]] = None

    @property
    def iterations_used(self) -> int:
        return len(self.record)

    @property
    def success(self) -> bool:
        return self.array.is_full()


def _colex(seq: Sequence[int], r: int) -> Iterator[tuple[int, ...]]:
    """r-subsets of the ascending sequence ``seq`` in colex order."""
    if r == 1:
        for a in seq:
            yield (a,)
    elif r == 2:
        for bi, b in enumerate(seq):
            for a in seq[:bi]:
                yield (a, b)
    else:
        for sub in colex_subsets(len(seq), r):
            yield tuple(seq[j] for j in sub)


def run(params: CAParams, stream: InputStream, *, keep_states: bool = False,
        check_invariant: bool = False) -> RunResult:
    """Run the constructor for at most ``stream.budget`` iterations.

    ``keep_states`` stores the array at the start of every iteration plus
    the final one; ``check_invariant`` re-verifies the covering property
    of all filled t-subsets after each iteration (slow).
    """
    t, k, v = params.t, params.k, params.v
    full = v**t
    coverable = params.N >= full
    slots: list[Optional[Column]] = [None] * k
    record: list[RecordEntry] = []
    states: Optional[list[PartialArray]] = [] if keep_states else None
    source = iter(stream)

    for _ in range(stream.budget):
        try:
            i = slots.index(None)
        except ValueError:
            break
        if states is not None:
            states.append(PartialArray(t, v, params.N, tuple(slots)))
        try:
            slots[i] = next(source)
        except StopIteration:
            raise InputExhausted(
                f"input ended after {len(record)} columns, budget is {stream.budget}"
            ) from None
        # colex order restricted to the filled columns equals the colex
        # order over all other columns with empty ones skipped
        filled = [c for c in range(k) if c != i and slots[c] is not None]
        for tau_hat in _colex(filled, t - 1):
            tau = tuple(sorted(tau_hat + (i,)))
            cols = tuple(slots[c] for c in tau)
            if not coverable or len(set(zip(*cols))) != full:
                record.append(Backtrack(tau_hat, cols))  # type: ignore[arg-type]
                for c in tau:
                    slots[c] = None
                break
        else:
            record.append(SUCCESS)
        if check_invariant:
            _assert_filled_subsets_cover(PartialArray(t, v, params.N, tuple(slots)))

    array = PartialArray(t, v, params.N, tuple(slots))
    if states is not None:
        states.append(array)
    result = RunResult(array, record, stream.seed, states)
    if result.success:
        _assert_filled_subsets_cover(array)
    return result


def _assert_filled_subsets_cover(A: PartialArray) -> None:
    report = verify_ca(A)
    if report.failures:
        raise AssertionError(f"covering invariant broken: {report.failures[:3]}")


def run_until_success(params: CAParams, seed: int, max_iterations: int) -> RunResult:
    return run(params, InputStream.seeded(params, seed, max_iterations))


def iteration_trace(result: RunResult) -> list[tuple[int, bool]]:
    """(number of empty columns at the start of the iteration, back-tracked?)
    for every recorded iteration."""
    t, k = result.array.t, result.array.k
    empty = k
    out = []
    for entry in result.record:
        bt = isinstance(entry, Backtrack)
        out.append((empty, bt))
        empty += t - 1 if bt else -1
    return out

