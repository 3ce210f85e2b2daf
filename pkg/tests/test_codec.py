import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from entca.codec import (RecordError, RecordHeader, _rank, emit_record, empty_sets,
                         header_for, parse_header, parse_record, reconstruct_states,
                         recover_input)
from entca.core import CAParams, PartialArray, balanced_columns
from entca.engine import SUCCESS, Backtrack, InputStream, run

P = CAParams(2, 2, 2, 2)
HAND = [(0, 1, 0, 1), (0, 1, 0, 1), (0, 1, 1, 0), (0, 0, 1, 1)]


def test_empty_sets_hand_example():
    res = run(P, InputStream.explicit(P, HAND[:3]))
    sets = empty_sets(2, res.record)
    assert sets == [frozenset({0, 1}), frozenset({1}), frozenset({0, 1}), frozenset({1})]


def test_empty_sets_zero_iterations():
    assert empty_sets(4, []) == [frozenset(range(4))]


def test_rank_of_filled_column():
    assert _rank((2, 7), 4) == ((2, 4, 7), 1)


def test_states_match_engine_snapshots():
    res = run(P, InputStream.explicit(P, HAND), keep_states=True)
    assert reconstruct_states(res.array, res.record) == res.states
    assert recover_input(res.array, res.record) == HAND


def test_single_iteration():
    p = CAParams(2, 3, 2, 2)
    res = run(p, InputStream.explicit(p, [(1, 0, 0, 1)]))
    assert res.record == [SUCCESS]
    assert recover_input(res.array, res.record) == [(1, 0, 0, 1)]
    states = reconstruct_states(res.array, res.record)
    assert states[0] == PartialArray.empty(p) and states[1] == res.array


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3), (3, 3, 2)]),
       st.integers(0, 5), st.integers(0, 400), st.integers(0, 2**32 - 1))
def test_round_trip(tvm, extra_k, budget, seed):
    t, v, m = tvm
    p = CAParams(t, t + extra_k, v, m)
    stream = InputStream.seeded(p, seed, budget)
    res = run(p, stream, keep_states=True)
    n = len(res.record)
    assert recover_input(res.array, res.record) == list(itertools.islice(iter(stream), n))
    assert reconstruct_states(res.array, res.record) == res.states
    # the text form decodes to the same record
    text = emit_record(header_for(res.array, seed), res.record)
    header, parsed = parse_record(text)
    assert parsed == res.record and header.source == seed


@pytest.mark.parametrize("p,length", [(CAParams(2, 2, 2, 1), 7), (CAParams(2, 3, 2, 2), 4),
                                      (CAParams(3, 3, 2, 2), 4)])
def test_output_determines_input(p, length):
    # every input sequence of the given length yields a distinct (A, record)
    cols = list(balanced_columns(p.v, p.m))
    seen = {}
    for seq in itertools.product(cols, repeat=length):
        res = run(p, InputStream.explicit(p, list(seq)))
        key = (res.array, tuple(res.record))
        if len(res.record) < length:
            continue  # finished early; the tail of seq was never read
        assert key not in seen, "two inputs give the same output"
        seen[key] = seq
        assert tuple(recover_input(res.array, res.record)) == seq
    assert seen


def test_emit_parse_fuzz():
    rnd = random.Random(2024)
    for _ in range(100):
        t = rnd.choice([2, 3, 4])
        v = rnd.choice([2, 3, 5, 11, 12])
        m = rnd.randint(1, 3)
        p = CAParams(t, t + rnd.randint(0, 4), v, m)
        res = run(p, InputStream.seeded(p, rnd.randrange(2**31), rnd.randint(0, 60)))
        text = emit_record(header_for(res.array, "explicit"), res.record)
        header, entries = parse_record(text)
        assert entries == res.record
        assert emit_record(header, entries) == text


def test_column_format_above_ten_symbols():
    h = RecordHeader(2, 3, 11, 11)
    col = tuple(range(11))
    text = emit_record(h, [Backtrack((0,), (col, col[::-1]))])
    assert "0,1,2,3" in text
    assert parse_record(text)[1][0].content == (col, col[::-1])


@pytest.mark.parametrize("line", ["", "record 2 3 2", "rec 2 3 2 4 1", "record 2 3 2 5 1",
                                  "record 1 3 2 4 1", "record 2 3 2 4 seven", "record x 3 2 4 1"])
def test_header_errors(line):
    with pytest.raises(RecordError, match="line 1"):
        parse_header(line)


@pytest.mark.parametrize("body", [
    "X\n",                      # unknown line
    "B 0 0101 0101\n",          # missing separator
    "B 0 1 | 0101 0101\n",      # too many indices
    "B 5 | 0101 0101\n",        # index out of range
    "B 0 | 0101\n",             # too few columns
    "B 0 | 0111 0101\n",        # unbalanced column
    "B 0 | 010 0101\n",         # wrong length
    "B a | 0101 0101\n",        # non-integer index
])
def test_body_errors(body):
    with pytest.raises(RecordError, match="line 2"):
        parse_record("record 2 3 2 4 explicit\n" + body)


def test_indices_must_increase():
    with pytest.raises(RecordError):
        parse_record("record 3 4 2 4 1\nB 2 1 | 0101 0101 0101\n")


def test_missing_trailing_newline():
    with pytest.raises(RecordError):
        parse_record("record 2 2 2 4 1\nS")


def test_tampered_record_detected():
    res = run(P, InputStream.explicit(P, HAND))
    bad = list(res.record)
    bad[-1] = Backtrack((0,), (HAND[2], HAND[3]))
    with pytest.raises(RecordError):
        recover_input(res.array, bad)
    with pytest.raises(RecordError):
        recover_input(res.array, res.record + [SUCCESS])


def test_wrong_array_detected():
    res = run(P, InputStream.explicit(P, HAND))
    with pytest.raises(RecordError):
        recover_input(PartialArray(2, 2, 4, (HAND[2], None)), res.record)
