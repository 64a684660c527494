from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowspeed.encoding import index_to_word, word_to_index
from lowspeed.machine import (
    CONST_0,
    DRIFT,
    EMPTY,
    HALT_ALL,
    LOOP,
    ORACLE_BIT,
    PARITY,
    PLANTED,
    SPARSE_PROBE,
    BudgetExceeded,
    Corpus,
    CorpusError,
    FinitePrefix,
    Generated,
    Halt,
    OracleUnresolved,
    Program,
    ProgramError,
    Transition,
    assemble,
    decode_program,
    default_corpus,
    format_corpus,
    format_program,
    padded,
    parse_corpus,
    parse_program,
    run,
    run_plain,
    we_stage,
)
from oracles import naive_run


def _as_tuple(res):
    if isinstance(res, Halt):
        return ("halt", res.bit, res.steps)
    if isinstance(res, OracleUnresolved):
        return ("unresolved", res.query, res.steps)
    return ("budget",)


bitstrings = st.text(alphabet="01", max_size=24)


def test_decode_is_total_and_zero_loops():
    assert decode_program(0) == LOOP
    for e in range(500):
        assert isinstance(decode_program(e), Program)


@pytest.mark.parametrize("name", sorted(PLANTED))
def test_planted_roundtrip(name):
    p = PLANTED[name]
    e = assemble(p)
    assert decode_program(e) == p
    assert parse_program(format_program(p)) == p
    assert decode_program(padded(e, 7)) == p and padded(e, 7) != e


def test_distinct_programs_distinct_codes():
    codes = {assemble(p) for p in PLANTED.values()}
    assert len(codes) == len(PLANTED)
    assert assemble(CONST_0) != assemble(ORACLE_BIT)


def test_assemble_rejects_non_programs():
    with pytest.raises(ProgramError):
        assemble("not a program")
    with pytest.raises(ProgramError):
        Program(1, (Transition(0, "S", "-", 0, 0),))
    with pytest.raises(ProgramError):
        Transition(0, "S", "-", 0, 1)


@pytest.mark.parametrize("bad", ["", "0 0 0 S - H0", "0 0 0 X - H0\n0 1 1 S - H0\n0 _ _ S - H0",
                                 "0 0 0 S ? H0\n0 1 1 S - H0\n0 _ _ S - H0"])
def test_parse_errors(bad):
    with pytest.raises(ProgramError):
        parse_program(bad)


def test_oracle_bit_examples():
    assert run(ORACLE_BIT, FinitePrefix("10"), 1, 100) == Halt(0, 2)
    assert run(ORACLE_BIT, FinitePrefix("1"), 1, 100) == OracleUnresolved(1, 2)
    assert run(ORACLE_BIT, FinitePrefix("01"), 1, 100) == Halt(1, 2)


@given(bitstrings)
def test_oracle_bit_step_count_closed_form(x):
    res = run(ORACLE_BIT, EMPTY, x, 10**6)
    assert res == Halt(0, len(x) + 1)


def test_zero_budget():
    for p in PLANTED.values():
        assert run(p, EMPTY, 5, 0) == BudgetExceeded(0)


def test_run_plain_examples():
    assert run_plain(CONST_0, 9, 100) == Halt(0, 1)
    assert run_plain(LOOP, 9, 1234) == BudgetExceeded(1234)
    assert run_plain(PARITY, "11", 100).bit == 0
    assert run_plain(PARITY, "10", 100).bit == 1


def test_divergence_detection_handles_huge_budgets():
    huge = 8 ** 256
    assert run_plain(LOOP, 3, huge) == BudgetExceeded(huge)
    assert run_plain(DRIFT, 3, huge) == BudgetExceeded(huge)


def test_we_stage():
    assert we_stage(LOOP, 10) == set()
    assert we_stage(HALT_ALL, 3) == {0, 1, 2, 3}
    for s in range(8):
        assert we_stage(PARITY, s) <= we_stage(PARITY, s + 1)


def test_sparse_probe_asks_the_all_zero_word():
    # on input of length m it asks about 0^m
    z = "0" * 4
    assert run(SPARSE_PROBE, Generated(lambda i: i == word_to_index(z)), "1010", 100).bit == 1


@settings(max_examples=150, deadline=None)
@given(e=st.integers(0, 3000), x=bitstrings.filter(lambda s: len(s) <= 8), sigma=st.text(alphabet="01", max_size=40),
       budget=st.integers(0, 60))
def test_matches_literal_interpreter(e, x, sigma, budget):
    p = decode_program(e)
    fast = run(p, FinitePrefix(sigma), x, budget)
    slow = naive_run(p, lambda q: (sigma[q] == "1") if q < len(sigma) else None, x, budget)
    assert _as_tuple(fast) == slow


@settings(max_examples=100, deadline=None)
@given(e=st.integers(0, 2000), x=st.integers(0, 60), budget=st.integers(1, 80), extra=st.integers(0, 500))
def test_budget_monotone(e, x, budget, extra):
    a = run_plain(e, x, budget)
    if a.halted:
        assert run_plain(e, x, budget + extra) == a
    else:
        assert a == BudgetExceeded(budget)


@settings(max_examples=100, deadline=None)
@given(name=st.sampled_from(sorted(PLANTED)), x=st.integers(0, 40), sigma=st.text(alphabet="01", max_size=30),
       tail=st.text(alphabet="01", max_size=30))
def test_prefix_coherence(name, x, sigma, tail):
    p = PLANTED[name]
    a = run(p, FinitePrefix(sigma), x, 200)
    if a.halted:
        assert run(p, FinitePrefix(sigma + tail), x, 200) == a
        z = sigma + tail
        assert run(p, Generated(lambda i: i < len(z) and z[i] == "1"), x, 200) == a


def test_determinism():
    for e in range(200):
        assert run_plain(e, 7, 300) == run_plain(e, 7, 300)


def test_corpus_parsing_and_lookup():
    c = default_corpus()
    assert c.names[0] == "ORACLE_BIT" and c.program(1) == LOOP
    assert c.program(len(c)) is None
    assert parse_corpus(format_corpus(c)) == c
    swept = Corpus.of("CONST_0", sweep=3)
    assert swept.program(1) == decode_program(0) and swept.program(4) is None
    assert swept.index_of("CONST_0") == 0
    with pytest.raises(KeyError):
        swept.index_of("NOPE")


@pytest.mark.parametrize("text", ["0 0 0 S - H0", ".program A\n.program A\n", ".sweep x", ".program A\n0 0 0 Q - H0"])
def test_corpus_errors(text):
    with pytest.raises(CorpusError):
        parse_corpus(text)


def test_index_words_used_as_inputs():
    assert run_plain(PARITY, 6, 100) == run_plain(PARITY, index_to_word(6), 100)
