from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowspeed.encoding import unpair
from lowspeed.finite_extension import (
    DIAGONAL_FOUND,
    FALLBACK_BUDGET,
    FALLBACK_NO_WITNESS,
    FEState,
    diagonal_search,
    fe_run,
    fe_stage,
    psi_simulate,
    query_horizon,
    replay_check,
)
from lowspeed.machine import (
    CONST_0,
    CONST_1,
    LOOP,
    ORACLE_BIT,
    PLANTED,
    Corpus,
    Generated,
    default_corpus,
    run,
)
from lowspeed.sparse import SparsePrefix, enumerate_sparse_prefixes, sparse_extension_rule
from oracles import fe_search_brute


def test_oracle_bit_against_const_0():
    w, _ = diagonal_search(ORACLE_BIT, CONST_0, SparsePrefix(0), 20)
    assert w.tau.bits == "01" and w.n == 1 and (w.value_phi, w.value_r) == (1, 0)
    assert fe_search_brute(ORACLE_BIT, CONST_0, "", 20) == ("01", 1, 1, 0)


def test_loop_never_diagonalises():
    c = Corpus.of("LOOP", "CONST_0")
    st1 = fe_stage(FEState(), 30, c)
    assert st1.log[0].outcome == FALLBACK_BUDGET and st1.sigma.bits == "0"
    assert diagonal_search(CONST_0, LOOP, SparsePrefix(0), 30)[0] is None


def test_outside_corpus_is_no_witness():
    st1 = fe_stage(FEState(), 5, Corpus())
    assert st1.log[0].outcome == FALLBACK_NO_WITNESS and st1.sigma.length == 1


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        fe_stage(FEState(), 0, default_corpus())


def test_stage_pairs_follow_unpair():
    state = fe_run(10, 8, default_corpus())
    assert [(r.e, r.i) for r in state.log] == [unpair(s) for s in range(10)]


def test_zero_stages():
    assert fe_run(0, 10, default_corpus()).sigma.bits == ""


@pytest.mark.parametrize("budget", [1, 4, 8, 12])
def test_stages_agree_with_brute_force(budget):
    c = default_corpus()
    state = FEState()
    for _ in range(12):
        e, i = unpair(state.stage)
        expected = fe_search_brute(c.program(e), c.program(i), state.sigma.bits, budget)
        state = fe_stage(state, budget, c)
        rec = state.log[-1]
        if expected is None:
            assert rec.outcome == FALLBACK_BUDGET
        else:
            w = rec.witness
            assert (w.tau.bits, w.n, w.value_phi, w.value_r) == expected


@pytest.mark.parametrize("budget", [16, 64])
def test_chain_and_replay(budget):
    state = fe_run(16, budget, default_corpus())
    assert replay_check(state, default_corpus()) == []
    assert state.sigma.length >= 16
    sig = state.sigmas()
    assert all(b.extends(a) and b.length > a.length for a, b in zip(sig, sig[1:]))


def test_psi_examples():
    r = psi_simulate(ORACLE_BIT, "01", 1, 20)
    assert r.value == 1
    assert psi_simulate(CONST_0, "", 9, 20).value == 0
    loop = psi_simulate(LOOP, "", 3, 10)
    assert not loop.found and loop.psi_steps > 0


def test_query_horizon():
    assert [query_horizon(t) for t in range(1, 5)] == [1, 3, 7, 15]


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(sorted(PLANTED)), n=st.integers(0, 30), g=st.sets(st.integers(0, 5)),
       base_pick=st.integers(0, 3))
def test_psi_agrees_with_every_sparse_extension(name, n, g, base_pick):
    """Psi's answer matches Phi^Z for Z in the sparse class whenever the candidates all agree."""
    base = enumerate_sparse_prefixes(4)[base_pick]
    machine = PLANTED[name]
    res = psi_simulate(machine, base, n, 12)
    z = sparse_extension_rule(base, lambda k: k in g)
    direct = run(machine, z, n, 12)
    if direct.halted:
        assert res.found and res.phi_steps <= direct.steps
    if res.found:
        winner_view = Generated(lambda i, w=res.winner: w.query(i) or False)
        assert run(machine, winner_view, n, res.phi_steps).bit == res.value


def test_psi_prefers_const_regardless_of_base():
    for base in ["", "0", "01", "0101"]:
        r = psi_simulate(CONST_1, base, 4, 5)
        assert r.value == 1 and r.phi_steps == 1 and r.stage == 1
