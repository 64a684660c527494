from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lowspeed.sparse import (
    SparsePrefix,
    count_sparse_prefixes,
    enumerate_sparse_prefixes,
    is_position_sparse,
    is_sparse_prefix,
    sparse_extension_rule,
    sparse_oracle_from_G,
    sparse_positions,
)
from oracles import sparse_strings


@pytest.mark.parametrize("t,expected", [(0, []), (1, []), (2, [1]), (4, [1, 3]), (16, [1, 3, 15]),
                                        (256, [1, 3, 15, 255])])
def test_sparse_positions(t, expected):
    assert sparse_positions(t) == expected


def test_is_sparse_prefix_examples():
    assert is_sparse_prefix("")
    assert is_sparse_prefix("0100")
    assert not is_sparse_prefix("1")
    assert not is_sparse_prefix("0010")


def test_enumeration_examples():
    assert [p.bits for p in enumerate_sparse_prefixes(4)] == ["0000", "0001", "0100", "0101"]
    assert [p.bits for p in enumerate_sparse_prefixes(1)] == ["0"]
    assert [p.bits for p in enumerate_sparse_prefixes(0)] == [""]


def test_enumeration_matches_brute_force():
    for t in range(17):
        assert [p.bits for p in enumerate_sparse_prefixes(t)] == sparse_strings(t)
    for base in ["", "0", "01", "0101", "0001000"]:
        for t in range(len(base), 17):
            assert [p.bits for p in enumerate_sparse_prefixes(t, base)] == sparse_strings(t, base)


def test_base_errors():
    with pytest.raises(ValueError):
        enumerate_sparse_prefixes(2, "0100")
    with pytest.raises(ValueError):
        enumerate_sparse_prefixes(5, "1")
    with pytest.raises(ValueError):
        SparsePrefix(4, frozenset({2}))


@given(st.integers(0, 1 << 40))
def test_cardinality_bound(t):
    n = count_sparse_prefixes(t)
    assert n == 2 ** len(sparse_positions(t)) and n <= max(1, t)


@given(st.integers(0, 1 << 20))
def test_position_test_agrees_with_list(p):
    assert is_position_sparse(p) == (p in sparse_positions(p + 1))


@given(st.integers(0, 40).flatmap(lambda t: st.tuples(st.just(t), st.integers(0, t))))
def test_prefix_closure(tk):
    t, k = tk
    for p in enumerate_sparse_prefixes(t):
        assert is_sparse_prefix(p.bits[:k])


def test_prefix_view_and_extension():
    p = SparsePrefix.from_bits("0101")
    assert p.query(1) and not p.query(2) and p.query(4) is None
    q = p.extend_zero()
    assert q.extends(p) and not p.extends(q) and str(q) == "01010"
    huge = SparsePrefix(10**12, frozenset({1, 65535}))
    assert huge.query(65535) and huge.query(10**12) is None


def test_S_G():
    assert not any(sparse_oracle_from_G(set()).query(i) for i in range(300))
    g01 = sparse_oracle_from_G({0, 1})
    assert [i for i in range(300) if g01.query(i)] == [1, 3]
    evens = sparse_oracle_from_G(lambda n: n % 2 == 0)
    assert evens.query(15) and not evens.query(3) and evens.query(1)


def test_extension_rule_respects_base():
    base = SparsePrefix.from_bits("0001")
    view = sparse_extension_rule(base, lambda n: True)
    assert not view.query(1) and view.query(3) and view.query(15)
