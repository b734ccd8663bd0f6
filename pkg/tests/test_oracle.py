import pytest
from hypothesis import given, settings

from _strategies import block_specs
from lambdachi import oracle
from lambdachi.modules import BlockSpec, CyclicPGroup, FiniteSpec, build_module


def test_row_reduce_is_unimodular_and_echelon():
    rows = [[4, 6, 2], [6, 9, 3], [2, 3, 5]]
    E, W, r = oracle.row_reduce(rows, 3)
    assert oracle._det(W) in (1, -1)
    assert oracle._mul(W, rows) == E
    assert r == 2


def test_saturation_index_examples():
    assert oracle.saturation_index([[2, 0]], 2) == 2
    assert oracle.saturation_index([[2, 4], [0, 3]], 2) == 6
    assert oracle.saturation_index([[1, 0, 0]], 3) == 1


def test_refuses_large_modules():
    m = build_module(BlockSpec(CyclicPGroup(3, 2), (0, 0, 2)))
    with pytest.raises(oracle.OracleRefusal):
        oracle.run_oracle(m)
    assert oracle.run_oracle(m, rank_cap=12).agree


def test_refuses_finite_blocks():
    m = build_module(BlockSpec(CyclicPGroup(2, 1), (1, 0), (FiniteSpec(1, 1, 0),)))
    with pytest.raises(oracle.OracleRefusal):
        oracle.run_oracle(m)


def test_worked_example_agrees():
    rep = oracle.run_oracle(build_module(BlockSpec(CyclicPGroup(2, 2), (1, 0, 1))))
    assert rep.agree and rep.mismatches == []
    # trivial block contributes (0, n - i), the zeta_4 block (2^i, 0)
    assert rep.oracle["orders_subgroup"] == [(0 + 1, 2 + 0), (0 + 2, 1 + 0)]


@settings(max_examples=40)
@given(block_specs(max_rank=oracle.DEFAULT_RANK_CAP))
def test_oracle_agrees_within_cap(spec):
    rep = oracle.run_oracle(build_module(spec))
    assert rep.agree, rep.mismatches
