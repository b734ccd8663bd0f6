import json

import pytest
from hypothesis import given, strategies as st

from _strategies import block_specs
from lambdachi import oracle
from lambdachi.cohomology import tate_orders
from lambdachi.exact_linalg import IntMatrix, hermite_basis, saturate
from lambdachi.invariants import rank_sequence
from lambdachi.modules import (
    BlockSpec,
    CyclicPGroup,
    FiniteBlock,
    FiniteSpec,
    FreePart,
    GModule,
    ModuleInvariantError,
    SpecFormatError,
    build_module,
    cyclotomic_block,
    cyclotomic_coefficients,
    direct_sum,
    finite_block_action,
    fixed_submodule,
    is_prime,
    phi,
    restrict_action,
    trivial_module,
    zero_module,
)

WORKED = BlockSpec(CyclicPGroup(2, 2), (1, 0, 1))


def test_group_validation():
    with pytest.raises(ValueError):
        CyclicPGroup(4, 1)
    with pytest.raises(ValueError):
        CyclicPGroup(3, -1)
    g = CyclicPGroup(3, 2)
    assert g.order == 9
    assert g.subgroup_order(1) == 3
    with pytest.raises(IndexError):
        g.check_index(3)


def test_is_prime_and_phi():
    assert [x for x in range(30) if is_prime(x)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert [phi(3, t) for t in range(4)] == [1, 2, 6, 18]


def test_cyclotomic_block_trivial():
    assert cyclotomic_block(3, 0) == IntMatrix([[1]])


def test_cyclotomic_block_order_three():
    C = cyclotomic_block(3, 1)
    assert C.shape == (2, 2)
    # companion of x^2 + x + 1: C^2 + C + I = 0
    assert (C @ C + C + IntMatrix.identity(2)).is_zero()
    assert C.power(3).is_identity()


def test_cyclotomic_block_order_four():
    C = cyclotomic_block(2, 2)
    assert C.power(2) == IntMatrix.identity(2).scale(-1)
    assert C.power(4).is_identity()


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("t", [0, 1, 2, 3])
def test_cyclotomic_block_is_primitive(p, t):
    C = cyclotomic_block(p, t)
    assert C.rows == phi(p, t)
    assert C.power(p ** t).is_identity()
    if t:
        # no smaller power fixes anything: Phi_{p^t}(x) is coprime to x^{p^(t-1)} - 1
        assert (C.power(p ** (t - 1)) - IntMatrix.identity(C.rows)).det() != 0
    coeffs = cyclotomic_coefficients(p, t)
    assert len(coeffs) == phi(p, t) + 1 and coeffs[-1] == 1


def test_gmodule_rejects_bad_action():
    with pytest.raises(ModuleInvariantError):
        GModule(CyclicPGroup(2, 1), FreePart(IntMatrix([[0, -1], [1, 0]])))
    with pytest.raises(ModuleInvariantError):
        GModule(CyclicPGroup(2, 1), FreePart(IntMatrix.identity(1)), (FiniteBlock(2, IntMatrix([[1, 1], [0, 1]])),))


def test_build_trivial_and_zero():
    m = build_module(BlockSpec(CyclicPGroup(3, 2), (1, 0, 0)))
    assert m.action == IntMatrix([[1]])
    z = build_module(BlockSpec(CyclicPGroup(3, 2), (0, 0, 0)))
    assert z.rank == 0 and z.is_free


def test_build_worked_example():
    m = build_module(WORKED)
    assert m.action == IntMatrix([[1, 0, 0], [0, 0, -1], [0, 1, 0]])


def test_spec_validation():
    with pytest.raises(ModuleInvariantError):
        BlockSpec(CyclicPGroup(2, 2), (1, 0))
    with pytest.raises(ModuleInvariantError):
        BlockSpec(CyclicPGroup(2, 1), (1, -1))


def test_fixed_submodule_trivial_action():
    m = trivial_module(CyclicPGroup(5, 2), 3)
    for i in range(3):
        f = fixed_submodule(m, i)
        assert f.basis.cols == 3
        assert f.induced.action.is_identity()


def test_fixed_submodule_top_block_vanishes_below_top():
    p, n = 3, 2
    m = build_module(BlockSpec(CyclicPGroup(p, n), (0, 0, 1)))
    assert [fixed_submodule(m, i).basis.cols for i in range(n + 1)] == [0, 0, phi(p, n)]


def test_fixed_submodule_worked_example():
    m = build_module(WORKED)
    ranks = [fixed_submodule(m, i).basis.cols for i in range(3)]
    # independent route: kernels from Bezout-only row reduction of A^(2^i) - I
    expected = []
    for i in range(3):
        K, _ = oracle.fixed_lattice(m.action.tolist(), 2, i)
        expected.append(len(K[0]) if K else 0)
    assert ranks == expected == [1, 1, 3]


def test_fixed_submodule_index_error():
    with pytest.raises(IndexError):
        fixed_submodule(build_module(WORKED), 3)


def test_restrict_action():
    m = build_module(WORKED)
    assert restrict_action(m, 0) == m
    r1 = restrict_action(m, 1)
    assert r1.group == CyclicPGroup(2, 1)
    assert r1.action == IntMatrix.diag([1, -1, -1])
    r2 = restrict_action(m, 2)
    assert r2.group.n == 0 and r2.rank == 3


def test_direct_sum_basics():
    g = CyclicPGroup(2, 2)
    a = build_module(WORKED)
    assert direct_sum(a, zero_module(g)) == a
    b = trivial_module(g, 2)
    assert direct_sum(a, b).rank == 5
    with pytest.raises(ModuleInvariantError):
        direct_sum(a, trivial_module(CyclicPGroup(3, 2)))


def test_direct_sum_chi_worked_split():
    g = CyclicPGroup(2, 2)
    triv = build_module(BlockSpec(g, (1, 0, 0)))
    top = build_module(BlockSpec(g, (0, 0, 1)))
    whole = direct_sum(triv, top)
    for i in range(3):
        v1, v2 = oracle.orders(whole.action.tolist(), 2, 2, i)
        assert tate_orders(whole, i).chi == v2 - v1 == tate_orders(triv, i).chi + tate_orders(top, i).chi


@pytest.mark.parametrize("p,n,k,e", [(2, 2, 3, 3), (3, 1, 2, 2), (5, 2, 1, 3), (7, 1, 2, 1)])
@pytest.mark.parametrize("seed", range(4))
def test_finite_block_action_order(p, n, k, e, seed):
    A = finite_block_action(p, n, k, e, seed)
    assert A.power(p ** n, p ** k).is_identity()
    assert finite_block_action(p, n, k, e, seed) == A


@given(block_specs(max_rank=12))
def test_fixed_ranks_match_spec(spec):
    m = build_module(spec)
    p = spec.group.p
    assert m.action.power(spec.group.order).is_identity()
    for i in range(spec.group.n + 1):
        f = fixed_submodule(m, i)
        assert f.basis.cols == sum(r * phi(p, t) for t, r in enumerate(spec.multiplicities[:i + 1]))
        if f.basis.cols:
            assert hermite_basis(saturate(f.basis, m.rank)) == hermite_basis(f.basis)
            assert (m.action @ f.basis) == (f.basis @ f.induced.action)


@given(block_specs(max_rank=10, conjugate=False), st.integers(0, 2 ** 32), st.integers(1, 4))
def test_conjugation_invariance(spec, seed, bound):
    plain = build_module(spec)
    conj = build_module(BlockSpec(spec.group, spec.multiplicities, (), seed, bound))
    assert rank_sequence(plain) == rank_sequence(conj)
    for i in range(spec.group.n + 1):
        assert tate_orders(plain, i) == tate_orders(conj, i)


@given(block_specs(max_rank=10, finite=True))
def test_spec_json_roundtrip(spec):
    doc = json.loads(json.dumps(spec.to_json()))
    assert BlockSpec.from_json(doc) == spec
    assert all(isinstance(v, str) for v in doc["multiplicities"])


def test_spec_json_accepts_plain_ints_and_defaults():
    spec = BlockSpec.from_json({"p": 2, "n": 1, "multiplicities": [1, 2]})
    assert spec == BlockSpec(CyclicPGroup(2, 1), (1, 2))
    big = BlockSpec.from_json({"p": "3", "n": "0", "multiplicities": ["1"], "conjugator_seed": str(2 ** 80)})
    assert big.conjugator_seed == 2 ** 80


@pytest.mark.parametrize("doc,field", [
    ([], "<root>"),
    ({"n": 1, "multiplicities": [1, 1]}, "p"),
    ({"p": 2, "n": 1, "multiplicities": "11"}, "multiplicities"),
    ({"p": 2, "n": 1, "multiplicities": [1, "x"]}, "multiplicities[1]"),
    ({"p": 2, "n": 1, "multiplicities": [1, 1], "finite_specs": [{"k": 1, "e": 1}]}, "finite_specs[0].seed"),
    ({"p": True, "n": 1, "multiplicities": [1, 1]}, "p"),
])
def test_spec_json_errors_name_field(doc, field):
    with pytest.raises(SpecFormatError) as info:
        BlockSpec.from_json(doc)
    assert info.value.field == field


def test_finite_spec_builds_blocks():
    spec = BlockSpec(CyclicPGroup(3, 2), (1, 0, 0), (FiniteSpec(2, 3, 11),))
    m = build_module(spec)
    assert len(m.finite_blocks) == 1
    assert m.finite_blocks[0].size == 3 and m.finite_blocks[0].k == 2
    assert not m.is_free
    assert m.rank == 1
