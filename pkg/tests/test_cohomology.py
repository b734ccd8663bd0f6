from itertools import product

import pytest
from hypothesis import given, strategies as st

from _strategies import block_specs
from lambdachi import oracle
from lambdachi.cohomology import (
    CohomologyError,
    CohomologyOrders,
    DualStabilizationError,
    _p_adic_total,
    cyclotomic_chi_closed_form,
    cyclotomic_orders_closed_form,
    dual_euler_char,
    norm_matrix,
    tate_orders,
)
from lambdachi.exact_linalg import IntMatrix
from lambdachi.invariants import prime_filtration, rank_sequence
from lambdachi.modules import (
    BlockSpec,
    CyclicPGroup,
    FiniteBlock,
    FiniteSpec,
    FreePart,
    GModule,
    build_module,
    cyclotomic_block,
    direct_sum,
    finite_block_action,
    phi,
    trivial_module,
)

WORKED = build_module(BlockSpec(CyclicPGroup(2, 2), (1, 0, 1)))


def block_module(p, n, j):
    return GModule(CyclicPGroup(p, n), FreePart(cyclotomic_block(p, j)))


def test_orders_chi():
    o = CohomologyOrders(3, 5)
    assert o.chi == 2
    assert (o + CohomologyOrders(1, 0)).chi == 1


# -- spec examples ---------------------------------------------------------

@pytest.mark.parametrize("p,n", [(2, 0), (2, 3), (5, 1)])
def test_trivial_subgroup_gives_zero(p, n):
    assert tate_orders(trivial_module(CyclicPGroup(p, n), 2), n) == CohomologyOrders(0, 0)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 3), (3, 2), (7, 1)])
def test_trivial_rank_one_full_group(p, n):
    o = tate_orders(trivial_module(CyclicPGroup(p, n)), 0)
    assert (o.v1, o.v2, o.chi) == (0, n, n)


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (5, 1), (2, 3)])
def test_top_block_orders(p, n):
    m = block_module(p, n, n)
    for i in range(n):
        o = tate_orders(m, i)
        assert (o.v1, o.v2, o.chi) == (p ** i, 0, -p ** i)


def test_worked_example_chi_against_oracle():
    A = WORKED.action.tolist()
    for i, expected in ((0, 1), (1, -1)):
        v1, v2 = oracle.orders(A, 2, 2, i)
        assert v2 - v1 == expected
        assert tate_orders(WORKED, i) == CohomologyOrders(v1, v2)
        # rank-sequence count: (n-i)·sum_{t<=i} r_t phi - p^i·sum_{t>i} r_t with r = (1,0,1)
        assert expected == (2 - i) * sum(r * phi(2, t) for t, r in enumerate((1, 0, 1)[:i + 1])) - 2 ** i * sum(
            (1, 0, 1)[i + 1:])


def test_closed_form_examples():
    assert cyclotomic_chi_closed_form(3, 2, 1, 2) == -3
    assert cyclotomic_chi_closed_form(2, 2, 1, 0) == 1
    for p in (2, 3, 5):
        for j in range(4):
            assert cyclotomic_chi_closed_form(p, 3, 3, j) == 0
    with pytest.raises(IndexError):
        cyclotomic_chi_closed_form(2, 2, 3, 0)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_closed_form_matches_oracle(p, n):
    for j in range(n + 1):
        A = cyclotomic_block(p, j).tolist()
        for i in range(n + 1):
            v1, v2 = oracle.orders(A, p, n, i)
            assert cyclotomic_orders_closed_form(p, n, i, j) == CohomologyOrders(v1, v2)


# -- norm -----------------------------------------------------------------

@given(block_specs(max_rank=8, max_n=3))
def test_norm_telescoping_matches_literal_sum(spec):
    m = build_module(spec)
    p, n = spec.group.p, spec.group.n
    d = m.rank
    for i in range(n + 1):
        B = m.action.power(p ** i)
        literal = IntMatrix.zeros(d, d)
        P = IntMatrix.identity(d)
        for _ in range(p ** (n - i)):
            literal = literal + P
            P = P @ B
        assert norm_matrix(B, p, n - i) == literal
        assert norm_matrix(B, p, n - i, 7 ** 3) == literal.mod(7 ** 3)


def test_non_p_divisor_is_an_error():
    with pytest.raises(CohomologyError):
        _p_adic_total((1, 4, 12), 2, "H^2")
    assert _p_adic_total((1, 4, 8), 2, "H^2") == 5


# -- properties -----------------------------------------------------------

@given(block_specs(max_rank=12))
def test_rank_sequence_chi_formula(spec):
    m = build_module(spec)
    p, n = spec.group.p, spec.group.n
    r = rank_sequence(m).r
    for i in range(n + 1):
        expected = (n - i) * sum(r[t] * phi(p, t) for t in range(i + 1)) - p ** i * sum(r[i + 1:])
        assert tate_orders(m, i).chi == expected


@given(block_specs(max_rank=8), st.data())
def test_additivity_on_direct_sums(spec_a, data):
    g = spec_a.group
    spec_b = data.draw(block_specs(primes=(g.p,), min_n=g.n, max_n=g.n, max_rank=8, finite=data.draw(st.booleans())))
    a, b = build_module(spec_a), build_module(spec_b)
    s = direct_sum(a, b)
    for i in range(g.n + 1):
        assert tate_orders(s, i) == tate_orders(a, i) + tate_orders(b, i)


def _enumerated_orders(A: IntMatrix, p: int, n: int, k: int, i: int):
    """Count H^1, H^2 of (Z/p^k)^e by listing every vector."""
    e = A.rows
    mod = p ** k
    B = A.power(p ** i, mod)
    N = norm_matrix(B, p, n - i, mod)
    T = (B - IntMatrix.identity(e)).mod(mod)

    def apply(X, v):
        return tuple(sum(X[r, c] * v[c] for c in range(e)) % mod for r in range(e))

    vecs = list(product(range(mod), repeat=e))
    zero = (0,) * e
    ker_T = sum(1 for v in vecs if apply(T, v) == zero)
    ker_N = sum(1 for v in vecs if apply(N, v) == zero)
    im_T = len({apply(T, v) for v in vecs})
    im_N = len({apply(N, v) for v in vecs})
    h1, h2 = ker_N // im_T, ker_T // im_N
    assert ker_N % im_T == 0 and ker_T % im_N == 0
    log = lambda x: 0 if x == 1 else 1 + log(x // p)  # noqa: E731
    return log(h1), log(h2)


@pytest.mark.parametrize("p,n,k,e", [(2, 2, 2, 2), (2, 1, 3, 2), (3, 1, 2, 2), (3, 2, 1, 3), (5, 1, 1, 2),
                                     (2, 3, 2, 2)])
@pytest.mark.parametrize("seed", range(3))
def test_finite_block_orders_by_enumeration(p, n, k, e, seed):
    A = finite_block_action(p, n, k, e, seed)
    m = GModule(CyclicPGroup(p, n), FreePart(IntMatrix.zeros(0, 0)), (FiniteBlock(k, A),))
    for i in range(n + 1):
        v1, v2 = _enumerated_orders(A, p, n, k, i)
        assert tate_orders(m, i) == CohomologyOrders(v1, v2)
        assert v1 == v2


def test_finite_block_orders_can_be_nonzero():
    # trivial action on Z/4 under a group of order 2: H^1 = H^2 = Z/2
    m = GModule(CyclicPGroup(2, 1), FreePart(IntMatrix.zeros(0, 0)), (FiniteBlock(2, IntMatrix.identity(1)),))
    assert tate_orders(m, 0) == CohomologyOrders(1, 1)


@given(st.sampled_from([2, 3, 5]), st.integers(0, 3), st.lists(
    st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 32)), min_size=1, max_size=3))
def test_finite_only_modules_have_zero_chi(p, n, blocks):
    spec = BlockSpec(CyclicPGroup(p, n), (0,) * (n + 1), tuple(FiniteSpec(*b) for b in blocks))
    m = build_module(spec)
    for i in range(n + 1):
        assert tate_orders(m, i).chi == 0


@given(block_specs(max_rank=12, min_n=1))
def test_short_exact_sequence_additivity(spec):
    m = build_module(spec)
    p, n = spec.group.p, spec.group.n
    step = prime_filtration(m)
    sub = GModule(CyclicPGroup(p, n), step.sub_module.free)  # M' viewed over the whole group
    r_top = step.quotient_rank // phi(p, n)
    assert r_top == spec.multiplicities[n]
    for i in range(n + 1):
        assert tate_orders(m, i).chi == tate_orders(sub, i).chi + r_top * cyclotomic_chi_closed_form(p, n, i, n)


# -- duality --------------------------------------------------------------

@pytest.mark.parametrize("p,n", [(2, 1), (2, 3), (3, 2)])
def test_dual_trivial_module(p, n):
    assert dual_euler_char(trivial_module(CyclicPGroup(p, n)), 0) == -n


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (5, 1)])
def test_dual_top_block(p, n):
    m = block_module(p, n, n)
    for i in range(n):
        assert dual_euler_char(m, i) == p ** i


def test_dual_worked_example():
    assert dual_euler_char(WORKED, 0) == -1
    assert dual_euler_char(WORKED, 1) == 1
    assert dual_euler_char(WORKED, 2) == 0


@given(block_specs(max_rank=8))
def test_dual_flips_sign(spec):
    m = build_module(spec)
    for i in range(spec.group.n + 1):
        assert dual_euler_char(m, i) == -tate_orders(m, i).chi


def test_dual_cap_too_small():
    with pytest.raises(DualStabilizationError):
        dual_euler_char(WORKED, 0, k_cap=8)
