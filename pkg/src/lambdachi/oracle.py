"""Brute-force recomputation of the tower data for small modules.

Deliberately shares no code with the main pipeline: matrices are plain
lists, kernels come from extended-gcd row reduction (no Smith form, no
pivot-size heuristics), the Norm is summed term by term, and the index of
a lattice in its saturation is the gcd of its maximal minors, each minor a
rational-elimination determinant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd

from .modules import GModule

DEFAULT_RANK_CAP = 8


class OracleRefusal(ValueError):
    """Module too large for the brute-force path."""


class OracleError(RuntimeError):
    """A structural fact the oracle relies on failed to hold."""


def _mul(A, B):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B))) for j in range(len(B[0]) if B else 0)]
            for i in range(len(A))]


def _eye(d):
    return [[int(i == j) for j in range(d)] for i in range(d)]


def _sub(A, B):
    return [[x - y for x, y in zip(a, b)] for a, b in zip(A, B)]


def _transpose(A, ncols):
    return [[A[i][j] for i in range(len(A))] for j in range(ncols)]


def _egcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def row_reduce(rows, ncols):
    """Echelon form E = W·rows with W unimodular, by pairwise Bezout steps.

    Returns ``(E, W, rank)``; rows ``rank..`` of E are zero.
    """
    E = [list(r) for r in rows]
    W = _eye(len(E))
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(E)) if E[i][c]), None)
        if piv is None:
            continue
        E[r], E[piv] = E[piv], E[r]
        W[r], W[piv] = W[piv], W[r]
        for i in range(r + 1, len(E)):
            b = E[i][c]
            if not b:
                continue
            a = E[r][c]
            g, x, y = _egcd(a, b)
            ag, bg = a // g, b // g
            # [[x, y], [b/g, -a/g]] has determinant -1
            E[r], E[i] = ([x * u + y * v for u, v in zip(E[r], E[i])],
                          [bg * u - ag * v for u, v in zip(E[r], E[i])])
            W[r], W[i] = ([x * u + y * v for u, v in zip(W[r], W[i])],
                          [bg * u - ag * v for u, v in zip(W[r], W[i])])
        r += 1
    return E, W, r


def kernel_rows(T):
    """Basis (as row vectors) of the saturated integer kernel of the square matrix T."""
    d = len(T)
    _, W, r = row_reduce(_transpose(T, d), d)
    return W[r:]


def lattice_basis(gens_as_columns, d):
    """Row basis of the lattice spanned by the columns."""
    E, _, r = row_reduce(_transpose(gens_as_columns, len(gens_as_columns[0]) if gens_as_columns else 0), d)
    return E[:r]


def _det(M):
    M = [[Fraction(x) for x in r] for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    assert det.denominator == 1
    return int(det)


def saturation_index(basis_rows, d):
    """[sat(L) : L] as the gcd of the maximal minors of a row basis of L."""
    r = len(basis_rows)
    if r == 0:
        return 1
    g = 0
    for cols in combinations(range(d), r):
        g = gcd(g, _det([[row[c] for c in cols] for row in basis_rows]))
    return g


def _p_val(x, p):
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    if x != 1:
        raise OracleError(f"index has a prime-to-{p} factor {x}")
    return v


def _rank(M, ncols):
    return row_reduce(M, ncols)[2]


def orders(A, p, n, i):
    """(v1, v2) for N_i acting on the lattice with generator matrix A."""
    d = len(A)
    if i == n or d == 0:
        return 0, 0
    B = _eye(d)
    for _ in range(p ** i):
        B = _mul(B, A)
    q = p ** (n - i)
    N = [[0] * d for _ in range(d)]
    P = _eye(d)
    for _ in range(q):
        N = [[x + y for x, y in zip(a, b)] for a, b in zip(N, P)]
        P = _mul(P, B)
    T = _sub(B, _eye(d))
    if any(x for row in _mul(T, N) for x in row) or any(x for row in _mul(N, T) for x in row):
        raise OracleError("Norm·(B-1) is not zero")
    fixed_rank = len(kernel_rows(T))
    norm_kernel_rank = len(kernel_rows(N))
    if fixed_rank != _rank(N, d) or norm_kernel_rank != _rank(T, d):
        raise OracleError("image and kernel ranks do not match")
    # im N sits in the saturated lattice ker T with equal rank, so the
    # index is that of im N in its own saturation; likewise for H^1
    v2 = _p_val(saturation_index(lattice_basis(N, d), d), p)
    v1 = _p_val(saturation_index(lattice_basis(T, d), d), p)
    return v1, v2


def _solve_rational(K, Y):
    """X with K·X = Y for a full-column-rank K, via the normal equations."""
    f = len(K[0])
    Kt = _transpose(K, f)
    G = [[Fraction(x) for x in row] for row in _mul(Kt, K)]
    R = [[Fraction(x) for x in row] for row in _mul(Kt, Y)]
    g = len(R[0])
    for c in range(f):
        piv = next(i for i in range(c, f) if G[i][c])
        G[c], G[piv] = G[piv], G[c]
        R[c], R[piv] = R[piv], R[c]
        inv = 1 / G[c][c]
        G[c] = [x * inv for x in G[c]]
        R[c] = [x * inv for x in R[c]]
        for i in range(f):
            if i != c and G[i][c]:
                fct = G[i][c]
                G[i] = [x - fct * y for x, y in zip(G[i], G[c])]
                R[i] = [x - fct * y for x, y in zip(R[i], R[c])]
    if any(x.denominator != 1 for row in R for x in row):
        raise OracleError("induced action is not integral")
    X = [[int(x) for x in row] for row in R]
    if _mul(K, X) != Y:
        raise OracleError("fixed lattice is not stable")
    return X


def fixed_lattice(A, p, i):
    """(basis as columns, induced action) for the fixed lattice of g^(p^i)."""
    d = len(A)
    B = _eye(d)
    for _ in range(p ** i):
        B = _mul(B, A)
    rows = kernel_rows(_sub(B, _eye(d)))
    if not rows:
        return [], []
    K = _transpose(rows, d)
    return K, _solve_rational(K, _mul(A, K))


@dataclass
class OracleReport:
    agree: bool
    oracle: dict
    pipeline: dict
    mismatches: list = field(default_factory=list)


def brute_force_tower(A, p, n):
    """All cohomology orders and tower quantities, brute force."""
    lam, quotient, layer = [], [], []
    subgroup = [orders(A, p, n, i) for i in range(n)]
    for i in range(n + 1):
        K, X = fixed_lattice(A, p, i)
        lam.append(len(K[0]) if K else 0)
        if i >= 1:
            quotient.append(orders(X, p, i, 0))
            layer.append(orders(X, p, i, i - 1))
    return {
        "lambdas": lam,
        "orders_subgroup": subgroup,
        "orders_quotient": quotient,
        "orders_layer": layer,
        "chi_subgroup": [-(v2 - v1) for v1, v2 in subgroup],
        "chi_quotient": [-(v2 - v1) for v1, v2 in quotient],
        "chi_layer": [-(v2 - v1) for v1, v2 in layer],
    }


def run_oracle(m: GModule, rank_cap: int = DEFAULT_RANK_CAP) -> OracleReport:
    """Brute-force the tower data of ``m`` and diff it against the pipeline."""
    # pipeline imports stay local so the brute-force helpers above never touch them
    from .cohomology import tate_orders
    from .modules import fixed_submodule
    from .towers import analyze_tower

    if m.rank > rank_cap:
        raise OracleRefusal(f"module rank {m.rank} exceeds the oracle cap {rank_cap}")
    if m.finite_blocks:
        raise OracleRefusal("the oracle handles free modules only")
    p, n = m.group.p, m.group.n
    oracle = brute_force_tower(m.action.tolist(), p, n)

    t = analyze_tower(m)
    fixed = [fixed_submodule(m, i) for i in range(n + 1)]

    def vv(o):
        return (o.v1, o.v2)

    pipeline = {
        "lambdas": list(t.lambdas),
        "orders_subgroup": [vv(tate_orders(m, i)) for i in range(n)],
        "orders_quotient": [vv(tate_orders(fixed[i].induced, 0)) for i in range(1, n + 1)],
        "orders_layer": [vv(tate_orders(fixed[i].induced, i - 1)) for i in range(1, n + 1)],
        "chi_subgroup": list(t.chi_subgroup),
        "chi_quotient": list(t.chi_quotient),
        "chi_layer": list(t.chi_layer),
    }
    mismatches = [k for k in oracle if oracle[k] != pipeline[k]]
    return OracleReport(not mismatches, oracle, pipeline, mismatches)
