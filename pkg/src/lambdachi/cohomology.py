"""Tate cohomology orders and Euler characteristics for cyclic p-groups.

For N_i = <B> with B = g^(p^i) of order q = p^(n-i):

    H^1 = ker(Norm) / im(B - 1)        H^2 = ker(B - 1) / im(Norm)

and chi = ord_p|H^2| - ord_p|H^1|.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_linalg import (
    IntMatrix,
    kernel_basis,
    local_elementary_valuations,
    sublattice_index_divisors,
    unimodular_inverse,
    valuation,
)
from .modules import GModule, phi


class CohomologyError(RuntimeError):
    """A cohomology quotient came out with a divisor that is not a power of p."""


class DualStabilizationError(RuntimeError):
    """The finite-level dual computation did not settle below the k cap."""


@dataclass(frozen=True)
class CohomologyOrders:
    v1: int
    v2: int

    @property
    def chi(self) -> int:
        return self.v2 - self.v1

    def __add__(self, other: CohomologyOrders) -> CohomologyOrders:
        return CohomologyOrders(self.v1 + other.v1, self.v2 + other.v2)


ZERO_ORDERS = CohomologyOrders(0, 0)


def norm_matrix(B: IntMatrix, p: int, a: int, modulus: int | None = None) -> IntMatrix:
    """I + B + ... + B^(p^a - 1), via Norm_{p^(s+1)} = Norm_{p^s}·(I + C + ... + C^(p-1)), C = B^(p^s)."""
    d = B.rows
    ident = IntMatrix.identity(d)
    N = ident
    C = B if modulus is None else B.mod(modulus)
    for _ in range(a):
        S = ident
        P = ident
        for _ in range(p - 1):
            P = P @ C
            if modulus is not None:
                P = P.mod(modulus)
            S = S + P
        N = N @ S
        C = P @ C
        if modulus is not None:
            N = N.mod(modulus)
            C = C.mod(modulus)
    return N


def _p_adic_total(divisors: tuple[int, ...], p: int, what: str) -> int:
    total = 0
    for s in divisors:
        v = valuation(s, p)
        if s != p ** v:
            raise CohomologyError(f"{what}: elementary divisor {s} is not a power of {p}")
        total += v
    return total


def _free_orders(B: IntMatrix, p: int, a: int) -> CohomologyOrders:
    d = B.rows
    if d == 0:
        return ZERO_ORDERS
    T = B - IntMatrix.identity(d)
    N = norm_matrix(B, p, a)
    v2 = _p_adic_total(sublattice_index_divisors(N, kernel_basis(T)), p, "H^2")
    v1 = _p_adic_total(sublattice_index_divisors(T, kernel_basis(N)), p, "H^1")
    return CohomologyOrders(v1, v2)


def _kernel_order(X: IntMatrix, p: int, k: int) -> int:
    """ord_p |ker X| on (Z/p^k)^e."""
    return sum(local_elementary_valuations(X, p, k))


def _finite_orders(B: IntMatrix, p: int, a: int, k: int) -> CohomologyOrders:
    e = B.rows
    if e == 0:
        return ZERO_ORDERS
    mod = p ** k
    T = (B - IntMatrix.identity(e)).mod(mod)
    N = norm_matrix(B, p, a, mod)
    ker_T, ker_N = _kernel_order(T, p, k), _kernel_order(N, p, k)
    # |im X| = p^(ke) / |ker X|
    v1 = ker_N - (k * e - ker_T)
    v2 = ker_T - (k * e - ker_N)
    return CohomologyOrders(v1, v2)


def tate_orders(m: GModule, i: int) -> CohomologyOrders:
    """ord_p of |H^1(N_i, M)| and |H^2(N_i, M)|, free part plus finite blocks."""
    g = m.group
    g.check_index(i)
    if i == g.n:
        return ZERO_ORDERS
    p, a = g.p, g.n - i
    e = p ** i
    total = _free_orders(m.action.power(e), p, a)
    for b in m.finite_blocks:
        total = total + _finite_orders(b.action.power(e, p ** b.k), p, a, b.k)
    return total


def cyclotomic_chi_closed_form(p: int, n: int, i: int, j: int) -> int:
    """chi(N_i, Z_p[zeta_{p^j}]) for G = Z/(p^n)."""
    return cyclotomic_orders_closed_form(p, n, i, j).chi


def cyclotomic_orders_closed_form(p: int, n: int, i: int, j: int) -> CohomologyOrders:
    if not (0 <= i <= n and 0 <= j <= n):
        raise IndexError(f"need 0 <= i, j <= n, got i={i}, j={j}, n={n}")
    if j <= i:
        # N_i acts trivially: H^1 = 0, H^2 = M / p^(n-i) M
        return CohomologyOrders(0, (n - i) * phi(p, j))
    # H^2 = 0, H^1 = Z_p[zeta]/(zeta^(p^i) - 1) of order p^(p^i)
    return CohomologyOrders(p ** i, 0)


DEFAULT_K_CAP = 64


def _dual_level_chi(Bstar: IntMatrix, p: int, a: int, k: int) -> int:
    """chi of M* read off its p^k-torsion, correcting for the divisible parts."""
    mod = p ** k
    d = Bstar.rows
    T = (Bstar - IntMatrix.identity(d)).mod(mod)
    N = norm_matrix(Bstar, p, a, mod)
    vt = local_elementary_valuations(T, p, k)
    vn = local_elementary_valuations(N, p, k)
    # divisible rank seen at level k: divisors not yet swallowed by p^k
    rank_t = sum(1 for v in vt if v < k)
    rank_n = sum(1 for v in vn if v < k)
    h2 = sum(vt) - k * rank_n
    h1 = sum(vn) - k * rank_t
    return h2 - h1


def dual_euler_char(m: GModule, i: int, k_cap: int = DEFAULT_K_CAP) -> int:
    """chi(N_i, M*) for the p-Pontryagin dual of the free part of m.

    Works on (Z/p^k)^d with the contragredient action for k = n+2, 2(n+2),
    ... and returns once two consecutive doublings leave the value
    unchanged.  Finite blocks are ignored (their chi is 0 either way).
    """
    g = m.group
    g.check_index(i)
    if i == g.n or m.rank == 0:
        return 0
    p, a = g.p, g.n - i
    Astar = unimodular_inverse(m.action).T
    k = g.n + 2
    if 4 * k > k_cap:
        raise DualStabilizationError(f"k cap {k_cap} leaves no room for two doublings from k={k}")
    values = []
    while k <= k_cap:
        mod = p ** k
        values.append(_dual_level_chi(Astar.power(p ** i, mod), p, a, k))
        if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
            return values[-1]
        k *= 2
    raise DualStabilizationError(f"dual chi did not stabilise up to k cap {k_cap}: {values}")
