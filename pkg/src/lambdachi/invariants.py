"""Structural invariants of a free module: block multiplicities three ways.

* :func:`rank_sequence` from fixed-lattice ranks of the subgroups N_i,
* :func:`iterated_filtration_multiplicities` by peeling off the
  Z_p[zeta_{p^n}]-free quotient of M / ker(g^(p^(n-1)) - 1) repeatedly,
* :func:`rep_multiplicities` from kernels of cyclotomic polynomials in g.

On any lattice with an action of order dividing p^n the three agree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_linalg import IntMatrix, kernel_basis, solve_in_basis
from .modules import CyclicPGroup, FreePart, GModule, cyclotomic_coefficients, phi


class InvariantError(RuntimeError):
    """A multiplicity came out negative or non-integral."""


@dataclass(frozen=True)
class RankSequence:
    r: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(self.r))
        if any(x < 0 for x in self.r):
            raise InvariantError(f"negative multiplicity in {self.r}")

    def total_rank(self, p: int) -> int:
        return sum(x * phi(p, t) for t, x in enumerate(self.r))


@dataclass(frozen=True)
class PrimeFiltrationStep:
    """M' = ker(g^(p^(n-1)) - 1) and the rank of the quotient M/M'.

    ``sub_module`` is M' in ``sub_basis`` coordinates as a module over
    Z/(p^(n-1)).
    """

    sub_basis: IntMatrix
    quotient_rank: int
    sub_module: GModule


def fixed_rank(m: GModule, i: int) -> int:
    """rank_Z(M^{N_i})."""
    m.group.check_index(i)
    d = m.rank
    if d == 0:
        return 0
    B = m.action.power(m.group.p ** i)
    return d - (B - IntMatrix.identity(d)).rank()


def _exact_div(a: int, b: int, what: str) -> int:
    q, rem = divmod(a, b)
    if rem or q < 0:
        raise InvariantError(f"{what}: {a} is not a nonnegative multiple of {b}")
    return q


def rank_sequence(m: GModule) -> RankSequence:
    p, n = m.group.p, m.group.n
    ranks = [fixed_rank(m, i) for i in range(n + 1)]
    r = [ranks[0]]
    for i in range(1, n + 1):
        r.append(_exact_div(ranks[i] - ranks[i - 1], phi(p, i), f"r_{i}"))
    return RankSequence(tuple(r))


def prime_filtration(m: GModule) -> PrimeFiltrationStep:
    p, n = m.group.p, m.group.n
    if n < 1:
        raise ValueError("prime_filtration needs n >= 1")
    d = m.rank
    B = m.action.power(p ** (n - 1))
    K = kernel_basis(B - IntMatrix.identity(d))
    quotient_rank = d - K.cols
    _exact_div(quotient_rank, phi(p, n), "quotient rank")
    if K.cols:
        X = solve_in_basis(K, m.action @ K)
        if X is None:  # pragma: no cover - kernels of G-maps are G-stable
            raise InvariantError("M' is not stable under g")
    else:
        X = IntMatrix.zeros(0, 0)
    # GModule validation checks that the induced action has order dividing p^(n-1)
    sub = GModule(CyclicPGroup(p, n - 1), FreePart(X))
    return PrimeFiltrationStep(K, quotient_rank, sub)


def iterated_filtration_multiplicities(m: GModule) -> RankSequence:
    p, n = m.group.p, m.group.n
    r = [0] * (n + 1)
    cur = m
    for level in range(n, 0, -1):
        step = prime_filtration(cur)
        r[level] = step.quotient_rank // phi(p, level)
        cur = step.sub_module
    r[0] = cur.rank
    return RankSequence(tuple(r))


def cyclotomic_evaluate(A: IntMatrix, p: int, t: int) -> IntMatrix:
    """Phi_{p^t}(A)."""
    coeffs = cyclotomic_coefficients(p, t)
    d = A.rows
    out = IntMatrix.zeros(d, d)
    P = IntMatrix.identity(d)
    step = 1 if t == 0 else p ** (t - 1)
    S = A.power(step)
    for e in range(0, len(coeffs), step):
        if coeffs[e]:
            out = out + P.scale(coeffs[e])
        if e + step < len(coeffs):
            P = P @ S
    return out


def rep_multiplicities(m: GModule) -> RankSequence:
    p, n = m.group.p, m.group.n
    d = m.rank
    r = []
    for t in range(n + 1):
        if d == 0:
            r.append(0)
            continue
        null = d - cyclotomic_evaluate(m.action, p, t).rank()
        r.append(_exact_div(null, phi(p, t), f"multiplicity of the degree-{phi(p, t)} irreducible"))
    if sum(x * phi(p, t) for t, x in enumerate(r)) != d:
        raise InvariantError(f"multiplicities {r} do not account for rank {d}")
    return RankSequence(tuple(r))
