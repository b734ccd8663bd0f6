"""Synthetic tower model and exact checks of the lambda-invariant formulas.

A free module M over G = Z/(p^n) stands in for the dual of the top class
group A_{K_n}.  Layer K_i is modelled by the fixed lattice M^{N_i}, so
lambda_i = rank M^{N_i}.  Class-group-side Euler characteristics are the
negatives of the ones computed on M (the dual flips the sign of chi).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .cohomology import tate_orders
from .invariants import RankSequence
from .modules import GModule, fixed_submodule, phi


class TowerModelError(ValueError):
    """The module cannot serve as a tower model (it has finite summands)."""


@dataclass(frozen=True)
class TowerInvariants:
    """lambda_0..lambda_n and the three chi families of the tower.

    ``chi_quotient[i-1]`` is chi(G_i, A_{K_i}) for i = 1..n,
    ``chi_subgroup[i]`` is chi(N_i, A_{K_n}) for i = 0..n-1 and
    ``chi_layer[i-1]`` is chi(N_{i-1}/N_i, A_{K_i}) for i = 1..n.
    """

    p: int
    n: int
    lambdas: tuple[int, ...]
    chi_quotient: tuple[int, ...]
    chi_subgroup: tuple[int, ...]
    chi_layer: tuple[int, ...]

    def chi_G(self, i: int) -> int:
        """chi(G_i, A_{K_i}), with the trivial group G_0 giving 0."""
        return 0 if i == 0 else self.chi_quotient[i - 1]

    def chi_N(self, i: int) -> int:
        return self.chi_subgroup[i]

    def layer(self, i: int) -> int:
        return self.chi_layer[i - 1]

    def doubled(self) -> TowerInvariants:
        return TowerInvariants(self.p, self.n, *(tuple(2 * x for x in f) for f in (
            self.lambdas, self.chi_quotient, self.chi_subgroup, self.chi_layer)))


Value = Union[int, Fraction, list]


@dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: Value
    rhs: Value
    applicable: bool = True

    @property
    def passed(self) -> bool:
        return not self.applicable or self.lhs == self.rhs


def analyze_tower(m: GModule) -> TowerInvariants:
    if m.finite_blocks:
        raise TowerModelError("tower model needs a free module (mu = 0); drop the finite blocks")
    p, n = m.group.p, m.group.n
    fixed = [fixed_submodule(m, i) for i in range(n + 1)]
    lambdas = tuple(f.basis.cols for f in fixed)
    chi_quotient = tuple(-tate_orders(fixed[i].induced, 0).chi for i in range(1, n + 1))
    chi_subgroup = tuple(-tate_orders(m, i).chi for i in range(n))
    # N_{i-1}/N_i is generated by the image of g^(p^(i-1)) acting on M^{N_i}
    chi_layer = tuple(-tate_orders(fixed[i].induced, i - 1).chi for i in range(1, n + 1))
    return TowerInvariants(p, n, lambdas, chi_quotient, chi_subgroup, chi_layer)


def verify_iwasawa_step(t: TowerInvariants, i: int) -> IdentityReport:
    if not 1 <= i <= t.n:
        raise IndexError(f"layer {i} outside 1..{t.n}")
    p, lam = t.p, t.lambdas
    return IdentityReport(f"iwasawa_step[{i}]", lam[i], p * lam[i - 1] + (p - 1) * t.layer(i))


def verify_theorem_above(t: TowerInvariants) -> IdentityReport:
    p, n, lam = t.p, t.n, t.lambdas
    if n < 1:
        return IdentityReport("theorem_above", 0, 0, applicable=False)
    lhs = sum(phi(p, i) * lam[n - i] for i in range(n))
    rhs = p ** (n - 1) * (n * p - n + 1) * lam[0] + phi(p, n) * t.chi_G(n)
    return IdentityReport("theorem_above", lhs, rhs)


def verify_cor_lazyname(t: TowerInvariants) -> IdentityReport:
    p, n, lam = t.p, t.n, t.lambdas
    rhs = p ** n * lam[0] + phi(p, n) * t.chi_G(n) - (p - 1) * sum(phi(p, i) * t.chi_G(i) for i in range(1, n))
    return IdentityReport("cor_lazyname", lam[n], rhs)


def verify_cor_generalprop(t: TowerInvariants) -> IdentityReport:
    p, n = t.p, t.n
    if n < 1:
        return IdentityReport("cor_generalprop", 0, 0, applicable=False)
    lhs = p ** (n - 1) * t.chi_G(n)
    rhs = (sum(phi(p, i) * t.chi_G(i) for i in range(1, n))
           + sum(p ** (n - i) * t.layer(i) for i in range(1, n + 1)))
    return IdentityReport("cor_generalprop", lhs, rhs)


def verify_cor_gencong(t: TowerInvariants) -> IdentityReport:
    """Congruences lambda_n = lambda_i mod phi(p^(i+1)) for all i, then the bound -n·lambda_0 <= chi(G_n)."""
    p, n, lam = t.p, t.n, t.lambdas
    lhs = [lam[n] % phi(p, i + 1) for i in range(n + 1)]
    rhs = [lam[i] % phi(p, i + 1) for i in range(n + 1)]
    lhs.append(1)
    rhs.append(int(-n * lam[0] <= t.chi_G(n)))
    return IdentityReport("cor_gencong", lhs, rhs)


def verify_theorem_subgroup(t: TowerInvariants) -> IdentityReport:
    p, n, lam = t.p, t.n, t.lambdas
    if n < 1:
        return IdentityReport("theorem_subgroup", Fraction(0), Fraction(0), applicable=False)
    lhs = Fraction(lam[n] - p ** n * lam[0], p - 1)
    rhs = Fraction(p ** n * t.chi_N(0), n * p - n + 1)
    for i in range(1, n):
        rhs += Fraction(p ** i * (p - 1) * t.chi_N(n - i), (i * p - i + p) * (i * p - i + 1))
    return IdentityReport("theorem_subgroup", lhs, rhs)


def verify_rep_decomposition(t: TowerInvariants, r: RankSequence) -> IdentityReport:
    lam0 = t.lambdas[0]
    predicted = [lam0] + [lam0 + t.chi_G(i) - t.chi_G(i - 1) for i in range(1, t.n + 1)]
    return IdentityReport("rep_decomposition", list(r.r), predicted)


def verify_vanishing_pivot(t: TowerInvariants) -> IdentityReport:
    """With lambda_0 = 0: lambda_n = 0 iff chi(G_n) = 0, and every chi(G_i) >= 0.

    Encoded as ``[lambda_n == 0, 1]`` against ``[chi(G_n) == 0, all chi(G_i) >= 0]``.
    """
    lam, n = t.lambdas, t.n
    if lam[0] != 0:
        return IdentityReport("vanishing_pivot", [], [], applicable=False)
    lhs = [int(lam[n] == 0), 1]
    rhs = [int(t.chi_G(n) == 0), int(all(t.chi_G(i) >= 0 for i in range(1, n + 1)))]
    return IdentityReport("vanishing_pivot", lhs, rhs)


def verify_layer_telescoping(t: TowerInvariants) -> IdentityReport:
    """Summing the per-layer steps: (lambda_n - p^n lambda_0)/(p-1) = sum p^(n-i)·layer_i."""
    p, n, lam = t.p, t.n, t.lambdas
    lhs = Fraction(lam[n] - p ** n * lam[0], p - 1)
    rhs = Fraction(sum(p ** (n - i) * t.layer(i) for i in range(1, n + 1)))
    return IdentityReport("layer_telescoping", lhs, rhs)


IDENTITY_NAMES = ("iwasawa_step", "theorem_above", "cor_lazyname", "cor_generalprop", "cor_gencong",
                  "theorem_subgroup", "rep_decomposition", "vanishing_pivot", "layer_telescoping")


def verify_all(t: TowerInvariants, r: RankSequence) -> list[IdentityReport]:
    reports = [verify_iwasawa_step(t, i) for i in range(1, t.n + 1)]
    reports += [
        verify_theorem_above(t),
        verify_cor_lazyname(t),
        verify_cor_generalprop(t),
        verify_cor_gencong(t),
        verify_theorem_subgroup(t),
        verify_rep_decomposition(t, r),
        verify_vanishing_pivot(t),
        verify_layer_telescoping(t),
    ]
    return reports


def identity_family(report: IdentityReport) -> str:
    return report.name.split("[", 1)[0]
