"""Cyclic p-groups and their lattice modules.

A :class:`GModule` is a free Z-lattice with the action of a generator g of
Z/(p^n), plus optional finite summands (Z/p^k)^e.  Everything is integral,
so results are exact over Z_p after tensoring.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from .exact_linalg import (
    IntMatrix,
    block_diag,
    kernel_basis,
    local_elementary_valuations,
    solve_in_basis,
    unimodular_pair,
)


class ModuleInvariantError(ValueError):
    """A module, block or spec violates one of its structural invariants."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def phi(p: int, t: int) -> int:
    """Euler's totient of p^t."""
    return 1 if t == 0 else p ** (t - 1) * (p - 1)


@dataclass(frozen=True)
class CyclicPGroup:
    p: int
    n: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ModuleInvariantError(f"p = {self.p} is not prime")
        if self.n < 0:
            raise ModuleInvariantError(f"exponent n = {self.n} is negative")

    @property
    def order(self) -> int:
        return self.p ** self.n

    def subgroup_order(self, i: int) -> int:
        """|N_i| where N_i = <g^(p^i)>."""
        self.check_index(i)
        return self.p ** (self.n - i)

    def check_index(self, i: int) -> None:
        if not 0 <= i <= self.n:
            raise IndexError(f"subgroup index {i} outside 0..{self.n}")


@dataclass(frozen=True)
class FreePart:
    action: IntMatrix

    @property
    def rank(self) -> int:
        return self.action.rows


@dataclass(frozen=True)
class FiniteBlock:
    """(Z/p^k)^e with g acting through ``action`` mod p^k."""

    k: int
    action: IntMatrix

    @property
    def size(self) -> int:
        return self.action.rows


@dataclass(frozen=True)
class GModule:
    group: CyclicPGroup
    free: FreePart
    finite_blocks: tuple[FiniteBlock, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "finite_blocks", tuple(self.finite_blocks))
        A = self.free.action
        if A.rows != A.cols:
            raise ModuleInvariantError(f"action must be square, got {A.shape}")
        if not A.power(self.group.order).is_identity():
            raise ModuleInvariantError(f"action^(p^n) != I for p={self.group.p}, n={self.group.n}")
        for b in self.finite_blocks:
            if b.k < 1:
                raise ModuleInvariantError(f"finite block exponent k = {b.k} must be positive")
            mod = self.group.p ** b.k
            if b.action.rows != b.action.cols:
                raise ModuleInvariantError("finite block action must be square")
            if not b.action.power(self.group.order, mod).is_identity():
                raise ModuleInvariantError(f"finite block action^(p^n) != I mod p^{b.k}")

    @property
    def rank(self) -> int:
        return self.free.rank

    @property
    def action(self) -> IntMatrix:
        return self.free.action

    @property
    def is_free(self) -> bool:
        return not self.finite_blocks


def zero_module(group: CyclicPGroup) -> GModule:
    return GModule(group, FreePart(IntMatrix.zeros(0, 0)))


def trivial_module(group: CyclicPGroup, d: int = 1) -> GModule:
    return GModule(group, FreePart(IntMatrix.identity(d)))


@dataclass(frozen=True)
class FiniteSpec:
    k: int
    e: int
    seed: int


@dataclass(frozen=True)
class BlockSpec:
    """Recipe for a block-built module: r_t copies of Z_p[zeta_{p^t}], conjugated.

    ``conjugator_seed = None`` means the identity conjugator.
    """

    group: CyclicPGroup
    multiplicities: tuple[int, ...]
    finite_specs: tuple[FiniteSpec, ...] = ()
    conjugator_seed: int | None = None
    conjugator_bound: int = 1

    def __post_init__(self):
        object.__setattr__(self, "multiplicities", tuple(self.multiplicities))
        object.__setattr__(self, "finite_specs", tuple(self.finite_specs))
        if len(self.multiplicities) != self.group.n + 1:
            raise ModuleInvariantError(
                f"multiplicities has length {len(self.multiplicities)}, expected n+1 = {self.group.n + 1}")
        if any(r < 0 for r in self.multiplicities):
            raise ModuleInvariantError("multiplicities must be nonnegative")
        if self.conjugator_bound < 1:
            raise ModuleInvariantError("conjugator_bound must be positive")
        for f in self.finite_specs:
            if f.k < 1 or f.e < 0:
                raise ModuleInvariantError(f"finite spec needs k >= 1 and e >= 0, got k={f.k}, e={f.e}")

    @property
    def rank(self) -> int:
        p = self.group.p
        return sum(r * phi(p, t) for t, r in enumerate(self.multiplicities))

    def free_only(self) -> BlockSpec:
        return BlockSpec(self.group, self.multiplicities, (), self.conjugator_seed, self.conjugator_bound)

    def to_json(self) -> dict[str, Any]:
        """JSON-ready dict; integers become decimal strings."""
        return {
            "p": str(self.group.p),
            "n": str(self.group.n),
            "multiplicities": [str(r) for r in self.multiplicities],
            "finite_specs": [{"k": str(f.k), "e": str(f.e), "seed": str(f.seed)} for f in self.finite_specs],
            "conjugator_seed": None if self.conjugator_seed is None else str(self.conjugator_seed),
            "conjugator_bound": str(self.conjugator_bound),
        }

    @classmethod
    def from_json(cls, doc: Any) -> BlockSpec:
        if not isinstance(doc, dict):
            raise SpecFormatError("<root>", "expected a JSON object")
        group = CyclicPGroup(_int_field(doc, "p"), _int_field(doc, "n"))
        mults = doc.get("multiplicities")
        if not isinstance(mults, list):
            raise SpecFormatError("multiplicities", "expected a list")
        finite = doc.get("finite_specs", [])
        if not isinstance(finite, list):
            raise SpecFormatError("finite_specs", "expected a list")
        seed = doc.get("conjugator_seed")
        return cls(
            group=group,
            multiplicities=tuple(_as_int(v, f"multiplicities[{i}]") for i, v in enumerate(mults)),
            finite_specs=tuple(
                FiniteSpec(*(_int_field(f, key, f"finite_specs[{i}].") for key in ("k", "e", "seed")))
                for i, f in enumerate(finite)),
            conjugator_seed=None if seed is None else _as_int(seed, "conjugator_seed"),
            conjugator_bound=_int_field(doc, "conjugator_bound") if "conjugator_bound" in doc else 1,
        )


class SpecFormatError(ValueError):
    def __init__(self, fieldname: str, message: str):
        super().__init__(f"field {fieldname!r}: {message}")
        self.field = fieldname


def _as_int(v: Any, name: str) -> int:
    if isinstance(v, bool):
        raise SpecFormatError(name, "expected an integer, got a boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v, 10)
        except ValueError:
            pass
    raise SpecFormatError(name, f"expected an integer or decimal string, got {v!r}")


def _int_field(doc: Any, key: str, prefix: str = "") -> int:
    if not isinstance(doc, dict):
        raise SpecFormatError(prefix.rstrip("."), "expected a JSON object")
    if key not in doc:
        raise SpecFormatError(prefix + key, "missing")
    return _as_int(doc[key], prefix + key)


def cyclotomic_coefficients(p: int, t: int) -> list[int]:
    """Coefficients (constant term first) of the p^t-th cyclotomic polynomial."""
    if t == 0:
        return [-1, 1]
    step = p ** (t - 1)
    coeffs = [0] * (step * (p - 1) + 1)
    for j in range(p):
        coeffs[j * step] = 1
    return coeffs


def cyclotomic_block(p: int, t: int) -> IntMatrix:
    """Companion matrix of Phi_{p^t}: multiplication by zeta_{p^t} on the power basis."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    c = cyclotomic_coefficients(p, t)
    m = len(c) - 1
    data = [[0] * m for _ in range(m)]
    for i in range(m):
        if i + 1 < m:
            data[i + 1][i] = 1
        data[i][m - 1] = -c[i]
    return IntMatrix(data, m)


def finite_block_action(p: int, n: int, k: int, e: int, seed: int, attempts: int = 20) -> IntMatrix:
    """Seeded e×e action on (Z/p^k)^e whose order divides p^n.

    A random invertible matrix is pushed into the Sylow p-subgroup by the
    p'-part of |GL_e(F_p)|, then powered down to order at most p^n.  Falls
    back to the identity when no invertible draw turns up.
    """
    mod = p ** k
    if e == 0:
        return IntMatrix.zeros(0, 0)
    rng = random.Random(seed)
    prime_to_p = 1
    for i in range(1, e + 1):
        prime_to_p *= p ** i - 1
    ident = IntMatrix.identity(e)
    for _ in range(attempts):
        X = IntMatrix([[rng.randrange(mod) for _ in range(e)] for _ in range(e)])
        if X.det() % p == 0:
            continue
        Y = X.power(prime_to_p, mod)
        a = 0
        Z = Y
        while not Z.is_identity():
            Z = Z.power(p, mod)
            a += 1
        if a > n:
            Y = Y.power(p ** (a - n), mod)
        return Y
    return ident


def build_module(spec: BlockSpec) -> GModule:
    p, n = spec.group.p, spec.group.n
    blocks = [cyclotomic_block(p, t) for t, r in enumerate(spec.multiplicities) for _ in range(r)]
    D = block_diag(*blocks) if blocks else IntMatrix.zeros(0, 0)
    if spec.conjugator_seed is not None and D.rows:
        U, W = unimodular_pair(D.rows, spec.conjugator_seed, spec.conjugator_bound)
        D = U @ D @ W
    finite = tuple(FiniteBlock(f.k, finite_block_action(p, n, f.k, f.e, f.seed)) for f in spec.finite_specs)
    try:
        return GModule(spec.group, FreePart(D), finite)
    except ModuleInvariantError as exc:  # pragma: no cover - construction bug
        raise RuntimeError(f"build_module produced an invalid module: {exc}") from exc


@dataclass(frozen=True)
class FixedSubmodule:
    """M^{N_i}: saturated basis, the induced G/N_i-module, and ord_p of the
    fixed subgroup of each finite block."""

    basis: IntMatrix
    induced: GModule
    finite_fixed_valuations: tuple[int, ...] = field(default=())

    def __iter__(self):
        # (basis, induced) unpacking
        yield self.basis
        yield self.induced


def fixed_submodule(m: GModule, i: int) -> FixedSubmodule:
    g = m.group
    g.check_index(i)
    A = m.action
    d = A.rows
    B = A.power(g.p ** i)
    K = kernel_basis(B - IntMatrix.identity(d))
    if K.cols:
        X = solve_in_basis(K, A @ K)
        if X is None:  # pragma: no cover - the fixed lattice is G-stable
            raise RuntimeError("fixed lattice is not stable under the action")
    else:
        X = IntMatrix.zeros(0, 0)
    finite_vals = []
    for b in m.finite_blocks:
        Bk = b.action.power(g.p ** i, g.p ** b.k)
        finite_vals.append(sum(local_elementary_valuations(Bk - IntMatrix.identity(b.size), g.p, b.k)))
    induced = GModule(CyclicPGroup(g.p, i), FreePart(X))
    return FixedSubmodule(K, induced, tuple(finite_vals))


def restrict_action(m: GModule, i: int) -> GModule:
    """The same lattice viewed as a module over N_i = <g^(p^i)>."""
    g = m.group
    g.check_index(i)
    e = g.p ** i
    finite = tuple(FiniteBlock(b.k, b.action.power(e, g.p ** b.k)) for b in m.finite_blocks)
    return GModule(CyclicPGroup(g.p, g.n - i), FreePart(m.action.power(e)), finite)


def direct_sum(a: GModule, b: GModule) -> GModule:
    if a.group != b.group:
        raise ModuleInvariantError(f"cannot sum modules over {a.group} and {b.group}")
    return GModule(a.group, FreePart(block_diag(a.action, b.action)), a.finite_blocks + b.finite_blocks)
