"""Exact integer linear algebra: matrices, normal forms, lattices.

Nothing here touches floating point.  Lattices are given by the columns of
an :class:`IntMatrix`; a *basis* has linearly independent columns.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels

# Exact rationals for the non-integral identities.  Fraction is always
# normalised with a positive denominator.
Rational = Fraction


class MalformedBasisError(ValueError):
    """Columns handed in as a lattice basis are linearly dependent."""


class LatticeContainmentError(ValueError):
    """A sublattice is not contained in (or not of full rank in) its superlattice."""


class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]], cols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in data)
        if cols is None:
            if not rows:
                raise ValueError("cols is required for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError(f"ragged row: expected {cols} entries, got {len(r)}")
        self.rows = len(rows)
        self.cols = cols
        self._data = rows

    @classmethod
    def _wrap(cls, data: list[list[int]], rows: int, cols: int) -> IntMatrix:
        obj = cls.__new__(cls)
        obj.rows = rows
        obj.cols = cols
        obj._data = tuple(tuple(r) for r in data)
        return obj

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence[int]) -> IntMatrix:
        if len(entries) != rows * cols:
            raise ValueError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        return cls((entries[i * cols:(i + 1) * cols] for i in range(rows)), cols)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls._wrap([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls._wrap([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def diag(cls, values: Sequence[int]) -> IntMatrix:
        n = len(values)
        return cls._wrap([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(x for r in self._data for x in r)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def select_columns(self, idx: Iterable[int]) -> IntMatrix:
        idx = list(idx)
        return IntMatrix._wrap([[r[j] for j in idx] for r in self._data], self.rows, len(idx))

    @property
    def T(self) -> IntMatrix:
        return IntMatrix._wrap([list(c) for c in zip(*self._data)] if self.rows else
                               [[] for _ in range(self.cols)], self.cols, self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self._data]!r}, cols={self.cols})"

    def _check_same_shape(self, other: IntMatrix) -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: IntMatrix) -> IntMatrix:
        self._check_same_shape(other)
        return IntMatrix._wrap([[x + y for x, y in zip(a, b)] for a, b in zip(self._data, other._data)],
                               self.rows, self.cols)

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        self._check_same_shape(other)
        return IntMatrix._wrap([[x - y for x, y in zip(a, b)] for a, b in zip(self._data, other._data)],
                               self.rows, self.cols)

    def __neg__(self) -> IntMatrix:
        return IntMatrix._wrap([[-x for x in r] for r in self._data], self.rows, self.cols)

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix._wrap([[c * x for x in r] for r in self._data], self.rows, self.cols)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = kernels.matmul(self._data, other._data, self.rows, self.cols, other.cols)
        return IntMatrix._wrap(out, self.rows, other.cols)

    def mod(self, modulus: int) -> IntMatrix:
        return IntMatrix._wrap([[x % modulus for x in r] for r in self._data], self.rows, self.cols)

    def __pow__(self, e: int) -> IntMatrix:
        return self.power(e)

    def power(self, e: int, modulus: int | None = None) -> IntMatrix:
        """Nonnegative power by repeated squaring, optionally reduced mod ``modulus``."""
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        if e < 0:
            raise ValueError("negative exponent")
        result = IntMatrix.identity(self.rows)
        base = self if modulus is None else self.mod(modulus)
        while e:
            if e & 1:
                result = result @ base
                if modulus is not None:
                    result = result.mod(modulus)
            e >>= 1
            if e:
                base = base @ base
                if modulus is not None:
                    base = base.mod(modulus)
        return result if modulus is None else result.mod(modulus)

    def is_zero(self) -> bool:
        return not any(x for r in self._data for x in r)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == IntMatrix.identity(self.rows)

    def rank(self) -> int:
        return kernels.rank(self._data, self.rows, self.cols)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det(self.tolist())

    def max_abs(self) -> int:
        return max((abs(x) for r in self._data for x in r), default=0)


def _bareiss_det(A: list[list[int]]) -> int:
    n = len(A)
    sign = 1
    prev = 1
    for c in range(n):
        pr = next((i for i in range(c, n) if A[i][c]), -1)
        if pr < 0:
            return 0
        if pr != c:
            A[c], A[pr] = A[pr], A[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                A[i][j] = (A[c][c] * A[i][j] - A[i][c] * A[c][j]) // prev
        prev = A[c][c]
    return sign * A[n - 1][n - 1] if n else 1


def block_diag(*blocks: IntMatrix) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            data[r0 + i][c0:c0 + b.cols] = b.row(i)
        r0 += b.rows
        c0 += b.cols
    return IntMatrix._wrap(data, rows, cols)


def hstack(*ms: IntMatrix) -> IntMatrix:
    if not ms:
        raise ValueError("hstack needs at least one matrix")
    rows = ms[0].rows
    if any(m.rows != rows for m in ms):
        raise ValueError("hstack row mismatch")
    return IntMatrix._wrap([[x for m in ms for x in m.row(i)] for i in range(rows)],
                           rows, sum(m.cols for m in ms))


def valuation(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    divisors: tuple[int, ...]


def snf(m: IntMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transforms, ``U·m·V = S``."""
    U, S, V = kernels.smith(m._data, m.rows, m.cols, True)
    divisors = tuple(S[i][i] for i in range(min(m.rows, m.cols)) if S[i][i])
    return SmithDecomposition(IntMatrix._wrap(U, m.rows, m.rows), IntMatrix._wrap(S, m.rows, m.cols),
                              IntMatrix._wrap(V, m.cols, m.cols), divisors)


def elementary_divisors(m: IntMatrix) -> tuple[int, ...]:
    """Nonzero Smith divisors only (no transforms, cheaper)."""
    _, S, _ = kernels.smith(m._data, m.rows, m.cols, False)
    return tuple(S[i][i] for i in range(min(m.rows, m.cols)) if S[i][i])


def local_elementary_valuations(m: IntMatrix, p: int, k: int) -> list[int]:
    """Valuations of the Smith divisors of m over Z/p^k, zeros reading as k."""
    return kernels.local_valuations(m._data, m.rows, m.cols, p, k)


def _column_hermite(m: IntMatrix):
    return kernels.column_hermite(m._data, m.rows, m.cols)


def hermite_basis(m: IntMatrix) -> IntMatrix:
    """Canonical (column Hermite) basis of the lattice spanned by the columns of m."""
    H, _, r, _ = _column_hermite(m)
    return IntMatrix._wrap([row[:r] for row in H], m.rows, r)


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Hermite basis of the integer kernel ``{x : m·x = 0}`` as columns.

    The kernel of an integer matrix is always saturated; the basis comes
    from a unimodular transform, so no separate saturation step is needed.
    """
    _, V, r, _ = _column_hermite(m)
    k = m.cols - r
    if k == 0:
        return IntMatrix.zeros(m.cols, 0)
    K = IntMatrix._wrap([row[r:] for row in V], m.cols, k)
    return hermite_basis(K)


def saturate(basis: IntMatrix, ambient_rank: int) -> IntMatrix:
    """Pure closure ``{v : c·v ∈ span(basis) for some c ≠ 0}`` of a sublattice."""
    if basis.rows != ambient_rank:
        raise ValueError(f"basis has {basis.rows} rows, ambient rank is {ambient_rank}")
    if basis.rank() != basis.cols:
        raise MalformedBasisError(f"{basis.cols} columns but rank {basis.rank()}")
    if basis.cols == 0:
        return IntMatrix.zeros(ambient_rank, 0)
    # the double orthogonal complement of a lattice is its saturation
    orth = kernel_basis(basis.T)
    return kernel_basis(orth.T)


def solve_in_basis(basis: IntMatrix, targets: IntMatrix) -> IntMatrix | None:
    """Integer coordinates X with ``hermite_basis(basis)·X = targets``, or None.

    Only meaningful when ``basis`` is already in Hermite form (as returned by
    :func:`kernel_basis` or :func:`hermite_basis`); callers needing
    coordinates in an arbitrary basis use :func:`sublattice_index_divisors`.
    """
    H, _, r, piv = _column_hermite(basis)
    X = kernels.solve_echelon(H, piv, r, targets._data, targets.rows, targets.cols)
    if X is None:
        return None
    return IntMatrix._wrap(X, r, targets.cols)


def sublattice_index_divisors(sub: IntMatrix, sup: IntMatrix) -> tuple[int, ...]:
    """Elementary divisors of the quotient span(sup)/span(sub).

    ``sup`` must be a basis; ``sub`` may be any generating set, but must
    lie inside span(sup) and have the same rank.
    """
    if sub.rows != sup.rows:
        raise LatticeContainmentError(f"ambient ranks differ: {sub.rows} vs {sup.rows}")
    H, _, r, piv = _column_hermite(sup)
    if r != sup.cols:
        raise MalformedBasisError(f"superlattice has {sup.cols} columns but rank {r}")
    X = kernels.solve_echelon(H, piv, r, sub._data, sub.rows, sub.cols)
    if X is None:
        raise LatticeContainmentError("sublattice generators are not in the superlattice")
    X = IntMatrix._wrap(X, r, sub.cols)
    divisors = elementary_divisors(X)
    if len(divisors) != r:
        raise LatticeContainmentError(f"sublattice has rank {len(divisors)}, superlattice rank {r}")
    return divisors


def sublattice_index_valuation(sub: IntMatrix, sup: IntMatrix, p: int) -> int:
    """ord_p of the index [span(sup) : span(sub)]."""
    return sum(valuation(s, p) for s in sublattice_index_divisors(sub, sup))


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant ±1."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    H, V, r, _ = _column_hermite(m)
    n = m.rows
    if r != n or any(H[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    # unimodular ⇒ Hermite form is I, so m·V = I
    return IntMatrix._wrap(V, n, n)


def unimodular_pair(d: int, seed: int, bound: int, steps: int | None = None) -> tuple[IntMatrix, IntMatrix]:
    """Seeded random ``(U, U⁻¹)`` with every entry of U at most ``bound`` in magnitude.

    U is a product of row swaps, sign flips and elementary row additions;
    additions that would push an entry of U past ``bound`` are skipped.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if bound < 1:
        raise ValueError("bound must be positive")
    rng = random.Random(seed)
    U = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    W = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    for _ in range(3 * d if steps is None else steps):
        roll = rng.random()
        i = rng.randrange(d)
        if roll < 0.15 or d == 1:
            for row in W:
                row[i] = -row[i]
            U[i] = [-x for x in U[i]]
            continue
        j = rng.randrange(d - 1)
        j += j >= i
        if roll < 0.3:
            U[i], U[j] = U[j], U[i]
            for row in W:
                row[i], row[j] = row[j], row[i]
            continue
        c = rng.randint(1, bound) * rng.choice((-1, 1))
        new = [x + c * y for x, y in zip(U[i], U[j])]
        if max(abs(x) for x in new) > bound:
            continue
        U[i] = new
        # (I + c·e_i e_jᵀ)⁻¹ = I − c·e_i e_jᵀ applied on the right of W
        for row in W:
            row[j] -= c * row[i]
    return IntMatrix._wrap(U, d, d), IntMatrix._wrap(W, d, d)


def unimodular_random(d: int, seed: int, bound: int) -> IntMatrix:
    """Seed-deterministic d×d matrix of determinant ±1 with entries in [-bound, bound]."""
    return unimodular_pair(d, seed, bound)[0]
