"""The compiled kernels and the pure-Python fallback must agree exactly."""

import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from _strategies import int_matrices
from lambdachi import _kernels_py as py
from lambdachi import kernels

try:
    from lambdachi import _kernels as cy
except ImportError:  # pragma: no cover - build without a compiler
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")

big_ints = st.one_of(st.integers(-30, 30), st.integers(-(2 ** 70), 2 ** 70))


def data(m):
    return [list(r) for r in m.tolist()]


def test_dispatch_selects_compiled_when_available():
    if cy is None:
        assert kernels.BACKEND == "python"
    elif os.environ.get("LAMBDACHI_PURE_PYTHON"):
        assert kernels.BACKEND == "python"
    else:
        assert kernels.BACKEND == "cython"


def test_env_var_forces_fallback():
    env = dict(os.environ, LAMBDACHI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import lambdachi.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
@given(int_matrices(max_rows=6, max_cols=6, max_abs=40), st.booleans())
def test_smith_parity(m, track):
    a = data(m)
    assert cy.smith(a, m.rows, m.cols, track) == py.smith(a, m.rows, m.cols, track)


@needs_ext
@given(int_matrices(max_rows=6, max_cols=6, max_abs=40))
def test_hermite_parity(m):
    a = data(m)
    assert cy.column_hermite(a, m.rows, m.cols) == py.column_hermite(a, m.rows, m.cols)


@needs_ext
@given(int_matrices(max_rows=6, max_cols=6, max_abs=40))
def test_rank_parity(m):
    assert cy.rank(data(m), m.rows, m.cols) == py.rank(data(m), m.rows, m.cols)


@needs_ext
@given(int_matrices(min_rows=1, min_cols=1, max_rows=5, max_cols=5), int_matrices(min_rows=1, min_cols=1))
def test_matmul_parity(a, b):
    if a.cols != b.rows:
        return
    assert cy.matmul(data(a), data(b), a.rows, a.cols, b.cols) == py.matmul(data(a), data(b), a.rows, a.cols,
                                                                            b.cols)


@needs_ext
@given(int_matrices(max_rows=5, max_cols=5, max_abs=100), st.sampled_from([2, 3, 5, 7]), st.integers(1, 12))
def test_local_valuation_parity(m, p, k):
    assert cy.local_valuations(data(m), m.rows, m.cols, p, k) == py.local_valuations(data(m), m.rows, m.cols, p, k)


@needs_ext
@given(int_matrices(min_rows=1, max_rows=5, max_cols=4, max_abs=20), int_matrices(min_cols=0, max_cols=3))
def test_solve_parity(B, X):
    H, _, r, piv = py.column_hermite(data(B), B.rows, B.cols)
    if X.rows != B.rows:
        return
    Y = data(X)
    assert cy.solve_echelon(H, piv, r, Y, B.rows, X.cols) == py.solve_echelon(H, piv, r, Y, B.rows, X.cols)


@needs_ext
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_overflow_falls_back_exactly(r, c, draw):
    entries = draw.draw(st.lists(big_ints, min_size=r * c, max_size=r * c))
    a = [entries[i * c:(i + 1) * c] for i in range(r)]
    before = cy.fallback_calls
    assert cy.smith(a, r, c, True) == py.smith(a, r, c, True)
    assert cy.column_hermite(a, r, c) == py.column_hermite(a, r, c)
    assert cy.rank(a, r, c) == py.rank(a, r, c)
    if any(abs(x) >= 2 ** 63 for x in entries):
        assert cy.fallback_calls > before


@needs_ext
def test_large_modulus_local_valuations():
    a = [[2 ** 40, 3], [6, 2 ** 41]]
    assert cy.local_valuations(a, 2, 2, 2, 80) == py.local_valuations(a, 2, 2, 2, 80)


@pytest.mark.parametrize("impl", ["py", "cy"])
def test_known_smith_form(impl):
    mod = py if impl == "py" else cy
    if mod is None:
        pytest.skip("compiled extension not built")
    U, S, V = mod.smith([[2, 4], [6, 8]], 2, 2, True)
    assert [S[0][0], S[1][1]] == [2, 4]
    assert py.matmul(py.matmul(U, [[2, 4], [6, 8]], 2, 2, 2), V, 2, 2, 2) == S
