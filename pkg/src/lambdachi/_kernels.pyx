# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled counterparts of ``_kernels_py``.

Each call first runs on 64-bit integers with every multiply/add checked
for overflow.  If an input entry does not fit, or any intermediate would
overflow, the call is rerun by the arbitrary-precision Python kernel, so
results are always exact.  Pivoting and rounding match the Python kernel
step for step, so both paths return identical matrices.
"""

from libc.stdlib cimport malloc, free

from . import _kernels_py as _py

ctypedef long long i64

cdef extern from *:
    """
    typedef __int128 lc_i128;
    """
    ctypedef long long i128 "lc_i128"
    bint mul_ovf "__builtin_mul_overflow"(i64 a, i64 b, i64 *r) nogil
    bint add_ovf "__builtin_add_overflow"(i64 a, i64 b, i64 *r) nogil
    bint sub_ovf "__builtin_sub_overflow"(i64 a, i64 b, i64 *r) nogil

cdef i64 I64_MIN = -9223372036854775807 - 1

# counters for the benchmark and tests
fast_calls = 0
fallback_calls = 0


cdef i64* _alloc(Py_ssize_t count) except? NULL:
    cdef i64* buf = <i64*> malloc((count if count > 0 else 1) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    return buf


cdef int _load(object a, int n, int m, i64* out):
    """Copy a Python matrix into ``out``; 1 if an entry does not fit."""
    cdef int i, j
    cdef object row
    for i in range(n):
        row = a[i]
        for j in range(m):
            try:
                out[i * m + j] = row[j]
            except OverflowError:
                return 1
            if out[i * m + j] == I64_MIN:
                return 1
    return 0


cdef list _dump(i64* buf, int n, int m):
    cdef int i, j
    cdef list out = []
    cdef list row
    for i in range(n):
        row = [0] * m
        for j in range(m):
            row[j] = buf[i * m + j]
        out.append(row)
    return out


cdef void _identity(i64* buf, int n) noexcept nogil:
    cdef int i
    for i in range(n * n):
        buf[i] = 0
    for i in range(n):
        buf[i * n + i] = 1


cdef inline i64 _iabs(i64 x) noexcept nogil:
    return -x if x < 0 else x


cdef inline int _rdiv(i64 x, i64 y, i64* q) noexcept nogil:
    # nearest-integer quotient matching (2x + y) // (2y), y > 0
    cdef i64 f = x / y
    cdef i64 r = x % y
    if r < 0:
        r += y
        f -= 1
    if r >= y - r:
        f += 1
    q[0] = f
    return 0


cdef inline i64 _fdiv(i64 x, i64 y) noexcept nogil:
    # floor division, y > 0
    cdef i64 f = x / y
    if x % y < 0:
        f -= 1
    return f


cdef inline int _sub_mul(i64* dst, i64 q, i64 src) noexcept nogil:
    # dst -= q * src, 1 on overflow
    cdef i64 t
    if mul_ovf(q, src, &t):
        return 1
    if sub_ovf(dst[0], t, dst):
        return 1
    return 0


cdef void _swap_rows(i64* X, int m, int a, int b) noexcept nogil:
    cdef int j
    cdef i64 t
    for j in range(m):
        t = X[a * m + j]
        X[a * m + j] = X[b * m + j]
        X[b * m + j] = t


cdef void _swap_cols(i64* X, int n, int m, int a, int b) noexcept nogil:
    cdef int i
    cdef i64 t
    for i in range(n):
        t = X[i * m + a]
        X[i * m + a] = X[i * m + b]
        X[i * m + b] = t


cdef int _row_axpy(i64* X, int m, int dst, int src, i64 q, int start) noexcept nogil:
    # row dst -= q * row src over columns start..m-1
    cdef int j
    for j in range(start, m):
        if X[src * m + j] and _sub_mul(&X[dst * m + j], q, X[src * m + j]):
            return 1
    return 0


cdef int _col_axpy(i64* X, int n, int m, int dst, int src, i64 q, int start) noexcept nogil:
    # column dst -= q * column src over rows start..n-1
    cdef int i
    for i in range(start, n):
        if X[i * m + src] and _sub_mul(&X[i * m + dst], q, X[i * m + src]):
            return 1
    return 0


cdef int _neg_row(i64* X, int m, int r) noexcept nogil:
    cdef int j
    for j in range(m):
        if X[r * m + j] == I64_MIN:
            return 1
        X[r * m + j] = -X[r * m + j]
    return 0


cdef int _neg_col(i64* X, int n, int m, int c) noexcept nogil:
    cdef int i
    for i in range(n):
        if X[i * m + c] == I64_MIN:
            return 1
        X[i * m + c] = -X[i * m + c]
    return 0


cdef int _matmul64(i64* A, i64* B, i64* C, int n, int k, int m) noexcept nogil:
    cdef int i, j, t
    cdef i64 s, prod, a
    for i in range(n * m):
        C[i] = 0
    for i in range(n):
        for t in range(k):
            a = A[i * k + t]
            if a == 0:
                continue
            for j in range(m):
                if B[t * m + j]:
                    if mul_ovf(a, B[t * m + j], &prod):
                        return 1
                    if add_ovf(C[i * m + j], prod, &C[i * m + j]):
                        return 1
    return 0


def matmul(a, b, int n, int k, int m):
    global fast_calls, fallback_calls
    cdef i64* A = _alloc(n * k)
    cdef i64* B = _alloc(k * m)
    cdef i64* C = _alloc(n * m)
    cdef int status
    try:
        status = _load(a, n, k, A) or _load(b, k, m, B)
        if not status:
            with nogil:
                status = _matmul64(A, B, C, n, k, m)
        if status:
            fallback_calls += 1
            return _py.matmul(a, b, n, k, m)
        fast_calls += 1
        return _dump(C, n, m)
    finally:
        free(A)
        free(B)
        free(C)


cdef int _smith64(i64* A, i64* U, i64* V, int n, int m, bint track) noexcept nogil:
    cdef int lim = n if n < m else m
    cdef int t, i, j, bi, bj, bad
    cdef i64 best, ax, x, q, piv
    for t in range(lim):
        best = 0
        bi = -1
        bj = -1
        for i in range(t, n):
            for j in range(t, m):
                x = A[i * m + j]
                if x:
                    ax = _iabs(x)
                    if best == 0 or ax < best:
                        best = ax
                        bi = i
                        bj = j
                        if ax == 1:
                            break
            if best == 1:
                break
        if best == 0:
            break
        while True:
            if bi != t:
                _swap_rows(A, m, t, bi)
                if track:
                    _swap_rows(U, n, t, bi)
            if bj != t:
                _swap_cols(A, n, m, t, bj)
                if track:
                    _swap_cols(V, m, m, t, bj)
            if A[t * m + t] < 0:
                if _neg_row(A, m, t):
                    return 1
                if track and _neg_row(U, n, t):
                    return 1
            piv = A[t * m + t]
            for i in range(t + 1, n):
                x = A[i * m + t]
                if x:
                    _rdiv(x, piv, &q)
                    if q:
                        if _row_axpy(A, m, i, t, q, t):
                            return 1
                        if track and _row_axpy(U, n, i, t, q, 0):
                            return 1
            for j in range(t + 1, m):
                x = A[t * m + j]
                if x:
                    _rdiv(x, piv, &q)
                    if q:
                        if _col_axpy(A, n, m, j, t, q, t):
                            return 1
                        if track and _col_axpy(V, m, m, j, t, q, 0):
                            return 1
            best = piv
            bi = t
            bj = t
            for i in range(t + 1, n):
                x = A[i * m + t]
                if x and _iabs(x) < best:
                    best = _iabs(x)
                    bi = i
                    bj = t
            for j in range(t + 1, m):
                x = A[t * m + j]
                if x and _iabs(x) < best:
                    best = _iabs(x)
                    bi = t
                    bj = j
            if bi != t or bj != t:
                continue
            bad = -1
            for i in range(t + 1, n):
                for j in range(t + 1, m):
                    if A[i * m + j] % piv:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            if _row_axpy(A, m, t, bad, -1, t):
                return 1
            if track and _row_axpy(U, n, t, bad, -1, 0):
                return 1
            bi = t
            bj = t
    return 0


def smith(a, int n, int m, bint track):
    global fast_calls, fallback_calls
    cdef i64* A = _alloc(n * m)
    cdef i64* U = _alloc(n * n)
    cdef i64* V = _alloc(m * m)
    cdef int status
    try:
        status = _load(a, n, m, A)
        if not status:
            with nogil:
                _identity(U, n)
                _identity(V, m)
                status = _smith64(A, U, V, n, m, track)
        if status:
            fallback_calls += 1
            return _py.smith(a, n, m, track)
        fast_calls += 1
        if track:
            return _dump(U, n, n), _dump(A, n, m), _dump(V, m, m)
        return None, _dump(A, n, m), None
    finally:
        free(A)
        free(U)
        free(V)


cdef int _hermite64(i64* H, i64* V, int n, int m, int* pivots, int* rank_out) noexcept nogil:
    cdef int c = 0
    cdef int r, j, bj
    cdef i64 best, ax, x, q, piv
    cdef bint done
    for r in range(n):
        if c == m:
            break
        while True:
            best = 0
            bj = -1
            for j in range(c, m):
                x = H[r * m + j]
                if x:
                    ax = _iabs(x)
                    if best == 0 or ax < best:
                        best = ax
                        bj = j
            if best == 0:
                break
            if bj != c:
                _swap_cols(H, n, m, c, bj)
                _swap_cols(V, m, m, c, bj)
            if H[r * m + c] < 0:
                if _neg_col(H, n, m, c) or _neg_col(V, m, m, c):
                    return 1
            piv = H[r * m + c]
            done = True
            for j in range(c + 1, m):
                x = H[r * m + j]
                if x:
                    _rdiv(x, piv, &q)
                    if _col_axpy(H, n, m, j, c, q, 0) or _col_axpy(V, m, m, j, c, q, 0):
                        return 1
                    if H[r * m + j]:
                        done = False
            if done:
                break
        if best == 0:
            continue
        piv = H[r * m + c]
        for j in range(c):
            q = _fdiv(H[r * m + j], piv)
            if q:
                if _col_axpy(H, n, m, j, c, q, 0) or _col_axpy(V, m, m, j, c, q, 0):
                    return 1
        pivots[c] = r
        c += 1
    rank_out[0] = c
    return 0


def column_hermite(a, int n, int m):
    global fast_calls, fallback_calls
    cdef i64* H = _alloc(n * m)
    cdef i64* V = _alloc(m * m)
    cdef int* piv = <int*> malloc((m if m > 0 else 1) * sizeof(int))
    cdef int status, rk = 0
    try:
        status = _load(a, n, m, H)
        if not status:
            with nogil:
                _identity(V, m)
                status = _hermite64(H, V, n, m, piv, &rk)
        if status:
            fallback_calls += 1
            return _py.column_hermite(a, n, m)
        fast_calls += 1
        return _dump(H, n, m), _dump(V, m, m), rk, [piv[i] for i in range(rk)]
    finally:
        free(H)
        free(V)
        free(piv)


cdef int _solve64(i64* H, int* piv, int rank, i64* Y, int n, int m, int g, i64* X) noexcept nogil:
    # returns 0 solved, 1 overflow, 2 no integer solution
    cdef int col, t, u, r
    cdef i64 s, q, rem
    for col in range(g):
        for t in range(rank):
            r = piv[t]
            s = Y[r * g + col]
            for u in range(t):
                if H[r * m + u] and X[u * g + col]:
                    if _sub_mul(&s, H[r * m + u], X[u * g + col]):
                        return 1
            q = s / H[r * m + t]
            rem = s % H[r * m + t]
            if rem:
                return 2
            X[t * g + col] = q
        for r in range(n):
            s = 0
            for u in range(rank):
                if H[r * m + u] and X[u * g + col]:
                    if _sub_mul(&s, -H[r * m + u], X[u * g + col]):
                        return 1
            if s != Y[r * g + col]:
                return 2
    return 0


def solve_echelon(H, pivots, int rank, Y, int n, int g):
    global fast_calls, fallback_calls
    cdef int m = len(H[0]) if n else 0
    cdef i64* Hb = _alloc(n * m)
    cdef i64* Yb = _alloc(n * g)
    cdef i64* Xb = _alloc(rank * g)
    cdef int* pv = <int*> malloc((rank if rank > 0 else 1) * sizeof(int))
    cdef int status, i
    try:
        for i in range(rank):
            pv[i] = pivots[i]
        status = _load(H, n, m, Hb) or _load(Y, n, g, Yb)
        if not status:
            with nogil:
                status = _solve64(Hb, pv, rank, Yb, n, m, g, Xb)
        if status == 1:
            fallback_calls += 1
            return _py.solve_echelon(H, pivots, rank, Y, n, g)
        fast_calls += 1
        if status == 2:
            return None
        return _dump(Xb, rank, g)
    finally:
        free(Hb)
        free(Yb)
        free(Xb)
        free(pv)


cdef int _rank64(i64* A, int n, int m, int* out) noexcept nogil:
    # Euclidean row elimination: keeps entries small, no transforms
    cdef int rk = 0
    cdef int c, i, bi
    cdef i64 best, ax, x, q
    cdef bint done
    for c in range(m):
        if rk == n:
            break
        while True:
            best = 0
            bi = -1
            for i in range(rk, n):
                x = A[i * m + c]
                if x:
                    ax = _iabs(x)
                    if best == 0 or ax < best:
                        best = ax
                        bi = i
            if best == 0:
                break
            if bi != rk:
                _swap_rows(A, m, rk, bi)
            if A[rk * m + c] < 0 and _neg_row(A, m, rk):
                return 1
            done = True
            for i in range(rk + 1, n):
                x = A[i * m + c]
                if x:
                    _rdiv(x, A[rk * m + c], &q)
                    if _row_axpy(A, m, i, rk, q, c):
                        return 1
                    if A[i * m + c]:
                        done = False
            if done:
                break
        if best:
            rk += 1
    out[0] = rk
    return 0


def rank(a, int n, int m):
    global fast_calls, fallback_calls
    cdef i64* A = _alloc(n * m)
    cdef int status, rk = 0
    try:
        status = _load(a, n, m, A)
        if not status:
            with nogil:
                status = _rank64(A, n, m, &rk)
        if status:
            fallback_calls += 1
            return _py.rank(a, n, m)
        fast_calls += 1
        return rk
    finally:
        free(A)


cdef i64 _inv_mod(i64 u, i64 mod) noexcept nogil:
    # u is a unit mod ``mod``
    cdef i64 r0 = mod, r1 = u % mod, s0 = 0, s1 = 1, qq, tmp
    while r1:
        qq = r0 / r1
        tmp = r0 - qq * r1
        r0 = r1
        r1 = tmp
        tmp = s0 - qq * s1
        s0 = s1
        s1 = tmp
    s0 %= mod
    if s0 < 0:
        s0 += mod
    return s0


cdef void _local64(i64* A, int n, int m, i64 p, int k, i64 mod, int* vals, int* count) noexcept nogil:
    cdef int lim = n if n < m else m
    cdef int t, i, j, bi, bj, bv, v
    cdef i64 x, pv, inv, f
    cdef int nv = 0
    for t in range(lim):
        bv = k
        bi = -1
        bj = -1
        for i in range(t, n):
            for j in range(t, m):
                x = A[i * m + j]
                if x:
                    v = 0
                    while x % p == 0:
                        x = x / p
                        v += 1
                    if v < bv:
                        bv = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
            if bv == 0:
                break
        if bi < 0:
            while nv < lim:
                vals[nv] = k
                nv += 1
            break
        if bi != t:
            _swap_rows(A, m, t, bi)
        if bj != t:
            _swap_cols(A, n, m, t, bj)
        pv = 1
        for i in range(bv):
            pv *= p
        inv = _inv_mod(A[t * m + t] / pv, mod)
        for i in range(t + 1, n):
            x = A[i * m + t]
            if x:
                f = <i64> ((<i128> (x / pv) * inv) % mod)
                for j in range(t, m):
                    A[i * m + j] = <i64> (((<i128> A[i * m + j] - <i128> f * A[t * m + j]) % mod + mod) % mod)
        vals[nv] = bv
        nv += 1
    count[0] = nv


def local_valuations(a, int n, int m, p, int k):
    global fast_calls, fallback_calls
    mod_obj = p ** k
    if mod_obj >= (1 << 62):
        fallback_calls += 1
        return _py.local_valuations(a, n, m, p, k)
    cdef i64 mod = mod_obj
    cdef i64 pp = p
    cdef int lim = n if n < m else m
    cdef i64* A = _alloc(n * m)
    cdef int* vals = <int*> malloc((lim if lim > 0 else 1) * sizeof(int))
    cdef int i, j, cnt = 0
    try:
        for i in range(n):
            row = a[i]
            for j in range(m):
                A[i * m + j] = row[j] % mod_obj
        with nogil:
            _local64(A, n, m, pp, k, mod, vals, &cnt)
        fast_calls += 1
        return [vals[i] for i in range(cnt)]
    finally:
        free(A)
        free(vals)
