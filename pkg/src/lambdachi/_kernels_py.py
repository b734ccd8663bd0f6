"""Pure-Python integer matrix kernels.

Every function takes matrices as lists of row lists of Python ints plus
explicit shapes (so empty matrices keep their column count) and never
mutates its arguments.  ``_kernels.pyx`` mirrors these signatures exactly.
"""


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _rdiv(x, y):
    # nearest-integer quotient, y > 0
    return (2 * x + y) // (2 * y)


def matmul(a, b, n, k, m):
    """Return the n×m product of an n×k and a k×m matrix."""
    bt = [[b[t][j] for t in range(k)] for j in range(m)]
    out = []
    for i in range(n):
        ai = a[i]
        out.append([sum([x * y for x, y in zip(ai, col)]) for col in bt])
    return out


def smith(a, n, m, track):
    """Smith normal form by minimal-absolute-value pivoting.

    Returns ``(U, S, V)`` with ``U·a·V = S`` when ``track`` is true and
    ``(None, S, None)`` otherwise.  Diagonal entries of S are nonnegative
    and form a divisibility chain.
    """
    A = [list(r) for r in a]
    U = _identity(n) if track else None
    V = _identity(m) if track else None
    lim = min(n, m)
    for t in range(lim):
        best = 0
        bi = bj = -1
        for i in range(t, n):
            Ai = A[i]
            for j in range(t, m):
                x = Ai[j]
                if x:
                    ax = x if x > 0 else -x
                    if best == 0 or ax < best:
                        best, bi, bj = ax, i, j
                        if ax == 1:
                            break
            if best == 1:
                break
        if best == 0:
            break
        while True:
            if bi != t:
                A[t], A[bi] = A[bi], A[t]
                if track:
                    U[t], U[bi] = U[bi], U[t]
            if bj != t:
                for row in A:
                    row[t], row[bj] = row[bj], row[t]
                if track:
                    for row in V:
                        row[t], row[bj] = row[bj], row[t]
            At = A[t]
            if At[t] < 0:
                A[t] = At = [-x for x in At]
                if track:
                    U[t] = [-x for x in U[t]]
            piv = At[t]
            # clear column t
            for i in range(t + 1, n):
                x = A[i][t]
                if x:
                    q = _rdiv(x, piv)
                    if q:
                        Ai = A[i]
                        for j in range(t, m):
                            Ai[j] -= q * At[j]
                        if track:
                            Ui, Ut = U[i], U[t]
                            for j in range(n):
                                Ui[j] -= q * Ut[j]
            # clear row t
            for j in range(t + 1, m):
                x = At[j]
                if x:
                    q = _rdiv(x, piv)
                    if q:
                        for i in range(t, n):
                            Ai = A[i]
                            Ai[j] -= q * Ai[t]
                        if track:
                            for row in V:
                                row[j] -= q * row[t]
            # any remainder left in row/column t becomes the next pivot
            best = piv
            bi = bj = t
            for i in range(t + 1, n):
                x = A[i][t]
                if x and abs(x) < best:
                    best, bi, bj = abs(x), i, t
            for j in range(t + 1, m):
                x = At[j]
                if x and abs(x) < best:
                    best, bi, bj = abs(x), t, j
            # rounded remainders are at most piv/2, so any leftover wins
            if bi != t or bj != t:
                continue
            # divisibility of the trailing block
            bad = -1
            for i in range(t + 1, n):
                Ai = A[i]
                for j in range(t + 1, m):
                    if Ai[j] % piv:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            Ab = A[bad]
            for j in range(t, m):
                At[j] += Ab[j]
            if track:
                Ut, Ub = U[t], U[bad]
                for j in range(n):
                    Ut[j] += Ub[j]
            bi = bj = t
    return U, A, V


def column_hermite(a, n, m):
    """Column Hermite normal form ``H = a·V`` with V unimodular.

    Returns ``(H, V, rank, pivot_rows)``.  The first ``rank`` columns of H
    are in lower echelon form with positive pivots at ``pivot_rows`` and
    entries left of a pivot reduced into ``[0, pivot)``; the remaining
    columns are zero, so the trailing columns of V span the kernel.
    """
    H = [list(r) for r in a]
    V = _identity(m)
    c = 0
    pivots = []
    for r in range(n):
        if c == m:
            break
        Hr = H[r]
        while True:
            best = 0
            bj = -1
            for j in range(c, m):
                x = Hr[j]
                if x:
                    ax = x if x > 0 else -x
                    if best == 0 or ax < best:
                        best, bj = ax, j
            if best == 0:
                break
            if bj != c:
                for row in H:
                    row[c], row[bj] = row[bj], row[c]
                for row in V:
                    row[c], row[bj] = row[bj], row[c]
            if Hr[c] < 0:
                for row in H:
                    row[c] = -row[c]
                for row in V:
                    row[c] = -row[c]
            piv = Hr[c]
            done = True
            for j in range(c + 1, m):
                x = Hr[j]
                if x:
                    q = _rdiv(x, piv)
                    for row in H:
                        row[j] -= q * row[c]
                    for row in V:
                        row[j] -= q * row[c]
                    if Hr[j]:
                        done = False
            if done:
                break
        if best == 0:
            continue
        piv = Hr[c]
        for j in range(c):
            q = Hr[j] // piv
            if q:
                for row in H:
                    row[j] -= q * row[c]
                for row in V:
                    row[j] -= q * row[c]
        pivots.append(r)
        c += 1
    return H, V, c, pivots


def solve_echelon(H, pivots, rank, Y, n, g):
    """Solve ``H[:, :rank]·X = Y`` for an integer X, or return None.

    H must come from :func:`column_hermite`.  Returns None when the
    columns of Y are not integer combinations of the echelon columns.
    """
    X = [[0] * g for _ in range(rank)]
    for col in range(g):
        for t in range(rank):
            r = pivots[t]
            s = Y[r][col]
            Hr = H[r]
            for u in range(t):
                s -= Hr[u] * X[u][col]
            q, rem = divmod(s, Hr[t])
            if rem:
                return None
            X[t][col] = q
        for r in range(n):
            s = 0
            Hr = H[r]
            for u in range(rank):
                s += Hr[u] * X[u][col]
            if s != Y[r][col]:
                return None
    return X


def rank(a, n, m):
    """Rank over Q by fraction-free (Bareiss) elimination."""
    A = [list(r) for r in a]
    rk = 0
    prev = 1
    for c in range(m):
        if rk == n:
            break
        pr = -1
        for i in range(rk, n):
            if A[i][c]:
                pr = i
                break
        if pr < 0:
            continue
        A[rk], A[pr] = A[pr], A[rk]
        Ar = A[rk]
        piv = Ar[c]
        for i in range(rk + 1, n):
            Ai = A[i]
            f = Ai[c]
            for j in range(c + 1, m):
                Ai[j] = (piv * Ai[j] - f * Ar[j]) // prev
            Ai[c] = 0
        prev = piv
        rk += 1
    return rk


def local_valuations(a, n, m, p, k):
    """p-adic valuations of the elementary divisors of ``a`` over Z/p^k.

    Returns ``min(n, m)`` values, each capped at k (a zero divisor reads k).
    """
    mod = p ** k
    A = [[x % mod for x in r] for r in a]
    lim = min(n, m)
    vals = []
    for t in range(lim):
        bv = k
        bi = bj = -1
        for i in range(t, n):
            Ai = A[i]
            for j in range(t, m):
                x = Ai[j]
                if x:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < bv:
                        bv, bi, bj = v, i, j
                        if v == 0:
                            break
            if bv == 0:
                break
        if bi < 0:
            vals.extend([k] * (lim - t))
            break
        if bi != t:
            A[t], A[bi] = A[bi], A[t]
        if bj != t:
            for row in A:
                row[t], row[bj] = row[bj], row[t]
        At = A[t]
        pv = p ** bv
        inv = pow(At[t] // pv, -1, mod)
        for i in range(t + 1, n):
            Ai = A[i]
            x = Ai[t]
            if x:
                f = (x // pv) * inv % mod
                for j in range(t, m):
                    Ai[j] = (Ai[j] - f * At[j]) % mod
        vals.append(bv)
    return vals
