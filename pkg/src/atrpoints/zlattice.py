"""Exact lattice algebra over the integers and rationals.

Everything here is elementary and exact: Hermite reduction with a
unimodular transform, integer kernels (automatically saturated), LLL
reduction driven off the Gram matrix alone, and complete Fincke-Pohst
enumeration of vectors of a prescribed value of a positive definite
quadratic form, with an optional affine offset.  No floats anywhere;
Fraction is used wherever division shows up.
"""

from fractions import Fraction
from math import isqrt


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(row) for row in zip(*M)]


def mat_mul(A, B):
    n, m, k = len(A), len(B[0]), len(B)
    Bt = list(zip(*B))
    return [[sum(A[i][t] * Bt[j][t] for t in range(k)) for j in range(m)]
            for i in range(n)]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def row_hnf_transform(M):
    """Row Hermite form of an integer matrix.

    Returns (H, U) with U unimodular and U*M = H, H in row echelon form
    with positive pivots and entries above each pivot reduced.  Zero rows
    of H sit at the bottom.
    """
    H = [list(map(int, row)) for row in M]
    nrows = len(H)
    ncols = len(H[0]) if nrows else 0
    U = identity_matrix(nrows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        # gcd elimination below row r in column c
        while True:
            pivots = [i for i in range(r, nrows) if H[i][c] != 0]
            if not pivots:
                break
            i0 = min(pivots, key=lambda i: abs(H[i][c]))
            if i0 != r:
                H[r], H[i0] = H[i0], H[r]
                U[r], U[i0] = U[i0], U[r]
            done = True
            for i in range(r + 1, nrows):
                if H[i][c] != 0:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if H[i][c] != 0:
                        done = False
            if done:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-a for a in H[r]]
            U[r] = [-a for a in U[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        r += 1
    return H, U


def hnf_basis(rows):
    """Canonical Hermite basis of the lattice spanned by integer rows."""
    H, _ = row_hnf_transform(rows)
    return [row for row in H if any(row)]


def kernel_basis(A):
    """Basis of the integer kernel {x : A x = 0} of an integer matrix.

    The kernel of the full map Z^n -> Z^m is saturated by construction.
    Rows of the result are the kernel vectors.
    """
    At = transpose(A)
    H, U = row_hnf_transform(At)
    ker = [U[i] for i in range(len(H)) if not any(H[i])]
    return ker


def solve_linear(A, b):
    """Solve A x = b exactly over Q (A square nonsingular).  Fractions."""
    n = len(A)
    M = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(b[i])]
         for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def mat_inverse(A):
    """Exact inverse of a nonsingular rational matrix (Fractions)."""
    n = len(A)
    cols = [solve_linear(A, [1 if i == j else 0 for i in range(n)])
            for j in range(n)]
    return transpose(cols)


def det(A):
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    d = Fraction(1)
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


def _gso_from_gram(G):
    """Gram-Schmidt data (mu, B) of a basis given only by its Gram matrix.

    mu[i][j] (j < i) are the GSO coefficients, B[i] = |b_i^*|^2, all exact.
    """
    n = len(G)
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = Fraction(G[i][j])
            for k in range(j):
                s -= mu[j][k] * mu[i][k] * B[k]
            mu[i][j] = s / B[j]
        s = Fraction(G[i][i])
        for k in range(i):
            s -= mu[i][k] * mu[i][k] * B[k]
        B[i] = s
    return mu, B


def lll_gram_transform(G, delta=Fraction(99, 100)):
    """LLL-reduce a positive definite Gram matrix.

    Returns (G', U) with U unimodular and G' = U G U^T the Gram matrix of
    the reduced basis.  Exact rational arithmetic; delta can be pushed to
    99/100 for a strong reduction.
    """
    n = len(G)
    G = [[Fraction(x) for x in row] for row in G]
    U = identity_matrix(n)
    mu, B = _gso_from_gram(G)

    def red(k, l):
        if 2 * abs(mu[k][l]) > 1:
            q = int(round(mu[k][l]))
            # b_k <- b_k - q b_l
            U[k] = [a - q * b for a, b in zip(U[k], U[l])]
            for j in range(n):
                G[k][j] -= q * G[l][j]
            for j in range(n):
                G[j][k] -= q * G[j][l]
            for j in range(l):
                mu[k][j] -= q * mu[l][j]
            mu[k][l] -= q

    k = 1
    while k < n:
        red(k, k - 1)
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
        else:
            # swap b_k and b_{k-1}, update GSO data in place
            U[k], U[k - 1] = U[k - 1], U[k]
            G[k], G[k - 1] = G[k - 1], G[k]
            for j in range(n):
                G[j][k], G[j][k - 1] = G[j][k - 1], G[j][k]
            m = mu[k][k - 1]
            Bnew = B[k] + m * m * B[k - 1]
            mu[k][k - 1] = m * B[k - 1] / Bnew
            B[k] = B[k - 1] * B[k] / Bnew
            B[k - 1] = Bnew
            for j in range(k - 1):
                mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
    return G, U


def lll_reduce(basis, delta=Fraction(99, 100)):
    """LLL-reduce integer basis vectors (rows).  Returns the new rows."""
    G = [[sum(x * y for x, y in zip(u, v)) for v in basis] for u in basis]
    _, U = lll_gram_transform(G, delta)
    return [[sum(U[i][t] * basis[t][j] for t in range(len(basis)))
             for j in range(len(basis[0]))] for i in range(len(basis))]


def _floor_sqrt(x):
    """floor(sqrt(x)) for a nonnegative Fraction, exact."""
    if x < 0:
        raise ValueError("negative radicand")
    num, den = x.numerator, x.denominator
    # floor(sqrt(num/den)) = floor(sqrt(num*den)/den)
    return isqrt(num * den) // den


def _int_range_for_square(t, bound):
    """All integers k with (k + t)^2 <= bound; t, bound Fractions.

    Returns (lo, hi) inclusive, or None when empty.
    """
    if bound < 0:
        return None
    s = _floor_sqrt(bound)
    # hi = floor(sqrt(bound) - t): seed and correct exactly
    hi = s - (t.numerator // t.denominator) + 2
    while (hi + t) * (hi + t) > bound:
        hi -= 1
    lo = -s - (t.numerator // t.denominator) - 2
    while (lo + t) * (lo + t) > bound:
        lo += 1
    if lo > hi:
        return None
    return lo, hi


def _cholesky(G):
    """Q(x) = sum_i d[i] (x_i + sum_{j>i} u[i][j] x_j)^2, exact."""
    n = len(G)
    A = [[Fraction(G[i][j]) for j in range(n)] for i in range(n)]
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            u[i][j] = A[i][j] / d[i]
        for r in range(i + 1, n):
            for c in range(r, n):
                A[r][c] -= d[i] * u[i][r] * u[i][c]
                A[c][r] = A[r][c]
    return d, u


def fincke_pohst(G, target, offset=None, reduce=True):
    """All integer x with (x + offset)^T G (x + offset) == target.

    G is a symmetric positive definite matrix (ints or Fractions), target
    a nonnegative rational, offset a rational vector (default 0).  The
    enumeration is the classical Fincke-Pohst backtracking on an exact
    Cholesky decomposition, so the returned list is provably complete.
    An LLL pass on G first keeps the search tree small.
    """
    n = len(G)
    target = Fraction(target)
    if offset is None:
        offset = [Fraction(0)] * n
    else:
        offset = [Fraction(c) for c in offset]

    if reduce and n > 1:
        _, U = lll_gram_transform(G)
        # x = U^T y, so Q'(y) = (U^T y)^T G (U^T y); offset transforms by
        # c' = (U^T)^{-1} c
        Ut = transpose(U)
        Gq = mat_mul(transpose(Ut), mat_mul([[Fraction(g) for g in row]
                                             for row in G], Ut))
        Utinv = mat_inverse(Ut)
        off2 = mat_vec(Utinv, offset)
        inner = fincke_pohst(Gq, target, off2, reduce=False)
        return [tuple(mat_vec(Ut, list(y))) for y in inner]

    d, u = _cholesky(G)
    sols = []
    x = [0] * n

    def rec(i, rem):
        if i < 0:
            if rem == 0:
                sols.append(tuple(x))
            return
        # shift of coordinate i given the already-chosen x_{i+1..}
        t = offset[i] + sum(u[i][j] * (x[j] + offset[j])
                            for j in range(i + 1, n))
        rng = _int_range_for_square(t, rem / d[i])
        if rng is None:
            return
        lo, hi = rng
        for k in range(lo, hi + 1):
            x[i] = k
            term = d[i] * (k + t) * (k + t)
            rec(i - 1, rem - term)
        x[i] = 0

    rec(n - 1, target)
    return sols
