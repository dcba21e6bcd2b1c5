"""Dense exact linear algebra over any field whose elements support +, -, *, / and int coercion.

Matrices are lists of rows. Nothing here rounds; zero tests are exact.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DimensionMismatch, SingularMatrix
from .scalar import ONE, ZERO, Scalar


def _zero_like(x):
    return x * 0


def _one_like(x):
    return x * 0 + 1


def as_matrix(rows) -> list[list[Scalar]]:
    return [[Scalar.coerce(x) for x in row] for row in rows]


def _field(A):
    """Plain ints and fractions are promoted to Scalar; other field elements pass through."""
    if A and A[0] and isinstance(A[0][0], (int, Fraction)):
        return as_matrix(A)
    return A


def shape(A):
    return len(A), (len(A[0]) if A else 0)


def identity(n, one=ONE):
    zero = one * 0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(r, c, zero=ZERO):
    return [[zero] * c for _ in range(r)]


def transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def matmul(A, B):
    if not A or not B:
        return [[] for _ in A]
    if len(A[0]) != len(B):
        raise DimensionMismatch(f"cannot multiply {shape(A)} by {shape(B)}")
    Bt = list(zip(*B))
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if a]
        new = []
        for col in Bt:
            acc = None
            for k, a in nz:
                b = col[k]
                if b:
                    acc = a * b if acc is None else acc + a * b
            new.append(acc if acc is not None else _zero_like(row[0]))
        out.append(new)
    return out


def matvec(A, v):
    return [sum_products(row, v) for row in A]


def sum_products(xs, ys):
    acc = None
    for a, b in zip(xs, ys):
        if a and b:
            acc = a * b if acc is None else acc + a * b
    return acc if acc is not None else (xs[0] * 0 if xs else ZERO)


def add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(A, c):
    return [[a * c for a in row] for row in A]


def neg(A):
    return [[-a for a in row] for row in A]


def is_zero_matrix(A) -> bool:
    return all(not x for row in A for x in row)


def is_symmetric(A) -> bool:
    n = len(A)
    return all(len(row) == n for row in A) and all(A[i][j] == A[j][i] for i in range(n) for j in range(i))


def block_diag(*blocks, zero=ZERO):
    n = sum(len(b) for b in blocks)
    out = zeros(n, n, zero)
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


def rref(A):
    """Reduced row echelon form. Returns (R, pivot_columns)."""
    R = [list(row) for row in _field(A)]
    rows, cols = shape(R)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c] if not hasattr(R[r][c], "inverse") else R[r][c].inverse()
        R[r] = [x * inv for x in R[r]]
        pivot_row = R[r]
        live = [j for j in range(c, cols) if pivot_row[j]]
        for i in range(rows):
            if i != r:
                f = R[i][c]
                if f:
                    row = R[i]
                    for j in live:
                        row[j] = row[j] - f * pivot_row[j]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def nullspace(A):
    """Basis (list of vectors) of {x : A x = 0}."""
    rows, cols = shape(A)
    if cols == 0:
        return []
    R, pivots = rref(A)
    zero = _zero_like(R[0][0]) if R and R[0] else ZERO
    one = zero + 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * cols
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def inverse(A):
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionMismatch("inverse of a non-square matrix")
    if n == 0:
        return []
    A = _field(A)
    one = _one_like(A[0][0])
    zero = one * 0
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is not invertible")
    return [row[n:] for row in R]


def solve(A, B):
    """Solve A X = B for square invertible A (B a matrix)."""
    return matmul(inverse(A), B)


def det(A):
    n = len(A)
    if n == 0:
        return ONE
    M = [list(row) for row in _field(A)]
    sign = 1
    d = _one_like(M[0][0])
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            return _zero_like(M[0][0])
        if p != c:
            M[c], M[p] = M[p], M[c]
            sign = -sign
        piv = M[c][c]
        d = d * piv
        inv = 1 / piv if not hasattr(piv, "inverse") else piv.inverse()
        for i in range(c + 1, n):
            f = M[i][c]
            if f:
                f = f * inv
                row, prow = M[i], M[c]
                for j in range(c + 1, n):
                    if prow[j]:
                        row[j] = row[j] - f * prow[j]
    return d if sign > 0 else -d


def trace(A):
    acc = _zero_like(A[0][0]) if A else ZERO
    for i in range(len(A)):
        acc = acc + A[i][i]
    return acc


def charpoly(A):
    """Coefficients [c_0, ..., c_n] of det(x I - A), constant term first (Faddeev-LeVerrier)."""
    n = len(A)
    if n == 0:
        return [ONE]
    A = _field(A)
    one = _one_like(A[0][0])
    zero = one * 0
    coeffs = [zero] * (n + 1)
    coeffs[n] = one
    M = zeros(n, n, zero)
    for k in range(1, n + 1):
        M = matmul(A, M)
        c_prev = coeffs[n - k + 1]
        for i in range(n):
            M[i][i] = M[i][i] + c_prev
        AM = matmul(A, M)
        coeffs[n - k] = -trace(AM) / k
    return coeffs


def matpow(A, k: int):
    n = len(A)
    result = identity(n, _one_like(A[0][0]) if n else ONE)
    base = A
    while k:
        if k & 1:
            result = matmul(result, base)
        k >>= 1
        if k:
            base = matmul(base, base)
    return result


def poly_eval_matrix(coeffs, A):
    """sum_k coeffs[k] A^k by Horner."""
    n = len(A)
    one = _one_like(A[0][0]) if n else ONE
    result = zeros(n, n, one * 0)
    for c in reversed(coeffs):
        result = matmul(result, A)
        for i in range(n):
            result[i][i] = result[i][i] + c
    return result


def column_space_rank(vectors) -> int:
    return rank(vectors) if vectors else 0


# --- univariate polynomials as coefficient lists (constant first) -------------


def upoly_trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def upoly_eval(p, x):
    acc = x * 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def upoly_derivative(p):
    return [c * k for k, c in enumerate(p)][1:]


def upoly_divmod(a, b):
    a, b = upoly_trim(a), upoly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [b[-1] * 0] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    lead_inv = 1 / b[-1] if not hasattr(b[-1], "inverse") else b[-1].inverse()
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] * lead_inv
        q[shift] = f
        for k, c in enumerate(b):
            r[k + shift] = r[k + shift] - f * c
        r = upoly_trim(r)
    return upoly_trim(q), r


def upoly_gcd(a, b):
    a, b = upoly_trim(a), upoly_trim(b)
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead_inv = 1 / a[-1] if not hasattr(a[-1], "inverse") else a[-1].inverse()
    return [c * lead_inv for c in a]
