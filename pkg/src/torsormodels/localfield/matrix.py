"""Dense matrices over K = F_q((t)) (lists of rows of LaurentSeries)."""

from __future__ import annotations

from ..errors import PrecisionError
from .field import FieldSpec
from .series import LaurentSeries


def zeros(field, n, m):
    return [[LaurentSeries.zero(field) for _ in range(m)] for _ in range(n)]


def identity(field, n):
    M = zeros(field, n, n)
    for i in range(n):
        M[i][i] = LaurentSeries.one(field)
    return M


def mat_mul(A, B, prec=None):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    F = A[0][0].field
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = LaurentSeries.zero(F)
            for l in range(k):
                a = A[i][l]
                if a.is_exact_zero():
                    continue
                b = B[l][j]
                if b.is_exact_zero():
                    continue
                s = s + a * b
            row.append(s.truncate(prec))
        out.append(row)
    return out


def mat_vec(A, v, prec=None):
    return [row[0] for row in mat_mul(A, [[x] for x in v], prec)]


def transpose(A):
    return [list(r) for r in zip(*A)]


def charpoly(M, prec=None) -> list:
    """det(Z*I - M) by Berkowitz's division-free recursion.

    Returns coefficients low -> high (monic of degree n).  Division-free,
    so truncated entries only lose the precision products lose.
    """
    n = len(M)
    if n == 0:
        raise ValueError("empty matrix")
    F = M[0][0].field
    one = LaurentSeries.one(F)
    # q holds the charpoly of the trailing (n-r)x(n-r) block, high -> low.
    q = [one, -M[n - 1][n - 1]]
    for r in range(n - 2, -1, -1):
        size = n - r
        a11 = M[r][r]
        R = [M[r][j] for j in range(r + 1, n)]
        C = [M[i][r] for i in range(r + 1, n)]
        A1 = [row[r + 1:] for row in M[r + 1:]]
        col = [one, -a11]
        vec = C
        for _ in range(size - 1):
            s = LaurentSeries.zero(F)
            for x, y in zip(R, vec):
                s = s + x * y
            col.append((-s).truncate(prec))
            vec = mat_vec(A1, vec, prec)
        new = []
        for i in range(size + 1):
            s = LaurentSeries.zero(F)
            for j in range(len(q)):
                if 0 <= i - j < len(col):
                    s = s + col[i - j] * q[j]
            new.append(s.truncate(prec))
        q = new
    out = list(reversed(q))
    out[-1] = one  # monic by construction; keep the leading 1 exact
    return out


def determinant(M, prec=None) -> LaurentSeries:
    cp = charpoly(M, prec)
    n = len(M)
    return cp[0] if n % 2 == 0 else -cp[0]


def _pick_pivot(A, col, start):
    best, best_v = None, None
    for i in range(start, len(A)):
        v = A[i][col].valuation()
        if v is not None and (best_v is None or v < best_v):
            best, best_v = i, v
    return best


def solve(A, B, prec=None):
    """Solve A X = B over K (A square, invertible), Gaussian elimination.

    Pivots are chosen of least valuation; a column with no certified
    nonzero entry raises PrecisionError.
    """
    n = len(A)
    A = [list(r) for r in A]
    B = [list(r) for r in B]
    for c in range(n):
        piv = _pick_pivot(A, c, c)
        if piv is None:
            raise PrecisionError("singular matrix at working precision")
        A[c], A[piv] = A[piv], A[c]
        B[c], B[piv] = B[piv], B[c]
        inv = A[c][c].inverse(prec)
        A[c] = [(x * inv).truncate(prec) for x in A[c]]
        B[c] = [(x * inv).truncate(prec) for x in B[c]]
        for i in range(n):
            if i == c or A[i][c].is_exact_zero():
                continue
            f = A[i][c]
            A[i] = [(x - f * y).truncate(prec) for x, y in zip(A[i], A[c])]
            B[i] = [(x - f * y).truncate(prec) for x, y in zip(B[i], B[c])]
    return B


def inverse(A, prec=None):
    F = A[0][0].field
    return solve(A, identity(F, len(A)), prec)


def residue_matrix(M, field: FieldSpec):
    """Reduce an integral matrix modulo t."""
    out = []
    for row in M:
        r = []
        for x in row:
            if not x.is_integral():
                raise ValueError("residue of a non-integral entry")
            r.append(x.coefficient(0))
        out.append(r)
    return out


def rank_over_field(M, field: FieldSpec) -> int:
    """Rank of a matrix over F_q (encoded entries)."""
    A = [list(r) for r in M]
    rank = 0
    rows = len(A)
    cols = len(A[0]) if A else 0
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = field.inv(A[rank][c])
        A[rank] = [field.mul(x, inv) for x in A[rank]]
        for i in range(rows):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank
