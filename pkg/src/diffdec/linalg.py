"""Dense exact linear algebra over a coefficient field (Q(z) or a radical tower).

Matrices are lists of lists of field elements.  Everything here is small and
exact; the large solves live in solver.py behind the modular engine.
"""

from __future__ import annotations


def mat_zero(field, rows, cols):
    return [[field.zero() for _ in range(cols)] for _ in range(rows)]


def mat_identity(field, n):
    out = mat_zero(field, n, n)
    for i in range(n):
        out[i][i] = field.one()
    return out


def mat_copy(a):
    return [row[:] for row in a]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a):
    return [[-x for x in row] for row in a]


def mat_scale(a, c):
    return [[x * c for x in row] for row in a]


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            acc = None
            for l in range(k):
                x = ai[l]
                if hasattr(x, "is_zero") and x.is_zero():
                    continue
                term = x * b[l][j]
                acc = term if acc is None else acc + term
            if acc is None:
                acc = ai[0] * b[0][j] if k else None
                acc = acc - acc
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a, v):
    out = []
    for row in a:
        acc = None
        for x, y in zip(row, v):
            term = x * y
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_derivative(a):
    return [[x.derivative() for x in row] for row in a]


def vec_derivative(v):
    return [x.derivative() for x in v]


def mat_trace(a):
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


def mat_eq(a, b):
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        if len(ra) != len(rb):
            return False
        for x, y in zip(ra, rb):
            if x != y:
                return False
    return True


def mat_is_zero(a):
    return all(x.is_zero() for row in a for x in row)


def _rref(field, a, ncols=None):
    """In-place reduced row echelon form; returns pivot column list."""
    rows = len(a)
    cols = ncols if ncols is not None else (len(a[0]) if rows else 0)
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if not a[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = _field_inverse(a[r][c])
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def _field_inverse(x):
    if hasattr(x, "inverse"):
        return x.inverse()
    return 1 / x


def mat_rank(field, a):
    if not a:
        return 0
    work = mat_copy(a)
    return len(_rref(field, work))


def mat_nullspace(field, a):
    """Basis of the right nullspace, canonical w.r.t. RREF free columns."""
    if not a:
        return []
    cols = len(a[0])
    work = mat_copy(a)
    pivots = _rref(field, work)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [field.zero() for _ in range(cols)]
        v[fc] = field.one()
        for r, pc in enumerate(pivots):
            v[pc] = -work[r][fc]
        basis.append(v)
    return basis


def mat_inverse(field, a):
    n = len(a)
    aug = [row[:] + ident_row for row, ident_row in zip(mat_copy(a), mat_identity(field, n))]
    pivots = _rref(field, aug, ncols=n)
    if len(pivots) != n:
        raise ArithmeticError("matrix is singular")
    return [row[n:] for row in aug]


def mat_det(field, a):
    n = len(a)
    work = mat_copy(a)
    det = field.one()
    for c in range(n):
        piv = None
        for r in range(c, n):
            if not work[r][c].is_zero():
                piv = r
                break
        if piv is None:
            return field.zero()
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            det = -det
        det = det * work[c][c]
        inv = _field_inverse(work[c][c])
        for r in range(c + 1, n):
            if not work[r][c].is_zero():
                f = work[r][c] * inv
                work[r] = [x - f * y for x, y in zip(work[r], work[c])]
    return det


def mat_solve(field, a, b):
    """Solve a x = b for x (b a matrix of column(s)); None if inconsistent.

    a may be rectangular with full column rank; the solution is verified.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    bw = len(b[0])
    aug = [a[i][:] + b[i][:] for i in range(rows)]
    pivots = _rref(field, aug, ncols=cols)
    if len(pivots) < cols:
        return None
    x = mat_zero(field, cols, bw)
    for r, pc in enumerate(pivots):
        for j in range(bw):
            x[pc][j] = aug[r][cols + j]
    # consistency check against the full (possibly overdetermined) system
    if not mat_eq(mat_mul(a, x), b):
        return None
    return x


def columns(a, idxs):
    return [[row[j] for j in idxs] for row in a]


def stack_columns(field, vecs):
    """Column vectors -> matrix."""
    n = len(vecs[0])
    return [[v[i] for v in vecs] for i in range(n)]


def diagonalize_symmetric(field, gram):
    """Congruence diagonalization: returns (s, diag) with s^T G s = diag(diag).

    Zero diagonals with a nonzero off-diagonal partner are handled by the
    classical v+u substitution.
    """
    n = len(gram)
    g = mat_copy(gram)
    s = mat_identity(field, n)

    def add_col(dst, src, c):
        # column op: col_dst += c * col_src, applied congruently
        for i in range(n):
            g[i][dst] = g[i][dst] + c * g[i][src]
        for j in range(n):
            g[dst][j] = g[dst][j] + c * g[src][j]
        for i in range(n):
            s[i][dst] = s[i][dst] + c * s[i][src]

    def swap_cols(i, j):
        for r in range(n):
            g[r][i], g[r][j] = g[r][j], g[r][i]
        g[i], g[j] = g[j], g[i]
        for r in range(n):
            s[r][i], s[r][j] = s[r][j], s[r][i]

    for k in range(n):
        if g[k][k].is_zero():
            pivot = None
            for i in range(k + 1, n):
                if not g[i][i].is_zero():
                    pivot = i
                    break
            if pivot is not None:
                swap_cols(k, pivot)
            else:
                off = None
                for i in range(k, n):
                    for j in range(i + 1, n):
                        if not g[i][j].is_zero():
                            off = (i, j)
                            break
                    if off:
                        break
                if off is None:
                    break  # remaining block is zero
                i, j = off
                if i != k:
                    swap_cols(k, i)
                add_col(k, j, field.one())  # v -> v + u makes diagonal nonzero
        if g[k][k].is_zero():
            continue
        inv = _field_inverse(g[k][k])
        for j in range(k + 1, n):
            if not g[k][j].is_zero():
                add_col(j, k, -(g[k][j] * inv))
    diag = [g[i][i] for i in range(n)]
    return s, diag
