"""Differential modules over Q(z) or a radical tower, as connection matrices.

Convention: for the basis e_1..e_n the connection matrix A satisfies
partial(e_j) = sum_i A[i][j] e_i, so a coordinate column vector v transforms
as partial(v) = v' + A v.  The classical solution convention Y' = AY of the
literature corresponds to A = -conn.

Basis orders are fixed once and for all:
  tensor   e_i (x) f_j            lexicographic, (i, j) with i major
  sym^k    monomials i1 <= ... <= ik   lexicographic
  ext^k    i1 < ... < ik               lexicographic
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

from .linalg import (
    mat_add,
    mat_derivative,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_eq,
    mat_trace,
    mat_transpose,
    mat_zero,
)
from .rational import RatFun
from .tower import BaseField, TowerField


class DiffModule:
    """A differential module: a field and an n x n connection matrix."""

    def __init__(self, field, conn):
        n = len(conn)
        for row in conn:
            if len(row) != n:
                raise ValueError("connection matrix must be square")
        self.field = field
        self.conn = [[field.coerce(x) for x in row] for row in conn]

    @property
    def dim(self) -> int:
        return len(self.conn)

    def trace(self):
        return mat_trace(self.conn)

    def __eq__(self, other):
        return (
            isinstance(other, DiffModule)
            and self.field == other.field
            and mat_eq(self.conn, other.conn)
        )

    def apply_d(self, v):
        """partial(v) = v' + A v for a coordinate vector v."""
        out = []
        for i in range(self.dim):
            acc = v[i].derivative()
            for j in range(self.dim):
                if not self.conn[i][j].is_zero():
                    acc = acc + self.conn[i][j] * v[j]
            out.append(acc)
        return out

    def is_flat(self, v) -> bool:
        return all(x.is_zero() for x in self.apply_d(v))

    def __repr__(self):
        return f"DiffModule(dim={self.dim}, field={self.field!r})"


@dataclass(frozen=True)
class RankOneModule:
    """One-dimensional module Ke with partial(e) = a e."""

    field: object
    a: object

    def as_module(self) -> DiffModule:
        return DiffModule(self.field, [[self.a]])

    def is_trivial_connection(self) -> bool:
        return self.a.is_zero()


class GaugeMatrix:
    """An invertible basis change; inverse computed and cached at creation."""

    def __init__(self, field, mat):
        self.field = field
        self.mat = [[field.coerce(x) for x in row] for row in mat]
        self.inv = mat_inverse(field, self.mat)

    @property
    def dim(self):
        return len(self.mat)

    def inverse_gauge(self) -> "GaugeMatrix":
        g = GaugeMatrix.__new__(GaugeMatrix)
        g.field = self.field
        g.mat = self.inv
        g.inv = self.mat
        return g


# ---------------------------------------------------------------------------
# basis index bookkeeping
# ---------------------------------------------------------------------------


def tensor_index(n2: int):
    def pos(i, j):
        return i * n2 + j

    return pos


def sym_basis(n: int, k: int):
    return list(combinations_with_replacement(range(n), k))


def ext_basis(n: int, k: int):
    return list(combinations(range(n), k))


def sym2_pairs(n: int):
    return sym_basis(n, 2)


def ext2_pairs(n: int):
    return ext_basis(n, 2)


# ---------------------------------------------------------------------------
# constructions of linear algebra
# ---------------------------------------------------------------------------


def dual(m: DiffModule) -> DiffModule:
    a = m.conn
    n = m.dim
    return DiffModule(m.field, [[-a[j][i] for j in range(n)] for i in range(n)])


def tensor(m: DiffModule, n: DiffModule) -> DiffModule:
    if m.field != n.field:
        raise ValueError("tensor of modules over different field towers")
    f = m.field
    dm, dn = m.dim, n.dim
    size = dm * dn
    out = mat_zero(f, size, size)
    for i in range(dm):
        for j in range(dn):
            col = i * dn + j
            for k in range(dm):
                if not m.conn[k][i].is_zero():
                    out[k * dn + j][col] = out[k * dn + j][col] + m.conn[k][i]
            for l in range(dn):
                if not n.conn[l][j].is_zero():
                    out[i * dn + l][col] = out[i * dn + l][col] + n.conn[l][j]
    return DiffModule(f, out)


def sym_power(m: DiffModule, k: int) -> DiffModule:
    if k < 1:
        raise ValueError("symmetric power needs k >= 1")
    if k == 1:
        return DiffModule(m.field, m.conn)
    f = m.field
    basis = sym_basis(m.dim, k)
    index = {mono: p for p, mono in enumerate(basis)}
    size = len(basis)
    out = mat_zero(f, size, size)
    for col, mono in enumerate(basis):
        for t in range(k):
            it = mono[t]
            for r in range(m.dim):
                c = m.conn[r][it]
                if c.is_zero():
                    continue
                new = tuple(sorted(mono[:t] + (r,) + mono[t + 1 :]))
                row = index[new]
                out[row][col] = out[row][col] + c
    return DiffModule(f, out)


def ext_power(m: DiffModule, k: int) -> DiffModule:
    if k < 1:
        raise ValueError("exterior power needs k >= 1")
    if k > m.dim:
        raise ValueError("exterior power exceeds module dimension")
    if k == 1:
        return DiffModule(m.field, m.conn)
    f = m.field
    basis = ext_basis(m.dim, k)
    index = {mono: p for p, mono in enumerate(basis)}
    size = len(basis)
    out = mat_zero(f, size, size)
    for col, mono in enumerate(basis):
        for t in range(k):
            it = mono[t]
            for r in range(m.dim):
                c = m.conn[r][it]
                if c.is_zero():
                    continue
                raw = mono[:t] + (r,) + mono[t + 1 :]
                if len(set(raw)) < k:
                    continue
                new = tuple(sorted(raw))
                sign = _sort_sign(raw)
                row = index[new]
                out[row][col] = out[row][col] + (c if sign > 0 else -c)
    return DiffModule(f, out)


def _sort_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign


def hom_module(m: DiffModule, n: DiffModule) -> DiffModule:
    """Hom(M, N) = dual(M) (x) N with the matrix-entry basis e_i^* (x) f_j."""
    return tensor(dual(m), n)


def end_module(m: DiffModule) -> DiffModule:
    return hom_module(m, m)


def hom_to_matrix(coords, dim_m: int, dim_n: int):
    """Hom(M,N) coordinates -> the dim_n x dim_m matrix of the map."""
    return [[coords[i * dim_n + j] for i in range(dim_m)] for j in range(dim_n)]


def matrix_to_hom(mat):
    dim_n = len(mat)
    dim_m = len(mat[0])
    return [mat[j][i] for i in range(dim_m) for j in range(dim_n)]


def gauge(m: DiffModule, t: GaugeMatrix) -> DiffModule:
    if t.dim != m.dim:
        raise ValueError("gauge matrix size mismatch")
    new = mat_mul(t.inv, mat_add(mat_mul(m.conn, t.mat), mat_derivative(t.mat)))
    return DiffModule(m.field, new)


def twist(m: DiffModule, l: RankOneModule) -> DiffModule:
    a = m.field.coerce(l.a)
    out = [row[:] for row in m.conn]
    for i in range(m.dim):
        out[i][i] = out[i][i] + a
    return DiffModule(m.field, out)


def companion_from_operator(field, coeffs) -> DiffModule:
    """Module K[d]/K[d]L for monic L = d^n + c_{n-1} d^{n-1} + ... + c_0.

    Basis e, de, ..., d^{n-1}e; the last column implements
    d(d^{n-1}e) = -sum c_i d^i e.
    """
    cs = [field.coerce(c) for c in coeffs]
    n = len(cs)
    out = mat_zero(field, n, n)
    for j in range(n - 1):
        out[j + 1][j] = field.one()
    for i in range(n):
        out[i][n - 1] = out[i][n - 1] - cs[i]
    return DiffModule(field, out)


def direct_sum(m: DiffModule, n: DiffModule) -> DiffModule:
    if m.field != n.field:
        raise ValueError("direct sum over different field towers")
    f = m.field
    size = m.dim + n.dim
    out = mat_zero(f, size, size)
    for i in range(m.dim):
        for j in range(m.dim):
            out[i][j] = m.conn[i][j]
    for i in range(n.dim):
        for j in range(n.dim):
            out[m.dim + i][m.dim + j] = n.conn[i][j]
    return DiffModule(f, out)


def det_module(m: DiffModule) -> RankOneModule:
    return RankOneModule(m.field, m.trace())


def is_trace_zero(m: DiffModule) -> bool:
    return m.trace().is_zero()


def trivial_module(field, dim=1) -> DiffModule:
    return DiffModule(field, mat_zero(field, dim, dim))


# ---------------------------------------------------------------------------
# bilinear coordinate embeddings (also the Leibniz oracles' raw material)
# ---------------------------------------------------------------------------


def tensor_coords(field, x, y):
    return [xi * yj for xi in x for yj in y]


def sym2_coords(field, x, y):
    """Coordinates of the symmetric product x.y in the sym^2 monomial basis."""
    n = len(x)
    out = []
    for (i, j) in sym2_pairs(n):
        if i == j:
            out.append(x[i] * y[i])
        else:
            out.append(x[i] * y[j] + x[j] * y[i])
    return out


def ext2_coords(field, x, y):
    n = len(x)
    return [x[i] * y[j] - x[j] * y[i] for (i, j) in ext2_pairs(n)]


def induced_tensor_map(field, s, t):
    """Kronecker product acting on the tensor basis."""
    dm, dn = len(s), len(t)
    out = mat_zero(field, dm * dn, dm * dn)
    for i in range(dm):
        for j in range(dn):
            col = i * dn + j
            for k in range(dm):
                if s[k][i].is_zero():
                    continue
                for l in range(dn):
                    if t[l][j].is_zero():
                        continue
                    out[k * dn + l][col] = s[k][i] * t[l][j]
    return out


def induced_sym2_map(field, t):
    """Matrix induced on sym^2 by the linear map with matrix t."""
    n = len(t)
    pairs = sym2_pairs(n)
    cols = []
    for (i, j) in pairs:
        ti = [t[r][i] for r in range(n)]
        tj = [t[r][j] for r in range(n)]
        if i == j:
            cols.append(sym2_coords(field, ti, ti))
        else:
            # image of e_i e_j is (T e_i).(T e_j); sym2_coords of (x, y) with
            # x = Ti, y = Tj already symmetrizes
            cols.append(sym2_coords(field, ti, tj))
    return [[cols[c][r] for c in range(len(pairs))] for r in range(len(pairs))]


def induced_ext2_map(field, t):
    n = len(t)
    pairs = ext2_pairs(n)
    cols = []
    for (i, j) in pairs:
        ti = [t[r][i] for r in range(n)]
        tj = [t[r][j] for r in range(n)]
        cols.append(ext2_coords(field, ti, tj))
    return [[cols[c][r] for c in range(len(pairs))] for r in range(len(pairs))]


# ---------------------------------------------------------------------------
# restriction of scalars (tower -> base), used by the flat solver
# ---------------------------------------------------------------------------


def restrict_scalars(m: DiffModule):
    """A module over K(g^(1/d)) viewed as a module over Q(z) of dim n*d.

    Coordinates flatten as (j, i) -> j*d + i for e_j t^i.  Returns
    (base_module, pack, unpack) where pack/unpack convert coordinate vectors.
    """
    field = m.field
    if isinstance(field, BaseField):
        return m, (lambda v: v), (lambda v: v)
    if not isinstance(field, TowerField):
        raise TypeError("unknown field type")
    d, g = field.d, field.g
    lam = field.t_log_deriv
    n = m.dim
    base = BaseField()
    size = n * d
    out = mat_zero(base, size, size)
    for i in range(d):
        out[0 * d + i][0 * d + i] = out[0 * d + i][0 * d + i]  # keep shape
    for j in range(n):
        for i in range(d):
            col = j * d + i
            # derivation of t^i contributes i*lam on the same slot
            if i:
                out[j * d + i][col] = out[j * d + i][col] + RatFun.const(i) * lam
            # connection entries A[k][j] = sum_m a_m t^m
            for k in range(n):
                entry = m.conn[k][j]
                for mdeg, am in enumerate(entry.coords):
                    if am.is_zero():
                        continue
                    tot = i + mdeg
                    row_i = tot % d
                    factor = am * (g ** (tot // d))
                    out[k * d + row_i][col] = out[k * d + row_i][col] + factor
    base_module = DiffModule(base, out)

    def pack(v_tower):
        flat = []
        for x in v_tower:
            flat.extend(x.coords)
        return flat

    def unpack(v_flat):
        from .tower import TowerElem

        return [
            TowerElem(field, tuple(v_flat[j * d : (j + 1) * d])) for j in range(n)
        ]

    return base_module, pack, unpack


def module_gauge_equal(a: DiffModule, b: DiffModule, t: GaugeMatrix) -> bool:
    """Does gauge(a, t) equal b exactly?"""
    return gauge(a, t) == b
