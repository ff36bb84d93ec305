"""Exact symmetric bilinear forms on differential modules: nondegeneracy,
isotropic vectors, hyperbolic normalization.

The isotropic search is a tiered bounded pipeline: zero diagonal entries after
congruence diagonalization, square tests on diagonal pairs, ternary conics
(over Q(z) via Legendre descent), then random three-dimensional slices.
Failure is an explicit NotFoundWithinBound; adjoining the square root of a
rational constant is reported as FoundAfterQuadratic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .conics import solve_conic_ratfun
from .linalg import (
    diagonalize_symmetric,
    mat_mul,
    mat_nullspace,
    mat_transpose,
    mat_vec,
)
from .modules import DiffModule, sym2_pairs
from .rational import RatFun
from .solver import FlatElement
from .tower import BaseField, TowerField


@dataclass
class QuadraticForm:
    """Symmetric form on a module, as an exact Gram matrix."""

    module: DiffModule
    gram: list
    flat_origin: bool = False

    @property
    def dim(self):
        return len(self.gram)

    def value(self, v):
        acc = None
        for i, row in enumerate(self.gram):
            for j, g in enumerate(row):
                if g.is_zero():
                    continue
                term = v[i] * g * v[j]
                acc = term if acc is None else acc + term
        return acc if acc is not None else self.module.field.zero()

    def pairing(self, u, v):
        acc = None
        for i, row in enumerate(self.gram):
            for j, g in enumerate(row):
                if g.is_zero():
                    continue
                term = u[i] * g * v[j]
                acc = term if acc is None else acc + term
        return acc if acc is not None else self.module.field.zero()


def form_from_flat(m: DiffModule, flat) -> QuadraticForm:
    """Gram matrix of a flat element of sym^2 M (off-diagonal halved)."""
    coords = flat.coords if isinstance(flat, FlatElement) else tuple(flat)
    n = m.dim
    pairs = sym2_pairs(n)
    if len(coords) != len(pairs):
        raise ValueError("coordinate vector is not a sym^2 element")
    field = m.field
    half = field.const(Fraction(1, 2))
    gram = [[field.zero() for _ in range(n)] for _ in range(n)]
    for idx, (i, j) in enumerate(pairs):
        c = field.coerce(coords[idx])
        if i == j:
            gram[i][i] = c
        else:
            gram[i][j] = c * half
            gram[j][i] = c * half
    return QuadraticForm(m, gram, flat_origin=isinstance(flat, FlatElement))


def gram_to_sym2_coords(gram):
    """Inverse of form_from_flat's indexing."""
    n = len(gram)
    out = []
    for (i, j) in sym2_pairs(n):
        if i == j:
            out.append(gram[i][i])
        else:
            out.append(gram[i][j] + gram[j][i])
    return out


def flatness_defect(q: QuadraticForm):
    """G' + A G + G A^T; zero iff the sym^2 element behind G is flat."""
    a = q.module.conn
    g = q.gram
    n = len(g)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = g[i][j].derivative()
            for k in range(n):
                acc = acc + a[i][k] * g[k][j] + g[i][k] * a[j][k]
            row.append(acc)
        out.append(row)
    return out


def is_nondegenerate(q: QuadraticForm) -> bool:
    from .linalg import mat_det

    return not mat_det(q.module.field, q.gram).is_zero()


# ---------------------------------------------------------------------------
# isotropic vectors
# ---------------------------------------------------------------------------


@dataclass
class IsotropicResult:
    kind: str  # "found" | "quadratic" | "not_found"
    vector: list | None = None
    constant: Fraction | None = None  # adjoined square root for "quadratic"
    radical_part: list | None = None  # vector = vector + sqrt(c)*radical_part
    bound: int | None = None

    @property
    def found(self):
        return self.kind == "found"


def _field_is_square(field, x):
    """(True, sqrt) if x is a square in the field, else (False, None)."""
    if isinstance(field, BaseField):
        if x.is_square():
            return True, x.sqrt()
        return False, None
    # one radical layer: x = x0 + x1 t (+ higher); supported for d = 2 only
    if field.d != 2:
        x0 = x.coords[0]
        if all(c.is_zero() for c in x.coords[1:]) and x0.is_square():
            return True, field.from_ratfun(x0.sqrt())
        return False, None
    x0, x1 = x.coords
    g = field.g
    if x1.is_zero():
        # sqrt in base, or t * sqrt(x0/g)
        if x0.is_square():
            return True, field.from_ratfun(x0.sqrt())
        ratio = x0 / g
        if ratio.is_square():
            return True, field.t() * field.from_ratfun(ratio.sqrt())
        return False, None
    # (u + v t)^2 = u^2 + g v^2 + 2uv t: solve u^2 = s with
    # s^2 - x0 s + g x1^2 / 4 = 0
    disc = x0 * x0 - g * x1 * x1
    if not disc.is_square():
        return False, None
    root = disc.sqrt()
    for sgn in (1, -1):
        s = (x0 + RatFun.const(sgn) * root) * RatFun.const(Fraction(1, 2))
        if s.is_square():
            u = s.sqrt()
            if u.is_zero():
                continue
            v = x1 / (RatFun.const(2) * u)
            cand = field.from_ratfun(u) + field.t() * field.from_ratfun(v)
            if cand * cand == x:
                return True, cand
    return False, None


def _constant_square_part(field, x):
    """x = c * w^2 with c a squarefree rational constant, if possible."""
    if isinstance(field, BaseField):
        out = x.constant_square_part()
        if out is None:
            return None
        c, w = out
        return c, w
    return None


def _degree_reduce_gram(field, gram, max_sweeps=40):
    """Unimodular Q[z]-column reduction of a polynomial Gram matrix.

    Scales the form by the square of a common denominator, then repeatedly
    reduces off-diagonal entries modulo small-degree diagonal ones (Gauss
    reduction over Q[z]).  Returns (basis, reduced_gram) with
    basis^T G basis = reduced (up to the square scaling, which preserves
    isotropy).  Often exposes a zero diagonal for gauge-scrambled split forms.
    """
    from .rational import ONE, Poly

    n = len(gram)
    den = ONE
    for row in gram:
        for x in row:
            den = den * x.den.exact_div(den.gcd(x.den))
    scale = RatFun.from_poly(den * den)
    p = [[(x * scale).num for x in row] for row in gram]
    basis = [[Poly.one() if i == j else Poly.zero() for j in range(n)] for i in range(n)]

    def col_op(dst, src, u: Poly):
        # col_dst -= u * col_src congruently
        for r in range(n):
            basis[r][dst] = basis[r][dst] - u * basis[r][src]
        for r in range(n):
            p[r][dst] = p[r][dst] - u * p[r][src]
        for cidx in range(n):
            p[dst][cidx] = p[dst][cidx] - u * p[src][cidx]

    def _bits(poly):
        out = 0
        for c in poly.coeffs:
            out = max(out, c.numerator.bit_length() + c.denominator.bit_length())
        return out

    def measure():
        degs = sum(max(p[i][j].degree, 0) for i in range(n) for j in range(n))
        bits = sum(_bits(p[i][j]) for i in range(n) for j in range(n))
        return (degs, bits)

    def rescale_columns():
        # congruent diagonal rescaling keeps every column content-primitive
        from math import gcd as igcd, lcm

        for j in range(n):
            den = 1
            for r in range(n):
                for c in p[r][j].coeffs:
                    den = lcm(den, c.denominator)
            num = 0
            for r in range(n):
                for c in p[r][j].coeffs:
                    num = igcd(num, abs(c.numerator * (den // c.denominator)))
            if num == 0:
                continue
            f = Fraction(den, num)
            if f == 1:
                continue
            for r in range(n):
                p[r][j] = p[r][j] * f
                basis[r][j] = basis[r][j] * f
            for c in range(n):
                p[j][c] = p[j][c] * f
            # note: p[j][j] picked up f twice, consistent with basis scaling

    def mixed_col(dst, polys):
        # col_dst <- sum polys[i] * col_i (polys[dst] != 0), congruently
        live = [i for i in range(n) if not polys[i].is_zero()]
        new_basis_col = [
            sum((polys[i] * basis[r][i] for i in live), Poly.zero()) for r in range(n)
        ]
        new_p_col = [
            sum((polys[i] * p[r][i] for i in live), Poly.zero()) for r in range(n)
        ]
        for r in range(n):
            basis[r][dst] = new_basis_col[r]
            p[r][dst] = new_p_col[r]
        new_row = [
            sum((polys[i] * p[i][c] for i in live), Poly.zero()) for c in range(n)
        ]
        for c in range(n):
            p[dst][c] = new_row[c]

    for _outer in range(6):
        for _ in range(max_sweeps):
            changed = False
            rescale_columns()
            order = sorted(range(n), key=lambda i: p[i][i].degree if not p[i][i].is_zero() else -1)
            if any(p[i][i].is_zero() for i in range(n)):
                break
            for i in order:
                pii = p[i][i]
                if pii.is_zero():
                    break
                for j in range(n):
                    if j == i:
                        continue
                    u = p[i][j] // pii
                    if not u.is_zero():
                        before = measure()
                        col_op(j, i, u)
                        if measure() < before or p[j][j].is_zero():
                            changed = True
                        else:
                            col_op(j, i, -u)
            if not changed:
                break
        rescale_columns()
        if any(p[i][i].is_zero() for i in range(n)):
            break
        if max(_bits(p[i][j]) for i in range(n) for j in range(n)) > 1500:
            break  # coefficient blowup: stop reducing
        # weighted leading-form descent: with multipliers z^w_j, an isotropic
        # vector of the top-coefficient form cancels a leading diagonal term
        d = max(p[i][i].degree for i in range(n))
        if d <= 0:
            break
        parts = [j for j in range(n) if (d - p[j][j].degree) % 2 == 0]
        weights = {j: (d - p[j][j].degree) // 2 for j in parts}
        lead = [
            [
                p[parts[a]][parts[b]][d - weights[parts[a]] - weights[parts[b]]]
                if d - weights[parts[a]] - weights[parts[b]] >= 0
                else Fraction(0)
                for b in range(len(parts))
            ]
            for a in range(len(parts))
        ]
        top_local = {a for a, j in enumerate(parts) if p[j][j].degree == d}
        cvec = _rational_isotropic(lead, required=top_local)
        if cvec is None:
            break
        top_support = [a for a in top_local if cvec[a] != 0]
        if not top_support:
            break
        pivot_local = top_support[0]
        pivot = parts[pivot_local]
        polys = [Poly.zero()] * n
        for a, j in enumerate(parts):
            if cvec[a] != 0:
                polys[j] = Poly([0] * weights[j] + [cvec[a]])
        mixed_col(pivot, polys)
        if p[pivot][pivot].degree >= d and not p[pivot][pivot].is_zero():
            break  # no progress; stop rather than loop
    basis_f = [[field.coerce(RatFun.from_poly(x)) for x in row] for row in basis]
    reduced = [[field.coerce(RatFun.from_poly(x)) for x in row] for row in p]
    return basis_f, reduced


def isotropic_vector(q: QuadraticForm, degree_bound: int | None = None) -> IsotropicResult:
    field = q.module.field
    n = q.dim
    if n < 2:
        raise ValueError("isotropic search needs dimension >= 2")
    if degree_bound is None:
        degree_bound = default_degree_bound(q)
    q_orig = q
    gram = q.gram
    pre_basis = None
    quad_candidate = None
    if isinstance(field, BaseField):
        rng = random.Random(61 + 17 * n)
        best = None
        mixer = None
        for attempt in range(12):
            mixed = gram if mixer is None else mat_mul(
                mat_transpose(mixer), mat_mul(gram, mixer)
            )
            red_basis, red = _degree_reduce_gram(field, mixed)
            if mixer is not None:
                red_basis = mat_mul(mixer, red_basis)
            for i in range(n):
                if red[i][i].is_zero():
                    vec = [red_basis[r][i] for r in range(n)]
                    if not all(x.is_zero() for x in vec):
                        assert q_orig.value(vec).is_zero()
                        return IsotropicResult("found", vector=vec)
            if attempt % 3 == 0:
                sub = _subform_search(field, red_basis, red, degree_bound)
                if sub is not None:
                    if sub.kind == "found":
                        assert q_orig.value(sub.vector).is_zero()
                        return sub
                    if quad_candidate is None:
                        quad_candidate = sub
            measure = sum(
                max(x.num.degree, 0) + max(x.den.degree, 0) for row in red for x in row
            )
            if best is None or measure < best[0]:
                best = (measure, red_basis, red)
            mixer = _random_unimodular_int(field, n, rng)
        # random 3-dimensional slices of the best reduced presentation; the
        # full symbolic diagonalization is avoided on purpose (it cascades
        # degrees and coefficient sizes)
        _, red_basis, red = best
        if n > 3:
            rng2 = random.Random(20230 + n)
            for _ in range(10):
                u_cols = [
                    [field.const(rng2.randint(-2, 2)) for _ in range(3)] for _ in range(n)
                ]
                g3 = mat_mul(mat_transpose(u_cols), mat_mul(red, u_cols))
                s3, d3 = diagonalize_symmetric(field, g3)
                sub = _isotropic_diag(field, d3, degree_bound, allow_quadratic=False)
                if sub.kind == "found":
                    v3 = mat_vec(s3, sub.vector)
                    v_red = mat_vec(u_cols, v3)
                    if all(x.is_zero() for x in v_red):
                        continue
                    vec = mat_vec(red_basis, v_red)
                    assert q_orig.value(vec).is_zero()
                    return IsotropicResult("found", vector=vec)
        if quad_candidate is not None:
            return quad_candidate
        return IsotropicResult("not_found", bound=degree_bound)

    # tower path: small symbolic diagonalization plus pair tests
    s_mat, diag = diagonalize_symmetric(field, gram)

    def lift(v_diag):
        return mat_vec(s_mat, v_diag)

    res = _isotropic_diag(field, diag, degree_bound)
    if res.kind == "found":
        vec = lift(res.vector)
        assert q_orig.value(vec).is_zero(), "isotropic candidate failed verification"
        return IsotropicResult("found", vector=vec)
    if res.kind == "quadratic":
        return IsotropicResult(
            "quadratic",
            vector=lift(res.vector),
            constant=res.constant,
            radical_part=lift(res.radical_part),
        )
    return IsotropicResult("not_found", bound=degree_bound)


def _subform_search(field, basis, gram, degree_bound):
    """Pair and triple principal-subform tests on a degree-reduced Gram."""
    n = len(gram)
    # pairs: binary form isotropic iff B^2 - q_ii q_jj is a square
    quad = None
    for i in range(n):
        for j in range(i + 1, n):
            disc = gram[i][j] * gram[i][j] - gram[i][i] * gram[j][j]
            if disc.is_zero():
                continue
            ok, w = _field_is_square(field, disc)
            if ok:
                s = -gram[i][j] + w
                t = gram[i][i]
                if s.is_zero() and t.is_zero():
                    continue
                vec = [
                    s * basis[r][i] + t * basis[r][j] for r in range(len(basis))
                ]
                if any(not x.is_zero() for x in vec):
                    return IsotropicResult("found", vector=vec)
            elif quad is None:
                csp = _constant_square_part(field, disc)
                if csp is not None and csp[0] != 1:
                    c, w0 = csp
                    # vector = (-B + w0 sqrt(c)) b_i + q_ii b_j
                    base_vec = [
                        -gram[i][j] * basis[r][i] + gram[i][i] * basis[r][j]
                        for r in range(len(basis))
                    ]
                    rad_vec = [field.coerce(w0) * basis[r][i] for r in range(len(basis))]
                    quad = IsotropicResult(
                        "quadratic", vector=base_vec, constant=c, radical_part=rad_vec
                    )
    # triples ordered by diagonal degree
    def deg_of(x):
        return max(x.num.degree, 0) + max(x.den.degree, 0)

    triples = sorted(
        ((i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)),
        key=lambda t: deg_of(gram[t[0]][t[0]]) + deg_of(gram[t[1]][t[1]]) + deg_of(gram[t[2]][t[2]]),
    )
    for (i, j, k) in triples[:8]:
        idx = (i, j, k)
        g3 = [[gram[a][b] for b in idx] for a in idx]
        if max(_entry_bits(x) for row in g3 for x in row) > 400:
            continue  # hopeless for the conic solver anyway
        s3, d3 = diagonalize_symmetric(field, g3)
        sub = _isotropic_diag(field, d3, degree_bound, allow_quadratic=False)
        if sub.kind == "found":
            v3 = mat_vec(s3, sub.vector)
            vec = [
                v3[0] * basis[r][i] + v3[1] * basis[r][j] + v3[2] * basis[r][k]
                for r in range(len(basis))
            ]
            if any(not x.is_zero() for x in vec):
                return IsotropicResult("found", vector=vec)
    return quad


def _rational_isotropic(lead, required=None):
    """Primitive integer isotropic vector of a rational symmetric matrix.

    When `required` (an index set) is given, the support of the vector must
    meet it.  Returns None if nothing is found.
    """
    from math import isqrt

    from .conics import solve_conic_rational

    n = len(lead)

    def admissible(v):
        if all(x == 0 for x in v):
            return False
        if required is None:
            return True
        return any(v[i] != 0 for i in required)

    for i in range(n):
        if lead[i][i] == 0:
            v = [0] * n
            v[i] = 1
            if admissible(v):
                return v
    for i in range(n):
        for j in range(i + 1, n):
            disc = lead[i][j] * lead[i][j] - lead[i][i] * lead[j][j]
            if disc < 0:
                continue
            num, den = disc.numerator, disc.denominator
            rn, rd = isqrt(num), isqrt(den)
            if rn * rn == num and rd * rd == den:
                w = Fraction(rn, rd)
                for sgn in (1, -1):
                    s = -lead[i][j] + sgn * w
                    t = lead[i][i]
                    v = [Fraction(0)] * n
                    v[i], v[j] = s, t
                    if admissible(v):
                        return _primitive_int_vector(v)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                idx = (i, j, k)
                sub = [[lead[a][b] for b in idx] for a in idx]
                s3, d3 = _diagonalize_fractions(sub)
                sols = []
                if any(x == 0 for x in d3):
                    kk = next(t for t, x in enumerate(d3) if x == 0)
                    sols.append([Fraction(1) if t == kk else Fraction(0) for t in range(3)])
                else:
                    sol = solve_conic_rational(d3[0], d3[1], d3[2])
                    if sol is not None:
                        sols.append(list(sol))
                for sol in sols:
                    v3 = [sum(s3[r][c] * sol[c] for c in range(3)) for r in range(3)]
                    v = [Fraction(0)] * n
                    for t, a in enumerate(idx):
                        v[a] = v3[t]
                    if admissible(v):
                        return _primitive_int_vector(v)
    return None


def _diagonalize_fractions(g):
    """Symmetric congruence diagonalization over Q; returns (s, diag)."""
    n = len(g)
    g = [row[:] for row in g]
    s = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]

    def add_col(dst, src, c):
        for i in range(n):
            g[i][dst] += c * g[i][src]
        for j in range(n):
            g[dst][j] += c * g[src][j]
        for i in range(n):
            s[i][dst] += c * s[i][src]

    def swap(i, j):
        for r in range(n):
            g[r][i], g[r][j] = g[r][j], g[r][i]
        g[i], g[j] = g[j], g[i]
        for r in range(n):
            s[r][i], s[r][j] = s[r][j], s[r][i]

    for k in range(n):
        if g[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if g[i][i] != 0), None)
            if piv is not None:
                swap(k, piv)
            else:
                off = next(
                    ((i, j) for i in range(k, n) for j in range(i + 1, n) if g[i][j] != 0),
                    None,
                )
                if off is None:
                    break
                i, j = off
                if i != k:
                    swap(k, i)
                add_col(k, j, Fraction(1))
        if g[k][k] == 0:
            continue
        for j in range(k + 1, n):
            if g[k][j] != 0:
                add_col(j, k, -g[k][j] / g[k][k])
    return s, [g[i][i] for i in range(n)]


def _primitive_int_vector(v):
    from math import gcd as igcd, lcm

    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = igcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def _random_unimodular_int(field, n, rng):
    """Product of a few integer elementary matrices; determinant 1."""
    mat = [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        c = field.const(rng.choice([-2, -1, 1, 2]))
        for r in range(n):
            mat[r][j] = mat[r][j] + c * mat[r][i]
    return mat


def default_degree_bound(q: QuadraticForm) -> int:
    maxdeg = 0
    for row in q.gram:
        for x in row:
            parts = x.coords if hasattr(x, "coords") else (x,)
            for r in parts:
                maxdeg = max(maxdeg, r.num.degree, r.den.degree)
    return 2 * maxdeg + 2


def _diag_matrix(field, diag):
    n = len(diag)
    return [[diag[i] if i == j else field.zero() for j in range(n)] for i in range(n)]


def _isotropic_diag(field, diag, degree_bound, allow_quadratic=True):
    """Isotropic vector of a diagonal form, in diagonal coordinates."""
    n = len(diag)
    for i, d in enumerate(diag):
        if d.is_zero():
            v = [field.zero()] * n
            v[i] = field.one()
            return IsotropicResult("found", vector=v)
    quad_candidate = None
    for i in range(n):
        for j in range(i + 1, n):
            ratio = -diag[j] / diag[i]
            ok, w = _field_is_square(field, ratio)
            if ok:
                v = [field.zero()] * n
                v[i] = w
                v[j] = field.one()
                return IsotropicResult("found", vector=v)
            if allow_quadratic and quad_candidate is None:
                csp = _constant_square_part(field, ratio)
                if csp is not None:
                    c, w0 = csp
                    base = [field.zero()] * n
                    base[j] = field.one()
                    rad = [field.zero()] * n
                    rad[i] = field.coerce(w0)
                    quad_candidate = IsotropicResult(
                        "quadratic", vector=base, constant=c, radical_part=rad
                    )
    if isinstance(field, BaseField):
        triples = sorted(
            (tuple(sorted((i, j, k))) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)),
        )
        for (i, j, k) in triples:
            sol = solve_conic_ratfun(diag[i], diag[j], diag[k], max_steps=max(20, degree_bound))
            if sol is not None:
                v = [field.zero()] * n
                v[i], v[j], v[k] = sol
                return IsotropicResult("found", vector=v)
    if quad_candidate is not None:
        return quad_candidate
    return IsotropicResult("not_found", bound=degree_bound)


# ---------------------------------------------------------------------------
# hyperbolic normalization
# ---------------------------------------------------------------------------


@dataclass
class HyperbolicDecomposition:
    planes: list  # [(v, u)] with q(v)=q(u)=0, B(v,u)=1, mutually orthogonal
    remainder: list  # [(vector, value)] diagonalized orthogonal complement
    blocked: IsotropicResult | None  # set when the search stopped early


def hyperbolic_partner(q: QuadraticForm, gram, v, field):
    """(u, pivot) with q(u) = 0, B(v, u) = 1; pivot is the basis vector used."""
    n = len(gram)
    row = [None] * n
    for j in range(n):
        acc = None
        for i in range(n):
            if gram[i][j].is_zero():
                continue
            term = v[i] * gram[i][j]
            acc = term if acc is None else acc + term
        row[j] = acc if acc is not None else field.zero()
    pivot = None
    best_deg = None
    for j in range(n):
        if not row[j].is_zero():
            deg = _entry_degree(row[j])
            if best_deg is None or deg < best_deg:
                best_deg = deg
                pivot = j
    if pivot is None:
        return None  # v in the radical
    e = [field.zero()] * n
    e[pivot] = field.one()
    bve = row[pivot]
    inv = bve.inverse() if hasattr(bve, "inverse") else 1 / bve
    u0 = [x * inv for x in e]
    qe = _gram_value(gram, u0, field)
    half = field.const(Fraction(1, 2))
    u = [a - qe * half * b for a, b in zip(u0, v)]
    return u, pivot


def _entry_degree(x):
    parts = x.coords if hasattr(x, "coords") else (x,)
    return max(max(r.num.degree, 0) + max(r.den.degree, 0) for r in parts)


def _entry_bits(x):
    parts = x.coords if hasattr(x, "coords") else (x,)
    out = 0
    for r in parts:
        for poly in (r.num, r.den):
            for c in poly.coeffs:
                out = max(out, c.numerator.bit_length() + c.denominator.bit_length())
    return out


def _gram_value(gram, v, field):
    acc = None
    for i, row in enumerate(gram):
        for j, g in enumerate(row):
            if g.is_zero():
                continue
            term = v[i] * g * v[j]
            acc = term if acc is None else acc + term
    return acc if acc is not None else field.zero()


def _primitive_vector(field, v):
    """Rescale a vector over Q(z) to primitive polynomial coordinates."""
    if not isinstance(field, BaseField):
        return v
    from .rational import ONE, Poly

    den = ONE
    for x in v:
        den = den * x.den.exact_div(den.gcd(x.den))
    scaled = [(x * RatFun.from_poly(den)).num for x in v]
    g = Poly.zero()
    for p in scaled:
        g = g.gcd(p)
        if g.is_one():
            break
    if g.degree > 0:
        scaled = [p.exact_div(g) for p in scaled]
    # strip rational content
    from math import gcd as igcd, lcm

    denom = 1
    for p in scaled:
        for c in p.coeffs:
            denom = lcm(denom, c.denominator)
    numg = 0
    for p in scaled:
        for c in p.coeffs:
            numg = igcd(numg, abs(c.numerator * (denom // c.denominator)))
    factor = Fraction(denom, numg) if numg else Fraction(1)
    return [field.coerce(RatFun.from_poly(p) * RatFun.const(factor)) for p in scaled]


def _weak_popov_columns(field, cols):
    """Degree-minimal basis of the polynomial column span (weak Popov form).

    cols: list of vectors with polynomial RatFun coordinates; returns reduced
    vectors spanning the same Q(z)-space.
    """
    from .rational import Poly

    work = []
    for c in cols:
        work.append([x.num if x.den.is_one() else None for x in c])
        if any(p is None for p in work[-1]):
            return cols  # non-polynomial input: skip reduction

    def lead(c):
        deg, pos = -1, -1
        for i, p in enumerate(c):
            if p.degree > deg:
                deg, pos = p.degree, i
        return pos, deg

    for _ in range(400):
        info = [lead(c) for c in work]
        seen = {}
        clash = None
        for idx, (pos, deg) in enumerate(info):
            if pos < 0:
                continue
            if pos in seen:
                clash = (idx, seen[pos])
                break
            seen[pos] = idx
        if clash is None:
            break
        a, b = clash
        if info[a][1] < info[b][1]:
            a, b = b, a
        pa, da = lead(work[a])
        pb, db = lead(work[b])
        factor = Poly([0] * (da - db) + [work[a][pa].lead / work[b][pb].lead])
        work[a] = [x - factor * y for x, y in zip(work[a], work[b])]
        if all(p.is_zero() for p in work[a]):
            return cols  # dependent columns; bail out conservatively
    return [[field.coerce(RatFun.from_poly(p)) for p in c] for c in work]


def hyperbolic_normalize(
    q: QuadraticForm, target_isotropic_dim: int, degree_bound: int | None = None
) -> HyperbolicDecomposition:
    """Extract hyperbolic planes until the target or until the search stalls.

    A stalled extraction is retried from a randomly premixed basis: different
    plane choices leave different complements, and one of them usually goes
    through.
    """
    from .linalg import mat_det

    field = q.module.field
    if mat_det(field, q.gram).is_zero():
        raise ValueError("hyperbolic normalization needs a nondegenerate form")
    best = None
    attempts = 4 if isinstance(field, BaseField) else 1
    rng = random.Random(4099)
    for attempt in range(attempts):
        if attempt == 0:
            start = q
        else:
            mix = _random_unimodular_int(field, q.dim, rng)
            mixed = mat_mul(mat_transpose(mix), mat_mul(q.gram, mix))
            start = QuadraticForm(q.module, mixed)
        dec = _hyperbolic_once(start, target_isotropic_dim, degree_bound)
        if attempt > 0 and dec.planes:
            # planes live in premixed coordinates; push them back
            dec = HyperbolicDecomposition(
                [(mat_vec(mix, v), mat_vec(mix, u)) for v, u in dec.planes],
                [(mat_vec(mix, vec), val) for vec, val in dec.remainder],
                dec.blocked,
            )
        if len(dec.planes) >= target_isotropic_dim:
            return dec
        if best is None or len(dec.planes) > len(best.planes):
            best = dec
    return best


def _hyperbolic_once(
    q: QuadraticForm, target_isotropic_dim: int, degree_bound: int | None = None
) -> HyperbolicDecomposition:
    field = q.module.field
    n = q.dim
    basis = [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]
    gram = [row[:] for row in q.gram]
    planes = []
    blocked = None
    while len(planes) < target_isotropic_dim and len(gram) >= 2:
        res = _isotropic_for_sub(field, gram, q.module, degree_bound)
        if res.kind != "found":
            blocked = res
            break
        v = _primitive_vector(field, res.vector)
        partner = hyperbolic_partner(q, gram, v, field)
        if partner is None:
            blocked = IsotropicResult("not_found", bound=degree_bound)
            break
        u, pivot = partner
        v_orig = mat_vec(basis, v)
        u_orig = mat_vec(basis, u)
        planes.append((v_orig, u_orig))
        # orthogonal complement of span(v, u) = span(v, e_pivot); the raw
        # pivot vector keeps the nullspace entries small
        e_piv = [field.zero()] * len(gram)
        e_piv[pivot] = field.one()
        rows = []
        for w in (v, e_piv):
            rows.append([_pair_row(gram, w, j, field) for j in range(len(gram))])
        comp = mat_nullspace(field, rows)
        if not comp:
            gram = []
            break
        comp = [_primitive_vector(field, vec) for vec in comp]
        comp = _weak_popov_columns(field, comp)
        comp = [_primitive_vector(field, vec) for vec in comp]
        w_cols = [[vec[i] for vec in comp] for i in range(len(gram))]
        basis = mat_mul(basis, w_cols)
        gram = mat_mul(mat_transpose(w_cols), mat_mul(gram, w_cols))
    remainder = []
    if gram:
        s_mat, diag = diagonalize_symmetric(field, gram)
        cols = mat_mul(basis, s_mat)
        for k, d in enumerate(diag):
            remainder.append(([cols[i][k] for i in range(n)], d))
    return HyperbolicDecomposition(planes, remainder, blocked)


def _pair_row(gram, w, j, field):
    acc = None
    for i in range(len(gram)):
        if gram[i][j].is_zero():
            continue
        term = w[i] * gram[i][j]
        acc = term if acc is None else acc + term
    return acc if acc is not None else field.zero()


def _isotropic_for_sub(field, gram, module, degree_bound):
    carrier = DiffModule(module.field, [[field.zero()] * len(gram) for _ in range(len(gram))])
    sub = QuadraticForm(carrier, gram)
    if len(gram) < 2:
        return IsotropicResult("not_found", bound=degree_bound)
    return isotropic_vector(sub, degree_bound)
