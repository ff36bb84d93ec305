"""Isotropic vectors of ternary quadratic forms over Q and over Q(z).

The rational case runs Legendre descent with modular square roots; the
function-field case runs the classical degree descent, taking square roots
modulo the irreducible factors of the largest coefficient (number-field square
roots go through sympy).  Every returned solution is verified exactly; failure
is reported as None, never as a wrong vector.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

import sympy
from sympy.ntheory.residue_ntheory import sqrt_mod

from .rational import Poly, RatFun, factor_poly, poly_from_sympy, poly_to_sympy

_SYMPY_X = sympy.Symbol("_conic_x")


# ---------------------------------------------------------------------------
# ternary conics over Q
# ---------------------------------------------------------------------------


def solve_conic_rational(a: Fraction, b: Fraction, c: Fraction):
    """Nontrivial rational (x, y, z) with a x^2 + b y^2 + c z^2 = 0, or None."""
    if a == 0:
        return (Fraction(1), Fraction(0), Fraction(0))
    if b == 0:
        return (Fraction(0), Fraction(1), Fraction(0))
    if c == 0:
        return (Fraction(0), Fraction(0), Fraction(1))
    from math import lcm

    scale = lcm(a.denominator, b.denominator, c.denominator)
    ai, bi, ci = int(a * scale), int(b * scale), int(c * scale)
    sol = _conic_int(ai, bi, ci)
    if sol is None:
        return None
    x, y, z = (Fraction(v) for v in sol)
    assert a * x * x + b * y * y + c * z * z == 0
    return (x, y, z)


def _strip_square_int(n: int):
    """n = s^2 * m with m squarefree; returns (m, s)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    m, s = 1, 1
    for p, e in sympy.factorint(n).items():
        p = int(p)
        if e % 2:
            m *= p
        s *= p ** (e // 2)
    return sign * m, s


_INT_SIZE_CAP = 10**26


def _conic_int(a: int, b: int, c: int, depth: int = 0):
    """Integer solution of a x^2 + b y^2 + c z^2 = 0 (coefficients nonzero)."""
    if depth > 40:
        return None
    if max(abs(a), abs(b), abs(c)) > _INT_SIZE_CAP:
        return None  # refuse to factor huge integers; honest bounded failure
    if a > 0 and b > 0 and c > 0:
        return None
    if a < 0 and b < 0 and c < 0:
        return None
    # strip square parts
    a1, sa = _strip_square_int(a)
    b1, sb = _strip_square_int(b)
    c1, sc = _strip_square_int(c)
    if (sa, sb, sc) != (1, 1, 1):
        sol = _conic_int(a1, b1, c1, depth + 1)
        if sol is None:
            return None
        x, y, z = sol
        # a (x/sa)^2 = a1 x^2 ...: scale through by lcm
        from math import lcm

        l = lcm(sa, sb, sc)
        return (x * l // sa, y * l // sb, z * l // sc)
    # common factors
    for (i, j, k) in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        coeffs = [a, b, c]
        g = gcd(coeffs[i], coeffs[j])
        if g > 1:
            coeffs[i] //= g
            coeffs[j] //= g
            coeffs[k] *= g
            sol = _conic_int(coeffs[0], coeffs[1], coeffs[2], depth + 1)
            if sol is None:
                return None
            vals = list(sol)
            vals[k] *= g
            return tuple(vals)
    # small brute search
    bound = 1 + isqrt(max(abs(a), abs(b), abs(c)))
    brute = _conic_brute(a, b, c, min(24, 4 * bound))
    if brute is not None:
        return brute
    # Legendre descent on the largest coefficient
    order = sorted(range(3), key=lambda i: abs([a, b, c][i]))
    coeffs = [a, b, c]
    ia, ib, ic = order
    aa, bb, cc = coeffs[ia], coeffs[ib], coeffs[ic]
    m = abs(cc)
    if m == 1:
        # |a|=|b|=|c|=1 with mixed signs: (1,1,...) patterns handled by brute
        return None
    target = (-aa * bb) % m
    s = sqrt_mod(target, m)
    if s is None:
        return None
    s = min(s, m - s) if s else 0
    cnew = (s * s + aa * bb) // cc
    if cnew == 0:
        # s^2 = -ab: then (x,y,z) = (s, a, 0)? a s^2 + b a^2 = a(s^2 + ab) = 0
        sol3 = (s, aa, 0)
        return _reorder_back(list(sol3), ia, ib, ic)
    sol = _conic_int(aa, bb, cnew, depth + 1)
    if sol is None:
        return None
    xt, yt, zt = sol
    x = s * xt + bb * yt
    y = s * yt - aa * xt
    z = cnew * zt
    if x == 0 and y == 0 and z == 0:
        return None
    out = _reorder_back([x, y, z], ia, ib, ic)
    return out


def _reorder_back(vals, ia, ib, ic):
    out = [0, 0, 0]
    out[ia], out[ib], out[ic] = vals[0], vals[1], vals[2]
    return tuple(out)


def _conic_brute(a, b, c, bound):
    for x in range(bound + 1):
        for y in range(bound + 1):
            if x == 0 and y == 0:
                continue
            rest = -(a * x * x + b * y * y)
            if c == 0:
                continue
            if rest % c:
                continue
            zz = rest // c
            if zz < 0:
                continue
            z = isqrt(zz)
            if z * z == zz:
                return (x, y, z)
    return None


# ---------------------------------------------------------------------------
# square roots modulo an irreducible polynomial
# ---------------------------------------------------------------------------


def _resultant_univ(a: Poly, b: Poly) -> Fraction:
    """Resultant of two univariate rational polynomials, by Euclid.

    Res(a, b) = (-1)^(da db) lc(b)^(da - dr) Res(b, r) with r = a mod b.
    """
    if a.is_zero() or b.is_zero():
        return Fraction(0)
    res = Fraction(1)
    while True:
        da, db = a.degree, b.degree
        if db == 0:
            return res * b.lead**da
        if da < db:
            if (da * db) % 2:
                res = -res
            a, b = b, a
            continue
        r = a % b
        if r.is_zero():
            return Fraction(0)
        res *= b.lead ** (da - r.degree)
        if (da * db) % 2:
            res = -res
        a, b = b, r


def _lagrange_interp(points) -> Poly:
    """Interpolating polynomial over Q through (x, y) points."""
    out = Poly.zero()
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        li = Poly.const(Fraction(1))
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            li = li * Poly([-xj, 1])
            denom *= xi - xj
        out = out + li * Poly.const(yi / denom)
    return out


class _ExtField:
    """Tiny F = Q[z]/(q) arithmetic for F[X]-polynomial gcds."""

    def __init__(self, q: Poly):
        self.q = q

    def red(self, a: Poly) -> Poly:
        return a % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def inv(self, a):
        g, s, _ = a.xgcd(self.q)
        if not g.is_one():
            raise ZeroDivisionError("non-invertible element modulo q")
        return s % self.q


def _fpoly_divmod(f, g, ext: _ExtField):
    """Division in F[X]; f, g lists of Poly (ascending in X)."""
    f = list(f)
    dg = len(g) - 1
    inv_lead = ext.inv(g[-1])
    quo = [Poly.zero()] * max(0, len(f) - dg)
    for k in range(len(f) - 1, dg - 1, -1):
        c = ext.red(f[k])
        if c.is_zero():
            continue
        factor = ext.mul(c, inv_lead)
        quo[k - dg] = factor
        for j, gc in enumerate(g):
            f[k - dg + j] = ext.red(f[k - dg + j] - factor * gc)
    while f and f[-1].is_zero():
        f.pop()
    return quo, f


def _fpoly_gcd(f, g, ext: _ExtField):
    f = [ext.red(c) for c in f]
    g = [ext.red(c) for c in g]
    while g:
        _, r = _fpoly_divmod(f, g, ext)
        f, g = g, r
    if f:
        inv = ext.inv(f[-1])
        f = [ext.mul(c, inv) for c in f]
    return f


def sqrt_mod_irreducible(abar: Poly, q: Poly):
    """s with s^2 = abar in Q[z]/(q), or None.  q monic irreducible.

    Trager-style: factor the norm of (X + k z)^2 - abar over Q, then pull the
    linear factor back with a gcd over the quotient field.
    """
    abar = abar % q
    if abar.is_zero():
        return Poly.zero()
    if q.degree == 1:
        val = abar.constant_value() if abar.is_constant() else abar.eval(-q.coeffs[0])
        if val < 0:
            return None
        num, den = val.numerator, val.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Poly.const(Fraction(rn, rd))
        return None
    if q.degree > 6 or _poly_bits(abar) > 400 or _poly_bits(q) > 400:
        return None  # honest refusal rather than an open-ended computation
    ext = _ExtField(q)
    deg_n = 2 * q.degree
    for k in range(0, 6):
        # N(X) = Res_z(q(z), (X + k z)^2 - abar(z)), by evaluation in X
        pts = []
        for t in range(deg_n + 1):
            x = Fraction(t)
            # polynomial in z: (x + k z)^2 - abar(z)
            pz = Poly([x * x]) + Poly([0, 2 * k]) * Poly([x]) + Poly([0, 0, k * k]) - abar
            pts.append((x, _resultant_univ(q, pz)))
        norm = _lagrange_interp(pts)
        if norm.is_zero():
            continue
        if norm.gcd(norm.derivative()).degree == 0:
            break
    else:
        return None
    _, factors = factor_poly(norm)
    # g(X) = (X + k theta)^2 - abar over F
    g_fx = [ext.red(Poly([0, 0, k * k]) - abar), ext.red(Poly([0, 2 * k])), Poly.one()]
    for h, _e in factors:
        if h.degree > q.degree:
            continue
        h_fx = [Poly.const(c) for c in h.coeffs]
        cand = _fpoly_gcd(g_fx, h_fx, ext)
        if len(cand) == 2:  # linear: X - root
            root = ext.red(-cand[0])
            s = ext.red(root + Poly([0, k]))
            if ((s * s - abar) % q).is_zero():
                return s
    return None


def _poly_bits(p: Poly) -> int:
    out = 0
    for c in p.coeffs:
        out = max(out, c.numerator.bit_length(), c.denominator.bit_length())
    return out


def _poly_crt(pairs):
    """CRT over coprime moduli: pairs of (residue, modulus)."""
    r, m = pairs[0]
    r = r % m
    for r2, m2 in pairs[1:]:
        g, s, t = m.xgcd(m2)
        assert g.is_one()
        # x = r + m * s * (r2 - r) mod m*m2
        diff = (r2 - r) % m2
        r = (r + m * ((s * diff) % m2)) % (m * m2)
        m = m * m2
    return r % m, m


# ---------------------------------------------------------------------------
# ternary conics over Q(z)
# ---------------------------------------------------------------------------


class _Budget:
    """Deterministic work allowance threaded through the descent."""

    def __init__(self, units: int):
        self.units = units

    def spend(self, k: int = 1) -> bool:
        self.units -= k
        return self.units > 0


def solve_conic_ratfun(d1: RatFun, d2: RatFun, d3: RatFun, max_steps: int = 120):
    """Nontrivial (x, y, z) over Q(z) with d1 x^2 + d2 y^2 + d3 z^2 = 0, or None."""
    coeffs = [d1, d2, d3]
    for i, d in enumerate(coeffs):
        if d.is_zero():
            out = [RatFun.zero()] * 3
            out[i] = RatFun.one()
            return tuple(out)
    # clear denominators: multiply the form by the lcm of denominators
    den = Poly.one()
    for d in coeffs:
        den = den * d.den.exact_div(den.gcd(d.den))
    polys = [(d * RatFun.from_poly(den)).num for d in coeffs]
    sol = _conic_polys(polys[0], polys[1], polys[2], _Budget(max_steps))
    if sol is None:
        return None
    x, y, z = (RatFun.from_poly(p) if isinstance(p, Poly) else p for p in sol)
    total = d1 * x * x + d2 * y * y + d3 * z * z
    assert total.is_zero(), "conic solver produced a wrong vector"
    return (x, y, z)


def _poly_square_part(p: Poly):
    """p = c * s^2 * m with m monic squarefree, c the leading constant data.

    Returns (m_with_constant, s) where p = (m_with_constant) * s^2.
    """
    c, parts = p.squarefree_decomposition()
    s = Poly.one()
    m = Poly.const(c)
    for q, e in parts:
        s = s * q ** (e // 2)
        if e % 2:
            m = m * q
    return m, s


def _conic_polys(a: Poly, b: Poly, c: Poly, budget: "_Budget"):
    """Solution over Q(z) of a x^2 + b y^2 + c z^2 = 0 with polynomial coeffs."""
    bits = max(_poly_bits(a), _poly_bits(b), _poly_bits(c))
    degs = max(a.degree, b.degree, c.degree)
    if bits > 160 or degs > 40:
        return None  # coefficient blowup: stop before factorization hangs
    if not budget.spend(1 + degs // 4 + bits // 32):
        return None
    # strip square parts into the variables
    a1, sa = _poly_square_part(a)
    b1, sb = _poly_square_part(b)
    c1, sc = _poly_square_part(c)
    if sa.degree > 0 or sb.degree > 0 or sc.degree > 0:
        sol = _conic_polys(a1, b1, c1, budget)
        if sol is None:
            return None
        x, y, z = sol
        return (_div(x, sa), _div(y, sb), _div(z, sc))
    # pairwise gcd reduction
    pairs = ((0, 1, 2), (0, 2, 1), (1, 2, 0))
    coeffs = [a, b, c]
    for (i, j, k) in pairs:
        g = coeffs[i].gcd(coeffs[j])
        if g.degree > 0:
            new = list(coeffs)
            new[i] = new[i].exact_div(g)
            new[j] = new[j].exact_div(g)
            new[k] = new[k] * g
            sol = _conic_polys(new[0], new[1], new[2], budget)
            if sol is None:
                return None
            vals = list(sol)
            vals[k] = _mul(vals[k], g)
            return tuple(vals)
    # all-constant base case
    if a.is_constant() and b.is_constant() and c.is_constant():
        sol = solve_conic_rational(
            a.constant_value(), b.constant_value(), c.constant_value()
        )
        if sol is None:
            return None
        return tuple(RatFun.const(v) for v in sol)
    # descend on the largest-degree coefficient
    order = sorted(range(3), key=lambda i: coeffs[i].degree)
    ia, ib, ic = order
    aa, bb, cc = coeffs[ia], coeffs[ib], coeffs[ic]
    if aa.degree + bb.degree >= 2 * cc.degree:
        # the degree descent stalls here; move a rational root of some
        # coefficient to infinity (z = r + 1/w) and restart in w
        return _conic_mobius(a, b, c, budget)
    target = -aa * bb
    _, factors = factor_poly(cc)
    residues = []
    for q, e in factors:
        assert e == 1, "largest coefficient should be squarefree here"
        s_q = sqrt_mod_irreducible(target % q, q)
        if s_q is None:
            return None
        residues.append((s_q, q))
    s, _mod = _poly_crt(residues) if residues else (Poly.zero(), Poly.one())
    num = s * s + aa * bb
    cnew, rem = num.divmod(cc)
    assert rem.is_zero()
    if cnew.is_zero():
        sol3 = (RatFun.from_poly(s), RatFun.from_poly(aa), RatFun.zero())
        return _reorder_back(list(sol3), ia, ib, ic)
    sol = _conic_polys(aa, bb, cnew, budget)
    if sol is None:
        return None
    xt, yt, zt = sol
    x = _mul(xt, s) + _mul(yt, bb)
    y = _mul(yt, s) - _mul(xt, aa)
    z = _mul(zt, cnew)
    if x.is_zero() and y.is_zero() and z.is_zero():
        return None
    return _reorder_back([x, y, z], ia, ib, ic)


ONE_P = Poly.one()


def _div(x, s: Poly):
    x = x if isinstance(x, RatFun) else RatFun.from_poly(x)
    return x / RatFun.from_poly(s)


def _mul(x, s: Poly):
    x = x if isinstance(x, RatFun) else RatFun.from_poly(x)
    return x * RatFun.from_poly(s)


def _reverse_poly(p: Poly) -> Poly:
    return Poly(tuple(reversed(p.coeffs)))


def _subst_inv_shift(p: Poly, r: Fraction) -> RatFun:
    """p(r + 1/w) as a rational function of w."""
    shifted = p.shift(r)
    return RatFun(_reverse_poly(shifted), Poly([0, 1]) ** max(shifted.degree, 0))


def _subst_back(x: RatFun, r: Fraction) -> RatFun:
    """x(w) with w replaced by 1/(z - r)."""
    dn, dd = max(x.num.degree, 0), max(x.den.degree, 0)
    num_v = _reverse_poly(x.num).shift(-r)
    den_v = _reverse_poly(x.den).shift(-r)
    v = Poly([-r, 1])
    if dd >= dn:
        return RatFun(num_v * v ** (dd - dn), den_v)
    return RatFun(num_v, den_v * v ** (dn - dd))


def _rational_root(p: Poly):
    from .rational import rational_roots

    roots = rational_roots(p)
    return roots[0] if roots else None


def _conic_leading_reduction(a: Poly, b: Poly, c: Poly, budget: "_Budget"):
    """Stall breaker for equal degrees: if the leading-coefficient form has a
    rational point, a constant change of basis cancels the top degree; then
    re-diagonalize and recurse."""
    from .linalg import diagonalize_symmetric
    from .tower import BaseField

    d = max(a.degree, b.degree, c.degree)
    pt = solve_conic_rational(a[d], b[d], c[d])
    if pt is None:
        return None
    field = BaseField()
    coeffs = [RatFun.from_poly(p) for p in (a, b, c)]
    # check whether the point already kills the whole form
    direct = coeffs[0] * pt[0] ** 2 + coeffs[1] * pt[1] ** 2 + coeffs[2] * pt[2] ** 2
    if direct.is_zero():
        return tuple(RatFun.const(v) for v in pt)
    # constant basis with the point as first column
    idx = next(i for i in range(3) if pt[i] != 0)
    cols = [list(pt)]
    for i in range(3):
        if i != idx:
            e = [Fraction(0)] * 3
            e[i] = Fraction(1)
            cols.append(e)
    m_mat = [[field.const(cols[j][i]) for j in range(3)] for i in range(3)]
    gram = [
        [coeffs[i] if i == j else field.zero() for j in range(3)] for i in range(3)
    ]
    from .linalg import mat_mul, mat_transpose

    g2 = mat_mul(mat_transpose(m_mat), mat_mul(gram, m_mat))
    s_mat, diag = diagonalize_symmetric(field, g2)
    if any(x.is_zero() for x in diag):
        # degenerate direction: its basis vector is outright isotropic
        k = next(i for i, x in enumerate(diag) if x.is_zero())
        vec = [s_mat[r][k] for r in range(3)]
        out = mat_mul(m_mat, [[v] for v in vec])
        return tuple(row[0] for row in out)
    sol = _solve_diag_ratfun(diag, budget)
    if sol is None:
        return None
    vec = [[x] for x in sol]
    out = mat_mul(m_mat, mat_mul(s_mat, vec))
    return tuple(row[0] for row in out)


def _solve_diag_ratfun(diag, budget: "_Budget"):
    """Recurse into the ternary solver from rational-function diagonal data."""
    den = Poly.one()
    for x in diag:
        den = den * x.den.exact_div(den.gcd(x.den))
    polys = [(x * RatFun.from_poly(den)).num for x in diag]
    return _conic_polys(polys[0], polys[1], polys[2], budget)


def _conic_mobius(a: Poly, b: Poly, c: Poly, budget: "_Budget"):
    """Stall breaker: substitute z = r + 1/w at a rational root r of a
    coefficient, solve in w, substitute back."""
    root = None
    for p in (a, b, c):
        if p.degree >= 1:
            root = _rational_root(p)
            if root is not None:
                break
    if root is None:
        if a.degree == b.degree == c.degree and a.degree >= 1:
            return _conic_leading_reduction(a, b, c, budget)
        return None
    new_coeffs = [_subst_inv_shift(p, root) for p in (a, b, c)]
    # clear denominators (powers of w): multiply the form by w^(2k) as needed
    den = Poly.one()
    for d in new_coeffs:
        den = den * d.den.exact_div(den.gcd(d.den))
    polys = [(d * RatFun.from_poly(den)).num for d in new_coeffs]
    sol = _conic_polys(polys[0], polys[1], polys[2], budget)
    if sol is None:
        return None
    out = []
    for x in sol:
        x = x if isinstance(x, RatFun) else RatFun.from_poly(x)
        out.append(_subst_back(x, root))
    return tuple(out)
