"""Exact arithmetic in Q[z] and Q(z) with the derivation d/dz.

Polynomials are coefficient tuples over Fraction, ascending degree, no
trailing zeros.  Rational functions keep a monic denominator coprime to the
numerator, so equality is literal equality of the representation.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

import sympy

Rat = Fraction

_SYMPY_Z = sympy.Symbol("z")


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to a rational constant")


class Poly:
    """Univariate polynomial over Q, coefficients ascending."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly(())

    @staticmethod
    def one() -> "Poly":
        return Poly((1,))

    @staticmethod
    def const(c) -> "Poly":
        return Poly((c,))

    @staticmethod
    def x() -> "Poly":
        return Poly((0, 1))

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (Fraction(1),)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lead(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __hash__(self):
        return hash(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce_poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_coerce_poly(other))

    def __rsub__(self, other):
        return _coerce_poly(other) + (-self)

    def __mul__(self, other):
        other = _coerce_poly(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ci in enumerate(a):
            if ci == 0:
                continue
            for j, cj in enumerate(b):
                out[i + j] += ci * cj
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        dlead = other.lead
        dd = other.degree
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            f = c / dlead
            q[k - dd] = f
            for j, dc in enumerate(other.coeffs):
                rem[k - dd + j] -= f * dc
        return Poly(q), Poly(rem)

    def __floordiv__(self, other):
        return self.divmod(_coerce_poly(other))[0]

    def __mod__(self, other):
        return self.divmod(_coerce_poly(other))[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    # -- calculus and evaluation -------------------------------------------

    def derivative(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def eval(self, x) -> Fraction:
        x = _as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, a) -> "Poly":
        """Return p(z + a)."""
        a = _as_fraction(a)
        n = self.degree
        if n <= 0 or a == 0:
            return self
        out = [Fraction(0)] * (n + 1)
        for m, c in enumerate(self.coeffs):
            if c == 0:
                continue
            pw = Fraction(1)
            for k in range(m, -1, -1):
                out[k] += c * comb(m, k) * pw
                pw *= a
        return Poly(out)

    # -- normal forms ------------------------------------------------------

    def monic(self) -> "Poly":
        if self.is_zero() or self.lead == 1:
            return self
        inv = 1 / self.lead
        return Poly(tuple(c * inv for c in self.coeffs))

    def _int_coeffs(self):
        """Clear denominators: integer coefficient list (content not stripped)."""
        from math import lcm

        denoms = lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1
        return [int(c * denoms) for c in self.coeffs]

    def gcd(self, other: "Poly") -> "Poly":
        """Monic gcd; primitive PRS for small inputs, modular gcd otherwise."""
        if self.is_zero():
            return other.monic()
        if other.is_zero():
            return self.monic()
        if self.is_constant() or other.is_constant():
            return ONE
        a = _strip_content(self._int_coeffs())
        b = _strip_content(other._int_coeffs())
        bits = max(max(abs(c) for c in a).bit_length(), max(abs(c) for c in b).bit_length())
        if bits > 96 or min(len(a), len(b)) > 14:
            g = _gcd_modular(a, b)
            if g is not None:
                return g
        if len(a) < len(b):
            a, b = b, a
        while True:
            r = _int_prem(a, b)
            if not r:
                break
            a, b = b, _strip_content(r)
        return Poly(b).monic()

    def xgcd(self, other: "Poly"):
        """Extended gcd: returns (g, s, t) with s*self + t*other = g, g monic."""
        a, b = self, other
        s0, s1 = Poly.one(), Poly.zero()
        t0, t1 = Poly.zero(), Poly.one()
        while not b.is_zero():
            q, r = a.divmod(b)
            a, b = b, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if a.is_zero():
            return a, s0, t0
        lead = a.lead
        inv = 1 / lead
        return a.monic(), s0 * inv, t0 * inv

    def squarefree_decomposition(self):
        """Yun's algorithm: returns (content, [(a_i, i)]) with p = c * prod a_i^i,
        the a_i monic squarefree and pairwise coprime."""
        if self.is_zero():
            raise ValueError("zero polynomial has no squarefree decomposition")
        c = self.lead
        p = self.monic()
        if p.degree == 0:
            return c, []
        parts = []
        g = p.gcd(p.derivative())
        w = p.exact_div(g)
        y = p.derivative().exact_div(g)
        i = 1
        z = y - w.derivative()
        while not w.is_constant():
            g_i = w.gcd(z)
            if g_i.degree > 0:
                parts.append((g_i, i))
            w = w.exact_div(g_i)
            z = z.exact_div(g_i) - w.derivative()
            i += 1
        return c, parts

    def radical(self) -> "Poly":
        """Product of the distinct monic irreducible factors."""
        _, parts = self.squarefree_decomposition()
        out = Poly.one()
        for a, _ in parts:
            out = out * a
        return out

    def is_square(self) -> bool:
        if self.is_zero():
            return True
        c, parts = self.squarefree_decomposition()
        if any(i % 2 for _, i in parts):
            return False
        return _fraction_is_square(c)

    def sqrt(self) -> "Poly":
        if self.is_zero():
            return Poly(())
        c, parts = self.squarefree_decomposition()
        if any(i % 2 for _, i in parts):
            raise ArithmeticError("polynomial is not a square")
        root = Poly.const(_fraction_sqrt(c))
        for a, i in parts:
            root = root * a ** (i // 2)
        return root

    # -- printing ----------------------------------------------------------

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def _coerce_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot coerce {x!r} to Poly")


def _strip_content(cs):
    """Divide an integer coefficient list by its content (sign-normalized)."""
    from math import gcd as _igcd

    g = 0
    for c in cs:
        g = _igcd(g, abs(c))
        if g == 1:
            break
    if g == 0:
        return []
    if cs[-1] < 0:
        g = -g
    return [c // g for c in cs]


_GCD_PRIMES = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
    2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
    2147483423, 2147483399, 2147483353, 2147483323, 2147483269,
    2147483249, 2147483237, 2147483179, 2147483171, 2147483137,
    2147483123, 2147483077, 2147483069, 2147483059, 2147483053,
    2147483033, 2147483029, 2147482951, 2147482949, 2147482943,
    2147482937, 2147482921, 2147482883, 2147482861, 2147482819,
    2147482817, 2147482811, 2147482801, 2147482763, 2147482739,
)


def _gcd_mod_p(a, b, p):
    """Monic gcd of integer coefficient lists modulo p (Euclid)."""
    a = [c % p for c in a]
    b = [c % p for c in b]

    def strip(x):
        while x and x[-1] == 0:
            x.pop()
        return x

    a, b = strip(a), strip(b)
    while b:
        inv = pow(b[-1], p - 2, p)
        db = len(b) - 1
        r = list(a)
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k]
            if c == 0:
                continue
            f = c * inv % p
            for j, bc in enumerate(b):
                r[k - db + j] = (r[k - db + j] - f * bc) % p
        a, b = b, strip(r)
    if not a:
        return []
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]


def _gcd_modular(a, b):
    """Monic gcd over Q of primitive integer coefficient lists, by mod-p
    images with CRT and an exact division check.  None if unlucky."""
    from math import gcd as igcd

    lc = igcd(a[-1], b[-1])
    best_deg = None
    residues = []  # list of (p, coeffs scaled by lc mod p)
    candidate = None
    for p in _GCD_PRIMES:
        if a[-1] % p == 0 or b[-1] % p == 0:
            continue
        gp = _gcd_mod_p(a, b, p)
        d = len(gp) - 1
        if d == 0:
            return ONE
        if best_deg is None or d < best_deg:
            best_deg = d
            residues = []
        if d > best_deg:
            continue
        residues.append((p, [c * lc % p for c in gp]))
        # try reconstructing
        modulus = 1
        for q, _ in residues:
            modulus *= q
        coeffs = []
        for k in range(best_deg + 1):
            x, m = 0, 1
            for q, img in residues:
                x += m * ((img[k] - x) * pow(m % q, q - 2, q) % q)
                m *= q
            x %= modulus
            if x > modulus // 2:
                x -= modulus
            coeffs.append(x)
        cand = _strip_content(coeffs)
        if candidate == cand:
            g = Poly(cand)
            if _divides_int(cand, a) and _divides_int(cand, b):
                return g.monic()
        candidate = cand
    return None


def _divides_int(d, a):
    """Does the integer poly d divide the integer poly a over Q?"""
    q, r = Poly(a).divmod(Poly(d))
    return r.is_zero()


def _int_prem(a, b):
    """Pseudo-remainder of integer coefficient lists (ascending), as a list."""
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        return list(a)
    lead_b = b[-1]
    r = list(a)
    for k in range(da, db - 1, -1):
        c = r[k]
        if c == 0:
            continue
        # r = lead_b * r - c * x^(k-db) * b
        for i in range(len(r)):
            r[i] *= lead_b
        for j, bc in enumerate(b):
            r[k - db + j] -= c * bc
    while r and r[-1] == 0:
        r.pop()
    return r


def _fraction_is_square(c: Fraction) -> bool:
    if c < 0:
        return False
    if c == 0:
        return True
    n, d = c.numerator, c.denominator
    rn, rd = _isqrt_exact(n), _isqrt_exact(d)
    return rn is not None and rd is not None


def _fraction_sqrt(c: Fraction) -> Fraction:
    rn, rd = _isqrt_exact(c.numerator), _isqrt_exact(c.denominator)
    if rn is None or rd is None:
        raise ArithmeticError(f"{c} is not a rational square")
    return Fraction(rn, rd)


def _isqrt_exact(n: int):
    if n < 0:
        return None
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


ZERO = Poly.zero()
ONE = Poly.one()
Z = Poly.x()


class RatFun:
    """Rational function num/den over Q with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE, _reduced=False):
        num = _coerce_poly(num)
        den = _coerce_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = ONE
            elif den.is_one():
                pass
            else:
                if den.degree > 0:
                    g = num.gcd(den)
                    if g.degree > 0:
                        num = num.exact_div(g)
                        den = den.exact_div(g)
                lead = den.lead
                if lead != 1:
                    inv = 1 / lead
                    num = num * inv
                    den = den * inv
        self.num = num
        self.den = den

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "RatFun":
        return RatFun(ZERO, ONE, _reduced=True)

    @staticmethod
    def one() -> "RatFun":
        return RatFun(ONE, ONE, _reduced=True)

    @staticmethod
    def const(c) -> "RatFun":
        return RatFun(Poly.const(c), ONE, _reduced=True)

    @staticmethod
    def z() -> "RatFun":
        return RatFun(Z, ONE, _reduced=True)

    @staticmethod
    def from_poly(p: Poly) -> "RatFun":
        return RatFun(p, ONE, _reduced=True)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __bool__(self):
        return not self.is_zero()

    def __hash__(self):
        return hash((self.num.coeffs, self.den.coeffs))

    def __eq__(self, other):
        other = _coerce_ratfun_or_none(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce_ratfun(other)
        if self.den.is_one() and other.den.is_one():
            return RatFun(self.num + other.num, ONE, _reduced=True)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-_coerce_ratfun(other))

    def __rsub__(self, other):
        return _coerce_ratfun(other) + (-self)

    def __mul__(self, other):
        other = _coerce_ratfun(other)
        if self.is_zero() or other.is_zero():
            return RatFun.zero()
        if self.den.is_one() and other.den.is_one():
            return RatFun(self.num * other.num, ONE, _reduced=True)
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1 = self.num.exact_div(g1) if g1.degree > 0 else self.num
        d2 = other.den.exact_div(g1) if g1.degree > 0 else other.den
        n2 = other.num.exact_div(g2) if g2.degree > 0 else other.num
        d1 = self.den.exact_div(g2) if g2.degree > 0 else self.den
        return RatFun(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_ratfun(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self * RatFun(other.den, other.num)

    def __rtruediv__(self, other):
        return _coerce_ratfun(other) / self

    def __pow__(self, n: int):
        if n == 0:
            return RatFun.one()
        if n < 0:
            return RatFun.one() / (self ** (-n))
        return RatFun(self.num**n, self.den**n)

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFun(self.den, self.num)

    # -- calculus ----------------------------------------------------------

    def derivative(self) -> "RatFun":
        if self.den.is_one():
            return RatFun(self.num.derivative(), ONE, _reduced=True)
        n, d = self.num, self.den
        return RatFun(n.derivative() * d - n * d.derivative(), d * d)

    def eval(self, x) -> Fraction:
        dv = self.den.eval(x)
        if dv == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num.eval(x) / dv

    def is_square(self) -> bool:
        if self.is_zero():
            return True
        return self.num.is_square() and self.den.is_square()

    def sqrt(self) -> "RatFun":
        return RatFun(self.num.sqrt(), self.den.sqrt())

    def constant_square_part(self):
        """Decompose self = c * w**2 with c a squarefree rational constant.

        Returns (c, w) when possible, None when the squarefree part of self
        is a genuine function.
        """
        if self.is_zero():
            return None
        cn, pn = self.num.squarefree_decomposition()
        cd, pd = self.den.squarefree_decomposition()
        if any(i % 2 for _, i in pn) or any(i % 2 for _, i in pd):
            return None
        w = RatFun.one()
        for a, i in pn:
            w = w * RatFun.from_poly(a ** (i // 2))
        for a, i in pd:
            w = w / RatFun.from_poly(a ** (i // 2))
        c = cn / cd
        sq = _squarefree_rational(c)
        w = w * RatFun.const(_fraction_sqrt(c / sq))
        return sq, w

    def __repr__(self):
        return f"RatFun({format_ratfun(self)!r})"


def _coerce_ratfun(x) -> RatFun:
    r = _coerce_ratfun_or_none(x)
    if r is None:
        raise TypeError(f"cannot coerce {x!r} to RatFun")
    return r


def _coerce_ratfun_or_none(x):
    if isinstance(x, RatFun):
        return x
    if isinstance(x, (int, Fraction)):
        return RatFun.const(x)
    if isinstance(x, Poly):
        return RatFun.from_poly(x)
    return None


def _squarefree_rational(c: Fraction) -> Fraction:
    """Squarefree integer representing the square class of c."""
    n = c.numerator * c.denominator
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    for p, e in sympy.factorint(n).items():
        if e % 2:
            out *= int(p)
    return Fraction(sign * out)


# ----------------------------------------------------------------------------
# sympy bridge (univariate factorization over Q)
# ----------------------------------------------------------------------------


def poly_to_sympy(p: Poly):
    return sympy.Poly.from_list(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)] or [0],
        _SYMPY_Z,
    )


def poly_from_sympy(sp) -> Poly:
    return Poly([Fraction(c.p, c.q) for c in reversed(sp.all_coeffs())])


@lru_cache(maxsize=4096)
def _factor_cached(coeffs):
    p = Poly(coeffs)
    const, factors = poly_to_sympy(p).factor_list()
    out = []
    for f, mult in factors:
        out.append((poly_from_sympy(f).monic(), int(mult)))
    c = Fraction(const.p, const.q)
    for f, mult in factors:
        lead = Fraction(f.LC().p, f.LC().q)
        c *= lead**mult
    return Fraction(c), tuple(out)


def factor_poly(p: Poly):
    """Factor into monic irreducibles over Q: returns (constant, [(q_i, e_i)])."""
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    return _factor_cached(p.coeffs)


def rational_roots(p: Poly):
    """All rational roots of p, with multiplicity collapsed."""
    _, factors = factor_poly(p)
    roots = []
    for q, _ in factors:
        if q.degree == 1:
            roots.append(-q.coeffs[0])
    return roots


# ----------------------------------------------------------------------------
# partial fractions
# ----------------------------------------------------------------------------


def partial_fractions(a: RatFun):
    """Decompose a = poly_part + sum_{i,j} r_ij / p_i^j over monic irreducible p_i.

    Returns (poly_part: Poly, terms: list of (p_i, j, r_ij)) with deg r_ij < deg p_i.
    """
    poly_part, rem = a.num.divmod(a.den)
    terms = []
    if rem.is_zero():
        return poly_part, terms
    _, factors = factor_poly(a.den)
    r = rem
    den = a.den
    for i, (p, e) in enumerate(factors):
        pe = p**e
        if i == len(factors) - 1:
            comp = r
        else:
            rest = den.exact_div(pe)
            g, s, t = pe.xgcd(rest)
            assert g.is_one(), "factors are not coprime"
            # r/(pe*rest) = (r t)/pe + (r s)/rest
            comp = (r * t) % pe
            r = (r * s) % rest
            den = rest
        # expand comp / p^e into sum r_j / p^j
        parts = []
        cur = comp
        for j in range(e, 0, -1):
            cur, rj = cur.divmod(p)
            parts.append((p, j, rj))
        for p_, j_, rj_ in reversed(parts):
            if not rj_.is_zero():
                terms.append((p_, j_, rj_))
    return poly_part, terms


def recombine_partial_fractions(poly_part: Poly, terms) -> RatFun:
    out = RatFun.from_poly(poly_part)
    for p, j, r in terms:
        out = out + RatFun(r, p**j)
    return out


# ----------------------------------------------------------------------------
# string grammar: integers, z, + - * / ^ ( )
# ----------------------------------------------------------------------------


class ParseError(ValueError):
    pass


def _tokenize(s: str):
    tokens = []
    i = 0
    while i < len(s):
        c = s[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            tokens.append(("int", int(s[i:j])))
            i = j
        elif c in "+-*/^()z":
            tokens.append((c, c))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r} at position {i}")
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expr(self) -> RatFun:
        if self.peek() in "+-":
            sign = -1 if self.next()[0] == "-" else 1
            left = self.term()
            if sign < 0:
                left = -left
        else:
            left = self.term()
        while self.peek() in "+-":
            op = self.next()[0]
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self) -> RatFun:
        left = self.factor()
        while self.peek() in "*/":
            op = self.next()[0]
            right = self.factor()
            left = left * right if op == "*" else left / right
        return left

    def factor(self) -> RatFun:
        if self.peek() == "-":
            self.next()
            return -self.factor()
        base = self.atom()
        while self.peek() == "^":
            self.next()
            neg = False
            if self.peek() == "-":
                self.next()
                neg = True
            kind, val = self.next()
            if kind != "int":
                raise ParseError("exponent must be an integer literal")
            base = base ** (-val if neg else val)
        return base

    def atom(self) -> RatFun:
        kind, val = self.next()
        if kind == "int":
            return RatFun.const(val)
        if kind == "z":
            return RatFun.z()
        if kind == "(":
            inner = self.expr()
            kind2, _ = self.next()
            if kind2 != ")":
                raise ParseError("missing closing parenthesis")
            return inner
        raise ParseError(f"unexpected token {kind!r}")


def parse_ratfun(s: str) -> RatFun:
    parser = _Parser(_tokenize(s))
    out = parser.expr()
    if parser.peek() != "end":
        raise ParseError(f"trailing input at token {parser.pos}")
    return out


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = _format_fraction(mag)
        else:
            zpow = "z" if k == 1 else f"z^{k}"
            body = zpow if mag == 1 else f"{_format_fraction(mag)}*{zpow}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+{body}" if c > 0 else f"-{body}")
    return "".join(parts)


def _format_fraction(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_ratfun(r: RatFun) -> str:
    num = format_poly(r.num)
    if r.den.is_one():
        return num
    den = format_poly(r.den)
    num_wrapped = f"({num})" if ("+" in num[1:] or "-" in num[1:]) else num
    den_wrapped = f"({den})" if ("+" in den[1:] or "-" in den[1:] or "*" in den or "^" in den or "/" in den) else den
    return f"{num_wrapped}/{den_wrapped}"
