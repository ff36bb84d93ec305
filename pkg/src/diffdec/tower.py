"""The base differential field Q(z) and one-layer radical extensions K(g^{1/d}).

Elements of a radical layer are coordinate vectors over Q(z) in the basis
1, t, ..., t^{d-1} with t^d = g and t' = (g'/(d g)) t.  Only one layer is
supported; stacking raises.
"""

from __future__ import annotations

from fractions import Fraction

from .rational import RatFun, format_ratfun, parse_ratfun


class StackedExtensionError(RuntimeError):
    """A second radical layer was requested on top of an existing one."""


class BaseField:
    """Q(z) with derivation d/dz."""

    degree_over_base = 1

    def __eq__(self, other):
        return isinstance(other, BaseField)

    def __hash__(self):
        return hash("BaseField")

    def zero(self):
        return RatFun.zero()

    def one(self):
        return RatFun.one()

    def const(self, c):
        return RatFun.const(c)

    def from_ratfun(self, r: RatFun):
        return r

    def coerce(self, x):
        if isinstance(x, RatFun):
            return x
        if isinstance(x, (int, Fraction)):
            return RatFun.const(x)
        if isinstance(x, str):
            return parse_ratfun(x)
        if isinstance(x, TowerElem):
            raise TypeError("tower element in base field context")
        raise TypeError(f"cannot coerce {x!r} into Q(z)")

    def extend(self, d: int, g: RatFun) -> "TowerField":
        return TowerField(d, g)

    def serialize_element(self, x: RatFun):
        return format_ratfun(x)

    def parse_element(self, s):
        if not isinstance(s, str):
            raise TypeError("base-field entries serialize as strings")
        return parse_ratfun(s)

    def __repr__(self):
        return "Q(z)"


class TowerField:
    """K(t) with t^d = g over K = Q(z); derivation extends by t' = (g'/(dg)) t."""

    def __init__(self, d: int, g: RatFun):
        if d < 2:
            raise ValueError("radical layer needs d >= 2")
        if g.is_zero():
            raise ValueError("radical layer needs g != 0")
        self.d = d
        self.g = g
        self.t_log_deriv = g.derivative() / (RatFun.const(d) * g)

    degree_over_base = property(lambda self: self.d)

    def __eq__(self, other):
        return isinstance(other, TowerField) and self.d == other.d and self.g == other.g

    def __hash__(self):
        return hash(("TowerField", self.d, self.g))

    def zero(self):
        return TowerElem(self, (RatFun.zero(),) * self.d)

    def one(self):
        return self.from_ratfun(RatFun.one())

    def const(self, c):
        return self.from_ratfun(RatFun.const(c))

    def from_ratfun(self, r: RatFun) -> "TowerElem":
        return TowerElem(self, (r,) + (RatFun.zero(),) * (self.d - 1))

    def t(self) -> "TowerElem":
        coords = [RatFun.zero()] * self.d
        coords[1] = RatFun.one()
        return TowerElem(self, tuple(coords))

    def coerce(self, x):
        if isinstance(x, TowerElem):
            if x.field != self:
                raise TypeError("element of a different tower")
            return x
        if isinstance(x, RatFun):
            return self.from_ratfun(x)
        if isinstance(x, (int, Fraction)):
            return self.const(x)
        if isinstance(x, str):
            return self.from_ratfun(parse_ratfun(x))
        raise TypeError(f"cannot coerce {x!r} into the tower")

    def extend(self, d, g):
        raise StackedExtensionError(
            "nested radical towers are not supported; restart over the extended field"
        )

    def serialize_element(self, x: "TowerElem"):
        return [format_ratfun(c) for c in x.coords]

    def parse_element(self, s):
        if isinstance(s, str):
            return self.from_ratfun(parse_ratfun(s))
        if isinstance(s, list) and len(s) == self.d:
            return TowerElem(self, tuple(parse_ratfun(c) for c in s))
        raise TypeError("tower entries serialize as length-d string arrays")

    def __repr__(self):
        return f"Q(z)({format_ratfun(self.g)}^(1/{self.d}))"


class TowerElem:
    """Element of a TowerField as a coordinate vector over Q(z)."""

    __slots__ = ("field", "coords")

    def __init__(self, field: TowerField, coords):
        assert len(coords) == field.d
        self.field = field
        self.coords = tuple(coords)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def is_constant(self) -> bool:
        return self.coords[0].is_constant() and all(c.is_zero() for c in self.coords[1:])

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not constant")
        return self.coords[0].constant_value()

    def base_part(self) -> RatFun:
        if any(not c.is_zero() for c in self.coords[1:]):
            raise ValueError("element does not lie in the base field")
        return self.coords[0]

    def __bool__(self):
        return not self.is_zero()

    def __hash__(self):
        return hash((self.field, self.coords))

    def __eq__(self, other):
        if isinstance(other, TowerElem):
            return self.field == other.field and self.coords == other.coords
        if isinstance(other, (int, Fraction, RatFun)):
            return self == self.field.coerce(other)
        return NotImplemented

    def __add__(self, other):
        other = self.field.coerce(other)
        return TowerElem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return TowerElem(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self.field.coerce(other))

    def __rsub__(self, other):
        return self.field.coerce(other) + (-self)

    def __mul__(self, other):
        other = self.field.coerce(other)
        d, g = self.field.d, self.field.g
        out = [RatFun.zero()] * d
        for i, a in enumerate(self.coords):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coords):
                if b.is_zero():
                    continue
                k = i + j
                if k < d:
                    out[k] = out[k] + a * b
                else:
                    out[k - d] = out[k - d] + a * b * g
        return TowerElem(self.field, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self.field.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.field.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "TowerElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero tower element")
        d = self.field.d
        # Solve (mult-by-self) x = 1 over Q(z)^d.
        cols = []
        for j in range(d):
            basis = [RatFun.zero()] * d
            basis[j] = RatFun.one()
            col = self * TowerElem(self.field, tuple(basis))
            cols.append(col.coords)
        mat = [[cols[j][i] for j in range(d)] for i in range(d)]
        rhs = [RatFun.one()] + [RatFun.zero()] * (d - 1)
        sol = _solve_ratfun_system(mat, rhs)
        if sol is None:
            raise ZeroDivisionError("tower element is a zero divisor (g not d-power free?)")
        return TowerElem(self.field, tuple(sol))

    def derivative(self) -> "TowerElem":
        tl = self.field.t_log_deriv
        out = []
        for i, a in enumerate(self.coords):
            out.append(a.derivative() + RatFun.const(i) * tl * a)
        return TowerElem(self.field, tuple(out))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c.is_zero():
                continue
            base = format_ratfun(c)
            terms.append(base if i == 0 else f"({base})*t^{i}")
        return " + ".join(terms) if terms else "0"


def _solve_ratfun_system(mat, rhs):
    """Gaussian elimination over Q(z) for the small systems tower division needs."""
    n = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    row = 0
    pivots = []
    for col in range(n):
        piv = None
        for r in range(row, n):
            if not a[r][col].is_zero():
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = a[row][col].inverse()
        a[row] = [x * inv for x in a[row]]
        for r in range(n):
            if r != row and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    sol = [RatFun.zero()] * n
    for r, col in enumerate(pivots):
        sol[col] = a[r][n]
    # verify
    for i in range(n):
        acc = RatFun.zero()
        for j in range(n):
            acc = acc + mat[i][j] * sol[j]
        if acc != rhs[i]:
            return None
    return sol
