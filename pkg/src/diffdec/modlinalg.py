"""Modular-assisted exact linear algebra over Q(z).

Nullspaces and solves of matrices with rational-function entries are done by
evaluating modulo word-size primes at many points, interpolating each entry of
the canonical answer as a rational function (Cauchy interpolation via the
extended Euclidean algorithm), lifting by CRT, and re-verifying the result
exactly.  Wrong guesses are impossible to return: every output is checked
symbolically before it leaves this module.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy

from .rational import Poly, RatFun

_PRIMES = tuple(sympy.primerange(1_000_003, 1_100_000))[:80]


class ModLinAlgError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# mod-p scalar helpers
# ---------------------------------------------------------------------------


def _poly_mod(poly: Poly, p: int):
    out = []
    for c in poly.coeffs:
        d = c.denominator % p
        if d == 0:
            raise ZeroDivisionError
        out.append((c.numerator % p) * pow(d, p - 2, p) % p)
    return out


def _poly_eval_mod(coeffs, x, p):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def _ratfun_mod(rf: RatFun, p: int):
    return _poly_mod(rf.num, p), _poly_mod(rf.den, p)


def _crt_int(residues, primes):
    x = 0
    m = 1
    for r, p in zip(residues, primes):
        x += m * ((r - x) * pow(m % p, p - 2, p) % p)
        m *= p
    return x % m


def _ratrec_int(r: int, m: int):
    from math import gcd, isqrt

    if r == 0:
        return Fraction(0)
    bound = isqrt(m // 2)
    u0, u1 = m, r
    s0, s1 = 0, 1
    while u1 > bound:
        q = u0 // u1
        u0, u1 = u1, u0 - q * u1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(abs(u1), abs(s1)) != 1:
        return None
    fr = Fraction(u1, s1)
    if (fr.denominator * r - fr.numerator) % m != 0:
        return None
    return fr


# ---------------------------------------------------------------------------
# Cauchy (rational-function) interpolation over F_p
# ---------------------------------------------------------------------------


def _polymul_mod(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def _polydivmod_mod(a, b, p):
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv = pow(lb, p - 2, p)
    q = [0] * max(0, len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c == 0:
            continue
        f = c * inv % p
        q[k - db] = f
        for j, bc in enumerate(b):
            a[k - db + j] = (a[k - db + j] - f * bc) % p
    while a and a[-1] == 0:
        a.pop()
    return q, a


def _newton_interp_mod(xs, ys, p):
    """Interpolating polynomial through (xs, ys) mod p, coefficient list."""
    n = len(xs)
    divided = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            num = (divided[i] - divided[i - 1]) % p
            den = (xs[i] - xs[i - j]) % p
            divided[i] = num * pow(den, p - 2, p) % p
    # Horner build-up of the Newton form
    poly = [divided[n - 1]]
    for i in range(n - 2, -1, -1):
        poly = _polymul_mod(poly, [(-xs[i]) % p, 1], p)
        if poly:
            poly[0] = (poly[0] + divided[i]) % p
        else:
            poly = [divided[i] % p]
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _cauchy_interp_mod(xs, ys, p):
    """Minimal rational interpolant num/den through the points, den monic.

    Returns (num_coeffs, den_coeffs) or None.  Half-gcd style: run the EEA on
    (prod (x-xi), F) and stop at the balanced degree split.
    """
    n = len(xs)
    f_poly = _newton_interp_mod(xs, ys, p)
    m_poly = [1]
    for x in xs:
        m_poly = _polymul_mod(m_poly, [(-x) % p, 1], p)
    dn = (n - 1) // 2
    r0, r1 = m_poly, f_poly
    t0, t1 = [], [1]
    while r1 and len(r1) - 1 > dn:
        q, r = _polydivmod_mod(r0, r1, p)
        r0, r1 = r1, r
        t0, t1 = t1, _polysub_mod(t0, _polymul_mod(q, t1, p), p)
    if not r1:
        # exact polynomial interpolation (possibly zero)
        num, den = [], [1]
        if f_poly and len(f_poly) - 1 <= dn:
            num, den = f_poly, [1]
        elif f_poly:
            return None
        return num, den
    num, den = r1, t1
    if not den:
        return None
    # make den monic
    inv = pow(den[-1], p - 2, p)
    num = [c * inv % p for c in num]
    den = [c * inv % p for c in den]
    # reject if den vanishes at a sample point (interpolation artifact)
    for x in xs:
        if _poly_eval_mod(den, x, p) == 0:
            return None
    return num, den


def _polysub_mod(a, b, p):
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, y in enumerate(b):
        out[i] = (out[i] - y) % p
    while out and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# evaluation plumbing
# ---------------------------------------------------------------------------


class _MatrixEvaluator:
    """Evaluate a RatFun matrix mod p at integer points, skipping bad ones."""

    def __init__(self, mat, p):
        self.p = p
        self.rows = len(mat)
        self.cols = len(mat[0]) if self.rows else 0
        self.nums = []
        self.dens = []
        for row in mat:
            nr, dr = [], []
            for x in row:
                nm, dm = _ratfun_mod(x, p)
                nr.append(nm)
                dr.append(dm)
            self.nums.append(nr)
            self.dens.append(dr)

    def eval_at(self, x):
        p = self.p
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for i in range(self.rows):
            for j in range(self.cols):
                d = _poly_eval_mod(self.dens[i][j], x, p)
                if d == 0:
                    return None
                n = _poly_eval_mod(self.nums[i][j], x, p)
                out[i, j] = n * pow(d, p - 2, p) % p
        return out


def _modp_rref_profile(mat: np.ndarray, p: int):
    """RREF mod p; returns (pivots, reduced matrix)."""
    work = mat.astype(np.int64) % p
    rows, cols = work.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        nz = np.nonzero(work[row:, col])[0]
        if len(nz) == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            work[[row, pr]] = work[[pr, row]]
        inv = pow(int(work[row, col]), p - 2, p)
        work[row] = (work[row] * inv) % p
        col_vals = work[:, col].copy()
        col_vals[row] = 0
        mask = col_vals != 0
        if mask.any():
            work[mask] = (work[mask] - np.outer(col_vals[mask], work[row])) % p
        pivots.append(col)
        row += 1
    return pivots, work


# ---------------------------------------------------------------------------
# public: nullspace and solve with exact verification
# ---------------------------------------------------------------------------


def ratfun_nullspace(field, mat, max_points=640):
    """Canonical (RREF free-column) right-nullspace basis of a RatFun matrix.

    Falls back on raising ModLinAlgError if interpolation refuses to converge;
    callers may then use the dense exact path.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0 or cols == 0:
        return []
    n_pts = 24
    prime_count = 3
    while True:
        if n_pts > max_points:
            raise ModLinAlgError("nullspace interpolation did not converge")
        try:
            result = _nullspace_attempt(field, mat, rows, cols, n_pts, prime_count)
        except ModLinAlgError:
            result = None
        if result is not None:
            return result
        n_pts *= 2
        prime_count += 2


def _nullspace_attempt(field, mat, rows, cols, n_pts, prime_count):
    per_prime = {}
    pivots_ref = None
    for p in _PRIMES:
        if len(per_prime) >= prime_count:
            break
        try:
            ev = _MatrixEvaluator(mat, p)
        except ZeroDivisionError:
            continue
        samples = []
        x = 2
        while len(samples) < n_pts and x < p - 2:
            val = ev.eval_at(x)
            if val is not None:
                samples.append((x, val))
            x += 1
        if len(samples) < n_pts:
            continue
        profiles = [_modp_rref_profile(v, p) for _, v in samples]
        pivot_sets = [tuple(pr[0]) for pr in profiles]
        # the generic pivot profile is the one of maximal rank, breaking ties
        # towards lexicographically-first pivots
        best = max(pivot_sets, key=lambda s: (len(s), [-c for c in s]))
        keep = [i for i, s in enumerate(pivot_sets) if s == best]
        if len(keep) < max(8, n_pts // 2):
            continue
        if pivots_ref is None:
            pivots_ref = best
        elif best != pivots_ref:
            # prime disagreement: drop whichever is smaller rank
            if len(best) > len(pivots_ref):
                per_prime.clear()
                pivots_ref = best
            else:
                continue
        pivot_set = set(best)
        free = [c for c in range(cols) if c not in pivot_set]
        # nullspace vector per free column: entries at pivot positions
        entries = {}
        xs = [samples[i][0] for i in keep]
        ok = True
        for fi, fc in enumerate(free):
            for ri, pc in enumerate(best):
                ys = [int((-profiles[i][1][ri, fc]) % p) for i in keep]
                interp = _cauchy_interp_mod(xs, ys, p)
                if interp is None:
                    ok = False
                    break
                entries[(fi, pc)] = interp
            if not ok:
                break
        if ok:
            per_prime[p] = (free, best, entries)
    if len(per_prime) < prime_count:
        return None
    return _lift_and_verify_nullspace(field, mat, cols, per_prime)


def _lift_and_verify_nullspace(field, mat, cols, per_prime):
    primes = sorted(per_prime.keys())
    frees = per_prime[primes[0]][0]
    for p in primes[1:]:
        if per_prime[p][0] != frees:
            return None
    basis = []
    for fi, fc in enumerate(frees):
        vec = [field.zero() for _ in range(cols)]
        vec[fc] = field.one()
        for pc in per_prime[primes[0]][1]:
            num_lens = []
            den_lens = []
            for p in primes:
                e = per_prime[p][2].get((fi, pc))
                if e is None:
                    return None
                num_lens.append(len(e[0]))
                den_lens.append(len(e[1]))
            if len(set(num_lens)) != 1 or len(set(den_lens)) != 1:
                return None
            nl, dl = num_lens[0], den_lens[0]
            num_coeffs = []
            for k in range(nl):
                res = [per_prime[p][2][(fi, pc)][0][k] for p in primes]
                x = _crt_int(res, primes)
                fr = _ratrec_int(x, _prod(primes))
                if fr is None:
                    return None
                num_coeffs.append(fr)
            den_coeffs = []
            for k in range(dl):
                res = [per_prime[p][2][(fi, pc)][1][k] for p in primes]
                x = _crt_int(res, primes)
                fr = _ratrec_int(x, _prod(primes))
                if fr is None:
                    return None
                den_coeffs.append(fr)
            vec[pc] = field.coerce(RatFun(Poly(num_coeffs), Poly(den_coeffs)))
        basis.append(vec)
    # exact verification: every vector killed by every row
    for vec in basis:
        for row in mat:
            acc = None
            for x, v in zip(row, vec):
                if hasattr(v, "is_zero") and v.is_zero():
                    continue
                term = x * v
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                return None
    return basis


def _prod(ps):
    out = 1
    for p in ps:
        out *= p
    return out


def ratfun_solve(field, a, b, max_points=640):
    """Solve a X = b exactly (a with full column rank); None if inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    bw = len(b[0]) if b else 0
    n_pts = 24
    prime_count = 3
    while True:
        if n_pts > max_points:
            raise ModLinAlgError("solve interpolation did not converge")
        result = _solve_attempt(field, a, b, rows, cols, bw, n_pts, prime_count)
        if result is not None:
            return result if result != "inconsistent" else None
        n_pts *= 2
        prime_count += 2


def _solve_attempt(field, a, b, rows, cols, bw, n_pts, prime_count):
    per_prime = []
    for p in _PRIMES:
        if len(per_prime) >= prime_count:
            break
        try:
            ev_a = _MatrixEvaluator(a, p)
            ev_b = _MatrixEvaluator(b, p)
        except ZeroDivisionError:
            continue
        xs, sols = [], []
        x = 2
        while len(xs) < n_pts and x < p - 2:
            va = ev_a.eval_at(x)
            vb = ev_b.eval_at(x)
            if va is not None and vb is not None:
                aug = np.concatenate([va, vb], axis=1)
                pivots, red = _modp_rref_profile(aug, p)
                if list(pivots)[: min(len(pivots), cols)] == list(range(cols)):
                    sol = red[:cols, cols:]
                    # inconsistency: nonzero rows beyond rank
                    if len(pivots) > cols:
                        return "inconsistent"
                    xs.append(x)
                    sols.append(sol)
            x += 1
        if len(xs) < n_pts:
            continue
        entries = {}
        ok = True
        for i in range(cols):
            for j in range(bw):
                ys = [int(s[i, j]) for s in sols]
                interp = _cauchy_interp_mod(xs, ys, p)
                if interp is None:
                    ok = False
                    break
                entries[(i, j)] = interp
            if not ok:
                break
        if ok:
            per_prime.append((p, entries))
    if len(per_prime) < prime_count:
        return None
    primes = [p for p, _ in per_prime]
    modulus = _prod(primes)
    x_mat = []
    for i in range(cols):
        row = []
        for j in range(bw):
            lens = {(len(e[(i, j)][0]), len(e[(i, j)][1])) for _, e in per_prime}
            if len(lens) != 1:
                return None
            nl, dl = lens.pop()
            num_coeffs = []
            for k in range(nl):
                xk = _crt_int([e[(i, j)][0][k] for _, e in per_prime], primes)
                fr = _ratrec_int(xk, modulus)
                if fr is None:
                    return None
                num_coeffs.append(fr)
            den_coeffs = []
            for k in range(dl):
                xk = _crt_int([e[(i, j)][1][k] for _, e in per_prime], primes)
                fr = _ratrec_int(xk, modulus)
                if fr is None:
                    return None
                den_coeffs.append(fr)
            row.append(field.coerce(RatFun(Poly(num_coeffs), Poly(den_coeffs))))
        x_mat.append(row)
    # exact verification
    for i in range(rows):
        for j in range(bw):
            acc = None
            for l in range(cols):
                if hasattr(x_mat[l][j], "is_zero") and x_mat[l][j].is_zero():
                    continue
                term = a[i][l] * x_mat[l][j]
                acc = term if acc is None else acc + term
            want = b[i][j]
            if acc is None:
                if not want.is_zero():
                    return None
            elif acc != want:
                return None
    return x_mat
