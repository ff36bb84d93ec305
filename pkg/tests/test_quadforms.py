import random
from fractions import Fraction

import pytest

from diffdec.linalg import mat_eq, mat_mul, mat_transpose, diagonalize_symmetric
from diffdec.modules import DiffModule, ext2_pairs, gauge, sym_power, sym2_pairs
from diffdec.quadforms import (
    QuadraticForm,
    flatness_defect,
    form_from_flat,
    gram_to_sym2_coords,
    hyperbolic_normalize,
    is_nondegenerate,
    isotropic_vector,
)
from diffdec.rational import RatFun, parse_ratfun
from diffdec.solver import FlatElement, rational_kernel, auto_bounds

from helpers import BASE, rand_trace_zero_module, rand_unimodular_gauge

K = BASE


def observation_form_gram():
    """F = m12 (x) m12 - m11 (x) m22 on the sym^2 basis (m11, m12, m22)."""
    m = DiffModule(K, [["0"] * 3 for _ in range(3)])
    pairs = sym2_pairs(3)
    coords = [K.zero()] * len(pairs)
    coords[pairs.index((1, 1))] = K.one()
    coords[pairs.index((0, 2))] = -K.one()
    return form_from_flat(m, coords)


class TestFormFromFlat:
    def test_observation_gram(self):
        q = observation_form_gram()
        half = K.const(Fraction(1, 2))
        expect = [
            [K.zero(), K.zero(), -half],
            [K.zero(), K.one(), K.zero()],
            [-half, K.zero(), K.zero()],
        ]
        assert mat_eq(q.gram, expect)

    def test_zero_element(self):
        m = DiffModule(K, [["0", "0"], ["0", "0"]])
        q = form_from_flat(m, [K.zero()] * 3)
        assert all(x.is_zero() for row in q.gram for x in row)

    def test_round_trip_coords(self):
        q = observation_form_gram()
        coords = gram_to_sym2_coords(q.gram)
        pairs = sym2_pairs(3)
        assert coords[pairs.index((1, 1))] == K.one()
        assert coords[pairs.index((0, 2))] == -K.one()

    def test_flat_compatibility_identity(self):
        # the flat F in sym^2(sym^2 N) gives a gram with G' + AG + GA^T = 0
        rng = random.Random(41)
        n = rand_trace_zero_module(rng, 2, deg=1)
        m = sym_power(n, 2)
        ker = rational_kernel(sym_power(m, 2), auto_bounds(sym_power(m, 2)))
        assert len(ker.elements) >= 1
        q = form_from_flat(m, ker.elements[0])
        defect = flatness_defect(q)
        assert all(x.is_zero() for row in defect for x in row)


class TestNondegenerate:
    def test_observation_nondegenerate(self):
        assert is_nondegenerate(observation_form_gram())

    def test_rank_deficient(self):
        m = DiffModule(K, [["0", "0"], ["0", "0"]])
        q = QuadraticForm(m, [[K.one(), K.zero()], [K.zero(), K.zero()]])
        assert not is_nondegenerate(q)


class TestDiagonalize:
    def test_congruence_property(self):
        rng = random.Random(42)
        for trial in range(12):
            n = rng.choice([2, 3, 4])
            g = [[K.coerce(parse_ratfun(str(rng.randint(-4, 4)))) for _ in range(n)] for _ in range(n)]
            for i in range(n):
                for j in range(i):
                    g[i][j] = g[j][i]
            s, diag = diagonalize_symmetric(K, g)
            got = mat_mul(mat_transpose(s), mat_mul(g, s))
            for i in range(n):
                for j in range(n):
                    if i == j:
                        assert got[i][j] == diag[i]
                    else:
                        assert got[i][j].is_zero()


class TestIsotropic:
    def test_sum_of_squares_minus(self):
        m = DiffModule(K, [["0"] * 3 for _ in range(3)])
        q = QuadraticForm(m, [[K.const(1), K.zero(), K.zero()],
                              [K.zero(), K.const(1), K.zero()],
                              [K.zero(), K.zero(), K.const(-2)]])
        res = isotropic_vector(q)
        assert res.found
        assert q.value(res.vector).is_zero()

    def test_binary_nonsquare_not_found(self):
        m = DiffModule(K, [["0"] * 2 for _ in range(2)])
        q = QuadraticForm(m, [[K.one(), K.zero()], [K.zero(), -K.coerce(parse_ratfun("z"))]])
        res = isotropic_vector(q)
        # x^2 - z y^2 has no zero over Q(z): valuation parity at z
        assert res.kind in ("not_found", "quadratic")
        assert res.kind == "not_found"

    def test_observation_form_isotropic(self):
        q = observation_form_gram()
        res = isotropic_vector(q)
        assert res.found
        assert q.value(res.vector).is_zero()

    def test_quadratic_certificate_branch(self):
        # diag(1, -2) over Q(z): needs sqrt(2)
        m = DiffModule(K, [["0"] * 2 for _ in range(2)])
        q = QuadraticForm(m, [[K.one(), K.zero()], [K.zero(), K.const(-2)]])
        res = isotropic_vector(q)
        assert res.kind == "quadratic"
        assert res.constant == Fraction(2)

    def test_scrambled_split_form(self):
        rng = random.Random(43)
        for _ in range(6):
            # congruence-scramble a split form and ask for a vector
            n = 4
            g0 = [[K.zero()] * n for _ in range(n)]
            g0[0][1] = g0[1][0] = K.one()
            g0[2][3] = g0[3][2] = K.one()
            t = rand_unimodular_gauge(rng, n, deg=1)
            g = mat_mul(mat_transpose(t.mat), mat_mul(g0, t.mat))
            m = DiffModule(K, [[K.zero()] * n for _ in range(n)])
            q = QuadraticForm(m, g)
            res = isotropic_vector(q)
            assert res.found
            assert q.value(res.vector).is_zero()


class TestHyperbolic:
    def test_two_planes_dim4(self):
        # m11 m22 - m12 m21 pairing: hyperbolic x 2
        n = 4
        m = DiffModule(K, [[K.zero()] * n for _ in range(n)])
        g = [[K.zero()] * n for _ in range(n)]
        half = K.const(Fraction(1, 2))
        g[0][3] = g[3][0] = half
        g[1][2] = g[2][1] = -half
        q = QuadraticForm(m, g)
        dec = hyperbolic_normalize(q, 2)
        assert len(dec.planes) == 2
        assert dec.remainder == []
        for v, u in dec.planes:
            assert q.value(v).is_zero()
            assert q.value(u).is_zero()
            assert q.pairing(v, u) == K.one()

    def test_three_planes_dim6(self):
        # n12 n34 - n13 n24 + n14 n23 on the ext^2 basis of a 4-dim module
        pairs = ext2_pairs(4)
        n = 6
        m = DiffModule(K, [[K.zero()] * n for _ in range(n)])
        g = [[K.zero()] * n for _ in range(n)]
        half = K.const(Fraction(1, 2))
        for (pi, pj), c in [(((0, 1), (2, 3)), 1), (((0, 2), (1, 3)), -1), (((0, 3), (1, 2)), 1)]:
            i, j = pairs.index(pi), pairs.index(pj)
            g[i][j] = K.const(c) * half
            g[j][i] = K.const(c) * half
        q = QuadraticForm(m, g)
        dec = hyperbolic_normalize(q, 3)
        assert len(dec.planes) == 3 and dec.remainder == []

    def test_remainder_with_nonsquare_ratio(self):
        # hyperbolic + diag(1, -z): two planes impossible; report remainder
        n = 4
        m = DiffModule(K, [[K.zero()] * n for _ in range(n)])
        g = [[K.zero()] * n for _ in range(n)]
        g[0][1] = g[1][0] = K.one()
        g[2][2] = K.one()
        g[3][3] = -K.coerce(parse_ratfun("z"))
        q = QuadraticForm(m, g)
        dec = hyperbolic_normalize(q, 2)
        assert len(dec.planes) == 1
        assert len(dec.remainder) == 2
        vals = [v for _, v in dec.remainder]
        ratio = -vals[1] / vals[0]
        sq = ratio.constant_square_part()
        assert sq is None  # -b/a is z up to squares: a genuine function

    def test_gauge_scrambled_three_planes(self):
        rng = random.Random(44)
        pairs = ext2_pairs(4)
        n = 6
        m = DiffModule(K, [[K.zero()] * n for _ in range(n)])
        g0 = [[K.zero()] * n for _ in range(n)]
        half = K.const(Fraction(1, 2))
        for (pi, pj), c in [(((0, 1), (2, 3)), 1), (((0, 2), (1, 3)), -1), (((0, 3), (1, 2)), 1)]:
            i, j = pairs.index(pi), pairs.index(pj)
            g0[i][j] = K.const(c) * half
            g0[j][i] = K.const(c) * half
        for _ in range(3):
            t = rand_unimodular_gauge(rng, n, deg=1)
            g = mat_mul(mat_transpose(t.mat), mat_mul(g0, t.mat))
            q = QuadraticForm(m, g)
            dec = hyperbolic_normalize(q, 3)
            assert len(dec.planes) == 3 and dec.remainder == []
