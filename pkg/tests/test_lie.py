import random

import pytest

from diffdec.lie import (
    SIGNATURE_ROWS,
    SL2Rep,
    classify_module,
    rep_dim,
    rep_sym2_ext2,
    signature_lookup,
    sl2_ext2,
    sl2_sym2,
    sl2_tensor,
)
from diffdec.modules import gauge, sym_power, tensor

from helpers import rand_trace_zero_module, rand_unimodular_gauge


class TestSL2Plethysm:
    def test_tensor_2_3(self):
        assert sl2_tensor(2, 3).labels == (5, 3, 1)

    def test_tensor_trivial(self):
        for n in range(6):
            assert sl2_tensor(0, n).labels == (n,)

    def test_tensor_1_1(self):
        assert sl2_tensor(1, 1).labels == (2, 0)

    def test_ext2_4(self):
        assert sl2_ext2(4).labels == (6, 2)

    def test_sym2_2(self):
        assert sl2_sym2(2).labels == (4, 0)

    def test_sym2_3(self):
        assert sl2_sym2(3).labels == (6, 2)

    def test_even_closed_form(self):
        # ext2 [2n] = sum_{k=1..n} [4k-2]
        for n in range(1, 7):
            assert sorted(sl2_ext2(2 * n).labels) == sorted(4 * k - 2 for k in range(1, n + 1))

    def test_odd_sym_closed_form(self):
        # sym2 [2n+1] = sum_{k=1..n+1} [4k-2]
        for n in range(0, 7):
            assert sorted(sl2_sym2(2 * n + 1).labels) == sorted(
                4 * k - 2 for k in range(1, n + 2)
            )

    def test_tensor_with_2_odd(self):
        # [2] (x) [2k+1] = [2k-1] + [2k+1] + [2k+3]
        for k in range(1, 7):
            assert sorted(sl2_tensor(2, 2 * k + 1).labels) == sorted(
                [2 * k - 1, 2 * k + 1, 2 * k + 3]
            )

    def test_sym_plus_ext_is_square(self):
        for n in range(0, 8):
            combined = sorted(sl2_sym2(n).labels + sl2_ext2(n).labels)
            assert combined == sorted(sl2_tensor(n, n).labels)

    def test_dimension_bookkeeping(self):
        for n in range(0, 8):
            d = n + 1
            assert sl2_sym2(n).dim == d * (d + 1) // 2
            assert sl2_ext2(n).dim == d * (d - 1) // 2
            assert sl2_tensor(n, n).dim == d * d


class TestTable:
    def test_row_dimension_invariants(self):
        for row in SIGNATURE_ROWS:
            d = row.dim
            assert sum(row.sym2_dims) == d * (d + 1) // 2, row
            assert sum(row.ext2_dims) == d * (d - 1) // 2, row

    def test_paper_rows_d_le_6(self):
        # every printed row of the d <= 6 table, as dimension multisets
        expected = [
            (2, "sl2", (3,), (1,)),
            (3, "sl2", (5, 1), (3,)),
            (3, "sl3", (6,), (3,)),
            (4, "sl2", (7, 3), (5, 1)),
            (4, "sl4", (10,), (6,)),
            (4, "sp4", (10,), (5, 1)),
            (4, "sl2xsl2", (9, 1), (3, 3)),
            (5, "sl2", (9, 5, 1), (7, 3)),
            (5, "sp4", (14, 1), (10,)),
            (5, "sl5", (15,), (10,)),
            (6, "sl2", (11, 7, 3), (9, 5, 1)),
            (6, "sl3", (15, 6), (15,)),
            (6, "sl4", (20, 1), (15,)),
            (6, "sl6", (21,), (15,)),
            (6, "sp6", (21,), (14, 1)),
            (6, "sl2xsl2", (15, 5, 3, 3, 2, 1)[:0] or (15, 5, 3), (15, 9, 5, 1)[:0] or (1, 5, 9)),
        ]
        # the d=6 sl2xsl2 row is checked separately below
        for d, alg, s_dims, e_dims in expected[:-1]:
            rows = [
                r
                for r in SIGNATURE_ROWS
                if r.dim == d
                and r.algebra == alg
                and r.sym2_dims == tuple(sorted(s_dims))
                and r.ext2_dims == tuple(sorted(e_dims))
                and not r.derived
            ]
            assert rows, (d, alg, s_dims, e_dims)

    def test_d6_product_rows(self):
        # sl2 x sl2 with [1](x)[2]: ext2 = [0](x)[0], [0](x)[4], [2](x)[2]
        # dims {1, 5, 9}; sym2 = [0](x)[2], [2](x)[0], [2](x)[4]: {3, 3, 15}
        rows = [r for r in SIGNATURE_ROWS if r.dim == 6 and r.algebra == "sl2xsl2" and not r.derived]
        assert any(r.sym2_dims == (3, 3, 15) and r.ext2_dims == (1, 5, 9) for r in rows)
        # sl2 x sl3 with [1](x)[1,0]: ext2 = [0](x)[2,0], [2](x)[0,1]: {6, 9};
        # sym2 = [0](x)[0,1], [2](x)[2,0]: {3, 18}
        rows = [r for r in SIGNATURE_ROWS if r.dim == 6 and r.algebra == "sl2xsl3" and not r.derived]
        assert any(r.sym2_dims == (3, 18) and r.ext2_dims == (6, 9) for r in rows)

    def test_sp4_standard_test_row(self):
        rows = signature_lookup(5, [1, 14], [10])
        assert rows and all("sp4" == r.algebra for r in rows)

    def test_sl3_adjoint_test_rows(self):
        rows = signature_lookup(8, [1, 8, 27], [8, 10, 10])
        assert any(r.algebra == "sl3" for r in rows)
        rows_merged = signature_lookup(8, [1, 8, 27], [8, 20])
        assert any(r.algebra == "sl3" and r.derived for r in rows_merged)

    def test_tensor_2x2_row(self):
        rows = signature_lookup(4, [1, 9], [3, 3])
        assert any(r.algebra == "sl2xsl2" for r in rows)

    def test_no_match_gives_empty(self):
        assert signature_lookup(5, [2, 13], [10]) == []
        assert signature_lookup(7, [1, 27], [21]) == []

    def test_dims_7_to_11_items_present(self):
        wanted = [
            (8, "sl3"),
            (10, "sl3"),
            (10, "sl4"),
            (10, "sl5"),
            (8, "so7"),
            (10, "sp4"),
            (8, "sl2xsl2"),
            (9, "sl2xsl2"),
            (10, "sl2xsl2"),
            (9, "sl2xsl3"),
            (8, "sl2xsl4"),
            (8, "sl2xsp4"),
            (10, "sl2xsp4"),
            (10, "sl2xsl5"),
            (9, "sl3xsl3"),
            (8, "sl2xsl2xsl2"),
        ]
        have = {(r.dim, r.algebra) for r in SIGNATURE_ROWS}
        for item in wanted:
            assert item in have, item


class TestClassify:
    def test_classify_dim2(self):
        rng = random.Random(31)
        m = rand_trace_zero_module(rng, 2, deg=1)
        res = classify_module(m)
        assert any(r.algebra == "sl2" and r.rep == "[1]" for r in res.rows)

    def test_classify_sym2_of_dim2(self):
        rng = random.Random(32)
        n = rand_trace_zero_module(rng, 2, deg=1)
        m = sym_power(n, 2)
        res = classify_module(m)
        assert res.sym2_dims == (1, 5)
        assert res.ext2_dims == (3,)
        assert any(r.algebra == "sl2" and r.rep == "[2]" for r in res.rows)

    def test_classify_obfuscated_tensor(self):
        rng = random.Random(33)
        a = rand_trace_zero_module(rng, 2, deg=1)
        b = rand_trace_zero_module(rng, 2, deg=1)
        m = gauge(tensor(a, b), rand_unimodular_gauge(rng, 4, deg=1))
        res = classify_module(m)
        assert any(r.algebra == "sl2xsl2" for r in res.rows)
