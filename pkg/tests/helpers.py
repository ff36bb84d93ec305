"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the code paths they check: Leibniz checks
go through the bilinear coordinate embeddings, recombination checks go through
plain field arithmetic.
"""

import random
from fractions import Fraction

from diffdec.linalg import mat_mul, mat_vec, vec_derivative
from diffdec.modules import (
    DiffModule,
    GaugeMatrix,
    ext2_coords,
    sym2_coords,
    tensor_coords,
)
from diffdec.rational import Poly, RatFun
from diffdec.tower import BaseField

BASE = BaseField()


def rand_poly(rng, deg, cmax=5):
    return Poly([Fraction(rng.randint(-cmax, cmax)) for _ in range(deg + 1)])


def rand_ratfun(rng, deg=2, cmax=5):
    num = rand_poly(rng, deg, cmax)
    den = Poly(())
    while den.is_zero():
        den = rand_poly(rng, rng.randint(0, deg), cmax)
    return RatFun(num, den)


def rand_module(rng, n, deg=2, cmax=5, field=BASE):
    conn = [[field.coerce(RatFun.from_poly(rand_poly(rng, deg, cmax))) for _ in range(n)] for _ in range(n)]
    return DiffModule(field, conn)


def rand_trace_zero_module(rng, n, deg=2, cmax=5, field=BASE):
    m = rand_module(rng, n, deg, cmax, field)
    conn = [row[:] for row in m.conn]
    s = conn[0][0]
    for i in range(1, n - 1):
        s = s + conn[i][i]
    conn[n - 1][n - 1] = -s
    return DiffModule(field, conn)


def rand_unimodular_gauge(rng, n, deg=1, cmax=3, field=BASE):
    """Random invertible gauge with constant determinant (trace-safe)."""
    lower = [
        [field.one() if i == j else (field.coerce(RatFun.from_poly(rand_poly(rng, deg, cmax))) if i > j else field.zero()) for j in range(n)]
        for i in range(n)
    ]
    upper = [
        [field.one() if i == j else (field.coerce(RatFun.from_poly(rand_poly(rng, deg, cmax))) if i < j else field.zero()) for j in range(n)]
        for i in range(n)
    ]
    diag = [
        [field.const(rng.choice([1, 1, 1, -1, 2])) if i == j else field.zero() for j in range(n)]
        for i in range(n)
    ]
    return GaugeMatrix(field, mat_mul(mat_mul(lower, diag), upper))


def rand_vector(rng, field, n, deg=2, cmax=4):
    return [field.coerce(RatFun.from_poly(rand_poly(rng, deg, cmax))) for _ in range(n)]


def leibniz_defect_bilinear(module_pair, product_module, embed, x, y):
    """d(embed(x, y)) - embed(dx, y) - embed(x, dy); the Leibniz oracle."""
    m = module_pair[0]
    n = module_pair[1]
    field = m.field
    pxy = embed(field, x, y)
    lhs = vec_derivative(pxy)
    lhs = [a + b for a, b in zip(lhs, mat_vec(product_module.conn, pxy))]
    dx = m.apply_d(x)
    dy = n.apply_d(y)
    rhs = [a + b for a, b in zip(embed(field, dx, y), embed(field, x, dy))]
    return [a - b for a, b in zip(lhs, rhs)]


def is_zero_vec(v):
    return all(x.is_zero() for x in v)
