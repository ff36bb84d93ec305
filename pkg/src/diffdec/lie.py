"""Representation bookkeeping: sl2 plethysm, the signature table of irreducible
representations of dimension <= 11, and dimension-signature classification.

Simple factors carry highest-weight labels in the usual fundamental-weight
coordinates.  Non-sl2 plethysm data for the listed algebras is stored, not
computed from a character engine; the product rows are generated from the
factor data through sym2(V (x) W) = sym2 V (x) sym2 W + ext2 V (x) ext2 W and
its exterior twin, and everything is cross-checked by dimension bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .modules import DiffModule, ext_power, sym_power
from .solver import SolverBounds, SplitResult, split_semisimple


# ---------------------------------------------------------------------------
# sl2 plethysm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SL2Rep:
    """A finite multiset of irreducible sl2 labels [n]."""

    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(sorted(self.labels, reverse=True)))
        if any(n < 0 for n in self.labels):
            raise ValueError("sl2 labels are nonnegative")

    @property
    def dim(self) -> int:
        return sum(n + 1 for n in self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __repr__(self):
        return " + ".join(f"[{n}]" for n in self.labels) or "0"


def sl2_tensor(m: int, n: int) -> SL2Rep:
    """Clebsch-Gordan: [m] (x) [n] = [|m-n|] + [|m-n|+2] + ... + [m+n]."""
    if m < 0 or n < 0:
        raise ValueError("labels must be nonnegative")
    return SL2Rep(tuple(range(abs(m - n), m + n + 1, 2)))


def sl2_sym2(n: int) -> SL2Rep:
    """sym^2 [n] = [2n] + [2n-4] + [2n-8] + ..."""
    return SL2Rep(tuple(k for k in range(2 * n, -1, -4)))


def sl2_ext2(n: int) -> SL2Rep:
    """ext^2 [n] = [2n-2] + [2n-6] + ..."""
    return SL2Rep(tuple(k for k in range(2 * n - 2, -1, -4)))


# ---------------------------------------------------------------------------
# dimensions of the stored simple-algebra representations
# ---------------------------------------------------------------------------


def _sl_dim(label) -> int:
    """Weyl dimension formula for sl_n, label of length n-1."""
    n = len(label) + 1
    num = Fraction(1)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            c = (j - i) + sum(label[k - 1] for k in range(i, j))
            num *= Fraction(c, j - i)
    assert num.denominator == 1
    return int(num)


def _sp4_dim(label) -> int:
    a, b = label
    v = Fraction((a + 1) * (b + 1) * (a + b + 2) * (a + 2 * b + 3), 6)
    assert v.denominator == 1
    return int(v)


_SP6_DIMS = {(0, 0, 0): 1, (1, 0, 0): 6, (0, 1, 0): 14, (2, 0, 0): 21}
_SO7_DIMS = {(0, 0, 0): 1, (1, 0, 0): 7, (0, 0, 1): 8, (0, 1, 0): 21, (0, 0, 2): 35}


def simple_dim(kind: str, label: tuple) -> int:
    if kind == "sl":
        return _sl_dim(label)
    if kind == "sp4":
        return _sp4_dim(label)
    if kind == "sp6":
        return _SP6_DIMS[label]
    if kind == "so7":
        return _SO7_DIMS[label]
    raise KeyError(kind)


# ---------------------------------------------------------------------------
# stored plethysm data for the non-sl2 simple factors that the table needs
# ---------------------------------------------------------------------------

# (kind, label) -> (ext2 summand labels, sym2 summand labels)
_SIMPLE_PLETHYSM = {
    ("sl", (1, 0)): ([(0, 1)], [(2, 0)]),
    ("sl", (0, 1)): ([(1, 0)], [(0, 2)]),
    ("sl", (2, 0)): ([(2, 1)], [(4, 0), (0, 2)]),
    ("sl", (0, 2)): ([(1, 2)], [(0, 4), (2, 0)]),
    ("sl", (1, 1)): ([(1, 1), (3, 0), (0, 3)], [(2, 2), (1, 1), (0, 0)]),
    ("sl", (3, 0)): ([(4, 1), (0, 3)], [(6, 0), (2, 2)]),
    ("sl", (0, 3)): ([(1, 4), (3, 0)], [(0, 6), (2, 2)]),
    ("sl", (1, 0, 0)): ([(0, 1, 0)], [(2, 0, 0)]),
    ("sl", (0, 0, 1)): ([(0, 1, 0)], [(0, 0, 2)]),
    ("sl", (0, 1, 0)): ([(1, 0, 1)], [(0, 2, 0), (0, 0, 0)]),
    ("sl", (2, 0, 0)): ([(2, 1, 0)], [(4, 0, 0), (0, 2, 0)]),
    ("sl", (0, 0, 2)): ([(0, 1, 2)], [(0, 0, 4), (0, 2, 0)]),
    ("sl", (1, 0, 0, 0)): ([(0, 1, 0, 0)], [(2, 0, 0, 0)]),
    ("sl", (0, 0, 0, 1)): ([(0, 0, 1, 0)], [(0, 0, 0, 2)]),
    ("sl", (0, 1, 0, 0)): ([(1, 0, 1, 0)], [(0, 2, 0, 0), (0, 0, 0, 1)]),
    ("sl", (0, 0, 1, 0)): ([(0, 1, 0, 1)], [(0, 0, 2, 0), (1, 0, 0, 0)]),
    ("sl", (1, 0, 0, 0, 0)): ([(0, 1, 0, 0, 0)], [(2, 0, 0, 0, 0)]),
    ("sl", (0, 0, 0, 0, 1)): ([(0, 0, 0, 1, 0)], [(0, 0, 0, 0, 2)]),
    ("sp4", (1, 0)): ([(0, 1), (0, 0)], [(2, 0)]),
    ("sp4", (0, 1)): ([(2, 0)], [(0, 2), (0, 0)]),
    ("sp4", (2, 0)): ([(2, 1), (2, 0)], [(4, 0), (0, 2), (0, 1), (0, 0)]),
    ("sp6", (1, 0, 0)): ([(0, 1, 0), (0, 0, 0)], [(2, 0, 0)]),
    ("so7", (0, 0, 1)): ([(0, 1, 0), (1, 0, 0)], [(0, 0, 2), (0, 0, 0)]),
}

# dimensions of some sl_n labels appearing only inside decompositions
_EXTRA_SL_OK = True  # computed by _sl_dim generically


def simple_sym2_ext2(kind: str, label: tuple):
    """(sym2 labels, ext2 labels) of one simple factor."""
    if kind == "sl2":
        n = label[0]
        return list((k,) for k in sl2_sym2(n)), list((k,) for k in sl2_ext2(n))
    e2, s2 = _SIMPLE_PLETHYSM[(kind, label)]
    return list(s2), list(e2)


def _simple_dim_any(kind, label) -> int:
    if kind == "sl2":
        return label[0] + 1
    return simple_dim(kind, label)


# ---------------------------------------------------------------------------
# product algebras
# ---------------------------------------------------------------------------


def rep_dim(algebra: tuple, rep: tuple) -> int:
    out = 1
    for (kind, label) in zip(algebra, rep):
        out *= _simple_dim_any(kind, label)
    return out


def rep_sym2_ext2(algebra: tuple, rep: tuple):
    """Decompose sym^2 and ext^2 of an outer tensor product into irreducibles.

    Returns (sym2: list of reps, ext2: list of reps), each rep a tuple of
    per-factor labels.
    """
    if len(algebra) == 1:
        kind = algebra[0]
        s2, e2 = simple_sym2_ext2(kind, rep[0])
        return [(lbl,) for lbl in s2], [(lbl,) for lbl in e2]
    head_kind = algebra[0]
    s2v, e2v = simple_sym2_ext2(head_kind, rep[0])
    s2w, e2w = rep_sym2_ext2(algebra[1:], rep[1:])
    sym2 = [(a,) + tuple(b) for a in s2v for b in s2w] + [
        (a,) + tuple(b) for a in e2v for b in e2w
    ]
    ext2 = [(a,) + tuple(b) for a in s2v for b in e2w] + [
        (a,) + tuple(b) for a in e2v for b in s2w
    ]
    return sym2, ext2


# ---------------------------------------------------------------------------
# the signature table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignatureRow:
    dim: int
    algebra: str
    rep: str
    sym2_dims: tuple  # sorted multiset
    ext2_dims: tuple  # sorted multiset
    derived: bool = False  # dual / permuted / merged variant

    def key(self):
        return (self.dim, self.sym2_dims, self.ext2_dims)


_ALGEBRA_NAMES = {"sl2": "sl2", "sl": None, "sp4": "sp4", "sp6": "sp6", "so7": "so7"}


def _kind_name(kind, label):
    if kind == "sl":
        return f"sl{len(label) + 1}"
    return kind


def _format_algebra(algebra, rep):
    return "x".join(_kind_name(k, l) for k, l in zip(algebra, rep))


def _format_rep(rep):
    return "(x)".join("[" + ",".join(str(c) for c in l) + "]" for l in rep)


# base entries: (algebra kinds, rep labels); every decomposition is generated
_BASE_ENTRIES = [
    (("sl2",), ((1,),)),
    (("sl2",), ((2,),)),
    (("sl2",), ((3,),)),
    (("sl2",), ((4,),)),
    (("sl2",), ((5,),)),
    (("sl",), ((1, 0),)),
    (("sl",), ((2, 0),)),
    (("sl",), ((1, 1),)),
    (("sl",), ((3, 0),)),
    (("sl",), ((1, 0, 0),)),
    (("sl",), ((0, 1, 0),)),
    (("sl",), ((2, 0, 0),)),
    (("sl",), ((1, 0, 0, 0),)),
    (("sl",), ((0, 1, 0, 0),)),
    (("sl",), ((1, 0, 0, 0, 0),)),
    (("sp4",), ((1, 0),)),
    (("sp4",), ((0, 1),)),
    (("sp4",), ((2, 0),)),
    (("sp6",), ((1, 0, 0),)),
    (("so7",), ((0, 0, 1),)),
    (("sl2", "sl2"), ((1,), (1,))),
    (("sl2", "sl2"), ((1,), (2,))),
    (("sl2", "sl2"), ((1,), (3,))),
    (("sl2", "sl2"), ((2,), (2,))),
    (("sl2", "sl2"), ((1,), (4,))),
    (("sl2", "sl"), ((1,), (1, 0))),
    (("sl2", "sl"), ((2,), (1, 0))),
    (("sl2", "sl"), ((1,), (1, 0, 0))),
    (("sl2", "sp4"), ((1,), (1, 0))),
    (("sl2", "sp4"), ((1,), (0, 1))),
    (("sl2", "sl"), ((1,), (1, 0, 0, 0))),
    (("sl", "sl"), ((1, 0), (1, 0))),
    (("sl2", "sl2", "sl2"), ((1,), (1,), (1,))),
]


def _dual_label(kind, label):
    if kind in ("sl2", "sp4", "sp6", "so7"):
        return label
    return tuple(reversed(label))


def _dual_pairs_mergeable(algebra, labels):
    """Group the summand labels into dual pairs that a disconnected Galois
    group can glue; returns the merged dimension multiset."""
    remaining = list(labels)
    merged = []
    while remaining:
        lbl = remaining.pop(0)
        dual = tuple(_dual_label(k, l) for k, l in zip(algebra, lbl))
        if dual != lbl and dual in remaining:
            remaining.remove(dual)
            merged.append(2 * rep_dim(algebra, lbl))
        else:
            merged.append(rep_dim(algebra, lbl))
    return tuple(sorted(merged))


def _build_rows():
    rows = []
    seen = set()

    def add(algebra, rep, derived):
        sym2, ext2 = rep_sym2_ext2(algebra, rep)
        d = rep_dim(algebra, rep)
        s_dims = tuple(sorted(rep_dim(algebra, r) for r in sym2))
        e_dims = tuple(sorted(rep_dim(algebra, r) for r in ext2))
        variants = [(s_dims, e_dims, derived)]
        # merged variants: dual pairs of summands glued over a smaller field
        s_merged = _dual_pairs_mergeable(algebra, sym2)
        e_merged = _dual_pairs_mergeable(algebra, ext2)
        if s_merged != s_dims or e_merged != e_dims:
            variants.append((s_merged, e_merged, True))
            if s_merged != s_dims and e_merged != e_dims:
                variants.append((s_dims, e_merged, True))
                variants.append((s_merged, e_dims, True))
        for s, e, der in variants:
            row = SignatureRow(
                dim=d,
                algebra=_format_algebra(algebra, rep),
                rep=_format_rep(rep),
                sym2_dims=s,
                ext2_dims=e,
                derived=der,
            )
            marker = (row.algebra, row.rep, row.sym2_dims, row.ext2_dims)
            if marker not in seen:
                seen.add(marker)
                rows.append(row)

    for algebra, rep in _BASE_ENTRIES:
        add(algebra, rep, False)
        # dual variant
        dual_rep = tuple(_dual_label(k, l) for k, l in zip(algebra, rep))
        if dual_rep != rep:
            add(algebra, dual_rep, True)
        # factor permutations for same-kind products
        if len(algebra) > 1:
            for perm in permutations(range(len(algebra))):
                pa = tuple(algebra[i] for i in perm)
                pr = tuple(rep[i] for i in perm)
                if (pa, pr) != (algebra, rep):
                    try:
                        add(pa, pr, True)
                    except KeyError:
                        pass
    return rows


SIGNATURE_ROWS = _build_rows()

# display-only: the introduction's list of simple algebras with the smallest
# faithful dimension and the degree of the invariant F
EXCEPTIONAL_DISPLAY = [
    ("A_n", "sl_{n+1}", "n+1", None),
    ("B_n", "so_{2n+1}", "2n+1", 2),
    ("C_n", "sp_{2n}", "2n", None),
    ("D_n", "so_{2n}", "2n", 2),
    ("E6", "e6", 27, 3),
    ("E7", "e7", 56, 4),
    ("E8", "e8", 248, 2),
    ("F4", "f4", 26, 2),
    ("G2", "g2", 7, 2),
]


def signature_lookup(d: int, sym2_dims, ext2_dims=None):
    """All stored rows consistent with the observed summand dimensions."""
    s = tuple(sorted(sym2_dims))
    e = tuple(sorted(ext2_dims)) if ext2_dims is not None else None
    out = []
    for row in SIGNATURE_ROWS:
        if row.dim != d:
            continue
        if row.sym2_dims != s:
            continue
        if e is not None and row.ext2_dims != e:
            continue
        out.append(row)
    return out


def table_as_json():
    return [
        {
            "dim": r.dim,
            "algebra": r.algebra,
            "rep": r.rep,
            "sym2_dims": list(r.sym2_dims),
            "ext2_dims": list(r.ext2_dims),
            "derived": r.derived,
        }
        for r in SIGNATURE_ROWS
    ]


# ---------------------------------------------------------------------------
# classification of differential modules by signature
# ---------------------------------------------------------------------------


@dataclass
class ClassifyResult:
    rows: list
    sym2_split: SplitResult
    ext2_split: SplitResult

    @property
    def sym2_dims(self):
        return tuple(self.sym2_split.dims())

    @property
    def ext2_dims(self):
        return tuple(self.ext2_split.dims())


def classify_module(m: DiffModule, bounds: SolverBounds | None = None) -> ClassifyResult:
    """Signature classification: split sym^2 M and ext^2 M, look both up."""
    s2 = split_semisimple(sym_power(m, 2), bounds)
    e2 = split_semisimple(ext_power(m, 2), bounds)
    rows = signature_lookup(m.dim, s2.dims(), e2.dims())
    return ClassifyResult(rows, s2, e2)
