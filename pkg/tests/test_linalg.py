from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ratyang.rational import UPoly, RatFunc
from ratyang.linalg import RFMatrix, rfm_inverse, nullspace, ScaledSparse

small = st.integers(min_value=-4, max_value=4)


def rf(num, den=1):
    return RatFunc(UPoly(num) if isinstance(num, (list, tuple)) else UPoly.const(num),
                   UPoly(den) if isinstance(den, (list, tuple)) else UPoly.const(den))


def test_rfm_mul_identity():
    m = RFMatrix([[rf([1, 1]), rf(2)], [rf(0), rf([0, 0, 1])]])
    assert m * RFMatrix.identity(2) == m
    assert RFMatrix.identity(2) * m == m


def test_rfm_inverse_pinned_2x2():
    m = RFMatrix([[rf([0, 1]), rf(1)], [rf(1), rf([0, 1])]])   # [[u,1],[1,u]]
    inv = rfm_inverse(m)
    assert (m * inv).is_identity()
    assert inv[0, 0] == RatFunc(UPoly([0, 1]), UPoly([-1, 0, 1]))


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3),
       st.permutations([0, 1, 2]))
@settings(max_examples=25, deadline=None)
def test_rfm_inverse_rational_entries(cs, perm):
    # entries c/(u + i + j + 1) + [i == perm[j]]: generically invertible
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            e = RatFunc(UPoly.const(cs[i][j]), UPoly([i + j + 1, 1]))
            if perm[j] == i:
                e = e + RatFunc.const(1)
            row.append(e)
        rows.append(row)
    m = RFMatrix(rows)
    try:
        inv = rfm_inverse(m)
    except ArithmeticError:
        return
    assert (m * inv).is_identity()
    assert (inv * m).is_identity()


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=4, max_size=4))
@settings(max_examples=20, deadline=None)
def test_rfm_inverse_resolvent_agrees_with_elimination(cs):
    # u*I + C hits the characteristic-matrix path; elimination is the oracle
    u = RatFunc.u()
    rows = [[(u if i == j else rf(0)) + rf(Fraction(cs[i][j], 3))
             for j in range(4)] for i in range(4)]
    m = RFMatrix(rows)
    fast = rfm_inverse(m, method="resolvent")
    slow = rfm_inverse(m, method="bareiss")
    assert fast == slow
    assert (m * fast).is_identity()


def test_rfm_inverse_field_method_agrees():
    u = RatFunc.u()
    m = RFMatrix([[u + rf(1), rf(2), rf(0)],
                  [rf(1, [1, 1]), u, rf(3)],
                  [rf(0), rf(1), u * u]])
    a = rfm_inverse(m, method="bareiss")
    b = rfm_inverse(m, method="field")
    assert a == b
    assert (m * a).is_identity()


def test_rfm_inverse_row_scaled_resolvent():
    # rows carrying distinct denominators still reach the fast path
    u = RatFunc.u()
    half = Fraction(1, 2)
    m = RFMatrix([[(u + rf(1)) * rf(1, [half, 1]), rf(2, [half, 1])],
                  [rf(1, [-2, 1]), (u - rf(3)) * rf(1, [-2, 1])]])
    inv = rfm_inverse(m)
    assert (m * inv).is_identity()
    assert (inv * m).is_identity()


def test_rfm_inverse_singular_raises():
    m = RFMatrix([[rf(1), rf(2)], [rf(2), rf(4)]])
    with pytest.raises(ArithmeticError):
        rfm_inverse(m, method="bareiss")
    with pytest.raises(ArithmeticError):
        rfm_inverse(m, method="field")


def test_nullspace_pinned():
    # x + y + z = 0, x - y = 0  ->  kernel spanned by (1, 1, -2)/scale
    rows = [{0: Fraction(1), 1: Fraction(1), 2: Fraction(1)},
            {0: Fraction(1), 1: Fraction(-1)}]
    basis = nullspace(rows, 3)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] + v[1] + v[2] == 0
    assert v[0] - v[1] == 0
    assert any(x != 0 for x in v)


@given(st.lists(st.lists(small, min_size=5, max_size=5), min_size=2, max_size=6))
@settings(max_examples=30)
def test_nullspace_annihilates_and_has_right_dimension(mat):
    rows = [{j: Fraction(v) for j, v in enumerate(r) if v} for r in mat]
    basis = nullspace(rows, 5)
    for v in basis:
        for r in rows:
            assert sum(c * v[j] for j, c in r.items()) == 0
    # oracle rank by dense elimination
    dense = [[Fraction(v) for v in r] for r in mat]
    rank = 0
    for col in range(5):
        piv = next((i for i in range(rank, len(dense)) if dense[i][col]), None)
        if piv is None:
            continue
        dense[rank], dense[piv] = dense[piv], dense[rank]
        for i in range(len(dense)):
            if i != rank and dense[i][col]:
                f = dense[i][col] / dense[rank][col]
                dense[i] = [a - f * b for a, b in zip(dense[i], dense[rank])]
        rank += 1
    assert len(basis) == 5 - rank


def test_nullspace_zero_rows_ignored():
    assert len(nullspace([{}, {}], 2)) == 2


def dense_of(m):
    return [[m.entry(r, c) for c in range(m.ncols)] for r in range(m.nrows)]


def test_scaled_sparse_roundtrip_and_mul():
    a = ScaledSparse.from_entries(2, 3, [(0, 0, Fraction(1, 2)),
                                         (1, 2, Fraction(-3))])
    b = ScaledSparse.from_entries(3, 2, [(0, 1, Fraction(2, 5)),
                                         (2, 0, Fraction(7))])
    c = a * b
    da, db = dense_of(a), dense_of(b)
    expect = [[sum(da[i][k] * db[k][j] for k in range(3)) for j in range(2)]
              for i in range(2)]
    assert dense_of(c) == expect


def test_scaled_sparse_eq_across_scalings():
    a = ScaledSparse.from_entries(2, 2, [(0, 1, Fraction(1, 3))])
    b = ScaledSparse(2, 2, den=6, cols=[{}, {0: 2}])
    assert a == b
    assert not (a == ScaledSparse(2, 2))
    assert a.defects_vs(b) == []
    assert ScaledSparse.identity(2).defects_vs(ScaledSparse(2, 2)) == [(0, 0), (1, 1)]


def test_scaled_sparse_add_kron():
    a = ScaledSparse.from_entries(2, 2, [(0, 0, Fraction(1, 2)), (1, 0, Fraction(1))])
    b = ScaledSparse.from_entries(2, 2, [(0, 0, Fraction(1, 3)), (0, 1, Fraction(2))])
    s = a + b
    assert s.entry(0, 0) == Fraction(5, 6)
    assert s.entry(1, 0) == 1 and s.entry(0, 1) == 2
    k = a.kron(b)
    assert k.nrows == 4 and k.ncols == 4
    # block (0,0) of the tensor product is a[0,0] * b
    assert k.entry(0, 0) == Fraction(1, 6)
    assert k.entry(0, 1) == 1
    assert k.entry(2, 0) == Fraction(1, 3)
