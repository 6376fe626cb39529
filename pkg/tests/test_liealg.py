from fractions import Fraction
from itertools import product

import pytest

from ratyang.linalg import SparseOp
from ratyang.fock import FockSpace, column_order
from ratyang.liealg import (
    PairingData, FmData, RootData, zeta_n, zeta_n_direct, gn_action,
    row_gl_action, sl2_triple, realize,
)


def test_pairing_tables_pinned():
    p = PairingData.standard(4, "orth")
    assert [p.tilde(i) for i in range(1, 5)] == [2, 1, 4, 3]
    assert [p.theta(i) for i in range(1, 5)] == [1, 1, 1, 1]
    q = PairingData.standard(4, "symp")
    assert [q.tilde(i) for i in range(1, 5)] == [2, 1, 4, 3]
    assert [q.theta(i) for i in range(1, 5)] == [1, -1, 1, -1]
    r = PairingData.standard(3, "orth")
    assert [r.tilde(i) for i in range(1, 4)] == [2, 1, 3]


def test_pairing_involution_and_sign_product():
    for flavor, n in [("orth", 5), ("orth", 6), ("symp", 6)]:
        p = PairingData.standard(n, flavor)
        for i in range(1, n + 1):
            assert p.tilde(p.tilde(i)) == i
            if p.tilde(i) != i:
                expect = 1 if flavor == "orth" else -1
                assert p.theta(i) * p.theta(p.tilde(i)) == expect


def test_pairing_composite_blocks():
    p = PairingData.composite(2, 4, "symp")
    assert [p.tilde(i) for i in range(1, 7)] == [2, 1, 4, 3, 6, 5]
    assert [p.theta(i) for i in range(1, 7)] == [1, -1, 1, -1, 1, -1]
    q = PairingData.composite(4, 3, "orth")
    # the second block pairs within itself and its odd top is self-paired
    assert [q.tilde(i) for i in range(5, 8)] == [6, 5, 7]


def test_pairing_symp_odd_rejected():
    with pytest.raises(ValueError):
        PairingData.standard(3, "symp")
    with pytest.raises(ValueError):
        PairingData.composite(2, 3, "symp")


def test_tilde_reverses_column_order():
    for flavor, n in [("orth", 4), ("orth", 5), ("symp", 4), ("symp", 6)]:
        p = PairingData.standard(n, flavor)
        order = column_order(n)
        assert [p.tilde(k) for k in order] == list(reversed(order))


@pytest.mark.parametrize("flavor", ["orth", "symp"])
def test_defining_rep_bracket(flavor):
    fm = FmData(2, flavor)
    reps = {pair: fm.defining(*pair) for pair in fm.pairs()}
    for ab, cd in product(fm.pairs(), repeat=2):
        lhs = reps[ab].commutator(reps[cd])
        rhs = realize(fm.bracket(ab, cd), reps) if fm.bracket(ab, cd) else \
            SparseOp.zero(4)
        assert lhs == rhs


@pytest.mark.parametrize("flavor", ["orth", "symp"])
def test_defining_rep_symmetry_relation(flavor):
    fm = FmData(3, flavor)
    for c, d in fm.pairs():
        lhs = fm.defining(-d, -c)
        assert lhs == fm.defining(c, d).scale(-fm.eps(c, d))


@pytest.mark.parametrize("flavor", ["orth", "symp"])
def test_zeta_matches_direct_form(flavor):
    sp = FockSpace(2, 2)
    pairing = PairingData.standard(2, flavor)
    fm = FmData(2, flavor)
    for pair in fm.pairs():
        assert zeta_n(sp, pairing, *pair) == zeta_n_direct(sp, pairing, *pair)


@pytest.mark.parametrize("flavor", ["orth", "symp"])
def test_zeta_is_a_homomorphism(flavor):
    sp = FockSpace(2, 2)
    pairing = PairingData.standard(2, flavor)
    fm = FmData(2, flavor)
    imgs = {pair: zeta_n(sp, pairing, *pair) for pair in fm.pairs()}
    for ab, cd in product(fm.pairs(), repeat=2):
        lhs = imgs[ab].commutator(imgs[cd])
        combo = fm.bracket(ab, cd)
        rhs = realize(combo, imgs) if combo else SparseOp.zero(sp.dim)
        assert lhs == rhs


@pytest.mark.parametrize("flavor", ["orth", "symp"])
def test_zeta_linear_consistency(flavor):
    sp = FockSpace(2, 2)
    pairing = PairingData.standard(2, flavor)
    fm = FmData(2, flavor)
    for c, d in fm.pairs():
        assert zeta_n(sp, pairing, -d, -c) == \
            zeta_n(sp, pairing, c, d).scale(-fm.eps(c, d))


@pytest.mark.parametrize("flavor", ["orth", "symp"])
def test_zeta_commutes_with_fixed_subalgebra(flavor):
    sp = FockSpace(2, 2)
    pairing = PairingData.standard(2, flavor)
    fm = FmData(2, flavor)
    gens = [gn_action(sp, pairing, i, j) for i in (1, 2) for j in (1, 2)]
    for pair in fm.pairs():
        z = zeta_n(sp, pairing, *pair)
        for g in gens:
            assert z.commutator(g).is_zero()


def test_gn_action_linear_relation():
    for flavor in ("orth", "symp"):
        sp = FockSpace(1, 2)
        pairing = PairingData.standard(2, flavor)
        for i, j in product((1, 2), repeat=2):
            th = pairing.theta(i) * pairing.theta(j)
            a = gn_action(sp, pairing, i, j)
            b = gn_action(sp, pairing, pairing.tilde(j), pairing.tilde(i))
            assert a == b.scale(-th)


def test_row_gl_action_brackets():
    sp = FockSpace(2, 3)
    ops = {(a, b): row_gl_action(sp, a, b)
           for a in (1, 2) for b in (1, 2)}
    for (a, b), (c, d) in product(ops, repeat=2):
        lhs = ops[a, b].commutator(ops[c, d])
        rhs = SparseOp.zero(sp.dim)
        if b == c:
            rhs = rhs + ops[a, d]
        if d == a:
            rhs = rhs - ops[c, b]
        assert lhs == rhs


@pytest.mark.parametrize("flavor,m", [("orth", 2), ("orth", 3),
                                      ("symp", 1), ("symp", 2), ("symp", 3)])
def test_sl2_triples_in_defining_rep(flavor, m):
    fm = FmData(m, flavor)
    reps = {pair: fm.defining(*pair) for pair in fm.pairs()}
    tops = range(1, m + 1) if flavor == "symp" or m > 1 else []
    for a in tops:
        if flavor == "orth" and m == 1:
            continue
        E, F, H = (realize(t, reps) for t in sl2_triple(m, flavor, a))
        assert E.commutator(F) == H
        assert H.commutator(E) == E.scale(2)
        assert H.commutator(F) == F.scale(-2)


@pytest.mark.parametrize("flavor", ["orth", "symp"])
def test_sl2_triples_through_zeta(flavor):
    sp = FockSpace(2, 2)
    pairing = PairingData.standard(2, flavor)
    imgs = {pair: zeta_n(sp, pairing, *pair) for pair in FmData(2, flavor).pairs()}
    for a in (1, 2):
        E, F, H = (realize(t, imgs) for t in sl2_triple(2, flavor, a))
        assert E.commutator(F) == H
        assert H.commutator(E) == E.scale(2)
        assert H.commutator(F) == F.scale(-2)


def test_root_data():
    so3 = RootData(3, "orth")
    sp3 = RootData(3, "symp")
    assert len(so3.positive_roots()) == 6
    assert len(sp3.positive_roots()) == 9
    assert so3.rho() == (2, 1, 0)
    assert sp3.rho() == (3, 2, 1)
    assert so3.simple_root(1) == (1, -1, 0)
    assert so3.simple_root(3) == (0, 1, 1)
    assert sp3.simple_root(3) == (0, 0, 2)
    for r in so3.positive_roots() + sp3.positive_roots():
        assert RootData.is_positive(r)
        assert not RootData.is_positive(tuple(-x for x in r))
    assert RootData(1, "orth").positive_roots() == []
    assert RootData(1, "orth").rho() == (0,)


def test_rho_is_halfsum():
    for flavor, m in [("orth", 3), ("symp", 3), ("orth", 2), ("symp", 2)]:
        rd = RootData(m, flavor)
        total = [Fraction(0)] * m
        for r in rd.positive_roots():
            for k, x in enumerate(r):
                total[k] += Fraction(x, 2)
        assert tuple(total) == rd.rho()
