from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from ratyang.fock import FockSpace
from ratyang.liealg import PairingData, RootData, gn_action
from ratyang.linalg import ScaledSparse
from ratyang.yangian import SeriesMatrix, perturb_entry
from ratyang.weyl import (
    SignedPerm, inversion_set, root_image, word_to_perm, word_table,
)
from ratyang.modules import ModuleSpec, siverma_model, verma_model
from ratyang.intertwine import (
    GENERIC_PARAMETERS, IntertwinerProblem, highest_vector,
    image_invariance_defects, lemma_factor, predicted_multiplier,
    schur_dimension, solve_commutant, target_vector, verify_isis, z_eta,
    zeta_equivariance_defects,
)

MU2 = (Fraction(5, 7), Fraction(2, 11))


def lam_for(mu, nu, n):
    return tuple(x + Fraction(n, 2) - k for x, k in zip(mu, nu))


# --- multiplier table -------------------------------------------------------

def test_z_pinned_doubled_root():
    assert z_eta((2,), (Fraction(5, 7),), (Fraction(-2, 7),), (2,), 2,
                 "symp") == Fraction(-2, 5)


def test_z_is_one_outside_the_conditions():
    mus = (Fraction(5, 7), Fraction(2, 11))
    lams = (Fraction(12, 7), Fraction(13, 11))
    assert z_eta((1, -1), mus, lams, (1, 1), 2, "orth") == 1
    assert z_eta((1, 1), mus, lams, (1, 0), 2, "orth") == 1
    assert z_eta((1,), mus, lams, (2, 2), 2, "orth") == 1
    assert z_eta((2,), mus, lams, (1, 1), 2, "symp") == 1


def test_z_rejects_bad_roots():
    mus = (Fraction(5, 7), Fraction(2, 11))
    with pytest.raises(ValueError):
        z_eta((2, 0), mus, mus, (2, 2), 2, "orth")
    with pytest.raises(ValueError):
        z_eta((-1, 1), mus, mus, (1, 0), 2, "symp")
    with pytest.raises(ValueError):
        z_eta((1, 1, -1), mus + mus[:1], mus + mus[:1], (1, 1, 0), 2, "orth")


def test_z_zero_denominator_is_a_genericity_error():
    with pytest.raises(ValueError, match="generic"):
        z_eta((2,), (Fraction(0),), (Fraction(1),), (2,), 2, "symp")


def test_multiplier_identity_and_rank_one():
    mu = MU2[:1]
    for nu1, want in ((2, Fraction(-2, 5)), (1, Fraction(1))):
        lam = lam_for(mu, (nu1,), 2)
        sigma = SignedPerm.generator(1, 1)
        assert predicted_multiplier(sigma, mu, lam, 2, "symp") == want
    assert predicted_multiplier(SignedPerm.identity(2), MU2,
                                lam_for(MU2, (1, 2), 2), 2, "orth") == 1


def test_multiplier_pinned_values():
    cases = [
        ("symp", (2, 1), (1,), Fraction(41, 118)),
        ("symp", (2, 1), (1, 2, 1, 2), Fraction(9143, 56050)),
        ("symp", (2, 2), (2,), Fraction(2, 13)),
        ("symp", (2, 0), (1,), Fraction(-18, 59)),
        ("orth", (2, 2), (1, 2, 1, 2), Fraction(-4, 73)),
        ("orth", (2, 1), (1, 2, 1, 2), Fraction(2829, 17228)),
    ]
    for case, nu, word, want in cases:
        sigma = word_to_perm(2, word)
        lam = lam_for(MU2, nu, 2)
        assert predicted_multiplier(sigma, MU2, lam, 2, case) == want


@pytest.mark.parametrize("case", ["symp", "orth"])
def test_multiplier_grows_along_length(case):
    # appending a length-increasing letter multiplies by the moved root
    mu, nu = MU2, (2, 1)
    lam = lam_for(mu, nu, 2)
    rho = RootData(2, case).rho()
    mu_star = tuple(x + r for x, r in zip(mu, rho))
    lam_star = tuple(x + r for x, r in zip(lam, rho))
    for images in word_table(2, case):
        sigma = SignedPerm(images)
        base = len(inversion_set(sigma, case))
        for a in (1, 2):
            bigger = SignedPerm.generator(2, a).compose(sigma)
            if len(inversion_set(bigger, case)) != base + 1:
                continue
            root = [0] * 2
            if a == 1:
                root[0], root[1] = 1, -1
            else:
                root[1] = 2 if case == "symp" else 1
            moved = tuple(
                sum((1 if sigma.inverse()(b + 1) > 0 else -1) * root[b]
                    if abs(sigma.inverse()(b + 1)) == bb + 1 else 0
                    for b in range(2)) for bb in range(2))
            assert predicted_multiplier(bigger, mu, lam, 2, case) == \
                predicted_multiplier(sigma, mu, lam, 2, case) * \
                z_eta(moved, mu_star, lam_star, nu, 2, case)


# --- elementary factor oracles ---------------------------------------------

def test_factor_trivial_ranges():
    assert lemma_factor("xx", 1, 1, 2, Fraction(3, 7)) == 1
    assert lemma_factor("dd", 1, 2, 1, Fraction(3, 7)) == 1
    assert lemma_factor("xd", 1, 1, 1, Fraction(3, 7), n=2) == 1
    assert lemma_factor("x", 1, 1, 0, Fraction(3, 7), n=2) == 1


def test_factor_needs_the_column_count():
    with pytest.raises(ValueError):
        lemma_factor("xd", 1, 2, 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        lemma_factor("qq", 1, 2, 1, Fraction(1, 2))


def test_factor_pole_is_loud():
    with pytest.raises(ArithmeticError):
        lemma_factor("xx", 1, 2, 0, Fraction(-1))


def test_factor_matches_difference_root_pinned():
    # s=2, t=0 on the shifted eigenvalue reproduces the table ratio
    ms, mt = Fraction(19, 7), Fraction(13, 11)
    h = -ms + mt - 1
    lams = ms + 1 - 2
    lamt = mt + 1 - 0
    assert lemma_factor("xx", 1, 2, 0, h) == (lams - lamt) / (ms - mt)


@given(st.fractions(min_value=-3, max_value=3, max_denominator=7),
       st.fractions(min_value=-3, max_value=3, max_denominator=5))
@settings(max_examples=8, deadline=None)
def test_factor_substitutions_recover_the_table(xb, xc):
    n = 2
    mus = (xb + Fraction(19, 7), xc + Fraction(13, 11))
    for nub in range(n + 1):
        for nuc in range(n + 1):
            nu = (nub, nuc)
            lams = tuple(x + Fraction(n, 2) - k for x, k in zip(mus, nu))
            hd = -mus[0] + mus[1] - 1
            assert lemma_factor("xx", 1, nub, nuc, hd) == \
                z_eta((1, -1), mus, lams, nu, n, "symp")
            assert lemma_factor("dd", 1, nuc, nub, hd) == \
                z_eta((1, -1), mus, lams, nu, n, "symp")
            hs = -mus[0] - mus[1] - n - 1
            assert lemma_factor("xd", 1, nub, nuc, hs, n=n) == \
                z_eta((1, 1), mus, lams, nu, n, "symp")
            hx = -mus[0] - Fraction(n, 2) - 1
            assert lemma_factor("x", 1, nub, 0, hx, n=n) == \
                z_eta((2, 0)[:1] + (0,), mus, lams, nu, n, "symp")


# --- distinguished vectors --------------------------------------------------

def test_highest_vector_rank_one_pinned():
    # the one-symbol monomial sits first in its degree block
    assert highest_vector((1,), 1, 2) == {0: Fraction(1)}
    assert highest_vector((1, 2), 2, 3) == {0: Fraction(1)}


def test_highest_vector_killed_by_raising_operator():
    space = FockSpace(1, 2)
    pairing = PairingData.standard(2, "symp")
    state = 1 << space.slot(1, 1)
    assert gn_action(space, pairing, 1, 2).apply(
        {state: Fraction(1)}) == {}


def test_target_for_identity_is_the_highest_vector():
    for case in ("symp", "orth"):
        assert target_vector(SignedPerm.identity(2), (1, 1), 2, 2, case) == \
            highest_vector((1, 1), 2, 2)


def test_target_pinned_values():
    one = {0: Fraction(1)}
    assert target_vector(SignedPerm.generator(1, 1), (1,), 1, 2, "orth") == one
    assert target_vector(SignedPerm.generator(1, 1), (1,), 1, 2, "symp") == one
    assert target_vector(word_to_perm(2, (1, 2, 1, 2)), (1, 1), 2, 2,
                         "orth") == one
    swap = target_vector(SignedPerm.generator(2, 1), (1, 1), 2, 2, "symp")
    assert swap == {0: Fraction(-1)}


# --- the solver -------------------------------------------------------------

def test_problem_rejects_mismatches():
    mu = MU2
    lam = lam_for(mu, (1, 1), 2)
    good = verma_model(mu, lam, "orth", 2)
    other = verma_model((mu[0], Fraction(3, 13)),
                        (lam[0], Fraction(3, 13)), "orth", 2)
    with pytest.raises(ValueError, match="twist"):
        IntertwinerProblem(good, other)
    zero = verma_model(mu, (lam[0] + 5, lam[1]), "orth", 2)
    assert zero.params["zero"]
    with pytest.raises(ValueError, match="zero"):
        IntertwinerProblem(zero, good)


def test_self_commutant_is_scalar():
    mu = MU2
    lam = lam_for(mu, (1, 1), 2)
    spec = verma_model(mu, lam, "symp", 2)
    basis = solve_commutant(IntertwinerProblem(spec, spec))
    assert len(basis) == 1
    phi = basis[0]
    c = phi[0][0]
    assert c != 0
    assert phi == [[c if r == s else Fraction(0) for s in range(spec.dim)]
                   for r in range(spec.dim)]


@pytest.mark.parametrize("case", ["symp", "orth"])
def test_swap_intertwiner_is_unique(case):
    mu = MU2
    lam = lam_for(mu, (1, 1), 2)
    src = verma_model(mu, lam, case, 2)
    tgt = siverma_model(mu, lam, SignedPerm.generator(2, 1), case, 2)
    assert len(solve_commutant(IntertwinerProblem(src, tgt))) == 1


def test_incompatible_blocks_have_no_intertwiner():
    mu = MU2
    a = verma_model(mu, lam_for(mu, (1, 1), 2), "orth", 2)
    b = verma_model(mu, lam_for(mu, (0, 1), 2), "orth", 2)
    assert solve_commutant(IntertwinerProblem(a, b)) == []


def test_schur_dimension_counts_copies():
    mu = MU2
    spec = verma_model(mu, lam_for(mu, (1, 0), 2), "orth", 2)
    assert schur_dimension(spec) == 1
    real = spec.realization
    two = ScaledSparse.identity(2)
    terms = [[[(f, two.kron(M)) for f, M in real.entry_terms(i + 1, j + 1)]
              for j in range(real.n)] for i in range(real.n)]
    double = ModuleSpec(
        SeriesMatrix(real.n, 2 * real.dim, real.flavor, real.pairing, terms,
                     twist=real.twist),
        None, dict(spec.params))
    assert schur_dimension(double) == 4


def test_schur_dimension_degenerate_block():
    mu = MU2
    assert schur_dimension(verma_model(mu, lam_for(mu, (0, 0), 2),
                                       "symp", 2)) == 1


def test_schur_generic_parameter_sweep():
    # every generically parameterized model is irreducible over its image
    for case, ns in (("orth", (2, 3)), ("symp", (2,))):
        for n in ns:
            for m in (1, 2):
                for k in range(5):
                    mu = GENERIC_PARAMETERS[k:k + m]
                    lam = lam_for(mu, (1,) * m, n)
                    assert schur_dimension(
                        verma_model(mu, lam, case, n)) == 1


def test_perturbed_source_loses_its_intertwiner():
    mu = MU2
    lam = lam_for(mu, (1, 1), 2)
    src = verma_model(mu, lam, "symp", 2)
    tgt = siverma_model(mu, lam, SignedPerm.generator(2, 1), "symp", 2)
    broken = ModuleSpec(perturb_entry(src.realization, 1, 2), None,
                        dict(src.params))
    assert solve_commutant(IntertwinerProblem(broken, tgt)) == []


# --- word walks -------------------------------------------------------------

def test_walk_identity_element():
    rep = verify_isis(SignedPerm.identity(2), MU2, lam_for(MU2, (1, 1), 2),
                      2, "symp")
    assert rep["pass"] and rep["multiplier"] == 1


@pytest.mark.parametrize("case", ["symp", "orth"])
def test_walk_longest_element(case):
    nu = (2, 1)
    rep = verify_isis(word_to_perm(2, (1, 2, 1, 2)), MU2,
                      lam_for(MU2, nu, 2), 2, case)
    assert rep["pass"]
    assert rep["multiplier"] == predicted_multiplier(
        word_to_perm(2, (1, 2, 1, 2)), MU2, lam_for(MU2, nu, 2), 2, case)
    assert len(rep["words"]) == 2


def test_walk_orth_flip_uses_the_substitution():
    # the sign flip step is written down, so no commutant is solved
    rep = verify_isis(SignedPerm.generator(2, 2), MU2,
                      lam_for(MU2, (1, 1), 2), 2, "orth")
    assert rep["pass"]
    assert rep["commutant_dimensions"] in ([], [1, 1])


@pytest.mark.parametrize("case", ["symp", "orth"])
def test_walk_every_group_element(case):
    nu = (1, 1)
    lam = lam_for(MU2, nu, 2)
    for images in word_table(2, case):
        rep = verify_isis(SignedPerm(images), MU2, lam, 2, case)
        assert rep["pass"], (images, rep)


def test_walk_rejects_bad_degrees():
    with pytest.raises(ValueError, match="degree"):
        verify_isis(SignedPerm.identity(2), MU2,
                    (MU2[0] + 7, MU2[1] + 1), 2, "orth")


# --- braid conjugation on the pair realization ------------------------------

@pytest.mark.parametrize("case", ["symp", "orth"])
def test_braid_action_is_equivariant(case):
    for word in [(1,), (2,), (1, 2), (1, 2, 1, 2)]:
        assert zeta_equivariance_defects(word, 2, 2, case) == []


@pytest.mark.parametrize("case", ["symp", "orth"])
def test_braid_action_fixes_the_reflection_image(case):
    for word in [(1,), (2,), (2, 1)]:
        assert image_invariance_defects(word, 2, 2, case) == []
