"""Intertwiners between the permuted tensor models.

An intertwiner between two realizations with the same number of rows is
a constant matrix commuting with every operator entry as an identity of
rational functions.  The solver clears denominators and equates the
u-coefficients, so the kernel comes out of exact elimination with no
evaluation points involved.

On top of the solver sit the multiplier table (one rational number per
positive root of the signed permutation group), the distinguished
vectors the elementary maps are normalized on, and the end-to-end walk
along reduced words.  Walking the same element through two different
words must produce identical composite matrices; that, together with
the per-letter normalization, is the machine-checkable core of the
multiplier statement.
"""

from fractions import Fraction

from .fock import FockSpace, varpi_conjugator
from .liealg import FmData, PairingData, RootData, zeta_n
from .linalg import RFMatrix, nullspace
from .rational import RF0, RatFunc, UPoly, poly_lcm, rat
from .weyl import (
    SignedPerm, clifford_braid_operator, defining_conjugator, inversion_set,
    pair_map_for_word, reduced_words, root_image,
)
from .modules import _ss_entries, beta_m, fm_defining, siverma_model

F0 = Fraction(0)
F1 = Fraction(1)

# fixed pool of generic weights: distinct odd prime denominators keep
# every sum, difference and double away from the integers
GENERIC_PARAMETERS = (
    Fraction(5, 7), Fraction(2, 11), Fraction(3, 13), Fraction(7, 17),
    Fraction(11, 19), Fraction(4, 23), Fraction(9, 29), Fraction(6, 31),
)


def _degree_targets(mu, lam, n):
    """Block degrees prescribed by a weight pair; each must be an
    integer between 0 and n."""
    nu = []
    for a, (x, y) in enumerate(zip(mu, lam), start=1):
        d = Fraction(n, 2) + x - y
        if d.denominator != 1 or not 0 <= d <= n:
            raise ValueError(
                "weight pair %d prescribes degree %s" % (a, d))
        nu.append(int(d))
    return tuple(nu)


def _starred(labels, case):
    rho = RootData(len(labels), case).rho()
    return tuple(rat(x) + r for x, r in zip(labels, rho))


# ---------------------------------------------------------------------------
# the commutant solver

class IntertwinerProblem:
    """A pair of realizations the solver may connect.

    Both must share the row count and the pairing, and carry the same
    recorded twist, so the twist cancels from the commutation identity
    and never enters the linear system."""

    __slots__ = ("source", "target", "n", "dims")

    def __init__(self, source, target):
        if source.params.get("zero") or target.params.get("zero"):
            raise ValueError("cannot intertwine a zero module")
        s, t = source.realization, target.realization
        if s.n != t.n:
            raise ValueError("realizations differ in row count")
        if (s.pairing is None) != (t.pairing is None) or (
                s.pairing is not None and
                s.pairing.flavor != t.pairing.flavor):
            raise ValueError("realizations differ in pairing")
        if s.twist != t.twist:
            raise ValueError("recorded twists differ")
        self.source = source
        self.target = target
        self.n = s.n
        self.dims = (t.dim, s.dim)


def _commutation_rows(src, tgt):
    """Sparse constraint rows on the flattened tgt.dim-by-src.dim
    unknown, one bundle per entry pair, u-power and output position."""
    ds, dt = src.dim, tgt.dim
    rows = {}

    def bump(key, flat, val):
        row = rows.setdefault(key, {})
        row[flat] = row.get(flat, F0) + val

    for i in range(1, src.n + 1):
        for j in range(1, src.n + 1):
            ts = src.entry_terms(i, j)
            tt = tgt.entry_terms(i, j)
            den = UPoly.const(1)
            for f, _ in ts + tt:
                den = poly_lcm(den, f.den)
            for f, M in ts:
                p = f.num * den.exact_div(f.den)
                for t, pc in enumerate(p.c):
                    if not pc:
                        continue
                    for r, c, v in _ss_entries(M):
                        w = pc * v
                        for x in range(dt):
                            bump((i, j, t, x, c), x * ds + r, w)
            for f, M in tt:
                p = f.num * den.exact_div(f.den)
                for t, pc in enumerate(p.c):
                    if not pc:
                        continue
                    for r, c, v in _ss_entries(M):
                        w = pc * v
                        for y in range(ds):
                            bump((i, j, t, r, y), c * ds + y, -w)
    return [row for row in rows.values() if any(row.values())]


def solve_commutant(problem):
    """All constant matrices carrying the source realization to the
    target one, as a deterministic exact basis."""
    src = problem.source.realization
    tgt = problem.target.realization
    dt, ds = problem.dims
    basis = nullspace(_commutation_rows(src, tgt), dt * ds)
    return [[vec[r * ds:(r + 1) * ds] for r in range(dt)] for vec in basis]


def schur_dimension(spec):
    """Dimension of the self-commutant; one means the generated
    operator algebra is the full matrix algebra."""
    return len(solve_commutant(IntertwinerProblem(spec, spec)))


# ---------------------------------------------------------------------------
# the multiplier table

def _generic_ratio(num, den, what):
    if den == 0:
        raise ValueError("weights are not generic: zero denominator in "
                         + what)
    return num / den


def z_eta(root, mu_star, lam_star, nu, n, case):
    """Multiplier attached to one positive root.

    The value is a ratio of shifted-label combinations when the root's
    degree condition holds and one otherwise; single sign flips in the
    orthogonal case never contribute."""
    nz = [(b, k) for b, k in enumerate(root) if k]
    if len(nz) == 1:
        b, k = nz[0]
        if k == 2:
            if case != "symp":
                raise ValueError("doubled roots need the symplectic case")
            if 2 * nu[b] > n:
                return _generic_ratio(lam_star[b], mu_star[b],
                                      "a doubled-root multiplier")
            return F1
        if k == 1:
            return F1
    elif len(nz) == 2:
        (b, kb), (c, kc) = nz
        if kb == 1 and kc == -1:
            if nu[b] > nu[c]:
                return _generic_ratio(lam_star[b] - lam_star[c],
                                      mu_star[b] - mu_star[c],
                                      "a difference-root multiplier")
            return F1
        if kb == 1 and kc == 1:
            if nu[b] + nu[c] > n:
                return _generic_ratio(lam_star[b] + lam_star[c],
                                      mu_star[b] + mu_star[c],
                                      "a sum-root multiplier")
            return F1
    raise ValueError("not a positive root: %r" % (root,))


def predicted_multiplier(sigma, mu, lam, n, case):
    """Product of the root multipliers over the inversion set; depends
    only on the element, never on a word realizing it."""
    mu_star = _starred(mu, case)
    lam_star = _starred(lam, case)
    nu = _degree_targets([rat(x) for x in mu], [rat(x) for x in lam], n)
    out = F1
    for root in inversion_set(sigma, case):
        out = out * z_eta(root, mu_star, lam_star, nu, n, case)
    return out


def lemma_factor(kind, a, s, t, h, n=None):
    """Scalar picked up by one elementary move on a product of s-fold
    and t-fold monomials, given the eigenvalue h of the relevant
    diagonal operator.  The row index a only names the factor acted on.

    Kinds: "xx" both plain, "dd" both dual, "xd" mixed (needs n),
    "x" the one-row flip (needs n, symplectic)."""
    h = rat(h)
    if kind == "xx":
        if s <= t:
            return F1
        num, den = h + s - t + 1, h + 1
    elif kind == "dd":
        if s >= t:
            return F1
        num, den = h - s + t + 1, h + 1
    elif kind == "xd":
        if n is None:
            raise ValueError("the mixed kind needs the column count")
        if s + t <= n:
            return F1
        num, den = h + s + t + 1, h + n + 1
    elif kind == "x":
        if n is None:
            raise ValueError("the flip kind needs the column count")
        if 2 * s <= n:
            return F1
        num, den = h + s + 1, h + Fraction(n, 2) + 1
    else:
        raise ValueError("unknown kind %r" % (kind,))
    if den == 0:
        raise ArithmeticError("eigenvalue %s hits the pole" % (h,))
    return num / den


# ---------------------------------------------------------------------------
# distinguished vectors

_ROW_FLIP = {}


def _row_flip_state(s, n, case):
    """State map of the one-row substitution; the coefficient is
    recomputed in context, only the state matters here."""
    key = (n, case)
    if key not in _ROW_FLIP:
        pairing = PairingData.standard(n, case)
        op = varpi_conjugator(FockSpace(1, n), pairing, {1})
        table = {}
        for st in range(1 << n):
            [(img, _)] = op.apply({st: F1}).items()
            table[st] = img
        _ROW_FLIP[key] = table
    return _ROW_FLIP[key][s]


def _factor_layout(sigma, nu, m, n):
    """Per tensor slot, leftmost first: the source row it carries,
    whether it sits in a dual block, its degree, and the state list."""
    inv = sigma.inverse()
    out = []
    for k in range(m):
        c = inv(m - k)
        deg = nu[abs(c) - 1]
        states = tuple(s for s in range(1 << n) if s.bit_count() == deg)
        out.append((abs(c), c < 0, deg, states))
    return out


def _monomial_state(nu, m, n):
    state = 0
    for a in range(1, m + 1):
        state |= ((1 << nu[a - 1]) - 1) << ((m - a) * n)
    return state


def highest_vector(nu, m, n):
    """Coordinates of the product of leading monomials, one per row."""
    idx = 0
    for _, _, deg, states in _factor_layout(SignedPerm.identity(m), nu, m, n):
        idx = idx * len(states) + states.index((1 << deg) - 1)
    return {idx: F1}


def target_vector(sigma, nu, m, n, case):
    """Image of the leading monomial under the braid conjugator,
    written in the coordinates of the permuted model.

    Slots moved into dual blocks are read off through the one-row
    substitution, so the braid image and the stored basis agree."""
    pairing = PairingData.standard(n, case)
    space = FockSpace(m, n)
    word = reduced_words(sigma, case)[0]
    W = clifford_braid_operator(word, space, pairing)
    [(S, w)] = W.apply({_monomial_state(nu, m, n): F1}).items()
    mask = (1 << n) - 1
    idx, L = 0, 0
    flip_rows = set()
    for k, (_, dual, _, states) in enumerate(_factor_layout(sigma, nu, m, n)):
        s = (S >> (k * n)) & mask
        ell = s
        if dual:
            flip_rows.add(k + 1)
            ell = _row_flip_state(s, n, case)
        if ell not in states:
            raise AssertionError("moved monomial misses its block")
        idx = idx * len(states) + states.index(ell)
        L |= ell << (k * n)
    coeff = w
    if flip_rows:
        [(S2, c)] = varpi_conjugator(space, pairing, flip_rows).apply(
            {L: F1}).items()
        if S2 != S:
            raise AssertionError("dual-block identification lost the state")
        coeff = w / c
    return {idx: coeff}


def _model_embedding(sigma, nu, m, n, case):
    """Physical Fock vector of every model basis vector, as parallel
    lists of states and coefficients."""
    pairing = PairingData.standard(n, case)
    space = FockSpace(m, n)
    layout = _factor_layout(sigma, nu, m, n)
    flip_rows = {k + 1 for k, (_, dual, _, _) in enumerate(layout) if dual}
    V = varpi_conjugator(space, pairing, flip_rows) if flip_rows else None
    states, coeffs = [], []
    combos = [(0, F1)]
    for k, (_, _, _, sts) in enumerate(layout):
        combos = [(L | (s << (k * n)), c) for L, c in combos for s in sts]
    for L, c in combos:
        if V is None:
            states.append(L)
            coeffs.append(c)
        else:
            [(S, w)] = V.apply({L: c}).items()
            states.append(S)
            coeffs.append(w)
    return states, coeffs


# ---------------------------------------------------------------------------
# small dense helpers

def _mat_identity(d):
    return [[F1 if r == c else F0 for c in range(d)] for r in range(d)]


def _mat_mul(A, B):
    rows, mid, cols = len(A), len(B), len(B[0])
    out = [[F0] * cols for _ in range(rows)]
    for r in range(rows):
        Ar = A[r]
        for k in range(mid):
            a = Ar[k]
            if a:
                Bk = B[k]
                row = out[r]
                for c in range(cols):
                    if Bk[c]:
                        row[c] += a * Bk[c]
    return out


def _mat_apply(A, vec):
    out = {}
    for c, v in vec.items():
        if not v:
            continue
        for r in range(len(A)):
            w = A[r][c]
            if w:
                out[r] = out.get(r, F0) + w * v
    return {r: v for r, v in out.items() if v}


def _parallel_factor(image, ref):
    """image == factor * ref exactly, or None."""
    image = {k: v for k, v in image.items() if v}
    ref = {k: v for k, v in ref.items() if v}
    if not ref or set(image) != set(ref):
        return None
    k0 = next(iter(ref))
    factor = image[k0] / ref[k0]
    for k, v in ref.items():
        if image[k] != factor * v:
            return None
    return factor


def _intertwines_exactly(phi, src, tgt):
    """Check the commutation identity entry by entry on dense rational
    matrices; used for maps that were written down, not solved for."""
    P = RFMatrix([[RatFunc.const(x) for x in row] for row in phi])
    for i in range(1, src.n + 1):
        for j in range(1, src.n + 1):
            if P * src.entry_dense(i, j) != tgt.entry_dense(i, j) * P:
                return False
    return True


def _explicit_flip_map(prefix, nxt, nu, m, n, case):
    """Matrix of the row-1 substitution between the two model bases.

    Used for the sign-flip letter in the orthogonal case, where the
    substitution is an automorphism the solver cannot see."""
    pairing = PairingData.standard(n, case)
    space = FockSpace(m, n)
    src_states, src_coeffs = _model_embedding(prefix, nu, m, n, case)
    tgt_states, tgt_coeffs = _model_embedding(nxt, nu, m, n, case)
    lookup = {S: k for k, S in enumerate(tgt_states)}
    V = varpi_conjugator(space, pairing, {1})
    d = len(src_states)
    phi = [[F0] * d for _ in range(len(tgt_states))]
    for col in range(d):
        [(S2, c2)] = V.apply({src_states[col]: src_coeffs[col]}).items()
        row = lookup.get(S2)
        if row is None:
            raise AssertionError("substitution leaves the model")
        phi[row][col] = c2 / tgt_coeffs[row]
    return phi


def _letter_root(m, a, case):
    root = [0] * m
    if a < m:
        root[a - 1] = 1
        root[a] = -1
    else:
        root[m - 1] = 2 if case == "symp" else 1
    return tuple(root)


# ---------------------------------------------------------------------------
# the end-to-end walk

def verify_isis(sigma, mu, lam, n, case):
    """Walk two reduced words of sigma from the plain model to the
    permuted one through elementary intertwiners.

    Each letter's map is solved (or written down, for the orthogonal
    sign flip), checked to send the current distinguished vector to a
    multiple of the next one, and normalized so the multiple is the
    root multiplier.  The composites of both words must agree entry by
    entry and move the leading vector by the predicted product."""
    mu = tuple(rat(x) for x in mu)
    lam = tuple(rat(x) for x in lam)
    m = sigma.m
    if len(mu) != m or len(lam) != m:
        raise ValueError("weight tuples must match the permutation size")
    nu = _degree_targets(mu, lam, n)
    mu_star = _starred(mu, case)
    lam_star = _starred(lam, case)
    predicted = predicted_multiplier(sigma, mu, lam, n, case)
    words = reduced_words(sigma, case)
    pair = (words[0], words[-1])
    v0 = highest_vector(nu, m, n)
    v_end = target_vector(sigma, nu, m, n, case)
    composites = []
    solved_dims = []

    def violation(kind, **extra):
        out = {"pass": False, "violation": kind,
               "sigma": list(sigma.images), "mu": mu, "lam": lam,
               "nu": nu, "case": case}
        out.update(extra)
        return out

    for word in pair:
        prefix = SignedPerm.identity(m)
        model_cur = siverma_model(mu, lam, prefix, case, n)
        v_cur = dict(v0)
        comp = _mat_identity(model_cur.dim)
        zprod = F1
        for a in word:
            nxt = SignedPerm.generator(m, a).compose(prefix)
            model_nxt = siverma_model(mu, lam, nxt, case, n)
            v_nxt = target_vector(nxt, nu, m, n, case)
            if case == "orth" and a == m:
                phi = _explicit_flip_map(prefix, nxt, nu, m, n, case)
                if not _intertwines_exactly(phi, model_cur.realization,
                                            model_nxt.realization):
                    return violation("isis", word=list(word), letter=a,
                                     reason="substitution does not intertwine")
            else:
                basis = solve_commutant(
                    IntertwinerProblem(model_cur, model_nxt))
                solved_dims.append(len(basis))
                if len(basis) != 1:
                    return violation("irreducibility", word=list(word),
                                     letter=a, commutant_dimension=len(basis))
                phi = basis[0]
            mult = _parallel_factor(_mat_apply(phi, v_cur), v_nxt)
            if mult is None or mult == 0:
                return violation("isis", word=list(word), letter=a,
                                 reason="image not parallel to the moved "
                                        "vector")
            if case == "orth" and a == m:
                # sign flips are length-free here and never contribute
                z = F1
            else:
                root = root_image(prefix.inverse(), _letter_root(m, a, case))
                if not RootData.is_positive(root):
                    raise AssertionError("word letter does not add length")
                z = z_eta(root, mu_star, lam_star, nu, n, case)
            scale = z / mult
            phi = [[x * scale for x in row] for row in phi]
            comp = _mat_mul(phi, comp)
            zprod = zprod * z
            prefix, model_cur, v_cur = nxt, model_nxt, v_nxt
        if zprod != predicted:
            return violation("isis", word=list(word),
                             reason="letter multipliers miss the inversion "
                                    "product", product=zprod)
        moved = _mat_apply(comp, v0)
        expected = {k: predicted * v for k, v in v_end.items() if v}
        if {k: v for k, v in moved.items() if v} != expected:
            return violation("isis", word=list(word),
                             reason="composite misses the predicted image")
        composites.append(comp)
    if composites[0] != composites[-1]:
        return violation("isis", words=[list(w) for w in pair],
                         reason="composites differ between words")
    return {"pass": True, "multiplier": predicted,
            "sigma": list(sigma.images), "nu": nu,
            "words": [list(w) for w in pair],
            "commutant_dimensions": solved_dims,
            "dimension": len(composites[0])}


# ---------------------------------------------------------------------------
# conjugation checks on the pair realization

def zeta_equivariance_defects(word, m, n, case):
    """Pairs whose Fock conjugation disagrees with the pair-algebra
    automorphism; empty means the braid action is equivariant."""
    pairing = PairingData.standard(n, case)
    space = FockSpace(m, n)
    W = clifford_braid_operator(word, space, pairing)
    moved = pair_map_for_word(m, case, word)
    out = []
    for pair in FmData(m, case).pairs():
        s, img = moved[pair]
        if W * zeta_n(space, pairing, *pair) != \
                zeta_n(space, pairing, *img).scale(s) * W:
            out.append(pair)
    return out


def image_invariance_defects(word, m, n, case):
    """Entries of the reflection realization (defining pair rep) moved
    by the combined conjugator; empty means the image is fixed."""
    fm = FmData(m, case)
    pairing = PairingData.standard(n, case)
    space = FockSpace(m, n)
    images, vdim = fm_defining(m, case)
    real = beta_m(m, n, case, images, vdim).realization
    G = defining_conjugator(fm, word).kron(
        clifford_braid_operator(word, space, pairing)).to_scaled_sparse()
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            acc = {}
            for f, M in real.entry_terms(i, j):
                for r, c, v in _ss_entries(G * M):
                    acc[(r, c)] = acc.get((r, c), RF0) + f * v
                for r, c, v in _ss_entries(M * G):
                    acc[(r, c)] = acc.get((r, c), RF0) - f * v
            if any(not f.is_zero() for f in acc.values()):
                out.append((i, j))
    return out
