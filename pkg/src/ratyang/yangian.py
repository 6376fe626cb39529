"""Generator matrices with a spectral parameter, and their axioms.

A realization is an n-by-n matrix of operators on a fixed module,
depending rationally on a spectral variable.  Each entry is kept as a
short sum f_1(u)*M_1 + f_2(u)*M_2 + ... of rational coefficients times
sparse constant matrices, so evaluating the whole realization at a
rational point is cheap and exact.

Two families share the container: exchange-type realizations (flavor
"T") and reflection-type ones (flavor "S").  Their defining axioms are
bivariate rational identities; after clearing denominators both sides
are polynomials of known degree, so vanishing on a rational grid one
point wider than the degree bound in each variable is a proof, not a
heuristic.  All checks here work that way and report the grid used.
"""

from fractions import Fraction
from math import gcd as _gcd

from .rational import UPoly, RatFunc, RF0, RF1, F0, F1, rat, poly_lcm, \
    expand_at_infinity
from .linalg import RFMatrix, ScaledSparse, SparseOp, rfm_inverse


def _coalesce(pairs):
    """Merge (RatFunc, ScaledSparse) terms with equal coefficient."""
    by_f = {}
    for f, M in pairs:
        if f.is_zero():
            continue
        if f in by_f:
            by_f[f] = by_f[f] + M
        else:
            by_f[f] = M
    return [(f, M) for f, M in by_f.items()
            if any(v for col in M.cols for v in col.values())]


def _eval_terms(terms, x, dim):
    """Evaluate a term list at the point x as one ScaledSparse."""
    live = []
    den = 1
    for f, M in terms:
        c = f(x)
        if c:
            d = c.denominator * M.den
            den = den * d // _gcd(den, d)
            live.append((c, M))
    out = ScaledSparse(dim, dim, den)
    for c, M in live:
        mult = c.numerator * (den // (c.denominator * M.den))
        for j, col in enumerate(M.cols):
            dst = out.cols[j]
            for r, v in col.items():
                w = dst.get(r, 0) + v * mult
                if w:
                    dst[r] = w
                else:
                    del dst[r]
    return out


def _same_pairing(a, b):
    if a is b:
        return True
    if a is None or b is None:
        return False
    return a.n == b.n and a.flavor == b.flavor and \
        list(a.blocks) == list(b.blocks)


class SeriesMatrix:
    """A concrete T(u) or S(u): n-by-n rational-in-u operator matrix.

    terms[i][j] is the entry at (1-based) row i+1, column j+1, stored as
    a list of (RatFunc, ScaledSparse) pairs whose products sum to the
    entry.  ``twist`` optionally records a scalar function attached to
    the realization but deliberately not multiplied in; ``meta``
    remembers how the object was built.
    """

    __slots__ = ("n", "dim", "flavor", "pairing", "terms", "twist", "meta")

    def __init__(self, n, dim, flavor, pairing, terms, twist=None, meta=None):
        if flavor not in ("T", "S"):
            raise ValueError("flavor must be 'T' or 'S'")
        if flavor == "S" and pairing is None:
            raise ValueError("reflection-type realizations need a pairing")
        if pairing is not None and pairing.n != n:
            raise ValueError("pairing size does not match n")
        self.n = n
        self.dim = dim
        self.flavor = flavor
        self.pairing = pairing
        self.terms = [[_coalesce(terms[i][j]) for j in range(n)]
                      for i in range(n)]
        self.twist = twist
        self.meta = dict(meta) if meta else {}

    @staticmethod
    def identity(n, dim, flavor, pairing=None, meta=None):
        one = ScaledSparse.identity(dim)
        terms = [[[(RF1, one)] if i == j else [] for j in range(n)]
                 for i in range(n)]
        return SeriesMatrix(n, dim, flavor, pairing, terms,
                            meta=meta or {"op": "identity"})

    def entry_terms(self, i, j):
        return self.terms[i - 1][j - 1]

    def entry_at(self, i, j, x):
        x = rat(x)
        for f, _ in self.terms[i - 1][j - 1]:
            if f.has_pole_at(x):
                raise ValueError("entry (%d,%d) has a pole at %s" % (i, j, x))
        return _eval_terms(self.terms[i - 1][j - 1], x, self.dim)

    def matrix_at(self, x):
        return [[self.entry_at(i + 1, j + 1, x) for j in range(self.n)]
                for i in range(self.n)]

    def entry_dense(self, i, j):
        rows = [[RF0] * self.dim for _ in range(self.dim)]
        for f, M in self.terms[i - 1][j - 1]:
            for c, col in enumerate(M.cols):
                for r, v in col.items():
                    rows[r][c] = rows[r][c] + f * Fraction(v, M.den)
        return RFMatrix(rows)

    def dense_full(self):
        d, n = self.dim, self.n
        rows = [[RF0] * (n * d) for _ in range(n * d)]
        for i in range(n):
            for j in range(n):
                for f, M in self.terms[i][j]:
                    for c, col in enumerate(M.cols):
                        for r, v in col.items():
                            rr, cc = i * d + r, j * d + c
                            rows[rr][cc] = rows[rr][cc] + f * Fraction(v, M.den)
        return RFMatrix(rows)

    @staticmethod
    def from_dense(big, n, dim, flavor, pairing, twist=None, meta=None):
        """Rebuild the term form from an (n*dim)-square RFMatrix."""
        terms = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                groups = {}
                for r in range(dim):
                    for c in range(dim):
                        f = big[i * dim + r, j * dim + c]
                        if not f.is_zero():
                            groups.setdefault(f, []).append((r, c, F1))
                terms[i][j] = [
                    (f, ScaledSparse.from_entries(dim, dim, cells))
                    for f, cells in groups.items()]
        return SeriesMatrix(n, dim, flavor, pairing, terms, twist, meta)

    def map_variable(self, a, b):
        """Substitute u -> a*u + b in every coefficient."""
        terms = [[[(f.compose_linear(a, b), M) for f, M in self.terms[i][j]]
                  for j in range(self.n)] for i in range(self.n)]
        twist = self.twist.compose_linear(a, b) if self.twist else None
        return SeriesMatrix(self.n, self.dim, self.flavor, self.pairing,
                            terms, twist, self.meta)

    def degree_data(self):
        """Common denominator of all entries and the cleared degree bound."""
        D = UPoly.const(1)
        for row in self.terms:
            for entry in row:
                for f, _ in entry:
                    D = poly_lcm(D, f.den)
        q = 0
        for row in self.terms:
            for entry in row:
                for f, _ in entry:
                    q = max(q, f.num.degree + D.degree - f.den.degree)
        return D, q

    def with_twist(self, twist):
        return SeriesMatrix(self.n, self.dim, self.flavor, self.pairing,
                            self.terms, twist, self.meta)


# ---------------------------------------------------------------------------
# R-matrices on the doubled auxiliary space.

def _px(i, k, n):
    """0-based position of the pair (i, k), both 1-based."""
    return (i - 1) * n + (k - 1)


def yang_r(n):
    """The rational R-matrix u - (swap), size n^2."""
    u = RatFunc.u()
    rows = [[RF0] * (n * n) for _ in range(n * n)]
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            rows[_px(i, k, n)][_px(i, k, n)] += u
            rows[_px(i, k, n)][_px(k, i, n)] -= RF1
    return RFMatrix(rows)


def yang_r_primed(pairing):
    """The partner matrix u - Q, where Q couples (i, i~) to (j, j~)."""
    n = pairing.n
    u = RatFunc.u()
    rows = [[RF0] * (n * n) for _ in range(n * n)]
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            rows[_px(i, k, n)][_px(i, k, n)] += u
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            s = pairing.theta(i) * pairing.theta(j)
            rows[_px(i, pairing.tilde(i), n)][_px(j, pairing.tilde(j), n)] \
                -= RatFunc.const(s)
    return RFMatrix(rows)


def r_unitarity_holds(n):
    """R(u) R(-u) == (1 - u^2) * identity."""
    R = yang_r(n)
    prod = R * R.compose_linear(-1, 0)
    target = RFMatrix.identity(n * n) * RatFunc(UPoly((F1, F0, -F1)))
    return prod == target


def rp_unitarity_holds(pairing):
    """R'(u) R'(n - u) == u (n - u) * identity."""
    n = pairing.n
    Rp = yang_r_primed(pairing)
    prod = Rp * Rp.compose_linear(-1, n)
    target = RFMatrix.identity(n * n) * RatFunc(UPoly((F0, rat(n), -F1)))
    return prod == target


# ---------------------------------------------------------------------------
# Constructors.

def defining_gl(n):
    """Matrix units on C^n, keyed by 1-based (i, j)."""
    return {(i, j): SparseOp.unit(n, i - 1, j - 1)
            for i in range(1, n + 1) for j in range(1, n + 1)}


def defining_gn(pairing):
    """The split-form generators E_ij - theta E_j~i~ on C^n."""
    n = pairing.n
    out = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            s = pairing.theta(i) * pairing.theta(j)
            out[(i, j)] = SparseOp.unit(n, i - 1, j - 1) - \
                SparseOp.unit(n, pairing.tilde(j) - 1,
                              pairing.tilde(i) - 1).scale(s)
    return out


def eval_hom(n, images, dim, pairing=None, meta=None):
    """T(u) = 1 + E/u from a gl_n action given as {(i, j): SparseOp}."""
    pole = RatFunc.simple_pole(0)
    one = ScaledSparse.identity(dim)
    terms = [[[] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                terms[i][j].append((RF1, one))
            op = images.get((i + 1, j + 1))
            if op is not None and not op.is_zero():
                terms[i][j].append((pole, op.to_scaled_sparse()))
    return SeriesMatrix(n, dim, "T", pairing, terms,
                        meta=meta or {"op": "eval_hom", "n": n})


def pi_n(pairing, images, dim, meta=None):
    """S(u) = 1 + F/(u +- 1/2) from a g_n action {(i, j): SparseOp}.

    The images must already be the split-form combinations, so they
    satisfy F_ij = -theta_i theta_j F_j~i~.
    """
    n = pairing.n
    pole = RatFunc.simple_pole(Fraction(pairing.pm, 2))
    one = ScaledSparse.identity(dim)
    terms = [[[] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                terms[i][j].append((RF1, one))
            op = images.get((i + 1, j + 1))
            if op is not None and not op.is_zero():
                terms[i][j].append((pole, op.to_scaled_sparse()))
    return SeriesMatrix(n, dim, "S", pairing, terms,
                        meta=meta or {"op": "pi_n", "case": pairing.flavor})


# ---------------------------------------------------------------------------
# Automorphisms and maps between the two flavors.

def tau_shift(real, z):
    """Substitute u -> u - z (exchange flavor only)."""
    if real.flavor != "T":
        raise ValueError("tau_shift acts on exchange-type realizations")
    out = real.map_variable(1, -rat(z))
    out.meta = {"op": "tau_shift", "z": str(z), "of": real.meta}
    return out


def scalar_twist(real, f):
    """Multiply every entry by f(u); f must tend to 1 at infinity."""
    if f.num.degree != f.den.degree or f.num.leading() != f.den.leading():
        raise ValueError("twist must tend to 1 at infinity")
    terms = [[[(f * g, M) for g, M in real.terms[i][j]]
              for j in range(real.n)] for i in range(real.n)]
    return SeriesMatrix(real.n, real.dim, real.flavor, real.pairing, terms,
                        real.twist,
                        {"op": "scalar_twist", "of": real.meta})


def transpose_prime(real):
    """Entry (i, j) becomes theta_i theta_j times entry (j~, i~)."""
    p = real.pairing
    if p is None:
        raise ValueError("needs a pairing")
    n = real.n
    terms = [[None] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            s = p.theta(i) * p.theta(j)
            src = real.terms[p.tilde(j) - 1][p.tilde(i) - 1]
            terms[i - 1][j - 1] = [(f, M * s) for f, M in src]
    return SeriesMatrix(n, real.dim, real.flavor, p, terms, real.twist,
                        {"op": "transpose_prime", "of": real.meta})


def transpose_entries(real):
    """Plain entry transpose, used to state anti-homomorphism checks."""
    n = real.n
    terms = [[list(real.terms[j][i]) for j in range(n)] for i in range(n)]
    return SeriesMatrix(n, real.dim, real.flavor, real.pairing, terms,
                        real.twist, {"op": "transpose_entries",
                                     "of": real.meta})


def twist_auto(real):
    """T(u) -> T'(-u), an involution on the exchange flavor."""
    if real.flavor != "T":
        raise ValueError("twist_auto acts on exchange-type realizations")
    out = transpose_prime(real).map_variable(-1, 0)
    out.meta = {"op": "twist_auto", "of": real.meta}
    return out


def matrix_inverse_realization(real, negate=True):
    """T(u) -> T(-u)^-1 (negate=True) or the plain inverse T(u)^-1."""
    src = real.map_variable(-1, 0) if negate else real
    inv = rfm_inverse(src.dense_full())
    return SeriesMatrix.from_dense(
        inv, real.n, real.dim, real.flavor, real.pairing, real.twist,
        {"op": "matrix_inverse", "negate": negate, "of": real.meta})


def omega_n(real):
    """S(u) -> S(-u - n/2)^-1, an involution on the reflection flavor."""
    if real.flavor != "S":
        raise ValueError("omega_n acts on reflection-type realizations")
    shifted = real.map_variable(-1, Fraction(-real.n, 2))
    inv = rfm_inverse(shifted.dense_full())
    return SeriesMatrix.from_dense(
        inv, real.n, real.dim, "S", real.pairing, real.twist,
        {"op": "omega_n", "of": real.meta})


def sym_from_T(real):
    """S_ij(u) = sum_k theta_i theta_k T_k~i~(-u) T_kj(u)."""
    if real.flavor != "T":
        raise ValueError("sym_from_T starts from an exchange realization")
    p = real.pairing
    if p is None:
        raise ValueError("needs a pairing")
    n = real.n
    terms = [[[] for _ in range(n)] for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            acc = terms[i - 1][j - 1]
            for k in range(1, n + 1):
                s = p.theta(i) * p.theta(k)
                left = real.terms[p.tilde(k) - 1][p.tilde(i) - 1]
                right = real.terms[k - 1][j - 1]
                for f, M in left:
                    fneg = f.compose_linear(-1, 0)
                    for g, N in right:
                        acc.append((fneg * g, (M * N) * s))
    return SeriesMatrix(n, real.dim, "S", p, terms, real.twist,
                        {"op": "sym_from_T", "of": real.meta})


def coproduct_action(a, b):
    """Entry (i, j) = sum_k A_ik(u) tensor B_kj(u), on the joint module."""
    if a.flavor != "T" or b.flavor != "T":
        raise ValueError("coproduct acts on exchange-type realizations")
    if a.n != b.n:
        raise ValueError("sizes differ")
    if a.pairing is not None and b.pairing is not None \
            and not _same_pairing(a.pairing, b.pairing):
        raise ValueError("pairings differ")
    n = a.n
    terms = [[[] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = terms[i][j]
            for k in range(n):
                for f, M in a.terms[i][k]:
                    for g, N in b.terms[k][j]:
                        acc.append((f * g, M.kron(N)))
    return SeriesMatrix(n, a.dim * b.dim, "T", a.pairing or b.pairing, terms,
                        None, {"op": "coproduct",
                               "of": [a.meta, b.meta]})


def coaction(s, t):
    """S_ij = sum_gh S_gh(u) tensor theta_i theta_g T_g~i~(-u) T_hj(u)."""
    if s.flavor != "S" or t.flavor != "T":
        raise ValueError("coaction pairs a reflection and an exchange side")
    if s.n != t.n:
        raise ValueError("sizes differ")
    p = s.pairing
    if t.pairing is not None and not _same_pairing(p, t.pairing):
        raise ValueError("pairings differ")
    n = s.n
    terms = [[[] for _ in range(n)] for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            acc = terms[i - 1][j - 1]
            for g in range(1, n + 1):
                sg = p.theta(i) * p.theta(g)
                left = t.terms[p.tilde(g) - 1][p.tilde(i) - 1]
                for h in range(1, n + 1):
                    right = t.terms[h - 1][j - 1]
                    rterms = []
                    for f, M in left:
                        fneg = f.compose_linear(-1, 0)
                        for g2, N in right:
                            rterms.append((fneg * g2, (M * N) * sg))
                    for fs, MS in s.terms[g - 1][h - 1]:
                        for fr, NR in rterms:
                            acc.append((fs * fr, MS.kron(NR)))
    return SeriesMatrix(n, s.dim * t.dim, "S", p, terms, s.twist,
                        {"op": "coaction", "of": [s.meta, t.meta]})


# ---------------------------------------------------------------------------
# The axiom checks.

def _nonzero_positions(mat, limit=3):
    out = []
    for j, col in enumerate(mat.cols):
        for r in sorted(col):
            if col[r]:
                out.append([r, j])
                if len(out) >= limit:
                    return out
    return out


def _grid_points(D, count):
    """count points 1/2, 3/2, 5/2, ... that avoid the roots of D."""
    pts = []
    x = Fraction(1, 2)
    while len(pts) < count:
        if D(x) != 0:
            pts.append(x)
        x += 1
    return pts


def _components(real):
    """Partition the module by the union support graph of all terms.

    Every term matrix maps each class into itself, so products, sums and
    defects split into independent diagonal blocks.  Returns a list of
    sorted index lists.
    """
    parent = list(range(real.dim))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in real.terms:
        for entry in row:
            for _, M in entry:
                for j, col in enumerate(M.cols):
                    for r in col:
                        ra, rb = find(r), find(j)
                        if ra != rb:
                            parent[ra] = rb
    groups = {}
    for x in range(real.dim):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())


def _restrict_terms(real, comp):
    """Term lists cut down to one support component."""
    pos = {g: k for k, g in enumerate(comp)}
    nc = len(comp)
    out = [[None] * real.n for _ in range(real.n)]
    for i in range(real.n):
        for j in range(real.n):
            cut = []
            for f, M in real.terms[i][j]:
                m = ScaledSparse(nc, nc, M.den)
                for jj, gj in enumerate(comp):
                    col = M.cols[gj]
                    if col:
                        m.cols[jj] = {pos[r]: v for r, v in col.items()}
                if any(m.cols):
                    cut.append((f, m))
            out[i][j] = cut
    return out


def _pair_products(E1, E2, n):
    """All products E1[a][b] * E2[c][d], as a 4-deep nested list."""
    return [[[[E1[a][b] * E2[c][d] for d in range(n)] for c in range(n)]
             for b in range(n)] for a in range(n)]


def _axiom_defects(real, kind, max_records):
    """Grid search for nonzero defect of the RTT or reflection identity.

    Shares one point stream between the two variables so the products
    for the pair (x, y) also serve (y, x), and works one support
    component at a time.
    """
    D, q = real.degree_data()
    bound = q + 1 if kind == "rtt" else q + 2
    pts = _grid_points(D, bound + 1)
    n = real.n
    if kind == "reflection":
        p = real.pairing
        tl = [None] + [p.tilde(i) for i in range(1, n + 1)]
        th = [None] + [p.theta(i) for i in range(1, n + 1)]
    defects = []

    def cells(A, B, x, y, back):
        """Defect cells at (u, v) = (x, y) from A = P(x,y), B = P(y,x)."""
        w = x - y
        if kind == "rtt":
            for i in range(n):
                for k in range(n):
                    for j in range(n):
                        for l in range(n):
                            d = A[i][j][k][l].scale_fraction(w) \
                                - A[k][j][i][l] \
                                - B[k][l][i][j].scale_fraction(w) \
                                + B[k][j][i][l]
                            pos = _nonzero_positions(d)
                            if pos:
                                defects.append(
                                    {"u": str(x), "v": str(y),
                                     "block": [i + 1, k + 1, j + 1, l + 1],
                                     "positions": [[back[r], back[c]]
                                                   for r, c in pos]})
                                if len(defects) >= max_records:
                                    return False
            return True
        wp = -x - y
        M = [[[[A[i][j][k][l].scale_fraction(wp)
                - A[i][tl[k + 1] - 1][tl[j + 1] - 1][l]
                * (th[j + 1] * th[tl[k + 1]])
                for l in range(n)] for j in range(n)]
              for k in range(n)] for i in range(n)]
        N = [[[[B[k][l][i][j].scale_fraction(wp)
                - B[k][tl[i + 1] - 1][tl[l + 1] - 1][j]
                * (th[i + 1] * th[tl[l + 1]])
                for l in range(n)] for j in range(n)]
              for k in range(n)] for i in range(n)]
        for i in range(n):
            for k in range(n):
                for j in range(n):
                    for l in range(n):
                        d = M[i][k][j][l].scale_fraction(w) - M[k][i][j][l] \
                            - N[i][k][j][l].scale_fraction(w) + N[i][k][l][j]
                        pos = _nonzero_positions(d)
                        if pos:
                            defects.append(
                                {"u": str(x), "v": str(y),
                                 "block": [i + 1, k + 1, j + 1, l + 1],
                                 "positions": [[back[r], back[c]]
                                               for r, c in pos]})
                            if len(defects) >= max_records:
                                return False
        return True

    for comp in _components(real):
        cterms = _restrict_terms(real, comp)
        cdim = len(comp)
        evals = {}
        for x in pts:
            evals[x] = [[_eval_terms(cterms[i][j], x, cdim)
                         for j in range(n)] for i in range(n)]
        for ia, x in enumerate(pts):
            for y in pts[ia:]:
                A = _pair_products(evals[x], evals[y], n)
                B = A if y == x else _pair_products(evals[y], evals[x], n)
                if not cells(A, B, x, y, comp):
                    return defects, bound, pts
                if y != x and not cells(B, A, y, x, comp):
                    return defects, bound, pts
    return defects, bound, pts


def check_rtt(real, max_records=4):
    """Certify the exchange identity on a full interpolation grid."""
    if real.flavor != "T":
        raise ValueError("check_rtt expects an exchange-type realization")
    defects, bound, pts = _axiom_defects(real, "rtt", max_records)
    spts = [str(x) for x in pts]
    return {"pass": not defects, "defect_entries": defects,
            "degree_bound": bound, "points_used": [spts, spts]}


def check_reflection(real, max_records=4):
    """Certify the reflection identity on a full interpolation grid."""
    if real.flavor != "S":
        raise ValueError("check_reflection expects a reflection-type "
                         "realization")
    defects, bound, pts = _axiom_defects(real, "reflection", max_records)
    spts = [str(x) for x in pts]
    return {"pass": not defects, "defect_entries": defects,
            "degree_bound": bound, "points_used": [spts, spts]}


def check_symmetry(real, max_records=4):
    """Certify S'(u) = S(-u) +- (S(u) - S(-u)) / 2u entry-wise."""
    if real.flavor != "S":
        raise ValueError("check_symmetry expects a reflection-type "
                         "realization")
    p = real.pairing
    D, q = real.degree_data()
    bound = D.degree + q + 1
    pts = []
    x = Fraction(1, 2)
    while len(pts) < bound + 1:
        if x != 0 and D(x) != 0 and D(-x) != 0:
            pts.append(x)
        x += 1
    n = real.n
    defects = []
    for x in pts:
        Ep = real.matrix_at(x)
        Em = real.matrix_at(-x)
        half = Fraction(p.pm, 1) / (2 * x)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                lhs = Ep[p.tilde(j) - 1][p.tilde(i) - 1] * \
                    (p.theta(i) * p.theta(j))
                rhs = Em[i - 1][j - 1] + \
                    (Ep[i - 1][j - 1] - Em[i - 1][j - 1]).scale_fraction(half)
                pos = _nonzero_positions(lhs - rhs)
                if pos:
                    defects.append({"u": str(x), "entry": [i, j],
                                    "positions": pos})
                    if len(defects) >= max_records:
                        break
            if len(defects) >= max_records:
                break
        if len(defects) >= max_records:
            break
    return {"pass": not defects, "defect_entries": defects,
            "degree_bound": bound, "points_used": [str(x) for x in pts]}


def compute_O(real):
    """Extract the central series hidden in the degenerate product.

    Multiplying S_1(u) R(2u) S_2(-u)^-1 by the rank-one matrix R'(0)
    collapses the auxiliary indices and leaves a single operator-valued
    function O(u).  Returns (O, report); the report confirms the
    collapse, O(u) O(-u) = 1, and that O commutes with every entry.
    """
    if real.flavor != "S":
        raise ValueError("compute_O expects a reflection-type realization")
    p = real.pairing
    n, d = real.n, real.dim
    Sb = [[real.entry_dense(i, j) for j in range(1, n + 1)]
          for i in range(1, n + 1)]
    big = rfm_inverse(real.map_variable(-1, 0).dense_full())
    Vb = [[RFMatrix([[big[i * d + r, j * d + c] for c in range(d)]
                     for r in range(d)]) for j in range(n)] for i in range(n)]
    Wb = [[None] * n for _ in range(n)]
    for e in range(n):
        for dd in range(n):
            acc = RFMatrix.zeros(d, d)
            for f in range(n):
                acc = acc + Sb[e][f] * Vb[f][dd]
            Wb[e][dd] = acc
    two_u = RatFunc(UPoly.linear(2, 0))
    G = [[None] * n for _ in range(n)]
    for c in range(1, n + 1):
        ct = p.tilde(c)
        for dd in range(1, n + 1):
            acc = RFMatrix.zeros(d, d)
            for e in range(1, n + 1):
                acc = acc + (Sb[e - 1][c - 1] * Vb[p.tilde(e) - 1][dd - 1]) \
                    * (p.theta(e))
            G[c - 1][dd - 1] = acc * two_u - Wb[ct - 1][dd - 1] * p.theta(ct)
    factor = RatFunc(UPoly.linear(2, -p.pm))
    O = G[0][p.tilde(1) - 1] * factor.inverse()
    collapse = True
    zero = RFMatrix.zeros(d, d)
    for c in range(1, n + 1):
        for dd in range(1, n + 1):
            want = O * (factor * p.theta(c)) if dd == p.tilde(c) else zero
            if G[c - 1][dd - 1] != want:
                collapse = False
    unitary = (O * O.compose_linear(-1, 0)).is_identity()
    # centrality on a grid wide enough for both degree bounds
    DO = UPoly.const(1)
    qO = 0
    for row in O.rows:
        for e in row:
            DO = poly_lcm(DO, e.den)
    for row in O.rows:
        for e in row:
            if not e.is_zero():
                qO = max(qO, e.num.degree + DO.degree - e.den.degree)
    D, q = real.degree_data()
    upts = _grid_points(DO, qO + 1)
    vpts = _grid_points(D, q + 1)
    central = True
    for x in upts:
        Ox = ScaledSparse.from_entries(
            d, d, [(r, c, v) for r, rw in enumerate(O.eval_at(x))
                   for c, v in enumerate(rw) if v])
        for y in vpts:
            Ev = real.matrix_at(y)
            for i in range(n):
                for j in range(n):
                    if _nonzero_positions(Ox * Ev[i][j] - Ev[i][j] * Ox, 1):
                        central = False
    report = {"pass": collapse and unitary and central,
              "collapse": collapse, "is_identity": O.is_identity(),
              "unitary": unitary, "central": central}
    return O, report


# ---------------------------------------------------------------------------
# Coefficient extraction, comparison, negative controls.

def extract_coefficients(real, K):
    """Laurent coefficients of u^-k for k = 0..K, as ScaledSparse grids."""
    out = []
    for k in range(K + 1):
        out.append([[None] * real.n for _ in range(real.n)])
    for i in range(real.n):
        for j in range(real.n):
            series = [(expand_at_infinity(f, K), M)
                      for f, M in real.terms[i][j]]
            for k in range(K + 1):
                acc = ScaledSparse(real.dim, real.dim)
                for s, M in series:
                    c = s.coeffs[k]
                    if c:
                        acc = acc + M.scale_fraction(c)
                out[k][i][j] = acc
    return out


def realizations_agree(a, b, max_records=4):
    """Exact entry-by-entry equality of two realizations, via a grid."""
    if a.n != b.n or a.dim != b.dim:
        raise ValueError("shapes differ")
    Da, qa = a.degree_data()
    Db, qb = b.degree_data()
    D = poly_lcm(Da, Db)
    bound = max(qa + D.degree - Da.degree, qb + D.degree - Db.degree)
    pts = _grid_points(D, bound + 1)
    defects = []
    for x in pts:
        Ea = a.matrix_at(x)
        Eb = b.matrix_at(x)
        for i in range(a.n):
            for j in range(a.n):
                pos = _nonzero_positions(Ea[i][j] - Eb[i][j])
                if pos:
                    defects.append({"u": str(x), "entry": [i + 1, j + 1],
                                    "positions": pos})
                    if len(defects) >= max_records:
                        return {"pass": False, "defect_entries": defects,
                                "degree_bound": bound,
                                "points_used": [str(t) for t in pts]}
    return {"pass": not defects, "defect_entries": defects,
            "degree_bound": bound, "points_used": [str(t) for t in pts]}


def perturb_entry(real, i, j):
    """Add u^-1 times a unit matrix to one entry; a negative control."""
    terms = [[list(real.terms[a][b]) for b in range(real.n)]
             for a in range(real.n)]
    bump = ScaledSparse.from_entries(real.dim, real.dim, [(0, 0, F1)])
    terms[i - 1][j - 1] = terms[i - 1][j - 1] + \
        [(RatFunc.simple_pole(0), bump)]
    return SeriesMatrix(real.n, real.dim, real.flavor, real.pairing, terms,
                        real.twist, {"op": "perturbed", "of": real.meta})
