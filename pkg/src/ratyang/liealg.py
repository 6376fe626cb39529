"""Index pairings, the split orthogonal/symplectic Lie algebras on signed
indices, and their realizations by Fock space operators.

Conventions.  A flavor is "orth" or "symp" and fixes every double sign
downstream: orth takes the upper sign, symp the lower.  The pairing on
column indices 1..n sends even i to i-1 and odd i below n to i+1 (an odd
n pairs n with itself, orth only); its sign table is identically 1 for
orth and alternates starting at +1 for symp.

The signed Lie algebra on indices -m..-1, 1..m has generators F(c, d)
spanning (not freely: F(-d, -c) = -eps(c, d) F(c, d)), with the bracket

  [F(a,b), F(c,d)] = d_cb F(a,d) - d_ad F(c,b)
                     - eps(a,b) d_(c,-a) F(-b,d) + eps(a,b) d_(-b,d) F(c,-a).

Its action on the Fock space of an m-by-n grid goes through the signed
generators p, q: F(c,d) acts as -d_cd * n/2 + sum_k q(c,k) p(d,k), which
commutes with the column-preserving action of the fixed subalgebra of
gl_n.
"""

from fractions import Fraction

from .linalg import SparseOp
from .fock import creation, annihilation, pq_generator

HALF = Fraction(1, 2)


class PairingData:
    """Tilde involution and sign table on column indices 1..n.

    Composite spaces carry two independent blocks; the involution and the
    signs never cross a block boundary.
    """

    __slots__ = ("n", "flavor", "pm", "blocks")

    def __init__(self, n, flavor, blocks):
        if flavor not in ("orth", "symp"):
            raise ValueError("flavor must be 'orth' or 'symp'")
        self.n = n
        self.flavor = flavor
        self.pm = 1 if flavor == "orth" else -1
        self.blocks = blocks          # list of (offset, size)

    @staticmethod
    def standard(n, flavor):
        if flavor == "symp" and n % 2:
            raise ValueError("symplectic pairing needs even n")
        return PairingData(n, flavor, [(0, n)])

    @staticmethod
    def composite(n, l, flavor):
        if flavor == "symp" and (n % 2 or l % 2):
            raise ValueError("symplectic pairing needs even blocks")
        return PairingData(n + l, flavor, [(0, n), (n, l)])

    def _block(self, i):
        for off, size in self.blocks:
            if off < i <= off + size:
                return off, size
        raise IndexError("index %d outside pairing" % i)

    def tilde(self, i):
        off, size = self._block(i)
        t = i - off
        if t % 2 == 0:
            return i - 1
        if t < size:
            return i + 1
        return i                      # odd block size pairs the top with itself

    def theta(self, i):
        if self.flavor == "orth":
            return 1
        off, _ = self._block(i)
        return 1 if (i - off) % 2 else -1


class FmData:
    """Signed-index presentation of so_2m (orth) or sp_2m (symp)."""

    __slots__ = ("m", "flavor", "pm")

    def __init__(self, m, flavor):
        if flavor not in ("orth", "symp"):
            raise ValueError("flavor must be 'orth' or 'symp'")
        self.m = m
        self.flavor = flavor
        self.pm = 1 if flavor == "orth" else -1

    def indices(self):
        return list(range(-self.m, 0)) + list(range(1, self.m + 1))

    def pairs(self):
        return [(c, d) for c in self.indices() for d in self.indices()]

    def eps(self, a, b):
        if self.flavor == "orth":
            return 1
        return (1 if a > 0 else -1) * (1 if b > 0 else -1)

    def idx(self, c):
        """Position of index c in the basis order -m..-1, 1..m."""
        return c + self.m if c < 0 else c + self.m - 1

    def bracket(self, ab, cd):
        """[F(ab), F(cd)] as a list of (coeff, pair)."""
        a, b = ab
        c, d = cd
        out = []
        if c == b:
            out.append((Fraction(1), (a, d)))
        if a == d:
            out.append((Fraction(-1), (c, b)))
        e = Fraction(self.eps(a, b))
        if c == -a:
            out.append((-e, (-b, d)))
        if -b == d:
            out.append((e, (c, -a)))
        return out

    def defining(self, c, d):
        """F(c, d) in the defining representation on C^2m."""
        dim = 2 * self.m
        op = SparseOp.unit(dim, self.idx(c), self.idx(d))
        return op - SparseOp.unit(dim, self.idx(-d), self.idx(-c)).scale(
            self.eps(c, d))


def zeta_n(space, pairing, c, d, columns=None):
    """Fock action of F(c, d) through the signed generators.

    columns restricts the sum (and the half-count constant) to a subset
    of column indices; the default uses every column.
    """
    if columns is None:
        columns = range(1, space.ncols + 1)
    cols = list(columns)
    op = SparseOp.zero(space.dim)
    for k in cols:
        op = op + pq_generator(space, pairing, "q", c, k) * \
            pq_generator(space, pairing, "p", d, k)
    if c == d:
        op = op - SparseOp.scalar(space.dim, Fraction(len(cols), 2))
    return op


def zeta_n_direct(space, pairing, c, d, columns=None):
    """The same action written out by the three sign cases; used as a
    cross-check of the signed-generator form."""
    if columns is None:
        columns = range(1, space.ncols + 1)
    cols = list(columns)
    op = SparseOp.zero(space.dim)
    if c > 0 and d > 0:
        for k in cols:
            op = op + creation(space, c, k) * annihilation(space, d, k)
        if c == d:
            op = op - SparseOp.scalar(space.dim, Fraction(len(cols), 2))
    elif c > 0 and d < 0:
        for k in cols:
            op = op + (creation(space, c, pairing.tilde(k)) *
                       creation(space, -d, k)).scale(pairing.theta(k))
    elif c < 0 and d > 0:
        for k in cols:
            op = op + (annihilation(space, -c, k) *
                       annihilation(space, d, pairing.tilde(k))).scale(
                           pairing.theta(k))
    else:
        # F(-a, -b) = -eps(a, b) F(b, a) with positive arguments
        fm = FmData(space.nrows, pairing.flavor)
        return zeta_n_direct(space, pairing, -d, -c, cols).scale(
            -fm.eps(-c, -d))
    return op


def gn_action(space, pairing, i, j):
    """Fock action of the fixed-subalgebra element built from E_ij."""
    th = Fraction(pairing.theta(i) * pairing.theta(j))
    it, jt = pairing.tilde(i), pairing.tilde(j)
    op = SparseOp.zero(space.dim)
    for a in range(1, space.nrows + 1):
        op = op + creation(space, a, i) * annihilation(space, a, j)
        op = op - (creation(space, a, jt) *
                   annihilation(space, a, it)).scale(th)
    return op


def row_gl_action(space, a, b, columns=None):
    """gl action along rows: sum over columns of x(a,k) del(b,k)."""
    if columns is None:
        columns = range(1, space.ncols + 1)
    op = SparseOp.zero(space.dim)
    for k in columns:
        op = op + creation(space, a, k) * annihilation(space, b, k)
    return op


class RootData:
    """Roots and related tables for the signed Lie algebra."""

    __slots__ = ("m", "flavor")

    def __init__(self, m, flavor):
        self.m = m
        self.flavor = flavor

    def positive_roots(self):
        m = self.m
        out = []
        for a in range(1, m + 1):
            for b in range(a + 1, m + 1):
                for sb in (-1, 1):
                    root = [0] * m
                    root[a - 1] = 1
                    root[b - 1] = sb
                    out.append(tuple(root))
        if self.flavor == "symp":
            for a in range(1, m + 1):
                root = [0] * m
                root[a - 1] = 2
                out.append(tuple(root))
        return out

    def rho(self):
        if self.flavor == "orth":
            return tuple(Fraction(self.m - a) for a in range(1, self.m + 1))
        return tuple(Fraction(self.m - a + 1) for a in range(1, self.m + 1))

    def simple_root(self, a):
        root = [0] * self.m
        if a < self.m:
            root[a - 1] = 1
            root[a] = -1
        elif self.flavor == "orth":
            if self.m < 2:
                raise ValueError("no such simple root")
            root[self.m - 2] = 1
            root[self.m - 1] = 1
        else:
            root[self.m - 1] = 2
        return tuple(root)

    @staticmethod
    def is_positive(root):
        for x in root:
            if x:
                return x > 0
        return False


def sl2_triple(m, flavor, a):
    """Chevalley triple (E, F, H) for the a-th simple root, as lists of
    (coeff, pair) in the signed generators.  Index bars count rows from
    the opposite end: bar(a) = m + 1 - a."""

    def bar(c):
        return m + 1 - c

    if a < m:
        e = [(Fraction(1), (-bar(a), -bar(a + 1)))]
        f = [(Fraction(1), (-bar(a + 1), -bar(a)))]
        h = [(Fraction(1), (-bar(a), -bar(a))),
             (Fraction(-1), (-bar(a + 1), -bar(a + 1)))]
    elif flavor == "orth":
        if m < 2:
            raise ValueError("no Chevalley triple here")
        e = [(Fraction(1), (-bar(m - 1), bar(m)))]
        f = [(Fraction(1), (bar(m), -bar(m - 1)))]
        h = [(Fraction(1), (-bar(m - 1), -bar(m - 1))),
             (Fraction(1), (-bar(m), -bar(m)))]
    else:
        e = [(HALF, (-bar(m), bar(m)))]
        f = [(HALF, (bar(m), -bar(m)))]
        h = [(Fraction(1), (-bar(m), -bar(m)))]
    return e, f, h


def realize(combo, images):
    """Sum of coeff * images[pair] for a (coeff, pair) list."""
    out = None
    for coeff, pair in combo:
        term = images[pair].scale(coeff)
        out = term if out is None else out + term
    return out
