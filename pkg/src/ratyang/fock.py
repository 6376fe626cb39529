"""Fermionic Fock space on a grid of anticommuting variables.

The model is the exterior algebra on generators indexed by (row, column)
pairs, row = 1..nrows, column = 1..ncols.  Basis states are bitmasks:
slot (a, i) occupies bit (a-1)*ncols + (i-1), and a set bit means the
generator is present.  Multiplication signs follow the usual rule: acting
by the generator of slot s on a monomial ordered by ascending slot picks
up (-1)^(number of occupied slots below s).

Operators are sparse matrices of Fraction entries over this basis.
Everything is exact and the dimension is capped so that downstream
identity checks stay well inside memory.
"""

from fractions import Fraction

from .rational import F1
from .linalg import SparseOp

MAX_QUBITS = 12


class FockSpace:
    __slots__ = ("nrows", "ncols", "dim", "_gen_cache")

    def __init__(self, nrows, ncols):
        if nrows * ncols > MAX_QUBITS:
            raise ValueError("Fock space too large: %d slots" % (nrows * ncols))
        self.nrows = nrows
        self.ncols = ncols
        self.dim = 1 << (nrows * ncols)
        self._gen_cache = {}

    def slot(self, a, i):
        if not (1 <= a <= self.nrows and 1 <= i <= self.ncols):
            raise IndexError("slot (%d, %d) out of range" % (a, i))
        return (a - 1) * self.ncols + (i - 1)

    def row_mask(self, a):
        return ((1 << self.ncols) - 1) << ((a - 1) * self.ncols)

    def states(self):
        return range(self.dim)

    def row_degree_of(self, state, a):
        return (state & self.row_mask(a)).bit_count()


def _sign_below(state, slot):
    return -F1 if (state & ((1 << slot) - 1)).bit_count() & 1 else F1


def creation(space, a, i):
    key = ("x", a, i)
    op = space._gen_cache.get(key)
    if op is not None:
        return op
    s = space.slot(a, i)
    bit = 1 << s
    cols = {}
    for state in space.states():
        if not state & bit:
            cols[state] = {state | bit: _sign_below(state, s)}
    op = SparseOp(space.dim, cols)
    space._gen_cache[key] = op
    return op


def annihilation(space, a, i):
    key = ("d", a, i)
    op = space._gen_cache.get(key)
    if op is not None:
        return op
    s = space.slot(a, i)
    bit = 1 << s
    cols = {}
    for state in space.states():
        if state & bit:
            cols[state] = {state & ~bit: _sign_below(state, s)}
    op = SparseOp(space.dim, cols)
    space._gen_cache[key] = op
    return op


def row_degree(space, a):
    cols = {}
    for state in space.states():
        d = space.row_degree_of(state, a)
        if d:
            cols[state] = {state: Fraction(d)}
    return SparseOp(space.dim, cols)


def col_occupancy(space, i):
    cols = {}
    for state in space.states():
        d = sum(1 for a in range(1, space.nrows + 1)
                if state & (1 << space.slot(a, i)))
        if d:
            cols[state] = {state: Fraction(d)}
    return SparseOp(space.dim, cols)


def pq_generator(space, pairing, kind, c, i):
    """The signed-index generators p and q.

    Negative c selects the plain generators of row -c; positive c pairs
    the column index and attaches its sign.  kind is "p" or "q".
    """
    if c < 0:
        return creation(space, -c, i) if kind == "p" else annihilation(space, -c, i)
    th = pairing.theta(i)
    it = pairing.tilde(i)
    op = annihilation(space, c, it) if kind == "p" else creation(space, c, it)
    return op if th == 1 else op.scale(th)


def column_order(n):
    """Odd columns ascending, then even columns descending."""
    odds = list(range(1, n + 1, 2))
    evens = list(range(n if n % 2 == 0 else n - 1, 0, -2))
    return odds + evens


def f_monomial(space, pairing, a, s):
    """Ordered product of creations along the first s interleaved columns."""
    order = column_order(space.ncols)
    op = SparseOp.identity(space.dim)
    for k in order[:s]:
        op = op * creation(space, a, k)
    return op


def g_monomial(space, pairing, a, s):
    """Ordered product of annihilations along the paired columns."""
    order = column_order(space.ncols)
    op = SparseOp.identity(space.dim)
    for k in order[:s]:
        op = op * annihilation(space, a, pairing.tilde(k))
    return op


def conjugator(space, genmap):
    """Invertible operator W with W g = genmap(g) W for all generators g.

    genmap(kind, a, i) must return (coeff, kind', a', i') with coeff a
    Fraction and the images single signed generators extending to an
    algebra automorphism.  W sends each ordered basis monomial applied to
    the vacuum to the product of the images applied to the image of the
    vacuum, which pins W uniquely up to the vacuum choice.
    """
    # image of the vacuum: fill exactly the slots whose annihilator maps
    # to a creation, so every mapped annihilation-type factor still kills it
    w0 = 0
    for a in range(1, space.nrows + 1):
        for i in range(1, space.ncols + 1):
            if genmap("d", a, i)[1] == "x":
                w0 |= 1 << space.slot(a, i)
    cols = {}
    for state in space.states():
        cur, coeff = w0, F1
        # rightmost factor of the ordered monomial acts first
        for s in range(space.nrows * space.ncols - 1, -1, -1):
            if not state & (1 << s):
                continue
            a, i = s // space.ncols + 1, s % space.ncols + 1
            c, kind, a2, i2 = genmap("x", a, i)
            s2 = space.slot(a2, i2)
            bit = 1 << s2
            if kind == "x":
                if cur & bit:
                    raise ArithmeticError("image monomial vanished")
                coeff = coeff * c * _sign_below(cur, s2)
                cur |= bit
            else:
                if not cur & bit:
                    raise ArithmeticError("image monomial vanished")
                coeff = coeff * c * _sign_below(cur, s2)
                cur &= ~bit
        cols[state] = {cur: coeff}
    return SparseOp(space.dim, cols)


def varpi_conjugator(space, pairing, flip_rows):
    """Conjugator for the substitution swapping x and the paired derivative
    (with its column sign) on the given rows, fixing all other rows."""
    flip = set(flip_rows)

    def genmap(kind, a, i):
        if a not in flip:
            return (F1, kind, a, i)
        other = "d" if kind == "x" else "x"
        return (Fraction(pairing.theta(i)), other, a, pairing.tilde(i))

    return conjugator(space, genmap)


def row_perm_conjugator(space, perm):
    """Conjugator permuting rows: x(a, i) -> x(perm[a], i)."""

    def genmap(kind, a, i):
        return (F1, kind, perm.get(a, a), i)

    return conjugator(space, genmap)
