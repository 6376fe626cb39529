"""Exact linear algebra on top of the scalar layer.

Three unrelated jobs live here because they share no state and are all
small:

* ``RFMatrix``        dense matrices of RatFunc entries, with exact
                      inversion (several strategies, all verified
                      against M * Minv == I by the test suite);
* ``nullspace``       kernel of a sparse linear system over Fraction,
                      used to solve commutant equations;
* ``ScaledSparse``    sparse integer matrices with one scalar
                      denominator, the workhorse for evaluating big
                      operator identities on rational grids without
                      per-entry gcd churn.

Inversion dispatch: matrices of the shape a*(u*I + C) with constant C
take a characteristic-matrix recursion (Faddeev-LeVerrier) on the
integer-cleared constant part; everything else goes through
fraction-free Gauss-Jordan elimination, except that large matrices fall
back to ordinary field elimination with reduction at every step, which
keeps intermediate degrees near those of the final answer.
"""

from fractions import Fraction
from math import gcd as _int_gcd

from .rational import UPoly, RatFunc, F0, F1, poly_lcm


class RFMatrix:
    """Dense matrix of RatFunc entries."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows):
        self.rows = [[e if isinstance(e, RatFunc) else RatFunc.const(e)
                      for e in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for row in self.rows:
            if len(row) != self.ncols:
                raise ValueError("ragged rows")

    @staticmethod
    def identity(n):
        one, zero = RatFunc.const(1), RatFunc.const(0)
        return RFMatrix([[one if i == j else zero for j in range(n)]
                         for i in range(n)])

    @staticmethod
    def zeros(r, c):
        zero = RatFunc.const(0)
        return RFMatrix([[zero] * c for _ in range(r)])

    def __getitem__(self, rc):
        return self.rows[rc[0]][rc[1]]

    def __eq__(self, other):
        return (self.nrows == other.nrows and self.ncols == other.ncols
                and self.rows == other.rows)

    def __add__(self, other):
        return RFMatrix([[a + b for a, b in zip(ra, rb)]
                         for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return RFMatrix([[a - b for a, b in zip(ra, rb)]
                         for ra, rb in zip(self.rows, other.rows)])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc)):
            return RFMatrix([[e * other for e in row] for row in self.rows])
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        bt = list(zip(*other.rows))
        out = []
        for ra in self.rows:
            orow = []
            for cb in bt:
                acc = RatFunc.const(0)
                for a, b in zip(ra, cb):
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + a * b
                orow.append(acc)
            out.append(orow)
        return RFMatrix(out)

    __rmul__ = __mul__

    def map(self, fn):
        return RFMatrix([[fn(e) for e in row] for row in self.rows])

    def compose_linear(self, a, b):
        return self.map(lambda e: e.compose_linear(a, b))

    def transpose(self):
        return RFMatrix([list(r) for r in zip(*self.rows)])

    def eval_at(self, point):
        return [[e(point) for e in row] for row in self.rows]

    def is_identity(self):
        for i, row in enumerate(self.rows):
            for j, e in enumerate(row):
                if i == j:
                    if not e.is_one():
                        return False
                elif not e.is_zero():
                    return False
        return True

    def to_json(self):
        return [[e.to_json() for e in row] for row in self.rows]


def _row_cleared(M):
    """Write M = diag(d_i)^-1 * P with polynomial P and integer-friendly d_i.

    Returns (P rows of UPoly, list of d_i as UPoly).
    """
    prows, dens = [], []
    for row in M.rows:
        d = UPoly.const(1)
        for e in row:
            d = poly_lcm(d, e.den)
        prow = []
        scale_den = 1
        for e in row:
            p = e.num * d.exact_div(e.den)
            prow.append(p)
            for x in p.c:
                scale_den = scale_den * x.denominator // _int_gcd(
                    scale_den, x.denominator)
        if scale_den != 1:
            prow = [p.scale(scale_den) for p in prow]
            d = d.scale(scale_den)
        prows.append(prow)
        dens.append(d)
    return prows, dens


def _resolvent_shape(prows):
    """Detect P == diag(a_i)*(u*I + B); return (a list, B rows) or None."""
    n = len(prows)
    alist = []
    for i in range(n):
        p = prows[i][i]
        if p.degree != 1:
            return None
        alist.append(p.c[1])
        for j in range(n):
            if i != j and prows[i][j].degree > 0:
                return None
    B = [[(prows[i][j].c[0] if prows[i][j].c else F0) / alist[i]
          for j in range(n)] for i in range(n)]
    return alist, B


def _fl_resolvent(B):
    """Characteristic-matrix recursion for (u*I + B)^-1.

    Returns (char as UPoly in u, adj rows of UPoly) with
    (u*I + B)^-1 = adj / char.  Runs over integers after clearing the
    common denominator of B; divisibility at each step is exact.
    """
    n = len(B)
    s = 1
    for row in B:
        for x in row:
            s = s * x.denominator // _int_gcd(s, x.denominator)
    # A = -s*B as sparse integer rows; char poly of A gives det(u*I - A)
    arows = []
    for row in B:
        d = {}
        for j, x in enumerate(row):
            v = int(-x * s)
            if v:
                d[j] = v
        arows.append(d)
    Mk = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    cs = [1]
    mats = [Mk]
    for k in range(1, n + 1):
        prod = [[0] * n for _ in range(n)]
        for i in range(n):
            pi = prod[i]
            for kk, v in arows[i].items():
                mr = Mk[kk]
                for j in range(n):
                    w = mr[j]
                    if w:
                        pi[j] += v * w
        tr = sum(prod[i][i] for i in range(n))
        ck, rem = divmod(-tr, k)
        if rem:
            raise ArithmeticError("trace recursion lost integrality")
        cs.append(ck)
        if k < n:
            Mk = [list(r) for r in prod]
            for i in range(n):
                Mk[i][i] += ck
            mats.append(Mk)
    # undo scaling: coefficients of det(u*I - A/s) and its adjugate
    char = UPoly([Fraction(cs[n - k], s ** (n - k)) for k in range(n + 1)])
    adj = []
    for i in range(n):
        arow = []
        for j in range(n):
            # coefficient of u^(n-1-k) is mats[k][i][j] / s^k
            arow.append(UPoly([Fraction(mats[n - 1 - d_][i][j], s ** (n - 1 - d_))
                               for d_ in range(n)]))
        adj.append(arow)
    return char, adj


def _ffgj_inverse(prows, dens):
    """Fraction-free Gauss-Jordan on [P | diag(d)]; exact divisions only."""
    n = len(prows)
    zero = UPoly()
    W = [list(prows[i]) + [zero] * n for i in range(n)]
    for i in range(n):
        W[i][n + i] = dens[i]
    prev = UPoly.const(1)
    for k in range(n):
        piv = None
        for r in range(k, n):
            if not W[r][k].is_zero():
                piv = r
                break
        if piv is None:
            raise ArithmeticError("matrix is singular")
        if piv != k:
            W[k], W[piv] = W[piv], W[k]
        pk = W[k][k]
        for i in range(n):
            if i == k:
                continue
            wik = W[i][k]
            row_i, row_k = W[i], W[k]
            for j in range(k + 1, 2 * n):
                row_i[j] = (pk * row_i[j] - wik * row_k[j]).exact_div(prev)
            if i < k:
                # the only surviving entry left of the pivot column
                row_i[i] = (pk * row_i[i]).exact_div(prev)
            row_i[k] = zero
        prev = pk
    det = W[n - 1][n - 1]
    out = []
    for i in range(n):
        out.append([RatFunc(W[i][n + j], det) for j in range(n)])
    return RFMatrix(out)


def _field_inverse(M):
    """Plain Gauss-Jordan over RatFunc, reducing at every step."""
    n = M.nrows
    one, zero = RatFunc.const(1), RatFunc.const(0)
    W = [list(row) + [one if i == j else zero for j in range(n)]
         for i, row in enumerate(M.rows)]
    for k in range(n):
        piv = None
        for r in range(k, n):
            if not W[r][k].is_zero():
                piv = r
                break
        if piv is None:
            raise ArithmeticError("matrix is singular")
        if piv != k:
            W[k], W[piv] = W[piv], W[k]
        inv = W[k][k].inverse()
        W[k] = [e * inv for e in W[k]]
        for i in range(n):
            if i == k:
                continue
            f = W[i][k]
            if f.is_zero():
                continue
            W[i] = [a - f * b for a, b in zip(W[i], W[k])]
    return RFMatrix([row[n:] for row in W])


def rfm_inverse(M, method=None):
    """Exact inverse of a square RFMatrix.

    method: None for auto, or one of "resolvent", "bareiss", "field".
    Auto picks the resolvent recursion when the row-cleared matrix has
    the shape a*(u*I + C), fraction-free elimination for modest sizes,
    and reduced field elimination for the rest.
    """
    if M.nrows != M.ncols:
        raise ValueError("inverse of a non-square matrix")
    n = M.nrows
    if n == 0:
        return RFMatrix([])
    prows, dens = _row_cleared(M)
    shape = _resolvent_shape(prows)
    if method in (None, "resolvent") and shape is not None:
        alist, B = shape
        char, adj = _fl_resolvent(B)
        out = []
        for i in range(n):
            orow = []
            for j in range(n):
                orow.append(RatFunc(adj[i][j] * dens[j].scale(F1 / alist[j]),
                                    char))
            out.append(orow)
        return RFMatrix(out)
    if method == "resolvent":
        raise ValueError("matrix is not of resolvent shape")
    if method == "bareiss" or (method is None and n <= 24):
        return _ffgj_inverse(prows, dens)
    return _field_inverse(M)


def nullspace(rows, ncols):
    """Kernel basis of a sparse system over Fraction.

    rows: iterable of dicts {col: Fraction} (zero rows allowed).
    Returns a list of dense Fraction vectors, one per free column in
    ascending column order, so the output is deterministic.
    """
    pivots = {}          # col -> reduced row (dict), pivot coefficient 1
    for raw in rows:
        row = dict(raw)
        while True:
            cols = [c for c in row if c in pivots]
            if not cols:
                break
            c = min(cols)
            f = row.pop(c)
            for cc, v in pivots[c].items():
                if cc == c:
                    continue
                w = row.get(cc, F0) - f * v
                if w:
                    row[cc] = w
                else:
                    row.pop(cc, None)
        row = {c: v for c, v in row.items() if v}
        if not row:
            continue
        p = min(row)
        inv = F1 / row[p]
        row = {c: v * inv for c, v in row.items()}
        # back-eliminate the new pivot column from stored rows
        for pc, prow in pivots.items():
            if p in prow:
                f = prow.pop(p)
                for cc, v in row.items():
                    if cc == p:
                        continue
                    w = prow.get(cc, F0) - f * v
                    if w:
                        prow[cc] = w
                    else:
                        prow.pop(cc, None)
        pivots[p] = row
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [F0] * ncols
        vec[f] = F1
        for p, prow in pivots.items():
            v = prow.get(f)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


class SparseOp:
    """Sparse square matrix of Fraction entries, kept as column dicts.

    Used for operators on Fock spaces and for finite-dimensional Lie
    algebra representations alike; only the dimension ties an instance
    to a particular space.
    """

    __slots__ = ("dim", "cols")

    def __init__(self, dim, cols=None):
        self.dim = dim
        self.cols = cols if cols is not None else {}

    @staticmethod
    def identity(dim):
        return SparseOp(dim, {j: {j: F1} for j in range(dim)})

    @staticmethod
    def zero(dim):
        return SparseOp(dim)

    @staticmethod
    def scalar(dim, value):
        value = Fraction(value)
        if not value:
            return SparseOp(dim)
        return SparseOp(dim, {j: {j: value} for j in range(dim)})

    @staticmethod
    def unit(dim, r, c):
        return SparseOp(dim, {c: {r: F1}})

    def is_zero(self):
        return all(not col for col in self.cols.values())

    def __eq__(self, other):
        if self.dim != other.dim:
            return False
        for j in self.cols.keys() | other.cols.keys():
            a = self.cols.get(j, {})
            b = other.cols.get(j, {})
            for r in a.keys() | b.keys():
                if a.get(r, F0) != b.get(r, F0):
                    return False
        return True

    def __neg__(self):
        return SparseOp(self.dim, {j: {r: -v for r, v in col.items()}
                                   for j, col in self.cols.items()})

    def __add__(self, other):
        out = {j: dict(col) for j, col in self.cols.items()}
        for j, col in other.cols.items():
            dst = out.setdefault(j, {})
            for r, v in col.items():
                w = dst.get(r, F0) + v
                if w:
                    dst[r] = w
                else:
                    dst.pop(r, None)
        return SparseOp(self.dim, out)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out = {}
        for j, bcol in other.cols.items():
            acc = {}
            for k, bv in bcol.items():
                acol = self.cols.get(k)
                if not acol:
                    continue
                for r, av in acol.items():
                    w = acc.get(r, F0) + av * bv
                    if w:
                        acc[r] = w
                    else:
                        acc.pop(r, None)
            if acc:
                out[j] = acc
        return SparseOp(self.dim, out)

    __rmul__ = __mul__

    def scale(self, k):
        k = Fraction(k)
        if not k:
            return SparseOp(self.dim)
        return SparseOp(self.dim, {j: {r: v * k for r, v in col.items()}
                                   for j, col in self.cols.items()})

    def commutator(self, other):
        return self * other - other * self

    def anticommutator(self, other):
        return self * other + other * self

    def apply(self, vec):
        """vec: dict {index: Fraction} -> dict."""
        out = {}
        for j, c in vec.items():
            col = self.cols.get(j)
            if not col:
                continue
            for r, v in col.items():
                w = out.get(r, F0) + v * c
                if w:
                    out[r] = w
                else:
                    out.pop(r, None)
        return out

    def entries(self):
        for j, col in self.cols.items():
            for r, v in col.items():
                yield r, j, v

    def transpose(self):
        out = {}
        for r, j, v in self.entries():
            out.setdefault(r, {})[j] = v
        return SparseOp(self.dim, out)

    def kron(self, other):
        """self acting on the slow index, other on the fast one."""
        d = other.dim
        out = {}
        for j, col in self.cols.items():
            for bj, bcol in other.cols.items():
                dst = out.setdefault(j * d + bj, {})
                for r, v in col.items():
                    for br, bv in bcol.items():
                        dst[r * d + br] = v * bv
        return SparseOp(self.dim * d, out)

    def to_scaled_sparse(self):
        return ScaledSparse.from_entries(
            self.dim, self.dim, [(r, j, v) for r, j, v in self.entries()])


def _lcm_int(a, b):
    return a * b // _int_gcd(a, b)


class ScaledSparse:
    """Sparse matrix of integers divided by one positive integer.

    Products and sums never reduce; equality cross-multiplies the two
    scalar denominators, so the comparison is exact whatever the
    internal scaling.  Intended for evaluating operator identities at
    rational points.
    """

    __slots__ = ("nrows", "ncols", "den", "cols")

    def __init__(self, nrows, ncols, den=1, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        self.den = den
        self.cols = cols if cols is not None else [dict() for _ in range(ncols)]

    @staticmethod
    def identity(n):
        m = ScaledSparse(n, n)
        for j in range(n):
            m.cols[j][j] = 1
        return m

    @staticmethod
    def from_entries(nrows, ncols, entries):
        """entries: iterable of (row, col, Fraction)."""
        entries = list(entries)
        den = 1
        for _, _, v in entries:
            den = _lcm_int(den, v.denominator)
        m = ScaledSparse(nrows, ncols, den)
        for r, c, v in entries:
            w = int(v * den)
            if w:
                m.cols[c][r] = m.cols[c].get(r, 0) + w
        for c in range(ncols):
            m.cols[c] = {r: v for r, v in m.cols[c].items() if v}
        return m

    def nnz(self):
        return sum(len(col) for col in self.cols)

    def __mul__(self, other):
        if isinstance(other, int):
            out = ScaledSparse(self.nrows, self.ncols, self.den)
            out.cols = [{r: v * other for r, v in col.items()}
                        for col in self.cols]
            return out
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = ScaledSparse(self.nrows, other.ncols, self.den * other.den)
        acols = self.cols
        for j, bcol in enumerate(other.cols):
            acc = {}
            for k, bv in bcol.items():
                for r, av in acols[k].items():
                    acc[r] = acc.get(r, 0) + av * bv
            out.cols[j] = {r: v for r, v in acc.items() if v}
        return out

    __rmul__ = __mul__

    def _aligned(self, other):
        den = _lcm_int(self.den, other.den)
        return den, den // self.den, den // other.den

    def __add__(self, other):
        den, sa, sb = self._aligned(other)
        out = ScaledSparse(self.nrows, self.ncols, den)
        for j in range(self.ncols):
            col = {r: v * sa for r, v in self.cols[j].items()}
            for r, v in other.cols[j].items():
                w = col.get(r, 0) + v * sb
                if w:
                    col[r] = w
                else:
                    col.pop(r, None)
            out.cols[j] = col
        return out

    def __sub__(self, other):
        return self + (other * -1)

    def __eq__(self, other):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        _, sa, sb = self._aligned(other)
        for j in range(self.ncols):
            a, b = self.cols[j], other.cols[j]
            for r in a.keys() | b.keys():
                if a.get(r, 0) * sa != b.get(r, 0) * sb:
                    return False
        return True

    def scale_fraction(self, x):
        out = ScaledSparse(self.nrows, self.ncols, self.den * x.denominator)
        num = x.numerator
        out.cols = [{r: v * num for r, v in col.items()} for col in self.cols]
        return out

    def kron(self, other):
        """Tensor product; block (i,j) of the result is self[i,j] * other."""
        nr, nc = other.nrows, other.ncols
        out = ScaledSparse(self.nrows * nr, self.ncols * nc,
                           self.den * other.den)
        for cj, col in enumerate(self.cols):
            for ci, bcol in enumerate(other.cols):
                dst = out.cols[cj * nc + ci]
                for r, v in col.items():
                    for br, bv in bcol.items():
                        dst[r * nr + br] = v * bv
        return out

    def entry(self, r, c):
        return Fraction(self.cols[c].get(r, 0), self.den)

    def defects_vs(self, other, limit=5):
        """List up to limit (row, col) positions where the two differ."""
        out = []
        _, sa, sb = self._aligned(other)
        for j in range(self.ncols):
            a, b = self.cols[j], other.cols[j]
            for r in sorted(a.keys() | b.keys()):
                if a.get(r, 0) * sa != b.get(r, 0) * sb:
                    out.append((r, j))
                    if len(out) >= limit:
                        return out
        return out
