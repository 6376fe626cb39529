"""Exact scalar arithmetic over the rationals.

Everything downstream reduces to four value types:

* ``Fraction`` from the standard library (arbitrary precision, always
  reduced, positive denominator) -- used directly, no wrapper;
* ``UPoly`` -- dense univariate polynomials, ascending coefficients,
  no trailing zeros, so representations are unique and ``==`` is
  coefficient comparison;
* ``RatFunc`` -- quotients of two UPoly with a monic denominator and
  gcd-reduced, again a unique representation;
* ``LaurentSeries`` -- a truncated expansion at the point at infinity,
  coefficients of u^0, u^-1, ..., u^-K.

No floating point enters anywhere.  Division is either exact or an error.
"""

from fractions import Fraction
from math import gcd as _int_gcd

F0 = Fraction(0)
F1 = Fraction(1)


def rat(x):
    """Coerce ints, strings and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def rat_to_json(x):
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rat_from_json(obj):
    return Fraction(int(obj["num"]), int(obj["den"]))


class UPoly:
    """Dense univariate polynomial with Fraction coefficients.

    Coefficients are stored ascending; the zero polynomial is the empty
    tuple and has degree -1 by convention.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        cs = [x if isinstance(x, Fraction) else Fraction(x) for x in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.c = tuple(cs)

    @staticmethod
    def const(x):
        return UPoly((x,))

    @staticmethod
    def x():
        return UPoly((0, 1))

    # Polynomial a*u + b, a frequent building block.
    @staticmethod
    def linear(a, b):
        return UPoly((b, a))

    @property
    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def leading(self):
        if not self.c:
            return F0
        return self.c[-1]

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __neg__(self):
        p = UPoly.__new__(UPoly)
        p.c = tuple(-x for x in self.c)
        return p

    def __add__(self, other):
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return UPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self.c, other.c
        if not a or not b:
            return UPoly()
        out = [F0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return UPoly(out)

    __rmul__ = __mul__

    def scale(self, k):
        k = rat(k)
        if not k:
            return UPoly()
        p = UPoly.__new__(UPoly)
        p.c = tuple(x * k for x in self.c)
        return p

    def __call__(self, point):
        """Evaluate by Horner's rule."""
        acc = F0
        for x in reversed(self.c):
            acc = acc * point + x
        return acc

    def compose_linear(self, a, b):
        """Return p(a*u + b)."""
        a, b = rat(a), rat(b)
        acc = UPoly()
        arg = UPoly.linear(a, b)
        for x in reversed(self.c):
            acc = acc * arg + UPoly.const(x)
        return acc

    def monic(self):
        if not self.c:
            return self
        lead = self.c[-1]
        if lead == 1:
            return self
        return self.scale(1 / lead)

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        d = other.c
        dd = len(d) - 1
        inv = 1 / d[-1]
        q = [F0] * max(len(r) - dd, 0)
        for i in range(len(r) - 1, dd - 1, -1):
            f = r[i] * inv
            if f:
                q[i - dd] = f
                for j in range(dd + 1):
                    r[i - dd + j] -= f * d[j]
        return UPoly(q), UPoly(r[:dd])

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __repr__(self):
        if not self.c:
            return "UPoly(0)"
        parts = []
        for i, x in enumerate(self.c):
            if x:
                parts.append("%s*u^%d" % (x, i))
        return "UPoly(%s)" % " + ".join(parts)

    def to_json(self):
        return [rat_to_json(x) for x in self.c]

    @staticmethod
    def from_json(arr):
        return UPoly([rat_from_json(x) for x in arr])


def _clear_to_int(coeffs):
    """Fraction list -> (int list, common scale); scale*coeffs is integral."""
    den = 1
    for x in coeffs:
        den = den * x.denominator // _int_gcd(den, x.denominator)
    return [int(x * den) for x in coeffs], den


def _int_content(ints):
    g = 0
    for v in ints:
        g = _int_gcd(g, abs(v))
    return g or 1


def poly_gcd(a, b):
    """Monic gcd via the primitive remainder sequence over the integers.

    Plain Euclid over Fraction suffers severe coefficient growth; reducing
    every pseudo-remainder to its primitive part keeps the integers small
    for the degree range used here.
    """
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    fa, _ = _clear_to_int(a.c)
    fb, _ = _clear_to_int(b.c)
    fa = [v // _int_content(fa) for v in fa]
    fb = [v // _int_content(fb) for v in fb]
    if len(fa) < len(fb):
        fa, fb = fb, fa
    while fb:
        r = list(fa)
        while True:
            while r and r[-1] == 0:
                r.pop()
            if len(r) < len(fb):
                break
            top, lead = r[-1], fb[-1]
            g = _int_gcd(abs(top), abs(lead))
            mr, mb = lead // g, top // g
            shift = len(r) - len(fb)
            if mr != 1:
                r = [mr * v for v in r]
            for j, w in enumerate(fb):
                r[shift + j] -= mb * w
        fa, fb = fb, r
        if fb:
            cont = _int_content(fb)
            fb = [v // cont for v in fb]
    return UPoly(fa).monic()


def poly_lcm(a, b):
    if a.is_zero() or b.is_zero():
        return UPoly()
    g = poly_gcd(a, b)
    return (a * b).exact_div(g).monic()


class RatFunc:
    """Reduced quotient of two polynomials; denominator monic and nonzero."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction)):
            num = UPoly.const(num)
        if den is None:
            den = UPoly.const(1)
        elif isinstance(den, (int, Fraction)):
            den = UPoly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = UPoly()
            self.den = UPoly.const(1)
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
        lead = den.leading()
        if lead != 1:
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        self.num = num
        self.den = den

    @staticmethod
    def _raw(num, den):
        """Internal: trust that num/den is already reduced and den monic."""
        f = RatFunc.__new__(RatFunc)
        f.num = num
        f.den = den
        return f

    @staticmethod
    def const(x):
        return RatFunc(UPoly.const(x))

    @staticmethod
    def u():
        return RatFunc(UPoly.x())

    # 1/(u + z), the resolvent building block.
    @staticmethod
    def simple_pole(z):
        return RatFunc(UPoly.const(1), UPoly.linear(1, z))

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.c == (F1,) and self.den.c == (F1,)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        g = poly_gcd(self.den, other.den)
        if g.degree <= 0:
            return RatFunc(self.num * other.den + other.num * self.den,
                           self.den * other.den)
        da = self.den.exact_div(g)
        db = other.den.exact_div(g)
        return RatFunc(self.num * db + other.num * da, da * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            k = rat(other)
            if not k:
                return RatFunc.const(0)
            return RatFunc._raw(self.num.scale(k), self.den)
        if self.is_zero() or other.is_zero():
            return RatFunc.const(0)
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = self.num.exact_div(g1) if g1.degree > 0 else self.num
        d2 = other.den.exact_div(g1) if g1.degree > 0 else other.den
        n2 = other.num.exact_div(g2) if g2.degree > 0 else other.num
        d1 = self.den.exact_div(g2) if g2.degree > 0 else self.den
        num = n1 * n2
        den = d1 * d2
        lead = den.leading()
        if lead != 1:
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        return RatFunc._raw(num, den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        num, den = self.den, self.num
        lead = den.leading()
        if lead != 1:
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        return RatFunc._raw(num, den)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (F1 / rat(other))
        return self * other.inverse()

    def __call__(self, point):
        point = rat(point)
        d = self.den(point)
        if d == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(point) / d

    def has_pole_at(self, point):
        return self.den(rat(point)) == 0

    def compose_linear(self, a, b):
        """Return f(a*u + b) as a reduced RatFunc; needs a != 0."""
        if rat(a) == 0:
            raise ValueError("degenerate substitution")
        return RatFunc(self.num.compose_linear(a, b),
                       self.den.compose_linear(a, b))

    def __repr__(self):
        return "RatFunc(%r / %r)" % (self.num, self.den)

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(obj):
        return RatFunc(UPoly.from_json(obj["num"]), UPoly.from_json(obj["den"]))


RF0 = RatFunc.const(0)
RF1 = RatFunc.const(1)


class LaurentSeries:
    """Truncated expansion at infinity: coeffs[k] multiplies u^-k, k=0..order."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs, order=None):
        cs = [x if isinstance(x, Fraction) else Fraction(x) for x in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be >= 0")
        cs = cs[:order + 1] + [F0] * (order + 1 - len(cs))
        self.order = order
        self.coeffs = tuple(cs)

    @staticmethod
    def one(order):
        return LaurentSeries([F1], order)

    def __eq__(self, other):
        k = min(self.order, other.order)
        return self.coeffs[:k + 1] == other.coeffs[:k + 1]

    def truncate(self, order):
        return LaurentSeries(self.coeffs[:order + 1], order)

    def __neg__(self):
        return LaurentSeries([-x for x in self.coeffs], self.order)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentSeries([other], self.order)
        k = min(self.order, other.order)
        return LaurentSeries(
            [self.coeffs[i] + other.coeffs[i] for i in range(k + 1)], k)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentSeries([other], self.order)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            k = rat(other)
            return LaurentSeries([x * k for x in self.coeffs], self.order)
        k = min(self.order, other.order)
        out = [F0] * (k + 1)
        for i in range(k + 1):
            a = self.coeffs[i]
            if a:
                for j in range(k + 1 - i):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] += a * b
        return LaurentSeries(out, k)

    __rmul__ = __mul__

    def inverse(self):
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("series has no constant term")
        inv0 = F1 / self.coeffs[0]
        out = [inv0] + [F0] * self.order
        for k in range(1, self.order + 1):
            acc = F0
            for i in range(1, k + 1):
                acc += self.coeffs[i] * out[k - i]
            out[k] = -acc * inv0
        return LaurentSeries(out, self.order)

    def negate_variable(self):
        """Return the expansion of f(-u)."""
        return LaurentSeries(
            [(-x if k % 2 else x) for k, x in enumerate(self.coeffs)],
            self.order)

    def shift_down(self, steps=1):
        """Multiply by u^-steps, dropping what falls past the order."""
        return LaurentSeries([F0] * steps + list(self.coeffs), self.order)

    def scale_variable(self, a):
        """Return the expansion of f(a*u)."""
        a = rat(a)
        if a == 0:
            raise ValueError("degenerate substitution")
        out, p = [], F1
        for x in self.coeffs:
            out.append(x * p)
            p = p / a
        return LaurentSeries(out, self.order)

    def __repr__(self):
        return "LaurentSeries(%s; order=%d)" % (list(self.coeffs), self.order)

    def to_json(self):
        return {"order": self.order,
                "coeffs": [rat_to_json(x) for x in self.coeffs]}


def expand_at_infinity(f, order):
    """Expansion of a proper rational function in powers of u^-1.

    Requires deg num <= deg den; the leading coefficient of u^0 is then
    finite.  Exact: long division of the two reversed coefficient series.
    """
    if isinstance(f, (int, Fraction)):
        return LaurentSeries([f], order)
    p, q = f.num.degree, f.den.degree
    if p > q:
        raise ValueError("not finite at infinity")
    if f.is_zero():
        return LaurentSeries([F0], order)
    # coefficients of t^k (t = 1/u) for num*t^q and den*t^q
    a = [F0] * (order + 1)
    for i, x in enumerate(f.num.c):
        k = q - i
        if k <= order:
            a[k] = x
    b = [F0] * (order + 1)
    for i, x in enumerate(f.den.c):
        k = q - i
        if k <= order:
            b[k] = x
    inv0 = F1 / b[0]
    out = [F0] * (order + 1)
    for k in range(order + 1):
        acc = a[k]
        for i in range(1, k + 1):
            acc -= b[i] * out[k - i]
        out[k] = acc * inv0
    return LaurentSeries(out, order)
