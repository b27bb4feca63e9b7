"""Exact relative field extensions and a generic elliptic curve group law.

RelExt models B[t]/(f) for any exact base field B whose elements carry
Python operator arithmetic (Fraction, QuadElt, or another RelExt layer),
with inverses by the extended Euclidean algorithm in B[t].  The curve
group law is the standard chord-and-tangent addition for a long
Weierstrass model and works over any such field, including wrapped
finite fields for reduction arguments.
"""

from fractions import Fraction


def _is_zero(x):
    probe = getattr(x, "is_zero", None)
    return probe() if probe is not None else x == 0


class RationalBase:
    """Adapter presenting Q through the small field protocol."""

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise TypeError(f"cannot coerce {type(x)} into Q")


class RelExt:
    """B[t]/(f) for a monic irreducible f over the base field B."""

    def __init__(self, base, minpoly, name="t"):
        self.base = base
        self.name = name
        mp = [base.coerce(c) for c in minpoly]
        assert mp[-1] == base.one(), "minimal polynomial must be monic"
        self.minpoly = tuple(mp)
        self.deg = len(mp) - 1
        assert self.deg >= 1

    def elt(self, coords):
        coords = [self.base.coerce(c) for c in coords]
        assert len(coords) <= self.deg
        coords += [self.base.zero()] * (self.deg - len(coords))
        return RelExtElt(self, tuple(coords))

    def zero(self):
        return self.elt([])

    def one(self):
        return self.elt([1])

    def gen(self):
        assert self.deg >= 2
        return self.elt([0, 1])

    def coerce(self, x):
        if isinstance(x, RelExtElt) and x.ext is self:
            return x
        return self.elt([self.base.coerce(x)])

    def hom(self, gen_image, base_map=None):
        """Ring map out of this extension: t goes to gen_image, base
        coefficients through base_map (default: coercion into the target
        structure of gen_image)."""
        def phi(x):
            assert x.ext is self
            acc = None
            for c in reversed(x.coords):
                cc = base_map(c) if base_map else c
                acc = cc if acc is None else acc * gen_image + cc
            return acc
        return phi

    # -- polynomial helpers over the base field --

    def _poly_trim(self, a):
        while a and a[-1] == self.base.zero():
            a = a[:-1]
        return a

    def _poly_divmod(self, a, b):
        b = self._poly_trim(b)
        assert b, "polynomial division by zero"
        a = list(a)
        binv = self.base.one() / b[-1]
        q = [self.base.zero()] * max(0, len(a) - len(b) + 1)
        while len(self._poly_trim(a)) >= len(b):
            a = self._poly_trim(a)
            k = len(a) - len(b)
            c = a[-1] * binv
            q[k] = c
            for i, bc in enumerate(b):
                a[i + k] = a[i + k] - c * bc
        return q, self._poly_trim(a)

    def _poly_xgcd(self, a, b):
        """(g, u, v) with u a + v b = g over the base field."""
        zero, one = self.base.zero(), self.base.one()
        r0, r1 = list(a), list(b)
        s0, s1 = [one], []
        t0, t1 = [], [one]
        while self._poly_trim(r1):
            q, r = self._poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self._poly_sub(s0, self._poly_mul(q, s1))
            t0, t1 = t1, self._poly_sub(t0, self._poly_mul(q, t1))
        return self._poly_trim(r0), s0, t0

    def _poly_mul(self, a, b):
        if not a or not b:
            return []
        out = [self.base.zero()] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return out

    def _poly_sub(self, a, b):
        n = max(len(a), len(b))
        z = self.base.zero()
        a = list(a) + [z] * (n - len(a))
        for i, y in enumerate(b):
            a[i] = a[i] - y
        return self._poly_trim(a)

    def __repr__(self):
        return f"Ext({self.base!r}, deg {self.deg})"


class RelExtElt:
    __slots__ = ("ext", "coords")

    def __init__(self, ext, coords):
        self.ext = ext
        self.coords = coords

    def __add__(self, other):
        other = self.ext.coerce(other)
        return RelExtElt(self.ext, tuple(a + b for a, b in
                                         zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return RelExtElt(self.ext, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self.ext.coerce(other))

    def __rsub__(self, other):
        return self.ext.coerce(other) + (-self)

    def __mul__(self, other):
        other = self.ext.coerce(other)
        E = self.ext
        z = E.base.zero()
        prod = [z] * (2 * E.deg - 1)
        for i, a in enumerate(self.coords):
            if a == z:
                continue
            for j, b in enumerate(other.coords):
                prod[i + j] = prod[i + j] + a * b
        # reduce by the monic minimal polynomial
        for k in range(len(prod) - 1, E.deg - 1, -1):
            c = prod[k]
            if c == z:
                continue
            for i in range(E.deg):
                prod[k - E.deg + i] = prod[k - E.deg + i] - c * E.minpoly[i]
            prod[k] = z
        return RelExtElt(E, tuple(prod[:E.deg]))

    __rmul__ = __mul__

    def inv(self):
        E = self.ext
        g, u, _ = E._poly_xgcd(list(self.coords), list(E.minpoly))
        assert len(g) == 1, "element not invertible: minpoly not coprime"
        c = E.base.one() / g[0]
        u = [x * c for x in u]
        assert len(u) <= E.deg
        return E.elt(u)

    def __truediv__(self, other):
        return self * self.ext.coerce(other).inv()

    def __rtruediv__(self, other):
        return self.ext.coerce(other) * self.inv()

    def __pow__(self, e):
        e = int(e)
        if e < 0:
            return self.inv() ** (-e)
        r = self.ext.one()
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def is_zero(self):
        z = self.ext.base.zero()
        return all(c == z for c in self.coords)

    def __eq__(self, other):
        if isinstance(other, RelExtElt) and other.ext is not self.ext:
            return NotImplemented
        try:
            other = self.ext.coerce(other)
        except (TypeError, AssertionError):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        t = self.ext.name
        parts = []
        for i, c in enumerate(reversed(self.coords)):
            k = self.ext.deg - 1 - i
            if c == self.ext.base.zero():
                continue
            mon = "" if k == 0 else (t if k == 1 else f"{t}^{k}")
            parts.append(f"({c})*{mon}" if mon else f"({c})")
        return " + ".join(parts) if parts else "0"


class WrappedFq:
    """Finite field Fq wrapped with operator arithmetic, for using the
    generic curve law on reductions."""

    def __init__(self, fq):
        self.fq = fq

    def zero(self):
        return WrappedFqElt(self, self.fq.zero())

    def one(self):
        return WrappedFqElt(self, self.fq.one())

    def gen(self):
        return WrappedFqElt(self, self.fq.gen())

    def coerce(self, x):
        if isinstance(x, WrappedFqElt):
            assert x.field is self
            return x
        if isinstance(x, int):
            return WrappedFqElt(self, self.fq.from_int(x))
        if isinstance(x, Fraction):
            num = self.fq.from_int(x.numerator)
            den = self.fq.from_int(x.denominator)
            return WrappedFqElt(self, self.fq.mul(num, self.fq.inv(den)))
        raise TypeError(f"cannot coerce {type(x)}")

    def elements(self):
        for v in self.fq.elements():
            yield WrappedFqElt(self, v)

    def is_square(self, x):
        return x.v == self.fq.zero() or self.fq.is_square(x.v)


class WrappedFqElt:
    __slots__ = ("field", "v")

    def __init__(self, field, v):
        self.field = field
        self.v = v

    def __add__(self, other):
        other = self.field.coerce(other)
        return WrappedFqElt(self.field, self.field.fq.add(self.v, other.v))

    __radd__ = __add__

    def __neg__(self):
        return WrappedFqElt(self.field, self.field.fq.neg(self.v))

    def __sub__(self, other):
        return self + (-self.field.coerce(other))

    def __rsub__(self, other):
        return self.field.coerce(other) + (-self)

    def __mul__(self, other):
        other = self.field.coerce(other)
        return WrappedFqElt(self.field, self.field.fq.mul(self.v, other.v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self.field.coerce(other)
        return WrappedFqElt(self.field,
                            self.field.fq.mul(self.v,
                                              self.field.fq.inv(other.v)))

    def __pow__(self, e):
        return WrappedFqElt(self.field, self.field.fq.pow(self.v, e))

    def is_zero(self):
        return self.field.fq.is_zero(self.v)

    def __eq__(self, other):
        if not isinstance(other, WrappedFqElt):
            try:
                other = self.field.coerce(other)
            except TypeError:
                return NotImplemented
        return self.v == other.v

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        return f"Fq{self.v}"


class EllipticCurve:
    """Long Weierstrass curve over an exact field given by a protocol
    object with zero()/one()/coerce(); points are None (infinity) or
    (x, y) pairs of field elements."""

    def __init__(self, field, a_invariants):
        self.field = field
        a1, a2, a3, a4, a6 = [field.coerce(a) for a in a_invariants]
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3
              - a4 * a4)
        self.disc = (-b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6
                     + 9 * b2 * b4 * b6)
        assert not _is_zero(self.disc), "singular Weierstrass model"

    def point(self, x, y):
        P = (self.field.coerce(x), self.field.coerce(y))
        assert self.is_on_curve(P), "point not on the curve"
        return P

    def is_on_curve(self, P):
        if P is None:
            return True
        x, y = P
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return _is_zero(lhs - rhs)

    def neg(self, P):
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        if _is_zero(x1 - x2):
            if _is_zero(y1 + y2 + self.a1 * x2 + self.a3):
                return None
            # tangent slope
            num = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4
                   - self.a1 * y1)
            den = 2 * y1 + self.a1 * x1 + self.a3
            lam = num / den
        else:
            lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
        x3 = lam * lam + self.a1 * lam - self.a2 - x1 - x2
        y3 = -(lam + self.a1) * x3 - nu - self.a3
        return (x3, y3)

    def mul(self, k, P):
        k = int(k)
        if k < 0:
            return self.mul(-k, self.neg(P))
        R = None
        Q = P
        while k:
            if k & 1:
                R = self.add(R, Q)
            Q = self.add(Q, Q)
            k >>= 1
        return R

    def count_points(self):
        """#E(Fq) including infinity; the field must enumerate its
        elements and decide squares (odd characteristic only)."""
        half = self.field.coerce(1) / self.field.coerce(2)
        n = 1
        for x in self.field.elements():
            # complete the square in y
            s = (self.a1 * x + self.a3) * half
            g = (x * x * x + self.a2 * x * x + self.a4 * x + self.a6
                 + s * s)
            if _is_zero(g):
                n += 1
            elif self.field.is_square(g):
                n += 2
        return n
