"""Quadratic fields with exact element and ideal arithmetic.

Elements are kept as exact rational coordinates on (1, sqrt(d)).  Ideal
factorization is done through explicit generators, which is why the
routines that need it insist on class number one: primes above ell are
found by solving the norm form (complete Fincke-Pohst enumeration in the
imaginary case, a bounded Pell-type scan in the real case), valuations
by exact divisibility, and relative discriminants of K(sqrt(x))/K by the
parity of valuations away from 2 together with a square-mod-4 test at 2.
"""

from fractions import Fraction
from math import isqrt

import sympy

from . import zlattice


def kronecker(a, n):
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    t = 1
    if n < 0:
        n = -n
        if a < 0:
            t = -t
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            t = -t
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def squarefree_part(n):
    """Squarefree part of a nonzero integer (sign preserved)."""
    assert n != 0
    s = 1
    for q, e in sympy.factorint(abs(n)).items():
        if e % 2:
            s *= q
    return s if n > 0 else -s


def class_number_imaginary(D):
    """Class number of the imaginary quadratic order of discriminant D,
    counted through reduced binary quadratic forms."""
    assert D < 0 and D % 4 in (0, 1)
    h = 0
    a = 1
    while a * a <= -D // 3:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:  # reduced forms take b >= 0 on the boundary
                continue
            h += 1
        a += 1
    return h


class QuadElt:
    """a + b sqrt(d) with exact rational a, b."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        self.field = field
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, other):
        other = self.field.coerce(other)
        return QuadElt(self.field, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadElt(self.field, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self.field.coerce(other))

    def __rsub__(self, other):
        return self.field.coerce(other) + (-self)

    def __mul__(self, other):
        other = self.field.coerce(other)
        d = self.field.d
        return QuadElt(self.field,
                       self.a * other.a + d * self.b * other.b,
                       self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conj(self):
        return QuadElt(self.field, self.a, -self.b)

    def norm(self):
        return self.a * self.a - self.field.d * self.b * self.b

    def trace(self):
        return 2 * self.a

    def inv(self):
        n = self.norm()
        assert n != 0, "division by zero"
        return QuadElt(self.field, self.a / n, -self.b / n)

    def __truediv__(self, other):
        return self * self.field.coerce(other).inv()

    def __rtruediv__(self, other):
        return self.field.coerce(other) * self.inv()

    def __pow__(self, e):
        e = int(e)
        if e < 0:
            return self.inv() ** (-e)
        r = self.field.one()
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_integral(self):
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.coerce(other)
        if not isinstance(other, QuadElt):
            return NotImplemented
        return (self.field.d == other.field.d and self.a == other.a
                and self.b == other.b)

    def __hash__(self):
        return hash((self.field.d, self.a, self.b))

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a} + {self.b}*sqrt({self.field.d}))"


class QuadField:
    """Q(sqrt(d)) for squarefree d."""

    def __init__(self, d):
        d = int(d)
        assert d not in (0, 1) and squarefree_part(d) == d, \
            "d must be squarefree and not 0 or 1"
        self.d = d
        self.disc = d if d % 4 == 1 else 4 * d
        self._padic_embeddings = {}

    def elt(self, a, b=0):
        return QuadElt(self, a, b)

    def coerce(self, x):
        if isinstance(x, QuadElt):
            assert x.field.d == self.d
            return x
        if isinstance(x, (int, Fraction)):
            return QuadElt(self, x, 0)
        raise TypeError(f"cannot coerce {type(x)} into Q(sqrt({self.d}))")

    def zero(self):
        return QuadElt(self, 0, 0)

    def one(self):
        return QuadElt(self, 1, 0)

    def sqrt_gen(self):
        return QuadElt(self, 0, 1)

    def omega(self):
        """Standard generator of the maximal order."""
        if self.d % 4 == 1:
            return QuadElt(self, Fraction(1, 2), Fraction(1, 2))
        return self.sqrt_gen()

    def real_signs(self, x):
        """Signs of x at the two real places (sqrt(d) -> +, -); requires
        d > 0 and x != 0."""
        assert self.d > 0
        x = self.coerce(x)
        assert not x.is_zero()

        def sgn(a, b):
            # sign of a + b sqrt(d) exactly
            if b == 0:
                return 1 if a > 0 else -1
            if a == 0:
                return 1 if b > 0 else -1
            if a > 0 and b > 0:
                return 1
            if a < 0 and b < 0:
                return -1
            # opposite signs: compare a^2 with d b^2
            if a * a > self.d * b * b:
                return 1 if a > 0 else -1
            return 1 if b > 0 else -1
        return sgn(x.a, x.b), sgn(x.a, -x.b)

    def splitting(self, ell):
        """'split', 'inert' or 'ramified' for a rational prime ell."""
        k = kronecker(self.disc, ell)
        return {1: "split", -1: "inert", 0: "ramified"}[k]

    def primes_above(self, ell):
        """Prime ideals above ell as (ell, generator-or-None, type).

        Generators are produced explicitly, so this requires (and in
        effect verifies) principality of the primes above ell.
        """
        typ = self.splitting(ell)
        if typ == "inert":
            return [(ell, None, "inert")]
        pi = self._norm_ell_generator(ell)
        if pi is None:
            raise ArithmeticError(
                f"no generator of norm +-{ell}: class number > 1?")
        if typ == "ramified":
            return [(ell, pi, "ramified")]
        return [(ell, pi, "split"), (ell, pi.conj(), "split")]

    def _norm_ell_generator(self, ell):
        """Element (s + t sqrt(d))/2 of norm +-ell, integral."""
        d = self.d
        if d < 0:
            # complete enumeration on the positive definite norm form
            # of the maximal order basis (1, omega)
            w = self.omega()
            g11 = 2  # trace(1*1)
            g12 = int(w.trace())
            g22 = int(2 * w.norm())  # trace(w * conj(w)) = 2 N(w)
            G = [[g11, g12], [g12, g22]]
            sols = zlattice.fincke_pohst(G, 2 * ell)
            for (u, v) in sorted(sols):
                x = self.elt(u, 0) + self.elt(v, 0) * w
                if abs(x.norm()) == ell:
                    return x
            return None
        # real field: bounded scan on s^2 - d t^2 = +-4 ell
        B = isqrt(16 * ell // d) + 2 + isqrt(4 * ell)
        for t in range(0, B + 1):
            for target in (4 * ell + d * t * t, -4 * ell + d * t * t):
                if target < 0:
                    continue
                s = isqrt(target)
                if s * s != target:
                    continue
                for ss in ((s, -s) if s else (0,)):
                    x = QuadElt(self, Fraction(ss, 2), Fraction(t, 2))
                    if x.is_integral() and abs(x.norm()) == ell:
                        return x
        return None

    def valuation(self, x, prime):
        """Valuation of a nonzero element at a prime triple."""
        ell, pi, typ = prime
        x = self.coerce(x)
        assert not x.is_zero()
        n = x.norm()
        vn = (sympy.multiplicity(ell, n.numerator)
              - sympy.multiplicity(ell, n.denominator))
        if typ == "inert":
            assert vn % 2 == 0
            return vn // 2
        if typ == "ramified":
            return vn
        # split: divide by pi while integral (handle denominators first)
        den = x.a.denominator * x.b.denominator
        shift = sympy.multiplicity(ell, den) if den % ell == 0 else 0
        y = x * ell ** shift
        v = 0
        while True:
            y = y / pi
            if not y.is_integral():
                break
            v += 1
            assert v <= abs(vn) + 2 * shift + 2
        # subtract the shift: ell = pi * conj(pi) up to unit
        return v - shift

    def factor_principal(self, x):
        """Factor the principal ideal (x), x integral, as
        [(prime, exponent)] with positive exponents."""
        x = self.coerce(x)
        assert x.is_integral() and not x.is_zero()
        n = int(abs(x.norm()))
        out = []
        for ell in sorted(sympy.factorint(n)):
            for prime in self.primes_above(ell):
                e = self.valuation(x, prime)
                assert e >= 0
                if e:
                    out.append((prime, e))
        # completeness: product of residue norms matches |Nm(x)|
        check = 1
        for (ell, pi, typ), e in out:
            f = 2 if typ == "inert" else 1
            check *= ell ** (f * e)
        assert check == n, "ideal factorization lost a prime"
        return out

    def residue_norm(self, prime):
        ell, _, typ = prime
        return ell ** (2 if typ == "inert" else 1)

    def minkowski_class_number_one(self):
        """True if the Minkowski bound certifies h = 1 (possibly after
        checking principality of the small primes)."""
        if self.d < 0:
            return class_number_imaginary(self.disc) == 1
        # real: every prime up to the Minkowski bound sqrt(disc)/2
        # must be principal
        bound = isqrt(self.disc) // 2
        for ell in sympy.primerange(2, bound + 1):
            if self.splitting(ell) == "inert":
                continue
            if self._norm_ell_generator(ell) is None:
                return False
        return True

    def relative_discriminant_sqrt(self, x):
        """Relative discriminant of K(sqrt(x))/K by Kummer-Dedekind.

        Returns (factored, norm, w) where factored is a list of
        (prime, exponent) pairs, norm the absolute norm of the
        discriminant ideal, and w the squarefree generator actually
        used (x divided by the square part of its ideal).

        Requires x integral, (x) factorable by explicit generators, and
        2 unramified in K (odd discriminant).
        """
        x = self.coerce(x)
        assert x.is_integral() and not x.is_zero()
        if self.disc % 2 == 0:
            raise NotImplementedError("2 ramifies in the base field")
        fac = self.factor_principal(x)
        gamma = self.one()
        for (ell, pi, typ), e in fac:
            g = pi if typ != "inert" else self.elt(ell)
            gamma = gamma * g ** (e // 2)
        w = x / (gamma * gamma)
        assert w.is_integral()
        disc = []
        for (ell, pi, typ), e in fac:
            if ell != 2 and e % 2:
                disc.append(((ell, pi, typ), 1))
        # 2-adic part
        for prime in self.primes_above(2):
            v2 = self.valuation(w, prime) if not w.is_zero() else 0
            if v2 % 2 == 1:
                disc.append((prime, 3))
            else:
                assert v2 == 0, "w should be squarefree"
                if not self._square_mod4_locally(w, prime):
                    disc.append((prime, 2))
        norm = 1
        for prime, e in disc:
            norm *= self.residue_norm(prime) ** e
        return disc, norm, w

    def _square_mod4_locally(self, w, prime):
        """Is w congruent to a square modulo 4 at the given prime above 2?
        (2 unramified; equivalent to K(sqrt(w))/K unramified there.)"""
        omega = self.omega()
        for u in range(4):
            for v in range(4):
                s = self.elt(u) + self.elt(v) * omega
                diff = w - s * s
                if diff.is_zero() or self.valuation(diff, prime) >= 2:
                    return True
        return False

    def residue_field_at_inert(self, ell):
        """The residue field O_K/(ell) for an inert prime, as an Fq
        together with the reduction map on integral elements."""
        from .padics import Fq
        assert self.splitting(ell) == "inert"
        w = self.omega()
        # minimal polynomial of omega: x^2 - tr x + nm
        tr, nm = int(w.trace()), int(w.norm())
        fq = Fq(ell, [nm % ell, (-tr) % ell, 1])

        def reduce(x):
            x = self.coerce(x)
            assert x.is_integral()
            # write x = u + v omega: v = b / w.b, u = a - v * w.a
            v = x.b / w.b
            u = x.a - v * w.a
            assert u.denominator == 1 and v.denominator == 1
            return fq.add(fq.from_int(int(u)),
                          fq.mul(fq.from_int(int(v)), fq.gen()))
        return fq, reduce

    def padic_embedding(self, K):
        """Canonical embedding into a p-adic field K containing sqrt(d):
        sqrt(d) goes to the canonical (lex-smallest residue) square root.
        Cached per target field."""
        key = id(K)
        if key not in self._padic_embeddings:
            root = K.sqrt(K.from_int(self.d))
            self._padic_embeddings[key] = root

        root = self._padic_embeddings[key]

        def emb(x):
            x = self.coerce(x)
            return K.from_rational(x.a) + K.from_rational(x.b) * root
        return emb

    def __repr__(self):
        return f"Q(sqrt({self.d}))"
