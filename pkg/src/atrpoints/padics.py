"""Unramified p-adic field arithmetic at fixed modulus.

An element of Q_{p^f} is stored as an explicit valuation together with a
unit vector: the coefficients of the unit part on the power basis of a
monic degree-f defining polynomial, each kept modulo p^n.  This is the
usual floating / fixed-modulus representation: every stored unit carries
exactly n base-p digits, and additive cancellation silently costs
relative precision (callers pick n with margin, which every routine in
this package does).

The residue field F_{p^f} gets its own small class; Hensel lifting,
Teichmueller lifts, square roots, exp/log and Frobenius are built on it.
"""

from fractions import Fraction


def _vp(a, p):
    """Exact p-adic valuation of a nonzero integer."""
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


class Fq:
    """The finite field F_{p^f} presented as F_p[x]/(poly)."""

    def __init__(self, p, poly):
        self.p = p
        self.poly = tuple(c % p for c in poly)  # monic, length f+1
        assert self.poly[-1] == 1
        self.f = len(poly) - 1
        self.q = p ** self.f
        # reduction rows: x^(f+k) mod poly for k = 0..f-2
        rows = []
        if self.f > 1:
            cur = [(-c) % p for c in self.poly[:-1]]  # x^f
            rows.append(tuple(cur))
            for _ in range(self.f - 2):
                lead = cur[-1]
                cur = [0] + cur[:-1]
                cur = [(a + lead * b) % p for a, b in zip(cur, rows[0])]
                rows.append(tuple(cur))
        self._red = rows

    def zero(self):
        return (0,) * self.f

    def one(self):
        return (1,) + (0,) * (self.f - 1)

    def gen(self):
        if self.f == 1:
            return self.one()
        return (0, 1) + (0,) * (self.f - 2)

    def from_int(self, a):
        return (a % self.p,) + (0,) * (self.f - 1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        p, f = self.p, self.f
        if f == 1:
            return ((a[0] * b[0]) % p,)
        conv = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    conv[i + j] += x * y
        res = conv[:f]
        for k in range(f, 2 * f - 1):
            c = conv[k] % p
            if c:
                row = self._red[k - f]
                res = [r + c * s for r, s in zip(res, row)]
        return tuple(r % p for r in res)

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        r = self.one()
        b = a
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    def inv(self, a):
        assert any(a), "division by zero in residue field"
        return self.pow(a, self.q - 2)

    def is_zero(self, a):
        return not any(a)

    def elements(self):
        """Iterate over all q elements (coefficient-lex order)."""
        p, f = self.p, self.f

        def rec(i, cur):
            if i == f:
                yield tuple(cur)
                return
            for c in range(p):
                yield from rec(i + 1, cur + [c])
        yield from rec(0, [])

    def poly_eval(self, coeffs, x):
        """Evaluate a polynomial (list of Fq elements, lowest first)."""
        acc = self.zero()
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def poly_roots(self, coeffs):
        """All roots in F_q of a polynomial with Fq coefficients."""
        if all(self.is_zero(c) for c in coeffs):
            raise ValueError("zero polynomial")
        return sorted(x for x in self.elements()
                      if self.is_zero(self.poly_eval(coeffs, x)))

    def is_square(self, a):
        if not any(a):
            return True
        return self.pow(a, (self.q - 1) // 2) == self.one()

    def sqrt(self, a):
        """Canonical square root (lex-smallest), or None."""
        if not any(a):
            return self.zero()
        best = None
        for x in self.elements():
            if self.mul(x, x) == a:
                if best is None or x < best:
                    best = x
        return best


class PadicField:
    """Q_{p^f} at fixed modulus p^n, with power basis of a monic poly."""

    def __init__(self, p, prec, poly=None, gen_name="g"):
        self.p = p
        self.n = prec
        self.pn = p ** prec
        if poly is None:
            poly = [0, 1]
        self.poly = tuple(int(c) % self.pn for c in poly[:-1]) + (1,)
        self.f = len(self.poly) - 1
        self.gen_name = gen_name
        # x^(f+k) mod poly, coefficients mod p^n, k = 0..f-2
        rows = []
        if self.f > 1:
            cur = [(-c) % self.pn for c in self.poly[:-1]]
            rows.append(tuple(cur))
            for _ in range(self.f - 2):
                lead = cur[-1]
                cur = [0] + cur[:-1]
                cur = [(a + lead * b) % self.pn
                       for a, b in zip(cur, rows[0])]
                rows.append(tuple(cur))
        self._red = rows
        self._resfield = None
        self._frob = None
        self._embeddings = {}

    # ----- element constructors -------------------------------------

    def _make(self, val, unit):
        e = PadicElement.__new__(PadicElement)
        e.K = self
        e.v = val
        e.u = unit
        return e

    def zero(self):
        return self._make(None, (0,) * self.f)

    def one(self):
        return self._make(0, (1,) + (0,) * (self.f - 1))

    def gen(self):
        assert self.f > 1, "prime field has no generator"
        return self._make(0, (0, 1) + (0,) * (self.f - 2))

    def from_vector(self, coeffs, val=0):
        """Element p^val * sum coeffs[i] g^i from raw integer coeffs."""
        return self._normalize(list(coeffs), val)

    def from_int(self, a):
        a = int(a)
        if a == 0:
            return self.zero()
        v = _vp(a, self.p)
        u = (a // self.p ** v) % self.pn
        return self._make(v, (u,) + (0,) * (self.f - 1))

    def from_rational(self, q):
        q = Fraction(q)
        if q == 0:
            return self.zero()
        num, den = q.numerator, q.denominator
        vn = _vp(num, self.p)
        vd = _vp(den, self.p)
        nu = (num // self.p ** vn) % self.pn
        du = (den // self.p ** vd) % self.pn
        u = (nu * pow(du, -1, self.pn)) % self.pn
        return self._make(vn - vd, (u,) + (0,) * (self.f - 1))

    def coerce(self, x):
        if isinstance(x, PadicElement):
            assert x.K is self, "element of a different p-adic field"
            return x
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.from_rational(x)
        raise TypeError(f"cannot coerce {type(x)} into {self}")

    def _normalize(self, coeffs, val):
        coeffs = [c % self.pn for c in coeffs]
        if not any(coeffs):
            return self.zero()
        s = min(_vp(c, self.p) if c else self.n for c in coeffs)
        if s == 0:
            return self._make(val, tuple(coeffs))
        ps = self.p ** s
        return self._make(val + s, tuple(c // ps for c in coeffs))

    # ----- structure -------------------------------------------------

    def residue_field(self):
        if self._resfield is None:
            self._resfield = Fq(self.p, [c % self.p for c in self.poly])
        return self._resfield

    def teichmuller(self, a):
        """Teichmueller lift: the (q-1)-st root of unity with residue a.

        a may be an int, a residue-field tuple, or a unit element.
        Newton iteration on x^(q-1) - 1, quadratically convergent.
        """
        if isinstance(a, PadicElement):
            assert a.v == 0
            x = a
        elif isinstance(a, tuple):
            x = self.from_vector(list(a))
        else:
            a = int(a) % self.p
            if a == 0:
                return self.zero()
            x = self.from_int(a)
        assert x.v == 0, "teichmuller lift needs a unit"
        q1 = self.residue_field().q - 1
        inv_q1 = self.from_int(q1).inv()
        for _ in range(self.n.bit_length() + 4):
            t = x ** q1
            err = t - self.one()
            if err.v is None or err.v >= self.n:
                return x
            x = x - x * err * inv_q1 * t.inv()
        raise ArithmeticError("Teichmuller iteration failed to converge")

    def hensel_root(self, coeffs, seed):
        """Lift a simple residue root of a polynomial by Newton iteration.

        coeffs: polynomial coefficients (anything coercible), lowest
        first.  seed: residue-field tuple or element approximating the
        root.  Requires v(poly(seed)) > 2 v(poly'(seed)) and refines to
        full working precision; asserts the quadratic certificate.
        """
        cs = [self.coerce(c) for c in coeffs]
        ds = [self.coerce(i) * c for i, c in enumerate(cs)][1:]

        def ev(poly, x):
            acc = self.zero()
            for c in reversed(poly):
                acc = acc * x + c
            return acc

        if isinstance(seed, tuple):
            x = self.from_vector(list(seed))
        else:
            x = seed
        fx = ev(cs, x)
        dfx = ev(ds, x)
        assert dfx.v is not None, "derivative vanishes at seed"
        assert fx.v is None or fx.v > 2 * dfx.v, \
            "Hensel certificate fails at seed"
        slack = 2 * dfx.v
        for _ in range(self.n.bit_length() + 4):
            if fx.v is None or fx.v >= self.n + slack:
                return x
            x = x - fx * dfx.inv()
            fx = ev(cs, x)
            dfx = ev(ds, x)
        raise ArithmeticError("Newton iteration failed to converge")

    def sqrt(self, a):
        """Canonical square root of a (odd p, unramified): requires even
        valuation and square residue; the root with lex-smallest residue
        is returned."""
        a = self.coerce(a)
        if a.v is None:
            return self.zero()
        if a.v % 2:
            raise ValueError("square root of odd-valuation element")
        res = self.residue_field()
        r0 = res.sqrt(a.unit_residue())
        if r0 is None:
            raise ValueError("residue is not a square")
        unit = self._make(0, a.u)
        root = self.hensel_root([-unit, self.zero(), self.one()], r0)
        return self._make(root.v + a.v // 2, root.u)

    def exp(self, x):
        """p-adic exponential; requires v(x) >= 1 (p odd).

        Terms past the cutoff have valuation >= k(1 - 1/(p-1)) - O(log k),
        so stopping once v(term) >= n+4 and k >= p loses nothing mod p^n.
        """
        x = self.coerce(x)
        if x.v is None:
            return self.one()
        assert x.v >= 1, "exp needs valuation >= 1"
        acc = self.one()
        term = self.one()
        k = 0
        while True:
            k += 1
            term = term * x * self.from_int(k).inv()
            if term.v is not None:
                acc = acc + term
            if k >= self.p and (term.v is None or term.v >= self.n + 4):
                return acc
            assert k < 8 * self.n + 16, "exp failed to converge"

    def log(self, x):
        """p-adic logarithm of a 1-unit (v(x-1) >= 1)."""
        x = self.coerce(x)
        w = x - self.one()
        if w.v is None:
            return self.zero()
        assert w.v >= 1, "log needs a 1-unit"
        acc = self.zero()
        pw = self.one()
        k = 0
        while True:
            k += 1
            pw = pw * w
            term = pw * self.from_rational(Fraction((-1) ** (k + 1), k))
            if term.v is not None:
                acc = acc + term
            if k >= self.p and (term.v is None or term.v >= self.n + 4):
                return acc
            assert k < 8 * self.n + 16, "log failed to converge"

    def frobenius(self, x, power=1):
        """The canonical lift of the residue Frobenius y -> y^p.

        Computed by substituting for the generator the root of the
        defining polynomial whose residue is (gen mod p)^p.
        """
        power %= self.f
        if power == 0 or x.v is None:
            return x
        if self._frob is None:
            res = self.residue_field()
            target = res.pow(res.gen(), self.p)
            root = self.hensel_root(list(self.poly), target)
            cols = []
            acc = self.one()
            for _ in range(self.f):
                cols.append(acc)
                acc = acc * root
            self._frob = cols
        y = x
        for _ in range(power):
            acc = self.zero()
            for i, c in enumerate(y.u):
                if c:
                    acc = acc + self._frob[i] * self.from_int(c)
            assert acc.v is not None
            y = self._make(acc.v + y.v, acc.u)
        return y

    def conjugates(self, x):
        return [self.frobenius(x, k) for k in range(self.f)]

    def norm(self, x):
        """Norm to Q_p as an element of this field (lies in Q_p)."""
        acc = self.one()
        for c in self.conjugates(x):
            acc = acc * c
        return acc

    def embedding_from(self, sub):
        """Canonical embedding of a subfield (sub.f divides f).

        The generator of `sub` goes to the root of its defining
        polynomial with lex-smallest digit vector; the choice is fixed
        per field pair and cached.
        """
        key = (sub.p, sub.f, sub.poly)
        if key in self._embeddings:
            img = self._embeddings[key]
        else:
            assert sub.p == self.p and self.f % sub.f == 0
            res = self.residue_field()
            rpoly = [res.from_int(c) for c in sub.poly]
            roots = res.poly_roots(rpoly)
            assert roots, "defining polynomial has no root: not a subfield"
            img = self.hensel_root([Fraction(c) for c in sub.poly],
                                   roots[0])
            self._embeddings[key] = img

        def emb(x):
            assert x.K is sub
            if x.v is None:
                return self.zero()
            acc = self.zero()
            pw = self.one()
            for c in x.u:
                if c:
                    acc = acc + pw * self.from_int(c)
                pw = pw * img
            return self._make(acc.v + x.v, acc.u)
        return emb

    def element_from_dict(self, d):
        assert d["p"] == self.p and d["f"] == self.f and d["n"] == self.n
        assert list(d["poly"]) == list(self.poly)
        if d["val"] is None:
            return self.zero()
        coeffs = [0] * self.f
        for i, row in enumerate(d["digits"]):
            for j, a in enumerate(row):
                coeffs[j] += a * self.p ** i
        return self._make(d["val"], tuple(coeffs))

    def __repr__(self):
        if self.f == 1:
            return f"Q_{self.p} (mod {self.p}^{self.n})"
        return (f"Q_{self.p}^({self.f}) = Q_{self.p}[{self.gen_name}]"
                f" (mod {self.p}^{self.n})")


class PadicElement:
    """One element: valuation v (None = zero) and unit vector u."""

    __slots__ = ("K", "v", "u")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        K = self.K
        other = K.coerce(other)
        if self.v is None:
            return other
        if other.v is None:
            return self
        if self.v <= other.v:
            lo, hi = self, other
        else:
            lo, hi = other, self
        shift = hi.v - lo.v
        if shift >= K.n:
            return lo
        ps = K.p ** shift
        coeffs = [a + ps * b for a, b in zip(lo.u, hi.u)]
        return K._normalize(coeffs, lo.v)

    __radd__ = __add__

    def __neg__(self):
        if self.v is None:
            return self
        return self.K._make(self.v, tuple((-c) % self.K.pn for c in self.u))

    def __sub__(self, other):
        return self + (-self.K.coerce(other))

    def __rsub__(self, other):
        return self.K.coerce(other) + (-self)

    def __mul__(self, other):
        K = self.K
        other = K.coerce(other)
        if self.v is None or other.v is None:
            return K.zero()
        p, f, pn = K.p, K.f, K.pn
        if f == 1:
            prod = [(self.u[0] * other.u[0]) % pn]
        else:
            conv = [0] * (2 * f - 1)
            for i, x in enumerate(self.u):
                if x:
                    for j, y in enumerate(other.u):
                        conv[i + j] += x * y
            prod = conv[:f]
            for k in range(f, 2 * f - 1):
                c = conv[k] % pn
                if c:
                    row = K._red[k - f]
                    prod = [r + c * s for r, s in zip(prod, row)]
        return K._normalize(prod, self.v + other.v)

    __rmul__ = __mul__

    def inv(self):
        K = self.K
        assert self.v is not None, "division by zero"
        res = K.residue_field()
        y0 = res.inv(self.unit_residue())
        y = K.from_vector(list(y0))
        unit = K._make(0, self.u)
        one = K.one()
        for _ in range(K.n.bit_length() + 3):
            err = one - unit * y
            if err.v is None or err.v >= K.n:
                break
            y = y + y * err
        else:
            raise ArithmeticError("inverse iteration failed")
        return K._make(y.v - self.v, y.u)

    def __truediv__(self, other):
        return self * self.K.coerce(other).inv()

    def __rtruediv__(self, other):
        return self.K.coerce(other) * self.inv()

    def __pow__(self, e):
        K = self.K
        e = int(e)
        if e == 0:
            return K.one()
        base = self if e > 0 else self.inv()
        e = abs(e)
        r = K.one()
        while e:
            if e & 1:
                r = r * base
            base = base * base if e > 1 else base
            e >>= 1
        return r

    # -- predicates and views -------------------------------------------

    def is_zero(self):
        return self.v is None

    def valuation(self):
        return self.v

    def unit_residue(self):
        """Residue-field image of the unit part."""
        return tuple(c % self.K.p for c in self.u)

    def residue(self):
        """Residue of the element itself (valuation must be >= 0)."""
        if self.v is None:
            return self.K.residue_field().zero()
        assert self.v >= 0, "negative valuation has no residue"
        if self.v > 0:
            return self.K.residue_field().zero()
        return self.unit_residue()

    def eq_mod(self, other, k):
        """Agreement modulo p^k (absolute)."""
        d = self - self.K.coerce(other)
        return d.v is None or d.v >= k

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.K.coerce(other)
        if not isinstance(other, PadicElement):
            return NotImplemented
        return self.K is other.K and self.v == other.v and self.u == other.u

    def __hash__(self):
        return hash((id(self.K), self.v, self.u))

    def digits(self):
        """n x f matrix of base-p digits of the unit part (row i = digit
        of p^i on each basis coordinate)."""
        K = self.K
        out = []
        cs = list(self.u)
        for _ in range(K.n):
            out.append([c % K.p for c in cs])
            cs = [c // K.p for c in cs]
        return out

    def to_dict(self):
        K = self.K
        return {"p": K.p, "f": K.f, "n": K.n, "poly": list(K.poly),
                "val": self.v, "digits": self.digits()}

    def __repr__(self):
        K = self.K
        if self.v is None:
            return f"0 + O({K.p}^{K.n})"
        terms = []
        shown = 0
        for i, row in enumerate(self.digits()):
            if not any(row):
                continue
            parts = []
            for j, a in enumerate(row):
                if a == 0:
                    continue
                if j == 0:
                    parts.append(str(a))
                elif j == 1:
                    parts.append(f"{a}*{K.gen_name}" if a > 1
                                 else K.gen_name)
                else:
                    parts.append(f"{a}*{K.gen_name}^{j}" if a > 1
                                 else f"{K.gen_name}^{j}")
            digit = " + ".join(parts)
            e = i + self.v
            if len(parts) > 1:
                digit = f"({digit})"
            if e == 0:
                terms.append(digit)
            elif e == 1:
                terms.append(f"{digit}*{K.p}")
            else:
                terms.append(f"{digit}*{K.p}^{e}")
            shown += 1
            if shown >= 6:
                terms.append("...")
                break
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O({K.p}^{K.n + self.v})"
