"""Recognition of p-adic coordinates as exact algebraic numbers.

The lattice side: LLL on digit-vector lattices recovers integer
minimal polynomials (algdep) and exact rational coordinates relative
to a pinned number-field tower (identify_in_tower).  The exact side:
arithmetic in the tower F = Q(sqrt(delta)) < F(theta), the Galois
trace of the curve point down to the ATR subfield M = F(sqrt(alpha))
by the chord-tangent law, and the non-torsion check.  Everything
accepted is certified: irreducibility over Q, residuals re-evaluated
at full precision, re-embedding of identified elements, and exact
on-curve identities in the number field.  All functions are pure, so
the x- and y-recognitions can run in parallel.
"""

import math
from fractions import Fraction

import sympy
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from .tatecurve import _pair, curve_add

# Lattice reduction quality and the certification margin, in digits,
# kept below the junk line p^(f n' / (d+1)) where meaningless short
# vectors start to appear.  Both fixed by design.
LLL_DELTA = Fraction(99, 100)
CERT_MARGIN = 6

# Uniform torsion cap used when excluding torsion over quartic fields
# (the largest group orders reached over quartic fields stay at or
# below 24); configurable per call.
TORSION_CAP_QUARTIC = 24


# -- exact arithmetic in F = Q(sqrt(delta)): elements are pairs ---------

def _fadd(u, v):
    return (u[0] + v[0], u[1] + v[1])


def _fsub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def _fneg(u):
    return (-u[0], -u[1])


def _fmul(u, v, delta):
    return (u[0] * v[0] + delta * u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def _finv(u, delta):
    nm = u[0] * u[0] - delta * u[1] * u[1]
    if nm == 0:
        raise ZeroDivisionError("not invertible in the quadratic field")
    return (u[0] / nm, -u[1] / nm)


def _real_value(u, delta):
    # archimedean size under the real embedding sqrt(delta) > 0; only
    # used to normalize presentation signs, never for arithmetic
    return float(u[0]) + float(u[1]) * math.sqrt(delta)


def _pair_str(u, name):
    a, b = u
    if b == 0:
        return str(a)
    den = a.denominator * b.denominator // math.gcd(a.denominator,
                                                    b.denominator)
    na, nb = a * den, b * den
    lead = "%d*%s" % (nb, name) if abs(nb) != 1 else ("-" + name
                                                      if nb < 0 else name)
    tail = "" if na == 0 else (" + %d" % na if na > 0 else " - %d" % -na)
    body = lead + tail
    return body if den == 1 else "(%s)/%d" % (body, den)


# -- the tower F(theta) --------------------------------------------------

def _pdivmod(a, b, delta):
    """Quotient and remainder in F[T]; coefficient lists of pairs."""
    r = list(a)
    q = [(Fraction(0), Fraction(0))] * max(1, len(a) - len(b) + 1)
    lb = _finv(b[-1], delta)
    while len(r) >= len(b) and any(c != (0, 0) for c in r):
        if r[-1] == (Fraction(0), Fraction(0)):
            r.pop()
            continue
        k = len(r) - len(b)
        c = _fmul(r[-1], lb, delta)
        q[k] = _fadd(q[k], c)
        for i, bc in enumerate(b):
            r[k + i] = _fsub(r[k + i], _fmul(c, bc, delta))
        r.pop()
    return q, r


class TowerField:
    """Extension F(theta) of F = Q(sqrt(delta)) cut out by a monic
    polynomial with F-coefficients; elements are coefficient vectors in
    the theta-power basis over F, and inversion runs the extended
    Euclid against the minimal polynomial."""

    def __init__(self, minpoly, delta=5):
        mp = [_pair(c) for c in minpoly]
        assert len(mp) >= 3, "tower must be a genuine extension"
        assert mp[-1] == (Fraction(1), Fraction(0)), "minimal poly monic"
        self.delta = int(delta)
        self.minpoly = tuple(mp)
        self.deg = len(mp) - 1
        # irreducibility over F (not merely over Q) is what makes the
        # quotient a field; a reducible modulus would let arithmetic
        # proceed in a product ring and corrupt every certificate
        s = sympy.sqrt(self.delta)
        T = sympy.Symbol("T")
        poly = sum((sympy.Rational(a.numerator, a.denominator)
                    + sympy.Rational(b.numerator, b.denominator) * s)
                   * T ** k for k, (a, b) in enumerate(mp))
        _, fl = sympy.factor_list(poly, T, extension=s)
        assert sum(e for _, e in fl) == 1, \
            "minimal polynomial must be irreducible over the base field"

    def element(self, coeffs):
        cs = [_pair(c) for c in coeffs]
        assert len(cs) <= self.deg
        cs += [(Fraction(0), Fraction(0))] * (self.deg - len(cs))
        return TowerElement(self, tuple(cs))

    def zero(self):
        return self.element([])

    def one(self):
        return self.element([1])

    def gen(self):
        return self.element([0, 1])

    def from_pair(self, u):
        return self.element([_pair(u)])

    def from_rational(self, r):
        return self.element([Fraction(r)])

    def from_vector(self, rats):
        """Element from 2*deg rationals, ordered (rational part,
        sqrt(delta) part) per theta-power."""
        assert len(rats) == 2 * self.deg
        return self.element([(Fraction(rats[2 * i]), Fraction(rats[2 * i + 1]))
                             for i in range(self.deg)])


class TowerElement:
    __slots__ = ("T", "c")

    def __init__(self, T, c):
        self.T = T
        self.c = c

    def _lift(self, other):
        if isinstance(other, TowerElement):
            assert other.T is self.T
            return other
        if isinstance(other, (int, Fraction)):
            return self.T.from_rational(other)
        if isinstance(other, tuple) and len(other) == 2:
            return self.T.from_pair(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return TowerElement(self.T, tuple(_fadd(a, b)
                                          for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return TowerElement(self.T, tuple(_fsub(a, b)
                                          for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TowerElement(self.T, tuple(_fneg(a) for a in self.c))

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        T, d = self.T, self.T.deg
        prod = [(Fraction(0), Fraction(0))] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if a == (0, 0):
                continue
            for j, b in enumerate(o.c):
                if b != (0, 0):
                    prod[i + j] = _fadd(prod[i + j], _fmul(a, b, T.delta))
        # fold down by the monic minimal polynomial
        for k in range(2 * d - 2, d - 1, -1):
            top = prod[k]
            if top == (0, 0):
                continue
            for i in range(d):
                prod[k - d + i] = _fsub(prod[k - d + i],
                                        _fmul(top, T.minpoly[i], T.delta))
        return TowerElement(T, tuple(prod[:d]))

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("zero in the tower")
        T = self.T
        # extended Euclid: maintain t*self = r modulo the minimal poly
        r0, t0 = list(T.minpoly), [(Fraction(0), Fraction(0))]
        r1 = [c for c in self.c]
        while r1 and r1[-1] == (Fraction(0), Fraction(0)):
            r1.pop()
        t1 = [(Fraction(1), Fraction(0))]
        while len(r1) > 1:
            q, r = _pdivmod(r0, r1, T.delta)
            while r and r[-1] == (Fraction(0), Fraction(0)):
                r.pop()
            # t_new = t0 - q*t1
            qt = [(Fraction(0), Fraction(0))] * (len(q) + len(t1) - 1)
            for i, qc in enumerate(q):
                if qc == (0, 0):
                    continue
                for j, tc in enumerate(t1):
                    qt[i + j] = _fadd(qt[i + j], _fmul(qc, tc, T.delta))
            tn = [_fsub(a, b) for a, b in
                  zip(t0 + [(Fraction(0), Fraction(0))] * len(qt), qt +
                      [(Fraction(0), Fraction(0))] * len(t0))]
            r0, t0, r1, t1 = r1, t1, r, tn
            if not r1:
                raise ZeroDivisionError("minimal polynomial not coprime")
        unit = _finv(r1[0], T.delta)
        out = [_fmul(c, unit, T.delta) for c in t1][:T.deg]
        out += [(Fraction(0), Fraction(0))] * (T.deg - len(out))
        return TowerElement(T, tuple(out))

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        out, base = self.T.one(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        return o is not None and self.c == o.c

    def __hash__(self):
        return hash((id(self.T), self.c))

    def is_zero(self):
        return all(u == (0, 0) for u in self.c)

    def at(self, root):
        """Evaluate the coefficient vector at another tower element:
        the ring map theta -> root (a field automorphism when root is
        a conjugate of theta)."""
        acc = self.T.zero()
        for u in reversed(self.c):
            acc = acc * root + self.T.from_pair(u)
        return acc

    def __repr__(self):
        names = ["", "*theta"] + ["*theta^%d" % i
                                  for i in range(2, self.T.deg)]
        parts = [("(%s)%s" % (_pair_str(u, "sqrt%d" % self.T.delta), nm))
                 for u, nm in zip(self.c, names) if u != (0, 0)]
        return " + ".join(parts) if parts else "0"


# -- pinned p-adic embeddings of the tower -------------------------------

class Tower:
    """A number-field tower with a pinned p-adic embedding: the exact
    side (F alone, or a TowerField over F) together with the images of
    its Q-power-basis in the witness field.  The generator images are
    fixed once and recorded; identify_in_tower solves digit lattices
    against this basis."""

    def __init__(self, K, field=None, theta_image=None, delta=5,
                 sqrt_delta_image=None):
        self.K = K
        self.field = field
        self.delta = delta if field is None else field.delta
        w = sqrt_delta_image
        if w is None:
            w = K.sqrt(K.from_int(self.delta))
        assert w * w == K.from_int(self.delta)
        self.sqrt_delta_image = w
        if field is None:
            assert theta_image is None
            self.theta_image = None
            self.basis = [K.one(), w]
            self.labels = ["1", "sqrt%d" % self.delta]
        else:
            assert theta_image is not None and theta_image.K is K
            self.theta_image = theta_image
            # the pinned embedding must kill the minimal polynomial
            acc = K.zero()
            for u in reversed(field.minpoly):
                acc = acc * theta_image + self.embed_pair(u)
            dv = acc.valuation()
            assert dv is None or dv >= K.n - 2, \
                "theta image is not a root of the minimal polynomial"
            self.basis, self.labels = [], []
            pw = K.one()
            for i in range(field.deg):
                self.basis.append(pw)
                self.basis.append(pw * w)
                nm = ("theta" if i == 1 else "theta^%d" % i) if i else ""
                self.labels.append(nm or "1")
                self.labels.append("sqrt%d%s" % (self.delta,
                                                 "*" + nm if nm else ""))
                pw = pw * theta_image
        self.degree = len(self.basis)

    def embed_pair(self, u):
        a, b = _pair(u)
        return (self.K.from_rational(a)
                + self.sqrt_delta_image * self.K.from_rational(b))

    def embed(self, exact):
        """p-adic image of an exact element (rational, pair, or tower
        element) under the pinned embedding."""
        if isinstance(exact, TowerElement):
            assert exact.T is self.field
            acc = self.K.zero()
            for u in reversed(exact.c):
                acc = acc * self.theta_image + self.embed_pair(u)
            return acc
        return self.embed_pair(exact)

    def assemble(self, rats):
        """Exact element from rational coordinates along the basis."""
        assert len(rats) == self.degree
        if self.field is None:
            return (Fraction(rats[0]), Fraction(rats[1]))
        return self.field.from_vector(rats)


# -- digit-vector lattices ------------------------------------------------

def _integral_vectors(elems, nprime):
    K = elems[0].K
    pn = K.p ** nprime
    rows = []
    for x in elems:
        assert x.K is K
        if x.v is None:
            rows.append([0] * K.f)
        else:
            assert x.v >= 0, "integral elements required"
            pv = K.p ** x.v
            rows.append([(c * pv) % pn for c in x.u])
    return rows


def _relation_candidates(elems, nprime):
    """Integer relations sum m_i elems_i = 0 mod p^nprime, by LLL on
    the lattice spanned by {(e_i | digits_i)} and {(0 | p^nprime e_j)};
    exact relations reduce to vectors with zero right block.  Returned
    sorted by (norm, coefficient height, lex)."""
    K = elems[0].K
    assert 1 <= nprime <= K.n
    t, f = len(elems), K.f
    digits = _integral_vectors(elems, nprime)
    pn = K.p ** nprime
    # the congruence block is weighted by p^nprime so that any vector
    # with a nonzero residual outweighs every honest relation
    rows = [[int(i == j) for j in range(t)] + [pn * c for c in digits[i]]
            for i in range(t)]
    rows += [[0] * t + [pn * pn if jj == j else 0 for jj in range(f)]
             for j in range(f)]
    M = DomainMatrix([[ZZ(c) for c in r] for r in rows], (t + f, t + f), ZZ)
    red = M.lll(delta=QQ(LLL_DELTA.numerator, LLL_DELTA.denominator))
    cands = []
    for row in red.to_Matrix().tolist():
        a = [int(c) for c in row[:t]]
        if any(a) and not any(int(c) for c in row[t:]):
            if next(c for c in reversed(a) if c) < 0:
                a = [-c for c in a]
            cands.append((sum(c * c for c in a), max(abs(c) for c in a),
                          tuple(a)))
    cands.sort()
    return [list(a) for _, _, a in cands]


# -- algdep ---------------------------------------------------------------

class AlgebraicGuess:
    """Integer polynomial certified against a p-adic witness: content
    one, positive leading coefficient, irreducible over Q; residual
    valuation is v_p of the polynomial at the witness, at the witness's
    full precision (None means it vanished to the working modulus)."""

    __slots__ = ("coeffs", "degree", "height", "residual_valuation")

    def __init__(self, coeffs, residual_valuation):
        self.coeffs = tuple(int(c) for c in coeffs)
        assert self.coeffs[-1] > 0
        self.degree = len(self.coeffs) - 1
        self.height = max(abs(c) for c in self.coeffs)
        self.residual_valuation = residual_valuation

    def eval_at(self, x):
        K = x.K
        acc = K.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + K.from_int(c)
        return acc

    def sympy_poly(self):
        return sympy.Poly(list(reversed(self.coeffs)), sympy.Symbol("T"))

    def __eq__(self, other):
        return (isinstance(other, AlgebraicGuess)
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "AlgebraicGuess(%s)" % " + ".join(
            "%d*T^%d" % (c, k) for k, c in enumerate(self.coeffs) if c)


def _normalized_int_polys(avec):
    """Primitive, positively-led irreducible factors of the integer
    polynomial with ascending coefficients avec (degree >= 1 only)."""
    cs = list(avec)
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) < 2:
        return []
    g = 0
    for c in cs:
        g = math.gcd(g, abs(c))
    cs = [c // g for c in cs]
    if cs[-1] < 0:
        cs = [-c for c in cs]
    poly = sympy.Poly(list(reversed(cs)), sympy.Symbol("T"))
    out = []
    for fac, _ in poly.factor_list()[1]:
        fc = [int(c) for c in reversed(fac.all_coeffs())]
        if len(fc) < 2:
            continue
        if fc[-1] < 0:
            fc = [-c for c in fc]
        out.append(fc)
    return out


def algdep(x, degree, precision_used=None, height_bound=None):
    """Minimal integer polynomial of a p-adic element, by lattice
    reduction on the rows {p^n', x^0, ..., x^d} over the f-dimensional
    digit coordinates.

    Certification: candidates are irreducible over Q, primitive with
    positive leading coefficient, their residual at the witness's full
    precision is re-checked, and the coefficient height must sit at
    least CERT_MARGIN digits below the junk line p^(f n'/(d+1)) where
    arithmetically meaningless short vectors live.  Returns None ("no
    guess") when nothing certifies — never a junk polynomial.

    When height_bound is supplied, the information requirement
    f*n' >= (d+1)*(log_p height_bound + CERT_MARGIN) is enforced up
    front and its violation raises the increase-n diagnostic."""
    K = x.K
    nprime = K.n if precision_used is None else int(precision_used)
    assert 1 <= nprime <= K.n
    d = int(degree)
    assert d >= 1
    if height_bound is not None:
        need = (d + 1) * (math.log(height_bound, K.p) + CERT_MARGIN)
        if K.f * nprime < need:
            raise ValueError(
                "insufficient precision for degree %d at height %g: "
                "increase n to at least %d digits (have %d)"
                % (d, height_bound, math.ceil(need / K.f), nprime))
    if x.v is None:
        return AlgebraicGuess((0, 1), None)
    shift = max(0, -x.v)
    z = x * K.from_int(K.p) ** shift if shift else x
    powers = [K.one()]
    for _ in range(d):
        powers.append(powers[-1] * z)
    junk_line = Fraction(K.f * nprime, d + 1)
    best = None
    for avec in _relation_candidates(powers, nprime)[:8]:
        if shift:
            # relation in z = p^shift x transforms back by scaling
            avec = [c * K.p ** (shift * k) for k, c in enumerate(avec)]
        for fc in _normalized_int_polys(avec):
            h = max(abs(c) for c in fc)
            if math.log(h, K.p) > junk_line - CERT_MARGIN:
                continue
            guess = AlgebraicGuess(fc, None)
            rv = guess.eval_at(x).valuation()
            if rv is not None and rv < K.n - 2:
                continue
            guess = AlgebraicGuess(fc, rv)
            key = (guess.degree, guess.height, guess.coeffs)
            if best is None or key < (best.degree, best.height, best.coeffs):
                best = guess
    return best


# -- identify_in_tower ----------------------------------------------------

def identify_in_tower(x, tower, denominator_bound=10 ** 12,
                      precision_used=None):
    """Exact rational coordinates of x along the tower's power basis,
    matching mod p^n', by integer linear algebra on digit vectors with
    a denominator bound; the result is verified by re-embedding.
    Raises ValueError('not in tower at this precision') on failure."""
    K = tower.K
    assert x.K is K
    nprime = K.n if precision_used is None else int(precision_used)
    shift = 0 if x.v is None else max(0, -x.v)
    z = x * K.from_int(K.p) ** shift if shift else x
    scale = Fraction(1, K.p ** shift)
    # meaningless relations exist at height ~ p^(f n'/t); anything that
    # close to the junk line is indistinguishable from noise
    junk_line = Fraction(K.f * nprime, 1 + len(tower.basis))
    for avec in _relation_candidates([z] + tower.basis, nprime)[:8]:
        m0 = avec[0]
        if m0 == 0 or abs(m0) > denominator_bound:
            continue
        h = max(abs(c) for c in avec)
        if h > 1 and math.log(h, K.p) > junk_line - CERT_MARGIN:
            continue
        exact = tower.assemble([Fraction(-c, m0) * scale
                                for c in avec[1:]])
        dv = (tower.embed(exact) - x).valuation()
        if dv is None or dv >= nprime - 2:
            return exact
    raise ValueError("not in tower at this precision (%d digits)" % nprime)


# -- tower construction from a recognized polynomial ----------------------

def _sympy_pair(expr, delta):
    """(rational, sqrt(delta) coefficient) of a sympy field element."""
    s = sympy.sqrt(delta)
    conj = expr.subs(s, -s)
    a = sympy.Rational(sympy.expand((expr + conj) / 2))
    b = sympy.Rational(sympy.expand((expr - conj) / (2 * s)))
    return (Fraction(a.p, a.q), Fraction(b.p, b.q))


def build_quartic_tower(int_coeffs, K, y_witness, delta=5):
    """Factor an integer polynomial over F = Q(sqrt(delta)), select the
    factor that the p-adic witness satisfies under the canonical
    sqrt(delta) embedding, and pin the tower F(theta), theta mapped to
    the witness.  Both factors are attempted; the consistent one is
    selected and the attempt is reported.  Returns (tower, report)."""
    T = sympy.Symbol("T")
    s5 = sympy.sqrt(delta)
    poly = sum(int(c) * T ** k for k, c in enumerate(int_coeffs))
    _, fl = sympy.factor_list(poly, T, extension=s5)
    assert all(e == 1 for _, e in fl), "squarefree input expected"
    factors = []
    for f, _ in fl:
        cs = sympy.Poly(f, T, extension=s5).all_coeffs()
        lead = cs[0]
        pairs = [_sympy_pair(sympy.expand(c / lead), delta)
                 for c in reversed(cs)]
        factors.append(pairs)
    w = K.sqrt(K.from_int(delta))
    residuals, hits = [], []
    for pairs in factors:
        acc = K.zero()
        for u in reversed(pairs):
            a, b = u
            acc = acc * y_witness + (K.from_rational(a)
                                     + w * K.from_rational(b))
        rv = acc.valuation()
        residuals.append(rv)
        hits.append(rv is None or rv >= K.n - 2)
    assert hits.count(True) == 1, \
        "exactly one factor must vanish at the witness"
    k = hits.index(True)
    field = TowerField(factors[k], delta=delta)
    tower = Tower(K, field=field, theta_image=y_witness,
                  sqrt_delta_image=w)
    report = {
        "selected_factor": [[str(a), str(b)] for a, b in factors[k]],
        "rejected_factors": [[[str(a), str(b)] for a, b in pairs]
                             for i, pairs in enumerate(factors) if i != k],
        "selected_residual": "exact" if residuals[k] is None
                             else residuals[k],
        "rejected_residuals": [residuals[i] for i in range(len(factors))
                               if i != k],
    }
    return tower, report


def roots_in_tower(tower, poly_pairs):
    """All roots, inside the tower, of a monic polynomial with
    F-coefficients: simple residue roots are Hensel-lifted in the
    p-adic witness field and identified exactly; each identified root
    is certified by exact evaluation in the tower.  p-adic roots that
    do not come from the tower (the witness field may realize
    conjugates the tower misses) are skipped."""
    K = tower.K
    field = tower.field
    coeffs_p = [tower.embed_pair(u) for u in poly_pairs]
    res = K.residue_field()

    def red(c):
        if c.v is None or c.v > 0:
            return res.zero()
        return c.unit_residue()

    seeds = res.poly_roots([red(c) for c in coeffs_p])
    out = []
    for seed in seeds:
        r = K.hensel_root(coeffs_p, seed)
        try:
            exact = identify_in_tower(r, tower)
        except ValueError:
            continue
        acc = field.zero()
        for u in reversed(poly_pairs):
            acc = acc * exact + field.from_pair(u)
        assert acc.is_zero(), "identified root fails exact evaluation"
        out.append(exact)
    assert len(set(out)) == len(out)
    return out


def sqrt_in_tower(tower, alpha):
    """Exact square root of the F-element alpha inside the tower: the
    canonical p-adic root is identified and certified (s*s == alpha
    exactly)."""
    pair = _pair(alpha)
    s = identify_in_tower(tower.K.sqrt(tower.embed_pair(pair)), tower)
    assert (s * s - pair).is_zero()
    return s


# -- the recognized point and the trace to M ------------------------------

class ATRField:
    """Target field M = F(sqrt(alpha)): alpha in F, with names for the
    two generators used when rendering coordinates."""

    def __init__(self, alpha, delta=5, alpha_name="sqrt_alpha"):
        self.alpha = _pair(alpha)
        self.delta = int(delta)
        self.alpha_name = alpha_name
        self.delta_name = "sqrt%d" % self.delta


def _on_curve(field, curve, x, y):
    a4 = field.from_pair(curve.a4)
    a6 = field.from_pair(curve.a6)
    return (y * y - (x * x * x + a4 * x + a6)).is_zero()


class RecognizedPoint:
    """Exact point on the curve over the tower, with the p-adic
    witnesses that produced it and the normalization provenance.
    Coordinates None mean the identity.  When the point is defined over
    M = F(sqrt(alpha)), m_form holds ((x0, x1), (y0, y1), target) with
    x = x0 + x1*sqrt(alpha) and likewise for y, coefficients in F."""

    __slots__ = ("field", "x", "y", "curve", "witnesses", "m_form",
                 "provenance")

    def __init__(self, field, x, y, curve, witnesses=None, m_form=None,
                 provenance=None):
        self.field = field
        self.x, self.y = x, y
        self.curve = curve
        self.witnesses = witnesses
        self.m_form = m_form
        self.provenance = dict(provenance or {})
        if x is not None:
            assert _on_curve(field, curve, x, y), \
                "point must satisfy the Weierstrass equation exactly"

    def is_identity(self):
        return self.x is None

    def verify_embedding(self, tower, slack=2):
        """The pinned embedding of the exact coordinates reproduces the
        p-adic witnesses to full precision minus slack."""
        assert self.witnesses is not None and tower.field is self.field
        for exact, wit in zip((self.x, self.y), self.witnesses):
            dv = (tower.embed(exact) - wit).valuation()
            if dv is not None and dv < tower.K.n - slack:
                return False
        return True

    def _coord_strings(self):
        if self.is_identity():
            return ["identity", "identity"]
        if self.m_form is not None:
            (x0, x1), (y0, y1), tgt = self.m_form
            out = []
            zero = (Fraction(0), Fraction(0))
            for c0, c1 in ((x0, x1), (y0, y1)):
                parts = []
                if c0 != zero or c1 == zero:
                    parts.append(_pair_str(c0, tgt.delta_name))
                if c1 != zero:
                    parts.append("(%s)*%s" % (_pair_str(c1, tgt.delta_name),
                                              tgt.alpha_name))
                out.append(" + ".join(parts))
            return out
        return [repr(self.x), repr(self.y)]

    def to_json(self):
        xs, ys = self._coord_strings()
        return {
            "x": xs,
            "y": ys,
            "curve": {"a4": _pair_str(self.curve.a4, "sqrt5"),
                      "a6": _pair_str(self.curve.a6, "sqrt5")},
            "on_curve": not self.is_identity(),
            "provenance": self.provenance,
        }

    def __repr__(self):
        xs, ys = self._coord_strings()
        return "RecognizedPoint(%s, %s)" % (xs, ys)


def _m_coordinates(z, s):
    """Write z = u + v*s with u, v in F, or return None when z is not
    in the quadratic subfield F(s) of the tower."""
    T = z.T
    zero = (Fraction(0), Fraction(0))
    v = None
    for i in range(1, T.deg):
        if s.c[i] != zero:
            v = _fmul(z.c[i], _finv(s.c[i], T.delta), T.delta)
            break
    assert v is not None, "s must not lie in F"
    u = _fsub(z.c[0], _fmul(v, s.c[0], T.delta))
    if (T.from_pair(u) + T.from_pair(v) * s) == z:
        return u, v
    return None


def trace_and_assemble(pt, tower, target, curve):
    """Group-law sum of a point of E over the tower and its conjugate
    under the nontrivial automorphism of tower/M, M = F(sqrt(alpha)):
    the trace down to the ATR field, computed exactly.  Verifies the
    conjugate and the sum on the curve, Galois-stability of the result,
    and the p-adic dual route (the chord-tangent law run on the
    embedded witnesses); returns the point over M with its coordinates
    split along {1, sqrt(alpha)}."""
    field = tower.field
    x1, y1 = pt
    assert _on_curve(field, curve, x1, y1), "input point must lie on E"
    s = sqrt_in_tower(tower, target.alpha)
    roots = roots_in_tower(tower, list(field.minpoly))
    gen = field.gen()
    fixers = [r for r in roots if r != gen and s.at(r) == s]
    assert len(fixers) == 1, \
        "exactly one nontrivial automorphism fixes sqrt(alpha)"
    r = fixers[0]
    assert r.at(r) == gen, "the automorphism must be an involution"
    x2, y2 = x1.at(r), y1.at(r)
    if not _on_curve(field, curve, x2, y2):
        raise ArithmeticError(
            "conjugate point fails the curve equation: embedding "
            "bookkeeping bug")
    A = field.from_pair(curve.a4)
    tot = curve_add(A, (x1, y1), (x2, y2))
    if tot is None:
        raise ArithmeticError("trace collapses to the identity")
    xM, yM = tot
    assert xM.at(r) == xM and yM.at(r) == yM, "trace must be Galois-stable"
    xd = _m_coordinates(xM, s)
    yd = _m_coordinates(yM, s)
    assert xd is not None and yd is not None, \
        "trace coordinates must land in M"
    flipped = False
    if yd[1] != (Fraction(0), Fraction(0)) \
            and _real_value(yd[1], field.delta) < 0:
        # presentation choice only: pick the generator sqrt(alpha) that
        # makes the y-coefficient positive in the real embedding
        s = -s
        xd = (xd[0], _fneg(xd[1]))
        yd = (yd[0], _fneg(yd[1]))
        flipped = True
    # dual route: the same trace through the p-adic group law
    K = tower.K
    wit = curve_add(tower.embed_pair(curve.a4),
                    (tower.embed(x1), tower.embed(y1)),
                    (tower.embed(x2), tower.embed(y2)))
    for exact, w in zip(tot, wit):
        dv = (tower.embed(exact) - w).valuation()
        assert dv is None or dv >= K.n - 6, \
            "exact and p-adic group laws disagree"
    return RecognizedPoint(
        field, xM, yM, curve, witnesses=wit,
        m_form=(xd, yd, target),
        provenance={"sqrt_alpha_normalized": flipped,
                    "automorphism_root": repr(r)})


def verify_nontorsion(pt, bound=TORSION_CAP_QUARTIC):
    """True iff n*pt is never the identity for 1 <= n <= bound; the
    default bound is the uniform quartic-field torsion cap configured
    for the artifact."""
    if pt.is_identity():
        return False
    A = pt.x.T.from_pair(pt.curve.a4)
    cur, P = None, (pt.x, pt.y)
    for _ in range(int(bound)):
        cur = curve_add(A, cur, P)
        if cur is None:
            return False
    return True
