"""CM fixed points, Hecke-corrected divisors, and the Tate
uniformization carrying multiplicative periods to points of the curve.

A curve with multiplicative reduction at p is rigid-analytically the
torus K^x / q^Z.  The parameter q is recovered from the j-invariant by
Newton iteration on the classical expansion j = E4^3 / Delta, points
come from the standard theta quotients on E_q : y^2 + xy = x^3 +
a4(q) x + a6(q), and a final quadratic twist by the ratio of
c-invariants moves them onto the given Weierstrass model."""

from fractions import Fraction

from .cocycles import hecke_cosets
from .integrals import DivisorPair, mobius_transform
from .tree import TreeContext


# -- exact arithmetic in the coefficient field Q(sqrt(delta)) ----------

def _pair(x):
    """Coerce a rational, or an (a, b) pair meaning a + b*sqrt(delta),
    into a normalized pair of Fractions."""
    if isinstance(x, (tuple, list)):
        a, b = x
        return (Fraction(a), Fraction(b))
    return (Fraction(x), Fraction(0))


class CurveOverF:
    """Short Weierstrass curve y^2 = x^3 + a4 x + a6 with coefficients
    in the real quadratic field of discriminant-free radicand delta,
    stored exactly as pairs (rational, coefficient of sqrt(delta))."""

    def __init__(self, a4, a6, delta=5, conductor=None):
        self.delta = int(delta)
        assert self.delta > 1
        r = int(self.delta ** 0.5)
        assert r * r != self.delta, "coefficient field must be quadratic"
        self.a4 = _pair(a4)
        self.a6 = _pair(a6)
        self.conductor = None if conductor is None else int(conductor)
        # c-invariants of the short model and the exact j-invariant
        self.c4 = self._mul(_pair(-48), self.a4)
        self.c6 = self._mul(_pair(-864), self.a6)
        c43 = self._mul(self.c4, self._mul(self.c4, self.c4))
        c62 = self._mul(self.c6, self.c6)
        disc = self._mul(_pair(Fraction(1, 1728)),
                         (c43[0] - c62[0], c43[1] - c62[1]))
        assert disc != (0, 0), "singular Weierstrass equation"
        self.disc = disc
        self.j = self._mul(c43, self._inv(disc))

    def _mul(self, u, v):
        return (u[0] * v[0] + self.delta * u[1] * v[1],
                u[0] * v[1] + u[1] * v[0])

    def _inv(self, u):
        nm = u[0] * u[0] - self.delta * u[1] * u[1]
        assert nm != 0
        return (u[0] / nm, -u[1] / nm)

    def embedding(self, K):
        """(embedding closure, image of sqrt(delta)) into a p-adic
        field, using the field's canonical square root."""
        s = K.sqrt(K.from_int(self.delta))

        def emb(pr):
            return K.from_rational(pr[0]) + K.from_rational(pr[1]) * s

        return emb, s

    def __repr__(self):
        return (f"y^2 = x^3 + ({self.a4[0]}+{self.a4[1]}*sqrt"
                f"{self.delta})x + ({self.a6[0]}+{self.a6[1]}*sqrt"
                f"{self.delta})")


# -- CM fixed points and corrected divisors ----------------------------

def fixed_point(order, emb, K, splitting_prec=None):
    """Fixed point on the p-adic upper half plane of an embedded
    quadratic order: the splitting image M of the embedding generator
    satisfies M (tau, 1)^t ~ (tau, 1)^t, so tau solves
    c tau^2 + (d - a) tau - b = 0.  Both roots are returned, ordered by
    their digit vectors; they are Galois conjugates of each other."""
    W = splitting_prec or K.n + 8
    ctx = TreeContext(order, K.p, work_prec=W)
    m = ctx.iota(emb.image)
    a, b = K.from_int(m[0][0]), K.from_int(m[0][1])
    c, d = K.from_int(m[1][0]), K.from_int(m[1][1])
    if c.is_zero():
        raise ArithmeticError("triangular splitting image: fixed point "
                              "on the boundary, re-seed the splitting")
    disc = (d - a) ** 2 + 4 * b * c
    root = K.sqrt(disc)
    taus = [((a - d) + root) / (2 * c), ((a - d) - root) / (2 * c)]
    taus.sort(key=lambda t: t.digits())
    for t in taus:
        assert K.frobenius(t) != t, "fixed point is rational"
        # eigenvector identity, up to the splitting's working precision
        dv = (mobius_transform(m, t) - t).valuation()
        assert dv is None or dv >= K.n - 2, "embedding does not fix tau"
    return taus[0], taus[1]


class CMDivisor:
    """Conjugate pair of CM fixed points, the basic degree-zero divisor
    of the construction."""

    def __init__(self, emb, tau, taubar):
        assert tau.K is taubar.K
        self.emb = emb
        self.tau = tau
        self.taubar = taubar

    def pair(self):
        return DivisorPair(self.tau, self.taubar)


def hecke_points(graph, ell, z):
    """Images of a boundary point under the degree-ell Hecke
    correspondence: the same coset representatives the edge operator
    uses, acting by fractional linear transformations."""
    ctx = graph.ctx
    assert ctx.W >= z.K.n + 4, \
        "splitting precision too low to transport points faithfully"
    return [mobius_transform(ctx.iota(g.conj()), z)
            for g in hecke_cosets(graph, ell)]


class HodgeDivisor:
    """(ell+1)(tau) - T_ell(tau): degree-zero correction of a single CM
    point by the canonical degree-one class, which integrates to
    (ell + 1 - a_ell) times the point attached to tau."""

    def __init__(self, multiplier, points):
        assert sum(w for w, _ in points) == 0, "correction is not degree zero"
        self.multiplier = multiplier
        self.points = points

    def paired_with(self, other):
        """Match the weighted points of two corrections (at tau and at
        its conjugate) into two-point divisors, term by term."""
        assert self.multiplier == other.multiplier
        out = []
        for (w1, z1), (w2, z2) in zip(self.points, other.points):
            assert w1 == w2
            out.append((w1, DivisorPair(z1, z2)))
        return out


def hodge_correction(graph, z, ell, a_ell):
    """Degree-zero divisor (ell+1)(z) - T_ell(z) as ell + 2 weighted
    points, with the scalar ell + 1 - a_ell the resulting point must be
    divided by.  Requires a rational eigenvalue: an eigenvalue outside
    Z would mix the two period coordinates and needs the full
    endomorphism action, which this path deliberately avoids."""
    if a_ell != int(a_ell):
        raise ValueError("auxiliary eigenvalue must be a rational "
                         "integer; choose ell with a_ell in Z")
    assert ell != graph.ctx.p
    points = [(ell + 1, z)]
    points += [(-1, w) for w in hecke_points(graph, ell, z)]
    return HodgeDivisor(ell + 1 - int(a_ell), points)


# -- classical q-expansions --------------------------------------------

def _divisor_sums(L, k):
    """sigma_k(n) for n < L by sieving over divisors."""
    out = [0] * L
    for dd in range(1, L):
        dk = dd ** k
        for m in range(dd, L, dd):
            out[m] += dk
    return out


def _poly_mul(a, b, L, mod):
    out = [0] * L
    for i, ai in enumerate(a):
        if not ai:
            continue
        for jj, bj in enumerate(b[:L - i]):
            if bj:
                out[i + jj] += ai * bj
    return [c % mod for c in out]


def _eisenstein(L, weight, mod):
    """q-expansion of E_4 (weight 4) or E_6 (weight 6), constant term
    first, reduced mod `mod`."""
    scale = {4: 240, 6: -504}[weight]
    sig = _divisor_sums(L, weight - 1)
    return [1] + [scale * sig[n] % mod for n in range(1, L)]


def _delta_series(L, mod):
    """q-expansion of Delta/q = prod (1 - q^m)^24: the Euler product is
    the pentagonal-number series, raised to the 24th power by
    squarings."""
    eta = [0] * L
    k = 0
    while k * (3 * k - 1) // 2 < L:
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e < L:
                eta[e] = (-1) ** k % mod
        k += 1
    p2 = _poly_mul(eta, eta, L, mod)
    p4 = _poly_mul(p2, p2, L, mod)
    p8 = _poly_mul(p4, p4, L, mod)
    p16 = _poly_mul(p8, p8, L, mod)
    return _poly_mul(p16, p8, L, mod)


def _horner(coeffs, x, K):
    acc = K.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# -- the uniformization ------------------------------------------------

class TateCurve:
    """Rigid-analytic model of a curve with multiplicative reduction,
    plus the quadratic twist identifying its points with the given
    Weierstrass model.

    All series are truncated at L = n + 8 terms: v(q) >= 1, and the
    theta terms at level m carry a factor q^m, so every discarded term
    vanishes mod p^n."""

    def __init__(self, curve, K):
        self.curve = curve
        self.K = K
        p = K.p
        if curve.conductor is not None:
            assert curve.conductor % p == 0 and curve.conductor % (p * p), \
                "conductor is not exactly divisible by p"
        emb, sqrt_delta = curve.embedding(K)
        self.embed = emb
        self.sqrt_delta = sqrt_delta
        self.A = emb(curve.a4)
        self.B = emb(curve.a6)
        j = emb(curve.j)
        if j.valuation() is None or j.valuation() >= 0:
            raise ValueError("integral j-invariant: reduction at p is "
                             "good or additive, no Tate parameter")
        self.j = j
        n, mod = K.n, p ** K.n
        L = n + 8
        self.terms = L
        e4 = _eisenstein(L, 4, mod)
        e6 = _eisenstein(L, 6, mod)
        dl = _delta_series(L, mod)
        # series certificate: E4^3 - E6^2 = 1728 Delta as q-expansions
        lhs = _poly_mul(_poly_mul(e4, e4, L, mod), e4, L, mod)
        rhs = _poly_mul(e6, e6, L, mod)
        for i in range(L - 1):
            got = (lhs[i] - rhs[i]) % mod
            want = 1728 * (dl[i - 1] if i else 0) % mod
            assert got == want, "Eisenstein/Delta expansions disagree"
        self.q = self._solve_parameter(j, e4, dl)
        assert self.q.valuation() == -j.valuation()
        s1 = [0] + _divisor_sums(L, 1)[1:]
        s3 = [0] + _divisor_sums(L, 3)[1:]
        s5 = [0] + _divisor_sums(L, 5)[1:]
        self.s1 = _horner(s1, self.q, K)
        s3v = _horner(s3, self.q, K)
        s5v = _horner(s5, self.q, K)
        self.a4q = -5 * s3v
        self.a6q = -(5 * s3v + 7 * s5v) / 12
        c4q = _horner(e4, self.q, K)
        c6q = -_horner(e6, self.q, K)
        self.c4q, self.c6q = c4q, c6q
        # twist class lambda^2 between the two models of equal j
        d = (emb(curve.c6) * c4q) / (emb(curve.c4) * c6q)
        assert (d * d - emb(curve.c4) / c4q).is_zero(), "twist is not lambda^4"
        assert (d ** 3 - emb(curve.c6) / c6q).is_zero(), "twist is not lambda^6"
        assert d.valuation() % 2 == 0
        self.d = d
        try:
            self.lam = K.sqrt(d)  # the other root flips the sign of y
        except ValueError:
            raise ValueError(
                "twist is not a square over the given field (nonsplit "
                "reduction): pass the unramified quadratic extension"
            ) from None
        # reduction is split exactly when the twist is a square already
        # over the completion generated by the curve's own coefficients
        m = 1
        while any(K.frobenius(t, m) != t for t in (self.A, self.B, self.q)):
            m += 1
            assert m <= K.f
        self.coefficient_degree = m
        self.split = K.frobenius(self.lam, m) == self.lam

    def _solve_parameter(self, j, e4, dl):
        """Newton iteration for j * Delta(q) = E4(q)^3 seeded at 1/j;
        the seed satisfies the Hensel certificate (the residual has
        valuation 1, the derivative valuation -1), so every step at
        least doubles the number of stable digits."""
        K = self.K
        L = self.terms
        delta = [0] + dl[:L - 1]
        ddelta = [(i + 1) * c for i, c in enumerate(delta[1:])]
        de4 = [(i + 1) * c for i, c in enumerate(e4[1:])]
        q = j.inv()
        for _ in range(K.n.bit_length() + 6):
            c = _horner(e4, q, K)
            g = j * _horner(delta, q, K) - c ** 3
            if g.is_zero():
                # re-expanded j-invariant matches the target
                return q
            gp = j * _horner(ddelta, q, K) - 3 * c * c * _horner(de4, q, K)
            q = q - g / gp
        raise ArithmeticError("Newton iteration for the Tate parameter "
                              "did not converge")

    def point_from_parameter(self, u):
        """Image of a parameter u on the given model of E, or None for
        the identity coset q^Z.

        Theta quotients on E_q, with the sum over negative levels
        rewritten through u -> 1/u; then the twist x = d (X + 1/12),
        y = lambda^3 (Y + X/2) renormalizes the completed square onto
        y^2 = x^3 + a4 x + a6."""
        K = self.K
        u = K.coerce(u)
        assert u.valuation() is not None, "zero parameter"
        vq = self.q.valuation()
        shift = u.valuation() // vq
        if shift:
            u = u * self.q ** (-shift)
        assert 0 <= u.valuation() < vq
        if (u - 1).is_zero():
            return None
        # proximity of u to 1 puts the point near the identity and
        # costs digits through the poles of the theta quotient
        loss = (u - 1).valuation()
        uin = u.inv()
        X = u / (1 - u) ** 2 - 2 * self.s1
        Y = u * u / (1 - u) ** 3 + self.s1
        qn = self.K.one()
        for _ in range(self.terms):
            qn = qn * self.q
            t, s = qn * u, qn * uin
            X = X + t / (1 - t) ** 2 + s / (1 - s) ** 2
            Y = Y + t * t / (1 - t) ** 3 - s / (1 - s) ** 3
        slack = 6 * max(loss, 0) + 4
        dv = (Y * Y + X * Y - X ** 3 - self.a4q * X - self.a6q).valuation()
        assert dv is None or dv >= K.n - slack, "point misses E_q"
        x = self.d * (X + Fraction(1, 12))
        y = self.lam ** 3 * (Y + X / 2)
        dv = (y * y - x ** 3 - self.A * x - self.B).valuation()
        assert dv is None or dv >= K.n - slack, "twisted point misses E"
        return (x, y)


def period_candidates(J):
    """Parameter candidates attached to a period J, most plausible
    first: reversing the divisor inverts J, and a degree-two isogeny on
    the torus side would surface as a square root (available only when
    the residue is a square)."""
    out = [("inverse", J.inv()), ("direct", J)]
    K = J.K
    res = K.residue_field()
    for label, val in list(out):
        if val.valuation() % 2 == 0 and res.is_square(val.unit_residue()):
            r = K.sqrt(val)
            out.append(("sqrt-" + label, r))
            out.append(("negated-sqrt-" + label, -r))
    return out


# -- chord-tangent arithmetic over the p-adic field --------------------

def curve_negate(P):
    return None if P is None else (P[0], -P[1])


def curve_add(A, P, Q):
    """Addition on y^2 = x^3 + A x + B with None as identity; equality
    tests are at the working modulus of the field (B never enters)."""
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if (x1 - x2).is_zero():
        if (y1 + y2).is_zero():
            return None
        num, den = 3 * x1 * x1 + A, 2 * y1
    else:
        num, den = y2 - y1, x2 - x1
    lam = num / den
    x3 = lam * lam - x1 - x2
    return (x3, lam * (x1 - x3) - y1)


def curve_multiple(A, m, P):
    """m-fold multiple by double-and-add."""
    if m < 0:
        return curve_multiple(A, -m, curve_negate(P))
    out, base = None, P
    while m:
        if m & 1:
            out = curve_add(A, out, base)
        base = curve_add(A, base, base)
        m >>= 1
    return out
