"""Definite rational quaternion algebras, their Eichler orders, and
normalized optimal embeddings of quadratic orders.

Elements are exact rational 4-vectors on the basis (1, i, j, k) with
i^2 = a, j^2 = b, ij = -ji = k.  Enumeration by reduced norm (with an
optional trace constraint) runs complete Fincke-Pohst on the norm-form
Gram matrix, which is positive definite exactly when the algebra is
definite.  Local splittings into 2x2 matrices are produced by square
roots when either generator is a local square, and otherwise from a
solution of the norm equation u^2 - a v^2 = b in the residue field.
"""

from fractions import Fraction
from math import gcd

import sympy

from . import zlattice
from .quadratic import kronecker


def _v2(n):
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v, n


def hilbert_symbol(a, b, place):
    """Hilbert symbol (a, b) at a finite prime or the string "oo"."""
    a, b = Fraction(a), Fraction(b)
    assert a != 0 and b != 0
    if place == "oo":
        return -1 if a < 0 and b < 0 else 1
    p = int(place)
    if p == 2:
        va, ua = _v2(Fraction(a).numerator * Fraction(a).denominator)
        vb, ub = _v2(Fraction(b).numerator * Fraction(b).denominator)
        eps = ((ua - 1) // 2) * ((ub - 1) // 2)
        omega_a = (ua * ua - 1) // 8
        omega_b = (ub * ub - 1) // 8
        e = eps + va * omega_b + vb * omega_a
        return -1 if e % 2 else 1
    # odd p
    na = a.numerator * a.denominator
    nb = b.numerator * b.denominator
    va = sympy.multiplicity(p, na)
    vb = sympy.multiplicity(p, nb)
    ua = na // p ** va
    ub = nb // p ** vb
    e = va * vb * ((p - 1) // 2)
    s = (-1) ** e
    if vb % 2:
        s *= kronecker(ua, p)
    if va % 2:
        s *= kronecker(ub, p)
    return s


def ramified_places(a, b):
    """Finite ramification set of the quaternion algebra (a, b),
    plus "oo" if definite."""
    a, b = Fraction(a), Fraction(b)
    primes = {2}
    for x in (a.numerator, a.denominator, b.numerator, b.denominator):
        primes.update(sympy.factorint(abs(x)))
    out = [p for p in sorted(primes) if hilbert_symbol(a, b, p) == -1]
    if hilbert_symbol(a, b, "oo") == -1:
        out.append("oo")
    return out


def make_algebra(N_minus, p):
    """Smallest (a, b) whose ramification set is exactly
    {ell | N_minus, ell != p} and infinity."""
    target = [ell for ell in sorted(sympy.factorint(N_minus)) if ell != p]
    if len(target) % 2 == 0:
        raise ValueError("ramification set must have odd finite size "
                         "to pair with the infinite place")
    want = target + ["oo"]
    for h in range(2, 80):
        for a in range(-h + 1, h):
            if a == 0:
                continue
            for b in (abs(a) - h, h - abs(a)):
                if ramified_places(a, b) == want:
                    return QuaternionAlgebra(a, b)
    raise ArithmeticError("no small algebra found")


class QuaternionAlgebra:
    def __init__(self, a, b):
        self.a = Fraction(a)
        self.b = Fraction(b)
        assert self.a != 0 and self.b != 0

    def elt(self, t, x=0, y=0, z=0):
        return QuatElt(self, Fraction(t), Fraction(x), Fraction(y),
                       Fraction(z))

    def zero(self):
        return self.elt(0)

    def one(self):
        return self.elt(1)

    def gens(self):
        return (self.elt(0, 1), self.elt(0, 0, 1), self.elt(0, 0, 0, 1))

    def ramified(self):
        return ramified_places(self.a, self.b)

    def is_definite(self):
        return self.a < 0 and self.b < 0

    def __repr__(self):
        return f"B({self.a},{self.b})"


class QuatElt:
    __slots__ = ("B", "c")

    def __init__(self, B, t, x, y, z):
        self.B = B
        self.c = (t, x, y, z)

    def __add__(self, other):
        other = _coerce(self.B, other)
        return QuatElt(self.B, *(p + q for p, q in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return QuatElt(self.B, *(-p for p in self.c))

    def __sub__(self, other):
        return self + (-_coerce(self.B, other))

    def __rsub__(self, other):
        return _coerce(self.B, other) + (-self)

    def __mul__(self, other):
        other = _coerce(self.B, other)
        a, b = self.B.a, self.B.b
        t1, x1, y1, z1 = self.c
        t2, x2, y2, z2 = other.c
        return QuatElt(
            self.B,
            t1 * t2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
            t1 * x2 + x1 * t2 - b * (y1 * z2 - z1 * y2),
            t1 * y2 + y1 * t2 + a * (x1 * z2 - z1 * x2),
            t1 * z2 + z1 * t2 + (x1 * y2 - y1 * x2),
        )

    __rmul__ = __mul__

    def conj(self):
        t, x, y, z = self.c
        return QuatElt(self.B, t, -x, -y, -z)

    def trd(self):
        return 2 * self.c[0]

    def nrd(self):
        a, b = self.B.a, self.B.b
        t, x, y, z = self.c
        return t * t - a * x * x - b * y * y + a * b * z * z

    def inv(self):
        n = self.nrd()
        assert n != 0
        return QuatElt(self.B, *(v / n for v in self.conj().c))

    def __truediv__(self, other):
        return self * _coerce(self.B, other).inv()

    def __pow__(self, e):
        e = int(e)
        assert e >= 0
        r = self.B.one()
        base = self
        while e:
            if e & 1:
                r = r * base
            base = base * base
            e >>= 1
        return r

    def is_zero(self):
        return all(v == 0 for v in self.c)

    def __eq__(self, other):
        if not isinstance(other, QuatElt):
            try:
                other = _coerce(self.B, other)
            except TypeError:
                return NotImplemented
        return self.c == other.c and self.B.a == other.B.a \
            and self.B.b == other.B.b

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "Q" + str(tuple(str(v) for v in self.c))


def _coerce(B, x):
    if isinstance(x, QuatElt):
        assert x.B.a == B.a and x.B.b == B.b
        return x
    if isinstance(x, (int, Fraction)):
        return B.elt(x)
    raise TypeError(f"cannot coerce {type(x)}")


class QuatOrder:
    """Z-order given by a basis of 4 elements (1 must lie in the span
    over Z); may be used with p inverted for the arithmetic groups."""

    def __init__(self, algebra, basis):
        assert len(basis) == 4
        self.B = algebra
        self.basis = [_coerce(algebra, x) for x in basis]
        self._coord_inv = None
        assert self.contains(algebra.one()), "1 not in the order"
        assert self.is_closed(), "basis does not span a ring"

    # -- coordinates --

    def coordinates(self, x):
        """Rational coordinates of x on the order basis."""
        A = [[self.basis[j].c[i] for j in range(4)] for i in range(4)]
        sol = zlattice.solve_linear(A, list(_coerce(self.B, x).c))
        assert sol is not None, "basis is degenerate"
        return sol

    def contains(self, x, denominator=1):
        """Is x in the order after clearing the given denominator
        (use denominator=p^k for Z[1/p] questions)?"""
        co = self.coordinates(x)
        return all((c * denominator).denominator == 1 for c in co)

    def element_from_coordinates(self, co):
        acc = self.B.zero()
        for c, bas in zip(co, self.basis):
            acc = acc + Fraction(c) * bas
        return acc

    def is_closed(self):
        for x in self.basis:
            if x.trd().denominator != 1 or x.nrd().denominator != 1:
                return False
        for x in self.basis:
            for y in self.basis:
                if not self.contains(x * y):
                    return False
        return True

    def gram(self):
        """Norm-form Gram matrix trd(b_i conj(b_j)); positive definite
        for definite algebras, determinant = (reduced discriminant)^2."""
        return [[(x * y.conj()).trd() for y in self.basis]
                for x in self.basis]

    def reduced_discriminant(self):
        g = self.gram()
        d = zlattice.det([[int(v) for v in row] for row in g])
        assert Fraction(d).denominator == 1
        from math import isqrt
        r = isqrt(abs(int(d)))
        assert r * r == abs(int(d)), "Gram determinant is not a square"
        return r

    def enumerate_by_norm(self, norm, trace=None):
        """All order elements of the given reduced norm (and reduced
        trace, when specified), complete, canonically sorted."""
        norm = Fraction(norm)
        assert norm.denominator == 1 and norm >= 0
        G = [[int(v) for v in row] for row in self.gram()]
        if trace is None:
            sols = zlattice.fincke_pohst(G, 2 * int(norm))
            out = [self.element_from_coordinates(s) for s in sols]
            out = [x for x in out if x.nrd() == norm]
            out.sort(key=lambda x: x.c)
            return out
        # slice the affine sublattice trd(x) = trace
        trace = Fraction(trace)
        tv = [x.trd() for x in self.basis]
        den = 1
        for t in tv + [trace]:
            den = den * t.denominator // gcd(den, t.denominator)
        tvi = [int(t * den) for t in tv]
        tgt = trace * den
        if tgt.denominator != 1:
            return []
        tgt = int(tgt)
        g = gcd(gcd(tvi[0], tvi[1]), gcd(tvi[2], tvi[3]))
        if tgt % g:
            return []
        # particular solution by extended gcd, then the trace-zero
        # sublattice
        part = _solve_one_linear(tvi, tgt)
        ker = zlattice.kernel_basis([tvi])
        Gk = [[sum(ker[i][r] * G[r][s] * ker[j][s]
                   for r in range(4) for s in range(4))
               for j in range(len(ker))] for i in range(len(ker))]
        # Q(part + K y) = target: offset = coordinates of part in the
        # kernel frame need not exist; use the shifted-form trick
        # Q(x) = (x0 + Ky)^T G (x0 + Ky): expand around x0
        x0 = part
        lin = [sum(2 * x0[r] * G[r][s] * ker[j][s]
                   for r in range(4) for s in range(4))
               for j in range(len(ker))]
        const = sum(x0[r] * G[r][s] * x0[s]
                    for r in range(4) for s in range(4))
        target = 2 * int(norm) - const
        # complete the square: y^T Gk y + lin . y = target
        # equivalently (y + c)^T Gk (y + c) = target + c^T Gk c with
        # Gk c = lin / 2
        cvec = zlattice.solve_linear(
            [[Fraction(v) for v in row] for row in Gk],
            [Fraction(v, 2) for v in lin])
        assert cvec is not None
        shifted = Fraction(target) + sum(
            cvec[i] * Gk[i][j] * cvec[j]
            for i in range(len(ker)) for j in range(len(ker)))
        if shifted < 0:
            return []
        sols = zlattice.fincke_pohst(Gk, shifted, offset=cvec)
        out = []
        for y in sols:
            co = [x0[r] + sum(ker[j][r] * y[j] for j in range(len(ker)))
                  for r in range(4)]
            x = self.element_from_coordinates(co)
            if x.nrd() == norm and x.trd() == trace:
                out.append(x)
        out.sort(key=lambda x: x.c)
        return out

    def to_json(self):
        import json
        return json.dumps({
            "a": str(self.B.a), "b": str(self.B.b),
            "basis": [[str(v) for v in x.c] for x in self.basis]})

    @classmethod
    def from_json(cls, blob):
        import json
        d = json.loads(blob)
        B = QuaternionAlgebra(Fraction(d["a"]), Fraction(d["b"]))
        basis = [QuatElt(B, *(Fraction(v) for v in row))
                 for row in d["basis"]]
        return cls(B, basis)


def _solve_one_linear(coeffs, target):
    """One integer solution x of coeffs . x = target (gcd divides)."""
    # accumulate pairwise extended gcds
    xs = [0] * len(coeffs)
    g = 0
    combo = []
    for i, c in enumerate(coeffs):
        if g == 0:
            g = abs(c)
            combo = [0] * len(coeffs)
            if c:
                combo[i] = 1 if c > 0 else -1
            continue
        if c == 0:
            continue
        gg, u, v = _xgcd(g, c)
        combo = [u * w for w in combo]
        combo[i] += v
        g = gg
    assert g and target % g == 0
    k = target // g
    return [k * w for w in combo]


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def maximal_order(B):
    """A maximal order, by saturating Z<1,i,j,k> at primes whose square
    divides the reduced discriminant."""
    one = B.one()
    i, j, k = B.gens()
    order = QuatOrder(B, [one, i, j, k])
    disc_target = 1
    for p in B.ramified():
        if p != "oo":
            disc_target *= p
    while True:
        disc = order.reduced_discriminant()
        assert disc % disc_target == 0
        if disc == disc_target:
            return order
        enlarged = False
        for q in sympy.factorint(disc // disc_target):
            cand = _enlarge_at(order, q)
            if cand is not None:
                order = cand
                enlarged = True
                break
        assert enlarged, f"cannot enlarge past discriminant {disc}"


def _enlarge_at(order, q):
    """Look for x = (sum c_m b_m)/q integral with x not in the order;
    returns the enlarged order or None."""
    from itertools import product
    basis = order.basis
    for combo in product(range(q), repeat=4):
        if all(c == 0 for c in combo):
            continue
        num = order.element_from_coordinates(combo)
        x = QuatElt(order.B, *(v / q for v in num.c))
        if x.trd().denominator != 1 or x.nrd().denominator != 1:
            continue
        if order.contains(x):
            continue
        # saturate the span and keep it only if it is again a ring
        den = 1
        for y in list(basis) + [x]:
            for v in y.c:
                den = den * v.denominator // gcd(den, v.denominator)
        rows_int = [[int(v * den) for v in y.c]
                    for y in list(basis) + [x]]
        H = zlattice.hnf_basis(rows_int)
        new_basis = [QuatElt(order.B, *(Fraction(v, den) for v in row))
                     for row in H]
        try:
            return QuatOrder(order.B, new_basis)
        except AssertionError:
            continue
    return None


def eichler_order(B, N_plus, basis=None, maximal=None):
    """Level-N_plus Eichler order: supplied basis validated, or built
    as the preimage of upper-triangular matrices mod N_plus inside a
    maximal order."""
    disc_B = 1
    for p in B.ramified():
        if p != "oo":
            disc_B *= p
    assert gcd(disc_B, N_plus) == 1, "level must avoid the discriminant"
    if basis is not None:
        order = QuatOrder(B, basis)
        assert order.reduced_discriminant() == disc_B * N_plus, \
            ("supplied basis has reduced discriminant "
             f"{order.reduced_discriminant()}, expected {disc_B * N_plus}")
        return order
    order = maximal if maximal is not None else maximal_order(B)
    if N_plus == 1:
        return order
    assert sympy.isprime(N_plus), "only prime level is implemented"
    ell = N_plus
    # the congruence condition: lower-left entry of the mod-ell
    # splitting vanishes (upper-triangular matrices form a ring, so
    # the preimage sublattice is again an order)
    lower = [splitting_matrix_mod(B, x, ell)[1][0] % ell
             for x in order.basis]
    assert any(lower), "order already satisfies the level condition"
    aug = [list(v) for v in zlattice.kernel_basis([lower])]
    for m in range(4):
        row = [0] * 4
        row[m] = ell
        aug.append(row)
    H = zlattice.hnf_basis(aug)
    new_basis = [order.element_from_coordinates(row) for row in H]
    sub = QuatOrder(B, new_basis)
    assert sub.reduced_discriminant() == disc_B * ell
    return sub


# -- 2x2 matrices over Z/ell and local splittings --

def _mul2_mod(A, Bm, ell):
    return [[(A[0][0] * Bm[0][0] + A[0][1] * Bm[1][0]) % ell,
             (A[0][0] * Bm[0][1] + A[0][1] * Bm[1][1]) % ell],
            [(A[1][0] * Bm[0][0] + A[1][1] * Bm[1][0]) % ell,
             (A[1][0] * Bm[0][1] + A[1][1] * Bm[1][1]) % ell]]


def _inv2_mod(A, ell):
    d = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) % ell
    di = pow(d, -1, ell)
    return [[(A[1][1] * di) % ell, (-A[0][1] * di) % ell],
            [(-A[1][0] * di) % ell, (A[0][0] * di) % ell]]


def splitting_matrix_mod(B, x, ell):
    """Image of x under a fixed splitting B -> M_2(Z/ell), odd ell
    coprime to the discriminant and to coordinate denominators."""
    I, J = _splitting_pair_mod(B, ell)
    K2 = _mul2_mod(I, J, ell)
    t, xx, yy, zz = x.c
    out = [[0, 0], [0, 0]]
    coeffs = []
    for fr in (t, xx, yy, zz):
        coeffs.append(int(fr.numerator * pow(fr.denominator, -1, ell))
                      % ell)
    mats = [[[1, 0], [0, 1]], I, J, K2]
    for c, m in zip(coeffs, mats):
        for r in range(2):
            for s in range(2):
                out[r][s] = (out[r][s] + c * m[r][s]) % ell
    return out


_SPLIT_CACHE = {}


def _splitting_pair_mod(B, ell):
    key = (B.a, B.b, ell)
    if key in _SPLIT_CACHE:
        return _SPLIT_CACHE[key]
    a = int(Fraction(B.a).numerator * pow(Fraction(B.a).denominator,
                                          -1, ell)) % ell
    b = int(Fraction(B.b).numerator * pow(Fraction(B.b).denominator,
                                          -1, ell)) % ell
    assert a % ell and b % ell, "generators must be units locally"
    s = _sqrt_mod(a, ell)
    if s is not None:
        I = [[s, 0], [0, (-s) % ell]]
        J = [[0, 1], [b, 0]]
    else:
        t = _sqrt_mod(b, ell)
        if t is not None:
            J = [[t, 0], [0, (-t) % ell]]
            I = [[0, 1], [a, 0]]
        else:
            # a is a nonsquare, so u^2 - a v^2 is the norm form of the
            # quadratic extension of the residue field and hits every
            # unit, in particular b.  Trace-zero 2x2 matrices satisfy
            # XY + YX = tr(XY)*Id, so J below anticommutes with I.
            I = [[0, 1], [a, 0]]
            J = None
            for u in range(ell):
                for v in range(ell):
                    if (u * u - a * v * v - b) % ell == 0:
                        J = [[u, v], [(-a * v) % ell, (-u) % ell]]
                        break
                if J is not None:
                    break
            assert J is not None, f"algebra not split at {ell}"
    # verify the defining relations mod ell
    assert _mul2_mod(I, I, ell) == [[a % ell, 0], [0, a % ell]]
    assert _mul2_mod(J, J, ell) == [[b % ell, 0], [0, b % ell]]
    anti = _mul2_mod(I, J, ell)
    assert _mul2_mod(J, I, ell) == [[(-v) % ell for v in row]
                                    for row in anti]
    _SPLIT_CACHE[key] = (I, J)
    return I, J


def _sqrt_mod(a, ell):
    a %= ell
    if a == 0:
        return 0
    if kronecker(a, ell) != 1:
        return None
    for r in range(1, ell):
        if r * r % ell == a:
            return r
    return None


def _stable_line(images, ell):
    """A line of (Z/ell)^2 stabilized by every matrix in the list,
    lex-first among candidates."""
    lines = [(1, t) for t in range(ell)] + [(0, 1)]
    for v in lines:
        ok = True
        for m in images:
            w = ((m[0][0] * v[0] + m[0][1] * v[1]) % ell,
                 (m[1][0] * v[0] + m[1][1] * v[1]) % ell)
            # w parallel to v?
            if (w[0] * v[1] - w[1] * v[0]) % ell:
                ok = False
                break
        if ok:
            return v
    return None


def _complete_line(v, ell):
    """GL_2(Z/ell) matrix with first column v."""
    for w in ((1, 0), (0, 1)):
        det = v[0] * w[1] - v[1] * w[0]
        if det % ell:
            return [[v[0], w[0]], [v[1], w[1]]]
    raise AssertionError


class EtaMap:
    """The level map: upper-left entry of the mod-N+ splitting after
    moving the order's stable line to the first basis vector, composed
    with the quadratic character psi."""

    def __init__(self, order, ell):
        assert sympy.isprime(ell)
        self.order = order
        self.ell = ell
        images = [splitting_matrix_mod(order.B, x, ell)
                  for x in order.basis]
        line = _stable_line(images, ell)
        assert line is not None, "order has no stable line at the level"
        self.U = _complete_line(line, ell)
        self.Uinv = _inv2_mod(self.U, ell)

    def eta(self, x):
        m = splitting_matrix_mod(self.order.B, x, self.ell)
        m = _mul2_mod(_mul2_mod(self.Uinv, m, self.ell), self.U, self.ell)
        assert m[1][0] % self.ell == 0, \
            "element not upper triangular at the level"
        return m[0][0] % self.ell

    def psi(self, n):
        return kronecker(n, self.ell)

    def psi_eta(self, x):
        return self.psi(self.eta(x))

    def psi_eta_projective(self, x, p):
        """Character value of x / p^(v(nrd)/2), the norm-one
        projectivization: scaling by p multiplies eta by p."""
        n = x.nrd()
        assert n.denominator == 1
        v = sympy.multiplicity(p, int(n))
        assert v % 2 == 0, "projectivization needs an even p-valuation"
        return self.psi_eta(x) * self.psi(pow(p, v // 2, self.ell))


def gamma_membership(order, gamma, group, p, eta=None):
    """Membership in the p-arithmetic norm-one groups: "gamma0" is the
    norm-one unit group of the order with p inverted, "gamma_psi" the
    kernel of psi(eta) inside it.  Raises if gamma does not lie in the
    p-inverted order at all."""
    gamma = _coerce(order.B, gamma)
    for c in order.coordinates(gamma):
        den = c.denominator
        while den % p == 0:
            den //= p
        if den != 1:
            raise ValueError("element not in the order with p inverted")
    if gamma.nrd() != 1:
        return False
    if group == "gamma0":
        return True
    assert group == "gamma_psi", f"unknown group tag {group!r}"
    assert eta is not None, "the psi-kernel group needs the level map"
    return eta.psi_eta(gamma) == 1


class OptimalEmbedding:
    def __init__(self, order, image, trace, norm, eta_value):
        self.order = order
        self.image = image
        self.trace = trace
        self.norm = norm
        self.eta_value = eta_value

    def verify(self, eta=None):
        x = self.image
        assert x.trd() == self.trace and x.nrd() == self.norm
        if eta is not None:
            assert eta.eta(x) == self.eta_value
        return True


def optimal_embedding(order, trace, norm, eta=None, eta_target=None,
                      conductor=1):
    """Embedding of the quadratic order Z[w], w with the given trace
    and norm, into the quaternion order: finds x with trd(x) = trace,
    nrd(x) = norm, checks optimality at primes dividing the conductor,
    and (when an eta map is given) selects the normalization with
    eta(x) = eta_target.  Deterministic: lexicographically smallest
    coordinate vector."""
    trace, norm = Fraction(trace), Fraction(norm)
    cands = order.enumerate_by_norm(norm, trace=trace)
    valid = []
    for x in cands:
        if eta is not None and eta.eta(x) != eta_target % eta.ell:
            continue
        if not _is_optimal(order, x, trace, norm, conductor):
            continue
        valid.append(x)
    if not valid:
        raise ArithmeticError("no normalized optimal embedding found")
    valid.sort(key=lambda x: x.c)
    x = valid[0]
    return OptimalEmbedding(order, x, trace, norm,
                            eta.eta(x) if eta else None)


def _is_optimal(order, x, trace, norm, conductor):
    """Z[x] must meet the order in exactly the conductor-c suborder:
    (x - r)/q stays outside the order for primes q dividing the
    conductor and every residue r."""
    for q in sympy.factorint(int(conductor)):
        for r in range(int(q)):
            y = QuatElt(order.B, *((v - (r if i == 0 else 0)) / q
                                   for i, v in enumerate(x.c)))
            if order.contains(y):
                return False
    return True
