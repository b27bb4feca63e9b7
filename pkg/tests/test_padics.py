"""Tests for fixed-modulus unramified p-adic arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from atrpoints.padics import Fq, PadicField


N = 12
Q13 = PadicField(13, N)
K2 = PadicField(13, N, poly=[5, -1, 1], gen_name="g")
K4 = PadicField(13, N, poly=[2, 12, 3, 0, 1], gen_name="h")

FIELDS = [Q13, K2, K4]


@st.composite
def field_elt(draw, K):
    coeffs = [draw(st.integers(min_value=0, max_value=K.pn - 1))
              for _ in range(K.f)]
    val = draw(st.integers(min_value=-3, max_value=3))
    return K.from_vector(coeffs, val)


@given(st.sampled_from(range(3)), st.data())
@settings(max_examples=120, deadline=None)
def test_ring_axioms(idx, data):
    K = FIELDS[idx]
    a = data.draw(field_elt(K))
    b = data.draw(field_elt(K))
    c = data.draw(field_elt(K))
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a + K.zero() == a
    assert a * K.one() == a
    assert a - a == K.zero()


@given(st.sampled_from(range(3)), st.data())
@settings(max_examples=80, deadline=None)
def test_distributivity_high_valuation_guard(idx, data):
    # distributivity can only fail through fixed-modulus digit loss when
    # valuations differ wildly; on same-valuation operands it is exact
    K = FIELDS[idx]
    coeffs = lambda: [data.draw(st.integers(0, K.pn - 1))
                      for _ in range(K.f)]
    a, b, c = (K.from_vector(coeffs()) for _ in range(3))
    assert a * (b + c) == a * b + a * c


@given(st.sampled_from(range(3)), st.data())
@settings(max_examples=60, deadline=None)
def test_inverse(idx, data):
    K = FIELDS[idx]
    a = data.draw(field_elt(K))
    if a.is_zero():
        return
    assert a * a.inv() == K.one()
    assert (K.one() / a) * a == K.one()


@given(st.fractions(min_value=-50, max_value=50,
                    max_denominator=40).filter(lambda q: q != 0))
@settings(max_examples=80, deadline=None)
def test_from_rational_is_multiplicative(q):
    for K in (Q13, K4):
        x = K.from_rational(q)
        n = K.from_int(q.numerator)
        d = K.from_int(q.denominator)
        assert x * d == n


def test_serialization_roundtrip():
    x = K4.from_vector([7, 13 * 5 + 1, 0, 13 ** 3 + 2], val=-2)
    d = x.to_dict()
    assert d["val"] == -2
    assert len(d["digits"]) == N and len(d["digits"][0]) == 4
    y = K4.element_from_dict(d)
    assert x == y
    z = K4.zero()
    assert K4.element_from_dict(z.to_dict()) == z


def test_hensel_sqrt_minus_three():
    # -3 is a square in Z_13 (6^2 = 36 = -3 + 3*13); canonical seed 6
    r = Q13.hensel_root([3, 0, 1], (6,))
    assert (r * r + 3).is_zero() or (r * r + 3).v >= N
    assert r.u[0] % 13 == 6


def test_hensel_certificate_rejected():
    # x^2 - 2 has no root mod 13 (2 is a QR mod 13? 6^2=10, squares mod 13
    # are {1,3,4,9,10,12}; 2 is not) -> seed fails the certificate
    with pytest.raises(AssertionError):
        Q13.hensel_root([-2, 0, 1], (1,))


@given(st.integers(min_value=1, max_value=12))
@settings(max_examples=12, deadline=None)
def test_teichmuller_qp(a):
    w = Q13.teichmuller(a)
    assert (w ** 12 - Q13.one()).is_zero() or (w ** 12 - Q13.one()).v >= N
    assert w.u[0] % 13 == a


def test_teichmuller_multiplicative():
    res = K2.residue_field()
    a, b = (3, 5), (7, 2)
    wa, wb = K2.teichmuller(a), K2.teichmuller(b)
    wab = K2.teichmuller(res.mul(a, b))
    assert wa * wb == wab


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_sqrt_of_squares(data):
    K = FIELDS[data.draw(st.sampled_from(range(3)))]
    a = data.draw(field_elt(K))
    if a.is_zero():
        return
    sq = a * a
    r = K.sqrt(sq)
    assert r * r == sq


def test_sqrt_rejects_odd_valuation():
    with pytest.raises(ValueError):
        Q13.sqrt(Q13.from_int(13))


def test_sqrt_rejects_nonsquare():
    with pytest.raises(ValueError):
        Q13.sqrt(Q13.from_int(2))


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_exp_log_inverse(data):
    K = FIELDS[data.draw(st.sampled_from(range(3)))]
    a = data.draw(field_elt(K))
    if a.is_zero():
        return
    x = K._make(max(a.v, 1) if a.v is not None else 1, a.u)
    u = K.exp(x)
    assert K.log(u).eq_mod(x, N - 1)
    # and the other direction on the 1-unit u
    assert K.exp(K.log(u)).eq_mod(u, N - 1)


def test_frobenius_structure():
    # on K2 = Q13[g]/(g^2 - g + 5): trace g = 1, norm g = 5 exactly
    g = K2.gen()
    sg = K2.frobenius(g)
    assert g + sg == K2.one()
    assert g * sg == K2.from_int(5)
    assert K2.frobenius(sg) == g
    # Qp elements are fixed
    x = K2.from_rational(Fraction(7, 3))
    assert K2.frobenius(x) == x
    # K4: sum of the four conjugates of h is 0, product is 2
    h = K4.gen()
    conj = K4.conjugates(h)
    s = K4.zero()
    prod = K4.one()
    for c in conj:
        s = s + c
        prod = prod * c
    assert s == K4.zero()
    assert prod == K4.from_int(2)


def test_embedding_k2_into_k4():
    emb = K4.embedding_from(K2)
    gi = emb(K2.gen())
    # image satisfies the defining polynomial of K2
    assert (gi * gi - gi + 5).is_zero() or (gi * gi - gi + 5).v >= N
    # embedding is a ring hom on a sample
    a = K2.from_vector([3, 4], val=1)
    b = K2.from_vector([5, 1])
    assert emb(a * b) == emb(a) * emb(b)
    assert emb(a + b) == emb(a) + emb(b)
    # Frobenius of K4 restricted twice fixes the image of K2
    assert K4.frobenius(gi, 2) == gi


def test_residue_field_roots():
    # h^4 + 3h^2 + 12h + 2 is irreducible mod 13: no roots in F_13 but
    # four distinct roots in F_13^4
    r1 = Fq(13, [0, 1])
    assert r1.poly_roots([r1.from_int(c) for c in [2, 12, 3, 0, 1]]) == []
    r4 = K4.residue_field()
    roots = r4.poly_roots([r4.from_int(c) for c in [2, 12, 3, 0, 1]])
    assert len(roots) == 4
    assert r4.gen() in roots


def test_eq_mod():
    a = Q13.from_int(5)
    b = Q13.from_int(5 + 13 ** 4)
    assert a.eq_mod(b, 4)
    assert not a.eq_mod(b, 5)
