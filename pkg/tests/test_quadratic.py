"""Quadratic field arithmetic against classical oracle values."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from atrpoints.quadratic import (QuadField, class_number_imaginary, kronecker,
                                 squarefree_part)

F5 = QuadField(5)
K19 = QuadField(-19)

small = st.integers(min_value=-30, max_value=30)


def test_kronecker_tables():
    # quadratic residues mod 13: 1, 3, 4, 9, 10, 12
    assert [kronecker(a, 13) for a in range(1, 13)] == \
        [1, -1, 1, 1, -1, -1, -1, -1, 1, 1, -1, 1]
    # (a|2) by a mod 8
    assert [kronecker(a, 2) for a in (1, 3, 5, 7, 2, -1, -3)] == \
        [1, -1, -1, 1, 0, 1, -1]
    assert kronecker(-19, 2) == -1  # -19 = 5 mod 8
    assert kronecker(5, 2) == -1


@given(small, st.integers(min_value=1, max_value=120).filter(lambda n: n % 2),
       st.integers(min_value=1, max_value=120).filter(lambda n: n % 2))
def test_kronecker_multiplicative(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


@given(st.integers(min_value=2, max_value=400))
def test_squarefree_part(n):
    s = squarefree_part(n)
    q, r = divmod(n, s)
    assert r == 0
    from math import isqrt
    assert isqrt(q) ** 2 == q
    assert squarefree_part(-n) == -s


def test_class_numbers_imaginary():
    # classical table of form class numbers
    table = {-3: 1, -4: 1, -7: 1, -8: 1, -11: 1, -15: 2, -19: 1, -20: 2,
             -23: 3, -24: 2, -31: 3, -39: 4, -43: 1, -47: 5, -56: 4,
             -67: 1, -163: 1}
    for D, h in table.items():
        assert class_number_imaginary(D) == h, D


def test_class_number_one_checks():
    assert F5.minkowski_class_number_one()
    assert K19.minkowski_class_number_one()
    assert not QuadField(-5).minkowski_class_number_one()
    assert QuadField(2).minkowski_class_number_one()


@given(small, small, small, small)
def test_field_axioms(a1, b1, a2, b2):
    x = F5.elt(a1, b1)
    y = F5.elt(a2, b2)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).conj() == x.conj() + y.conj()
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.norm() == x * x.conj()
    if not y.is_zero():
        assert (x / y) * y == x


def test_real_signs():
    # golden ratio is positive, its conjugate negative
    w = F5.omega()
    assert F5.real_signs(w) == (1, -1)
    assert F5.real_signs(F5.elt(3)) == (1, 1)
    assert F5.real_signs(-w) == (-1, 1)
    # alpha = -1 + 2 sqrt(5) > 0, conjugate -1 - 2 sqrt(5) < 0
    assert F5.real_signs(F5.elt(-1, 2)) == (1, -1)


def test_splitting_q_sqrt5():
    # split iff ell = +-1 mod 5
    assert F5.splitting(2) == "inert"
    assert F5.splitting(3) == "inert"
    assert F5.splitting(5) == "ramified"
    assert F5.splitting(11) == "split"
    assert F5.splitting(13) == "inert"
    assert F5.splitting(19) == "split"


def test_splitting_q_sqrt_minus19():
    assert K19.splitting(2) == "inert"
    assert K19.splitting(3) == "inert"
    assert K19.splitting(5) == "split"
    assert K19.splitting(7) == "split"
    assert K19.splitting(13) == "inert"
    assert K19.splitting(19) == "ramified"


def test_primes_above():
    (p19a, pi, typ) = F5.primes_above(19)[0]
    assert typ == "split" and abs(pi.norm()) == 19
    (p5, pi5, typ5) = F5.primes_above(5)[0]
    assert typ5 == "ramified" and abs(pi5.norm()) == 5
    assert F5.primes_above(13)[0][2] == "inert"
    # K = Q(sqrt(-19)): the primes above 5 have norm 5
    for (ell, pi, typ) in K19.primes_above(5):
        assert abs(pi.norm()) == 5


@given(small, small)
@settings(max_examples=40)
def test_split_valuations_add_to_norm(a, b):
    import sympy
    x = F5.elt(a, b)
    if x.is_zero():
        return
    p1, p2 = F5.primes_above(19)
    v1, v2 = F5.valuation(x, p1), F5.valuation(x, p2)
    n = x.norm()
    assert v1 + v2 == (sympy.multiplicity(19, n.numerator)
                       - sympy.multiplicity(19, n.denominator))


def test_factor_principal():
    # alpha = -1 + 2 sqrt(5) has norm -19: a single split prime
    alpha = F5.elt(-1, 2)
    fac = F5.factor_principal(alpha)
    assert len(fac) == 1
    (ell, pi, typ), e = fac[0]
    assert (ell, typ, e) == (19, "split", 1)
    # delta = -2 + 2 sqrt(-19) has norm 80 = 2^4 * 5
    delta = K19.elt(-2, 2)
    fac = K19.factor_principal(delta)
    by_ell = {p[0]: e for p, e in fac}
    assert by_ell == {2: 2, 5: 1}
    assert [p[2] for p, _ in fac] == ["inert", "split"]


def test_relative_discriminant_alpha_over_f():
    # F(sqrt(alpha)) with alpha = -1 + 2 sqrt(5): ramified only above 19,
    # since alpha = 1 mod 4 O_F; discriminant norm 19
    alpha = F5.elt(-1, 2)
    disc, norm, w = F5.relative_discriminant_sqrt(alpha)
    assert norm == 19
    assert len(disc) == 1 and disc[0][0][0] == 19 and disc[0][1] == 1
    assert w == alpha
    # invariance under multiplying by the square of a unit
    u = F5.omega()  # norm -1
    disc2, norm2, _ = F5.relative_discriminant_sqrt(alpha * u * u)
    assert norm2 == 19


def test_relative_discriminant_delta_over_k():
    # K(sqrt(delta)) with delta = -2 + 2 sqrt(-19): the square part is
    # (2)^2, leaving w = (-1 + sqrt(-19))/2 of norm 5; w is a square
    # mod 4 (witness (2 + w)^2), so only the prime above 5 ramifies
    delta = K19.elt(-2, 2)
    disc, norm, w = K19.relative_discriminant_sqrt(delta)
    assert norm == 5
    assert w == K19.elt(Fraction(-1, 2), Fraction(1, 2))
    assert len(disc) == 1
    (ell, pi, typ), e = disc[0]
    assert (ell, typ, e) == (5, "split", 1)


def test_relative_discriminant_2adic_cases():
    # F(sqrt(sqrt(5))) = Q(5^(1/4)) has absolute discriminant -2000,
    # so the relative discriminant norm is 2000/5^2 = 80 = 16 * 5:
    # exponent 2 at the inert prime 2 and 1 at the ramified prime 5
    disc, norm, _ = F5.relative_discriminant_sqrt(F5.sqrt_gen())
    assert norm == 80
    # F(sqrt(-1)) = Q(i, sqrt(5)), biquadratic discriminant
    # (-4)(5)(-20) = 400 = 16 * 5^2: relative norm 16
    disc, norm, _ = F5.relative_discriminant_sqrt(F5.elt(-1))
    assert norm == 16
    assert disc == [((2, None, "inert"), 2)]
    # F(sqrt(omega)): y^4 - y^2 - 1 generates a quartic field of
    # discriminant -400, relative norm 16 again
    disc, norm, _ = F5.relative_discriminant_sqrt(F5.omega())
    assert norm == 16


def test_relative_discriminant_rejects_even_base():
    with pytest.raises(NotImplementedError):
        QuadField(2).relative_discriminant_sqrt(QuadField(2).elt(3))


def test_residue_field_at_inert():
    fq, red = F5.residue_field_at_inert(13)
    w = F5.omega()
    assert fq.is_zero(red(w * w - w - 1))
    x, y = F5.elt(3, 1), F5.elt(-2, 5)
    assert red(x * y) == fq.mul(red(x), red(y))
    assert red(x + y) == fq.add(red(x), red(y))
    # 169 elements, and the image of omega generates
    assert fq.q == 169


def test_padic_embedding():
    from atrpoints.padics import PadicField
    K2 = PadicField(13, 8, poly=[5, -1, 1])
    emb = F5.padic_embedding(K2)
    r5 = emb(F5.sqrt_gen())
    assert (r5 * r5 - K2.from_int(5)).is_zero()
    x, y = F5.elt(3, Fraction(1, 2)), F5.elt(-2, 5)
    assert emb(x * y) == emb(x) * emb(y)
    assert emb(x + y) == emb(x) + emb(y)
    # canonical choice: lex-smallest residue among the two roots
    assert emb(F5.omega()) == K2.from_rational(Fraction(1, 2)) \
        + K2.from_rational(Fraction(1, 2)) * r5
