"""Quaternion algebras, orders, local splittings, and embeddings."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from atrpoints.quaternions import (
    EtaMap, QuaternionAlgebra, QuatOrder, eichler_order, gamma_membership,
    hilbert_symbol, make_algebra, maximal_order, optimal_embedding,
    ramified_places, splitting_matrix_mod,
)


def lipschitz():
    B = QuaternionAlgebra(-1, -1)
    i, j, k = B.gens()
    return QuatOrder(B, [B.one(), i, j, k])


def hurwitz():
    B = QuaternionAlgebra(-1, -1)
    i, j, k = B.gens()
    return QuatOrder(B, [B.one(), i, j, (1 + i + j + k) / 2])


def atr_order():
    """The published level-5 order of the discriminant-3 algebra."""
    B = QuaternionAlgebra(-3, -1)
    i, j, k = B.gens()
    basis = [B.one(), j, Fraction(5, 2) * (j + k), (1 + i - 3 * j - 3 * k) / 2]
    return eichler_order(B, 5, basis=basis)


def brute_hilbert(a, b, p):
    """Oracle: z^2 = a x^2 + b y^2 has a primitive solution mod p^k,
    with k large enough (valuations <= 1) that a solution certifies a
    p-adic one by Hensel and its absence rules one out."""
    k = 5 if p == 2 else 3
    m = p ** k
    squares = {z * z % m for z in range(m)}
    unit_squares = {z * z % m for z in range(m) if z % p}
    for x in range(m):
        for y in range(m):
            t = (a * x * x + b * y * y) % m
            if x % p or y % p:
                if t in squares:
                    return 1
            elif t in unit_squares:
                return 1
    return -1


def test_hilbert_symbol_known_values():
    assert hilbert_symbol(-3, -1, 3) == -1
    assert hilbert_symbol(-3, -1, 5) == 1
    assert hilbert_symbol(-3, -1, 2) == 1
    assert hilbert_symbol(-3, -1, "oo") == -1
    assert hilbert_symbol(-1, -1, 2) == -1
    for b in (-7, -2, 3, 10):
        for ell in (2, 3, 5, 7):
            assert hilbert_symbol(1, b, ell) == 1
            assert hilbert_symbol(b, 1, ell) == 1


def test_hilbert_symbol_against_brute_solubility():
    vals = [-6, -5, -3, -2, -1, 1, 2, 3, 5]
    for a in vals:
        for b in vals:
            for p in (2, 3):
                assert hilbert_symbol(a, b, p) == brute_hilbert(a, b, p), \
                    (a, b, p)
    # spot checks at 5 (positive cases exit the oracle quickly)
    for a, b in ((-3, -1), (5, -1), (-5, 2), (2, 5)):
        assert hilbert_symbol(a, b, 5) == brute_hilbert(a, b, 5)


def test_hilbert_reciprocity():
    """Product of the symbols over all places is 1."""
    vals = [-10, -6, -5, -3, -2, -1, 2, 3, 5, 7, 30]
    for a in vals:
        for b in vals:
            places = sorted({2} | set(__import__("sympy").factorint(
                abs(a)).keys()) | set(__import__("sympy").factorint(
                    abs(b)).keys()))
            prod = hilbert_symbol(a, b, "oo")
            for p in places:
                prod *= hilbert_symbol(a, b, p)
            assert prod == 1, (a, b)


def test_ramified_places():
    assert ramified_places(-1, -1) == [2, "oo"]
    assert ramified_places(-3, -1) == [3, "oo"]
    assert ramified_places(-1, -3) == [3, "oo"]
    assert ramified_places(-1, -11) == [11, "oo"]
    assert ramified_places(-1, 3) == [2, 3]
    assert ramified_places(1, -7) == []


def test_make_algebra():
    B = make_algebra(39, 13)
    assert (B.a, B.b) == (-3, -1)
    assert B.ramified() == [3, "oo"]
    assert B.is_definite()
    B2 = make_algebra(14, 7)
    assert B2.ramified() == [2, "oo"]
    with pytest.raises(ValueError):
        make_algebra(30, 5)  # {2, 3} ∪ {oo} has odd cardinality


def test_multiplication_table():
    B = QuaternionAlgebra(-3, -1)
    i, j, k = B.gens()
    assert i * i == B.elt(-3)
    assert j * j == B.elt(-1)
    assert i * j == k
    assert j * i == -k
    assert k * k == B.elt(-3)  # k^2 = -ab
    assert i * k == B.elt(-3) * j  # ik = aj
    assert k * i == -B.elt(-3) * j
    assert j * k == B.elt(1) * i  # jk = -bi
    assert k * j == -B.elt(1) * i
    x = 2 + i - j + 3 * k
    assert x.trd() == 4 and x.nrd() == 4 + 3 + 1 + 27
    assert x + x.conj() == B.elt(x.trd())
    assert x * x.conj() == B.elt(x.nrd())
    assert x * x.inv() == B.one()


coord = st.integers(-9, 9)
quat_coords = st.tuples(coord, coord, coord, coord)


@settings(max_examples=60)
@given(quat_coords, quat_coords)
def test_nrd_multiplicative_and_conj_antihom(c1, c2):
    B = QuaternionAlgebra(-3, -1)
    x = B.elt(*c1)
    y = B.elt(*c2)
    assert (x * y).nrd() == x.nrd() * y.nrd()
    assert (x * y).conj() == y.conj() * x.conj()
    assert (x * y).trd() == (y * x).trd()


def test_order_discriminants():
    assert lipschitz().reduced_discriminant() == 4
    assert hurwitz().reduced_discriminant() == 2
    g = lipschitz().gram()
    assert [row[i] for i, row in enumerate(g)] == [2, 2, 2, 2]
    import atrpoints.zlattice as zl
    assert zl.det([[int(v) for v in row] for row in g]) == 16
    assert zl.det([[int(v) for v in row] for row in hurwitz().gram()]) == 4


def test_maximal_orders():
    R = maximal_order(QuaternionAlgebra(-1, -1))
    assert R.reduced_discriminant() == 2
    L = lipschitz()
    for x in L.basis:
        assert R.contains(x)  # Hurwitz contains Lipschitz, index 2
    R3 = maximal_order(QuaternionAlgebra(-3, -1))
    assert R3.reduced_discriminant() == 3
    R3b = maximal_order(QuaternionAlgebra(-1, -3))
    assert R3b.reduced_discriminant() == 3


def test_atr_order_is_level_five():
    R = atr_order()
    assert R.reduced_discriminant() == 15  # 3 * 5
    # the same basis is rejected as a maximal (level-1) order
    B = R.B
    with pytest.raises(AssertionError):
        eichler_order(B, 1, basis=R.basis)


def test_eichler_order_construction():
    B = make_algebra(39, 13)
    R0 = maximal_order(B)
    R = eichler_order(B, 5, maximal=R0)
    assert R.reduced_discriminant() == 15
    for x in R.basis:
        assert R0.contains(x)
    assert eichler_order(B, 1, maximal=R0) is R0
    with pytest.raises(AssertionError):
        eichler_order(B, 3)  # level shares the prime 3 with the discriminant


def test_order_json_roundtrip():
    R = atr_order()
    R2 = QuatOrder.from_json(R.to_json())
    assert R2.basis == R.basis
    assert R2.reduced_discriminant() == 15


def box_norm_elements(order, norm, bound):
    out = set()
    for co in itertools.product(range(-bound, bound + 1), repeat=4):
        x = order.element_from_coordinates(co)
        if x.nrd() == norm:
            out.add(x)
    return out


def test_unit_enumeration():
    L = lipschitz()
    units = L.enumerate_by_norm(1)
    i, j, k = L.B.gens()
    assert set(units) == {L.B.one(), -L.B.one(), i, -i, j, -j, k, -k}
    assert len(hurwitz().enumerate_by_norm(1)) == 24
    assert len(maximal_order(QuaternionAlgebra(-3, -1))
               .enumerate_by_norm(1)) == 12
    zero = L.enumerate_by_norm(0)
    assert len(zero) == 1 and zero[0].is_zero()


def test_enumeration_against_box_search():
    H = hurwitz()
    for n in (1, 2, 3, 4):
        found = H.enumerate_by_norm(n)
        assert set(found) == box_norm_elements(H, n, 5)
        assert all(abs(c) < 5 for x in found for c in H.coordinates(x))
        assert found == sorted(found, key=lambda x: x.c)


def test_enumeration_with_trace():
    H = hurwitz()
    assert len(H.enumerate_by_norm(1, trace=0)) == 6
    assert len(H.enumerate_by_norm(1, trace=1)) == 8
    assert len(H.enumerate_by_norm(5, trace=1)) == 24
    got = H.enumerate_by_norm(5, trace=1)
    box = {x for x in box_norm_elements(H, 5, 5) if x.trd() == 1}
    assert set(got) == box
    # no half-integral traces in the Lipschitz order
    assert lipschitz().enumerate_by_norm(5, trace=1) == []


def test_splitting_is_ring_hom():
    B = QuaternionAlgebra(-3, -1)
    samples = [B.elt(1), B.elt(0, 1), B.elt(0, 0, 1), B.elt(0, 0, 0, 1),
               B.elt(2, -1, 3, 5), B.elt(1, 1, 1, 1), B.elt(-4, 2, 0, 7)]
    for ell in (5, 7, 11, 13):
        for x in samples:
            for y in samples:
                mx = splitting_matrix_mod(B, x, ell)
                my = splitting_matrix_mod(B, y, ell)
                mxy = splitting_matrix_mod(B, x * y, ell)
                prod = [[sum(mx[r][t] * my[t][s] for t in range(2)) % ell
                         for s in range(2)] for r in range(2)]
                assert mxy == prod
                msum = splitting_matrix_mod(B, x + y, ell)
                assert msum == [[(mx[r][s] + my[r][s]) % ell
                                 for s in range(2)] for r in range(2)]
            det = (mx[0][0] * mx[1][1] - mx[0][1] * mx[1][0]) % ell
            assert det == x.nrd() % ell
            assert (mx[0][0] + mx[1][1]) % ell == x.trd() % ell


def test_splitting_when_no_generator_is_a_square():
    # 3, 5 and -15 are all non-squares mod 7, yet (3,5) is split at 7
    B = QuaternionAlgebra(3, 5)
    assert hilbert_symbol(3, 5, 7) == 1
    x = B.elt(1, 2, 3, 4)
    y = B.elt(0, -1, 1, 2)
    mx = splitting_matrix_mod(B, x, 7)
    my = splitting_matrix_mod(B, y, 7)
    mxy = splitting_matrix_mod(B, x * y, 7)
    prod = [[sum(mx[r][t] * my[t][s] for t in range(2)) % 7
             for s in range(2)] for r in range(2)]
    assert mxy == prod
    assert (mx[0][0] * mx[1][1] - mx[0][1] * mx[1][0]) % 7 == x.nrd() % 7


def test_eta_map():
    R = atr_order()
    eta = EtaMap(R, 5)
    assert eta.eta(R.B.one()) == 1
    assert eta.eta(R.B.elt(2)) == 2
    assert eta.psi(1) == 1 and eta.psi(4) == 1
    assert eta.psi(2) == -1 and eta.psi(3) == -1
    # multiplicative on the order (upper-left of upper-triangulars)
    for x in R.basis:
        for y in R.basis:
            assert eta.eta(x * y) == eta.eta(x) * eta.eta(y) % 5


def test_eta_projective_character():
    R = atr_order()
    eta = EtaMap(R, 5)
    p = 13
    for x in R.basis:
        if x.nrd() % p == 0:
            continue
        assert eta.psi_eta_projective(x, p) == eta.psi_eta(x)
        assert eta.psi_eta_projective(p * x, p) == eta.psi_eta_projective(x, p)
    # odd valuation of the norm cannot be projectivized
    witness = R.B.elt(2, 0, 3, 0)  # 2 + 3j, norm 13
    assert witness.nrd() == 13 and R.contains(witness)
    with pytest.raises(AssertionError):
        eta.psi_eta_projective(witness, p)


def test_gamma_membership():
    R = atr_order()
    eta = EtaMap(R, 5)
    p = 13
    one = R.B.one()
    j = R.B.elt(0, 0, 1, 0)
    assert gamma_membership(R, one, "gamma0", p)
    assert gamma_membership(R, one, "gamma_psi", p, eta)
    assert gamma_membership(R, -one, "gamma_psi", p, eta)
    # j is a norm-one unit whose eta value squares to -1 mod 5, hence
    # is a non-residue: in the big group but not in the psi-kernel
    assert gamma_membership(R, j, "gamma0", p)
    assert not gamma_membership(R, j, "gamma_psi", p, eta)
    with pytest.raises(ValueError):
        gamma_membership(R, j / 5, "gamma0", p)
    assert not gamma_membership(R, j / p, "gamma0", p)  # nrd 1/169


def test_gamma_psi_has_index_two():
    """Norm p^2 elements scaled by 1/p are norm-one p-arithmetic group
    elements; the character takes both values on them."""
    R = atr_order()
    eta = EtaMap(R, 5)
    p = 13
    elems = R.enumerate_by_norm(p * p)
    assert elems
    seen = set()
    for x in elems:
        g = x / p
        assert gamma_membership(R, g, "gamma0", p)
        in_psi = gamma_membership(R, g, "gamma_psi", p, eta)
        assert in_psi == (eta.psi_eta_projective(x, p) == 1)
        seen.add(in_psi)
    assert seen == {True, False}


def test_optimal_embedding_trace_zero():
    H = hurwitz()
    emb = optimal_embedding(H, 0, 1)
    x = emb.image
    assert x.trd() == 0 and x.nrd() == 1
    assert x * x == -H.B.one()
    assert x.c == (0, -1, 0, 0)  # lexicographically smallest
    assert emb.verify()


def test_optimal_embedding_conductor_filter():
    # 2i generates the conductor-2 suborder of the Gaussian integers,
    # but every trace-0 norm-4 element of these orders is twice a unit,
    # so no conductor-2 embedding is optimal
    for R in (hurwitz(), lipschitz()):
        emb = optimal_embedding(R, 0, 4, conductor=1)
        assert emb.image.nrd() == 4
        with pytest.raises(ArithmeticError):
            optimal_embedding(R, 0, 4, conductor=2)


def test_optimal_embedding_normalized():
    """Trace 1, norm 5: the image generates a maximal quadratic order
    and the eta normalization selects the branch with eta = 1."""
    R = atr_order()
    eta = EtaMap(R, 5)
    cands = R.enumerate_by_norm(5, trace=1)
    assert cands
    # upper-left entries of upper-triangular images are roots of the
    # reduced characteristic polynomial x^2 - x + 5 = x(x-1) mod 5
    assert {eta.eta(x) for x in cands} == {0, 1}
    emb = optimal_embedding(R, 1, 5, eta=eta, eta_target=1)
    x = emb.image
    assert x.trd() == 1 and x.nrd() == 5
    assert x * x == x - 5
    assert eta.eta(x) == 1
    assert emb.verify(eta)
    assert x in cands
    # deterministic, and the other normalization is genuinely different
    again = optimal_embedding(R, 1, 5, eta=eta, eta_target=1)
    assert again.image == x
    other = optimal_embedding(R, 1, 5, eta=eta, eta_target=0)
    assert other.image != x and eta.eta(other.image) == 0
