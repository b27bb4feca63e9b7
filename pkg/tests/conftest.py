"""Shared builders for the worked 13-adic example: the quaternion order,
its level-5 character data, the quotient graph, the rank-two Hecke
eigenpair, and the CM fixed point, together with frozen reference
digits.  Everything is memoized so the expensive graph is built once
per test session."""

from fractions import Fraction
from functools import lru_cache

from atrpoints.cocycles import harmonic_basis, hecke_eigenpair
from atrpoints.padics import PadicField
from atrpoints.quaternions import (EtaMap, eichler_order, make_algebra,
                                   maximal_order, optimal_embedding)
from atrpoints.tree import TreeContext, compute_quotient


@lru_cache(maxsize=None)
def atr_setup():
    B = make_algebra(39, 13)
    one = B.one()
    i, j, k = B.gens()
    basis = [one, j, Fraction(5, 2) * (j + k),
             (one + i - 3 * j - 3 * k) * Fraction(1, 2)]
    R = eichler_order(B, 5, basis=basis)
    return R, EtaMap(R, 5)


@lru_cache(maxsize=None)
def atr_graph(group="gamma_psi"):
    R, eta = atr_setup()
    return compute_quotient(R, 13, group, eta=eta)


@lru_cache(maxsize=None)
def small_graph():
    return compute_quotient(maximal_order(make_algebra(2, 3)), 3, "gamma0")


@lru_cache(maxsize=None)
def eigenpair():
    return hecke_eigenpair(atr_graph())


@lru_cache(maxsize=None)
def section_gram():
    basis = harmonic_basis(atr_graph())
    return [[sum(x * y for x, y in zip(u, v)) for v in basis]
            for u in basis]


# -- the quadratic field side -----------------------------------------

@lru_cache(maxsize=None)
def quad_field(prec):
    """Unramified quadratic extension of Q_13 presented on a root g of
    x^2 - x + 5 (the ring generator of the CM order of discriminant
    -19), the basis all reference digits are written in."""
    return PadicField(13, prec, [5, -1, 1])


@lru_cache(maxsize=None)
def cm_point(prec):
    """Fixed point on the 13-adic upper half plane of the embedded
    quadratic order Z[w], w^2 = w - 5: the root tau of the quadratic
    equation c*tau^2 + (d - a)*tau - b = 0 cut out by the embedding
    matrix, with the lex-smaller digit vector; returns (tau, conjugate)."""
    R, eta = atr_setup()
    emb = optimal_embedding(R, 1, 5)
    ctx = TreeContext(R, 13, work_prec=prec + 8)
    m = ctx.iota(emb.image)
    K = quad_field(prec)
    a, b = K.from_int(m[0][0]), K.from_int(m[0][1])
    c, d = K.from_int(m[1][0]), K.from_int(m[1][1])
    disc = (d - a) ** 2 + 4 * b * c
    root = K.sqrt(disc)
    taus = [((a - d) + root) / (2 * c), ((a - d) - root) / (2 * c)]
    taus.sort(key=lambda t: t.digits())
    # genuinely quadratic: the trace field Q(sqrt(-19)) is inert at 13
    assert all(K.frobenius(t) != t for t in taus)
    return taus[0], taus[1]


def from_digit_pairs(K, pairs):
    """Element of the quadratic field with digit expansion
    sum (c + d*g) * 13^i from a list of (c, d) pairs."""
    acc = K.zero()
    g = K.gen()
    for i, (c, d) in enumerate(pairs):
        acc = acc + (K.from_int(c) + g * d) * K.from_int(13) ** i
    return acc


# first digits of the reference value of the integral J_0 attached to
# the first eigenvector, written on the basis (1, g)
J0_DIGITS = [(12, 8), (1, 3), (10, 7), (8, 8), (1, 7), (6, 7),
             (8, 9), (7, 7), (9, 4), (4, 4), (12, 5), (1, 8), (11, 11)]

# first digits of the CM fixed point tau in the same basis
TAU_DIGITS = [(1, 6), (12, 8), (11, 7), (3, 3), (9, 12), (1, 6)]


@lru_cache(maxsize=None)
def quartic_field(prec):
    """Unramified quartic extension of Q_13 presented on the generator
    h (root of x^4 + 3x^2 + 12x + 2) that the reference coordinate
    digits are written in."""
    return PadicField(13, prec, [2, 12, 3, 0, 1], gen_name="h")


@lru_cache(maxsize=None)
def lifted_table(digits):
    """Overconvergent moment table for the eigenpair, shared across
    test modules (the lift is deterministic, so caching is sound)."""
    from atrpoints.integrals import overconvergent_lift
    return overconvergent_lift(atr_graph(), eigenpair(), digits)


@lru_cache(maxsize=None)
def coordinate_witnesses(digits):
    """p-adic coordinates (x, y) of the reference point at the given
    working precision, as produced by the full integration + parameter
    map chain; returns (x, y, K4, curve)."""
    from atrpoints.integrals import DivisorPair, moment_integral
    from atrpoints.tatecurve import CurveOverF, TateCurve
    t0, t1 = cm_point(digits)
    J0 = moment_integral(atr_graph(), lifted_table(digits), 0,
                         DivisorPair(t0, t1))
    K4 = quartic_field(digits)
    u = K4.embedding_from(quad_field(digits))(J0).inv()
    curve = CurveOverF((-1296, -432), (-282960, -113184), delta=5,
                       conductor=39)
    x, y = TateCurve(curve, K4).point_from_parameter(u)
    return x, y, K4, curve


def from_digit_quads(K, rows):
    """Element of the quartic field with digit expansion
    sum (a + b*h + c*h^2 + d*h^3) * 13^i from (a, b, c, d) rows."""
    acc = K.zero()
    h = K.gen()
    for i, row in enumerate(rows):
        term = K.zero()
        for j, c in enumerate(row):
            term = term + K.from_int(c) * h ** j
        acc = acc + term * K.from_int(13) ** i
    return acc


# first digits of the reference point coordinates on the basis
# (1, h, h^2, h^3), lowest 13-adic digit first
X_REF_DIGITS = [(1, 4, 3, 12), (9, 1, 10, 9), (9, 3, 5, 6),
                (8, 0, 8, 6), (8, 5, 2, 8), (6, 4, 9, 4)]
Y_REF_DIGITS = [(9, 2, 5, 11), (10, 1, 12, 12), (7, 10, 7, 0),
                (7, 9, 5, 2), (4, 4, 2, 5), (11, 3, 0, 3)]
