"""Integer-valued harmonic cocycles on a quotient graph and the Hecke
action on them.

A cocycle assigns an integer to every oriented edge class, changing
sign under reversal, with vanishing outgoing sum at every vertex class
(the sum runs over the p+1 directions of the neighbor table, which
weights each edge class by its orbit multiplicity).  Values live on an
orientation section, one representative per reversal pair; self-paired
classes are forced to zero.  The harmonic lattice is the saturated
integer kernel of the vertex-sum constraints, so its rank is certified.

The Hecke operator at a prime ell (different from p) acts through the
finitely many cosets of norm ell·p^(2k) in the order: two elements x,
x' represent the same coset when conj(x)·x'/ell lies in the order with
p inverted — and, for the character-kernel group, is trivial under the
projective character.  Each representative moves an edge lift through
the splitting at p and the image is resolved back into the quotient.
"""

from fractions import Fraction

import sympy

from . import zlattice
from .quaternions import _inv2_mod, ramified_places, splitting_matrix_mod
from .tree import _mul2

_COSET_CACHE = {}
_HECKE_CACHE = {}


def orientation_section(graph):
    """One representative id per reversal pair of oriented classes."""
    return [e.id for e in graph.edges if e.id < e.rev]


def expand(graph, svec, section=None):
    """Full oriented value vector from values on the section."""
    if section is None:
        section = orientation_section(graph)
    out = [0] * graph.n_oriented_edges()
    for i, eid in enumerate(section):
        out[eid] = svec[i]
        out[graph.edges[eid].rev] = -svec[i]
    return out


def is_harmonic(graph, full):
    if any(full[e.id] + full[e.rev] != 0 for e in graph.edges):
        return False
    return all(sum(full[eid] for eid, _, _ in row) == 0
               for row in graph.tables)


def harmonic_basis(graph):
    """Saturated integer basis of the harmonic cocycles, as value
    vectors on the orientation section."""
    section = orientation_section(graph)
    pos = {eid: i for i, eid in enumerate(section)}
    rows = []
    for row in graph.tables:
        coeff = [0] * len(section)
        for eid, _, _ in row:
            e = graph.edges[eid]
            if e.id < e.rev:
                coeff[pos[eid]] += 1
            elif e.rev < e.id:
                coeff[pos[e.rev]] -= 1
            # a self-paired class carries no harmonic value
        rows.append(coeff)
    ker = zlattice.kernel_basis(rows)
    assert all(is_harmonic(graph, expand(graph, v, section)) for v in ker)
    return [tuple(v) for v in ker]


def _same_coset(ctx, x, y, ell):
    """Whether x and y generate the same left coset of the group:
    conj(x)·y/ell must lie in the order with p inverted and, for the
    character-kernel group, be trivial under the projective character."""
    z = (x.conj() * y) * Fraction(1, ell)
    coords = ctx.order.coordinates(z)
    lift = 0
    for c in coords:
        den = c.denominator
        e = 0
        while den % ctx.p == 0:
            den //= ctx.p
            e += 1
        if den != 1:
            return False
        lift = max(lift, e)
    if ctx.group == "gamma0":
        return True
    return ctx.eta.psi_eta_projective(z * ctx.p ** lift, ctx.p) == 1


def _psi_star(eta, x, p):
    """Extension of the projective character to elements whose norm is
    ell times an even power of p: constant on right cosets of the
    character-kernel group, and negated by the nontrivial deck coset."""
    n = int(x.nrd())
    k = 0
    while n % (p * p) == 0:
        n //= p * p
        k += 1
    assert n % p != 0, "norm must have even valuation at p"
    return eta.psi_eta(x) * eta.psi(p) ** k


def _proj_line(v, ell):
    """Normalized representative of a projective line over Z/ell."""
    if v[0] % ell:
        t = pow(v[0], -1, ell)
        return (1, v[1] * t % ell)
    assert v[1] % ell, "zero vector has no line"
    return (0, 1)


def _left_null_line(B, x, ell):
    """Left kernel of the mod-ell splitting image of x, a rank-one
    matrix when ell divides the norm exactly once.  Right cosets of
    the norm-p-power unit group are separated by this line: a right
    factor multiplies the image on the right and fixes the row kernel."""
    m = splitting_matrix_mod(B, x, ell)
    a, b = m[0][0] % ell, m[0][1] % ell
    c, d = m[1][0] % ell, m[1][1] % ell
    assert (a * d - b * c) % ell == 0 and (a or b or c or d), \
        "splitting image is not of rank one"
    if a or c:
        return _proj_line((c, (-a) % ell), ell)
    return _proj_line((d, (-b) % ell), ell)


def _cosets_by_line_transport(graph, ell, expected):
    """Candidate representatives for all ell+1 cosets at an odd split
    prime away from the level, without deep norm enumeration.  Seeds of
    norm ell land on some of the null lines; left multiplication by
    norm-p^2 elements transports a representative to any missing line,
    and a right factor with nontrivial character moves within its coset
    to the trivial fiber.  Returns None when transport stalls."""
    ctx = graph.ctx
    p = ctx.p
    seeds = []
    for k in range(4):
        seeds = ctx.order.enumerate_by_norm(ell * p ** (2 * k))
        if seeds:
            break
    covered = {}
    for x in seeds:
        line = _left_null_line(ctx.B, x, ell)
        if line not in covered:
            covered[line] = x
    pool = [(w, _inv2_mod(splitting_matrix_mod(ctx.B, w, ell), ell))
            for w in ctx.order.enumerate_by_norm(p * p)]
    queue = list(covered)
    qi = 0
    while qi < len(queue) and len(covered) < expected:
        line = queue[qi]
        qi += 1
        y = covered[line]
        for w, wi in pool:
            # the line of w*y is line . iota(w)^(-1)
            moved = _proj_line(
                ((line[0] * wi[0][0] + line[1] * wi[1][0]) % ell,
                 (line[0] * wi[0][1] + line[1] * wi[1][1]) % ell), ell)
            if moved not in covered:
                covered[moved] = w * y
                queue.append(moved)
            if len(covered) == expected:
                break
    if len(covered) != expected:
        return None
    reps = [covered[line] for line in sorted(covered)]
    if ctx.group == "gamma_psi":
        flip = next((w for w, _ in pool
                     if _psi_star(ctx.eta, w, p) == -1), None)
        assert flip is not None, "character is trivial on norm-p^2 units"
        reps = [y if _psi_star(ctx.eta, y, p) == 1 else y * flip
                for y in reps]
    return reps


def _cosets_by_enumeration(graph, ell, expected):
    """Representatives by direct search through norms ell·p^(2k) with
    growing k, deduplicating against the coset equivalence.  Complete
    but slow when ell·p^2 is large."""
    ctx = graph.ctx
    reps = []
    for k in range(4):
        for x in ctx.order.enumerate_by_norm(ell * ctx.p ** (2 * k)):
            if len(reps) == expected:
                break
            if ctx.group == "gamma_psi" \
                    and _psi_star(ctx.eta, x, ctx.p) != 1:
                continue
            if all(not _same_coset(ctx, x, r, ell) for r in reps):
                reps.append(x)
        assert len(reps) <= expected, "coset equivalence is too fine"
        if len(reps) == expected:
            break
    else:
        raise RuntimeError(
            f"Hecke coset search at {ell} found {len(reps)} of "
            f"{expected} classes")
    return reps


def hecke_cosets(graph, ell):
    """Deterministic coset representatives for the Hecke operator at
    ell: ell+1 of them away from the level, ell at a level prime, one
    at a ramified prime.  For the character-kernel group the norm-ell
    set carries twice as many right cosets, in two fibers of the
    extended character; the operator uses the trivial fiber, which
    restricts to the classical operator on functions invariant under
    the full norm-one group.  Representatives come from null-line
    transport when available, else from norm enumeration, and in
    either case are certified pairwise inequivalent before caching."""
    key = (graph.graph_hash(), ell)
    if key in _COSET_CACHE:
        return _COSET_CACHE[key]
    ctx = graph.ctx
    assert sympy.isprime(ell) and ell != ctx.p
    ram = [q for q in ramified_places(ctx.B.a, ctx.B.b) if q != "oo"]
    disc_b = 1
    for q in ram:
        disc_b *= q
    level = ctx.order.reduced_discriminant() // disc_b
    if ell in ram:
        expected = 1
    elif level % ell == 0:
        expected = ell
    else:
        expected = ell + 1
    reps = None
    if ell % 2 and expected == ell + 1:
        reps = _cosets_by_line_transport(graph, ell, expected)
    if reps is None:
        reps = _cosets_by_enumeration(graph, ell, expected)
    assert len(reps) == expected
    for a in range(expected):
        if ctx.group == "gamma_psi":
            assert _psi_star(ctx.eta, reps[a], ctx.p) == 1
        for b in range(a + 1, expected):
            assert not _same_coset(ctx, reps[a], reps[b], ell), \
                "representatives collide"
    _COSET_CACHE[key] = reps
    return reps


def hecke_image(graph, ell, svec, section=None, reps=None):
    """Value vector of T_ell applied to the cocycle given on the
    orientation section."""
    ctx = graph.ctx
    if section is None:
        section = orientation_section(graph)
    if reps is None:
        reps = hecke_cosets(graph, ell)
    full = expand(graph, svec, section)
    out = []
    for eid in section:
        vs, vt = graph.edges[eid].lift
        ms, mt = ctx.matrix(vs), ctx.matrix(vt)
        tot = 0
        for g in reps:
            # g^(-1) acts as conj(g) up to homothety
            gc = ctx.iota(g.conj())
            image = (ctx.vertex_nf(_mul2(gc, ms)),
                     ctx.vertex_nf(_mul2(gc, mt)))
            cls, _ = graph.resolve_edge(image)
            tot += full[cls]
        out.append(tot)
    return tuple(out)


def _coords_in_basis(basis, target):
    """Integer coordinates of target in the lattice spanned by basis,
    via a saturated kernel; asserts membership."""
    n = len(basis)
    rows = [[basis[j][r] for j in range(n)] + [target[r]]
            for r in range(len(target))]
    ker = zlattice.kernel_basis(rows)
    assert len(ker) == 1, "image escaped the harmonic lattice"
    vec, c = ker[0][:n], ker[0][n]
    assert abs(c) == 1, "Hecke image is not integral on the lattice"
    return [-x * c for x in vec]


def hecke_operator(graph, ell, basis=None):
    """Matrix of T_ell on the harmonic basis (columns are images)."""
    canonical = basis is None
    key = (graph.graph_hash(), ell)
    if canonical and key in _HECKE_CACHE:
        return _HECKE_CACHE[key]
    if basis is None:
        basis = harmonic_basis(graph)
    section = orientation_section(graph)
    reps = hecke_cosets(graph, ell)
    cols = []
    for b in basis:
        img = hecke_image(graph, ell, b, section, reps)
        assert is_harmonic(graph, expand(graph, img, section))
        cols.append(_coords_in_basis(basis, img))
    n = len(basis)
    M = [[cols[j][i] for j in range(n)] for i in range(n)]
    if canonical:
        _HECKE_CACHE[key] = M
    return M


def _mat_apply(M, v):
    return [sum(M[i][j] * v[j] for j in range(len(v)))
            for i in range(len(M))]


def _combine(vectors, coords):
    return tuple(sum(c * vec[r] for c, vec in zip(coords, vectors))
                 for r in range(len(vectors[0])))


class HeckeEigenPair:
    """Rank-two eigenlattice cut out by Hecke constraints, carrying the
    quaternionic structure T_ell0·h0 = -h1, T_ell0·h1 = h0 for the
    ramified operator ell0 (so T_ell0 squares to -1 on the plane)."""

    def __init__(self, graph, section, basis, h0, h1, coords0, coords1,
                 structure_ell, matrices):
        self.graph = graph
        self.section = section
        self.basis = basis
        self.h0 = h0
        self.h1 = h1
        self.coords0 = coords0
        self.coords1 = coords1
        self.structure_ell = structure_ell
        self.matrices = matrices
        # action of the structure operator on the ordered pair (h0, h1)
        self.structure_plane = [[0, 1], [-1, 0]]

    def full_values(self, which):
        svec = self.h0 if which == 0 else self.h1
        return expand(self.graph, svec, self.section)


def hecke_eigenpair(graph, constraints=((19, 4), (2, 0)), structure_ell=3):
    """Cut the harmonic lattice down by ker(T_ell - a) for each (ell, a)
    constraint; the result must have rank 2.  h0 is the shortest vector
    (first entry positive), h1 = -T_ell0·h0 its quaternionic partner."""
    basis = harmonic_basis(graph)
    section = orientation_section(graph)
    n = len(basis)
    rows = []
    matrices = {}
    for ell, a in constraints:
        M = hecke_operator(graph, ell)
        matrices[ell] = M
        rows.extend([M[i][j] - (a if i == j else 0) for j in range(n)]
                    for i in range(n))
    ker = zlattice.kernel_basis(rows) if rows else zlattice.identity_matrix(n)
    if len(ker) != 2:
        raise RuntimeError(
            f"eigenlattice for constraints {list(constraints)} has rank "
            f"{len(ker)}, expected 2")
    vecs = [_combine(basis, kv) for kv in ker]
    gram = [[sum(x * y for x, y in zip(u, v)) for v in vecs] for u in vecs]
    _, U = zlattice.lll_gram_transform(gram)
    coords0 = [sum(U[0][t] * ker[t][j] for t in range(2)) for j in range(n)]
    h0 = _combine(basis, coords0)
    lead = next(v for v in h0 if v)
    if lead < 0:
        h0 = tuple(-v for v in h0)
        coords0 = [-c for c in coords0]
    M3 = hecke_operator(graph, structure_ell)
    matrices[structure_ell] = M3
    coords1 = [-c for c in _mat_apply(M3, coords0)]
    assert _mat_apply(M3, coords1) == coords0, \
        "structure operator does not square to -1 on the plane"
    h1 = _combine(basis, coords1)
    # both vectors satisfy every constraint exactly
    for ell, a in constraints:
        M = matrices[ell]
        for c in (coords0, coords1):
            assert _mat_apply(M, c) == [a * x for x in c]
    return HeckeEigenPair(graph, section, basis, h0, h1, coords0, coords1,
                          structure_ell, matrices)
