"""Tests for the tree quotient machinery: normal forms, certified
equivalence, quotient graphs with stabilizers, and persistence."""

import json
import random
from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from atrpoints.quaternions import (EtaMap, eichler_order, make_algebra,
                                   maximal_order)
from atrpoints.tree import (QuotientGraph, TreeContext, _mul2,
                            compute_quotient, vertex_normal_form)


@lru_cache(maxsize=None)
def atr_setup():
    """Level-5 order in the algebra ramified at 3·13 and infinity,
    with its residue character at 5."""
    B = make_algebra(39, 13)
    one = B.one()
    i, j, k = B.gens()
    basis = [one, j, Fraction(5, 2) * (j + k),
             (one + i - 3 * j - 3 * k) * Fraction(1, 2)]
    R = eichler_order(B, 5, basis=basis)
    return R, EtaMap(R, 5)


@lru_cache(maxsize=None)
def atr_graph(group):
    R, eta = atr_setup()
    return compute_quotient(R, 13, group, eta=eta)


@lru_cache(maxsize=None)
def small_graph():
    """Maximal order in the algebra ramified at 2 and infinity, p = 3:
    large stabilizers, a single unoriented edge class."""
    return compute_quotient(maximal_order(make_algebra(2, 3)), 3, "gamma0")


# -- normal forms --

def test_normal_form_pins():
    assert vertex_normal_form([[1, 0], [0, 1]], 13) == (0, 0, 0)
    assert vertex_normal_form([[13, 0], [0, 13]], 13) == (0, 0, 0)
    assert vertex_normal_form([[13, 1], [0, 1]], 13) == (1, 1, 0)
    # clearing the bottom row is a genuine column operation
    assert vertex_normal_form([[13, 0], [1, 1]], 13) == (1, 0, 0)
    # these two span different lattices even though they agree mod p
    assert vertex_normal_form([[13, 1], [0, 1]], 13) \
        != vertex_normal_form([[13, 0], [1, 1]], 13)
    # scaling is a homothety, including by rationals
    assert vertex_normal_form([[Fraction(1, 13), 0], [0, 1]], 13) == (0, 0, 1)


def test_normal_form_rejects_singular():
    with pytest.raises(ValueError):
        vertex_normal_form([[1, 1], [1, 1]], 13)
    with pytest.raises(ValueError):
        vertex_normal_form([[0, 0], [0, 0]], 13)


@settings(max_examples=60, deadline=None)
@given(st.integers(-200, 200), st.integers(-200, 200),
       st.integers(-200, 200), st.integers(-200, 200),
       st.lists(st.sampled_from(["U", "L", "S", "N", "P", "Q"]),
                max_size=6),
       st.integers(0, 1))
def test_normal_form_invariant_under_unit_column_ops(a, b, c, d, word, tw):
    """Right multiplication by integer matrices of unit determinant and
    global scaling never change the canonical form."""
    p = [3, 13][tw]
    if (a * d - b * c) == 0:
        return
    M = [[a, b], [c, d]]
    nf = vertex_normal_form(M, p)
    gens = {"U": [[1, 1], [0, 1]], "L": [[1, 0], [1, 1]],
            "S": [[0, 1], [1, 0]], "N": [[1, -1], [0, 1]],
            "P": [[-1, 0], [0, 1]], "Q": [[2, 1], [1, 1]]}
    for w in word:
        M = _mul2(M, gens[w])
    M = [[Fraction(x, p) for x in row] for row in M]
    assert vertex_normal_form(M, p) == nf


def test_neighbors_and_geodesics():
    R, eta = atr_setup()
    ctx = TreeContext(R, 13, "gamma_psi", eta)
    root = ctx.vertex_nf([[1, 0], [0, 1]])
    nbrs = ctx.neighbors(root)
    assert len(set(nbrs)) == 14
    assert all(ctx.distance(v) == 1 for v in nbrs)
    rng = random.Random(5)
    v = root
    for _ in range(4):
        v = ctx.neighbors(v)[rng.randrange(14)]
    # adjacency is symmetric and the geodesic walks back to v
    w = ctx.neighbors(v)[3]
    assert v in ctx.neighbors(w)
    dirs = ctx.geodesic_from_root(v)
    assert len(dirs) == ctx.distance(v)
    u = root
    for jj in dirs:
        u = ctx.neighbors(u)[jj]
    assert u == v


# -- equivalence --

def test_planted_vertex_equivalence():
    R, eta = atr_setup()
    ctx = TreeContext(R, 13, "gamma_psi", eta)
    root = ctx.vertex_nf([[1, 0], [0, 1]])
    movers = [g for g in R.enumerate_by_norm(169)
              if eta.psi_eta_projective(g, 13) == 1]
    g0 = next(g for g in movers
              if ctx.vertex_nf(_mul2(ctx.iota(g), ctx.matrix(root))) != root)
    w = ctx.vertex_nf(_mul2(ctx.iota(g0), ctx.matrix(root)))
    assert ctx.distance(w) == 2
    g1 = ctx.are_equivalent(root, w)
    assert g1 is not None
    assert ctx.vertex_nf(_mul2(ctx.iota(g1), ctx.matrix(root))) == w
    assert eta.psi_eta_projective(g1, 13) == 1
    # plant on a deeper vertex as well
    v = ctx.neighbors(ctx.neighbors(root)[7])[2]
    x = ctx.vertex_nf(_mul2(ctx.iota(g0), ctx.matrix(v)))
    g2 = ctx.are_equivalent(v, x)
    assert g2 is not None
    assert ctx.vertex_nf(_mul2(ctx.iota(g2), ctx.matrix(v))) == x


def test_depth_parity_obstruction():
    R, eta = atr_setup()
    ctx = TreeContext(R, 13, "gamma_psi", eta)
    root = ctx.vertex_nf([[1, 0], [0, 1]])
    assert ctx.are_equivalent(root, ctx.neighbors(root)[0]) is None


def test_lifts_pairwise_inequivalent():
    graph = atr_graph("gamma_psi")
    ctx = graph.ctx
    lifts = graph.vertex_lifts
    for a in range(len(lifts)):
        for b in range(a + 1, len(lifts)):
            assert ctx.are_equivalent(lifts[a], lifts[b]) is None


# -- the quotient graph of the run configuration --

def test_quotient_counts():
    graph = atr_graph("gamma_psi")
    assert graph.n_vertices() == 4
    assert graph.n_oriented_edges() == 56
    assert graph.n_edges() == 28
    assert graph.betti() == 25
    assert all(len(s) == 1 for s in graph.vertex_stabilizers)
    assert not any(e.rev == e.id for e in graph.edges)
    # every vertex class sees all 14 directions
    assert all(len(row) == 14 for row in graph.tables)


def test_quotient_pair_multiset():
    graph = atr_graph("gamma_psi")
    counts = graph.class_pair_counts()
    assert sorted(counts.values()) == [6, 6, 8, 8]
    assert 8 in counts.values()
    # the tree is bipartite and the group preserves depth parity
    ctx = graph.ctx
    parity = [ctx.distance(v) % 2 for v in graph.vertex_lifts]
    for e in graph.edges:
        assert parity[e.src] != parity[e.tgt]


def test_quotient_gamma0_halves_masses():
    """The norm-one quotient double covers the quotient by the kernel
    of the character: stabilizer-weighted counts drop by half."""
    gpsi = atr_graph("gamma_psi")
    g0 = atr_graph("gamma0")
    vmass = sum(Fraction(1, len(s)) for s in g0.vertex_stabilizers)
    emass = sum(Fraction(1, len(g0.edge_stabilizer(e.id)))
                for e in g0.edges if e.id <= e.rev)
    assert vmass == Fraction(gpsi.n_vertices(), 2) == 2
    assert emass == Fraction(gpsi.n_edges(), 2) == 14


def test_small_algebra_quotient():
    """Class number one with large unit groups: one vertex class per
    depth parity, a single unoriented edge class, tree-like quotient."""
    graph = small_graph()
    assert graph.n_vertices() == 2
    assert graph.n_oriented_edges() == 2
    assert graph.n_edges() == 1
    assert graph.betti() == 0
    # unit group of the maximal order modulo +-1 has order 12
    assert [len(s) for s in graph.vertex_stabilizers] == [12, 12]
    for st_ in graph.vertex_stabilizers:
        # representatives are primitive; as group elements they have
        # norm one, so the representative norm is an even power of p
        for g in st_:
            n = int(g.nrd())
            while n % (graph.p ** 2) == 0:
                n //= graph.p ** 2
            assert n == 1


def test_orbit_stabilizer_accounting():
    """Direction multiplicity of an edge class equals the index of its
    stabilizer in the source vertex stabilizer."""
    graph = small_graph()
    for c in range(graph.n_vertices()):
        row = [eid for eid, _, _ in graph.tables[c]]
        sv = len(graph.vertex_stabilizers[c])
        for eid in set(row):
            se = len(graph.edge_stabilizer(eid))
            assert row.count(eid) * se == sv
        assert len(row) == graph.p + 1


def test_edge_stabilizer_inside_vertex_stabilizers():
    graph = small_graph()
    ctx = graph.ctx
    for e in graph.edges:
        stab_e = {tuple(g.c) for g in graph.edge_stabilizer(e.id)}
        for v in e.lift:
            stab_v = {tuple(g.c) for g in ctx.stabilizer(v)}
            assert stab_e <= stab_v


def test_pairing_involution():
    for graph in (atr_graph("gamma_psi"), small_graph()):
        for e in graph.edges:
            back = graph.edges[e.rev]
            assert back.rev == e.id
            assert (back.src, back.tgt) == (e.tgt, e.src)


# -- resolution, persistence, determinism --

def test_resolve_random_vertices_and_edges():
    graph = atr_graph("gamma_psi")
    ctx = graph.ctx
    rng = random.Random(11)
    v = ctx.vertex_nf([[1, 0], [0, 1]])
    for step in range(4):
        v = ctx.neighbors(v)[rng.randrange(14)]
        c, g = graph.resolve_vertex(v)
        assert ctx.vertex_nf(_mul2(ctx.iota(g), ctx.matrix(v))) \
            == graph.vertex_lifts[c]
        w = ctx.neighbors(v)[rng.randrange(14)]
        eid, ge = graph.resolve_edge((v, w))
        lift = graph.edges[eid].lift
        assert ctx.vertex_nf(_mul2(ctx.iota(ge), ctx.matrix(v))) == lift[0]
        assert ctx.vertex_nf(_mul2(ctx.iota(ge), ctx.matrix(w))) == lift[1]


def test_json_roundtrip_and_hash():
    graph = atr_graph("gamma_psi")
    _, eta = atr_setup()
    blob = graph.to_json()
    again = QuotientGraph.from_json(blob, eta=eta)
    assert again.graph_hash() == graph.graph_hash()
    assert again.vertex_lifts == graph.vertex_lifts
    assert [e.rev for e in again.edges] == [e.rev for e in graph.edges]
    assert json.loads(blob)["group"] == "gamma_psi"


def test_quotient_is_deterministic():
    R, eta = atr_setup()
    again = compute_quotient(R, 13, "gamma_psi", eta=eta)
    assert again.graph_hash() == atr_graph("gamma_psi").graph_hash()


def test_export_dot():
    graph = atr_graph("gamma_psi")
    dot = graph.export_dot()
    assert dot.count(" -- ") == 28
    assert "v3" in dot and dot.startswith("graph")


def test_radius_cap_raises():
    R, eta = atr_setup()
    with pytest.raises(RuntimeError, match="radius"):
        compute_quotient(R, 13, "gamma_psi", eta=eta, radius_cap=0)
