"""Quotients of the p-adic lattice tree under p-arithmetic quaternionic
groups: normal forms for vertices and edges, certified equivalence
search, and breadth-first computation of the finite quotient graph with
stabilizers and transport elements.

Vertices are homothety classes of rank-2 lattices, kept in the unique
column Hermite form [[p^a, b], [0, p^d]] with 0 <= b < p^a and at least
one of a, d, v_p(b) equal to zero; the distance to the base vertex is
a + d.  The splitting of the quaternion algebra at p is carried as
integer matrices mod p^W for a generous working exponent W, and every
valuation the algorithms branch on is asserted to sit far below W, so
all normal forms are exact.  Equivalence of two vertices under the
norm-one group of the order with p inverted reduces to enumerating
order elements of norm p^(2m) in an explicit congruence sublattice;
the search is complete (Fincke-Pohst) and the range of m is certified:
a carrier moves the base vertex by at most the sum of the two depths.
"""

from fractions import Fraction
import hashlib
import json
from math import gcd

import sympy

from . import zlattice
from .quaternions import QuaternionAlgebra, QuatOrder


def _mul2(A, B):
    return [[A[0][0] * B[0][0] + A[0][1] * B[1][0],
             A[0][0] * B[0][1] + A[0][1] * B[1][1]],
            [A[1][0] * B[0][0] + A[1][1] * B[1][0],
             A[1][0] * B[0][1] + A[1][1] * B[1][1]]]


def _mod2(A, m):
    return [[A[0][0] % m, A[0][1] % m], [A[1][0] % m, A[1][1] % m]]


def _hensel_sqrt(a, p, prec):
    """Square root of a mod p^prec by Newton lifting (odd p), keeping
    the smallest-residue root mod p; None for non-residues."""
    a %= p ** prec
    r = next((r for r in range(1, p) if (r * r - a) % p == 0), None)
    if r is None:
        return None
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        m = p ** k
        r = (r + a * pow(r, -1, m)) * pow(2, -1, m) % m
    return r


def _padic_splitting_pair(B, p, prec):
    """Matrices I, J mod p^prec with I^2 = a, J^2 = b, IJ = -JI."""
    mod = p ** prec
    a = Fraction(B.a)
    b = Fraction(B.b)
    a = a.numerator * pow(a.denominator, -1, mod) % mod
    b = b.numerator * pow(b.denominator, -1, mod) % mod
    assert a % p and b % p, "generators must be units at p"
    s = _hensel_sqrt(a, p, prec)
    if s is not None:
        I = [[s, 0], [0, mod - s]]
        J = [[0, 1], [b, 0]]
    else:
        t = _hensel_sqrt(b, p, prec)
        if t is not None:
            J = [[t, 0], [0, mod - t]]
            I = [[0, 1], [a, 0]]
        else:
            # u^2 - a v^2 = b is solvable with u a unit (norm form of
            # the unramified quadratic extension); Newton-lift u
            base = next(((u, v) for u in range(1, p) for v in range(p)
                         if (u * u - a * v * v - b) % p == 0), None)
            assert base is not None, f"algebra not split at {p}"
            u, v = base
            k = 1
            while k < prec:
                k = min(2 * k, prec)
                m = p ** k
                u = (u + (b + a * v * v) * pow(u, -1, m)) \
                    * pow(2, -1, m) % m
            I = [[0, 1], [a, 0]]
            J = [[u, v], [(-a * v) % mod, (mod - u) % mod]]
    assert _mod2(_mul2(I, I), mod) == [[a, 0], [0, a]]
    assert _mod2(_mul2(J, J), mod) == [[b, 0], [0, b]]
    anti = _mul2(I, J)
    assert _mod2(_mul2(J, I), mod) == [[(-x) % mod for x in row]
                                       for row in anti]
    return I, J


class TreeContext:
    """Splitting data at p plus normal-form and equivalence machinery
    for one order and one arithmetic group ("gamma0" or "gamma_psi")."""

    MARGIN = 8

    def __init__(self, order, p, group="gamma0", eta=None, work_prec=48):
        assert sympy.isprime(p)
        assert group in ("gamma0", "gamma_psi")
        assert group == "gamma0" or eta is not None, \
            "the psi-kernel group needs the level map"
        assert order.reduced_discriminant() % p != 0, \
            "the tree needs a prime where the order is split"
        self.order = order
        self.B = order.B
        self.p = p
        self.group = group
        self.eta = eta
        self.W = work_prec
        self.mod = p ** work_prec
        self.I2, self.J2 = _padic_splitting_pair(self.B, p, work_prec)
        K2 = _mod2(_mul2(self.I2, self.J2), self.mod)
        self._gens = [[[1, 0], [0, 1]], self.I2, self.J2, K2]
        self._iota_basis = [self.iota(x) for x in order.basis]
        self._gram = [[int(v) for v in row] for row in order.gram()]
        self._dirs = [[[p, r], [0, 1]] for r in range(p)] \
            + [[[1, 0], [0, p]]]

    # -- matrices and normal forms --

    def iota(self, x):
        """Image of the order element as a 2x2 matrix mod p^W."""
        out = [[0, 0], [0, 0]]
        for fr, m in zip(x.c, self._gens):
            c = fr.numerator * pow(fr.denominator, -1, self.mod) % self.mod
            for r in range(2):
                for s in range(2):
                    out[r][s] = (out[r][s] + c * m[r][s]) % self.mod
        return out

    def vertex_nf(self, M):
        """Canonical (a, b, d) with lattice [[p^a, b], [0, p^d]]."""
        return _vertex_nf(M, self.p, self.W)

    def matrix(self, v):
        a, b, d = v
        return [[self.p ** a, b], [0, self.p ** d]]

    def distance(self, v):
        """Tree distance from the base vertex (the identity lattice)."""
        return v[0] + v[2]

    def directions(self):
        return self._dirs

    def neighbors(self, v):
        Vm = self.matrix(v)
        return [self.vertex_nf(_mul2(Vm, D)) for D in self._dirs]

    def geodesic_from_root(self, v):
        """Direction indices walking from the base vertex to v."""
        chain = [v]
        while self.distance(chain[-1]):
            down = [w for w in self.neighbors(chain[-1])
                    if self.distance(w) < self.distance(chain[-1])]
            assert len(down) == 1  # unique parent in a tree
            chain.append(down[0])
        chain.reverse()
        return [self.neighbors(chain[k]).index(chain[k + 1])
                for k in range(len(chain) - 1)]

    # -- equivalence under the arithmetic group --

    def _character_ok(self, gam):
        if self.group == "gamma0":
            return True
        return self.eta.psi_eta_projective(gam, self.p) == 1

    def _congruence_lattice(self, conds):
        """Rows (coordinates on the order basis) spanning the x with
        adj(W)·iota(x)·U = 0 mod p^s for every condition (U, W, s)."""
        T, mods = [], []
        for U, W, s in conds:
            ps = self.p ** s
            adjW = [[W[1][1], -W[0][1]], [-W[1][0], W[0][0]]]
            ents = [_mod2(_mul2(_mul2(adjW, ib), U), ps)
                    for ib in self._iota_basis]
            for r in (0, 1):
                for c in (0, 1):
                    T.append([ents[k][r][c] for k in range(4)])
                    mods.append(ps)
        n = len(T)
        big = [T[i] + [mods[i] if j == i else 0 for j in range(n)]
               for i in range(n)]
        ker = zlattice.kernel_basis(big)
        assert len(ker) == 4
        return [k[:4] for k in ker]

    def are_equivalent(self, x, y, all_solutions=False):
        """Group element gamma with gamma·x = y, for two vertices or
        two edges (pairs of adjacent vertices); None when certified
        inequivalent.  With all_solutions, the complete list over the
        certified norm range — used for stabilizers."""
        pairs = list(zip(x, y)) if isinstance(x[0], tuple) else [(x, y)]
        empty = [] if all_solutions else None
        for u, w in pairs:
            if (self.distance(u) - self.distance(w)) % 2:
                return empty  # the group preserves depth parity
        sols = []
        p = self.p
        d1 = self.distance(pairs[0][0])
        d2 = self.distance(pairs[0][1])
        for m in range((d1 + d2) // 2 + 1):
            conds = [(self.matrix(u), self.matrix(w),
                      m + (self.distance(u) + self.distance(w)) // 2)
                     for u, w in pairs]
            lam = self._congruence_lattice(conds)
            G = [[sum(lam[i][r] * self._gram[r][t] * lam[j][t]
                      for r in range(4) for t in range(4))
                  for j in range(4)] for i in range(4)]
            for yc in sorted(zlattice.fincke_pohst(G, 2 * p ** (2 * m))):
                coords = [sum(yc[i] * lam[i][r] for i in range(4))
                          for r in range(4)]
                gam = self.order.element_from_coordinates(coords)
                assert gam.nrd() == p ** (2 * m)
                if not self._character_ok(gam):
                    continue
                ig = self.iota(gam)
                assert all(self.vertex_nf(_mul2(ig, self.matrix(u))) == w
                           for u, w in pairs), "inexact working precision"
                if not all_solutions:
                    return gam
                sols.append(gam)
        return sols if all_solutions else None

    def stabilizer(self, x):
        """Stabilizer of a vertex or edge, as elements normalized mod
        {±1, powers of p}; [1] alone means the stabilizer is trivial."""
        out = {}
        for g in self.are_equivalent(x, x, all_solutions=True):
            c = list(g.c)
            v = min(sympy.multiplicity(self.p, abs(f.numerator))
                    for f in c if f != 0)
            c = [f / self.p ** v for f in c]
            lead = next(f for f in c if f != 0)
            if lead < 0:
                c = [-f for f in c]
            out[tuple(c)] = self.B.elt(*c)
        return [out[k] for k in sorted(out)]


def _intval(x, p, cap):
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _vertex_nf(M, p, work_prec):
    """Column Hermite reduction over the p-adic integers with entries
    carried mod p^W: unique class representative (a, b, d) standing for
    [[p^a, b], [0, p^d]], 0 <= b < p^a, min(a, d, v_p(b)) = 0."""
    W = work_prec
    mod = p ** W
    margin = W - TreeContext.MARGIN
    ents = [M[0][0], M[0][1], M[1][0], M[1][1]]
    if any(isinstance(x, Fraction) for x in ents):
        den = 1
        for x in ents:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
        ents = [int(Fraction(x) * den) for x in ents]
    a00, a01, a10, a11 = (x % mod for x in ents)
    g = min(_intval(x, p, W) for x in (a00, a01, a10, a11))
    if g > margin:
        raise ValueError("matrix is singular to working precision")
    if g:
        q = p ** g
        a00, a01, a10, a11 = a00 // q, a01 // q, a10 // q, a11 // q
    # pivot on the bottom-row entry of smaller valuation (column 1)
    if _intval(a10, p, W) < _intval(a11, p, W):
        a00, a01, a10, a11 = a01, a00, a11, a10
    dv = _intval(a11, p, W)
    if dv > margin:
        raise ValueError("matrix is singular to working precision")
    unit = pow(a11 // p ** dv, -1, mod)
    if a10:
        q = (a10 // p ** dv) * unit % mod
        a00 = (a00 - q * a01) % mod
    av = _intval(a00, p, W)
    if av > margin:
        raise ValueError("matrix is singular to working precision")
    b = a01 * unit % mod % p ** av
    assert min(av, dv, _intval(b, p, W) if b else W) == 0
    return (av, b, dv)


def vertex_normal_form(M, p, work_prec=48):
    """Canonical form of a lattice class without building a full
    context: returns (a, b, d) for [[p^a, b], [0, p^d]]."""
    return _vertex_nf(M, p, work_prec)


class EdgeClass:
    __slots__ = ("id", "src", "tgt", "lift", "rev")

    def __init__(self, eid, src, tgt, lift):
        self.id = eid
        self.src = src
        self.tgt = tgt
        self.lift = lift  # (source NF, target NF), source a class lift
        self.rev = None

    def __repr__(self):
        return f"e{self.id}({self.src}->{self.tgt})"


class QuotientGraph:
    """Finite quotient of the tree: chosen vertex lifts, oriented edge
    classes with the reversal pairing, per-vertex neighbor tables with
    transport group elements, and stabilizers."""

    def __init__(self, ctx, lifts, edges, tables, stabilizers):
        self.ctx = ctx
        self.p = ctx.p
        self.group = ctx.group
        self.vertex_lifts = lifts
        self.edges = edges
        self.tables = tables
        self.vertex_stabilizers = stabilizers
        self._nbr_cache = {}
        self._edge_stab_cache = {}

    # -- counting --

    def n_vertices(self):
        return len(self.vertex_lifts)

    def n_oriented_edges(self):
        return len(self.edges)

    def n_edges(self):
        """Unoriented count; a self-reversed class counts once."""
        return sum(1 for e in self.edges if e.id <= e.rev)

    def betti(self):
        return self.n_edges() - self.n_vertices() + 1

    def class_pair_counts(self):
        """Multiset of unoriented edge multiplicities per vertex-class
        pair, as a dict {(c1 <= c2): count}."""
        out = {}
        for e in self.edges:
            if e.id <= e.rev:
                key = (min(e.src, e.tgt), max(e.src, e.tgt))
                out[key] = out.get(key, 0) + 1
        return out

    def edge_stabilizer(self, eid):
        if eid not in self._edge_stab_cache:
            self._edge_stab_cache[eid] = self.ctx.stabilizer(
                self.edges[eid].lift)
        return self._edge_stab_cache[eid]

    # -- resolution of arbitrary tree data into the quotient --

    def _neighbor_nfs(self, c):
        if c not in self._nbr_cache:
            self._nbr_cache[c] = self.ctx.neighbors(self.vertex_lifts[c])
        return self._nbr_cache[c]

    def resolve_vertex(self, v):
        """(class, gamma) with gamma·v equal to the stored lift."""
        ctx = self.ctx
        c, g = 0, ctx.B.one()
        u = ctx.vertex_nf([[1, 0], [0, 1]])
        for j in ctx.geodesic_from_root(v):
            u = ctx.neighbors(u)[j]
            x = ctx.vertex_nf(_mul2(ctx.iota(g), ctx.matrix(u)))
            jj = self._neighbor_nfs(c).index(x)
            eid, c2, g2 = self.tables[c][jj]
            c, g = c2, g2 * g
        return c, g

    def resolve_edge(self, edge):
        """(edge class id, gamma) with gamma·edge equal to that class
        lift; edge = (vertex NF, adjacent vertex NF)."""
        u, w = edge
        c, g = self.resolve_vertex(u)
        x = self.ctx.vertex_nf(_mul2(self.ctx.iota(g), self.ctx.matrix(w)))
        jj = self._neighbor_nfs(c).index(x)
        eid, _, _ = self.tables[c][jj]
        return eid, g

    # -- persistence --

    def payload(self):
        return {
            "p": self.p,
            "group": self.group,
            "work_prec": self.ctx.W,
            "algebra": [str(self.ctx.B.a), str(self.ctx.B.b)],
            "order_basis": [[str(v) for v in x.c]
                            for x in self.ctx.order.basis],
            "vertices": [list(v) for v in self.vertex_lifts],
            "stabilizers": [[[str(v) for v in g.c] for g in st]
                            for st in self.vertex_stabilizers],
            "edges": [{"id": e.id, "src": e.src, "tgt": e.tgt,
                       "lift": [list(e.lift[0]), list(e.lift[1])],
                       "rev": e.rev} for e in self.edges],
            "tables": [[[eid, tgt, [str(v) for v in g.c]]
                        for eid, tgt, g in row] for row in self.tables],
        }

    def graph_hash(self):
        blob = json.dumps(self.payload(), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_json(self):
        d = self.payload()
        d["hash"] = self.graph_hash()
        return json.dumps(d)

    @classmethod
    def from_json(cls, blob, eta=None):
        d = json.loads(blob)
        B = QuaternionAlgebra(Fraction(d["algebra"][0]),
                              Fraction(d["algebra"][1]))
        basis = [B.elt(*(Fraction(v) for v in row))
                 for row in d["order_basis"]]
        order = QuatOrder(B, basis)
        ctx = TreeContext(order, d["p"], d["group"], eta, d["work_prec"])
        lifts = [tuple(v) for v in d["vertices"]]
        stabs = [[B.elt(*(Fraction(v) for v in g)) for g in st]
                 for st in d["stabilizers"]]
        edges = []
        for rec in d["edges"]:
            e = EdgeClass(rec["id"], rec["src"], rec["tgt"],
                          (tuple(rec["lift"][0]), tuple(rec["lift"][1])))
            e.rev = rec["rev"]
            edges.append(e)
        tables = [[(eid, tgt, B.elt(*(Fraction(v) for v in g)))
                   for eid, tgt, g in row] for row in d["tables"]]
        graph = cls(ctx, lifts, edges, tables, stabs)
        if "hash" in d:
            assert graph.graph_hash() == d["hash"], "corrupt graph cache"
        return graph

    def export_dot(self):
        lines = ["graph quotient {"]
        for c in range(self.n_vertices()):
            stab = len(self.vertex_stabilizers[c])
            label = f"v{c}" + (f" (stab {stab})" if stab > 1 else "")
            lines.append(f'  v{c} [label="{label}"];')
        for e in self.edges:
            if e.id <= e.rev:
                lines.append(f'  v{e.src} -- v{e.tgt} [label="e{e.id}"];')
        lines.append("}")
        return "\n".join(lines)


def compute_quotient(order, p, group="gamma0", eta=None, work_prec=48,
                     radius_cap=12):
    """Breadth-first enumeration of the vertex and oriented-edge classes
    of the quotient, with deterministic numbering (discovery order,
    directions swept in the standard order)."""
    ctx = TreeContext(order, p, group, eta, work_prec)
    root = ctx.vertex_nf([[1, 0], [0, 1]])
    lifts = [root]
    edges = []
    tables = []
    head = 0
    while head < len(lifts):
        c = head
        head += 1
        V = lifts[c]
        if ctx.distance(V) > radius_cap:
            raise RuntimeError(
                f"quotient did not close within radius {radius_cap}: "
                f"{len(lifts)} vertex classes, {len(edges)} edge classes")
        row = []
        for j, W in enumerate(ctx.neighbors(V)):
            tgt = None
            for c2, U in enumerate(lifts):
                g = ctx.are_equivalent(W, U)
                if g is not None:
                    tgt = (c2, g)
                    break
            if tgt is None:
                lifts.append(W)
                tgt = (len(lifts) - 1, ctx.B.one())
            c2, g = tgt
            eid = None
            for e in edges:
                if e.src == c and e.tgt == c2 \
                        and ctx.are_equivalent((V, W), e.lift) is not None:
                    eid = e.id
                    break
            if eid is None:
                e = EdgeClass(len(edges), c, c2, (V, W))
                edges.append(e)
                eid = e.id
            row.append((eid, c2, g))
        tables.append(row)
    # reversal pairing: the class of the reversed lift always exists
    # because it shows up in the sweep of the target's vertex class
    for e in edges:
        if e.rev is not None:
            continue
        back = (e.lift[1], e.lift[0])
        for e2 in edges:
            if e2.src == e.tgt and e2.tgt == e.src and e2.rev is None \
                    and ctx.are_equivalent(back, e2.lift) is not None:
                e.rev = e2.id
                e2.rev = e.id
                break
        assert e.rev is not None, "reversal class missing"
    stabilizers = [ctx.stabilizer(v) for v in lifts]
    return QuotientGraph(ctx, lifts, edges, tables, stabilizers)
