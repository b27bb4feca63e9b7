"""Multiplicative p-adic integrals of harmonic-cocycle boundary measures.

A harmonic cocycle on the quotient graph defines a measure on the
boundary projective line: the measure of the ball of ends through an
oriented tree edge is the cocycle value on its class.  Two routes
evaluate the multiplicative integral of (t - z1)/(t - z2) against it:

* a certified Riemann product over the cover by depth-n balls, exact
  bookkeeping throughout, one digit of relative accuracy per level;
* moment integration: the moments of the measure on every edge-class
  ball are lifted by iterating the level-p subdivision transport (one
  digit per sweep), after which any integral is a short logarithm
  series plus an exponential — this is the route that scales to
  hundreds of digits.
"""

import hashlib
import json
from fractions import Fraction

from .tree import TreeContext

_FRAME_CACHE = {}
_CHILD_CACHE = {}
_TRANSPORT_CACHE = {}
_ROWS_CACHE = {}


# -- small exact 2x2 helpers ------------------------------------------

def _mul2(A, B):
    return [[A[0][0] * B[0][0] + A[0][1] * B[1][0],
             A[0][0] * B[0][1] + A[0][1] * B[1][1]],
            [A[1][0] * B[0][0] + A[1][1] * B[1][0],
             A[1][0] * B[0][1] + A[1][1] * B[1][1]]]


def _adj2(A):
    return [[A[1][1], -A[0][1]], [-A[1][0], A[0][0]]]


def _vp(a, p):
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def _strip(A, p, cap):
    """Divide out the p-content of a matrix of residues mod p^cap."""
    v = min(_vp(x, p) if x else cap for row in A for x in row)
    assert v < cap, "matrix vanished to working precision"
    q = p ** v
    return [[x // q for x in row] for row in A], v


def _gkey(graph):
    h = getattr(graph, "_integral_key", None)
    if h is None:
        h = graph.graph_hash()
        graph._integral_key = h
    return h


def mobius_transform(m, z):
    """Fractional-linear action of an integer matrix on a field element:
    (a z + b) / (c z + d)."""
    return (z * m[0][0] + m[0][1]) / (z * m[1][0] + m[1][1])


# -- divisors on the boundary -----------------------------------------

class DivisorPair:
    """Degree-zero divisor (z1) - (z2) on the boundary projective line,
    both points in an unramified extension field and neither rational
    (rational points sit on the boundary of every ball and the integral
    degenerates there)."""

    def __init__(self, z1, z2):
        assert z1.K is z2.K, "divisor points live in different fields"
        K = z1.K
        assert K.f > 1, "divisor points must come from a proper extension"
        for z in (z1, z2):
            assert not z.is_zero() and K.frobenius(z) != z, \
                "divisor point is rational"
        self.field = K
        self.z1 = z1
        self.z2 = z2

    def swapped(self):
        return DivisorPair(self.z2, self.z1)

    def boundary_depth(self):
        """Largest valuation of the distance from a divisor point to its
        Galois conjugate: covers deeper than this separate each point
        into a private ball."""
        out = 0
        for z in (self.z1, self.z2):
            v = (z - self.field.frobenius(z)).valuation()
            out = max(out, v)
        return out


# -- the explicit depth-n cover ---------------------------------------
#
# Every ball of the cover is chart * Z_p for a chart in the integer
# family [[p^n, a], [0, 1]] (the disc a + p^n Z_p) and
# [[0, 1], [p^n, p b]] (the disc around infinity), and the chart of a
# child ball is chart * [[p, r], [0, 1]].  The class of the tree edge a
# chart sits on is tracked through the quotient tables by a unit frame:
# the mod-p^k change of basis aligning chart directions with the
# directions swept at the stored class lift.

def _frame_table(graph, kdigits):
    """fd[c][j] = (edge class, target class, frame mod p^kdigits) for
    each vertex class c and direction j, the frame being the unit part
    of adj(lift_{c_j}) * iota(g) * lift_c * D_j."""
    key = (_gkey(graph), kdigits)
    if key in _FRAME_CACHE:
        return _FRAME_CACHE[key]
    ctx = graph.ctx
    p = ctx.p
    assert kdigits + 8 <= ctx.W, "frame depth exceeds working precision"
    cap = p ** kdigits
    out = []
    for c, row in enumerate(graph.tables):
        Mc = ctx.matrix(graph.vertex_lifts[c])
        rowdat = []
        for j, (eid, c2, g) in enumerate(row):
            P = _mul2(_adj2(ctx.matrix(graph.vertex_lifts[c2])),
                      _mul2(ctx.iota(g), _mul2(Mc, ctx.directions()[j])))
            P = [[x % ctx.mod for x in r] for r in P]
            U, _ = _strip(P, p, ctx.W)
            assert (U[0][0] * U[1][1] - U[0][1] * U[1][0]) % p, \
                "direction frame is not invertible"
            rowdat.append((eid, c2, [[x % cap for x in r] for r in U]))
        out.append(rowdat)
    _FRAME_CACHE[key] = out
    return out


def _leaf_stream(graph, depth, fd):
    """Yield (chart, edge class) over the depth-n cover, depth-first.

    The frame loses one valid digit per level (one division by p), so
    fd must be built with at least depth + 2 digits."""
    ctx = graph.ctx
    p = ctx.p
    stack = []
    for j in range(p, -1, -1):
        eid, c2, fr = fd[0][j]
        if j < p:
            A = [[p, j], [0, 1]]
            u = fr
        else:
            # the disc around infinity: same lattice, swapped columns
            A = [[0, 1], [p, 0]]
            u = [[fr[0][1], fr[0][0]], [fr[1][1], fr[1][0]]]
        stack.append((1, A, eid, c2, u))
    cap = p ** max(4, depth + 2)
    while stack:
        lvl, A, eid, c, u = stack.pop()
        if lvl == depth:
            yield A, eid
            continue
        for r in range(p):
            # direction of the child in the coordinates of the class
            # lift: the line through u * (r, 1)
            x = (u[0][0] * r + u[0][1]) % p
            y = (u[1][0] * r + u[1][1]) % p
            if y:
                jj = x * pow(y, -1, p) % p
                adjD = ((1, -jj), (0, p))
            else:
                jj = p
                adjD = ((p, 0), (0, 1))
            UD = [[u[0][0] * p, u[0][0] * r + u[0][1]],
                  [u[1][0] * p, u[1][0] * r + u[1][1]]]
            K2 = _mul2(adjD, UD)
            assert all(v % p == 0 for row in K2 for v in row)
            kap = [[v // p for v in row] for row in K2]
            eid2, c2, fr = fd[c][jj]
            u2 = [[x % cap for x in row] for row in _mul2(fr, kap)]
            assert (u2[0][0] * u2[1][1] - u2[0][1] * u2[1][0]) % p, \
                "frame degenerated during descent"
            A2 = [[A[0][0] * p, A[0][0] * r + A[0][1]],
                  [A[1][0] * p, A[1][0] * r + A[1][1]]]
            stack.append((lvl + 1, A2, eid2, c2, u2))


class BallCover:
    """The cover of the boundary projective line by the balls of ends
    through the tree edges at distance n from the base vertex, each
    tagged with its oriented edge class; the measure of a ball is the
    cocycle value on its tag."""

    def __init__(self, graph, depth):
        assert depth >= 1
        self.graph = graph
        self.depth = depth

    def __iter__(self):
        fd = _frame_table(self.graph, self.depth + 3)
        return _leaf_stream(self.graph, self.depth, fd)

    def sample_labels(self):
        """Residue labels proving the cover is a partition: the finite
        balls a + p^n Z_p by a, the balls meeting infinity by b with
        sample point 1/(p b)."""
        p = self.graph.ctx.p
        pn = p ** self.depth
        fins, infs = [], []
        for A, _ in self:
            if A[1][0] == 0:
                assert A[0][0] == pn and A[1][1] == 1
                fins.append(A[0][1])
            else:
                assert A[0][0] == 0 and A[0][1] == 1 and A[1][0] == pn
                assert A[1][1] % p == 0
                infs.append(A[1][1] // p)
        return fins, infs


def riemann_integral(graph, values, divisor, depth):
    """Riemann product of (t - z1)/(t - z2) over the depth-n cover,
    sampled at the center of each ball and weighted by the ball
    measures; relative accuracy O(p^depth).

    `values` is a full oriented-edge value vector (reversal gives the
    negative).  The sample point of a chart is its second column read
    projectively, so the factor (b - z1 d)/(b - z2 d) needs no special
    case at infinity."""
    assert len(values) == graph.n_oriented_edges()
    for e in graph.edges:
        assert values[e.rev] == -values[e.id], \
            "measure vector is not odd under reversal"
    K = divisor.field
    assert K.p == graph.ctx.p
    z1, z2 = divisor.z1, divisor.z2
    if z1 == z2:
        return K.one()
    fd = _frame_table(graph, depth + 3)
    num = K.one()
    den = K.one()
    for A, eid in _leaf_stream(graph, depth, fd):
        h = values[eid]
        if h == 0:
            continue
        b, d = A[0][1], A[1][1]
        top = b - z1 * d
        bot = b - z2 * d
        if h == 1:
            num = num * top
            den = den * bot
        elif h == -1:
            num = num * bot
            den = den * top
        else:
            num = num * top ** h if h > 0 else num * bot ** (-h)
            den = den * bot ** h if h > 0 else den * top ** (-h)
    return num / den


# -- canonical charts and subdivision transports ----------------------

def _canonical_chart(ctx, lift):
    """Integer chart of the ball of an oriented edge (V, W): columns a
    basis of the W lattice whose first column spans the direction back
    toward V, so chart * Z_p is exactly the ball of ends through the
    edge."""
    p = ctx.p
    MV = ctx.matrix(lift[0])
    MW = ctx.matrix(lift[1])
    Y, _ = _strip(_mul2(_adj2(MV), MW), p, 10 ** 6)
    dt = Y[0][0] * Y[1][1] - Y[0][1] * Y[1][0]
    assert _vp(abs(dt), p) == 1, "edge endpoints are not adjacent"
    a, b = Y[0][0] % p, Y[0][1] % p
    if a or b:
        row = (a, b)
    else:
        row = (Y[1][0] % p, Y[1][1] % p)
    # the kernel line of the rank-one reduction points back toward V
    s = (row[1] % p, (-row[0]) % p)
    if s[1]:
        s = (s[0] * pow(s[1], -1, p) % p, 1)
        t = (1, 0)
    else:
        s = (1, 0)
        t = (0, 1)
    assert (Y[0][0] * s[0] + Y[0][1] * s[1]) % p == 0
    assert (Y[1][0] * s[0] + Y[1][1] * s[1]) % p == 0
    return _mul2(MW, [[s[0], t[0]], [s[1], t[1]]])


def _child_data(graph):
    """Per oriented edge class: its canonical chart, and for each of the
    p continuation edges of its lift the class and the group element
    carrying the continuation to that class lift."""
    key = _gkey(graph)
    if key in _CHILD_CACHE:
        return _CHILD_CACHE[key]
    ctx = graph.ctx
    p = ctx.p
    charts = []
    kids = []
    for e in graph.edges:
        V, W = e.lift
        charts.append(_canonical_chart(ctx, e.lift))
        row = []
        back = 0
        for X in ctx.neighbors(W):
            if X == V and not back:
                back = 1
                continue
            row.append(graph.resolve_edge((W, X)))
        assert back and len(row) == p, "edge lift has no parent direction"
        kids.append(row)
    _CHILD_CACHE[key] = (charts, kids)
    return charts, kids


def _transports(graph, digits):
    """T per (class, child): the unit-content integer matrix mod
    p^digits whose fractional-linear action carries the unit ball in
    the child-class chart onto the child's residue disc in the parent
    chart.  Contraction by exactly one level is asserted."""
    key = (_gkey(graph), digits)
    if key in _TRANSPORT_CACHE:
        return _TRANSPORT_CACHE[key]
    ctx = graph.ctx
    p = ctx.p
    charts, kids = _child_data(graph)
    hi = TreeContext(ctx.order, p, ctx.group, ctx.eta,
                     work_prec=digits + 8)
    mod = p ** digits
    out = []
    for e in graph.edges:
        adjC = _adj2(charts[e.id])
        row = []
        for eid2, gam in kids[e.id]:
            G = hi.iota(gam)
            # gam carries the continuation edge to the lift of eid2, so
            # its adjugate (= inverse up to p-power) carries the lift
            # chart back onto the continuation ball
            T = _mul2(adjC, _mul2(_adj2(G), charts[eid2]))
            T = [[x % hi.mod for x in r] for r in T]
            T, _ = _strip(T, p, digits + 8)
            T = [[x % mod for x in r] for r in T]
            al, be, ga, de = T[0][0], T[0][1], T[1][0], T[1][1]
            assert de % p and ga % p == 0 and al % p == 0, \
                "child transport does not fix the unit ball"
            dt = (al * de - be * ga) % mod
            assert dt % p == 0 and (dt // p) % p, \
                "child transport must contract by exactly one level"
            row.append((eid2, T))
        out.append(row)
    _TRANSPORT_CACHE[key] = out
    return out


def _stripped_series(T, n_terms, p, mod):
    """Coefficients of the fractional-linear series T(w) = sum s_i w^i,
    divided by their guaranteed p-power: entry i is s_i / p^i, each
    valid to correspondingly fewer digits of mod.  T must be a
    one-level contraction, which makes the divisions exact."""
    al, be, ga, de = T[0][0], T[0][1], T[1][0], T[1][1]
    dinv = pow(de, -1, mod)
    c = (-ga * dinv) % mod
    ct = c // p
    u = (al + be * c) % mod
    assert u % p == 0, "series linear term is not contracting"
    u //= p
    assert u % p, "series linear term contracts too far"
    out = [(be * dinv) % mod]
    cur = (u * dinv) % mod
    q = mod
    for _ in range(1, n_terms):
        q //= p
        out.append(cur % q)
        cur = cur * ct % mod
    return out


def _power_rows(graph, n_moments, hi):
    """Stripped, reversed coefficient rows of T(w)^k, k = 1..M-1, for
    every subdivision transport: row k entry i is the coefficient of
    w^i in T(w)^k divided by p^i, valid mod p^(hi - i).  Rows are
    reversed so a Horner pass reassembles sum_i p^i row[i] m_i."""
    key = (_gkey(graph), n_moments, hi)
    if key in _ROWS_CACHE:
        return _ROWS_CACHE[key]
    p = graph.ctx.p
    trans = _transports(graph, hi + 4)
    mod = p ** hi
    mods = [mod]
    for _ in range(1, n_moments):
        mods.append(mods[-1] // p)
    # slot width for exact convolution of stripped rows by one integer
    # multiplication
    slot = 2 * (hi * p.bit_length()) + n_moments.bit_length() + 2
    mask = (1 << slot) - 1
    out = []
    for row in trans:
        built = []
        for eid2, T in row:
            s = _stripped_series(T, n_moments, p, p ** (hi + 4))
            s = [x % m for x, m in zip(s, mods)]
            spack = 0
            for c in reversed(s):
                spack = (spack << slot) | c
            rows = []
            cur = 1  # packed row k = 0, the constant series 1
            for _ in range(1, n_moments):
                cur = cur * spack
                nxt = 0
                vals = []
                prod = cur
                for i in range(n_moments):
                    c = (prod & mask) % mods[i]
                    vals.append(c)
                    nxt |= c << (slot * i)
                    prod >>= slot
                cur = nxt
                rows.append(tuple(reversed(vals)))
            built.append((eid2, rows))
        out.append(built)
    _ROWS_CACHE.clear()  # at most one heavyweight table resident
    _ROWS_CACHE[key] = out
    return out


# -- overconvergent moment lifting ------------------------------------

class MomentTable:
    """Moments of the boundary measures of a cocycle pair on every
    oriented edge-class ball, in the canonical chart of each class:
    entry (which, e, k) is the integral of w^k over the class ball,
    an integer mod p^digits.  The zeroth moments are the cocycle values
    and the table is the fixed point of the subdivision transport.
    a_p is the level-p action on the pair, a pair (a, b) standing for
    a + b*J in the structure-plane algebra."""

    def __init__(self, graph, digits, n_moments, values, a_p, sweeps):
        self.graph = graph
        self.p = graph.ctx.p
        self.digits = digits
        self.n_moments = n_moments
        self.values = values
        self.a_p = a_p
        self.sweeps = sweeps

    def moment(self, which, eid, k):
        return self.values[which][eid][k]

    def cache_key(self):
        blob = json.dumps([_gkey(self.graph), self.digits, self.n_moments,
                           [vec[0] for vec in self.values[0]],
                           [vec[0] for vec in self.values[1]]],
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    def to_json(self):
        return json.dumps({
            "p": self.p, "digits": self.digits,
            "n_moments": self.n_moments, "a_p": self.a_p,
            "sweeps": self.sweeps, "graph": _gkey(self.graph),
            "key": self.cache_key(), "values": self.values,
        })

    @classmethod
    def from_json(cls, graph, blob):
        d = json.loads(blob)
        assert d["graph"] == _gkey(graph), "table belongs to another graph"
        a_p = tuple(d["a_p"]) if d["a_p"] is not None else None
        table = cls(graph, d["digits"], d["n_moments"],
                    d["values"], a_p, d["sweeps"])
        assert table.cache_key() == d["key"], "corrupt moment table"
        return table


def _sweep(graph, rows_tab, m, n_moments, mod, p):
    """One subdivision-transport sweep of a pair of moment systems."""
    n_or = graph.n_oriented_edges()
    out = [[None] * n_or, [None] * n_or]
    for e in range(n_or):
        acc0 = [0] * n_moments
        acc1 = [0] * n_moments
        for eid2, rows in rows_tab[e]:
            v0 = m[0][eid2]
            v1 = m[1][eid2]
            r0 = v0[::-1]
            r1 = v1[::-1]
            acc0[0] += v0[0]
            acc1[0] += v1[0]
            for k in range(1, n_moments):
                row = rows[k - 1]
                a = 0
                b = 0
                for q, x, y in zip(row, r0, r1):
                    a = a * p + q * x
                    b = b * p + q * y
                acc0[k] += a % mod
                acc1[k] += b % mod
        out[0][e] = [x % mod for x in acc0]
        out[1][e] = [x % mod for x in acc1]
    return out


def _involution_matrix(graph, h):
    """Matrix of the norm-p involution pulled back to the cocycle pair,
    None when the order has no element of reduced norm p.

    The involution commutes with the Hecke action, so on the pair it
    lies in the plane algebra generated by the quarter-turn J: it is
    a + b*J with (a, b) one of (+-1, 0), (0, +-1), acting as
    h0 -> a*h0 + b*h1, h1 -> -b*h0 + a*h1.  Its square is the character
    value at p, so a genuine quarter turn occurs at nonsplit primes."""
    ctx = graph.ctx
    wps = ctx.order.enumerate_by_norm(ctx.p)
    if not wps:
        return None
    iw = ctx.iota(wps[0])
    imgs = []
    for e in graph.edges:
        img = (ctx.vertex_nf(_mul2(iw, ctx.matrix(e.lift[0]))),
               ctx.vertex_nf(_mul2(iw, ctx.matrix(e.lift[1]))))
        imgs.append(graph.resolve_edge(img)[0])
    hits = [
        (a, b) for a, b in ((1, 0), (-1, 0), (0, 1), (0, -1))
        if all(h[0][i] == a * h[0][e] + b * h[1][e]
               and h[1][i] == -b * h[0][e] + a * h[1][e]
               for e, i in enumerate(imgs))
    ]
    assert len(hits) == 1, \
        "norm-p involution does not act through the structure plane"
    return hits[0]


def overconvergent_lift(graph, pair, digits, n_moments=None, a_p_sign=None):
    """Lift the boundary measures of a Hecke eigenpair to their moment
    table mod p^digits by iterating the subdivision transport from the
    cocycle values (higher moments seeded at zero).

    Each sweep rewrites every class moment vector as the transported sum
    over the p continuation edges of its lift; the zeroth moments are
    reproduced exactly (that is harmonicity) and the higher ones gain
    one digit per sweep, so the iteration stabilizes after about
    `digits` sweeps.  The action of the level-p operator on the pair is
    detected from the norm-p involution and stored as (a, b) meaning
    a + b*J in the structure-plane algebra; a supplied a_p_sign pair is
    checked against it."""
    p = graph.ctx.p
    M = n_moments if n_moments is not None else digits + 5
    hi = digits + 5
    assert 2 <= M <= hi and digits >= 1
    mod = p ** hi
    modn = p ** digits
    rows_tab = _power_rows(graph, M, hi)
    h = [pair.full_values(0), pair.full_values(1)]
    m = [[[hv % mod] + [0] * (M - 1) for hv in h[w]] for w in (0, 1)]
    sweeps = 0
    for sweeps in range(1, digits + 16):
        new = _sweep(graph, rows_tab, m, M, mod, p)
        for w in (0, 1):
            for e in range(graph.n_oriented_edges()):
                assert new[w][e][0] == m[w][e][0], \
                    "transport sweep broke the zeroth moments"
        stable = all((a - b) % modn == 0
                     for w in (0, 1)
                     for old, cur in zip(m[w], new[w])
                     for a, b in zip(old, cur))
        m = new
        if stable:
            break
    else:
        raise RuntimeError(
            f"moment lift did not stabilize mod {p}^{digits} within "
            f"{digits + 15} sweeps")
    values = [[[x % modn for x in vec] for vec in m[w]] for w in (0, 1)]
    w_p = _involution_matrix(graph, h)
    # the level-p operator is minus the involution on the new quotient
    a_p = (-w_p[0], -w_p[1]) if w_p is not None else a_p_sign
    if a_p_sign is not None and w_p is not None:
        assert a_p == tuple(a_p_sign), \
            "supplied level-p action contradicts the norm-p involution"
    return MomentTable(graph, digits, M, values, a_p, sweeps)


def verify_lift_fixed_point(table):
    """Re-apply one transport sweep to a (possibly cached) moment table
    and check it is reproduced mod p^digits.  The zeroth moments enter
    the sweep exactly, so the truncation of the higher ones only feeds
    error past the stated precision."""
    graph = table.graph
    p = table.p
    mod = p ** table.digits
    rows_tab = _power_rows(graph, table.n_moments, table.digits + 5)
    new = _sweep(graph, rows_tab, table.values, table.n_moments, mod, p)
    return all((a - b) % mod == 0
               for w in (0, 1)
               for old, cur in zip(table.values[w], new[w])
               for a, b in zip(old, cur))


# -- moment-route integration -----------------------------------------

def moment_integral(graph, table, which, divisor):
    """Multiplicative integral of (t - z1)/(t - z2) against one measure
    of a lifted pair, accurate to the table precision: the product over
    the base cover of r(center)^(measure) * exp(sum lambda_k m_k),
    where lambda_k is the logarithm series of the integrand in the
    chart coordinate.

    A ball whose expansion parameter is not yet small (the divisor
    meets its residue disc) is subdivided through the transport data;
    the divisor being non-rational bounds the needed depth."""
    assert which in (0, 1)
    assert table.graph is graph
    K = divisor.field
    p = graph.ctx.p
    assert K.p == p
    z1, z2 = divisor.z1, divisor.z2
    if z1 == z2:
        return K.one()
    charts, _ = _child_data(graph)
    root_nf = graph.vertex_lifts[0]
    nbrs = graph.ctx.neighbors(root_nf)
    seen = set()
    for j, (eid, _, _) in enumerate(graph.tables[0]):
        assert graph.edges[eid].lift == (root_nf, nbrs[j]) \
            and eid not in seen, \
            "base cover must consist of edge-class lifts"
        seen.add(eid)
    cap = divisor.boundary_depth() + 3
    trans = _transports(graph, table.digits + 5)
    cutoff = min(K.n, table.digits) + 2
    mod = p ** table.digits
    half = mod // 2

    def _v(x):
        v = x.valuation()
        return cutoff if v is None else v

    def ball_factor(C, eid, level):
        a, b = C[0][0], C[0][1]
        c, d = C[1][0], C[1][1]
        za = a - z1 * c
        zb = b - z1 * d
        wa = a - z2 * c
        wb = b - z2 * d
        w1 = za / zb
        w2 = wa / wb
        if min(w1.valuation(), w2.valuation()) < 1:
            assert level <= cap, \
                "cover refinement exceeded the divisor separation depth"
            acc = K.one()
            for eid2, T in trans[eid]:
                acc = acc * ball_factor(_mul2(C, T), eid2, level + 1)
            return acc
        vec = table.values[which][eid]
        r0 = zb / wb
        s = K.zero()
        pw1, pw2 = w1, w2
        for k in range(1, table.n_moments):
            if vec[k]:
                coef = K.from_rational(Fraction((-1) ** (k + 1), k))
                s = s + (pw1 - pw2) * coef * vec[k]
            if _v(pw1) >= cutoff and _v(pw2) >= cutoff:
                break
            pw1 = pw1 * w1
            pw2 = pw2 * w2
        # the measure of the ball is a genuinely small integer; undo
        # the residue reduction before exponentiating
        m0 = vec[0] if vec[0] <= half else vec[0] - mod
        return r0 ** m0 * K.exp(s)

    acc = K.one()
    for j in range(p + 1):
        acc = acc * ball_factor(charts[graph.tables[0][j][0]],
                                graph.tables[0][j][0], 1)
    return acc
