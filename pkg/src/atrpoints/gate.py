"""Precondition checks run before any heavy computation.

Builds the diagram of fields attached to (F, alpha) — the quartic
reflex data M = F(sqrt(alpha)), K = Q(sqrt(Nm alpha)) imaginary, and
L = K(sqrt(delta)) with delta = Tr(alpha) + 2 sqrt(Nm alpha) — then
factors the level by splitting behaviour in K, verifies the parity
condition that makes the construction nontrivial, and pins down the
canonical norm-N_psi ideal inside the relative discriminant of L/K.
Everything here is exact rational arithmetic and runs in well under a
second.
"""

import json
import time
from math import gcd, isqrt

import sympy

from .quadratic import QuadField, kronecker, squarefree_part


class GateError(Exception):
    """A precondition of the construction fails for these inputs."""


class FieldDiagram:
    """The fields F, M = F(sqrt(alpha)), K, L = K(sqrt(delta))."""

    def __init__(self, F, alpha, K, delta):
        self.F = F
        self.alpha = alpha
        self.K = K
        self.delta = delta

    def describe(self):
        return {
            "F": f"Q(sqrt({self.F.d}))",
            "alpha": [str(self.alpha.a), str(self.alpha.b)],
            "K": f"Q(sqrt({self.K.d}))",
            "delta": [str(self.delta.a), str(self.delta.b)],
        }


class LevelFactorization:
    def __init__(self, N, N_psi, N_0, N_plus, N_minus, N_0_plus,
                 inert_primes_in_K):
        self.N = N
        self.N_psi = N_psi
        self.N_0 = N_0
        self.N_plus = N_plus
        self.N_minus = N_minus
        self.N_0_plus = N_0_plus
        self.inert_primes_in_K = inert_primes_in_K

    def describe(self):
        return {"N": self.N, "N_psi": self.N_psi, "N_0": self.N_0,
                "N_plus": self.N_plus, "N_minus": self.N_minus,
                "N_0_plus": self.N_0_plus,
                "inert_primes_in_K": self.inert_primes_in_K}


def build_diagram(F, alpha):
    """Assemble the field diagram, refusing non-ATR inputs."""
    alpha = F.coerce(alpha)
    assert F.d > 0, "F must be real quadratic"
    nm = alpha.norm()
    assert nm.denominator == 1
    nm = int(nm)
    if nm == 0:
        raise GateError("alpha is zero: degenerate extension")
    if nm > 0:
        # covers squares too: a square alpha has positive square norm
        raise GateError("M not ATR: Nm(alpha) > 0")
    signs = F.real_signs(alpha)
    if sorted(signs) != [-1, 1]:
        raise GateError("M not ATR: alpha must change sign "
                        "between the real places")
    d0 = squarefree_part(nm)
    m = isqrt(nm // d0)
    assert m * m * d0 == nm
    K = QuadField(d0)
    tr = alpha.trace()
    assert tr.denominator == 1
    # delta = alpha + alpha' + 2 sqrt(alpha alpha'), an element of K
    delta = K.elt(int(tr), 2 * m)
    return FieldDiagram(F, alpha, K, delta)


def factor_level(N, K, N_psi):
    """Split N = N_psi * N_0 and partition N_0 by behaviour in K."""
    N, N_psi = int(N), int(N_psi)
    if N % N_psi:
        raise GateError(f"N_psi = {N_psi} does not divide N = {N}")
    if gcd(N, K.disc) != 1:
        raise GateError("level shares a prime with disc(K)")
    N_0 = N // N_psi
    if squarefree_part(N) != N and gcd(N_0, N_psi) != 1:
        raise GateError("gcd(N_0, N_psi) > 1 with N not squarefree")
    N_minus = 1
    inert = []
    for ell, e in sorted(sympy.factorint(N_0).items()):
        typ = K.splitting(ell)
        assert typ != "ramified"  # excluded by the gcd check
        if typ == "inert":
            if e != 1:
                raise GateError(f"inert prime {ell} divides N_0 with "
                                f"multiplicity {e}: N_minus not squarefree")
            N_minus *= ell
            inert.append(ell)
    N_0_plus = N_0 // N_minus
    N_plus = N_psi * N_0_plus
    for ell in sympy.factorint(N_psi):
        if K.splitting(ell) != "split":
            raise GateError(f"prime {ell} of N_psi does not split in K")
    return LevelFactorization(N, N_psi, N_0, N_plus, N_minus, N_0_plus,
                              inert)


def splitting_in_sqrt_ext(F, x, prime):
    """Splitting of a prime of F in F(sqrt(x)) — odd residue
    characteristic only."""
    ell, pi, typ = prime
    assert ell != 2, "even prime not supported here"
    v = F.valuation(x, prime)
    if v % 2:
        return "ramified"
    if typ == "inert":
        fq, red = F.residue_field_at_inert(ell)
        # clear the even valuation by a square, preserving square class
        u = x / F.elt(ell ** (v // 2)) ** 2 if v else x
        r = red(u)
        return "split" if fq.is_square(r) else "inert"
    # split or ramified prime of F: residue field F_ell; reduce
    # sqrt(d) to the integer root t singled out by pi | (sqrt(d) - t)
    d = F.d % ell
    t = next(tt for tt in range(ell) if (tt * tt - d) % ell == 0
             and F.valuation(F.sqrt_gen() - tt, prime) >= 1)
    u = x if v == 0 else x / pi ** v  # make it a unit at pi
    num = (u.a + u.b * t)
    r = (num.numerator * pow(num.denominator, -1, ell)) % ell
    return "split" if kronecker(r, ell) == 1 else "inert"


def check_sign_condition(diagram, factorization):
    """Parity of the inert-in-M primes above the level, with the
    per-prime counts that force it."""
    F, alpha = diagram.F, diagram.alpha
    inert_set = []
    per_prime = {}
    for ell in sorted(sympy.factorint(factorization.N_0)):
        count = 0
        for prime in F.primes_above(ell):
            if splitting_in_sqrt_ext(F, alpha, prime) == "inert":
                count += 1
                inert_set.append((ell, prime[2]))
        expected = (1,) if ell in factorization.inert_primes_in_K \
            else (0, 2)
        per_prime[ell] = {"inert_primes_of_M": count,
                          "expected_one_of": list(expected),
                          "ok": count in expected}
    parity_even = len(inert_set) % 2 == 0
    # independently: parity of the number of primes dividing N_minus
    n_minus_parity_even = len(factorization.inert_primes_in_K) % 2 == 0
    return {
        "inert_set": inert_set,
        "cardinality": len(inert_set),
        "parity_even": parity_even,
        "per_prime": per_prime,
        "matches_n_minus_prime_parity": parity_even == n_minus_parity_even,
        "pass": parity_even and all(v["ok"] for v in per_prime.values()),
    }


def discriminant_factorization(diagram, factorization):
    """Relative discriminant of L/K split as c * (ideal of norm N_psi).

    Returns (c, generator of the norm-N_psi ideal, details dict).
    """
    K, F = diagram.K, diagram.F
    if not K.minkowski_class_number_one():
        raise GateError("class number of K exceeds 1: unsupported")
    disc_L, norm_L, w = K.relative_discriminant_sqrt(diagram.delta)
    disc_M, norm_M, _ = F.relative_discriminant_sqrt(diagram.alpha)
    # the induced-representation conductor identity
    relation_ok = (factorization.N_psi * norm_M
                   == abs(K.disc) * norm_L)
    # rational part c: full conjugate pairs and inert primes
    c = 1
    ideal_primes = []
    by_ell = {}
    for (ell, pi, typ), e in disc_L:
        by_ell.setdefault(ell, []).append(((ell, pi, typ), e))
    for ell, entries in sorted(by_ell.items()):
        if entries[0][0][2] == "inert":
            c *= ell ** entries[0][1]
            continue
        if len(entries) == 2:
            m = min(e for _, e in entries)
            c *= ell ** m
            entries = [(pr, e - m) for pr, e in entries if e > m]
        ideal_primes.extend(pr for pr in entries if pr[1] > 0)
    ideal_norm = 1
    gen = K.one()
    for (ell, pi, typ), e in ideal_primes:
        ideal_norm *= K.residue_norm((ell, pi, typ)) ** e
        gen = gen * pi ** e
    if ideal_norm != factorization.N_psi:
        raise GateError(f"norm of the canonical ideal is {ideal_norm}, "
                        f"expected N_psi = {factorization.N_psi}")
    if gcd(c, factorization.N) != 1:
        raise GateError(f"rational discriminant part c = {c} meets N")
    details = {
        "c": c,
        "ideal_generator": [str(gen.a), str(gen.b)],
        "ideal_norm": ideal_norm,
        "w": [str(w.a), str(w.b)],
        "norm_disc_L_over_K": norm_L,
        "norm_disc_M_over_F": norm_M,
        "relation_ok": relation_ok,
    }
    if not relation_ok:
        raise GateError("conductor identity "
                        "N_psi * Nm(disc M/F) = |disc K| * Nm(disc L/K) "
                        f"fails: {details}")
    return c, gen, details


class GateReport:
    def __init__(self, passed, diagram, factorization, sign_report,
                 disc_details, elapsed, failure=None):
        self.passed = passed
        self.diagram = diagram
        self.factorization = factorization
        self.sign_report = sign_report
        self.disc_details = disc_details
        self.elapsed = elapsed
        self.failure = failure

    def to_dict(self):
        return {
            "passed": self.passed,
            "failure": self.failure,
            "diagram": self.diagram.describe() if self.diagram else None,
            "level": (self.factorization.describe()
                      if self.factorization else None),
            "sign_condition": self.sign_report,
            "discriminants": self.disc_details,
            "elapsed_seconds": self.elapsed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def render_text(self):
        d = self.to_dict()
        lines = ["gate: " + ("PASS" if self.passed else "FAIL")]
        if self.failure:
            lines.append(f"  reason: {self.failure}")
        if self.diagram:
            dd = d["diagram"]
            lines.append(f"  F = {dd['F']}, K = {dd['K']}")
            lines.append(f"  alpha = {dd['alpha'][0]} + "
                         f"{dd['alpha'][1]} sqrt({self.diagram.F.d})")
        if self.factorization:
            lv = d["level"]
            lines.append(f"  N = {lv['N']} = N_psi {lv['N_psi']} * "
                         f"N_0 {lv['N_0']}; N+ = {lv['N_plus']}, "
                         f"N- = {lv['N_minus']}")
        if self.sign_report:
            sr = self.sign_report
            lines.append(f"  inert-in-M primes above the level: "
                         f"{sr['cardinality']} (parity "
                         f"{'even' if sr['parity_even'] else 'odd'})")
        if self.disc_details:
            dd = self.disc_details
            lines.append(f"  disc(L/K) = c * ideal: c = {dd['c']}, "
                         f"ideal norm = {dd['ideal_norm']}")
        lines.append(f"  elapsed: {self.elapsed:.3f}s")
        return "\n".join(lines)


def run_gate(F, alpha, N_psi, N=None, conductor_norm_sqrt=None):
    """All precondition checks; N defaults to N_psi times the square
    root of the conductor norm."""
    t0 = time.time()
    diagram = factorization = sign_report = details = None
    try:
        diagram = build_diagram(F, alpha)
        if N is None:
            assert conductor_norm_sqrt is not None, \
                "need N or the conductor"
            N = N_psi * int(conductor_norm_sqrt)
        factorization = factor_level(N, diagram.K, N_psi)
        sign_report = check_sign_condition(diagram, factorization)
        if not sign_report["pass"]:
            raise GateError("sign condition fails: odd number of "
                            "inert primes")
        c, gen, details = discriminant_factorization(diagram,
                                                     factorization)
        if not diagram.F.minkowski_class_number_one():
            raise GateError("class number of F exceeds 1: unsupported")
        return GateReport(True, diagram, factorization, sign_report,
                          details, time.time() - t0)
    except GateError as e:
        return GateReport(False, diagram, factorization, sign_report,
                          details, time.time() - t0, failure=str(e))
