"""The diagonal family X(D; A1, A2, B) and constructions of surfaces whose
quaternion class works at a prescribed finite set of places."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .arith import (
    INFINITY,
    ArithmeticDomainError,
    NotFound,
    Place,
    SquareClass,
    crt_combine,
    hilbert_vector,
    is_prime,
    is_square,
    legendre,
    place_set,
    prime_factors,
    prime_in_progression,
)
from .brauer import build_presentation_family
from .surface import FamilyParams, SDPresentation, Surface, linear_form

FAMILY_POINT = (1, 1, 1, 0, 0)
SCAN_BOUND = 10**6
PROGRESSION_TERMS = 10**4  # candidates tried per residue class when the modulus is large


def family_surface(fp: FamilyParams) -> Surface:
    pres = build_presentation_family(fp)
    surf = Surface(pres.pencil(), pres, fp, f"family D={fp.D} A1={fp.A1} A2={fp.A2} B={fp.B}")
    if not surf.contains(FAMILY_POINT):
        raise AssertionError("family point not on surface")
    return surf


@dataclass(frozen=True)
class FamilyInvariants:
    delta: Fraction
    discs: Optional[tuple[SquareClass, ...]]


def family_delta(fp: FamilyParams) -> Fraction:
    D, A1, A2, B = (Fraction(x) for x in fp.as_tuple())
    return (A1**2 * (A1 - A2) ** 2 * (A1 * B**2 - A2) ** 2 * B**4 * (B - 1) ** 2 * (B + 1) ** 2) / (A2**6 * B**12)


def family_invariants(fp: FamilyParams) -> FamilyInvariants:
    """Closed-form discriminant of the quartic factor and the five rank-4 classes."""
    D, A1, A2, B = fp.as_tuple()
    delta = family_delta(fp)
    if delta == 0:
        return FamilyInvariants(delta, None)
    raw = [
        D,
        D,
        -D * A1 * A2 * (A1 - A2) * (B * B - 1),
        -A1 * A2 * (A1 * B * B - A2) * (B * B - 1),
        D * (A1 - A2) * (A1 * B * B - A2),
    ]
    return FamilyInvariants(delta, tuple(SquareClass.of(x) for x in raw))


# --------------------------------------------------------------------------
# the prescribed-places construction for |S| >= 2


def _finite_odd(S: Sequence[Place]) -> list[int]:
    return sorted(v.p for v in S if not v.is_infinite and v.p != 2)


def choose_D(S: Sequence[Place]) -> tuple[int, list[str]]:
    S = place_set(S)
    primes = _finite_odd(S)
    sign = -1 if INFINITY in S else 1
    base = sign
    for p in primes:
        base *= p
    two = Place(2) in S
    log = []
    q = 3
    while q < SCAN_BOUND:
        if is_prime(q) and q not in primes:
            D = base * q
            ok = D % 4 == 3 if two else D % 8 == 1
            log.append(f"q={q}: D={D} {'accepted' if ok else 'rejected'}")
            if ok:
                return D, log
        q += 2
    raise NotFound("no auxiliary prime q found")


def split_even(S: Sequence[Place]) -> tuple[tuple[Place, ...], tuple[Place, ...]]:
    S = place_set(S)
    if len(S) < 2:
        raise ArithmeticDomainError("need at least two places")
    if len(S) % 2 == 0:
        return S, S
    special = [v for v in S if v.is_infinite or v.p == 2]
    odd = [Place(p) for p in _finite_odd(S)]
    top = odd[-1]
    rest = odd[:-1]
    if len(special) == 1:
        return place_set(special + rest), place_set(special + [top])
    if not special:
        return place_set(rest), place_set([odd[0], top])
    return place_set(special + rest), place_set([Place(2), top])


def _smallest_residue(p: int, want: int) -> int:
    return next(r for r in range(1, p) if legendre(-r, p) == want)


def choose_A1_A2(
    S1: Sequence[Place], S2: Sequence[Place], D: int
) -> tuple[int, int, list[str]]:
    """Primes (up to sign) A1, A2 with (-A_i, D)_v = -1 exactly for v in S_i."""
    S1, S2 = place_set(S1), place_set(S2)
    S = place_set(S1 + S2)
    odd = _finite_odd(S)
    qs = [p for p in prime_factors(D) if p not in odd and p != 2]
    if len(qs) != 1:
        raise ArithmeticDomainError("D must have exactly one prime factor outside S")
    q = qs[0]
    log: list[str] = []
    chosen: list[int] = []
    for idx, Si in enumerate((S1, S2)):
        sign = -1 if (INFINITY in S and INFINITY not in Si) else 1
        mod4 = 3 if (Place(2) in S and Place(2) not in Si) else 1
        congr = [(mod4, 4)]
        for p in odd:
            congr.append((_smallest_residue(p, -1 if Place(p) in Si else 1), p))
        congr.append((_smallest_residue(q, 1) if idx == 0 else chosen[0] % q, q))
        r, m = crt_combine(congr)
        # search |A| with sign*|A| = r (mod m)
        target = (sign * r) % m
        avoid = {abs(a) for a in chosen}

        def good(a: int, sign=sign, Si=Si) -> bool:
            return a not in avoid and D % a != 0 and hilbert_vector(-sign * a, D) == frozenset(Si)

        a = prime_in_progression(target, m, good, max(SCAN_BOUND, m * PROGRESSION_TERMS))
        A = sign * a
        log.append(f"A{idx + 1}: residues {congr} -> {r} mod {m}, sign {sign:+d}, prime {a}")
        chosen.append(A)
    return chosen[0], chosen[1], log


def b_conditions(D: int, A1: int, A2: int, B: int) -> bool:
    """None of the three listed expressions is a square (zero counts as a square)."""
    b2 = B * B
    exprs = (
        A1 * A2 * (A1 - A2) * (b2 - 1),
        D * A1 * A2 * (A1 * b2 - A2) * (b2 - 1),
        (A1 - A2) * (A1 * b2 - A2),
    )
    return not any(is_square(e) for e in exprs)


def choose_B(D: int, A1: int, A2: int) -> tuple[int, list[str]]:
    log = []
    for B in range(3, SCAN_BOUND, 2):
        if not is_prime(B) or D % B == 0 or legendre(D, B) != 1:
            continue
        if b_conditions(D, A1, A2, B):
            log.append(f"B={B} accepted")
            return B, log
        log.append(f"B={B} rejected: a listed expression is a square")
    raise NotFound("no admissible B below the scan bound")


def nonresidue_shift(l: int) -> int:
    """Smallest s >= 0 with 2(1 + s^2) a quadratic non-residue modulo the odd prime l."""
    if l == 2 or not is_prime(l):
        raise ArithmeticDomainError(f"{l} is not an odd prime")
    return next(s for s in range(l) if legendre(2 * (1 + s * s), l) == -1)


# --------------------------------------------------------------------------
# routing


def real_place_surface() -> Surface:
    """A non-diagonalizable surface whose class works exactly at the real place.

    ``T0*T1 = T2^2 + 7*T3^2`` and ``(T0-4T1)(T0-6T1) = T2^2 + 7*T4^2``.
    """
    e = [linear_form([int(i == k) for i in range(5)]) for k in range(5)]
    row1 = (e[0], e[1], e[2], e[3])
    row2 = (linear_form([1, -4, 0, 0, 0]), linear_form([1, -6, 0, 0, 0]), e[2], e[4])
    pres = SDPresentation(-7, (row1, row2), (Fraction(-7), Fraction(-7)))
    return Surface(pres.pencil(), pres, None, "real place example")


@dataclass
class ConstructionCertificate:
    target: tuple[Place, ...]
    route: str
    surface: Surface
    params: Optional[FamilyParams] = None
    split: Optional[tuple[tuple[Place, ...], tuple[Place, ...]]] = None
    search_log: list[str] = field(default_factory=list)
    claims: dict[Place, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _family_claims(fp: FamilyParams, S: Sequence[Place]) -> dict[Place, str]:
    """Expected certificate kind per support place (re-checked by the working-set pass)."""
    D, A1, A2, B = fp.as_tuple()
    support = {INFINITY, Place(2)} | {Place(p) for p in prime_factors(2 * D * A1 * A2 * B)}
    claims = {}
    for v in place_set(support):
        claims[v] = "witness" if v in S else "constant"
    return claims


def _one_odd_3mod4(l: int, log: list[str]) -> FamilyParams:
    D = prime_in_progression(1, 8, lambda d: legendre(d, l) == -1, SCAN_BOUND)
    log.append(f"D={D}: smallest prime = 1 mod 8 with (D/{l}) = -1")
    for A in range(l + 1, SCAN_BOUND):
        if A % D != 1 or not is_prime(A):
            continue
        if is_square((A * A - 1) * (A * A - l * l)):
            log.append(f"A={A} rejected: (A^2-1)(A^2-l^2) is a square")
            continue
        log.append(f"A={A}: smallest prime > {l} with A = 1 mod {D}")
        return FamilyParams(D, 1, A * A, l)
    raise NotFound("no admissible A")


def construct_for_S(S: Sequence[Place]) -> ConstructionCertificate:
    S = place_set(S)
    log: list[str] = []
    if not S:
        fp = FamilyParams(17, 1, 103, 2)
        log.append("empty set: fixed parameters (17, 1, 103, 2)")
        return ConstructionCertificate(S, "none", family_surface(fp), fp, None, log, _family_claims(fp, S))
    if S == (INFINITY,):
        surf = real_place_surface()
        claims = {INFINITY: "point-pair", Place(2): "split", Place(7): "enumeration"}
        notes = ["not diagonalizable over Q; no diagonalizable surface has this working set"]
        return ConstructionCertificate(S, "real-place", surf, None, None, ["fixed surface"], claims, notes)
    if len(S) == 1:
        l = S[0].p
        if l == 2:
            fp = FamilyParams(2, 2, 1, 2)
            log.append("l=2: D=2, A1=2, A2=1, B=2")
            route = "single-2"
        elif l % 4 == 1:
            B, blog = choose_B(l, l, 1)
            log += blog
            fp = FamilyParams(l, l, 1, B)
            route = "single-1mod4"
        else:
            fp = _one_odd_3mod4(l, log)
            route = "single-3mod4"
        claims = _family_claims(fp, ())
        claims[S[0]] = "point-pair"
        return ConstructionCertificate(S, route, family_surface(fp), fp, None, log, claims)
    D, dlog = choose_D(S)
    S1, S2 = split_even(S)
    A1, A2, alog = choose_A1_A2(S1, S2, D)
    B, blog = choose_B(D, A1, A2)
    fp = FamilyParams(D, A1, A2, B)
    log += dlog + [f"split: S1={[str(v) for v in S1]} S2={[str(v) for v in S2]}"] + alog + blog
    return ConstructionCertificate(S, "general", family_surface(fp), fp, (S1, S2), log, _family_claims(fp, S))


# --------------------------------------------------------------------------
# points in general position in the plane


def _cubic_monomials():
    return [e for e in itertools.product(range(4), repeat=3) if sum(e) == 3]


def _mono_eval(e, pt):
    out = Fraction(1)
    for x, k in zip(pt, e):
        out *= Fraction(x) ** k
    return out


def _mono_partial(e, pt, var):
    if e[var] == 0:
        return Fraction(0)
    e2 = list(e)
    e2[var] -= 1
    return e[var] * _mono_eval(e2, pt)


def general_position(points: Sequence[Sequence]) -> bool:
    """No three on a line, no six on a conic, no eight on a cubic singular at one of them."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    if len(pts) > 8:
        raise ArithmeticDomainError("at most eight points")
    for a, b in itertools.combinations(pts, 2):
        if linalg.rank([list(a), list(b)]) < 2:
            raise ArithmeticDomainError("duplicate points")
    for tri in itertools.combinations(pts, 3):
        if linalg.det([list(p) for p in tri]) == 0:
            return False
    conic = [e for e in itertools.product(range(3), repeat=3) if sum(e) == 2]
    for six in itertools.combinations(pts, 6):
        if linalg.rank([[_mono_eval(e, p) for e in conic] for p in six]) < 6:
            return False
    if len(pts) == 8:
        cubic = _cubic_monomials()
        rows = [[_mono_eval(e, p) for e in cubic] for p in pts]
        for p in pts:
            # by Euler's identity two partials suffice, skipping a nonzero coordinate
            skip = next(i for i in range(3) if p[i] != 0)
            extra = [[_mono_partial(e, p, v) for e in cubic] for v in range(3) if v != skip]
            if linalg.rank(rows + extra) < 10:
                return False
    return True
