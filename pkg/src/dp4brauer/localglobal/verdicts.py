"""Adelic point checks and per-place working-set verdicts."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Union

import sympy

from .. import linalg
from ..arith import INFINITY, Place, place_set, prime_factors
from ..brauer import (
    BrauerClassRep,
    BrauerGroup,
    ProvedConstant,
    ProvedWorking,
    br_group_diagonal,
    constancy_certificate,
    nonconstancy_by_witness,
    order4_criterion,
    primitive_gram,
)
from ..pencil import NotSplit, Pencil, QuadForm5, char_form, discriminant_vector
from ..surface import Surface
from .padic import DEFAULT_BUDGET, Budget, Insoluble, eval_image_at_p, padic_solubility
from .points import ProjPoint, private_shape, search_rational_points
from .real import NoRealPoints, real_analysis

STRUCTURAL_PRIME = 23  # q^2 - 7q + 1 > 0 for q >= 7; kept conservative
FAMILY_POINT = (1, 1, 1, 0, 0)


# --------------------------------------------------------------------------
# adelic points


@dataclass(frozen=True)
class HasAdelicPoint:
    evidence: str
    assumptions: tuple = ()


@dataclass(frozen=True)
class NoAt:
    place: Place
    detail: str = ""


@dataclass(frozen=True)
class AdelicUnknown:
    detail: str


AdelicVerdict = Union[HasAdelicPoint, NoAt, AdelicUnknown]


def _integral(q: QuadForm5) -> QuadForm5:
    return QuadForm5.from_coeffs(q.integer_coeffs())


def bad_reduction_primes(p: Pencil) -> list[int]:
    """Primes dividing the discriminant of the integral characteristic quintic, together with 2."""
    cf = char_form(Pencil(_integral(p.q1), _integral(p.q2)))
    coeffs = [int(c) for c in cf.coeffs]
    t = sympy.Symbol("t")
    if coeffs[5] == 0:
        coeffs = coeffs[::-1]
    if coeffs[5] == 0:
        raise ValueError("characteristic form has a double root at 0 and infinity")
    poly = sympy.Poly(sum(c * t**k for k, c in enumerate(coeffs)), t)
    disc = int(sympy.discriminant(poly)) * coeffs[5]
    return sorted(set(prime_factors(2 * disc)))


def _rational_point(surface: Surface, height: int) -> Optional[tuple]:
    if surface.family is not None and surface.contains(FAMILY_POINT):
        return FAMILY_POINT
    if private_shape(surface) is None:
        return None
    pts = search_rational_points(surface, height)
    return pts[0].coords if pts else None


def adelic_point_check(surface: Surface, budget: int = DEFAULT_BUDGET, height: int = 10) -> AdelicVerdict:
    """A rational point, or local solubility place by place."""
    pt = _rational_point(surface, height)
    if pt is not None:
        return HasAdelicPoint(f"rational point {ProjPoint.of(pt)}")
    try:
        real_analysis(surface, samples=20)
    except NoRealPoints as exc:
        return NoAt(INFINITY, str(exc))
    bad = bad_reduction_primes(surface.pencil)
    small = [q for q in sympy.primerange(2, STRUCTURAL_PRIME) if q not in bad]
    for q in sorted(set(bad) | set(small)):
        sol = padic_solubility(surface, q, budget)
        if isinstance(sol, Insoluble):
            return NoAt(Place(q), f"no primitive solution modulo {q}^{sol.depth + 1}")
        if isinstance(sol, Budget):
            return AdelicUnknown(f"p = {q}: {sol.detail}")
    return HasAdelicPoint(
        "real and p-adic points at all bad and small primes",
        (f"good primes p >= {STRUCTURAL_PRIME} have smooth F_p-points (p^2 - 7p + 1 > 0) that lift",),
    )


# --------------------------------------------------------------------------
# working set


@dataclass(frozen=True)
class Undetermined:
    image: frozenset
    detail: str = ""


PlaceVerdict = Union[ProvedConstant, ProvedWorking, Undetermined]


@dataclass(frozen=True)
class WorkingSetOptions:
    budget: int = DEFAULT_BUDGET
    real_samples: int = 200
    seed: int = 0
    seeds: tuple = ()  # extra rational points used as p-adic evidence


@dataclass(frozen=True)
class GroupSummary:
    order: Optional[int]  # None when only bounds are known
    structure: str
    method: str
    generators: tuple = ()
    discriminants: tuple = ()


@dataclass
class WorkingSetReport:
    verdicts: dict  # Place -> PlaceVerdict, over the support places
    other_places: str
    group: GroupSummary
    adelic: AdelicVerdict
    exceptional_primes: tuple = ()

    @property
    def working_set(self) -> tuple[Place, ...]:
        return place_set(v for v, r in self.verdicts.items() if isinstance(r, ProvedWorking))

    @property
    def undetermined(self) -> tuple[Place, ...]:
        return place_set(v for v, r in self.verdicts.items() if isinstance(r, Undetermined))

    @property
    def complete(self) -> bool:
        return not self.undetermined


def criterion_exceptions(c: BrauerClassRep) -> list[int]:
    """Odd primes at which some row form of the presentation drops below rank 4."""
    out = set()
    for i in (0, 1):
        m = primitive_gram(c.presentation.row_form(i))
        g = 0
        for skip_r in range(5):
            for skip_c in range(5):
                minor = [[m[r][k] for k in range(5) if k != skip_c] for r in range(5) if r != skip_r]
                g = gcd(g, int(linalg.det(minor)))
        if g == 0:
            raise ValueError(f"row form {i + 1} has rank below 4")
        out |= set(prime_factors(g))
    return sorted(out - {2})


def support_places(c: BrauerClassRep, surface: Surface) -> tuple[Place, ...]:
    places = {INFINITY, Place(2)} | {Place(q) for q in criterion_exceptions(c)}
    places |= {Place(q) for q in prime_factors(c.D)}
    if surface.family is not None:
        D, A1, A2, B = surface.family.as_tuple()
        places |= {Place(q) for q in prime_factors(2 * D * A1 * A2 * B)}
    return place_set(places)


def _finite_verdict(c, surface, place, opts: WorkingSetOptions) -> PlaceVerdict:
    cert = constancy_certificate(c, surface, place)
    if isinstance(cert, ProvedConstant):
        return cert
    wit = nonconstancy_by_witness(c, surface, place)
    if isinstance(wit, ProvedWorking):
        return wit
    seeds = list(opts.seeds) + ([FAMILY_POINT] if surface.family is not None else [])
    img = eval_image_at_p(c, surface, place.p, opts.budget, seeds=seeds)
    if len(img.values) == 2:
        ev = tuple(f"{v}: {kind} {pt}" for v, (kind, pt) in sorted(img.evidence.items()))
        return ProvedWorking("point-pair", "two p-adic points with distinct evaluations", ev)
    if img.determinate and not img.values:
        return ProvedConstant("enumeration", f"no smooth {place.p}-adic points, so the map is vacuously constant")
    if img.determinate:
        (val,) = img.values
        return ProvedConstant("enumeration", f"every smooth residue branch mod {place.p}^k evaluates to {val}")
    return Undetermined(img.values, img.reason)


def _real_verdict(c, surface, opts: WorkingSetOptions) -> PlaceVerdict:
    cert = constancy_certificate(c, surface, INFINITY)
    if isinstance(cert, ProvedConstant):
        return cert
    wit = nonconstancy_by_witness(c, surface, INFINITY)
    if isinstance(wit, ProvedWorking):
        return wit
    try:
        ra = real_analysis(surface, c, opts.real_samples, opts.seed)
    except NoRealPoints as exc:
        return Undetermined(frozenset(), str(exc))
    by_value = {}
    for pt, v, _ in ra.samples:
        if v is not None:
            by_value.setdefault(v, pt)
    if len(by_value) == 2:
        ev = tuple(f"{v}: {pt}" for v, pt in sorted(by_value.items()))
        return ProvedWorking("point-pair", f"real samples on distinct components ({ra.separating_function})", ev)
    if ra.arcs and len(set().union(*(vals for _, _, vals in ra.arcs))) == 1:
        (val,) = set().union(*(vals for _, _, vals in ra.arcs))
        return ProvedConstant("sign-analysis", f"sign pattern of the quotient forces {val} on every real arc")
    return Undetermined(frozenset(by_value), "real samples show a single value")


def group_summary(surface: Surface, verdicts: Optional[dict] = None) -> GroupSummary:
    p = surface.pencil
    try:
        classes = discriminant_vector(p)
    except NotSplit:
        classes = None
    if classes is not None:
        g: BrauerGroup = br_group_diagonal(classes)
        structure = {0: "0", 1: "Z/2Z", 2: "(Z/2Z)^2"}[g.rank]
        return GroupSummary(g.order, structure, "kernel of o modulo T", tuple(g.generators), tuple(c.value for c in classes))
    if order4_criterion(p):
        return GroupSummary(4, "(Z/2Z)^2", "three equal non-square discriminants")
    if verdicts and any(isinstance(v, ProvedWorking) for v in verdicts.values()):
        return GroupSummary(2, "Z/2Z", "order at most 2 and the class evaluates non-constantly")
    return GroupSummary(None, "order at most 2", "order-four criterion fails")


def working_set(surface: Surface, c: Optional[BrauerClassRep] = None, options: Optional[WorkingSetOptions] = None) -> WorkingSetReport:
    """Per-place verdicts for the class ``c`` (default: the surface's own presentation)."""
    opts = options or WorkingSetOptions()
    if c is None:
        if surface.presentation is None:
            raise ValueError("surface carries no presentation of a Brauer class")
        c = BrauerClassRep(surface.presentation)
    adelic = adelic_point_check(surface, opts.budget)
    exceptions = tuple(criterion_exceptions(c))
    verdicts: dict = {}
    for place in support_places(c, surface):
        if place.is_infinite:
            verdicts[place] = _real_verdict(c, surface, opts)
        else:
            verdicts[place] = _finite_verdict(c, surface, place, opts)
    other = "good-reduction: both row forms have rank 4 modulo every other odd prime"
    return WorkingSetReport(verdicts, other, group_summary(surface, verdicts), adelic, exceptions)
