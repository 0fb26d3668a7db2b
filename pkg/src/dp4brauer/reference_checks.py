"""Regression harness over the reference results, one check group per identifier."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .arith import INFINITY, Place, is_square, squarefree_part
from .brauer import (
    BrauerClassRep,
    EvalValue,
    derive_presentation,
    eval_at_rational_point,
)
from .construct import construct_for_S, family_invariants, family_surface, real_place_surface
from .localglobal.padic import IntSystem, approximation_near
from .localglobal.points import search_rational_points
from .localglobal.real import RealPoint, evaluate_real
from .localglobal.verdicts import WorkingSetOptions, working_set
from .pencil import (
    Pencil,
    PencilDomainError,
    QuadForm5,
    char_form,
    discriminants,
    is_nonsingular_dp4,
    product_class,
    scheme_points,
)
from .surface import FamilyParams, Surface

IDS = ("ex1.2", "rem2.8", "s4.3", "s4.4-l3", "s4.4-l1", "s4.4-l2", "fact3.3", "thm4.1")


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  [{self.detail}]" if self.detail else "")


@dataclass
class CheckContext:
    height: int = 1000
    jobs: int = 1
    seed: int = 0
    trials: int = 100
    options: Optional[WorkingSetOptions] = None


def _numeric_form(q: QuadForm5, x) -> float:
    return sum(float(q.gram[i][j]) * x[i] * x[j] for i in range(5) for j in range(5))


def _kinds(report) -> dict:
    return {str(p): (type(v).__name__, getattr(v, "reason", "")) for p, v in report.verdicts.items()}


# --------------------------------------------------------------------------


def check_real_place_example(ctx: CheckContext) -> list[Assertion]:
    s = real_place_surface()
    out = []
    sx = scheme_points(char_form(s.pencil))
    quad = [cls.value for _, cls, _ in sx.quadratic_factors]
    out.append(Assertion("S_X: three rational points and one quadratic point", len(sx.rational_points) == 3 and len(quad) == 1, f"rational {len(sx.rational_points)}, quadratic {len(quad)}"))
    out.append(Assertion("quadratic point splits over Q(sqrt 6)", quad == [6], f"{quad}"))
    classes = sorted(c.value for _, c in discriminants(s.pencil))
    out.append(Assertion("rank-4 discriminant classes {1, -7, -7}", classes == [-7, -7, 1], f"{classes}"))
    derived = derive_presentation(s.pencil)
    out.append(Assertion("a presentation with D = -7 is derivable from the pencil alone", derived is not None and derived.D == -7))
    ws = working_set(s, None, ctx.options)
    out.append(Assertion("Br(X)/Br(Q) has order 2", ws.group.order == 2, ws.group.method))
    out.append(Assertion("working set is exactly {inf}", ws.working_set == (INFINITY,) and ws.complete, str([str(p) for p in ws.working_set])))
    k = _kinds(ws)
    out.append(Assertion("constant at 2 (split)", k.get("2") == ("ProvedConstant", "split")))
    out.append(Assertion("constant at 7 (exhaustive enumeration)", k.get("7") == ("ProvedConstant", "enumeration")))
    out.append(Assertion("working at inf (two real points)", k.get("inf") == ("ProvedWorking", "point-pair")))
    c = BrauerClassRep(s.presentation)
    pt_half = RealPoint((Fraction(1), Fraction(1), Fraction(1), Fraction(0), (1, Fraction(2))))
    on = all(abs(_numeric_form(q, pt_half.numeric())) < 1e-30 for q in (s.pencil.q1, s.pencil.q2))
    out.append(Assertion("(1:1:1:0:sqrt 2) is real and evaluates to 1/2", on and evaluate_real(c, pt_half) == EvalValue.HALF))
    x = (8, 1, 1, 1, 1)
    out.append(Assertion("(8:1:1:1:1) is rational and evaluates to 0 at inf", s.contains(x) and eval_at_rational_point(c, x, INFINITY) == EvalValue.ZERO))
    return out


def check_point_count(ctx: CheckContext) -> list[Assertion]:
    s = real_place_surface()
    pts = search_rational_points(s, ctx.height, jobs=ctx.jobs)
    ratios = [Fraction(p.coords[0], p.coords[1]) for p in pts if p.coords[1] != 0]
    out = []
    if ctx.height == 1000:
        out.append(Assertion("792 rational points of height at most 1000", len(pts) == 792, f"{len(pts)} points"))
        if len(pts) != 792:
            out.append(Assertion("convention table", False, f"projective {len(pts)}, signed primitive vectors {2 * len(pts)}"))
        out.append(Assertion("min x0/x1 = 319/53", bool(ratios) and min(ratios) == Fraction(319, 53), str(min(ratios)) if ratios else "none"))
    else:
        out.append(Assertion(f"{len(pts)} points at height {ctx.height}", True))
    c = BrauerClassRep(s.presentation)
    out.append(Assertion("every point has x0/x1 > 6", all(r > 6 for r in ratios) and len(ratios) == len(pts)))
    bad = [p for p in pts if eval_at_rational_point(c, p.coords, INFINITY) != EvalValue.ZERO]
    out.append(Assertion("every point evaluates to 0 at inf", not bad, f"{len(bad)} exceptions"))
    return out


def check_empty_set_example(ctx: CheckContext) -> list[Assertion]:
    s = family_surface(FamilyParams(17, 1, 103, 2))
    classes = sorted(c.value for _, c in discriminants(s.pencil))
    out = [Assertion("discriminant classes {17, 17, 66, 206, 3399}", classes == [17, 17, 66, 206, 3399], str(classes))]
    ws = working_set(s, None, ctx.options)
    out.append(Assertion("group Z/2Z", ws.group.structure == "Z/2Z", ws.group.method))
    out.append(Assertion("every place constant", ws.working_set == () and ws.complete))
    k = _kinds(ws)
    want = {"inf": "split", "2": "split", "103": "split", "17": "ramified-congruence"}
    for place, kind in want.items():
        out.append(Assertion(f"constant at {place} ({kind})", k.get(place) == ("ProvedConstant", kind), str(k.get(place))))
    return out


def _single_place(l: int, expected: Optional[tuple], ctx: CheckContext) -> list[Assertion]:
    cert = construct_for_S([Place(l)])
    fp = cert.params.as_tuple() if cert.params else None
    out = []
    if expected is not None:
        out.append(Assertion(f"l = {l}: parameters {expected}", fp == expected, str(fp)))
    ws = working_set(cert.surface, None, ctx.options)
    out.append(Assertion(f"l = {l}: working set exactly {{{l}}}", ws.working_set == (Place(l),) and ws.complete, str([str(p) for p in ws.working_set])))
    out.append(Assertion(f"l = {l}: group Z/2Z", ws.group.structure == "Z/2Z"))
    return out


def check_three_mod_four(ctx: CheckContext) -> list[Assertion]:
    return _single_place(7, (17, 1, 10609, 7), ctx) + _single_place(11, (17, 1, 10609, 11), ctx)


def check_one_mod_four(ctx: CheckContext) -> list[Assertion]:
    return _single_place(13, None, ctx)


def check_two(ctx: CheckContext) -> list[Assertion]:
    out = _single_place(2, (2, 2, 1, 2), ctx)
    s = family_surface(FamilyParams(2, 2, 1, 2))
    out.append(Assertion("5^2 = -7 mod 32", (25 + 7) % 32 == 0))
    approx, val = approximation_near(BrauerClassRep(s.presentation), s, 2, (1, 0, 5, 0, 1), 4)
    ok = approx.check(_system(s)) and approx.exact_precision >= 4
    ok = ok and all((a - b) % 16 == 0 for a, b in zip(approx.coords, (1, 0, 5, 0, 1)))
    out.append(Assertion("2-adic point congruent to (1:0:5:0:1) mod 16 is certified", ok, f"{approx.coords} mod 2^{approx.k}, minor valuation {approx.t}"))
    out.append(Assertion("its evaluation at 2 is 1/2", val == EvalValue.HALF))
    fam = eval_at_rational_point(BrauerClassRep(s.presentation), (1, 1, 1, 0, 0), Place(2))
    out.append(Assertion("(1:1:1:0:0) evaluates to 0 at 2", fam == EvalValue.ZERO))
    return out


def _system(s: Surface) -> IntSystem:
    return IntSystem(s)


def random_diagonal_pencil(rng: random.Random, bound: int = 20) -> Pencil:
    """Diagonal pencil with nonzero coefficients and pairwise distinct ratios a_i : b_i."""
    while True:
        a = [rng.choice([-1, 1]) * rng.randint(1, bound) for _ in range(5)]
        b = [rng.choice([-1, 1]) * rng.randint(1, bound) for _ in range(5)]
        ratios = {Fraction(x, y) for x, y in zip(a, b)}
        if len(ratios) == 5:
            return Pencil(QuadForm5.diagonal(a), QuadForm5.diagonal(b))


def check_product_square(ctx: CheckContext) -> list[Assertion]:
    rng = random.Random(ctx.seed)
    failures = []
    for _ in range(ctx.trials):
        p = random_diagonal_pencil(rng)
        classes = [c for _, c in discriminants(p)]
        if len(classes) != 5 or not product_class(classes).is_trivial:
            failures.append(p)
    return [Assertion(f"product of the five discriminants is a square ({ctx.trials} diagonal pencils)", not failures, f"{len(failures)} failures")]


def random_family_params(rng: random.Random, bound: int = 50) -> FamilyParams:
    """Squarefree non-square D and nonzero A1, A2, B with absolute values at most ``bound``."""
    while True:
        D = rng.choice([-1, 1]) * rng.randint(1, bound)
        if is_square(D) or squarefree_part(D) != D:
            continue
        A1 = rng.choice([-1, 1]) * rng.randint(1, bound)
        A2 = rng.choice([-1, 1]) * rng.randint(1, bound)
        B = rng.randint(1, bound)
        return FamilyParams(D, A1, A2, B)


def family_oracle_agreement(fp: FamilyParams) -> tuple[bool, str]:
    """Closed form versus direct computation for one parameter tuple."""
    inv = family_invariants(fp)
    try:
        s = family_surface(fp)
    except (PencilDomainError, ValueError) as exc:
        return inv.delta == 0, f"no surface: {exc}"
    nonsingular = is_nonsingular_dp4(s.pencil)
    if (inv.delta != 0) != nonsingular:
        return False, f"delta {inv.delta} but nonsingular={nonsingular}"
    if not nonsingular:
        return True, "singular"
    direct = sorted(c.value for _, c in discriminants(s.pencil))
    closed = sorted(c.value for c in inv.discs)
    return direct == closed, f"direct {direct} closed {closed}"


def check_family_closed_form(ctx: CheckContext) -> list[Assertion]:
    rng = random.Random(ctx.seed)
    bad = []
    trials = max(ctx.trials, 50)
    for _ in range(trials):
        fp = random_family_params(rng)
        ok, detail = family_oracle_agreement(fp)
        if not ok:
            bad.append((fp.as_tuple(), detail))
    out = [Assertion(f"closed-form delta and discriminants agree ({trials} tuples)", not bad, str(bad[:3]))]
    fp = FamilyParams(17, 1, 103, 2)
    s = family_surface(fp)
    c = BrauerClassRep(s.presentation)
    vals = {eval_at_rational_point(c, (1, 1, 1, 0, 0), v) for v in (INFINITY, Place(2), Place(17), Place(103))}
    out.append(Assertion("(1:1:1:0:0) lies on the surface and evaluates to 0", s.contains((1, 1, 1, 0, 0)) and vals == {EvalValue.ZERO}))
    return out


CHECKS: dict[str, Callable[[CheckContext], list[Assertion]]] = {
    "ex1.2": check_real_place_example,
    "rem2.8": check_point_count,
    "s4.3": check_empty_set_example,
    "s4.4-l3": check_three_mod_four,
    "s4.4-l1": check_one_mod_four,
    "s4.4-l2": check_two,
    "fact3.3": check_product_square,
    "thm4.1": check_family_closed_form,
}


def run_check(ident: str, ctx: Optional[CheckContext] = None) -> list[Assertion]:
    if ident not in CHECKS:
        raise KeyError(f"unknown check {ident!r}; choose from {', '.join(IDS)}")
    return CHECKS[ident](ctx or CheckContext())
