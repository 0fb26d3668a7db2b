from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from dp4brauer.arith import INFINITY, Place, SquareClass
from dp4brauer.brauer import (
    QUOTIENT_CHOICES,
    WITNESS_GENERATORS,
    BrauerClassRep,
    EvalValue,
    Indeterminate,
    ProvedConstant,
    ProvedWorking,
    SignAutomorphism,
    Unknown,
    br_group_diagonal,
    build_presentation_family,
    constancy_certificate,
    derive_presentation,
    eval_at_rational_point,
    has_good_reduction,
    nonconstancy_by_witness,
    order4_criterion,
    ramified_congruence,
    triviality_criterion,
    witness_components,
)
from dp4brauer.construct import family_surface
from dp4brauer.localglobal import search_rational_points
from dp4brauer.pencil import Pencil, PencilDomainError, QuadForm5, discriminant_vector, is_nonsingular_dp4
from dp4brauer.surface import FamilyParams, Surface
from oracles import hilbert_bruteforce

# small family surfaces with plenty of rational points of height <= 12
POINTED_FAMILIES = [(2, -1, 7, 3), (-1, 2, 5, 2), (3, 1, -2, 2), (2, 7, -1, 3)]


def _places_for(x, c: BrauerClassRep):
    primes = {2} | set(sympy.primefactors(c.D))
    for q in c.quotients(x).values():
        primes |= set(sympy.primefactors(q.numerator * q.denominator))
    return [INFINITY] + [Place(int(p)) for p in sorted(primes)]


@pytest.fixture(scope="module")
def pointed():
    out = []
    for fp in POINTED_FAMILIES:
        s = family_surface(FamilyParams(*fp))
        out.append((s, [p.coords for p in search_rational_points(s, 12)]))
    return out


# evaluation --------------------------------------------------------------


def test_eval_matches_bruteforce_hilbert(real_place):
    c = BrauerClassRep(real_place.presentation)
    pts = search_rational_points(real_place, 20)
    assert len(pts) > 10
    for pt in pts:
        try:
            q = next(iter(c.quotients(pt.coords).values()))
        except StopIteration:
            continue
        num = q.numerator * q.denominator
        for place in _places_for(pt.coords, c):
            got = eval_at_rational_point(c, pt.coords, place)
            p = None if place.is_infinite else place.p
            assert (got is EvalValue.HALF) == (hilbert_bruteforce(num, c.D, p) == -1)


def test_eval_real_place_arcs(real_place):
    c = BrauerClassRep(real_place.presentation)
    # the real value depends only on the sign of T0/(T0 - 4*T1): T0/T1 = 2 is in [0, 4], T0/T1 = 8 in [6, inf]
    assert c.quotient((2, 1, 1, 0, 0), (0, 0)) == Fraction(2, -2)
    assert eval_at_rational_point(c, (2, 1, 1, 0, 0), INFINITY) is EvalValue.HALF
    assert eval_at_rational_point(c, (8, 1, 1, 0, 0), INFINITY) is EvalValue.ZERO


def test_eval_indeterminate(real_place):
    c = BrauerClassRep(real_place.presentation)
    with pytest.raises(Indeterminate):
        eval_at_rational_point(c, (0, 0, 0, 1, 1), INFINITY)


def test_eval_value_group():
    assert EvalValue.HALF + EvalValue.HALF is EvalValue.ZERO
    assert str(EvalValue.HALF) == "1/2"


def test_quotient_choice_independence_on_points(real_place, pointed):
    checked = 0
    for surface, pts in [(real_place, [p.coords for p in search_rational_points(real_place, 15)])] + pointed:
        c = BrauerClassRep(surface.presentation)
        for x in pts:
            for place in _places_for(x, c):
                vals = {
                    eval_at_rational_point(BrauerClassRep(surface.presentation, ch), x, place)
                    for ch in QUOTIENT_CHOICES
                    if c.quotient(x, ch) is not None
                }
                assert len(vals) <= 1
                checked += 1
    assert checked >= 50


def test_rational_points_sum_to_zero(pointed):
    for surface, pts in pointed:
        c = BrauerClassRep(surface.presentation)
        for x in pts:
            if not c.quotients(x):
                continue
            total = sum(int(eval_at_rational_point(c, x, v)) for v in _places_for(x, c))
            assert total % 2 == 0


# witnesses ---------------------------------------------------------------


def test_witness_consistency(pointed):
    pairs = 0
    for surface, pts in pointed:
        c = BrauerClassRep(surface.presentation)
        for sigma in WITNESS_GENERATORS:
            wc = witness_components(c, surface, sigma)
            for x in pts:
                y = sigma.apply(x)
                if not c.quotients(x) or not c.quotients(y):
                    continue
                pairs += 1
                for place in set(_places_for(x, c)) | set(_places_for(y, c)):
                    shift = EvalValue.HALF if place in wc.components else EvalValue.ZERO
                    assert eval_at_rational_point(c, y, place) == eval_at_rational_point(c, x, place) + shift
    assert pairs >= 50


@given(
    st.sampled_from([2, 3, 5, 6, 7, -1, -2, -3, 17, -15, 105]),
    st.integers(-60, 60).filter(bool),
    st.integers(-60, 60).filter(bool),
    st.integers(2, 20),
)
def test_witness_support_is_even(D, A1, A2, B):
    s = family_surface(FamilyParams(D, A1, A2, B))
    c = BrauerClassRep(s.presentation)
    for sigma in SignAutomorphism.all():
        assert len(witness_components(c, s, sigma).components) % 2 == 0


def test_sign_automorphism_normal_form():
    assert SignAutomorphism.of(0) == SignAutomorphism.of(1, 2, 3, 4)
    assert len(SignAutomorphism.all()) == 16
    assert SignAutomorphism.of(1).apply((1, 2, 3, 4, 5)) == (1, -2, 3, 4, 5)


def test_witness_examples():
    s = family_surface(FamilyParams(105, 157, 577, 13))
    c = BrauerClassRep(s.presentation)
    assert isinstance(nonconstancy_by_witness(c, s, Place(3)), ProvedWorking)
    assert isinstance(nonconstancy_by_witness(c, s, Place(5)), ProvedWorking)
    assert isinstance(nonconstancy_by_witness(c, s, Place(7)), Unknown)


# group structure -----------------------------------------------------------


def _classes(vals):
    return [SquareClass(v) for v in vals]


def test_group_examples():
    g = br_group_diagonal(_classes([17, 17, 66, 206, 3399]))
    assert g.rank == 1 and g.order == 2 and g.generators == ((0, 1),)
    assert br_group_diagonal(_classes([1, 1, 1, 1, 1])).rank == 0
    g4 = br_group_diagonal(_classes([5, 5, 5, 5, 1]))
    assert g4.rank == 2 and len(g4.generators) == 3


diag_entries = st.lists(
    st.tuples(st.integers(-12, 12).filter(bool), st.integers(-12, 12).filter(bool)), min_size=5, max_size=5
).filter(lambda pairs: len({Fraction(a, b) for a, b in pairs}) == 5)


@given(diag_entries)
def test_order_four_iff_rank_two(pairs):
    p = Pencil(QuadForm5.diagonal([a for a, _ in pairs]), QuadForm5.diagonal([b for _, b in pairs]))
    g = br_group_diagonal(discriminant_vector(p))
    assert order4_criterion(p) == (g.rank == 2)


@given(diag_entries)
def test_group_order_is_power_of_two_at_most_four(pairs):
    p = Pencil(QuadForm5.diagonal([a for a, _ in pairs]), QuadForm5.diagonal([b for _, b in pairs]))
    assert br_group_diagonal(discriminant_vector(p)).order in (1, 2, 4)


def test_triviality_criterion():
    assert triviality_criterion(_classes([17, 17, 1, 1, 1]))
    assert not triviality_criterion(_classes([17, 17, 66, 206, 3399]))
    with pytest.raises(PencilDomainError):
        triviality_criterion(_classes([17, 5, 1, 1, 1]))
    with pytest.raises(PencilDomainError):
        triviality_criterion(_classes([1, 1, 1, 1, 1]))


# presentations -------------------------------------------------------------


def test_family_presentation_rows():
    pres = build_presentation_family(FamilyParams(17, 1, 103, 2))
    assert pres.row_discs == (17, 68)
    with pytest.raises(PencilDomainError):
        build_presentation_family(FamilyParams(4, 1, 103, 2))
    with pytest.raises(PencilDomainError):
        build_presentation_family(FamilyParams(68, 1, 103, 2))


@pytest.mark.parametrize("fp", [(17, 1, 103, 2), (105, 157, 577, 13), (-15, 61, 181, 17)])
def test_derive_presentation_for_family_pencils(fp):
    s = family_surface(FamilyParams(*fp))
    pres = derive_presentation(s.pencil)
    assert pres is not None
    Surface(s.pencil, pres)  # raises unless the rows span the pencil
    assert is_nonsingular_dp4(pres.pencil())


def test_derive_presentation_example(real_place):
    pres = derive_presentation(real_place.pencil)
    assert pres is not None and pres.D == -7


# constancy -----------------------------------------------------------------


def test_constancy_examples(real_place):
    c = BrauerClassRep(real_place.presentation)
    assert constancy_certificate(c, real_place, Place(2)) == ProvedConstant("split", "2 splits in Q(sqrt(-7))")
    assert constancy_certificate(c, real_place, Place(13)).reason == "good-reduction"
    assert isinstance(constancy_certificate(c, real_place, INFINITY), Unknown)
    assert isinstance(constancy_certificate(c, real_place, Place(7)), Unknown)


def test_constancy_empty_set_example(empty_set_surface):
    c = BrauerClassRep(empty_set_surface.presentation)
    reasons = {v: constancy_certificate(c, empty_set_surface, Place(v)).reason for v in (2, 103, 17)}
    assert reasons == {2: "split", 103: "split", 17: "ramified-congruence"}
    assert constancy_certificate(c, empty_set_surface, INFINITY).reason == "split"


def test_good_reduction_never_at_two(real_place):
    assert not has_good_reduction(real_place.presentation, 2)


def test_ramified_congruence_conditions():
    assert ramified_congruence(FamilyParams(17, 1, 103, 2), 17)
    assert not ramified_congruence(FamilyParams(17, 1, 104, 2), 17)
    assert not ramified_congruence(FamilyParams(17, 3, 103, 2), 17)  # (-3/17) = -1
    assert not ramified_congruence(FamilyParams(17, 1, 103, 2), 2)
