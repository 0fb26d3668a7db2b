import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dp4brauer.arith import Place
from dp4brauer.brauer import BrauerClassRep, EvalValue, ProvedConstant, constancy_certificate
from dp4brauer.construct import family_surface
from dp4brauer.localglobal import (
    Budget,
    Insoluble,
    Soluble,
    approximation_near,
    eval_image_at_p,
    newton_lift,
    padic_solubility,
)
from dp4brauer.localglobal.padic import IntSystem
from dp4brauer.pencil import Pencil, QuadForm5, is_nonsingular_dp4
from dp4brauer.surface import FamilyParams, Surface
from oracles import primitive_solutions_mod

HALF, ZERO = EvalValue.HALF, EvalValue.ZERO

# diagonal pencils with no primitive solution mod p^k, confirmed by exhaustive enumeration
INSOLUBLE = [
    (2, 2, [-3, 1, 1, 1, 7], [-5, 1, 4, 7, -2]),
    (2, 3, [2, -7, -1, 4, 4], [8, -5, 3, -5, 3]),
    (3, 2, [-2, -1, -6, 1, 6], [6, 1, -6, 3, -2]),
]


def _diag_surface(a, b) -> Surface:
    return Surface(Pencil(QuadForm5.diagonal(a), QuadForm5.diagonal(b)))


def _diag_forms(a, b):
    return [{(i, i): c for i, c in enumerate(a)}, {(i, i): c for i, c in enumerate(b)}]


def test_example_soluble_at_seven(real_place):
    sol = padic_solubility(real_place, 7)
    assert isinstance(sol, Soluble)
    x = sol.point.coords
    # residue point with x0/x1 = 1 mod 7
    assert (x[0] - x[1]) % 7 == 0
    assert sol.point.check(IntSystem(real_place))


def test_newton_lift(real_place):
    system = IntSystem(real_place)
    approx = padic_solubility(real_place, 7).point
    lifted = newton_lift(approx, system, levels=2)
    assert lifted.k == approx.k + 2 and lifted.check(system)
    pe = 7**approx.exact_precision
    assert all((a - b) % pe == 0 for a, b in zip(lifted.coords, approx.coords))
    again = newton_lift(lifted, system, levels=2)
    assert again.check(system) and again.k == lifted.k + 2


@pytest.mark.parametrize("p, k, a, b", INSOLUBLE)
def test_insoluble_examples(p, k, a, b):
    s = _diag_surface(a, b)
    assert is_nonsingular_dp4(s.pencil)
    assert primitive_solutions_mod(_diag_forms(a, b), p, k) == 0
    assert isinstance(padic_solubility(s, p), Insoluble)


def test_budget_is_reported():
    assert isinstance(padic_solubility(_diag_surface(*INSOLUBLE[0][2:]), 2, budget=1), Budget)


coeff = st.sampled_from([1, -1, 2, -2, 3, -3, 6, -6, 9, 5])


@settings(max_examples=40)
@given(st.lists(coeff, min_size=5, max_size=5), st.lists(coeff, min_size=5, max_size=5))
def test_solubility_agrees_with_enumeration_mod_9(a, b):
    s = _diag_surface(a, b)
    if not is_nonsingular_dp4(s.pencil):
        return
    res = padic_solubility(s, 3)
    count = primitive_solutions_mod(_diag_forms(a, b), 3, 2)
    if count == 0:
        assert isinstance(res, Insoluble)
    if isinstance(res, Soluble):
        assert res.point.check(IntSystem(s)) and count > 0


def test_image_constant_for_example(real_place):
    c = BrauerClassRep(real_place.presentation)
    img = eval_image_at_p(c, real_place, 7)
    assert img.determinate and img.values == {ZERO}


def test_image_both_values_for_single_prime_target():
    s = family_surface(FamilyParams(17, 1, 10609, 7))
    c = BrauerClassRep(s.presentation)
    img = eval_image_at_p(c, s, 7, seeds=[(1, 1, 1, 0, 0)])
    assert img.values == {ZERO, HALF} and img.determinate
    for kind, pt in img.evidence.values():
        if kind == "p-adic point":
            assert pt.check(IntSystem(s))


def test_approximation_near_two_adic_point():
    s = family_surface(FamilyParams(2, 2, 1, 2))
    c = BrauerClassRep(s.presentation)
    approx, val = approximation_near(c, s, 2, (1, 0, 5, 0, 1), 4)
    assert approx.check(IntSystem(s)) and approx.exact_precision >= 4
    assert all((a - b) % 16 == 0 for a, b in zip(approx.coords, (1, 0, 5, 0, 1)))
    assert val is HALF
    with pytest.raises(ValueError):
        approximation_near(c, s, 2, (1, 0, 0, 0, 0), 4)


@pytest.mark.parametrize(
    "fp, places",
    [((17, 1, 103, 2), [2, 3, 5, 17]), ((105, 157, 577, 13), [2, 7, 11, 13]), ((17, 1, 10609, 7), [2, 3, 13])],
)
def test_certified_constant_places_have_singleton_image(fp, places):
    s = family_surface(FamilyParams(*fp))
    c = BrauerClassRep(s.presentation)
    for p in places:
        assert isinstance(constancy_certificate(c, s, Place(p)), ProvedConstant)
        img = eval_image_at_p(c, s, p, seeds=[(1, 1, 1, 0, 0)])
        assert len(img.values) == 1
        assert img.possible == img.values or not img.determinate
