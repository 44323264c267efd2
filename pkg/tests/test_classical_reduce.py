import random

import pytest

from ljreduce.classical_reduce import (DiracBracket, LiftError, Lifter, NotLieSubalgebra,
                                       ReductionScenario, certify_strong, dirac_bracket,
                                       dirac_reduce, example_fields, generalized_reduce,
                                       lie_closure, normalizer, reduce_by_constraints,
                                       reduce_by_symmetries, reduced_bivector, search,
                                       second_class_check, tangential_part, two_stage_reduce)
from ljreduce.exactalg import Polynomial, monomials_up_to, parse_polynomial
from ljreduce.poisson import PoissonBivector, PolyVectorField, bracket, hamiltonian_vf
from ljreduce.subspaces import NormalizerSpace, truncate

V6 = ("x1", "x2", "x3", "y1", "y2", "y3")
VN = ("x3", "y1", "y2", "y3")
XY = ("x", "y")
PI6 = PoissonBivector.canonical(V6)


def P(text, variables=V6):
    return parse_polynomial(text, variables)


def F(mapping, variables=V6):
    return PolyVectorField.from_mapping(variables, mapping)


def family(lam, **kw):
    fields = example_fields(V6, P(lam))
    return ReductionScenario(PI6, ("x1", "x2"), fields, **kw)


def certified(lam):
    fields = example_fields(V6, P(lam))
    return ReductionScenario(PI6, ("x1", "x2"), fields, b_minus_fields=fields)


# symmetries -------------------------------------------------------------------

def test_symmetry_functions_of_y():
    rep, red = reduce_by_symmetries(PoissonBivector.canonical(XY), [F({"x": 1}, XY)], 3)
    assert rep.passed
    assert sorted(map(str, red.representatives)) == ["1", "y", "y^2", "y^3"]
    assert all(v.is_zero() for v in red.structure.values())


def test_symmetry_hamiltonian_fields_always_close():
    pi = PoissonBivector.canonical(XY)
    for g in ["x", "x y", "x^2 + y^2"]:
        rep, _ = reduce_by_symmetries(pi, [hamiltonian_vf(pi, P(g, XY))], 3)
        assert rep.passed, g


def test_symmetry_closure_fail():
    rep, red = reduce_by_symmetries(PI6, [F({"x2": 1, "y1": P("-x3")})], 2)
    cond = rep["lie_closure"]
    assert not cond.passed and red is None
    f, g = (P(s) for s in cond.witness["pair"])
    X = F({"x2": 1, "y1": P("-x3")})
    assert X(f).is_zero() and X(g).is_zero()
    assert not X(bracket(PI6, f, g)).is_zero()


def test_symmetry_needs_fields():
    with pytest.raises(ValueError):
        reduce_by_symmetries(PI6, [], 2)


# constraints and Dirac --------------------------------------------------------

def test_second_class_pair():
    rep = second_class_check(PI6, [P("x1"), P("y1")], ("x1", "y1"))
    assert rep.passed
    assert rep["second_class_det"].detail == "det C(0) = 1"


def test_first_class_single():
    rep = second_class_check(PI6, [P("x1")], ("x1",))
    assert not rep["second_class_det"].passed
    cond = rep["normalizer_plus_ideal_full"]
    assert not cond.passed and cond.witness["missing"][0] == "y1"


def test_commuting_pair_fails():
    rep = second_class_check(PI6, [P("x1"), P("x2")], ("x1", "x2"))
    assert not rep["second_class_det"].passed


def test_constraint_must_vanish_on_n():
    with pytest.raises(ValueError):
        second_class_check(PI6, [P("x1 + 1")], ("x1",))


def test_dirac_examples():
    phi = [P("x1"), P("y1")]
    assert dirac_bracket(PI6, phi, P("x2"), P("y2")) == P("1")
    for g in ["x2", "y2", "x3"]:
        assert dirac_bracket(PI6, phi, P("x1"), P(g)).restrict_zero([0, 3]).is_zero()
    f = P("x1 y2 + x3^2 y1")
    assert dirac_bracket(PI6, phi, f, f).is_zero()


def test_dirac_matches_reduced_canonical_bracket():
    # oracle: canonical bracket of the restrictions in (x2, x3, y2, y3)
    phi = [P("x1"), P("y1")]
    db = DiracBracket(PI6, phi)
    keep = (1, 2, 4, 5)
    small = PoissonBivector.canonical(("x2", "x3", "y2", "y3"))
    monos = [Polynomial.monomial(V6, e) for e in monomials_up_to(6, 3) if sum(e)]
    rng = random.Random(2)
    pairs = [tuple(rng.sample(monos, 2)) for _ in range(150)]
    for f, g in pairs:
        lhs = db(f, g).restrict_zero([0, 3]).drop_variables(keep)
        rhs = bracket(small, f.restrict_zero([0, 3]).drop_variables(keep),
                      g.restrict_zero([0, 3]).drop_variables(keep))
        assert lhs == rhs


def test_dirac_jacobi_on_monomial_triples():
    db = DiracBracket(PI6, [P("x1"), P("y1")])
    monos = [Polynomial.monomial(V6, e) for e in monomials_up_to(6, 2) if sum(e)]
    rng = random.Random(5)
    for _ in range(60):
        f, g, h = rng.sample(monos, 3)
        jac = db(f, db(g, h)) + db(g, db(h, f)) + db(h, db(f, g))
        assert jac.restrict_zero([0, 3]).is_zero()


def test_dirac_nonconstant_matrix():
    # C = {x1, y1 + x1 y1} = 1 + x1 is inverted as a truncated series
    phi = [P("x1"), P("y1 + x1 y1")]
    db = DiracBracket(PI6, phi, degree=4)
    assert not db.exact
    for g in [P("x2"), P("y1 y2"), P("x3 y3^2")]:
        for c in phi:
            assert db(c, g).restrict_zero([0, 3]).is_zero()


def test_dirac_rejects_singular():
    with pytest.raises(ValueError):
        DiracBracket(PI6, [P("x1")])


def test_dirac_reduce_bivector():
    rep, red = dirac_reduce(PI6, [P("x1"), P("y1")], ("x1", "y1"))
    assert rep.passed
    assert red.bivector_strings() == {"x2^y2": "1", "x3^y3": "1"}


def test_reduce_by_constraints_dims():
    rep, red = reduce_by_constraints(PI6, ("x1", "y1"), 2, [P("x1"), P("y1")])
    assert rep.passed
    # functions of degree <= 2 in the four remaining coordinates
    assert rep.dims["quotient"] == 15


# generalized reduction --------------------------------------------------------

def test_lambda_x3_reduced_bivector_and_jacobi():
    res = generalized_reduce(family("x3"))
    rep = res.report
    assert rep["weak_a"].passed and rep["weak_b"].passed
    pin = res.reduced.bivector
    expected = PoissonBivector(VN, {("x3", "y3"): P("1", VN), ("y1", "y2"): P("x3", VN)})
    assert pin == expected
    jac = rep["jacobi"]
    assert not jac.passed
    assert jac.witness == {"triple": ["y1", "y2", "y3"], "residual": "-1"}
    assert not rep.passed


def test_lambda_x3_lift_of_y1():
    res = generalized_reduce(family("x3"))
    assert res.reduced.lifts["y1"] == P("y1 + x2 x3")


def test_second_lift_gives_same_bivector():
    s = family("x3")
    pin, lifts = reduced_bivector(s)
    alt, alt_lifts = reduced_bivector(s, extra=P("x1 x2"))
    assert alt_lifts["y1"] == P("y1 + x2 x3 + x1 x2")
    assert alt == pin


def test_lambda_y1y2_jacobi_pass():
    res = generalized_reduce(family("y1 y2"))
    assert res.report.passed
    assert res.reduced.bivector.components[(1, 2)] == P("y1 y2", VN)


def test_b_zero_requires_lie_ideal():
    s = ReductionScenario(PI6, ("x1", "x2"), ())
    rep = generalized_reduce(s).report
    assert not rep["weak_b_lie_ideal"].passed


def test_empty_k_gives_original_bivector():
    pi = PoissonBivector(XY, {("x", "y"): P("x y + 1", XY)})
    s = ReductionScenario(pi, (), (F({}, XY),))
    pin, _ = reduced_bivector(s)
    assert pin == pi


def test_lift_error_names_coordinate():
    s = family("x3", d_check=1, d_work=1)
    with pytest.raises(LiftError) as exc:
        reduced_bivector(s)
    assert exc.value.coordinate == "y1"


def test_lifter_canonical_modulo_kernel():
    s = family("x3")
    lifter = Lifter(s.b_space(), s.coords, 4)
    f = lifter.lift(P("y1"))
    assert f.restrict_zero(s.coords) == P("y1")
    assert s.b_space().member(f)
    assert lifter.lift(P("y1^5")) is None


@pytest.mark.parametrize("lam", ["x3", "y1 y2", "1", "y3", "x3 y1 + y2"])
def test_weak_conditions_imply_leibniz_and_antisymmetry(lam):
    rep = generalized_reduce(family(lam)).report
    for name in ("lift_independence", "antisymmetry", "leibniz", "bivector_consistent",
                 "bivector_lift_independence"):
        assert rep[name].passed, name


def test_scenario_validation():
    with pytest.raises(ValueError):
        ReductionScenario(PI6, ("x1",), (F({"x": 1}, XY),))
    with pytest.raises(ValueError):
        ReductionScenario(PI6, ("x1",), (), d_check=0)
    with pytest.raises(ValueError):
        ReductionScenario(PI6, ("x1",), (), d_check=3, d_work=2)


# strong certificate ------------------------------------------------------------

def test_certificate_constant_lambda():
    assert certify_strong(certified("1")).passed


def test_certificate_lambda_x3_fails_strong_a():
    rep = certify_strong(certified("x3"))
    cond = rep["strong_a"]
    assert not cond.passed
    f, g = (P(s) for s in cond.witness["pair"])
    b_minus = certified("x3").b_minus_space()
    assert b_minus.member(f) and b_minus.member(g)
    assert not certified("x3").b_plus_space().member(bracket(PI6, f, g))


@pytest.mark.parametrize("lam", ["1", "y1", "y1 y2", "x3"])
def test_certificate_implies_jacobi(lam):
    s = certified(lam)
    if certify_strong(s).passed:
        assert generalized_reduce(s, with_leibniz=False).reduced.jacobi.passed


def test_certificate_global_subalgebra():
    fields = example_fields(V6, P("1"))
    s = ReductionScenario(PI6, ("x1", "x2"), fields, b_global=True, b_minus_fields=fields)
    assert certify_strong(s).passed


def test_certificate_requires_b_minus():
    with pytest.raises(ValueError):
        certify_strong(family("1"))


# constraints then symmetries ------------------------------------------------------

def global_scenario(fields):
    return ReductionScenario(PI6, ("x1", "x2"), tuple(fields), b_global=True)


def test_two_stage_constant_lambda():
    res = two_stage_reduce(global_scenario(example_fields(V6, P("1"))))
    assert res.report.passed
    assert res.report.dims["E_fields"] == 0
    assert res.generalized_values == res.two_stage_values
    assert len(res.common) == 6


def test_two_stage_restricted_not_subalgebra():
    with pytest.raises(NotLieSubalgebra):
        two_stage_reduce(family("1"))


def test_two_stage_tangent_fields():
    res = two_stage_reduce(global_scenario([F({"y1": 1}), F({"y2": 1})]))
    assert res.report.passed and res.report.dims["E_fields"] == 2


def test_two_stage_same_tangential_part_same_bracket():
    b1 = global_scenario([F({"y1": 1}), F({"y2": 1})])
    b2 = global_scenario([F({"y1": 1}), F({"y2": 1}), F({"x1": 1})])
    assert tangential_part(b1) == tangential_part(b2)
    r1, r2 = two_stage_reduce(b1), two_stage_reduce(b2)
    assert [str(c) for c in r1.common] == [str(c) for c in r2.common]
    assert r1.two_stage_values == r2.two_stage_values


def test_tangential_part_of_transverse_fields_is_zero():
    assert tangential_part(global_scenario(example_fields(V6, P("1")))) == []


@pytest.mark.parametrize("fields", [
    [F({"y1": 1}), F({"y2": 1})], [F({"y3": 1})], [F({"x3": 1})], [F({"x1": 1}), F({"x2": 1})],
    list(example_fields(V6, P("1"))), list(example_fields(V6, P("x3"))),
    [F({"y1": 1, "x3": 1})]])
def test_subalgebra_lies_in_normalizer(fields):
    s = ReductionScenario(PI6, ("x1", "x2"), tuple(fields))
    if lie_closure(PI6, s.b_space(), 2).passed:
        n = NormalizerSpace(PI6, s.coords)
        assert all(n.member(b) for b in truncate(s.b_space(), 2).basis())


def test_normalizer_helper():
    n = normalizer(PI6, ("x1",))
    assert n.member(P("x1 y2")) and not n.member(P("y1"))


# search ------------------------------------------------------------------------

def test_search_is_deterministic_and_consistent():
    a = search(PI6, ("x1", "x2"), random.Random(3), trials=3)
    b = search(PI6, ("x1", "x2"), random.Random(3), trials=3)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    for r in a:
        assert not (r.certificate and not r.jacobi)
        assert r.candidate == (r.weak and r.jacobi and not r.certificate)
