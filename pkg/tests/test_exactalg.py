from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ljreduce.exactalg import (GaussianRational, Monomial, Polynomial, PolynomialSyntaxError,
                               UnknownVariableError, VariableMismatch, format_polynomial,
                               parse_gaussian, parse_polynomial, poly_add, poly_mul, poly_pdiff,
                               poly_restrict_zero)

V3 = ("x1", "x2", "x3")
V6 = ("x1", "x2", "x3", "y1", "y2", "y3")


def P(text, variables=V3):
    return parse_polynomial(text, variables)


def to_sympy(p):
    syms = sympy.symbols(p.vars)
    return sum((sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction)
                else sympy.Integer(c)) * sympy.Mul(*[s ** e for s, e in zip(syms, exps)])
               for exps, c in p.terms()) if not p.is_zero() else sympy.Integer(0)


def from_sympy(expr, variables):
    syms = sympy.symbols(variables)
    poly = sympy.Poly(sympy.expand(expr), *syms)
    return Polynomial.from_terms(variables, {m: Fraction(int(c.p), int(c.q))
                                             for m, c in poly.terms()})


def polys(n=3, max_deg=3, max_terms=5):
    mono = st.tuples(*[st.integers(0, max_deg) for _ in range(n)]).filter(
        lambda e: sum(e) <= max_deg)
    coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    names = V6[:n] if n <= 6 else tuple(f"v{i}" for i in range(n))
    return st.dictionaries(mono, coef, max_size=max_terms).map(
        lambda d: Polynomial.from_terms(names, d))


# addition ---------------------------------------------------------------------

def test_add_cancellation():
    assert P("x1 + x2") + P("-x1") == P("x2")


def test_add_zero_identity():
    f = P("3/2 x1^2 x3 - x2 + 1")
    assert f + Polynomial.zero(V3) == f


def test_add_like_terms_merge():
    assert poly_add(P("1/2 x1^2"), P("1/2 x1^2")) == P("x1^2")


def test_no_zero_coefficients_stored():
    f = P("x1 + x2") - P("x1")
    assert [e for e, _ in f.terms()] == [(0, 1, 0)]


def test_variable_mismatch():
    with pytest.raises(VariableMismatch):
        P("x1") + parse_polynomial("x1", ("x1", "x2"))


# multiplication ---------------------------------------------------------------

def test_mul_simple():
    assert poly_mul(P("x1"), P("x2")) == P("x1 x2")
    assert P("x1 + 1") * P("x1 - 1") == P("x1^2 - 1")


def _convolve(f, g):
    out = {}
    for (a, c), (b, d) in product(f.terms(), g.terms()):
        e = tuple(x + y for x, y in zip(a, b))
        out[e] = out.get(e, 0) + c * d
    return Polynomial.from_terms(f.vars, out)


@settings(max_examples=40, deadline=None)
@given(polys(4, 3, 6), polys(4, 4, 6))
def test_mul_matches_convolution(f, g):
    assert f * g == _convolve(f, g)


@settings(max_examples=30, deadline=None)
@given(polys(3, 3), polys(3, 3))
def test_mul_matches_sympy(f, g):
    assert f * g == from_sympy(to_sympy(f) * to_sympy(g), V3)


def test_degree_of_product():
    f, g = P("x1^2 x3 + x2"), P("x2^4 - 1")
    assert (f * g).degree == f.degree + g.degree == 7


@settings(max_examples=25, deadline=None)
@given(polys(6, 5, 4), polys(6, 5, 4), polys(6, 5, 4))
def test_ring_axioms(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f * (g + h) == f * g + f * h
    assert (f + g) + h == f + (g + h)
    assert f - f == Polynomial.zero(V6)


# derivatives ------------------------------------------------------------------

def test_pdiff_examples():
    assert poly_pdiff(P("x1^2 x2"), 0) == P("2 x1 x2")
    assert poly_pdiff(P("x1^2"), "x2").is_zero()


def test_pdiff_index_error():
    with pytest.raises(IndexError):
        P("x1").pdiff(3)


@settings(max_examples=30, deadline=None)
@given(polys(3, 3), polys(3, 3), st.integers(0, 2))
def test_pdiff_product_rule(f, g, i):
    assert (f * g).pdiff(i) == f.pdiff(i) * g + f * g.pdiff(i)
    syms = sympy.symbols(V3)
    assert (f * g).pdiff(i) == from_sympy(sympy.diff(to_sympy(f) * to_sympy(g), syms[i]), V3)


@settings(max_examples=30, deadline=None)
@given(polys(3, 4), st.integers(0, 2), st.integers(0, 2))
def test_pdiff_commute(f, i, j):
    assert f.pdiff(i).pdiff(j) == f.pdiff(j).pdiff(i)


# restriction ------------------------------------------------------------------

def test_restrict_examples():
    assert poly_restrict_zero(P("x1 + x3"), ["x1"]) == P("x3")
    assert poly_restrict_zero(P("x1 x2"), [0]).is_zero()
    f = P("x1 + x2 + 1") ** 2
    assert f.restrict_zero([0, 1]) == P("1")


def test_restrict_matches_substitution_oracle():
    f = P("x1 + x2 + 1") ** 3 * P("x3 - x1")
    expr = to_sympy(f).subs({sympy.Symbol("x1"): 0, sympy.Symbol("x2"): 0})
    assert f.restrict_zero([0, 1]) == from_sympy(expr, V3)


@settings(max_examples=30, deadline=None)
@given(polys(3, 3), polys(3, 3), st.sets(st.integers(0, 2)))
def test_restrict_homomorphism(f, g, K):
    assert (f * g).restrict_zero(K) == f.restrict_zero(K) * g.restrict_zero(K)
    assert (f + g).restrict_zero(K) == f.restrict_zero(K) + g.restrict_zero(K)


# ordering ---------------------------------------------------------------------

def test_grlex_examples():
    assert Monomial((0, 0, 1)) < Monomial((2, 0, 0))  # degree first
    assert Monomial((0, 1, 0)) < Monomial((1, 0, 0))  # then x1 largest
    assert Monomial((1, 0, 1)) < Monomial((1, 1, 0))


mono3 = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)).map(Monomial)


@given(mono3, mono3, mono3)
def test_grlex_total_order(a, b, c):
    assert sum([a < b, a == b, b < a]) == 1
    if a < b and b < c:
        assert a < c


def test_terms_sorted_descending():
    f = P("1 + x3 + x1 + x2^2 + x1 x3")
    assert format_polynomial(f) == "x1 x3 + x2^2 + x1 + x3 + 1"


# parsing ----------------------------------------------------------------------

@pytest.mark.parametrize("text", ["3/2 x1^2 x3 - x2 + 1", "-x1", "2*x1*x2 - 1/3", "0", "x3^3"])
def test_parse_format_roundtrip(text):
    f = P(text)
    assert P(format_polynomial(f)) == f


def test_parse_values():
    f = P("3/2 x1^2 x3 - x2 + 1")
    assert f.coefficient((2, 0, 1)) == Fraction(3, 2)
    assert f.coefficient((0, 1, 0)) == -1
    assert f.constant_term() == 1


def test_parse_unknown_variable():
    with pytest.raises(UnknownVariableError) as exc:
        P("x1 + z")
    assert exc.value.name == "z"


@pytest.mark.parametrize("text", ["x1 +", "x1 ^", "1/0 x1", "x1 $ x2", ""])
def test_parse_errors(text):
    with pytest.raises((PolynomialSyntaxError, ZeroDivisionError)):
        P(text)


# Gaussian rationals -----------------------------------------------------------

gauss = st.builds(GaussianRational, st.fractions(-3, 3, max_denominator=5),
                  st.fractions(-3, 3, max_denominator=5))


@given(gauss, gauss, gauss)
def test_gaussian_field_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a.conjugate().conjugate() == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if not a.is_zero():
        assert a * (1 / a) == GaussianRational(1)


def test_gaussian_matches_complex_oracle():
    a, b = GaussianRational(Fraction(1, 2), 3), GaussianRational(-2, Fraction(1, 3))
    z = complex(0.5, 3) * complex(-2, 1 / 3)
    p = a * b
    assert float(p.re) == pytest.approx(z.real) and float(p.im) == pytest.approx(z.imag)


@pytest.mark.parametrize("text,re,im", [("1/2 - 3 i", Fraction(1, 2), -3), ("-i", 0, -1),
                                        ("2", 2, 0), ("i", 0, 1), ("-1/3 + 2/5 i", Fraction(-1, 3),
                                                                    Fraction(2, 5))])
def test_parse_gaussian(text, re, im):
    assert parse_gaussian(text) == GaussianRational(re, im)
