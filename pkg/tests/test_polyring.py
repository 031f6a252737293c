import pytest
import sympy as sp
from hypothesis import given, strategies as st

from algebra.parser import PolyParseError
from algebra.polyring import (InhomogeneityError, MultiPoly, NotDivisibleError, TableMismatchError, VarTable,
                              WeightVector, bi_weight, parse_poly, substitute)
from algebra.scalars import ZETA, EisensteinRational
from tests.settings import QUICK_SETTINGS, STANDARD_SETTINGS

TABLE = VarTable(("s", "x", "y"))
WEIGHTS = WeightVector(TABLE, {"s": (3, 0), "x": (1, 1), "y": (0, 2)})

small = st.integers(-3, 3)
coefficients = st.builds(EisensteinRational, small, small)
exponents = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(exponents, coefficients, max_size=5).map(lambda terms: MultiPoly(TABLE, terms))
low_degree = st.dictionaries(st.tuples(*[st.integers(0, 1)] * 3), coefficients, max_size=3).map(
    lambda terms: MultiPoly(TABLE, terms))

Z = sp.Symbol("zeta")
SYMBOLS = sp.symbols("s x y")


def to_sympy(p: MultiPoly):
    expr = sp.Integer(0)
    for exps, c in p.terms.items():
        coeff = sp.Rational(c.re.numerator, c.re.denominator) + sp.Rational(c.zc.numerator, c.zc.denominator) * Z
        expr += coeff * sp.prod([v ** e for v, e in zip(SYMBOLS, exps)])
    return expr


def reduce_zeta(expr):
    return sp.expand(sp.rem(sp.expand(expr), Z ** 2 + Z + 1, Z))


def p(text):
    return parse_poly(text, TABLE)


def test_parse_and_print():
    f = p("-3*z^2*s*x + x^2 - (1 - z)/3*y")
    assert str(f) == "(3+3*z)*s*x + x^2 - (1-z)/3*y"
    assert parse_poly(str(f), TABLE) == f


def test_parse_reports_column():
    with pytest.raises(PolyParseError) as e:
        p("x^2 + 3*q")
    assert e.value.col == 9
    assert "undeclared" in e.value.message


def test_z_is_reserved():
    with pytest.raises(ValueError):
        VarTable(("x", "z"))
    with pytest.raises(ValueError):
        VarTable(("x", "x"))


def test_table_mismatch():
    other = VarTable(("x", "y", "s"))
    with pytest.raises(TableMismatchError):
        p("x") + parse_poly("x", other)
    with pytest.raises(TableMismatchError):
        p("x").derivative("t")


def test_zero_and_degree():
    zero = TABLE.zero()
    assert zero.is_zero() and not zero
    assert zero.degree() == -1
    assert p("s*x^2 + y").degree() == 3
    assert p("s*x^2 + y").degree_in("x") == 2


def test_coefficients_in_keeps_the_table():
    parts = p("s*x^2 + 2*x^2 + s*y").coefficients_in(("x", "y"))
    assert parts[(2, 0)] == p("s + 2")
    assert parts[(0, 1)] == p("s")
    assert parts[(2, 0)].table == TABLE


def test_evaluate_and_value_at():
    f = p("s*x^2 + z*y")
    assert f.evaluate({"s": 0}) == p("z*y")
    assert f.value_at({"s": 1, "x": 2, "y": 3}) == 4 + 3 * ZETA
    with pytest.raises(ValueError):
        f.value_at({"s": 1})


def test_truncate():
    assert p("y^3 + s*y^2 + x").truncate("y", 3) == p("s*y^2 + x")


def test_exact_division():
    f = p("x^2 - y^2")
    assert f.exact_div(p("x + y")) == p("x - y")
    with pytest.raises(NotDivisibleError):
        p("x^2 + 1").exact_div(p("x"))
    with pytest.raises(ZeroDivisionError):
        f.exact_div(TABLE.zero())


def test_substitute_into_another_table():
    target = VarTable(("lam", "mu"))
    images = {"s": parse_poly("lam^3", target), "x": parse_poly("lam*mu", target), "y": parse_poly("mu^2", target)}
    assert substitute(p("s*y - x^2*y + x^2"), images, target) == parse_poly("lam^3*mu^2 - lam^2*mu^4 + lam^2*mu^2", target)


def test_substitute_rejects_foreign_images():
    with pytest.raises(TableMismatchError):
        substitute(p("x"), {"x": parse_poly("x", VarTable(("x",)))})


def test_bi_weight():
    assert bi_weight(p("s^2*y^3 + 2*x^6"), WEIGHTS) == (6, 6)
    assert bi_weight(p("s*x*y"), WEIGHTS) == (4, 3)
    with pytest.raises(InhomogeneityError) as e:
        bi_weight(p("s + y"), WEIGHTS)
    assert len(e.value.terms) == 2
    with pytest.raises(ValueError):
        bi_weight(TABLE.zero(), WEIGHTS)


@STANDARD_SETTINGS
@given(polys, polys)
def test_product_matches_sympy(f, g):
    assert reduce_zeta(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0


@STANDARD_SETTINGS
@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f - f == TABLE.zero()


@STANDARD_SETTINGS
@given(polys)
def test_print_parse(f):
    assert parse_poly(str(f), TABLE) == f


@QUICK_SETTINGS
@given(polys, polys, low_degree, low_degree)
def test_substitute_is_a_homomorphism(f, g, a, b):
    images = {"x": a, "y": b}
    assert substitute(f * g, images) == substitute(f, images) * substitute(g, images)
    assert substitute(f + g, images) == substitute(f, images) + substitute(g, images)


@STANDARD_SETTINGS
@given(polys, polys)
def test_derivative_product_rule(f, g):
    for name in TABLE.names:
        assert (f * g).derivative(name) == f.derivative(name) * g + f * g.derivative(name)


@STANDARD_SETTINGS
@given(exponents, exponents, coefficients, coefficients)
def test_bi_weight_is_additive(e1, e2, c1, c2):
    if not c1 or not c2:
        return
    f = MultiPoly.monomial(TABLE, e1, c1)
    g = MultiPoly.monomial(TABLE, e2, c2)
    w1, w2 = bi_weight(f, WEIGHTS), bi_weight(g, WEIGHTS)
    assert bi_weight(f * g, WEIGHTS) == (w1[0] + w2[0], w1[1] + w2[1])


@STANDARD_SETTINGS
@given(polys, polys)
def test_exact_division_recovers_factor(f, g):
    if not g:
        return
    assert (f * g).exact_div(g) == f
