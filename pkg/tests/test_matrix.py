import pytest
import sympy as sp
from hypothesis import given, strategies as st

from algebra.linear import SectionSpace, inverse, kernel_of_columns, rank
from algebra.matrix import PolyMatrix, determinant, jacobian, kernel_over_field, rank_over_fraction_field
from algebra.polyring import MultiPoly, VarTable, parse_poly
from algebra.scalars import ONE, ZERO, ZETA, EisensteinRational
from tests.settings import QUICK_SETTINGS, STANDARD_SETTINGS
from tests.test_polyring import reduce_zeta, to_sympy

TABLE = VarTable(("s", "x", "y"))

small = st.integers(-2, 2)
coefficients = st.builds(EisensteinRational, small, small)
entries = st.dictionaries(st.tuples(*[st.integers(0, 1)] * 3), coefficients, max_size=2).map(
    lambda terms: MultiPoly(TABLE, terms))
constants = coefficients.map(lambda c: MultiPoly.constant(TABLE, c))


def matrices(entry, max_size=3):
    return st.integers(1, max_size).flatmap(
        lambda n: st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n)
    ).map(lambda rows: PolyMatrix(TABLE, rows))


def rect_matrices(entry):
    return st.tuples(st.integers(1, 4), st.integers(1, 4)).flatmap(
        lambda shape: st.lists(st.lists(entry, min_size=shape[1], max_size=shape[1]),
                               min_size=shape[0], max_size=shape[0])
    ).map(lambda rows: PolyMatrix(TABLE, rows))


def p(text):
    return parse_poly(text, TABLE)


def test_determinant_by_hand():
    M = PolyMatrix(TABLE, [[p("2*s*x"), 0, 0], [0, p("2*y"), 0], [0, 0, 2]])
    assert determinant(M) == p("8*s*x*y")
    N = PolyMatrix(TABLE, [[p("x"), p("y")], [p("s"), p("x")]])
    assert determinant(N) == p("x^2 - s*y")


def test_determinant_of_tilde_change():
    z, z2 = ZETA, ZETA * ZETA
    M = PolyMatrix(TABLE, [[z, z2, 1], [z2, z, 1], [1, 1, 1]])
    assert determinant(M).constant_coefficient() == 3 * (z2 - z)


def test_determinant_needs_a_square():
    with pytest.raises(ValueError):
        determinant(PolyMatrix.zeros(TABLE, 2, 3))


def test_rank_of_dependent_rows():
    M = PolyMatrix(TABLE, [[p("x"), p("y")], [p("s*x"), p("s*y")], [1, 0]])
    assert rank_over_fraction_field(M) == 2
    assert rank_over_fraction_field(PolyMatrix.zeros(TABLE, 3, 2)) == 0


def test_kernel_is_normalized():
    M = PolyMatrix(TABLE, [[1, 2, 3], [2, 4, 6]])
    kernel = kernel_over_field(M)
    assert len(kernel) == 2
    for v in kernel:
        first = next(c for c in v if c)
        assert first == ONE
    with pytest.raises(ValueError):
        kernel_over_field(PolyMatrix(TABLE, [[p("x")]]))


def test_inverse_round_trip():
    z = ZETA
    A = [[z, z * z, ONE], [z * z, z, ONE], [ONE, ONE, ONE]]
    B = inverse(A)
    for i in range(3):
        for j in range(3):
            entry = sum((A[i][k] * B[k][j] for k in range(3)), ZERO)
            assert entry == (ONE if i == j else ZERO)
    with pytest.raises(ZeroDivisionError):
        inverse([[1, 2], [2, 4]])


def test_section_space_intersection():
    frame = ("a", "b", "c")
    U = SectionSpace(frame, [{0: ONE}, {1: ONE}])
    V = SectionSpace(frame, [{1: ONE, 2: ONE}, {0: ONE, 1: ONE}])
    W = U.intersection(V)
    assert W.dim == 1
    assert {0: ONE, 1: ONE} in W
    assert W <= U and W <= V
    assert not U <= V


def test_jacobian_rows_and_columns():
    J = jacobian([p("s*x^2 + y"), p("x*y")], ("x", "y"))
    assert J.shape == (2, 2)
    assert J[0, 0] == p("2*s*x")
    assert J[1, 0] == p("y")
    with pytest.raises(ValueError):
        jacobian([], ("x",))


@STANDARD_SETTINGS
@given(matrices(entries))
def test_determinant_matches_sympy(M):
    ours = to_sympy(determinant(M))
    theirs = sp.Matrix([[to_sympy(x) for x in row] for row in M.rows]).det()
    assert reduce_zeta(ours - theirs) == 0


@QUICK_SETTINGS
@given(rect_matrices(entries), st.data())
def test_rank_invariant_under_row_operations(M, data):
    r = rank_over_fraction_field(M)
    assert r <= min(M.shape)
    i = data.draw(st.integers(0, M.nrows - 1))
    j = data.draw(st.integers(0, M.nrows - 1))
    rows = [list(row) for row in M.rows]
    rows[i], rows[j] = rows[j], rows[i]
    assert rank_over_fraction_field(PolyMatrix(TABLE, rows)) == r
    factor = data.draw(entries.filter(bool))
    rows[i] = [x * factor for x in rows[i]]
    assert rank_over_fraction_field(PolyMatrix(TABLE, rows)) == r


@STANDARD_SETTINGS
@given(rect_matrices(constants))
def test_kernel_vectors_vanish(M):
    kernel = kernel_over_field(M)
    assert len(kernel) == M.ncols - rank_over_fraction_field(M)
    for v in kernel:
        for row in M.rows:
            assert sum((x.constant_coefficient() * c for x, c in zip(row, v)), ZERO) == ZERO


@STANDARD_SETTINGS
@given(rect_matrices(constants))
def test_field_rank_agrees_with_elimination(M):
    rows = [{j: x.constant_coefficient() for j, x in enumerate(row) if x} for row in M.rows]
    assert rank(rows) == rank_over_fraction_field(M)
    columns = [{i: x.constant_coefficient() for i, x in enumerate(M.column(j)) if x} for j in range(M.ncols)]
    assert len(kernel_of_columns(columns)) == M.ncols - rank(rows)


@STANDARD_SETTINGS
@given(entries, entries, entries)
def test_jacobian_is_linear_and_obeys_the_product_rule(f, g, c):
    names = TABLE.names
    scalar = c.constant_coefficient()
    assert jacobian([f + g * scalar], names) == jacobian([f], names) + jacobian([g], names).scale(scalar)
    product = jacobian([f * g], names)
    expected = jacobian([f], names).scale(g) + jacobian([g], names).scale(f)
    assert product == expected
