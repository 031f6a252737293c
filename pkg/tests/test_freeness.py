import os

import pytest
from hypothesis import given, strategies as st

from algebra.polyring import parse_poly
from fixtures.build import build_fixture
from fixtures.poly_file import load_poly_file
from tests.settings import QUICK_SETTINGS
from verification import freeness as fr

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


@pytest.fixture(scope="module")
def quadrics():
    return build_fixture("quadrics", DATA).polys


@pytest.fixture(scope="module")
def system(quadrics):
    return fr.RewriteSystem(quadrics)


@pytest.fixture(scope="module")
def matrices(system):
    return fr.build_matrices(fr.NormalForm(system))


def base(text):
    return parse_poly(text, fr.BASE_RING)


def test_heads(system):
    heads = {system.labels[h]: fr.RewriteSystem.head_string(h) for h in system.heads()}
    assert len(heads) == 27
    assert heads["f1"] == "x2^2"
    assert heads["f16"] == "x4*x6"
    assert "x5^2" not in heads.values()


def test_coverage(system):
    check = fr.rewrite_coverage_check(system)
    assert check.passed, check.witness
    assert check.witness["quadratic_monomials"] == 28


def test_rule_for_x4_x6(system, quadrics):
    table = quadrics["f1"].table
    v = fr.normal_form(system, parse_poly("x4*x6", table))
    assert v[fr.ModuleBasis.X5_SQUARED] == base("1")
    assert v[0] == base("-3*z*s*x0*x1")
    assert all(not c for k, c in enumerate(v) if k not in (0, fr.ModuleBasis.X5_SQUARED))


def test_basis_monomials_are_normal(system):
    nf = fr.NormalForm(system)
    for k, monomial in enumerate(fr.ModuleBasis.MONOMIALS):
        assert nf.monomial(monomial) == fr.unit_vector(k)


def test_expand_inverts_normal_form_on_basis(system, quadrics):
    table = quadrics["f1"].table
    p = parse_poly("s*x2 + x0*x5^2 - 3", table)
    assert fr.expand(system, fr.normal_form(system, p)) == p


def test_normal_form_is_congruent(system, quadrics):
    table = quadrics["f1"].table
    for text in ("x2*x5^2", "x5^3", "x8*x9", "x6*x5^2 + s*x9*x5"):
        p = parse_poly(text, table)
        nf = fr.NormalForm(system)
        difference = p - fr.expand(system, nf(p))
        # the difference reduces to zero again
        assert all(not c for c in nf(difference)), text


@pytest.mark.parametrize("r,p,q", [
    ("s*x0 - 2*x7", "x4*x6", "x2"),
    ("1 + z*t", "x8*x9", "x3*x5 - x1"),
    ("x1^2", "x2*x5^2", "s*x9*x5"),
])
def test_normal_form_is_linear_over_the_base(system, quadrics, r, p, q):
    table = quadrics["f1"].table
    r_full, p, q = (parse_poly(text, table) for text in (r, p, q))
    nf = fr.NormalForm(system)
    expected = tuple(base(r) * a + b for a, b in zip(nf(p), nf(q)))
    assert nf(r_full * p + q) == expected


BASE_ENTRIES = ["0", "1", "s", "-2*x0*x7", "z*t^2", "x1 + 3*x7"]


@QUICK_SETTINGS
@given(st.lists(st.sampled_from(BASE_ENTRIES), min_size=fr.MODULE_RANK, max_size=fr.MODULE_RANK))
def test_normal_form_is_idempotent(system, entries):
    v = tuple(base(text) for text in entries)
    assert fr.normal_form(system, fr.expand(system, v)) == v


def test_missing_head_is_rejected(quadrics):
    broken = dict(quadrics)
    broken["f1"] = quadrics["f1"] * 2
    with pytest.raises(fr.RewriteSystemError):
        fr.RewriteSystem(broken)


def test_shared_head_is_rejected(quadrics):
    broken = dict(quadrics)
    broken["f2"] = quadrics["f1"]
    with pytest.raises(fr.RewriteSystemError) as e:
        fr.RewriteSystem(broken)
    assert "share the head x2^2" in str(e.value)


def test_step_cap(system):
    nf = fr.NormalForm(system, max_steps=3)
    with pytest.raises(fr.NormalFormError):
        fr.multiplication_matrix(nf, 9)


def test_matrix_shapes(matrices):
    assert sorted(matrices) == list(fr.MULTIPLIERS)
    for M in matrices.values():
        assert M.shape == (9, 9)
    # x2 * 1 = x2
    assert matrices[2][1, 0] == base("1")


@pytest.mark.slow
def test_commutation(matrices):
    check = fr.commutation_certificate(matrices)
    assert check.passed, check.witness
    assert check.witness["pairs"] == 21


@pytest.mark.slow
def test_relations_hold(quadrics, system, matrices):
    results = fr.relation_certificate(quadrics, system, matrices)
    assert len(results) == 27
    failed = [r for r in results if not r.passed]
    assert not failed, [(r.name, r.witness) for r in failed]


def test_wrong_relation_is_caught(quadrics, system, matrices):
    table = quadrics["f1"].table
    wrong = {"f1": parse_poly("-3*z*x0*x4 - x1*x3 + x2^2", table)}
    check, = fr.relation_certificate(wrong, system, matrices)
    assert check.status == "fail"
    assert check.witness["residual_entries"] > 0


def test_dump_matrices(matrices, tmp_path):
    paths = fr.dump_matrices(matrices, str(tmp_path))
    assert [os.path.basename(p) for p in paths] == [f"M{i}.poly" for i in fr.MULTIPLIERS]
    M2 = load_poly_file(paths[0])
    assert M2.table.names == fr.BASE_NAMES
    assert M2.polys["m_1_0"] == base("1")
