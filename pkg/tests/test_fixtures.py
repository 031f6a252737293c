import os
from fractions import Fraction

import pytest

from fixtures.build import FIXTURES, build_fixture, fixture_record, load_manifest, parse_fixture
from fixtures.intersection_table import parse_intersection_text
from fixtures.poly_file import FixtureError, dump_poly_file, load_poly_file, parse_poly_text
from algebra.polyring import parse_poly

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


@pytest.mark.parametrize("name", list(FIXTURES))
def test_shipped_fixtures_load_and_match_the_manifest(name):
    fixture = build_fixture(name, DATA)
    record = fixture_record(fixture, load_manifest(DATA))
    assert record["manifest_match"] is True
    assert len(record["checksum"]) == 64


def test_shipped_row_counts():
    assert len(build_fixture("quadrics", DATA).polys) == 27
    assert build_fixture("st_basis", DATA).labels() == [f"b{i}" for i in range(1, 11)]
    assert build_fixture("local_basis", DATA).table.names == ("t", "u", "v", "w")
    assert build_fixture("intersections", DATA).stages == [1, 2, 3]


def test_continuation_lines_and_comments():
    table, polys = parse_poly_text("vars: s x\n# header\nf1: s*x  # trailing\n    + x^2\nf2: -z*s\n")
    assert table.names == ("s", "x")
    assert polys["f1"] == parse_poly("s*x + x^2", table)
    assert list(polys) == ["f1", "f2"]


@pytest.mark.parametrize("text,line,message", [
    ("", 1, "empty"),
    ("f1: x\n", 1, "missing 'vars:'"),
    ("vars: x\nf1: x\nf1: x^2\n", 3, "duplicate label"),
    ("vars: x\nf1: x + y\n", 2, "arity mismatch"),
    ("vars: x\nf1: x +\n", 2, "unexpected end"),
    ("vars: x\n  + x\n", 2, "continuation"),
    ("vars: x z\nf1: x\n", 1, "reserved"),
])
def test_malformed_poly_files(text, line, message):
    with pytest.raises(FixtureError) as e:
        parse_poly_text(text, "bad.poly")
    assert e.value.line == line
    assert message in e.value.message
    assert str(e.value).startswith("bad.poly:")


def test_error_column_points_into_the_continuation():
    with pytest.raises(FixtureError) as e:
        parse_poly_text("vars: x\nf1: x\n   + q\n", "bad.poly")
    assert (e.value.line, e.value.col) == (3, 6)


def test_missing_rows_are_reported(tmp_path):
    path = tmp_path / "defining_quadrics.poly"
    path.write_text("vars: s t\nf1: s\nf3: t\n")
    with pytest.raises(FixtureError) as e:
        parse_fixture(str(path))
    assert "f2" in e.value.message


def test_missing_file_is_a_fixture_error(tmp_path):
    with pytest.raises(FixtureError):
        build_fixture("quadrics", str(tmp_path))
    with pytest.raises(ValueError):
        build_fixture("conics", str(tmp_path))


def test_manifest_mismatch(tmp_path):
    table, polys = parse_poly_text("vars: s\nb1: s\n")
    dump_poly_file(str(tmp_path / "extra.poly"), table, polys)
    (tmp_path / "SHA256SUMS").write_text("0" * 64 + "  extra.poly\n")
    fixture = load_poly_file(str(tmp_path / "extra.poly"))
    assert fixture_record(fixture, load_manifest(str(tmp_path)))["manifest_match"] is False
    assert fixture_record(fixture, None)["manifest_match"] is None


def test_dumped_file_parses_back(tmp_path):
    table, polys = parse_poly_text("vars: s t\nm_0_0: -(1 - z)/3*s*t + 2\n")
    dump_poly_file(str(tmp_path / "M.poly"), table, polys)
    assert load_poly_file(str(tmp_path / "M.poly")).polys == polys


def test_intersection_table():
    tables = parse_intersection_text("stage1 omega d_u:0 l_vw:3\nstage1 E1 d_u:-1 l_vw:2/3\n")
    assert tables.curves[1] == ["d_u", "l_vw"]
    assert tables.rows[1]["E1"]["l_vw"] == Fraction(2, 3)
    assert tables.divisors(1) == ["omega", "E1"]


@pytest.mark.parametrize("text,message", [
    ("", "empty"),
    ("level1 omega d_u:0\n", "stageN"),
    ("stage1 omega\n", "at least one entry"),
    ("stage1 omega d_u:x\n", "exact number"),
    ("stage1 omega d_u:0\nstage1 omega d_u:1\n", "duplicate row"),
    ("stage1 omega d_u:0 l_vw:1\nstage1 E1 d_u:1\n", "lacks curves"),
])
def test_malformed_intersection_tables(text, message):
    with pytest.raises(FixtureError) as e:
        parse_intersection_text(text)
    assert message in e.value.message
