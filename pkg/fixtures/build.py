import os
from typing import Dict, Optional

from fixtures.intersection_table import IntersectionTables, load_intersection_table
from fixtures.poly_file import FixtureError, PolyFile, load_poly_file


# fixture name -> (file name, label prefix, row count)
FIXTURES = {
    'st_basis': ('st_basis.poly', 'b', 10),
    'local_basis': ('local_basis.poly', 'e', 10),
    'quadrics': ('defining_quadrics.poly', 'f', 27),
    'intersections': ('intersections.tbl', None, None),
}

MANIFEST = 'SHA256SUMS'


def _require_labels(fixture: PolyFile, prefix: str, count: int):
    expected = [f"{prefix}{i}" for i in range(1, count + 1)]
    if fixture.labels() != expected:
        missing = [label for label in expected if label not in fixture.polys]
        extra = [label for label in fixture.labels() if label not in expected]
        if missing or extra:
            raise FixtureError(f"expected labels {prefix}1..{prefix}{count}; missing {missing}, unexpected {extra}", fixture.path)
        raise FixtureError(f"labels must appear in order {prefix}1..{prefix}{count}", fixture.path)
    return fixture


def parse_fixture(path):
    """Typed fixture by file name: quadric table, basis lists or intersection tables."""
    name = os.path.basename(path)
    for _, (file_name, prefix, count) in FIXTURES.items():
        if name == file_name and prefix is not None:
            return _require_labels(load_poly_file(path), prefix, count)
    if name.endswith('.poly'):
        return load_poly_file(path)
    if name.endswith('.tbl'):
        return load_intersection_table(path)
    raise ValueError(f'fixture {name} is not supported')


def build_fixture(name: str, fixtures_dir: str):
    if name not in FIXTURES:
        raise ValueError(f'fixture {name} is not supported')
    return parse_fixture(os.path.join(fixtures_dir, FIXTURES[name][0]))


def load_manifest(fixtures_dir: str) -> Optional[Dict[str, str]]:
    """SHA256SUMS in `sha256sum` output format, or None when absent."""
    path = os.path.join(fixtures_dir, MANIFEST)
    if not os.path.exists(path):
        return None
    manifest = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FixtureError("expected '<sha256>  <file>'", path, lineno, 1)
            digest, file_name = parts
            manifest[file_name.lstrip('*')] = digest
    return manifest


def fixture_record(fixture, manifest: Optional[Dict[str, str]]) -> dict:
    name = os.path.basename(fixture.path)
    match = None if manifest is None else manifest.get(name) == fixture.checksum
    return {'path': name, 'checksum': fixture.checksum, 'manifest_match': match}


__all__ = ['FIXTURES', 'FixtureError', 'IntersectionTables', 'PolyFile', 'build_fixture',
           'fixture_record', 'load_manifest', 'parse_fixture']
