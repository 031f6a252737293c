import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List

from fixtures.poly_file import FixtureError, sha256_of


_STAGE = re.compile(r"stage(\d+)$")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class IntersectionTables:
    """
    rows[stage][divisor][curve] = intersection number; `curves[stage]` keeps the
    column order of first appearance.
    """
    path: str
    rows: Dict[int, Dict[str, Dict[str, Fraction]]] = field(default_factory=dict)
    curves: Dict[int, List[str]] = field(default_factory=dict)
    checksum: str = ""

    @property
    def stages(self) -> List[int]:
        return sorted(self.rows)

    def divisors(self, stage: int) -> List[str]:
        return list(self.rows[stage])


def parse_intersection_text(text: str, path="<string>") -> IntersectionTables:
    tables = IntersectionTables(str(path))
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        fields = line.split()
        if not fields:
            continue
        match = _STAGE.match(fields[0])
        if match is None:
            raise FixtureError(f"expected a 'stageN' tag, got {fields[0]!r}", path, lineno, 1)
        stage = int(match.group(1))
        if len(fields) < 3:
            raise FixtureError("row needs a divisor and at least one entry", path, lineno)
        divisor = fields[1]
        if not _NAME.match(divisor):
            raise FixtureError(f"bad divisor name {divisor!r}", path, lineno, line.find(divisor) + 1)
        stage_rows = tables.rows.setdefault(stage, {})
        if divisor in stage_rows:
            raise FixtureError(f"duplicate row for {divisor} at stage {stage}", path, lineno, 1)
        columns = tables.curves.setdefault(stage, [])
        entries = {}
        for token in fields[2:]:
            col = line.find(token) + 1
            curve, sep, value = token.partition(":")
            if not sep or not _NAME.match(curve):
                raise FixtureError(f"expected 'curve:number', got {token!r}", path, lineno, col)
            if curve in entries:
                raise FixtureError(f"duplicate entry for curve {curve}", path, lineno, col)
            try:
                entries[curve] = Fraction(value)
            except ValueError:
                raise FixtureError(f"not an exact number: {value!r}", path, lineno, col) from None
            if curve not in columns:
                columns.append(curve)
        stage_rows[divisor] = entries
    if not tables.rows:
        raise FixtureError("empty fixture", path, 1)
    for stage, stage_rows in tables.rows.items():
        for divisor, entries in stage_rows.items():
            missing = [c for c in tables.curves[stage] if c not in entries]
            if missing:
                raise FixtureError(f"stage {stage} row {divisor} lacks curves {missing}", path)
    return tables


def load_intersection_table(path) -> IntersectionTables:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise FixtureError(f"cannot read fixture: {e.strerror}", path) from None
    tables = parse_intersection_text(text, path)
    tables.checksum = sha256_of(path)
    return tables
