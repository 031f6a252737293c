import hashlib
import os
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from algebra.parser import PolyParseError
from algebra.polyring import MultiPoly, VarTable, parse_poly


class FixtureError(ValueError):
    def __init__(self, message, path, line=None, col=None):
        self.message = message
        self.path = path
        self.line = line
        self.col = col
        where = str(path)
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {message}")


@dataclass
class PolyFile:
    path: str
    table: VarTable
    polys: Dict[str, MultiPoly] = field(default_factory=dict)
    checksum: str = ""

    def __getitem__(self, label):
        return self.polys[label]

    def labels(self) -> List[str]:
        return list(self.polys)


def sha256_of(path) -> str:
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_poly_text(text: str, path="<string>") -> Tuple[VarTable, Dict[str, MultiPoly]]:
    """
    Labelled polynomial format:

        vars: s t x0 x1
        f1: -3*z^2*x0*x1 + s^2
        f2: t*x0
            + x1^2          # indented lines continue the previous block
    """
    table = None
    blocks: List[Tuple[str, int, List[Tuple[int, int, str]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if line[0].isspace():
            if not blocks:
                raise FixtureError("continuation line before any labelled block", path, lineno, 1)
            blocks[-1][2].append((lineno, 1, line))
            continue
        label, sep, rest = line.partition(":")
        label = label.strip()
        if not sep or not label.replace("_", "").isalnum():
            raise FixtureError(f"expected 'label: polynomial', got {line.strip()!r}", path, lineno, 1)
        if label == "vars":
            if table is not None:
                raise FixtureError("duplicate vars header", path, lineno, 1)
            try:
                table = VarTable(rest.split())
            except ValueError as e:
                raise FixtureError(str(e), path, lineno, 1) from None
            if len(table) == 0:
                raise FixtureError("vars header declares no variables", path, lineno, 1)
            continue
        if table is None:
            raise FixtureError("missing 'vars:' header before the first polynomial", path, lineno, 1)
        if any(label == b[0] for b in blocks):
            raise FixtureError(f"duplicate label {label!r}", path, lineno, 1)
        blocks.append((label, lineno, [(lineno, len(label) + 2, rest)]))

    if table is None and not blocks:
        raise FixtureError("empty fixture", path, 1)
    if not blocks:
        raise FixtureError("no polynomials", path)

    polys = {}
    for label, lineno, segments in blocks:
        # keep a map from joined-text column to the source line/column
        joined = ""
        offsets = []
        for seg_line, seg_col, seg_text in segments:
            offsets.append((len(joined), seg_line, seg_col))
            joined += seg_text + " "
        try:
            polys[label] = parse_poly(joined, table)
        except PolyParseError as e:
            line, col = lineno, None
            if e.col is not None:
                for start, seg_line, seg_col in offsets:
                    if e.col - 1 >= start:
                        line, col = seg_line, seg_col + (e.col - 1 - start)
            message = e.message
            if message.startswith("undeclared variable"):
                message = f"arity mismatch, {message} not in vars: {' '.join(table.names)}"
            raise FixtureError(message, path, line, col) from None
    return table, polys


def format_poly_file(table: VarTable, polys: Dict[str, MultiPoly]) -> str:
    lines = ["vars: " + " ".join(table.names)]
    for label, poly in polys.items():
        lines.append(f"{label}: {poly}")
    return "\n".join(lines) + "\n"


def load_poly_file(path) -> PolyFile:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise FixtureError(f"cannot read fixture: {e.strerror}", path) from None
    table, polys = parse_poly_text(text, path)
    return PolyFile(str(path), table, polys, sha256_of(path))


def dump_poly_file(path, table: VarTable, polys: Dict[str, MultiPoly]):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_poly_file(table, polys))
