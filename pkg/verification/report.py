import json
import traceback
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from algebra.linear import SectionSpace
from algebra.matrix import PolyMatrix
from algebra.polyring import MultiPoly
from algebra.scalars import EisensteinRational


PASS = "pass"
FAIL = "fail"
ERROR = "error"
STATUSES = (PASS, FAIL, ERROR)

REPORT_VERSION = "1"


def exact(value):
    """
    JSON-ready form of a witness value. Exact numbers and polynomials become strings
    in the scalar/polynomial text format; floats are rejected.
    """
    if isinstance(value, bool) or value is None or isinstance(value, int):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact witness values")
    if isinstance(value, (Fraction, EisensteinRational, MultiPoly)):
        return str(value)
    if isinstance(value, str):
        return value
    if isinstance(value, PolyMatrix):
        return [[str(x) for x in row] for row in value.rows]
    if isinstance(value, SectionSpace):
        return {"dim": value.dim, "cell": exact(value.cell)}
    if isinstance(value, dict):
        return {str(k): exact(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [exact(v) for v in items]
    return str(value)


@dataclass
class CheckResult:
    suite: str
    name: str
    status: str
    anchor: str
    witness: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status {self.status!r} is not one of {STATUSES}")
        self.witness = exact(self.witness)
        if self.status != PASS and not self.witness:
            raise ValueError(f"check {self.name} has status {self.status} but no witness")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "status": self.status,
            "anchor": self.anchor,
            "witness": self.witness,
        }


def verdict(suite: str, name: str, anchor: str, ok: bool, witness: Optional[dict] = None) -> CheckResult:
    witness = dict(witness or {})
    if not ok and not witness:
        witness = {"reason": "condition not satisfied"}
    return CheckResult(suite, name, PASS if ok else FAIL, anchor, witness)


def guarded(suite: str, name: str, anchor: str, fn: Callable[[], CheckResult]) -> CheckResult:
    """Run a check; an unexpected exception becomes an `error` result."""
    try:
        return fn()
    except Exception as e:
        frame = traceback.extract_tb(e.__traceback__)[-1]
        return CheckResult(suite, name, ERROR, anchor, {
            "exception": type(e).__name__,
            "message": str(e),
            "where": f"{frame.filename.rsplit('/', 1)[-1]}:{frame.lineno}",
        })


class VerificationReport:
    def __init__(self, fixtures: Optional[List[dict]] = None, version: str = REPORT_VERSION):
        self.version = version
        self.fixtures = list(fixtures or [])
        self.checks: List[CheckResult] = []
        self._names = set()

    def add(self, check: CheckResult):
        if check.name in self._names:
            raise ValueError(f"duplicate check name {check.name!r}")
        self._names.add(check.name)
        self.checks.append(check)

    def extend(self, checks):
        for check in checks:
            self.add(check)

    @property
    def summary(self) -> Dict[str, int]:
        counts = {status: 0 for status in STATUSES}
        for check in self.checks:
            counts[check.status] += 1
        return counts

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "fixtures": self.fixtures,
            "checks": [check.to_dict() for check in self.checks],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=4, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"verification report v{self.version}"]
        for fixture in self.fixtures:
            match = {True: "ok", False: "MISMATCH", None: "no manifest"}[fixture["manifest_match"]]
            lines.append(f"fixture {fixture['path']}  sha256 {fixture['checksum'][:16]}  ({match})")
        lines.append("")
        width = max((len(c.name) for c in self.checks), default=4)
        for check in self.checks:
            lines.append(f"{check.status.upper():<6} {check.suite:<10} {check.name:<{width}}  {check.anchor}")
            if not check.passed:
                for key, value in check.witness.items():
                    lines.append(f"         {key}: {json.dumps(value, ensure_ascii=False)}")
        summary = self.summary
        lines.append("")
        lines.append(f"{summary[PASS]} passed, {summary[FAIL]} failed, {summary[ERROR]} errors")
        return "\n".join(lines) + "\n"
