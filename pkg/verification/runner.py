import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from tqdm import tqdm

from fixtures.build import FIXTURES, build_fixture, fixture_record, load_manifest
from verification import ampleness, fiber_geometry, freeness, quadric_relations, section_modules
from verification.report import VerificationReport

logger = logging.getLogger(__name__)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_FIXTURES = os.path.join(REPO_ROOT, "data")
FIXTURES_ENV = "VERIFY_FIXTURES"

# fixed order: later suites consume what earlier ones validate
SUITES = {
    'basis': section_modules.run,
    'relations': quadric_relations.run,
    'freeness': freeness.run,
    'fiber': fiber_geometry.run,
    'ampleness': ampleness.run,
}

SUITE_FIXTURES = {
    'basis': ('st_basis', 'local_basis'),
    'relations': ('st_basis', 'quadrics'),
    'freeness': ('quadrics',),
    'fiber': ('quadrics',),
    'ampleness': ('intersections',),
}


@dataclass
class RunConfig:
    suites: List[str] = field(default_factory=lambda: ['all'])
    format: str = 'json'
    out: Optional[str] = None
    fixtures_dir: Optional[str] = None
    dump_matrices: Optional[str] = None
    log_dir: Optional[str] = None

    def resolved_suites(self) -> List[str]:
        if not self.suites:
            raise ValueError("no suite selected")
        for name in self.suites:
            if name != 'all' and name not in SUITES:
                raise ValueError(f'suite {name} is not supported')
        if 'all' in self.suites:
            return list(SUITES)
        return [name for name in SUITES if name in self.suites]

    def resolved_fixtures_dir(self) -> str:
        return self.fixtures_dir or os.environ.get(FIXTURES_ENV) or DEFAULT_FIXTURES


class SuiteContext:
    """Fixtures loaded for a run, plus the run configuration."""
    def __init__(self, config: RunConfig, fixtures: Dict[str, object]):
        self.config = config
        self.fixtures = fixtures

    def _fixture(self, name):
        if name not in self.fixtures:
            raise KeyError(f"fixture {name} was not loaded for this run")
        return self.fixtures[name]

    @property
    def st_basis(self):
        return self._fixture('st_basis')

    @property
    def local_basis(self):
        return self._fixture('local_basis')

    @property
    def quadrics(self):
        return self._fixture('quadrics')

    @property
    def intersections(self):
        return self._fixture('intersections')


def load_fixtures(suites: List[str], fixtures_dir: str) -> Dict[str, object]:
    needed = {name for suite in suites for name in SUITE_FIXTURES[suite]}
    fixtures = {}
    for name in FIXTURES:
        if name in needed:
            fixtures[name] = build_fixture(name, fixtures_dir)
            logger.info(f"loaded fixture {name} from {fixtures[name].path}")
    return fixtures


def run(config: RunConfig) -> VerificationReport:
    suites = config.resolved_suites()
    fixtures_dir = config.resolved_fixtures_dir()
    fixtures = load_fixtures(suites, fixtures_dir)
    manifest = load_manifest(fixtures_dir)
    records = [fixture_record(fixture, manifest) for fixture in fixtures.values()]
    for record in records:
        if record['manifest_match'] is False:
            logger.warning(f"fixture {record['path']} does not match {fixtures_dir}/SHA256SUMS")
    report = VerificationReport(records)
    ctx = SuiteContext(config, fixtures)
    for name in tqdm(suites, desc="suites", disable=None):
        logger.info(f"running suite {name}")
        report.extend(SUITES[name](ctx))
    summary = report.summary
    logger.info(f"{summary['pass']} passed, {summary['fail']} failed, {summary['error']} errors")
    return report
