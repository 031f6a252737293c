"""
Relative ampleness on the blow-up tower: divisor classes over (omega, E1, E2, E3),
curve classes read from the intersection tables, the ample regions in (alpha, beta,
gamma), and the degree pattern of the twisted class used for the contraction.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from algebra.polyring import MultiPoly, NotDivisibleError, VarTable, parse_poly
from fixtures.intersection_table import IntersectionTables
from verification.report import CheckResult, guarded, verdict

logger = logging.getLogger(__name__)

SUITE = "ampleness"

DIVISORS = ("omega", "E1", "E2", "E3")
STAGES = (1, 2, 3)
TWIST_ZERO_CURVES = {"d_u", "l_vw"}

SYMBOLS = VarTable(("alpha", "beta", "gamma"))

Coefficient = Union[Fraction, MultiPoly]


class UndefinedPairingError(KeyError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass
class DivisorClass:
    coeffs: Dict[str, Coefficient] = field(default_factory=dict)

    @classmethod
    def symbol(cls, name: str) -> "DivisorClass":
        if name not in DIVISORS:
            raise ValueError(f"divisor {name} is not supported")
        return cls({name: Fraction(1)})

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        coeffs = dict(self.coeffs)
        for name, c in other.coeffs.items():
            coeffs[name] = coeffs.get(name, 0) + c
        return DivisorClass({k: v for k, v in coeffs.items() if v})

    def __neg__(self):
        return DivisorClass({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def __mul__(self, factor: Coefficient) -> "DivisorClass":
        return DivisorClass({k: v * factor for k, v in self.coeffs.items() if v * factor})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        names = set(self.coeffs) | set(other.coeffs)
        return all(self.coeffs.get(n, 0) == other.coeffs.get(n, 0) for n in names)

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*{name}" for name, c in self.coeffs.items() if c)


OMEGA, E1, E2, E3 = (DivisorClass.symbol(name) for name in DIVISORS)


@dataclass(frozen=True)
class CurveClass:
    name: str
    stage: int
    pairings: Tuple[Tuple[str, Fraction], ...]

    def against(self, divisor: str) -> Fraction:
        for name, value in self.pairings:
            if name == divisor:
                return value
        raise UndefinedPairingError(f"{divisor} has no intersection row at stage {self.stage} (curve {self.name})")


def curve_classes(tables: IntersectionTables, stage: int) -> List[CurveClass]:
    if stage not in tables.stages:
        raise UndefinedPairingError(f"no intersection table for stage {stage}")
    rows = tables.rows[stage]
    divisors = tables.divisors(stage)
    return [CurveClass(curve, stage, tuple((d, rows[d][curve]) for d in divisors)) for curve in tables.curves[stage]]


def pairing(D: DivisorClass, C: CurveClass) -> Coefficient:
    total = Fraction(0)
    for name, c in D.coeffs.items():
        if c:
            total = c * C.against(name) + total
    return total


@dataclass
class AmpleParams:
    alpha: Coefficient
    beta: Optional[Coefficient] = None
    gamma: Optional[Coefficient] = None


def stage_divisor(stage: int, p: AmpleParams) -> DivisorClass:
    if stage not in STAGES:
        raise ValueError(f"stage {stage} is not supported")
    D = OMEGA * p.alpha - E1
    if stage >= 2:
        if p.beta is None:
            raise PreconditionError("stage 2 needs beta")
        D = D * p.beta - E2
    if stage == 3:
        if p.gamma is None:
            raise PreconditionError("stage 3 needs gamma")
        D = D * p.gamma - E3
    return D


def degrees(tables: IntersectionTables, stage: int, D: DivisorClass) -> Dict[str, Coefficient]:
    return {C.name: pairing(D, C) for C in curve_classes(tables, stage)}


def is_ample(tables: IntersectionTables, stage: int, p: AmpleParams) -> Tuple[bool, Dict[str, Fraction]]:
    """Strictly positive degree on every curve class of the stage."""
    found = degrees(tables, stage, stage_divisor(stage, p))
    return all(d > 0 for d in found.values()), found


############################################################
# Ample regions
############################################################
# displayed inequalities P/Q > 0 with Q a positive multiple of beta, gamma
DISPLAYED_CONDITIONS = {
    1: [("alpha - 2/3", "1")],
    2: [("3*alpha*beta - 2*beta - 1", "3*beta"), ("beta - 1", "1")],
    3: [("3*alpha*beta*gamma - 2*beta*gamma - gamma + 2", "3*beta*gamma"),
        ("beta*gamma - gamma - 1", "gamma"), ("gamma - 1", "1")],
}


def symbolic_params() -> AmpleParams:
    return AmpleParams(*SYMBOLS.variables(SYMBOLS.names))


def displayed_inequalities(stage: int, p: AmpleParams) -> bool:
    """The ample region as displayed, for positive beta and gamma."""
    a, b, g = p.alpha, p.beta, p.gamma
    if stage == 1:
        return a > Fraction(2, 3)
    if stage == 2:
        return a > (2 + 1 / b) / 3 and b > 1
    return a > Fraction(2, 3) + 1 / (3 * b) - 2 / (3 * b * g) and b > 1 + 1 / g and g > 1


def _positive_monomial_factor(q: MultiPoly) -> bool:
    """A single term with positive rational coefficient in beta and gamma only."""
    if len(q.terms) != 1:
        return False
    (exps, coeff), = q.terms.items()
    return coeff.is_rational() and not coeff.is_negative() and exps[0] == 0


def classify_curves(degree_polys: Dict[str, MultiPoly],
                    conditions: List[MultiPoly]) -> Tuple[Dict[str, str], List[int]]:
    """
    Each curve degree is vacuous (a positive constant), matched (a displayed P times a
    positive monomial in beta, gamma), or implied (a matched degree plus a positive
    constant). Returns the classification and the displayed conditions left unmatched.
    """
    kinds, matched_by = {}, {}
    for name, deg in degree_polys.items():
        if deg.is_constant() and deg.constant_coefficient().is_rational() \
                and not deg.constant_coefficient().is_negative() and deg:
            kinds[name] = "vacuous"
            continue
        for k, P in enumerate(conditions):
            try:
                quotient = deg.exact_div(P)
            except NotDivisibleError:
                continue
            if _positive_monomial_factor(quotient):
                kinds[name] = f"matched:{k}"
                matched_by.setdefault(k, name)
                break
    for name, deg in degree_polys.items():
        if name in kinds:
            continue
        for other, kind in list(kinds.items()):
            if not kind.startswith("matched"):
                continue
            diff = deg - degree_polys[other]
            if diff.is_constant() and diff.constant_coefficient().is_rational() \
                    and not diff.constant_coefficient().is_negative():
                kinds[name] = f"implied:{other}"
                break
        else:
            kinds[name] = "unmatched"
    unmatched = [k for k in range(len(conditions)) if k not in matched_by]
    return kinds, unmatched


def region_equivalence_certificate(tables: IntersectionTables, stage: int) -> CheckResult:
    D = stage_divisor(stage, symbolic_params())
    degree_polys = {name: d if isinstance(d, MultiPoly) else MultiPoly.constant(SYMBOLS, d)
                    for name, d in degrees(tables, stage, D).items()}
    conditions = [parse_poly(P, SYMBOLS) for P, _ in DISPLAYED_CONDITIONS[stage]]
    kinds, unmatched = classify_curves(degree_polys, conditions)
    witness = {
        "degrees": degree_polys,
        "classification": kinds,
        "conditions": [f"({P})/({Q}) > 0" for P, Q in DISPLAYED_CONDITIONS[stage]],
        "cleared_factors": "beta > 0, gamma > 0",
    }
    bad = [name for name, kind in kinds.items() if kind == "unmatched"]
    if unmatched:
        witness["conditions_without_curve"] = [DISPLAYED_CONDITIONS[stage][k][0] for k in unmatched]
    return verdict(SUITE, f"ampleness.region.stage{stage}", "curve positivity equals the displayed inequalities",
                   not bad and not unmatched, witness)


def sweep_grid(stage: int) -> List[AmpleParams]:
    alphas = [Fraction(k, 12) for k in range(1, 18)]
    positives = [Fraction(1, 2), Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3)]
    if stage == 1:
        return [AmpleParams(a) for a in alphas]
    if stage == 2:
        return [AmpleParams(a, b) for a in alphas for b in positives]
    return [AmpleParams(a, b, g) for a in alphas for b in positives for g in positives]


def region_sweep(tables: IntersectionTables, stage: int) -> CheckResult:
    mismatches = []
    grid = sweep_grid(stage)
    for p in grid:
        ample, _ = is_ample(tables, stage, p)
        if ample != displayed_inequalities(stage, p):
            mismatches.append({"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "ample": ample})
    witness = {"points": len(grid)}
    if mismatches:
        witness["mismatches"] = mismatches[:10]
    return verdict(SUITE, f"ampleness.sweep.stage{stage}", "pointwise agreement with the displayed region",
                   not mismatches, witness)


############################################################
# Contraction twist
############################################################
@dataclass
class TwistResult:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    m: Fraction
    degrees: Dict[str, Fraction]

    @property
    def zero_curves(self):
        return {name for name, d in self.degrees.items() if d == 0}


def contraction_twist(tables: IntersectionTables, alpha: Fraction, beta: Fraction) -> TwistResult:
    """
    gamma = 1/((1 - alpha) beta), m = (alpha beta - 1)/((1 - alpha) beta), and the
    degrees of stage_divisor(3) + m (E1 - E2 + E3) on the stage-3 curves.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    violated = []
    if not alpha * beta > 1:
        violated.append("alpha*beta > 1")
    if not (1 - alpha) * beta < 1:
        violated.append("(1 - alpha)*beta < 1")
    if not (2 * alpha - 1) * beta < 1:
        violated.append("(2*alpha - 1)*beta < 1")
    if violated:
        raise PreconditionError(f"alpha={alpha}, beta={beta} violate {', '.join(violated)}")
    gamma = 1 / ((1 - alpha) * beta)
    m = (alpha * beta - 1) / ((1 - alpha) * beta)
    A = stage_divisor(3, AmpleParams(alpha, beta, gamma)) + (E1 - E2 + E3) * m
    return TwistResult(alpha, beta, gamma, m, degrees(tables, 3, A))


def contraction_twist_certificate(tables: IntersectionTables, alpha: Fraction, beta: Fraction) -> CheckResult:
    name = f"ampleness.twist.{alpha},{beta}"
    twist = contraction_twist(tables, alpha, beta)
    positive = all(d > 0 for c, d in twist.degrees.items() if c not in TWIST_ZERO_CURVES)
    ok = twist.zero_curves == TWIST_ZERO_CURVES and positive
    witness = {"gamma": twist.gamma, "m": twist.m, "degrees": twist.degrees}
    return verdict(SUITE, name, "twist has degree 0 exactly on d_u and l_vw, positive elsewhere", ok, witness)


def contraction_grid(count: int = 20) -> List[Tuple[Fraction, Fraction]]:
    """Admissible (alpha, beta) with alpha = k/20, beta = j/10, thinned to `count` points."""
    points = []
    for k in range(11, 20):
        for j in range(11, 41):
            alpha, beta = Fraction(k, 20), Fraction(j, 10)
            if alpha * beta > 1 and (1 - alpha) * beta < 1 and (2 * alpha - 1) * beta < 1:
                points.append((alpha, beta))
    if len(points) < count:
        raise PreconditionError(f"only {len(points)} admissible grid points, {count} requested")
    return [points[i * len(points) // count] for i in range(count)]


def run(ctx) -> List[CheckResult]:
    tables = ctx.intersections
    results = []
    for stage in STAGES:
        results.append(guarded(SUITE, f"ampleness.region.stage{stage}", "ample region",
                               lambda stage=stage: region_equivalence_certificate(tables, stage)))
    for stage in STAGES:
        results.append(guarded(SUITE, f"ampleness.sweep.stage{stage}", "ample region on a grid",
                               lambda stage=stage: region_sweep(tables, stage)))

    def boundary():
        ample, found = is_ample(tables, 1, AmpleParams(Fraction(2, 3)))
        vanishing = [c for c, d in found.items() if d == 0]
        return verdict(SUITE, "ampleness.boundary", "alpha = 2/3 is not ample, degree 0 on l_vw",
                       not ample and vanishing == ["l_vw"], {"degrees": found, "vanishing": vanishing})
    results.append(guarded(SUITE, "ampleness.boundary", "boundary of the stage-1 region", boundary))

    for alpha, beta in ((Fraction(3, 5), Fraction(2)), (Fraction(9, 10), Fraction(6, 5))):
        results.append(guarded(SUITE, f"ampleness.twist.{alpha},{beta}", "contraction twist",
                               lambda alpha=alpha, beta=beta: contraction_twist_certificate(tables, alpha, beta)))

    def grid():
        points = contraction_grid(20)
        failures = []
        for alpha, beta in points:
            check = contraction_twist_certificate(tables, alpha, beta)
            if not check.passed:
                failures.append(check.witness)
        return verdict(SUITE, "ampleness.twist_grid", "zero set {d_u, l_vw} on admissible parameters",
                       not failures, {"points": len(points), **({"failures": failures} if failures else {})})
    results.append(guarded(SUITE, "ampleness.twist_grid", "contraction twist on a grid", grid))
    return results
