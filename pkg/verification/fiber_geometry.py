"""
Geometry of the central fiber over s = t = 0: torus weights, the torus-fixed
coordinate points, the reduced cone over a twisted cubic, Zariski tangent
dimensions, and the Jacobian checks at p0, p1, p7. Also the conic-bundle model
sx^2 + ty^2 + r^2 (r stands in for z, which names the cube root of unity).
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from algebra.linear import SectionSpace, rank
from algebra.matrix import PolyMatrix, determinant, jacobian, kernel_over_field
from algebra.polyring import InhomogeneityError, MultiPoly, VarTable, WeightVector, bi_weight, parse_poly, substitute
from algebra.scalars import ONE, EisensteinRational
from verification.report import CheckResult, guarded, verdict

logger = logging.getLogger(__name__)

SUITE = "fiber"

X_NAMES = tuple(f"x{i}" for i in range(10))

TORUS_WEIGHTS: Dict[str, Tuple[int, int]] = {
    "s": (3, 0), "t": (0, 3),
    "x0": (0, 3), "x1": (1, 1), "x2": (1, 2), "x3": (1, 3), "x4": (2, 1),
    "x5": (2, 2), "x6": (2, 3), "x7": (3, 0), "x8": (3, 1), "x9": (3, 2),
}

CENTRAL_POINTS = {0, 1, 7}

# variables that vanish on the reduced central fiber
CONE_ZEROS = ("s", "t", "x3", "x5", "x6", "x8", "x9")
CONE_VARS = ("x0", "x2", "x4", "x7")


@dataclass(frozen=True)
class JacobianSpec:
    point: int
    equations: Tuple[str, ...]
    variables: Tuple[str, ...]


JACOBIAN_SPECS = {
    "p0": JacobianSpec(0, ("f1", "f2", "f3", "f4", "f5", "f6", "f13"),
                       ("s", "x4", "x5", "x6", "x7", "x8", "x9")),
    "p1": JacobianSpec(1, ("f1", "f2", "f4", "f5", "f8", "f9", "f17"),
                       ("s", "t", "x3", "x5", "x6", "x8", "x9")),
    "p7": JacobianSpec(7, ("f4", "f8", "f9", "f17", "f18", "f25", "f26"),
                       ("t", "x0", "x2", "x3", "x5", "x6", "x9")),
}


def coordinate_point(table: VarTable, i: int) -> Dict[str, int]:
    """x_i = 1, every other variable (s and t included) 0."""
    return {name: 1 if name == f"x{i}" else 0 for name in table.names}


############################################################
# Torus action and fixed points
############################################################
def torus_weights(quadrics: Dict[str, MultiPoly]) -> Tuple[Dict[str, Tuple[int, int]], Dict[str, List[str]]]:
    table = next(iter(quadrics.values())).table
    weights = WeightVector(table, TORUS_WEIGHTS)
    found, bad = {}, {}
    for label, f in quadrics.items():
        try:
            found[label] = bi_weight(f, weights)
        except InhomogeneityError as e:
            bad[label] = list(e.terms)
    return found, bad


def torus_equivariance_check(quadrics: Dict[str, MultiPoly]) -> CheckResult:
    found, bad = torus_weights(quadrics)
    witness = {"weights": {label: list(w) for label, w in found.items()}}
    if bad:
        witness["inhomogeneous"] = bad
    return verdict(SUITE, "fiber.torus", "the quadrics are bi-homogeneous for the torus action", not bad, witness)


def central_fiber_points(quadrics: Dict[str, MultiPoly]) -> List[int]:
    table = next(iter(quadrics.values())).table
    points = []
    for i in range(10):
        point = coordinate_point(table, i)
        if all(not f.value_at(point) for f in quadrics.values()):
            points.append(i)
    return points


############################################################
# Reduced cone over the twisted cubic
############################################################
def _span(polys: Sequence[MultiPoly]) -> SectionSpace:
    frame = sorted({exps for p in polys for exps in p.terms})
    index = {exps: k for k, exps in enumerate(frame)}
    return SectionSpace(frame, [{index[e]: c for e, c in p.terms.items()} for p in polys])


def cone_quadrics(quadrics: Dict[str, MultiPoly]) -> List[MultiPoly]:
    """Canonical basis of the specialized quadrics with s, t, x3, x5, x6, x8, x9 set to 0."""
    specialized = [f.evaluate({name: 0 for name in CONE_ZEROS}) for f in quadrics.values()]
    space = _span([p for p in specialized if p])
    table = next(iter(quadrics.values())).table
    return [MultiPoly(table, {space.frame[k]: c for k, c in vec.items()}) for vec in space.vectors()]


PARAM_TABLE = VarTable(("lam", "mu", "c2", "c4", "c7"))
PARAMETRIZATION = {"x0": "lam^3", "x2": "c2*lam^2*mu", "x4": "c4*lam*mu^2", "x7": "c7*mu^3"}


def solve_parametrization(cone: List[MultiPoly]) -> Dict[str, EisensteinRational]:
    """
    Constants c2 = 1, c4, c7 making lam -> (lam^3, c2 lam^2 mu, c4 lam mu^2, c7 mu^3)
    lie on every cone quadric; solved one unknown at a time.
    """
    images = {name: parse_poly(text, PARAM_TABLE) for name, text in PARAMETRIZATION.items()}
    equations = []
    for q in cone:
        pulled = substitute(q, images, PARAM_TABLE)
        equations.extend(pulled.coefficients_in(("lam", "mu")).values())
    known = {"c2": ONE}
    for unknown in ("c4", "c7"):
        for eq in equations:
            reduced = eq.evaluate(known)
            if reduced.variables() == [unknown] and reduced.degree_in(unknown) == 1:
                parts = reduced.coefficients_in((unknown,))
                a = parts[(1,)].constant_coefficient()
                b = parts[(0,)].constant_coefficient() if (0,) in parts else EisensteinRational(0)
                known[unknown] = -b / a
                break
        else:
            raise ValueError(f"no equation determines {unknown} linearly")
    residuals = [str(eq.evaluate(known)) for eq in equations if eq.evaluate(known)]
    if residuals:
        raise ValueError(f"parametrization constants {known} leave residuals {residuals}")
    return known


def reduced_cone_certificate(quadrics: Dict[str, MultiPoly]) -> CheckResult:
    cone = cone_quadrics(quadrics)
    involved = sorted({name for q in cone for name in q.variables()})
    witness = {"quadrics": cone, "dim": len(cone), "variables": involved}
    ok = len(cone) == 3 and set(involved) <= set(CONE_VARS)
    if ok:
        try:
            witness["constants"] = solve_parametrization(cone)
        except ValueError as e:
            ok = False
            witness["error"] = str(e)
    return verdict(SUITE, "fiber.reduced_cone", "reduced fiber is a cone over a twisted cubic, free of x1",
                   ok, witness)


############################################################
# Tangent spaces and Jacobians
############################################################
def tangent_dimension(point: int, equations: Sequence[MultiPoly], ambient_vars: Sequence[str]) -> int:
    """Zariski tangent dimension in the affine chart x_point = 1."""
    if f"x{point}" in ambient_vars:
        raise ValueError(f"x{point} is the chart coordinate of p{point} and cannot be differentiated")
    table = equations[0].table
    J = jacobian(list(equations), list(ambient_vars)).evaluate(coordinate_point(table, point))
    rows = [{j: x.constant_coefficient() for j, x in enumerate(row) if x} for row in J.rows]
    return len(ambient_vars) - rank(rows)


def central_fiber(quadrics: Dict[str, MultiPoly]) -> List[MultiPoly]:
    return [f.evaluate({"s": 0, "t": 0}) for f in quadrics.values()]


def nonreducedness_check(quadrics: Dict[str, MultiPoly]) -> CheckResult:
    fiber_dim = tangent_dimension(0, central_fiber(quadrics), X_NAMES[1:])
    cone_dim = tangent_dimension(0, cone_quadrics(quadrics), ("x2", "x4", "x7", "x1"))
    return verdict(SUITE, "fiber.nonreduced", "tangent space at p0 exceeds that of the reduced cone",
                   fiber_dim == 3 and cone_dim == 2,
                   {"fiber_tangent_dim": fiber_dim, "cone_tangent_dim": cone_dim})


def smoothness_certificate(name: str, spec: JacobianSpec, quadrics: Dict[str, MultiPoly]) -> CheckResult:
    equations = [quadrics[label] for label in spec.equations]
    table = equations[0].table
    J = jacobian(equations, spec.variables).evaluate(coordinate_point(table, spec.point))
    det = determinant(J).constant_coefficient()
    witness = {"equations": list(spec.equations), "variables": list(spec.variables), "determinant": det}
    if not det:
        witness["jacobian"] = J
    return verdict(SUITE, f"fiber.smooth.{name}", "nonsingular 7x7 Jacobian at the fixed point", bool(det), witness)


############################################################
# Conic bundle sx^2 + ty^2 + r^2
############################################################
CONIC_TABLE = VarTable(("s", "t", "x", "y", "r"))
CONIC = parse_poly("s*x^2 + t*y^2 + r^2", CONIC_TABLE)
CONIC_GRID = range(-2, 3)


def conic_partials() -> Dict[str, MultiPoly]:
    return {name: CONIC.derivative(name) for name in CONIC_TABLE.names}


def fiber_jacobian() -> PolyMatrix:
    """Coefficient matrix of the fiber partials (2sx, 2ty, 2r) in x, y, r."""
    names = ("x", "y", "r")
    partials = [CONIC.derivative(name) for name in names]
    return jacobian(partials, names)


def conic_warmup_check() -> CheckResult:
    partials = conic_partials()
    span = _span(list(partials.values()))
    frame_index = {e: k for k, e in enumerate(span.frame)}
    missing = []
    for text in ("x^2", "y^2", "r"):
        target = parse_poly(text, CONIC_TABLE)
        if any(e not in frame_index for e in target.terms) \
                or {frame_index[e]: c for e, c in target.terms.items()} not in span:
            missing.append(text)
    M = fiber_jacobian()
    det = determinant(M)
    expected_det = parse_poly("8*s*t", CONIC_TABLE)
    grid = {}
    for s0 in CONIC_GRID:
        for t0 in CONIC_GRID:
            kernel = kernel_over_field(M.evaluate({"s": s0, "t": t0}))
            on_conic = all(not CONIC.value_at({"s": s0, "t": t0, "x": v[0], "y": v[1], "r": v[2]}) for v in kernel)
            if bool(kernel) != (s0 * t0 == 0) or not on_conic:
                grid[f"{s0},{t0}"] = {"kernel_dim": len(kernel), "on_conic": on_conic}
    witness = {"partials": partials, "fiber_determinant": det}
    if missing:
        witness["not_in_ideal"] = missing
    if grid:
        witness["grid_failures"] = grid
    ok = not missing and det == expected_det and not grid
    return verdict(SUITE, "fiber.conic", "smooth total space, singular fibers exactly over st = 0", ok, witness)


def run(ctx) -> List[CheckResult]:
    quadrics = ctx.quadrics.polys
    results = [guarded(SUITE, "fiber.torus", "torus action", lambda: torus_equivariance_check(quadrics))]

    def points():
        found = central_fiber_points(quadrics)
        return verdict(SUITE, "fiber.fixed_points", "torus-fixed points of the central fiber are p0, p1, p7",
                       set(found) == CENTRAL_POINTS, {"points": [f"p{i}" for i in found]})
    results.append(guarded(SUITE, "fiber.fixed_points", "coordinate points", points))
    results.append(guarded(SUITE, "fiber.reduced_cone", "reduced cone",
                           lambda: reduced_cone_certificate(quadrics)))
    results.append(guarded(SUITE, "fiber.nonreduced", "nonreduced central fiber",
                           lambda: nonreducedness_check(quadrics)))
    for name, spec in JACOBIAN_SPECS.items():
        results.append(guarded(SUITE, f"fiber.smooth.{name}", "Jacobian at the fixed point",
                               lambda name=name, spec=spec: smoothness_certificate(name, spec, quadrics)))
    results.append(guarded(SUITE, "fiber.conic", "conic bundle", conic_warmup_check))
    logger.info(f"fiber suite: {sum(r.passed for r in results)}/{len(results)} passed")
    return results
