"""
Section spaces of the anticanonical bundle: membership in the s- and t-patterns,
their intersection cells, the free k[s,t]-basis of invariant sections, and the
local sections cut out by the blow-up charts over k[t].
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from algebra.linear import SectionSpace, Vector, inverse, kernel_of_columns
from algebra.matrix import PolyMatrix, determinant
from algebra.polyring import MultiPoly, VarTable, parse_poly, substitute
from algebra.scalars import ONE, ZETA, EisensteinRational
from verification.report import CheckResult, guarded, verdict

logger = logging.getLogger(__name__)

SUITE = "basis"

CUBIC_TABLE = VarTable(("u", "v", "w"))
TILDE_TABLE = VarTable(("ut", "vt", "wt"))
LOCAL_TABLE = VarTable(("t", "u", "v", "w"))

# cubic monomials in (u, v, w) and their s-weights
CUBIC_MONOMIALS: Tuple[Tuple[int, int, int], ...] = (
    (0, 0, 3), (1, 0, 2), (0, 1, 2), (2, 0, 1), (1, 1, 1),
    (0, 2, 1), (3, 0, 0), (2, 1, 0), (1, 2, 0), (0, 3, 0),
)
S_WEIGHTS: Dict[Tuple[int, int, int], int] = dict(zip(CUBIC_MONOMIALS, (3, 2, 1, 1, 0, 2, 3, 2, 1, 3)))
CUBIC_INDEX = {exps: i for i, exps in enumerate(CUBIC_MONOMIALS)}

# computed cell dimensions for 1 <= a, b <= 2; cells with min(a, b) = 0 and max(a, b) < 3 are trivial
CELL_DIMENSIONS = {(1, 1): 1, (1, 2): 2, (2, 1): 2, (2, 2): 4}


class ChartError(ValueError):
    pass


def cubic(text: str) -> MultiPoly:
    return parse_poly(text, CUBIC_TABLE)


def cubic_vector(f: MultiPoly) -> Vector:
    """Coordinates of a cubic form over CUBIC_TABLE in the monomial frame."""
    vec = {}
    for exps, coeff in f.terms.items():
        if exps not in CUBIC_INDEX:
            raise ValueError(f"{f} is not a cubic form in u, v, w")
        vec[CUBIC_INDEX[exps]] = coeff
    return vec


def cubic_from_vector(vec: Vector) -> MultiPoly:
    return MultiPoly(CUBIC_TABLE, {CUBIC_MONOMIALS[i]: c for i, c in vec.items()})


def to_cubic_table(p: MultiPoly) -> MultiPoly:
    """Move a form in u, v, w from a larger table onto CUBIC_TABLE."""
    return substitute(p, {}, CUBIC_TABLE)


#################################################################################
#                                 Tilde frame                                   #
#################################################################################
class TildeFrame:
    """
    ut = z*u + z^2*v + w, vt = z^2*u + z*v + w, wt = u + v + w, and the inverse
    change of coordinates obtained by exact Gauss-Jordan.
    """
    NAMES = ("ut", "vt", "wt")

    def __init__(self):
        z, z2 = ZETA, ZETA * ZETA
        self.matrix = [[z, z2, ONE], [z2, z, ONE], [ONE, ONE, ONE]]
        u, v, w = CUBIC_TABLE.variables(("u", "v", "w"))
        self.forward = {
            name: row[0] * u + row[1] * v + row[2] * w
            for name, row in zip(self.NAMES, self.matrix)
        }
        inv = inverse(self.matrix)
        tildes = TILDE_TABLE.variables(self.NAMES)
        self.backward = {
            name: sum((coeff * x for coeff, x in zip(row, tildes)), TILDE_TABLE.zero())
            for name, row in zip(("u", "v", "w"), inv)
        }

    def determinant(self) -> EisensteinRational:
        det = determinant(PolyMatrix(CUBIC_TABLE, self.matrix))
        return det.constant_coefficient()

    def to_tilde(self, f: MultiPoly) -> MultiPoly:
        return substitute(f, self.backward, TILDE_TABLE)

    def from_tilde(self, g: MultiPoly) -> MultiPoly:
        return substitute(g, self.forward, CUBIC_TABLE)


TILDE = TildeFrame()

# cyclic permutations of (u, v, w) as substitutions; `shift` is the point map (u:v:w) -> (w:u:v)
PERMUTATIONS = {
    "identity": {},
    "shift": {"u": "w", "v": "u", "w": "v"},
    "shift2": {"u": "v", "v": "w", "w": "u"},
}


def permute(f: MultiPoly, perm: str) -> MultiPoly:
    images = {src: f.table.variable(dst) for src, dst in PERMUTATIONS[perm].items()}
    return substitute(f, images, f.table)


def tilde_compatibility() -> Tuple[bool, dict]:
    """
    The shift acts on (ut, vt, wt) diagonally by (z, z^2, 1), the identity acts
    trivially, and ut*vt*wt = u^3 + v^3 + w^3 - 3uvw.
    """
    expected = {"ut": ZETA, "vt": ZETA * ZETA, "wt": ONE}
    witness = {}
    ok = True
    for name, image in TILDE.forward.items():
        shifted = permute(image, "shift")
        if shifted != image * expected[name]:
            ok = False
            witness[f"shift({name})"] = shifted
        if permute(image, "identity") != image:
            ok = False
            witness[f"identity({name})"] = permute(image, "identity")
    product = TILDE.forward["ut"] * TILDE.forward["vt"] * TILDE.forward["wt"]
    if product != cubic("u^3 + v^3 + w^3 - 3*u*v*w"):
        ok = False
        witness["ut*vt*wt"] = product
    return ok, witness


#################################################################################
#                          s- and t-membership spaces                           #
#################################################################################
def weights(f: MultiPoly):
    for exps in f.terms:
        if exps not in S_WEIGHTS:
            raise ValueError(f"{f} is not a cubic form")
        yield S_WEIGHTS[exps]


def s_membership(f: MultiPoly, a: int) -> bool:
    """s^a * f lies in the s-pattern."""
    return all(w <= a for w in weights(f))


def t_membership(f: MultiPoly, b: int) -> bool:
    """t^b * f lies in the t-pattern: every tilde monomial has weight at most b."""
    return all(w <= b for w in weights(TILDE.to_tilde(f)))


def s_membership_space(a: int) -> SectionSpace:
    vectors = [{i: ONE} for i, exps in enumerate(CUBIC_MONOMIALS) if S_WEIGHTS[exps] <= a]
    return SectionSpace(CUBIC_MONOMIALS, vectors, cell=a)


def t_membership_space(b: int) -> SectionSpace:
    vectors = []
    for exps in CUBIC_MONOMIALS:
        if S_WEIGHTS[exps] <= b:
            vectors.append(cubic_vector(TILDE.from_tilde(MultiPoly.monomial(TILDE_TABLE, exps))))
    return SectionSpace(CUBIC_MONOMIALS, vectors, cell=b)


def intersection_cell(a: int, b: int) -> SectionSpace:
    return s_membership_space(a).intersection(t_membership_space(b), cell=(a, b))


def expected_cell_dimension(a: int, b: int) -> int:
    if a >= 3:
        return t_membership_space(b).dim
    if b >= 3:
        return s_membership_space(a).dim
    if min(a, b) == 0:
        return 0
    return CELL_DIMENSIONS[(a, b)]


#################################################################################
#                         Free basis of invariant sections                      #
#################################################################################
@dataclass
class Generator:
    label: str
    poly: MultiPoly
    cell: Tuple[int, int]
    cubic: MultiPoly


def split_generator(label: str, poly: MultiPoly) -> Generator:
    """Write a generator as s^a * t^b * (cubic form)."""
    parts = poly.coefficients_in(("s", "t"))
    if len(parts) != 1:
        raise ValueError(f"{label} = {poly} is not of the form s^a t^b * cubic")
    (cell, part), = parts.items()
    form = to_cubic_table(part)
    cubic_vector(form)
    return Generator(label, poly, cell, form)


def generator_matrix(generators: List[Generator]) -> PolyMatrix:
    """Column j holds generator j in the cubic monomial frame, entries in k[s,t]."""
    table = generators[0].poly.table
    names = ("u", "v", "w")
    columns = []
    for g in generators:
        coeffs = g.poly.coefficients_in(names)
        for exps in coeffs:
            if exps not in CUBIC_INDEX:
                raise ValueError(f"{g.label} is not cubic in u, v, w")
        columns.append([coeffs.get(exps, table.zero()) for exps in CUBIC_MONOMIALS])
    return PolyMatrix(table, [[col[i] for col in columns] for i in range(len(CUBIC_MONOMIALS))])


def generated_span(generators: List[Generator], a: int, b: int) -> SectionSpace:
    vectors = [cubic_vector(g.cubic) for g in generators if g.cell[0] <= a and g.cell[1] <= b]
    return SectionSpace(CUBIC_MONOMIALS, vectors, cell=(a, b))


MU3_ACTIONS = {
    "scale": {"s": "z*s", "u": "z*u", "v": "z^2*v"},
    "rotate": {"t": "z*t", "u": "w", "v": "u", "w": "v"},
}


def mu3_eigenvalue(g: MultiPoly, action: str) -> Optional[EisensteinRational]:
    """Scalar c with g(action) = c*g, or None when g is not an eigenvector."""
    images = {name: parse_poly(text, g.table) for name, text in MU3_ACTIONS[action].items()}
    image = substitute(g, images, g.table)
    exps, coeff = g.leading_term()
    c = image.coefficient(exps) / coeff
    return c if image == g * c else None


def st_basis_certificate(generators: List[Generator]) -> List[CheckResult]:
    results = []
    for g in generators:
        def member(g=g):
            a, b = g.cell
            in_s, in_t = s_membership(g.cubic, a), t_membership(g.cubic, b)
            return verdict(SUITE, f"basis.member.{g.label}", "membership of the listed generators in both patterns",
                           in_s and in_t, {"cell": g.cell, "in_s": in_s, "in_t": in_t, "cubic": g.cubic})
        results.append(guarded(SUITE, f"basis.member.{g.label}", "membership of the listed generators", member))

    def freeness():
        det = determinant(generator_matrix(generators))
        witness = {"determinant": det}
        return verdict(SUITE, "basis.freeness", "free k[s,t]-module, nonzero 10x10 determinant",
                       len(generators) == len(CUBIC_MONOMIALS) and not det.is_zero(), witness)
    results.append(guarded(SUITE, "basis.freeness", "free k[s,t]-module", freeness))

    def generation():
        failed = {}
        dims = {}
        for a in range(4):
            for b in range(4):
                cell = intersection_cell(a, b)
                spanned = generated_span(generators, a, b)
                dims[f"{a},{b}"] = cell.dim
                if spanned != cell:
                    failed[f"{a},{b}"] = {"generated": spanned.dim, "cell": cell.dim}
        witness = {"cell_dimensions": dims}
        if failed:
            witness["mismatched_cells"] = failed
        return verdict(SUITE, "basis.generation", "generators span every cell (a,b) <= (3,3)", not failed, witness)
    results.append(guarded(SUITE, "basis.generation", "generators span every cell", generation))

    def invariance():
        bad = {}
        for g in generators:
            for action in MU3_ACTIONS:
                c = mu3_eigenvalue(g.poly, action)
                if c != ONE:
                    bad[f"{g.label}.{action}"] = "not an eigenvector" if c is None else c
        return verdict(SUITE, "basis.mu3_invariance", "invariance under both cube-root actions", not bad,
                       {"eigenvalues": bad} if bad else {})
    results.append(guarded(SUITE, "basis.mu3_invariance", "invariance under both cube-root actions", invariance))
    return results


def membership_table_checks() -> List[CheckResult]:
    results = []

    def s_spaces():
        dims = [s_membership_space(a).dim for a in range(4)]
        nested = all(s_membership_space(a) <= s_membership_space(a + 1) for a in range(3))
        return verdict(SUITE, "basis.s_spaces", "s-pattern tables for a = 0..3",
                       dims == [1, 4, 7, 10] and nested, {"dims": dims, "nested": nested})
    results.append(guarded(SUITE, "basis.s_spaces", "s-pattern tables", s_spaces))

    def t_spaces():
        dims = [t_membership_space(b).dim for b in range(4)]
        nested = all(t_membership_space(b) <= t_membership_space(b + 1) for b in range(3))
        listed = {
            0: ["u^3 + v^3 + w^3 - 3*u*v*w"],
            1: ["u^2*w + z*v*w^2 + z^2*u*v^2", "u*w^2 + z*v^2*w + z^2*u^2*v", "u^3 + z^2*v^3 + z*w^3"],
            2: ["u^2*w + z^2*v*w^2 + z*u*v^2", "u*w^2 + z^2*v^2*w + z*u^2*v", "u^3 + z*v^3 + z^2*w^3"],
        }
        missing = [text for b, texts in listed.items() for text in texts
                   if cubic_vector(cubic(text)) not in t_membership_space(b)
                   or not t_membership(cubic(text), b)]
        witness = {"dims": dims, "nested": nested}
        if missing:
            witness["missing"] = missing
        return verdict(SUITE, "basis.t_spaces", "t-pattern tables for b = 0..3",
                       dims == [1, 4, 7, 10] and nested and not missing, witness)
    results.append(guarded(SUITE, "basis.t_spaces", "t-pattern tables", t_spaces))

    def cells():
        dims = {f"{a},{b}": intersection_cell(a, b).dim for a in range(4) for b in range(4)}
        expected = {f"{a},{b}": expected_cell_dimension(a, b) for a in range(4) for b in range(4)}
        cell11 = intersection_cell(1, 1)
        spanned = SectionSpace(CUBIC_MONOMIALS, [cubic_vector(cubic("u^2*w + z*v*w^2 + z^2*u*v^2"))])
        witness = {"dims": dims}
        if dims != expected:
            witness["expected"] = expected
        ok = dims == expected and cell11 == spanned
        if cell11 != spanned:
            witness["cell_1_1"] = [cubic_from_vector(v) for v in cell11.vectors()]
        return verdict(SUITE, "basis.cells", "intersection cells, trivial when min(a,b) = 0", ok, witness)
    results.append(guarded(SUITE, "basis.cells", "intersection cells", cells))

    def tilde():
        ok, witness = tilde_compatibility()
        det = TILDE.determinant()
        witness["determinant"] = det
        return verdict(SUITE, "basis.tilde_frame", "tilde coordinates compatible with the cyclic shift",
                       ok and bool(det), witness)
    results.append(guarded(SUITE, "basis.tilde_frame", "tilde coordinates", tilde))
    return results


#################################################################################
#                                 Blow-up charts                                #
#################################################################################
@dataclass(frozen=True)
class ChartMap:
    name: str
    coordinates: Tuple[str, ...]
    # parent coordinates (or t, u, v for a first-blow-up chart) in terms of ours
    refinement: Dict[str, str]
    parent: Optional[str] = None
    exceptional: Dict[str, str] = field(default_factory=dict)
    ideal: Optional[str] = None

    @property
    def table(self) -> VarTable:
        return VarTable(self.coordinates)


CHARTS: Dict[str, ChartMap] = {
    "1": ChartMap("1", ("u", "t1", "v1"), {"t": "u*t1", "v": "u*v1"},
                  exceptional={"E1": "u"}),
    "2": ChartMap("2", ("v", "t2", "u2"), {"t": "v*t2", "u": "v*u2"},
                  exceptional={"E1": "v", "lambda": "t2, u2"}),
    "3": ChartMap("3", ("t", "u3", "v3"), {"u": "t*u3", "v": "t*v3"},
                  exceptional={"E1": "t"}),
    "1'": ChartMap("1'", ("u", "t1", "v1p"), {"u": "u", "t1": "t1", "v1": "u*v1p"}, parent="1",
                   exceptional={"E2": "u", "lambda": "t1, v1p"}),
    "1''": ChartMap("1''", ("t1", "v1", "upp"), {"u": "v1*upp", "t1": "t1", "v1": "v1"}, parent="1",
                    exceptional={"E2": "v1"}),
    "3'": ChartMap("3'", ("t", "u3", "v3p"), {"t": "t", "u3": "u3", "v3": "t*v3p"}, parent="3",
                   exceptional={"E2": "t"}),
    "3''": ChartMap("3''", ("u3", "v3", "tpp"), {"t": "v3*tpp", "u3": "u3", "v3": "v3"}, parent="3",
                    exceptional={"E2": "v3"}),
    "1'a": ChartMap("1'a", ("u", "t1", "v1a"), {"u": "u", "t1": "t1", "v1p": "t1*v1a"}, parent="1'",
                    exceptional={"E3": "t1"}, ideal="u^3*t1"),
    "2a": ChartMap("2a", ("v", "t2", "u2a"), {"v": "v", "t2": "t2", "u2": "t2*u2a"}, parent="2",
                   exceptional={"E3": "t2"}, ideal="v^2*t2"),
}

MEMBERSHIP_CHARTS = ("1'a", "2a")


def chart_substitution(name: str) -> Dict[str, MultiPoly]:
    """t, u, v (with w = 1) in the coordinates of the chart, composed along the tower."""
    chart = CHARTS[name]
    table = chart.table
    own = {src: parse_poly(text, table) for src, text in chart.refinement.items()}
    if chart.parent is None:
        images = {name_: table.variable(name_) for name_ in ("t", "u", "v") if name_ in table}
        images.update(own)
        return images
    parent = CHARTS[chart.parent]
    return {src: substitute(image, own, table) for src, image in chart_substitution(parent.name).items()}


def chart_image(c: MultiPoly, chart: str, perm: str = "identity") -> MultiPoly:
    """
    Residue of the cubic form `c` (coefficients in k[t]) in the chart ring modulo t^3
    and the chart's membership ideal. Zero iff the membership condition holds.
    """
    if chart not in CHARTS or CHARTS[chart].ideal is None:
        raise ChartError(f"chart {chart} carries no membership condition")
    chart_map = CHARTS[chart]
    if perm not in PERMUTATIONS:
        raise ChartError(f"unknown permutation {perm}")
    source = permute(c, perm).evaluate({"w": 1}).truncate("t", 3)
    image = substitute(source, chart_substitution(chart), chart_map.table)
    generator = parse_poly(chart_map.ideal, chart_map.table)
    return MultiPoly(chart_map.table, {e: v for e, v in image.terms.items() if not generator.divides_monomial(e)})


CONDITIONS = [(chart, perm) for chart in MEMBERSHIP_CHARTS for perm in PERMUTATIONS]


def local_frame(level: int = 2) -> List[Tuple[int, Tuple[int, int, int]]]:
    return [(j, exps) for j in range(level + 1) for exps in CUBIC_MONOMIALS]


def frame_poly(j: int, exps) -> MultiPoly:
    return MultiPoly.monomial(LOCAL_TABLE, (j,) + tuple(exps))


def frame_vector(p: MultiPoly, level: int = 2) -> Vector:
    """Coordinates of p in the frame t^j * m, j <= level; higher t-powers are dropped."""
    index = {key: i for i, key in enumerate(local_frame(level))}
    vec = {}
    for exps, coeff in p.terms.items():
        j, rest = exps[0], exps[1:]
        if rest not in CUBIC_INDEX:
            raise ValueError(f"{p} is not cubic in u, v, w")
        if j <= level:
            vec[index[(j, rest)]] = coeff
    return vec


def to_local_table(p: MultiPoly) -> MultiPoly:
    return substitute(p, {}, LOCAL_TABLE)


def local_section_space(level: int = 2) -> SectionSpace:
    """Kernel of the six chart conditions on cubic forms of t-degree <= level."""
    frame = local_frame(level)
    columns = []
    for j, exps in frame:
        column = {}
        for k, (chart, perm) in enumerate(CONDITIONS):
            for e, c in chart_image(frame_poly(j, exps), chart, perm).terms.items():
                column[(k,) + e] = c
        columns.append(column)
    return SectionSpace(frame, kernel_of_columns(columns), cell=level)


def truncated_multiples(basis: List[MultiPoly], level: int = 2) -> SectionSpace:
    vectors = []
    for e in basis:
        d = e.degree_in("t")
        for j in range(level + 1 - d):
            vectors.append(frame_vector(e * LOCAL_TABLE.variable("t") ** j, level))
    return SectionSpace(local_frame(level), vectors, cell=level)


def counting_identity(basis: List[MultiPoly], level: int) -> int:
    return sum(max(0, level + 1 - e.degree_in("t")) for e in basis)


def section_count(level: int) -> int:
    return local_section_space(level).dim


def local_basis_certificate(basis: Dict[str, MultiPoly]) -> List[CheckResult]:
    results = []
    elements = {label: to_local_table(p) for label, p in basis.items()}

    for label, e in elements.items():
        def member(label=label, e=e):
            residues = {f"{chart}/{perm}": chart_image(e, chart, perm) for chart, perm in CONDITIONS}
            nonzero = {k: v for k, v in residues.items() if v}
            return verdict(SUITE, f"sections.member.{label}", "the listed local basis satisfies all chart conditions",
                           not nonzero, {"residues": nonzero} if nonzero else {})
        results.append(guarded(SUITE, f"sections.member.{label}", "local basis chart conditions", member))

    def kernel():
        K = local_section_space(2)
        multiples = truncated_multiples(list(elements.values()), 2)
        ok = K.dim == 12 and K == multiples
        return verdict(SUITE, "sections.kernel", "sections modulo t^3 form a 12-dimensional space",
                       ok, {"dim": K.dim, "expected_dim": 12, "multiples_dim": multiples.dim,
                            "equal": K == multiples})
    results.append(guarded(SUITE, "sections.kernel", "truncated section space", kernel))

    def counting():
        computed = {}
        predicted = {}
        for level in (2, 3, 4):
            computed[level] = section_count(level)
            predicted[level] = counting_identity(list(elements.values()), level)
        return verdict(SUITE, "sections.counting", "free B'-module: dimensions match the basis t-degrees",
                       computed == predicted and computed[2] == 12,
                       {"computed": computed, "predicted": predicted})
    results.append(guarded(SUITE, "sections.counting", "section counting identity", counting))

    def t_stable():
        K = local_section_space(2)
        frame = local_frame(2)
        t = LOCAL_TABLE.variable("t")
        escaped = []
        for vec in K.vectors():
            p = sum((frame_poly(*frame[i]) * c for i, c in vec.items()), LOCAL_TABLE.zero())
            if frame_vector(p * t, 2) not in K:
                escaped.append(p)
        return verdict(SUITE, "sections.t_module", "t * K lies in K", not escaped,
                       {"escaped": escaped} if escaped else {})
    results.append(guarded(SUITE, "sections.t_module", "t-stability", t_stable))

    def tower():
        expected = {
            "1'a": {"t": "u*t1", "v": "u^2*t1*v1a"},
            "2a": {"t": "v*t2", "u": "v*t2*u2a"},
        }
        bad = {}
        for name, images in expected.items():
            table = CHARTS[name].table
            composed = chart_substitution(name)
            for var, text in images.items():
                if composed[var] != parse_poly(text, table):
                    bad[f"{name}.{var}"] = composed[var]
        return verdict(SUITE, "sections.chart_tower", "chart maps compose along the blow-up tower", not bad,
                       {"mismatches": bad} if bad else {})
    results.append(guarded(SUITE, "sections.chart_tower", "chart composition", tower))
    return results


def run(ctx) -> List[CheckResult]:
    results = membership_table_checks()
    try:
        generators = [split_generator(label, poly) for label, poly in ctx.st_basis.polys.items()]
    except ValueError as e:
        results.append(verdict(SUITE, "basis.shape", "generators of the form s^a t^b * cubic",
                               False, {"error": str(e)}))
        generators = None
    if generators is not None:
        logger.info(f"checking {len(generators)} invariant generators")
        results.extend(st_basis_certificate(generators))
    logger.info(f"checking {len(ctx.local_basis.polys)} local basis elements")
    results.extend(local_basis_certificate(ctx.local_basis.polys))
    return results
