"""
Quadratic relations among the ten invariant sections: the 165-element candidate
frame, its substitution matrix, the kernel, and row-level certificates for the
27 listed quadrics.
"""
import logging
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Tuple

from algebra.linear import SectionSpace, Vector, kernel_of_columns
from algebra.matrix import PolyMatrix, rank_over_fraction_field
from algebra.polyring import MultiPoly, VarTable, substitute
from verification.report import CheckResult, guarded, verdict

logger = logging.getLogger(__name__)

SUITE = "relations"

X_NAMES = tuple(f"x{i}" for i in range(10))
ST_PARTS = {"1": (0, 0), "s": (1, 0), "t": (0, 1)}

# (s,t-part, (i, j)) with i <= j: the monomial m * x_i * x_j
FrameElement = Tuple[str, Tuple[int, int]]
X_PAIRS: List[Tuple[int, int]] = list(combinations_with_replacement(range(10), 2))
FRAME: List[FrameElement] = [(part, pair) for part in ST_PARTS for pair in X_PAIRS]
FRAME_INDEX: Dict[FrameElement, int] = {element: k for k, element in enumerate(FRAME)}


def frame_label(element: FrameElement) -> str:
    part, (i, j) = element
    quad = f"x{i}^2" if i == j else f"x{i}*x{j}"
    return quad if part == "1" else f"{part}*{quad}"


def frame_coordinates(f: MultiPoly) -> Tuple[Vector, List[str]]:
    """
    Coordinates of f in the candidate frame, and the terms that fall outside it
    (not quadratic in x0..x9, or carrying an s,t-part other than 1, s, t).
    """
    s_idx, t_idx = f.table.index("s"), f.table.index("t")
    x_idx = [f.table.index(name) for name in X_NAMES]
    parts = {v: k for k, v in ST_PARTS.items()}
    vec, outside = {}, []
    for exps, coeff in f.sorted_terms():
        part = parts.get((exps[s_idx], exps[t_idx]))
        xs = [i for i, k in enumerate(x_idx) for _ in range(exps[k])]
        extra = sum(exps) - exps[s_idx] - exps[t_idx] - len(xs)
        if part is None or len(xs) != 2 or extra:
            outside.append(str(MultiPoly.monomial(f.table, exps, coeff)))
            continue
        vec[FRAME_INDEX[(part, (xs[0], xs[1]))]] = coeff
    return vec, outside


def frame_poly(vec: Vector, table: VarTable) -> MultiPoly:
    result = table.zero()
    for k, coeff in vec.items():
        part, (i, j) = FRAME[k]
        term = table.variable(f"x{i}") * table.variable(f"x{j}") * coeff
        if part != "1":
            term = term * table.variable(part)
        result = result + term
    return result


def substitution_images(basis: List[MultiPoly], table: VarTable) -> Dict[str, MultiPoly]:
    """s -> s^3, t -> t^3, x_(i-1) -> b_i, all over the basis table."""
    target = basis[0].table
    if len(basis) != len(X_NAMES):
        raise ValueError(f"expected {len(X_NAMES)} basis elements, got {len(basis)}")
    images = {"s": target.variable("s") ** 3, "t": target.variable("t") ** 3}
    images.update(zip(X_NAMES, basis))
    for name in table.names:
        if name not in images:
            raise ValueError(f"variable {name} has no image under the substitution")
    return images


class SubstitutionMatrix:
    """
    The k-linear map from the candidate frame to k[s,t,u,v,w]; column k holds the
    image of FRAME[k] as a sparse vector keyed by target exponents.
    """
    def __init__(self, basis: List[MultiPoly]):
        self.target = basis[0].table
        s3 = self.target.variable("s") ** 3
        t3 = self.target.variable("t") ** 3
        multipliers = {"1": self.target.one(), "s": s3, "t": t3}
        products = {(i, j): basis[i] * basis[j] for i, j in X_PAIRS}
        self.columns: List[Vector] = []
        for part, pair in FRAME:
            image = products[pair] * multipliers[part]
            self.columns.append(dict(image.terms))

    @property
    def shape(self) -> Tuple[int, int]:
        rows = set()
        for column in self.columns:
            rows.update(column)
        return len(rows), len(self.columns)

    def apply(self, vec: Vector) -> MultiPoly:
        result = MultiPoly(self.target)
        for k, coeff in vec.items():
            result = result + MultiPoly(self.target, self.columns[k]) * coeff
        return result


def substitution_matrix(basis: List[MultiPoly]) -> SubstitutionMatrix:
    return SubstitutionMatrix(basis)


def relation_space(matrix: SubstitutionMatrix) -> SectionSpace:
    return SectionSpace(FRAME, kernel_of_columns(matrix.columns), cell="quadrics")


def x_coefficient_matrix(quadrics: List[MultiPoly]) -> PolyMatrix:
    """Rows: quadrics; columns: the 55 quadratic x-monomials; entries in k[s,t]."""
    table = quadrics[0].table
    keys = []
    for i, j in X_PAIRS:
        exps = [0] * len(X_NAMES)
        exps[i] += 1
        exps[j] += 1
        keys.append(tuple(exps))
    rows = []
    for f in quadrics:
        coeffs = f.coefficients_in(X_NAMES)
        rows.append([coeffs.get(key, table.zero()) for key in keys])
    return PolyMatrix(table, rows)


def table_certificate(quadrics: Dict[str, MultiPoly], basis: List[MultiPoly]) -> List[CheckResult]:
    results = []
    table = next(iter(quadrics.values())).table
    images = substitution_images(basis, table)
    target = basis[0].table

    for label, f in quadrics.items():
        def row(label=label, f=f):
            _, outside = frame_coordinates(f)
            residual = substitute(f, images, target)
            witness = {}
            if outside:
                witness["outside_frame"] = outside
            if residual:
                witness["residual"] = residual
            return verdict(SUITE, f"relations.{label}", "degree 2 in x, at most linear in s, t, and vanishing",
                           not outside and not residual, witness)
        results.append(guarded(SUITE, f"relations.{label}", "listed quadric", row))

    def independence():
        r = rank_over_fraction_field(x_coefficient_matrix(list(quadrics.values())))
        return verdict(SUITE, "relations.rank", "linearly independent over k(s,t)",
                       r == len(quadrics) == 27, {"rank": r, "rows": len(quadrics)})
    results.append(guarded(SUITE, "relations.rank", "linearly independent over k(s,t)", independence))

    def kernel():
        matrix = substitution_matrix(basis)
        space = relation_space(matrix)
        logger.info(f"substitution matrix {matrix.shape[0]} x {matrix.shape[1]}, kernel dim {space.dim}")
        missing = [label for label, f in quadrics.items() if frame_coordinates(f)[0] not in space]
        nonvanishing = [k for k, vec in enumerate(space.vectors()) if substitute(frame_poly(vec, table), images, target)]
        witness = {"frame": len(FRAME), "kernel_dim": space.dim}
        if missing:
            witness["rows_outside_kernel"] = missing
        if nonvanishing:
            witness["nonvanishing_kernel_vectors"] = nonvanishing
        return verdict(SUITE, "relations.kernel", "listed quadrics lie in the kernel of the substitution",
                       not missing and not nonvanishing and space.dim >= 27, witness)
    results.append(guarded(SUITE, "relations.kernel", "kernel of the substitution", kernel))
    return results


def quadric_count_check(quadrics: Dict[str, MultiPoly]) -> CheckResult:
    quadratic = len(X_PAIRS)
    sextic = sum(1 for a in range(7) for b in range(7 - a))
    witness = {"quadrics_in_ten_variables": quadratic, "sextics_in_three_variables": sextic,
               "difference": quadratic - sextic, "rows": len(quadrics)}
    ok = quadratic == comb(11, 2) and sextic == comb(8, 2) and quadratic - sextic == len(quadrics)
    return verdict(SUITE, "relations.count", "55 - 28 = 27 quadratic equations", ok, witness)


def run(ctx) -> List[CheckResult]:
    quadrics = ctx.quadrics.polys
    basis = list(ctx.st_basis.polys.values())
    results = [guarded(SUITE, "relations.count", "55 - 28 = 27 quadratic equations",
                       lambda: quadric_count_check(quadrics))]
    logger.info(f"certifying {len(quadrics)} quadrics against {len(basis)} sections")
    try:
        results.extend(table_certificate(quadrics, basis))
    except ValueError as e:
        results.append(verdict(SUITE, "relations.substitution", "substitution of the basis", False,
                               {"error": str(e)}))
    return results

