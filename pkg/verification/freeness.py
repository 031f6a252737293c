"""
Freeness of the quotient by the 27 quadrics over R = k[s,t,x0,x1,x7]: a rewrite
system oriented by the quadrics, normal forms in the basis
(1, x2, x3, x4, x5, x5^2, x6, x8, x9), the seven multiplication matrices, and the
commutation and relation certificates.
"""
import logging
import os
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from tqdm import tqdm

from algebra.matrix import PolyMatrix
from algebra.polyring import MultiPoly, VarTable, substitute
from algebra.scalars import ONE
from fixtures.poly_file import dump_poly_file
from verification.report import CheckResult, guarded, verdict

logger = logging.getLogger(__name__)

SUITE = "freeness"

BASE_NAMES = ("s", "t", "x0", "x1", "x7")
NONBASE_NAMES = ("x2", "x3", "x4", "x5", "x6", "x8", "x9")
BASE_RING = VarTable(BASE_NAMES)

MAX_STEPS = 10_000


class RewriteSystemError(RuntimeError):
    pass


class NormalFormError(RuntimeError):
    pass


def _nb(**powers) -> Tuple[int, ...]:
    return tuple(powers.get(name, 0) for name in NONBASE_NAMES)


class ModuleBasis:
    LABELS = ("1", "x2", "x3", "x4", "x5", "x5^2", "x6", "x8", "x9")
    MONOMIALS = (
        _nb(), _nb(x2=1), _nb(x3=1), _nb(x4=1), _nb(x5=1),
        _nb(x5=2), _nb(x6=1), _nb(x8=1), _nb(x9=1),
    )
    INDEX = {exps: k for k, exps in enumerate(MONOMIALS)}
    X5_SQUARED = 5

    def __len__(self):
        return len(self.MONOMIALS)


BASIS = ModuleBasis()
MODULE_RANK = len(BASIS)
MULTIPLIERS = (2, 3, 4, 5, 6, 8, 9)

# a coordinate vector over R
Coordinates = Tuple[MultiPoly, ...]


def zero_vector() -> Coordinates:
    return tuple(BASE_RING.zero() for _ in range(MODULE_RANK))


def unit_vector(k: int) -> Coordinates:
    return tuple(BASE_RING.one() if i == k else BASE_RING.zero() for i in range(MODULE_RANK))


def _add(a: Coordinates, b: Coordinates) -> Coordinates:
    return tuple(x + y for x, y in zip(a, b))


def _scale(a: Coordinates, r: MultiPoly) -> Coordinates:
    return tuple(x * r for x in a)


class RewriteSystem:
    """
    One rule per quadric, solving it for its head: the unique quadratic term in the
    non-base variables alone whose coefficient is exactly 1.
    """
    def __init__(self, quadrics: Dict[str, MultiPoly]):
        if not quadrics:
            raise RewriteSystemError("no quadrics to orient")
        self.table = next(iter(quadrics.values())).table
        for name in BASE_NAMES + NONBASE_NAMES:
            self.table.index(name)
        self._base_idx = [self.table.index(name) for name in BASE_NAMES]
        self._nonbase_idx = [self.table.index(name) for name in NONBASE_NAMES]
        self.rules: Dict[Tuple[int, ...], MultiPoly] = {}
        self.labels: Dict[Tuple[int, ...], str] = {}
        for label, f in quadrics.items():
            head = self._head(label, f)
            if head in self.rules:
                raise RewriteSystemError(f"{label} and {self.labels[head]} share the head {self.head_string(head)}")
            full = self.embed(head)
            self.rules[head] = MultiPoly.monomial(self.table, full) - f
            self.labels[head] = label

    def split(self, exps) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        base = tuple(exps[i] for i in self._base_idx)
        nonbase = tuple(exps[i] for i in self._nonbase_idx)
        if sum(base) + sum(nonbase) != sum(exps):
            raise RewriteSystemError(f"monomial {self.table.monomial_string(exps)} uses variables outside s, t, x0..x9")
        return base, nonbase

    def embed(self, nonbase) -> Tuple[int, ...]:
        full = [0] * len(self.table)
        for i, e in zip(self._nonbase_idx, nonbase):
            full[i] = e
        return tuple(full)

    def _head(self, label, f) -> Tuple[int, ...]:
        candidates = []
        for exps, coeff in f.terms.items():
            base, nonbase = self.split(exps)
            if not any(base) and sum(nonbase) == 2 and coeff == ONE:
                candidates.append(nonbase)
        if len(candidates) != 1:
            raise RewriteSystemError(f"{label} has {len(candidates)} monic non-base quadratic terms, expected 1")
        return candidates[0]

    @staticmethod
    def head_string(nonbase) -> str:
        return VarTable(NONBASE_NAMES).monomial_string(nonbase)

    def heads(self) -> List[Tuple[int, ...]]:
        return list(self.rules)


class NormalForm:
    """
    Normal forms modulo the rewrite system, memoized per non-base monomial. Cubic and
    higher monomials are split as x_c * (rest) with c taken in index order, using
    the first split whose rest has no x5^2 coordinate.
    """
    def __init__(self, system: RewriteSystem, max_steps: int = MAX_STEPS):
        self.system = system
        self.max_steps = max_steps
        self.steps = 0
        self._memo: Dict[Tuple[int, ...], Coordinates] = {}
        self._active = set()
        self._x5 = NONBASE_NAMES.index("x5")

    def __call__(self, p: MultiPoly) -> Coordinates:
        if p.table != self.system.table:
            raise NormalFormError(f"normal form over {p.table}, expected {self.system.table}")
        result = zero_vector()
        for exps, coeff in p.terms.items():
            base, nonbase = self.system.split(exps)
            r = MultiPoly.monomial(BASE_RING, base, coeff)
            result = _add(result, _scale(self.monomial(nonbase), r))
        return result

    def monomial(self, nonbase: Tuple[int, ...]) -> Coordinates:
        if nonbase in self._memo:
            return self._memo[nonbase]
        if nonbase in self._active:
            raise NormalFormError(f"cyclic rewriting at {RewriteSystem.head_string(nonbase)}")
        self.steps += 1
        if self.steps > self.max_steps:
            raise NormalFormError(f"normal form exceeded {self.max_steps} steps")
        self._active.add(nonbase)
        try:
            value = self._reduce(nonbase)
        finally:
            self._active.discard(nonbase)
        self._memo[nonbase] = value
        return value

    def _reduce(self, nonbase) -> Coordinates:
        if nonbase in ModuleBasis.INDEX:
            return unit_vector(ModuleBasis.INDEX[nonbase])
        degree = sum(nonbase)
        if degree == 2:
            if nonbase not in self.system.rules:
                raise NormalFormError(f"no rule for {RewriteSystem.head_string(nonbase)}")
            return self(self.system.rules[nonbase])
        for c, e in enumerate(nonbase):
            if not e:
                continue
            rest = nonbase[:c] + (e - 1,) + nonbase[c + 1:]
            v = self.monomial(rest)
            if v[ModuleBasis.X5_SQUARED]:
                continue
            result = zero_vector()
            for k, coeff in enumerate(v):
                if coeff:
                    product = tuple(a + b for a, b in zip(ModuleBasis.MONOMIALS[k], _unit(c)))
                    result = _add(result, _scale(self.monomial(product), coeff))
            return result
        if nonbase[self._x5] == degree:
            return self._x5_power(nonbase)
        raise NormalFormError(f"no reduction path for {RewriteSystem.head_string(nonbase)}")

    def _x5_power(self, nonbase) -> Coordinates:
        """x5^k = x5^(k-2) * (x4*x6 - r), where the rule for x4*x6 reads x5^2 + r."""
        system = self.system
        head, square = _nb(x4=1, x6=1), _nb(x5=2)
        rule = system.rules.get(head)
        if rule is None or rule.coefficient(system.embed(square)) != ONE:
            raise NormalFormError("x5 powers need a rule x4*x6 -> x5^2 + ...")
        r = rule - MultiPoly.monomial(system.table, system.embed(square))
        replacement = MultiPoly.monomial(system.table, system.embed(head)) - r
        rest = nonbase[:self._x5] + (nonbase[self._x5] - 2,) + nonbase[self._x5 + 1:]
        return self(MultiPoly.monomial(system.table, system.embed(rest)) * replacement)


def _unit(c: int) -> Tuple[int, ...]:
    return tuple(1 if i == c else 0 for i in range(len(NONBASE_NAMES)))


def normal_form(system: RewriteSystem, p: MultiPoly) -> Coordinates:
    return NormalForm(system)(p)


def expand(system: RewriteSystem, v: Coordinates) -> MultiPoly:
    """The polynomial sum_k v_k * basis_k over the quadric table."""
    table = system.table
    result = MultiPoly(table)
    for k, coeff in enumerate(v):
        if coeff:
            lifted = substitute(coeff, {}, table)
            result = result + lifted * MultiPoly.monomial(table, system.embed(ModuleBasis.MONOMIALS[k]))
    return result


def multiplication_matrix(nf: NormalForm, i: int) -> PolyMatrix:
    """Column j is the normal form of x_i times basis element j."""
    c = NONBASE_NAMES.index(f"x{i}")
    columns = []
    for monomial in ModuleBasis.MONOMIALS:
        product = tuple(a + b for a, b in zip(monomial, _unit(c)))
        columns.append(nf.monomial(product))
    return PolyMatrix(BASE_RING, [[col[r] for col in columns] for r in range(MODULE_RANK)])


def build_matrices(nf: NormalForm) -> Dict[int, PolyMatrix]:
    return {i: multiplication_matrix(nf, i) for i in tqdm(MULTIPLIERS, desc="multiplication matrices", disable=None)}


def evaluate_on_matrices(f: MultiPoly, system: RewriteSystem, matrices: Dict[int, PolyMatrix]) -> PolyMatrix:
    """f with x_i -> M_i for non-base variables and r -> r*I for r in R."""
    result = PolyMatrix.zeros(BASE_RING, MODULE_RANK, MODULE_RANK)
    powers: Dict[Tuple[int, int], PolyMatrix] = {}

    def power(i, e):
        if (i, e) not in powers:
            m = PolyMatrix.identity(BASE_RING, MODULE_RANK)
            for _ in range(e):
                m = m @ matrices[i]
            powers[(i, e)] = m
        return powers[(i, e)]

    for exps, coeff in f.terms.items():
        base, nonbase = system.split(exps)
        term = PolyMatrix.identity(BASE_RING, MODULE_RANK).scale(MultiPoly.monomial(BASE_RING, base, coeff))
        for name, e in zip(NONBASE_NAMES, nonbase):
            if e:
                term = term @ power(int(name[1:]), e)
        result = result + term
    return result


def _first_nonzero(M: PolyMatrix) -> Optional[dict]:
    for i, j, entry in M.nonzero_entries():
        return {"row": ModuleBasis.LABELS[i], "col": ModuleBasis.LABELS[j], "entry": entry}
    return None


def commutation_certificate(matrices: Dict[int, PolyMatrix]) -> CheckResult:
    failures = []
    for i, j in combinations(sorted(matrices), 2):
        commutator = matrices[i] @ matrices[j] - matrices[j] @ matrices[i]
        if not commutator.is_zero():
            failures.append({"pair": f"M{i},M{j}", **_first_nonzero(commutator)})
    witness = {"pairs": len(list(combinations(matrices, 2)))}
    if failures:
        witness["failures"] = failures
    return verdict(SUITE, "freeness.commutation", "multiplication matrices commute pairwise", not failures, witness)


def relation_certificate(quadrics: Dict[str, MultiPoly], system: RewriteSystem,
                         matrices: Dict[int, PolyMatrix]) -> List[CheckResult]:
    results = []
    for label, f in quadrics.items():
        def check(label=label, f=f):
            residual = evaluate_on_matrices(f, system, matrices)
            witness = {}
            if not residual.is_zero():
                witness = {"residual_entries": len(list(residual.nonzero_entries())), **_first_nonzero(residual)}
            return verdict(SUITE, f"freeness.relation.{label}", "matrices obey the quadric",
                           residual.is_zero(), witness)
        results.append(guarded(SUITE, f"freeness.relation.{label}", "matrices obey the quadric", check))
    return results


def rewrite_coverage_check(system: RewriteSystem) -> CheckResult:
    n = len(NONBASE_NAMES)
    quadratic = {tuple(a + b for a, b in zip(_unit(i), _unit(j))) for i in range(n) for j in range(i, n)}
    heads = set(system.heads())
    x5_squared = _nb(x5=2)
    missing = sorted(quadratic - heads - {x5_squared})
    extra = sorted(heads - quadratic)
    witness = {"heads": len(heads), "quadratic_monomials": len(quadratic)}
    if missing:
        witness["missing"] = [RewriteSystem.head_string(m) for m in missing]
    if extra:
        witness["extra"] = [RewriteSystem.head_string(m) for m in extra]
    ok = not missing and not extra and x5_squared not in heads and len(quadratic) == 28
    return verdict(SUITE, "freeness.coverage", "27 heads and x5^2 cover the quadratic monomials", ok, witness)


def dump_matrices(matrices: Dict[int, PolyMatrix], out_dir: str) -> List[str]:
    paths = []
    os.makedirs(out_dir, exist_ok=True)
    for i, M in sorted(matrices.items()):
        entries = {f"m_{r}_{c}": entry for r, c, entry in M.nonzero_entries()}
        path = os.path.join(out_dir, f"M{i}.poly")
        dump_poly_file(path, BASE_RING, entries)
        paths.append(path)
    logger.info(f"wrote {len(paths)} matrices to {out_dir}")
    return paths


def run(ctx) -> List[CheckResult]:
    quadrics = ctx.quadrics.polys
    try:
        system = RewriteSystem(quadrics)
    except (RewriteSystemError, ValueError) as e:
        return [verdict(SUITE, "freeness.rewrite_system", "one monic head per quadric", False,
                        {"error": str(e)})]
    results = [guarded(SUITE, "freeness.coverage", "rewrite heads", lambda: rewrite_coverage_check(system))]
    nf = NormalForm(system)
    try:
        matrices = build_matrices(nf)
    except NormalFormError as e:
        results.append(verdict(SUITE, "freeness.matrices", "normal forms of x_i * basis", False,
                               {"error": str(e)}))
        return results
    logger.info(f"built {len(matrices)} multiplication matrices in {nf.steps} reduction steps")
    if ctx.config.dump_matrices:
        dump_matrices(matrices, ctx.config.dump_matrices)
    results.append(guarded(SUITE, "freeness.commutation", "matrices commute",
                           lambda: commutation_certificate(matrices)))
    results.extend(relation_certificate(quadrics, system, matrices))
    flat = all(r.passed for r in results)
    results.append(verdict(SUITE, "freeness.flat", "free of rank 9 over k[s,t,x0,x1,x7], hence flat over A^2",
                           flat, {"rank": MODULE_RANK} if flat else
                           {"failed": [r.name for r in results if not r.passed]}))
    return results
