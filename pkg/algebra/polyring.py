from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from algebra.parser import ExpressionParser, PolyParseError
from algebra.scalars import ONE, ZERO, ZETA, EisensteinRational


class TableMismatchError(ValueError):
    pass


class InhomogeneityError(ValueError):
    def __init__(self, first, second, weights):
        self.terms = (first, second)
        self.weights = weights
        super().__init__(f"terms {first} and {second} have distinct weights {weights[0]} and {weights[1]}")


class NotDivisibleError(ArithmeticError):
    pass


def _scalar(value) -> EisensteinRational:
    if isinstance(value, EisensteinRational):
        return value
    return EisensteinRational(value)


def grlex_key(exps: Tuple[int, ...]):
    return (sum(exps), exps)


class VarTable:
    """
    Ordered, duplicate-free variable names. The order fixes the monomial order.
    `z` is reserved for the cube root of unity.
    """
    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if "z" in names:
            raise ValueError("'z' is reserved for the cube root of unity")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise TableMismatchError(f"unknown variable {name!r} for table {self}") from None

    def __contains__(self, name):
        return name in self._index

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __eq__(self, other):
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarTable({' '.join(self.names)})"

    def variable(self, name: str) -> "MultiPoly":
        return MultiPoly.variable(self, name)

    def variables(self, names: Iterable[str]):
        return [self.variable(name) for name in names]

    def zero(self) -> "MultiPoly":
        return MultiPoly(self)

    def one(self) -> "MultiPoly":
        return MultiPoly.constant(self, ONE)

    def monomial_string(self, exps: Tuple[int, ...]) -> str:
        factors = []
        for name, e in zip(self.names, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        return "*".join(factors)


class MultiPoly:
    """
    Sparse polynomial over Q(z): a map from exponent tuples to nonzero coefficients.
    Values are treated as immutable.
    """
    __slots__ = ("table", "terms")

    def __init__(self, table: VarTable, terms: Optional[Mapping] = None):
        self.table = table
        self.terms: Dict[Tuple[int, ...], EisensteinRational] = {}
        if terms:
            n = len(table)
            for exps, coeff in terms.items():
                if len(exps) != n:
                    raise TableMismatchError(f"exponent vector {exps} does not match {table}")
                coeff = _scalar(coeff)
                if coeff:
                    self.terms[tuple(exps)] = coeff

    @classmethod
    def constant(cls, table, value):
        return cls(table, {(0,) * len(table): value})

    @classmethod
    def variable(cls, table, name):
        exps = [0] * len(table)
        exps[table.index(name)] = 1
        return cls(table, {tuple(exps): ONE})

    @classmethod
    def monomial(cls, table, exps, coeff=ONE):
        return cls(table, {tuple(exps): coeff})

    @classmethod
    def _raw(cls, table, terms):
        poly = cls.__new__(cls)
        poly.table = table
        poly.terms = terms
        return poly

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.table != self.table:
                raise TableMismatchError(f"cannot combine polynomials over {self.table} and {other.table}")
            return other
        if isinstance(other, (int, Fraction, EisensteinRational)):
            return MultiPoly.constant(self.table, other)
        return NotImplemented

    ############################################################
    # Ring operations
    ############################################################
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            total = terms.get(exps, ZERO) + coeff
            if total:
                terms[exps] = total
            else:
                terms.pop(exps, None)
        return MultiPoly._raw(self.table, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.table, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, EisensteinRational)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(self.terms) > len(other.terms):
            small, large = other, self
        else:
            small, large = self, other
        terms = {}
        for e1, c1 in small.terms.items():
            for e2, c2 in large.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                total = terms.get(exps, ZERO) + c1 * c2
                if total:
                    terms[exps] = total
                else:
                    terms.pop(exps, None)
        return MultiPoly._raw(self.table, terms)

    __rmul__ = __mul__

    def scale(self, value):
        value = _scalar(value)
        if not value:
            return MultiPoly(self.table)
        return MultiPoly._raw(self.table, {e: c * value for e, c in self.terms.items()})

    def __truediv__(self, other):
        # only by nonzero constants
        if isinstance(other, MultiPoly):
            if not other.is_constant():
                raise ValueError(f"division by non-constant polynomial {other}")
            other = other.constant_coefficient()
        return self.scale(_scalar(other).inv())

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {exponent!r}")
        result = self.table.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.table == other.table and self.terms == other.terms
        if isinstance(other, (int, Fraction, EisensteinRational)):
            value = _scalar(other)
            if not value:
                return not self.terms
            return self.is_constant() and self.constant_coefficient() == value
        return NotImplemented

    def __hash__(self):
        return hash((self.table, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    ############################################################
    # Inspection
    ############################################################
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coefficient(self) -> EisensteinRational:
        return self.terms.get((0,) * len(self.table), ZERO)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.table.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def variables(self):
        used = set()
        for exps in self.terms:
            used.update(i for i, e in enumerate(exps) if e)
        return [name for i, name in enumerate(self.table.names) if i in used]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: grlex_key(item[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=grlex_key)
        return exps, self.terms[exps]

    def coefficient(self, exps) -> EisensteinRational:
        return self.terms.get(tuple(exps), ZERO)

    def coefficients_in(self, names: Sequence[str]) -> Dict[Tuple[int, ...], "MultiPoly"]:
        """
        Split into {exponents in `names`: coefficient polynomial in the other variables}.
        Coefficients stay over the same table.
        """
        idx = [self.table.index(name) for name in names]
        split: Dict[Tuple[int, ...], Dict] = {}
        for exps, coeff in self.terms.items():
            key = tuple(exps[i] for i in idx)
            rest = list(exps)
            for i in idx:
                rest[i] = 0
            split.setdefault(key, {})[tuple(rest)] = coeff
        return {key: MultiPoly._raw(self.table, terms) for key, terms in split.items()}

    ############################################################
    # Calculus and evaluation
    ############################################################
    def derivative(self, name: str) -> "MultiPoly":
        i = self.table.index(name)
        terms = {}
        for exps, coeff in self.terms.items():
            if exps[i]:
                lowered = exps[:i] + (exps[i] - 1,) + exps[i + 1:]
                terms[lowered] = coeff * exps[i]
        return MultiPoly._raw(self.table, terms)

    def evaluate(self, assignment: Mapping[str, object]) -> "MultiPoly":
        """
        Substitute scalars for some variables; the result stays over the same table.
        """
        values = {self.table.index(name): _scalar(value) for name, value in assignment.items()}
        result = {}
        for exps, coeff in self.terms.items():
            exps = list(exps)
            for i, value in values.items():
                if exps[i]:
                    coeff = coeff * value ** exps[i]
                    exps[i] = 0
                    if not coeff:
                        break
            if coeff:
                key = tuple(exps)
                total = result.get(key, ZERO) + coeff
                if total:
                    result[key] = total
                else:
                    result.pop(key, None)
        return MultiPoly._raw(self.table, result)

    def value_at(self, assignment: Mapping[str, object]) -> EisensteinRational:
        result = self.evaluate(assignment)
        if not result.is_constant():
            raise ValueError(f"variables {result.variables()} left unassigned")
        return result.constant_coefficient()

    def truncate(self, name: str, bound: int) -> "MultiPoly":
        """Drop every term whose degree in `name` is at least `bound`."""
        i = self.table.index(name)
        return MultiPoly._raw(self.table, {e: c for e, c in self.terms.items() if e[i] < bound})

    ############################################################
    # Division
    ############################################################
    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if divisor.is_constant():
            return self.scale(divisor.constant_coefficient().inv())
        lead_exps, lead_coeff = divisor.leading_term()
        lead_inv = lead_coeff.inv()
        quotient = {}
        remainder = self
        while remainder.terms:
            exps, coeff = remainder.leading_term()
            shift = tuple(a - b for a, b in zip(exps, lead_exps))
            if any(e < 0 for e in shift):
                raise NotDivisibleError(f"{divisor} does not divide {self}")
            factor = coeff * lead_inv
            quotient[shift] = factor
            remainder = remainder - MultiPoly._raw(self.table, {shift: factor}) * divisor
        return MultiPoly(self.table, quotient)

    def divides_monomial(self, exps) -> bool:
        """True when this (monomial) polynomial divides the monomial `exps`."""
        (lead, _), = self.terms.items()
        return all(a >= b for a, b in zip(exps, lead))

    ############################################################
    # Printing
    ############################################################
    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for k, (exps, coeff) in enumerate(self.sorted_terms()):
            negative = coeff.is_negative()
            body = _term_string(-coeff if negative else coeff, self.table.monomial_string(exps))
            if k == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __repr__(self):
        return f"MultiPoly({self})"


def _term_string(coeff: EisensteinRational, mono: str) -> str:
    text = str(coeff)
    if not text.startswith("(") and ("+" in text[1:] or "-" in text[1:]):
        text = f"({text})"
    if not mono:
        return text
    if coeff == ONE:
        return mono
    return f"{text}*{mono}"


############################################################
# Parsing
############################################################
def parse_poly(text: str, table: VarTable, line: Optional[int] = None) -> MultiPoly:
    """
    Parse polynomial text over `table`; `z` is the cube root of unity.
    """
    def resolve(name):
        if name == "z":
            return MultiPoly.constant(table, ZETA)
        if name in table:
            return MultiPoly.variable(table, name)
        return None

    def divide(a, b):
        return a / b

    parser = ExpressionParser(lambda n: MultiPoly.constant(table, n), resolve, divide)
    return parser.parse(text, line)


############################################################
# Homomorphisms and weights
############################################################
def substitute(p: MultiPoly, assignment: Mapping[str, object], target: Optional[VarTable] = None) -> MultiPoly:
    """
    Ring homomorphism sending each assigned variable to its image in `target` and
    every other variable to the same-named variable of `target`.
    """
    target = target or p.table
    images = {}
    for name, image in assignment.items():
        p.table.index(name)
        if isinstance(image, MultiPoly):
            if image.table != target:
                raise TableMismatchError(f"image of {name} lives over {image.table}, expected {target}")
        else:
            image = MultiPoly.constant(target, image)
        images[name] = image
    powers: Dict[Tuple[str, int], MultiPoly] = {}

    def power(name, e):
        key = (name, e)
        if key not in powers:
            base = images[name] if name in images else MultiPoly.variable(target, name)
            powers[key] = base ** e
        return powers[key]

    result = MultiPoly(target)
    for exps, coeff in p.terms.items():
        term = MultiPoly.constant(target, coeff)
        for name, e in zip(p.table.names, exps):
            if e:
                term = term * power(name, e)
                if term.is_zero():
                    break
        result = result + term
    return result


class WeightVector:
    """Bi-grading: one integer pair per variable of a table."""
    def __init__(self, table: VarTable, weights: Mapping[str, Tuple[int, int]]):
        missing = [name for name in table if name not in weights]
        if missing:
            raise TableMismatchError(f"no weight for variables {missing}")
        extra = [name for name in weights if name not in table]
        if extra:
            raise TableMismatchError(f"weights given for unknown variables {extra}")
        self.table = table
        self.weights = tuple(tuple(weights[name]) for name in table)

    def of_monomial(self, exps) -> Tuple[int, int]:
        first = sum(e * w[0] for e, w in zip(exps, self.weights))
        second = sum(e * w[1] for e, w in zip(exps, self.weights))
        return (first, second)


def bi_weight(p: MultiPoly, w: WeightVector) -> Tuple[int, int]:
    if w.table != p.table:
        raise TableMismatchError(f"weights over {w.table} applied to a polynomial over {p.table}")
    if p.is_zero():
        raise ValueError("the zero polynomial has no weight")
    terms = p.sorted_terms()
    first_exps, first_coeff = terms[0]
    weight = w.of_monomial(first_exps)
    for exps, coeff in terms[1:]:
        other = w.of_monomial(exps)
        if other != weight:
            raise InhomogeneityError(
                str(MultiPoly.monomial(p.table, first_exps, first_coeff)),
                str(MultiPoly.monomial(p.table, exps, coeff)),
                (weight, other))
    return weight


__all__ = [
    "VarTable", "MultiPoly", "WeightVector", "TableMismatchError", "InhomogeneityError",
    "NotDivisibleError", "PolyParseError", "parse_poly", "substitute", "bi_weight", "grlex_key",
]
