"""
Exact linear algebra over Q(z) on sparse vectors (dicts from a sortable key to a
nonzero scalar).
"""
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from algebra.scalars import ONE, ZERO, EisensteinRational


Vector = Dict[Hashable, EisensteinRational]


def _axpy(target: Vector, factor: EisensteinRational, source: Vector):
    """target -= factor * source, in place."""
    for key, value in source.items():
        total = target.get(key, ZERO) - factor * value
        if total:
            target[key] = total
        else:
            target.pop(key, None)


class Echelon:
    """
    Incremental semi-echelon basis. Each stored vector is normalized to 1 at its
    smallest key (its pivot) and carries the combination of inserted vectors it
    came from.
    """
    def __init__(self):
        self.rows: Dict[Hashable, Vector] = {}
        self.combos: Dict[Hashable, Vector] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: Vector, combo: Optional[Vector] = None):
        vec = dict(vec)
        combo = dict(combo) if combo is not None else None
        while True:
            hits = [key for key in vec if key in self.rows]
            if not hits:
                return vec, combo
            key = min(hits)
            factor = vec[key]
            _axpy(vec, factor, self.rows[key])
            if combo is not None:
                _axpy(combo, factor, self.combos[key])

    def insert(self, vec: Vector, combo: Optional[Vector] = None):
        """
        Reduce and store `vec`. Returns None when it was independent, otherwise the
        reduced combination (a relation among the inserted vectors).
        """
        vec, combo = self.reduce(vec, combo if combo is not None else {})
        if not vec:
            return combo
        pivot = min(vec)
        scale = vec[pivot].inv()
        self.rows[pivot] = {k: v * scale for k, v in vec.items()}
        self.combos[pivot] = {k: v * scale for k, v in combo.items()}
        return None

    def contains(self, vec: Vector) -> bool:
        reduced, _ = self.reduce(vec)
        return not reduced

    def reduced_rows(self) -> List[Vector]:
        """Fully reduced rows, sorted by pivot."""
        rows = {p: dict(v) for p, v in self.rows.items()}
        for p in sorted(rows, reverse=True):
            for q in rows:
                if q != p and p in rows[q]:
                    _axpy(rows[q], rows[q][p], rows[p])
        return [rows[p] for p in sorted(rows)]


def canonical_basis(vectors: Iterable[Vector]) -> List[Vector]:
    """Reduced row echelon basis of the span: leading 1, sorted by pivot."""
    echelon = Echelon()
    for vec in vectors:
        echelon.insert(vec)
    return echelon.reduced_rows()


def rank(vectors: Iterable[Vector]) -> int:
    echelon = Echelon()
    for vec in vectors:
        echelon.insert(vec)
    return len(echelon)


def in_span(vec: Vector, basis: Iterable[Vector]) -> bool:
    echelon = Echelon()
    for b in basis:
        echelon.insert(b)
    return echelon.contains(vec)


def kernel_of_columns(columns: Sequence[Vector]) -> List[Vector]:
    """
    Right kernel of the matrix whose j-th column is columns[j], as vectors keyed by
    column index, in canonical reduced form.
    """
    echelon = Echelon()
    relations = []
    for j, column in enumerate(columns):
        relation = echelon.insert(column, {j: ONE})
        if relation is not None:
            relations.append(relation)
    return canonical_basis(relations)


def dense(vec: Vector, n: int) -> Tuple[EisensteinRational, ...]:
    return tuple(vec.get(i, ZERO) for i in range(n))


def sparse(values: Sequence) -> Vector:
    out = {}
    for i, value in enumerate(values):
        value = value if isinstance(value, EisensteinRational) else EisensteinRational(value)
        if value:
            out[i] = value
    return out


def inverse(rows: Sequence[Sequence]) -> List[List[EisensteinRational]]:
    """Inverse of a square scalar matrix by Gauss-Jordan on [A | I]."""
    n = len(rows)
    augmented = []
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError("inverse of a non-square matrix")
        vec = sparse(row)
        vec.update({n + i: ONE})
        augmented.append(vec)
    reduced = canonical_basis(augmented)
    pivots = [min(r) for r in reduced]
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [[r.get(n + j, ZERO) for j in range(n)] for r in reduced]


class SectionSpace:
    """
    Finite-dimensional subspace of k^frame, kept as a canonical reduced basis.
    `cell` records the grading cell or truncation level the space belongs to.
    """
    def __init__(self, frame: Sequence, vectors: Iterable[Vector] = (), cell=None):
        self.frame = tuple(frame)
        self.basis = canonical_basis(vectors)
        self.cell = cell

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def __contains__(self, vec: Vector) -> bool:
        return in_span(vec, self.basis)

    def __le__(self, other: "SectionSpace") -> bool:
        return all(vec in other for vec in self.basis)

    def __eq__(self, other):
        if not isinstance(other, SectionSpace):
            return NotImplemented
        return self.frame == other.frame and self.basis == other.basis

    def intersection(self, other: "SectionSpace", cell=None) -> "SectionSpace":
        if self.frame != other.frame:
            raise ValueError("intersection of spaces over different frames")
        columns = list(self.basis) + [{k: -v for k, v in w.items()} for w in other.basis]
        vectors = []
        for relation in kernel_of_columns(columns):
            vec: Vector = {}
            for j, coeff in relation.items():
                if j < len(self.basis):
                    _axpy(vec, -coeff, self.basis[j])
            vectors.append(vec)
        return SectionSpace(self.frame, vectors, cell)

    def vectors(self) -> List[Vector]:
        return [dict(v) for v in self.basis]

    def __repr__(self):
        return f"SectionSpace(dim={self.dim}, cell={self.cell})"
