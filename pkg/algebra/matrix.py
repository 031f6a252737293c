from typing import List, Mapping, Sequence, Tuple

from algebra.linear import kernel_of_columns, dense
from algebra.polyring import MultiPoly, VarTable, TableMismatchError
from algebra.scalars import EisensteinRational


class PolyMatrix:
    """
    Dense matrix of MultiPoly entries over one VarTable.
    """
    def __init__(self, table: VarTable, rows: Sequence[Sequence]):
        self.table = table
        self.rows: List[List[MultiPoly]] = []
        width = None
        for row in rows:
            row = [self._entry(x) for x in row]
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError("rows of a PolyMatrix must have equal length")
            self.rows.append(row)
        self.nrows = len(self.rows)
        self.ncols = width or 0

    def _entry(self, x):
        if isinstance(x, MultiPoly):
            if x.table != self.table:
                raise TableMismatchError(f"entry over {x.table} in a matrix over {self.table}")
            return x
        return MultiPoly.constant(self.table, x)

    @classmethod
    def zeros(cls, table, nrows, ncols):
        return cls(table, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, table, n):
        return cls(table, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def column(self, j) -> List[MultiPoly]:
        return [row[j] for row in self.rows]

    def map(self, fn):
        return PolyMatrix(self.table, [[fn(x) for x in row] for row in self.rows])

    def _check_shape(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return other

    def __add__(self, other):
        other = self._check_shape(other)
        if other is NotImplemented:
            return NotImplemented
        return PolyMatrix(self.table, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        other = self._check_shape(other)
        if other is NotImplemented:
            return NotImplemented
        return PolyMatrix(self.table, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, factor):
        return self.map(lambda x: x * factor)

    def __matmul__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        columns = [other.column(j) for j in range(other.ncols)]
        out = []
        for row in self.rows:
            out_row = []
            for col in columns:
                acc = MultiPoly(self.table)
                for a, b in zip(row, col):
                    if a and b:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return PolyMatrix(self.table, out)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.rows for x in row)

    def nonzero_entries(self):
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                if x:
                    yield i, j, x

    def evaluate(self, assignment: Mapping[str, object]):
        return self.map(lambda x: x.evaluate(assignment))

    def is_constant(self) -> bool:
        return all(x.is_constant() for row in self.rows for x in row)

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows) + "]"


def kernel_over_field(M: PolyMatrix) -> List[Tuple[EisensteinRational, ...]]:
    """
    Basis of the right null space of a constant matrix, first nonzero coordinate 1,
    sorted by pivot position.
    """
    if not M.is_constant():
        raise ValueError("kernel_over_field needs constant entries")
    columns = []
    for j in range(M.ncols):
        columns.append({i: x.constant_coefficient() for i, x in enumerate(M.column(j)) if x})
    return [dense(v, M.ncols) for v in kernel_of_columns(columns)]


def _pivot_key(p: MultiPoly, i: int, j: int):
    return (p.degree(), len(p.terms), i, j)


def rank_over_fraction_field(M: PolyMatrix) -> int:
    """
    Rank over the fraction field of the coefficient ring, by Bareiss elimination with
    full pivoting. Each update divides exactly by the previous pivot.
    """
    a = [list(row) for row in M.rows]
    n, m = M.shape
    prev = M.table.one()
    rank = 0
    for k in range(min(n, m)):
        candidates = [_pivot_key(a[i][j], i, j) for i in range(k, n) for j in range(k, m) if a[i][j]]
        if not candidates:
            break
        _, _, pi, pj = min(candidates)
        a[k], a[pi] = a[pi], a[k]
        for row in a:
            row[k], row[pj] = row[pj], row[k]
        pivot = a[k][k]
        for i in range(k + 1, n):
            lead = a[i][k]
            for j in range(k + 1, m):
                if lead:
                    value = pivot * a[i][j] - lead * a[k][j]
                else:
                    value = pivot * a[i][j]
                a[i][j] = value.exact_div(prev) if value else value
            a[i][k] = MultiPoly(M.table)
        prev = pivot
        rank += 1
    return rank


def determinant(M: PolyMatrix) -> MultiPoly:
    """Determinant by Bareiss elimination with row pivoting."""
    n, m = M.shape
    if n != m:
        raise ValueError(f"determinant of a non-square {M.shape} matrix")
    if n == 0:
        return M.table.one()
    a = [list(row) for row in M.rows]
    prev = M.table.one()
    sign = 1
    for k in range(n - 1):
        candidates = [_pivot_key(a[i][k], i, k) for i in range(k, n) if a[i][k]]
        if not candidates:
            return MultiPoly(M.table)
        _, _, pi, _ = min(candidates)
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            lead = a[i][k]
            for j in range(k + 1, n):
                value = pivot * a[i][j] - lead * a[k][j] if lead else pivot * a[i][j]
                a[i][j] = value.exact_div(prev) if value else value
        prev = pivot
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def jacobian(polys: Sequence[MultiPoly], names: Sequence[str]) -> PolyMatrix:
    if not polys:
        raise ValueError("jacobian of an empty system")
    table = polys[0].table
    for name in names:
        table.index(name)
    return PolyMatrix(table, [[p.derivative(name) for name in names] for p in polys])

