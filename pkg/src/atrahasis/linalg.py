"""Dense exact linear algebra over a FieldSpec.

Vectors and matrices store canonical integer values internally; the
`coords` / `elements` accessors expose FieldElement views.  Everything
here is plain Gaussian elimination with first-nonzero pivoting --
arithmetic is exact, so no pivot strategy beyond "nonzero" is needed.
All values are immutable after construction; elimination works on
private copies.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import NoSolutionError, UsageError
from .fields import FieldElement, FieldSpec


def _int_values(spec: FieldSpec, items) -> list[int]:
    out = []
    for x in items:
        if isinstance(x, FieldElement):
            if x.spec != spec:
                raise UsageError(f"field mismatch: {spec} vs {x.spec}")
            out.append(x.value)
        else:
            out.append(spec.check_value(x))
    return out


class Vector:
    """Coordinate vector over a field; entries share one FieldSpec."""

    __slots__ = ("spec", "values")

    def __init__(self, spec: FieldSpec, values):
        self.spec = spec
        self.values = _int_values(spec, values)

    @property
    def coords(self) -> list[FieldElement]:
        return [FieldElement(self.spec, v) for v in self.values]

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i) -> FieldElement:
        return FieldElement(self.spec, self.values[i])

    def __add__(self, other: Vector) -> Vector:
        self._check(other)
        add = self.spec.add
        return Vector(self.spec, [add(a, b) for a, b in zip(self.values, other.values)])

    def __sub__(self, other: Vector) -> Vector:
        self._check(other)
        sub = self.spec.sub
        return Vector(self.spec, [sub(a, b) for a, b in zip(self.values, other.values)])

    def scale(self, c) -> Vector:
        c = _int_values(self.spec, [c])[0]
        mul = self.spec.mul
        return Vector(self.spec, [mul(c, v) for v in self.values])

    def dot(self, other: Vector) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec, dot_ints(self.spec, self.values, other.values))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def _check(self, other: Vector):
        if other.spec != self.spec or len(other) != len(self):
            raise UsageError("vectors must share field and length")

    def __eq__(self, other):
        return (isinstance(other, Vector) and other.spec == self.spec
                and other.values == self.values)

    def __hash__(self):
        return hash((self.spec, tuple(self.values)))

    def __repr__(self):
        return f"Vector({self.values})"


def dot_ints(spec: FieldSpec, a: list[int], b: list[int]) -> int:
    mul = spec.mul
    add = spec.add
    acc = 0
    for x, y in zip(a, b):
        if x and y:
            acc = add(acc, mul(x, y))
    return acc


def unit_vector(spec: FieldSpec, n: int, i: int) -> Vector:
    values = [0] * n
    values[i] = 1
    return Vector(spec, values)


class Matrix:
    """Row-major dense matrix over a field."""

    __slots__ = ("spec", "nrows", "ncols", "rows")

    def __init__(self, spec: FieldSpec, rows):
        self.spec = spec
        self.rows = [_int_values(spec, r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise UsageError("ragged matrix rows")

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> Matrix:
        return cls(spec, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, spec: FieldSpec, nrows: int, ncols: int) -> Matrix:
        return cls(spec, [[0] * ncols for _ in range(nrows)])

    @property
    def entries(self) -> list[list[FieldElement]]:
        return [[FieldElement(self.spec, v) for v in row] for row in self.rows]

    def row(self, i) -> Vector:
        return Vector(self.spec, self.rows[i])

    def transpose(self) -> Matrix:
        return Matrix(self.spec, [[self.rows[i][j] for i in range(self.nrows)]
                                  for j in range(self.ncols)])

    def matvec(self, v: Vector) -> Vector:
        if v.spec != self.spec or len(v) != self.ncols:
            raise UsageError("dimension mismatch in matvec")
        return Vector(self.spec, [dot_ints(self.spec, row, v.values) for row in self.rows])

    def matmul(self, other: Matrix) -> Matrix:
        if other.spec != self.spec or other.nrows != self.ncols:
            raise UsageError("dimension mismatch in matmul")
        cols = other.transpose().rows
        return Matrix(self.spec, [[dot_ints(self.spec, row, col) for col in cols]
                                  for row in self.rows])

    def __eq__(self, other):
        return (isinstance(other, Matrix) and other.spec == self.spec
                and other.rows == self.rows)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over {self.spec})"


def _eliminate(spec: FieldSpec, rows: list[list[int]]):
    """Row-reduce in place to reduced row echelon form.

    Returns (pivot_columns, row_origins) where row_origins[i] is the
    input index of the row now sitting at position i.
    """
    mul, sub, inv = spec.mul, spec.sub, spec.inv
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    origins = list(range(nrows))
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        origins[r], origins[pr] = origins[pr], origins[r]
        piv = inv(rows[r][c])
        if piv != 1:
            rows[r] = [mul(piv, v) for v in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                row_i = rows[i]
                rows[i] = [sub(a, mul(f, b)) for a, b in zip(row_i, prow)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots, origins


def rank(matrix: Matrix) -> int:
    rows = [row[:] for row in matrix.rows]
    pivots, _ = _eliminate(matrix.spec, rows)
    return len(pivots)


def rank_of_rows(spec: FieldSpec, int_rows: list[list[int]]) -> int:
    if not int_rows:
        return 0
    rows = [row[:] for row in int_rows]
    pivots, _ = _eliminate(spec, rows)
    return len(pivots)


def det(matrix: Matrix) -> FieldElement:
    if matrix.nrows != matrix.ncols:
        raise UsageError("determinant needs a square matrix")
    spec = matrix.spec
    mul, sub, inv = spec.mul, spec.sub, spec.inv
    n = matrix.nrows
    rows = [row[:] for row in matrix.rows]
    acc = 1
    sign_flip = False
    for c in range(n):
        pr = None
        for i in range(c, n):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            return FieldElement(spec, 0)
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            sign_flip = not sign_flip
        acc = mul(acc, rows[c][c])
        piv = inv(rows[c][c])
        for i in range(c + 1, n):
            if rows[i][c]:
                f = mul(rows[i][c], piv)
                rows[i] = [sub(a, mul(f, b)) for a, b in zip(rows[i], rows[c])]
    if sign_flip:
        acc = spec.neg(acc)
    return FieldElement(spec, acc)


class Solution(NamedTuple):
    x: Vector
    unique: bool


def solve(A: Matrix, b: Vector) -> Solution:
    """Solve A x = b exactly.

    Returns any solution (free variables set to 0) plus a uniqueness
    flag.  Raises NoSolutionError carrying the index of an input row
    whose equation cannot be met.
    """
    if b.spec != A.spec or len(b) != A.nrows:
        raise UsageError("right-hand side does not match matrix")
    spec = A.spec
    aug = [row + [bv] for row, bv in zip(A.rows, b.values)]
    pivots, origins = _eliminate(spec, aug)
    n = A.ncols
    if pivots and pivots[-1] == n:
        # pivot in the augmented column: contradiction 0 = nonzero
        raise NoSolutionError(origins[len(pivots) - 1])
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return Solution(Vector(spec, x), len(pivots) == n)


def invert(A: Matrix) -> Matrix | None:
    """Inverse of a square matrix, or None when singular."""
    if A.nrows != A.ncols:
        raise UsageError("inverse needs a square matrix")
    n = A.nrows
    aug = [row + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(A.rows)]
    pivots, _ = _eliminate(A.spec, aug)
    if len(pivots) != n or pivots != list(range(n)):
        return None
    return Matrix(A.spec, [row[n:] for row in aug])


def nullspace_with_free(A: Matrix) -> tuple[list[Vector], list[int]]:
    """Canonical kernel basis from the reduced echelon form, plus the
    free columns it is systematic in.

    The basis vector paired with free column f has a 1 at f and zeros at
    every other free column, so coordinates in this basis can be read
    off any kernel vector at the free positions.
    """
    spec = A.spec
    rows = [row[:] for row in A.rows]
    pivots, _ = _eliminate(spec, rows)
    pivot_set = set(pivots)
    free = [c for c in range(A.ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [0] * A.ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = spec.neg(rows[i][f])
        basis.append(Vector(spec, v))
    return basis, free


def nullspace_basis(A: Matrix) -> list[Vector]:
    return nullspace_with_free(A)[0]


class SpanSolver:
    """Repeated membership queries against the span of fixed generators.

    Row-reduces the generator stack once, remembering the combination of
    input generators behind each reduced row; each query is then a single
    back-substitution.
    """

    def __init__(self, spec: FieldSpec, generators: list[list[int]], width: int):
        self.spec = spec
        self.ngens = len(generators)
        self.width = width
        aug = [list(g) + [1 if i == j else 0 for j in range(self.ngens)]
               for i, g in enumerate(generators)]
        for g in generators:
            if len(g) != width:
                raise UsageError("generator length mismatch")
        if aug:
            # eliminate on the generator columns only
            self._rows, self._pivots = self._reduce(aug, width)
        else:
            self._rows, self._pivots = [], []

    def _reduce(self, aug, width):
        spec = self.spec
        mul, sub, inv = spec.mul, spec.sub, spec.inv
        nrows = len(aug)
        r = 0
        pivots = []
        for c in range(width):
            pr = None
            for i in range(r, nrows):
                if aug[i][c]:
                    pr = i
                    break
            if pr is None:
                continue
            aug[r], aug[pr] = aug[pr], aug[r]
            piv = inv(aug[r][c])
            if piv != 1:
                aug[r] = [mul(piv, v) for v in aug[r]]
            prow = aug[r]
            for i in range(nrows):
                if i != r and aug[i][c]:
                    f = aug[i][c]
                    aug[i] = [sub(a, mul(f, b)) for a, b in zip(aug[i], prow)]
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        return aug[:len(pivots)], pivots

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def coefficients_for(self, target: list[int]) -> list[int] | None:
        """Coefficients over the generators, or None if out of span."""
        if len(target) != self.width:
            raise UsageError("target length mismatch")
        spec = self.spec
        mul, sub = spec.mul, spec.sub
        residual = list(target)
        coeffs = [0] * self.ngens
        for row, c in zip(self._rows, self._pivots):
            f = residual[c]
            if f:
                residual = [sub(a, mul(f, b)) for a, b in zip(residual, row[:self.width])]
                for j in range(self.ngens):
                    if row[self.width + j]:
                        coeffs[j] = spec.add(coeffs[j], mul(f, row[self.width + j]))
        if any(residual):
            return None
        return coeffs


def in_span(target: Vector, generators: list[Vector]) -> list[FieldElement] | None:
    """Coefficients c with sum(c_i * generators_i) = target, else None."""
    spec = target.spec
    for g in generators:
        if g.spec != spec or len(g) != len(target):
            raise UsageError("generators must share field and length with target")
    solver = SpanSolver(spec, [g.values for g in generators], len(target))
    coeffs = solver.coefficients_for(target.values)
    if coeffs is None:
        return None
    return [FieldElement(spec, c) for c in coeffs]
