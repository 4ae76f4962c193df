"""Classical product-matrix MSR code at d = 2(k-1), in the symmetric-
matrix and skew-matrix variants.

This is an independent cross-check oracle for the t = 2 flavor of the
tensor construction: download follows the pairwise decoupling argument
(2x2 solves, then span completion row by row), repair the stacked d x d
helper solve.  Nothing here touches the tensor machinery.

File packers map M = k(k-1) raw symbols to and from the free entries:
row-major upper triangle including the diagonal for symmetric matrices,
row-major strict upper triangle for the skew pair (zero diagonal, the
lower triangle mirrors with a sign).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AxiomViolationError, UsageError
from .fields import FieldElement, FieldSpec
from .linalg import Matrix, Vector, invert


@dataclass(frozen=True)
class SymmetricFile:
    """Two symmetric (k-1) x (k-1) matrices carrying the file."""

    s1: Matrix
    s2: Matrix

    def __post_init__(self):
        for m in (self.s1, self.s2):
            if m.nrows != m.ncols or m.rows != m.transpose().rows:
                raise UsageError("file matrices must be square and symmetric")
        if self.s1.nrows != self.s2.nrows or self.s1.spec != self.s2.spec:
            raise UsageError("file matrices must match in size and field")

    @property
    def spec(self) -> FieldSpec:
        return self.s1.spec


@dataclass(frozen=True)
class SkewFile:
    """Two k x k zero-diagonal skew matrices: w A w^T = 0 for every w."""

    a1: Matrix
    a2: Matrix

    def __post_init__(self):
        for m in (self.a1, self.a2):
            if m.nrows != m.ncols:
                raise UsageError("file matrices must be square")
            spec = m.spec
            for i in range(m.nrows):
                if m.rows[i][i] != 0:
                    raise UsageError("skew file matrices need zero diagonal")
                for j in range(i + 1, m.ncols):
                    if m.rows[j][i] != spec.neg(m.rows[i][j]):
                        raise UsageError("skew file matrices must be antisymmetric")
        if self.a1.nrows != self.a2.nrows or self.a1.spec != self.a2.spec:
            raise UsageError("file matrices must match in size and field")

    @property
    def spec(self) -> FieldSpec:
        return self.a1.spec


def pack_symmetric(spec: FieldSpec, k: int, raw) -> SymmetricFile:
    """M = k(k-1) raw symbols -> (S1, S2), upper triangles row-major."""
    values = _raw_values(spec, raw, k * (k - 1))
    half = k * (k - 1) // 2
    return SymmetricFile(_sym_from_triangle(spec, k - 1, values[:half]),
                         _sym_from_triangle(spec, k - 1, values[half:]))


def unpack_symmetric(file: SymmetricFile) -> list[int]:
    return _sym_triangle(file.s1) + _sym_triangle(file.s2)


def pack_skew(spec: FieldSpec, k: int, raw) -> SkewFile:
    values = _raw_values(spec, raw, k * (k - 1))
    half = k * (k - 1) // 2
    return SkewFile(_skew_from_triangle(spec, k, values[:half]),
                    _skew_from_triangle(spec, k, values[half:]))


def unpack_skew(file: SkewFile) -> list[int]:
    return _skew_triangle(file.a1) + _skew_triangle(file.a2)


def _raw_values(spec, raw, expected):
    if isinstance(raw, Vector):
        values = raw.values
    else:
        values = [x.value if isinstance(x, FieldElement) else spec.check_value(x)
                  for x in raw]
    if len(values) != expected:
        raise UsageError(f"expected {expected} raw symbols, got {len(values)}")
    return values


def _sym_from_triangle(spec, size, tri):
    it = iter(tri)
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            v = next(it)
            rows[i][j] = v
            rows[j][i] = v
    return Matrix(spec, rows)


def _sym_triangle(m: Matrix) -> list[int]:
    return [m.rows[i][j] for i in range(m.nrows) for j in range(i, m.ncols)]


def _skew_from_triangle(spec, size, tri):
    it = iter(tri)
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            v = next(it)
            rows[i][j] = v
            rows[j][i] = spec.neg(v)
    return Matrix(spec, rows)


def _skew_triangle(m: Matrix) -> list[int]:
    return [m.rows[i][j] for i in range(m.nrows) for j in range(i + 1, m.ncols)]


def pm_node(file: SymmetricFile, xi, y: Vector) -> Vector:
    """Node content y S1 + xi y S2."""
    xi = _scalar(file.spec, xi)
    r1 = file.s1.transpose().matvec(y)
    r2 = file.s2.transpose().matvec(y)
    return r1 + r2.scale(xi)


def pm_help(file: SymmetricFile, xi_h, y_h: Vector, y_f: Vector) -> FieldElement:
    """The single scalar a helper sends: its content dotted with y_f."""
    return pm_node(file, xi_h, y_h).dot(y_f)


def pm_download(node_vectors: list[Vector], xis: list, ys: list[Vector]) -> SymmetricFile:
    """Recover (S1, S2) from k node vectors by pairwise decoupling.

    For each pair (i, j), the two cross evaluations decouple through
    [[1, xi_i], [1, xi_j]] into the S1 and S2 bilinear values; rows
    y_i S1 and y_i S2 then come from a spanning subset of the others,
    and the matrices from a spanning subset of rows.
    """
    spec = node_vectors[0].spec
    k = len(node_vectors)
    size = k - 1
    xis = [_scalar(spec, x) for x in xis]
    if len(set(xis)) != k:
        raise AxiomViolationError("pm-decoupling", subset=range(k),
                                  message="repeated xi makes decoupling singular")
    s1_vals = [[None] * k for _ in range(k)]
    s2_vals = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            c_ij = node_vectors[i].dot(ys[j]).value
            c_ji = node_vectors[j].dot(ys[i]).value
            dec = invert(Matrix(spec, [[1, xis[i]], [1, xis[j]]]))
            pq = dec.matvec(Vector(spec, [c_ij, c_ji]))
            s1_vals[i][j] = s1_vals[j][i] = pq.values[0]
            s2_vals[i][j] = s2_vals[j][i] = pq.values[1]

    def recover_rows(vals):
        # y_i S = solution of (stacked y_j) x = evaluations, j != i
        rows = []
        for i in range(k):
            others = [j for j in range(k) if j != i][:size]
            A = Matrix(spec, [ys[j].values for j in others])
            Ainv = invert(A)
            if Ainv is None:
                raise AxiomViolationError("pm-span", subset=others)
            rows.append(Ainv.matvec(Vector(spec, [vals[i][j] for j in others])))
        return rows

    def assemble(rows):
        # S from y_i S = rows[i], using the first k-1 equations
        A = Matrix(spec, [ys[i].values for i in range(size)])
        Ainv = invert(A)
        if Ainv is None:
            raise AxiomViolationError("pm-span", subset=range(size))
        R = Matrix(spec, [rows[i].values for i in range(size)])
        return Ainv.matmul(R)

    return SymmetricFile(assemble(recover_rows(s1_vals)),
                         assemble(recover_rows(s2_vals)))


def pm_repair(messages: list, helper_xis: list, helper_ys: list[Vector],
              xi_f, y_f: Vector) -> Vector:
    """Rebuild y_f S1 + xi_f y_f S2 from d = 2(k-1) helper scalars."""
    spec = y_f.spec
    d = len(messages)
    size = len(y_f)
    if d != 2 * size:
        raise UsageError(f"repair needs d = {2 * size} messages, got {d}")
    xis = [_scalar(spec, x) for x in helper_xis]
    rows = [helper_ys[i].values + helper_ys[i].scale(xis[i]).values for i in range(d)]
    A = Matrix(spec, rows)
    Ainv = invert(A)
    if Ainv is None:
        raise AxiomViolationError("pm-repair-span", subset=range(d))
    stacked = Ainv.matvec(Vector(spec, [_scalar(spec, m) for m in messages]))
    s1yf = Vector(spec, stacked.values[:size])
    s2yf = Vector(spec, stacked.values[size:])
    return s1yf + s2yf.scale(_scalar(spec, xi_f))


def skew_node(file: SkewFile, xi, w: Vector) -> Vector:
    """Node content w A1 + xi w A2; always orthogonal to w itself."""
    xi = _scalar(file.spec, xi)
    r1 = file.a1.transpose().matvec(w)
    r2 = file.a2.transpose().matvec(w)
    return r1 + r2.scale(xi)


def skew_store(content: Vector, w: Vector) -> list[FieldElement]:
    """Drop the coordinate recoverable from content . w = 0: k-1 symbols."""
    i = _anchor(w)
    return [content[j] for j in range(len(content)) if j != i]


def skew_restore(spec: FieldSpec, stored: list, w: Vector) -> Vector:
    """Reinsert the dropped coordinate using orthogonality to w."""
    i = _anchor(w)
    values = [x.value if isinstance(x, FieldElement) else spec.check_value(x)
              for x in stored]
    if len(values) != len(w) - 1:
        raise UsageError("stored vector has wrong length")
    full = values[:i] + [0] + values[i:]
    acc = 0
    for j, v in enumerate(full):
        if j != i:
            acc = spec.add(acc, spec.mul(v, w.values[j]))
    full[i] = spec.mul(spec.neg(acc), spec.inv(w.values[i]))
    return Vector(spec, full)


def _anchor(w: Vector) -> int:
    for i, v in enumerate(w.values):
        if v:
            return i
    raise UsageError("star vector w must be nonzero")


def skew_help(file: SkewFile, xi_h, w_h: Vector, w_f: Vector) -> FieldElement:
    return skew_node(file, xi_h, w_h).dot(w_f)


def skew_download(node_vectors: list[Vector], xis: list, ws: list[Vector]) -> SkewFile:
    """Recover (A1, A2) from k node vectors; mirrors the symmetric oracle
    with the sign-flipped decoupling and the free zero diagonal."""
    spec = node_vectors[0].spec
    k = len(node_vectors)
    xis = [_scalar(spec, x) for x in xis]
    if len(set(xis)) != k:
        raise AxiomViolationError("pm-decoupling", subset=range(k),
                                  message="repeated xi makes decoupling singular")
    a1_vals = [[0] * k for _ in range(k)]
    a2_vals = [[0] * k for _ in range(k)]
    neg = spec.neg
    for i in range(k):
        for j in range(i + 1, k):
            c_ij = node_vectors[i].dot(ws[j]).value
            c_ji = node_vectors[j].dot(ws[i]).value
            dec = invert(Matrix(spec, [[1, xis[i]], [neg(1), neg(xis[j])]]))
            pq = dec.matvec(Vector(spec, [c_ij, c_ji]))
            a1_vals[i][j], a2_vals[i][j] = pq.values[0], pq.values[1]
            a1_vals[j][i], a2_vals[j][i] = neg(pq.values[0]), neg(pq.values[1])

    def recover(vals):
        # w_i A . w_j known for all j (including j = i, which is 0)
        W = Matrix(spec, [w.values for w in ws])
        Winv = invert(W)
        if Winv is None:
            raise AxiomViolationError("pm-span", subset=range(k))
        rows = []
        for i in range(k):
            # W (w_i A)^T = vals[i] as a column
            rows.append(Winv.matvec(Vector(spec, vals[i])).values)
        # rows[i] = w_i A; solve W A = rows for A
        return Winv.matmul(Matrix(spec, rows))

    return SkewFile(recover(a1_vals), recover(a2_vals))


def skew_repair(messages: list, helper_xis: list, helper_ws: list[Vector],
                xi_f, w_f: Vector) -> Vector:
    """Rebuild w_f A1 + xi_f w_f A2 from d helper scalars plus the two
    known-zero equations contributed by w_f itself."""
    spec = w_f.spec
    k = len(w_f)
    d = len(messages)
    if d != 2 * (k - 1):
        raise UsageError(f"repair needs d = {2 * (k - 1)} messages, got {d}")
    xis = [_scalar(spec, x) for x in helper_xis]
    rows = [helper_ws[i].values + helper_ws[i].scale(xis[i]).values for i in range(d)]
    rows.append(w_f.values + [0] * k)
    rows.append([0] * k + w_f.values)
    rhs = [_scalar(spec, m) for m in messages] + [0, 0]
    A = Matrix(spec, rows)
    Ainv = invert(A)
    if Ainv is None:
        raise AxiomViolationError("pm-repair-span", subset=range(d), failed_node=None)
    stacked = Ainv.matvec(Vector(spec, rhs))
    # stacked = [A1 w_f^T ; A2 w_f^T]; w_f A = -(A w_f^T)^T for skew A
    a1wf = Vector(spec, [spec.neg(v) for v in stacked.values[:k]])
    a2wf = Vector(spec, [spec.neg(v) for v in stacked.values[k:]])
    return a1wf + a2wf.scale(_scalar(spec, xi_f))


def _scalar(spec: FieldSpec, x) -> int:
    if isinstance(x, FieldElement):
        if x.spec != spec:
            raise UsageError("field mismatch")
        return x.value
    return spec.check_value(x)
