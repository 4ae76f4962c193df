"""The general multilinear MSR code, in symmetric-power and
exterior-power flavors.

A code instance is a StarFamily: per-node star vectors (x_h, y_h) over
F^t x F^(k-t+1) in the symmetric flavor, or (x_h, w_h) over F^t x F^k in
the exterior flavor.  The file is a linear functional on the product of
F^t with the degree-t symmetric (resp. exterior) power, held as its
coordinates against the canonical monomial basis.  Node contents and
help messages are evaluations of that functional at canonical basis
tensors of the node's / message's subspace.

Everything here is a pure function of immutable inputs; node_content,
help_message and repair for distinct nodes may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import (AxiomViolationError, FieldTooSmallError,
                     InfeasibleParametersError, UsageError)
from .fields import FieldElement, FieldSpec
from .linalg import Matrix, SpanSolver, Vector, dot_ints, invert, rank_of_rows
from .tensors import (ExtBasis, SymBasis, ext_tensor_rows, rank_filter,
                      sym_tensor_rows, unit_vectors)

SYMMETRIC = "symmetric"
EXTERIOR = "exterior"


@dataclass(frozen=True)
class CodeParams:
    """The parameter tuple (n, k, d, t, alpha, beta, M) plus flavor.

    The defining ratios are locked together: t = d/(d-k+1) is integral,
    alpha = C(k-1, t-1), beta = alpha/(d-k+1), M = k*alpha.  Equivalent
    restatements (the vanishing 2x2 minors of the rate table, and the
    sub-packetization bounds alpha <= 2^(k-1) and (k-1)^(t-1)) are
    asserted at construction.
    """

    n: int
    k: int
    d: int
    t: int
    alpha: int
    beta: int
    M: int
    flavor: str

    def __post_init__(self):
        n, k, d, t = self.n, self.k, self.d, self.t
        if self.flavor not in (SYMMETRIC, EXTERIOR):
            raise UsageError(f"unknown flavor {self.flavor!r}")
        if not (n - 1 >= d >= k >= 2):
            raise InfeasibleParametersError(
                f"need n-1 >= d >= k >= 2, got (n,k,d)=({n},{k},{d})")
        r = d - k + 1
        if t * r != d:
            raise InfeasibleParametersError(f"t={t} is not d/(d-k+1) for (k,d)=({k},{d})")
        if (t - 1) * r != k - 1:
            raise InfeasibleParametersError("rank-one parameter consistency broken")
        if self.alpha != comb(k - 1, t - 1):
            raise InfeasibleParametersError(f"alpha must be C({k - 1},{t - 1})")
        if self.beta * r != self.alpha or self.beta != comb(k - 2, t - 2):
            raise InfeasibleParametersError("beta must be alpha/(d-k+1) = C(k-2,t-2)")
        if self.M != k * self.alpha:
            raise InfeasibleParametersError("M must be k*alpha")
        if self.t * self.alpha != d * self.beta:
            raise InfeasibleParametersError("t*alpha must equal d*beta")
        if self.alpha > 2 ** (k - 1) or self.alpha > (k - 1) ** (t - 1):
            raise InfeasibleParametersError("sub-packetization bound violated")

    @property
    def y_dim(self) -> int:
        """Dimension of the second star space: k-t+1 (symmetric) or k (exterior)."""
        return self.k - self.t + 1 if self.flavor == SYMMETRIC else self.k


def derive_params(n: int, k: int, d: int, flavor: str = SYMMETRIC) -> CodeParams:
    """Parameters for the primitive construction at (n, k, d).

    Raises InfeasibleParametersError when t = d/(d-k+1) is not an
    integer; such gaps are filled by shortening a larger code instead.
    """
    if not (n - 1 >= d >= k >= 2):
        raise InfeasibleParametersError(
            f"need n-1 >= d >= k >= 2, got (n,k,d)=({n},{k},{d})")
    r = d - k + 1
    if d % r != 0:
        raise InfeasibleParametersError(
            f"t = {d}/{r} is not an integer for (n,k,d)=({n},{k},{d}); "
            f"shorten a larger primitive code instead")
    t = d // r
    alpha = comb(k - 1, t - 1)
    beta = comb(k - 2, t - 2)
    return CodeParams(n=n, k=k, d=d, t=t, alpha=alpha, beta=beta,
                      M=k * alpha, flavor=flavor)


class StarFamily:
    """Per-node star vectors for a code instance.

    x_stars[h] lives in F^t; second_stars[h] in F^(k-t+1) (symmetric
    flavor, the y vectors) or F^k (exterior flavor, the w vectors, all
    nonzero).  The family is immutable; expansion caches are private.
    """

    def __init__(self, spec: FieldSpec, params: CodeParams,
                 x_stars: list[Vector], second_stars: list[Vector]):
        if len(x_stars) != params.n or len(second_stars) != params.n:
            raise UsageError(f"need exactly {params.n} star vector pairs")
        for x in x_stars:
            if x.spec != spec or len(x) != params.t:
                raise UsageError("x star vectors must have length t over the code field")
        for s in second_stars:
            if s.spec != spec or len(s) != params.y_dim:
                raise UsageError(
                    f"second star vectors must have length {params.y_dim}")
        if params.flavor == EXTERIOR and any(s.is_zero() for s in second_stars):
            raise UsageError("exterior flavor forbids zero w star vectors")
        self.spec = spec
        self.params = params
        self.x_stars = list(x_stars)
        self.second_stars = list(second_stars)
        p = params
        if p.flavor == SYMMETRIC:
            self._node_sub = SymBasis(p.y_dim, p.t - 1)
            self._msg_sub = SymBasis(p.y_dim, p.t - 2)
            self._ambient_inner = SymBasis(p.y_dim, p.t)
            self._axiom_inner = SymBasis(p.y_dim, p.t - 1)
        else:
            self._node_sub = ExtBasis(p.k, p.t - 1)
            self._msg_sub = ExtBasis(p.k, p.t - 2)
            self._ambient_inner = ExtBasis(p.k, p.t)
            self._axiom_inner = ExtBasis(p.k, p.t - 1)
        self._node_rows_cache: dict = {}
        self._msg_rows_cache: dict = {}
        self._axiom_rows_cache: dict = {}

    def _check_node(self, h: int) -> int:
        if not 0 <= h < self.params.n:
            raise UsageError(f"node index {h} out of range 0..{self.params.n - 1}")
        return h

    def node_tensor_rows(self, h: int) -> list[list[int]]:
        """The alpha basis tensors of node h's subspace, in ambient coordinates."""
        h = self._check_node(h)
        rows = self._node_rows_cache.get(h)
        if rows is None:
            p = self.params
            x, s = self.x_stars[h], self.second_stars[h]
            if p.flavor == SYMMETRIC:
                rows = sym_tensor_rows(
                    self.spec, x,
                    [[s] + unit_vectors(self.spec, p.y_dim, mono)
                     for mono in self._node_sub.index],
                    self._ambient_inner)
            else:
                raw = ext_tensor_rows(
                    self.spec, x,
                    [[s] + unit_vectors(self.spec, p.k, mono)
                     for mono in self._node_sub.index],
                    self._ambient_inner)
                rows, _ = rank_filter(self.spec, raw, limit=p.alpha)
            if len(rows) != p.alpha:
                raise AxiomViolationError(
                    "node-subspace-dimension", subset=(h,),
                    message=f"node {h} stores {len(rows)} independent symbols, "
                            f"expected alpha={p.alpha}")
            self._node_rows_cache[h] = rows
        return rows

    def message_tensor_rows(self, h: int, f: int) -> list[list[int]]:
        """The beta basis tensors of the (h -> f) help-message subspace."""
        h = self._check_node(h)
        f = self._check_node(f)
        if h == f:
            raise UsageError("a node does not help itself")
        key = (h, f)
        rows = self._msg_rows_cache.get(key)
        if rows is None:
            p = self.params
            x, s = self.x_stars[h], self.second_stars[h]
            target = self.second_stars[f]
            if p.flavor == SYMMETRIC:
                rows = sym_tensor_rows(
                    self.spec, x,
                    [[s] + unit_vectors(self.spec, p.y_dim, mono) + [target]
                     for mono in self._msg_sub.index],
                    self._ambient_inner)
            else:
                raw = ext_tensor_rows(
                    self.spec, x,
                    [[s] + unit_vectors(self.spec, p.k, mono) + [target]
                     for mono in self._msg_sub.index],
                    self._ambient_inner)
                rows, _ = rank_filter(self.spec, raw, limit=p.beta)
            if len(rows) != p.beta:
                raise AxiomViolationError(
                    "message-subspace-dimension", subset=(h,), failed_node=f,
                    message=f"help message {h}->{f} has {len(rows)} independent "
                            f"symbols, expected beta={p.beta}")
            self._msg_rows_cache[key] = rows
        return rows

    def axiom_tensor_rows(self, h: int) -> list[list[int]]:
        """Node h's contribution to the repair-span axiom, one degree down."""
        h = self._check_node(h)
        rows = self._axiom_rows_cache.get(h)
        if rows is None:
            p = self.params
            x, s = self.x_stars[h], self.second_stars[h]
            if p.flavor == SYMMETRIC:
                rows = sym_tensor_rows(
                    self.spec, x,
                    [[s] + unit_vectors(self.spec, p.y_dim, mono)
                     for mono in self._msg_sub.index],
                    self._axiom_inner)
            else:
                rows = ext_tensor_rows(
                    self.spec, x,
                    [[s] + unit_vectors(self.spec, p.k, mono)
                     for mono in self._msg_sub.index],
                    self._axiom_inner)
            self._axiom_rows_cache[h] = rows
        return rows

    def quotient_rows(self, f: int) -> list[list[int]]:
        """Exterior flavor: the spanning slack X tensor (w_f ^ ...) rows."""
        p = self.params
        assert p.flavor == EXTERIOR
        spec = self.spec
        rows = []
        for c in range(p.t):
            x_unit = [0] * p.t
            x_unit[c] = 1
            rows.extend(ext_tensor_rows(
                spec, x_unit,
                [[self.second_stars[f]] + unit_vectors(spec, p.k, mono)
                 for mono in self._msg_sub.index],
                self._axiom_inner))
        return rows

    def __repr__(self):
        p = self.params
        return (f"StarFamily(({p.n},{p.k},{p.d},{p.alpha}) {p.flavor} "
                f"over {self.spec})")


@dataclass(frozen=True)
class FileTensor:
    """The stored file: its M coordinates against the canonical basis."""

    params: CodeParams
    vector: Vector

    def __post_init__(self):
        if len(self.vector) != self.params.M:
            raise UsageError(
                f"file needs {self.params.M} coordinates, got {len(self.vector)}")

    @property
    def coords(self) -> list[FieldElement]:
        return self.vector.coords


@dataclass(frozen=True)
class NodeContent:
    """The alpha symbols stored by one node."""

    node_index: int
    values: Vector

    @property
    def coords(self) -> list[FieldElement]:
        return self.values.coords


@dataclass(frozen=True)
class HelpMessage:
    """The beta symbols a helper sends toward a failed node."""

    helper: int
    failed: int
    values: Vector


def encode(spec: FieldSpec, raw, params: CodeParams) -> FileTensor:
    """Systematic pre-encoding: the M user symbols become the coordinates."""
    vec = raw if isinstance(raw, Vector) else Vector(spec, raw)
    if len(vec) != params.M:
        raise UsageError(f"encode needs exactly {params.M} symbols, got {len(vec)}")
    return FileTensor(params, vec)


def node_content(file: FileTensor, stars: StarFamily, h: int) -> NodeContent:
    """Evaluate the file at node h's basis tensors."""
    spec = stars.spec
    phi = file.vector.values
    values = [dot_ints(spec, row, phi) for row in stars.node_tensor_rows(h)]
    return NodeContent(h, Vector(spec, values))


def download(contents: list[NodeContent], stars: StarFamily) -> FileTensor:
    """Exact reconstruction of the file from any k node contents.

    Stacks the k*alpha = M node basis tensors into an M x M system and
    solves it; singularity means the spanning axioms do not hold for
    this subset.
    """
    p = stars.params
    indices = [c.node_index for c in contents]
    if len(indices) != p.k or len(set(indices)) != p.k:
        raise UsageError(f"download needs exactly {p.k} distinct node contents")
    spec = stars.spec
    rows = []
    rhs = []
    for content in contents:
        if len(content.values) != p.alpha:
            raise UsageError("node content has wrong length")
        rows.extend(stars.node_tensor_rows(content.node_index))
        rhs.extend(content.values.values)
    A = Matrix(spec, rows)
    Ainv = invert(A)
    if Ainv is None:
        raise AxiomViolationError("download-span", subset=sorted(indices))
    phi = Ainv.matvec(Vector(spec, rhs))
    return FileTensor(p, phi)


def download_matrix(stars: StarFamily, indices: list[int]) -> Matrix:
    """The M x M decode matrix for a node subset: stacked values -> file."""
    p = stars.params
    if len(indices) != p.k or len(set(indices)) != p.k:
        raise UsageError(f"download needs exactly {p.k} distinct nodes")
    rows = []
    for h in indices:
        rows.extend(stars.node_tensor_rows(h))
    Ainv = invert(Matrix(stars.spec, rows))
    if Ainv is None:
        raise AxiomViolationError("download-span", subset=sorted(indices))
    return Ainv


def help_matrix(stars: StarFamily, h: int, f: int) -> Matrix:
    """beta x alpha map from node h's stored values to its message for f.

    The message subspace sits inside the node subspace, so every message
    basis tensor is a combination of the node basis tensors; the
    combination coefficients applied to stored values give the message.
    """
    spec = stars.spec
    solver = SpanSolver(spec, stars.node_tensor_rows(h), stars.params.M)
    rows = []
    for target in stars.message_tensor_rows(h, f):
        coeffs = solver.coefficients_for(target)
        if coeffs is None:
            raise AxiomViolationError(
                "message-containment", subset=(h,), failed_node=f,
                message=f"help message {h}->{f} leaves the node subspace")
        rows.append(coeffs)
    return Matrix(spec, rows)


def help_message(content: NodeContent, stars: StarFamily, f: int) -> HelpMessage:
    """What node `content.node_index` sends toward failed node f."""
    h = content.node_index
    if h == f:
        raise UsageError("a node does not help itself")
    values = help_matrix(stars, h, f).matvec(content.values)
    return HelpMessage(h, f, values)


def repair_matrix(stars: StarFamily, f: int, helpers: list[int]) -> Matrix:
    """alpha x (d*beta) map from concatenated help messages to node f's values.

    Each of f's node basis tensors is expressed over the received
    message tensors; span deficiency surfaces as an axiom violation
    naming (f, helper set).
    """
    p = stars.params
    if len(helpers) != p.d or len(set(helpers)) != p.d or f in helpers:
        raise UsageError(f"repair needs {p.d} distinct helpers, none equal to {f}")
    spec = stars.spec
    generators = []
    for h in helpers:
        generators.extend(stars.message_tensor_rows(h, f))
    solver = SpanSolver(spec, generators, p.M)
    rows = []
    for target in stars.node_tensor_rows(f):
        coeffs = solver.coefficients_for(target)
        if coeffs is None:
            raise AxiomViolationError("repair-span", subset=sorted(helpers),
                                      failed_node=f)
        rows.append(coeffs)
    return Matrix(spec, rows)


def repair(messages: list[HelpMessage], stars: StarFamily) -> NodeContent:
    """Rebuild a failed node's content from d help messages."""
    p = stars.params
    if not messages:
        raise UsageError("no help messages")
    f = messages[0].failed
    if any(m.failed != f for m in messages):
        raise UsageError("help messages disagree on the failed node")
    helpers = [m.helper for m in messages]
    for m in messages:
        if len(m.values) != p.beta:
            raise UsageError("help message has wrong length")
    R = repair_matrix(stars, f, helpers)
    received = []
    for m in messages:
        received.extend(m.values.values)
    return NodeContent(f, R.matvec(Vector(stars.spec, received)))


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of verify_axioms: pass, or the first violating subset."""

    ok: bool
    axiom: str | None = None
    subset: tuple | None = None
    failed_node: int | None = None
    subsets_checked: int = 0

    def describe(self) -> str:
        if self.ok:
            return f"all axioms hold ({self.subsets_checked} subsets checked)"
        where = f"subset {self.subset}"
        if self.failed_node is not None:
            where += f", failed node {self.failed_node}"
        return f"{self.axiom} violated at {where}"


def verify_axioms(stars: StarFamily) -> AxiomReport:
    """Exhaustively check every MDS spanning condition of the family.

    Symmetric flavor: any t x-vectors span F^t; any k-t+1 y-vectors span
    their space; for any d nodes the stacked degree-(t-1) tensors have
    full rank d*beta.  Exterior flavor replaces the second check by any
    k w-vectors spanning F^k, and the third by the quotient-augmented
    rank test over every (failed node, d-subset) pair.
    """
    p = stars.params
    spec = stars.spec
    checked = 0

    def fail(axiom, subset, failed_node=None):
        return AxiomReport(False, axiom, tuple(subset), failed_node, checked)

    for subset in combinations(range(p.n), p.t):
        checked += 1
        rows = [stars.x_stars[h].values for h in subset]
        if rank_of_rows(spec, rows) != p.t:
            return fail("MDSx", subset)

    second_need = p.y_dim
    second_name = "MDSy" if p.flavor == SYMMETRIC else "MDSw"
    for subset in combinations(range(p.n), second_need):
        checked += 1
        rows = [stars.second_stars[h].values for h in subset]
        if rank_of_rows(spec, rows) != second_need:
            return fail(second_name, subset)

    full_rank = p.t * stars._axiom_inner.dim
    if p.flavor == SYMMETRIC:
        # d*beta stacked tensors must fill X tensor S^(t-1): rank d*beta
        assert full_rank == p.d * p.beta
        for subset in combinations(range(p.n), p.d):
            checked += 1
            rows = []
            for h in subset:
                rows.extend(stars.axiom_tensor_rows(h))
            if rank_of_rows(spec, rows) != full_rank:
                return fail("MDSd", subset)
    else:
        for f in range(p.n):
            others = [h for h in range(p.n) if h != f]
            quotient = stars.quotient_rows(f)
            for subset in combinations(others, p.d):
                checked += 1
                rows = []
                for h in subset:
                    rows.extend(stars.axiom_tensor_rows(h))
                rows.extend(quotient)
                if rank_of_rows(spec, rows) != full_rank:
                    return fail("MDSq", subset, failed_node=f)

    return AxiomReport(True, subsets_checked=checked)


def rs_stars_t2(spec: FieldSpec, n: int, k: int, flavor: str = SYMMETRIC) -> StarFamily:
    """Reed-Solomon star selection for the t = 2 point d = 2(k-1).

    Picks evaluation points whose (k-1)-th powers are pairwise distinct,
    scanning the field in canonical order; x_h = [1, a_h^(k-1)] and the
    second star is the moment vector [1, a_h, ..., a_h^(k-2)] (symmetric)
    or [1, a_h, ..., a_h^(k-1)] (exterior).
    """
    d = 2 * (k - 1)
    params = derive_params(n, k, d, flavor)
    assert params.t == 2
    points = []
    seen_powers = set()
    for v in range(spec.order):
        xi = spec.pow(v, k - 1)
        if xi in seen_powers:
            continue
        seen_powers.add(xi)
        points.append(v)
        if len(points) == n:
            break
    if len(points) < n:
        raise FieldTooSmallError(
            f"{spec} has only {len(points)} distinct (k-1)-th powers, need {n}")
    x_stars = [Vector(spec, [1, spec.pow(a, k - 1)]) for a in points]
    top = k - 2 if flavor == SYMMETRIC else k - 1
    second = [Vector(spec, [spec.pow(a, e) for e in range(top + 1)]) for a in points]
    return StarFamily(spec, params, x_stars, second)
