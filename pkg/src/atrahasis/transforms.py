"""Code transforms: shortening, and centralized repair of two
simultaneous failures for t = 3 symmetric codes.

Shortening retires trailing nodes by constraining their contents to
zero.  Encoding then parameterizes the constraint nullspace (canonical
echelon pivots, so the map is systematic in the free coordinates);
download feeds the known zero contents back in; repair has the failed
node simulate the retired nodes' help messages locally, which are zero.
Depth delta turns an (n, k, d, alpha) instance into
(n-delta, k-delta, d-delta, alpha), keeping d-k+1 and beta.

Two-failure repair gathers messages at a central agent under one of
three strategies: every helper sends its restriction toward both failed
nodes (naive); one helper sends only the first node's message and the
rebuilt node helps the second (cascade); or helpers stream symbols only
until the joint target subspace is covered (subspace), whose dimension
3(k-2)^2 is the best total here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .code import (SYMMETRIC, FileTensor, HelpMessage, NodeContent,
                   StarFamily, download, help_matrix, node_content, repair)
from .errors import AxiomViolationError, UsageError
from .linalg import Matrix, SpanSolver, Vector, nullspace_with_free
from .tensors import unit_vectors, sym_tensor_rows


class ShortenedCode:
    """A base code instance with `depth` trailing nodes pinned to zero.

    Effective parameters: (n-depth, k-depth, d-depth, alpha); the file
    shrinks to (k-depth)*alpha user symbols, and d-k+1, alpha, beta are
    untouched.  Live nodes are the base indices 0..n-depth-1.
    """

    def __init__(self, base: StarFamily, depth: int):
        p = base.params
        if depth < 0 or depth >= p.k:
            raise UsageError(f"shorten depth must satisfy 0 <= depth < k={p.k}")
        self.base = base
        self.depth = depth
        self.pinned = tuple(range(p.n - depth, p.n))
        self.spec = base.spec
        self.alpha = p.alpha
        self.beta = p.beta
        self.n = p.n - depth
        self.k = p.k - depth
        self.d = p.d - depth
        self.M = self.k * p.alpha
        if depth == 0:
            self._free_cols = list(range(p.M))
            self._basis = [Vector(self.spec, row)
                           for row in Matrix.identity(self.spec, p.M).rows]
            return
        constraint_rows = []
        for h in self.pinned:
            constraint_rows.extend(base.node_tensor_rows(h))
        C = Matrix(self.spec, constraint_rows)
        # systematic parameterization of the constraint nullspace: user
        # symbols sit at the free columns and read back directly
        basis, free_cols = nullspace_with_free(C)
        if len(basis) != self.M:
            raise AxiomViolationError(
                "shorten-constraint", subset=self.pinned,
                message=f"pinning {depth} nodes cut {p.M - len(basis)} "
                        f"dimensions, expected {depth * p.alpha}")
        self._basis = basis
        self._free_cols = free_cols

    def encode(self, raw) -> FileTensor:
        """Map (k-depth)*alpha user symbols to a base file with pinned
        node contents all zero."""
        vec = raw if isinstance(raw, Vector) else Vector(self.spec, raw)
        if len(vec) != self.M:
            raise UsageError(f"shortened encode needs {self.M} symbols, got {len(vec)}")
        spec = self.spec
        coords = [0] * self.base.params.M
        for c, bv in zip(vec.values, self._basis):
            if c:
                for i, val in enumerate(bv.values):
                    if val:
                        coords[i] = spec.add(coords[i], spec.mul(c, val))
        return FileTensor(self.base.params, Vector(spec, coords))

    def decode(self, file: FileTensor) -> Vector:
        """Read the user symbols back off the free coordinates."""
        return Vector(self.spec, [file.vector.values[c] for c in self._free_cols])

    def node_content(self, file: FileTensor, h: int) -> NodeContent:
        self._check_live(h)
        return node_content(file, self.base, h)

    def download(self, contents: list[NodeContent]) -> Vector:
        """Recover the user symbols from any k-depth live node contents."""
        if len(contents) != self.k:
            raise UsageError(f"shortened download needs {self.k} node contents")
        for c in contents:
            self._check_live(c.node_index)
        zeros = Vector(self.spec, [0] * self.alpha)
        padded = list(contents) + [NodeContent(h, zeros) for h in self.pinned]
        return self.decode(download(padded, self.base))

    def help_message(self, content: NodeContent, f: int) -> HelpMessage:
        self._check_live(content.node_index)
        self._check_live(f)
        values = help_matrix(self.base, content.node_index, f).matvec(content.values)
        return HelpMessage(content.node_index, f, values)

    def repair(self, messages: list[HelpMessage]) -> NodeContent:
        """Repair from d-depth live helpers; the retired nodes' messages
        are simulated locally (their contents are zero, so they send zero)."""
        if len(messages) != self.d:
            raise UsageError(f"shortened repair needs {self.d} live help messages")
        f = messages[0].failed
        self._check_live(f)
        for m in messages:
            self._check_live(m.helper)
        zeros = Vector(self.spec, [0] * self.beta)
        simulated = [HelpMessage(h, f, zeros) for h in self.pinned]
        return repair(list(messages) + simulated, self.base)

    def _check_live(self, h: int):
        if not 0 <= h < self.n:
            raise UsageError(f"node {h} is not a live node of the shortened code")

    def __repr__(self):
        return (f"ShortenedCode(({self.n},{self.k},{self.d},{self.alpha}) "
                f"from base ({self.base.params.n},{self.base.params.k},"
                f"{self.base.params.d}), depth={self.depth})")


def shorten(code, delta: int) -> ShortenedCode:
    """Shorten a StarFamily, or deepen an already shortened code."""
    if isinstance(code, ShortenedCode):
        return ShortenedCode(code.base, code.depth + delta)
    return ShortenedCode(code, delta)


NAIVE = "naive"
CASCADE = "cascade"
SUBSPACE = "subspace"
STRATEGIES = (NAIVE, CASCADE, SUBSPACE)


def naive_bandwidth(k: int, d: int) -> int:
    return d * (2 * k - 5)


def cascade_bandwidth(k: int, d: int) -> int:
    return (d - 1) * (2 * k - 5) + (k - 2)


def subspace_bandwidth(k: int) -> int:
    return 3 * (k - 2) ** 2


def cutset_two_failure_bandwidth(k: int) -> Fraction:
    """The information-flow floor 2*d*alpha/(d+2-k) at d = 3(k-1)/2."""
    d = Fraction(3 * (k - 1), 2)
    alpha = Fraction((k - 1) * (k - 2), 2)
    return 2 * d * alpha / (d + 2 - k)


def subspace_optimality_gap(k: int) -> Fraction:
    """Exact distance of the subspace strategy from the cut-set floor."""
    return subspace_bandwidth(k) - cutset_two_failure_bandwidth(k)


@dataclass(frozen=True)
class CentralRepairPlan:
    """What each helper sends and how the agent recombines it."""

    failed: tuple
    helpers: tuple
    strategy: str
    per_helper_sent: tuple
    total_bandwidth: int


@dataclass(frozen=True)
class CentralRepairProgram:
    """Matrix form of a two-failure repair, reusable across files.

    send_matrices[i] maps helper i's stored values to what it transmits;
    recover_first / recover_second map the concatenated transmissions to
    the two failed nodes' contents.  In the cascade strategy the second
    recovery additionally consumes the first node's rebuilt content
    (appended after the received symbols).
    """

    plan: CentralRepairPlan
    send_matrices: tuple
    recover_first: Matrix
    recover_second: Matrix
    second_uses_first: bool


def _pair_candidate_rows(stars: StarFamily, h: int, f: int, g: int):
    """Candidate message tensors of helper h toward the pair (f, g):
    the f-directed block then the g-directed block."""
    p = stars.params
    spec = stars.spec
    x, y = stars.x_stars[h], stars.second_stars[h]
    rows = []
    for target in (f, g):
        ty = stars.second_stars[target]
        rows.extend(sym_tensor_rows(
            spec, x,
            [[y] + unit_vectors(spec, p.y_dim, mono) + [ty]
             for mono in stars._msg_sub.index],
            stars._ambient_inner))
    return rows


def _row_reducer(spec, width):
    """Stateful greedy rank tracker over rows of fixed width."""
    reduced = []

    def offer(row) -> bool:
        work = list(row)
        for pc, prow in reduced:
            if work[pc]:
                fctr = work[pc]
                work = [spec.sub(a, spec.mul(fctr, b)) for a, b in zip(work, prow)]
        pivot = next((c for c, v in enumerate(work) if v), None)
        if pivot is None:
            return False
        inv = spec.inv(work[pivot])
        if inv != 1:
            work = [spec.mul(inv, v) for v in work]
        reduced.append((pivot, work))
        return True

    return offer


def central_repair_program(stars: StarFamily, f: int, g: int,
                           helpers: list[int], strategy: str) -> CentralRepairProgram:
    """Build the transmission and recovery matrices for one failure pair."""
    p = stars.params
    if p.flavor != SYMMETRIC or p.t != 3:
        raise UsageError("two-failure centralized repair is defined for "
                         "t = 3 symmetric codes")
    if strategy not in STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}")
    if f == g:
        raise UsageError("the two failed nodes must differ")
    helpers = list(helpers)
    if (len(helpers) != p.d or len(set(helpers)) != p.d
            or f in helpers or g in helpers):
        raise UsageError(f"need {p.d} distinct helpers disjoint from the failed pair")
    spec = stars.spec
    k = p.k
    full_pair = 2 * k - 5

    sent_rows: list[list[int]] = []      # tensors the agent receives, in order
    send_matrices = []
    per_helper_sent = []

    if strategy in (NAIVE, CASCADE):
        senders = helpers if strategy == NAIVE else helpers[:-1]
        for h in senders:
            candidates = _pair_candidate_rows(stars, h, f, g)
            offer = _row_reducer(spec, p.M)
            kept = [row for row in candidates if offer(row)]
            if len(kept) != full_pair:
                raise AxiomViolationError(
                    "pair-message-dimension", subset=(h,), failed_node=f,
                    message=f"helper {h} pair restriction has dimension "
                            f"{len(kept)}, expected {full_pair}")
            sent_rows.extend(kept)
            send_matrices.append(_values_matrix(stars, h, kept))
            per_helper_sent.append((h, len(kept)))
        if strategy == CASCADE:
            h = helpers[-1]
            kept = stars.message_tensor_rows(h, f)
            sent_rows.extend(kept)
            send_matrices.append(help_matrix(stars, h, f))
            per_helper_sent.append((h, len(kept)))
    else:
        target_rank = subspace_bandwidth(k)
        offer = _row_reducer(spec, p.M)
        rank_now = 0
        for h in helpers:
            kept = []
            if rank_now < target_rank:
                for row in _pair_candidate_rows(stars, h, f, g):
                    if offer(row):
                        kept.append(row)
                        rank_now += 1
                        if rank_now == target_rank:
                            break
            sent_rows.extend(kept)
            send_matrices.append(_values_matrix(stars, h, kept))
            per_helper_sent.append((h, len(kept)))
        if rank_now != target_rank:
            raise AxiomViolationError(
                "pair-repair-span", subset=sorted(helpers), failed_node=f,
                message=f"pooled helper tensors cover {rank_now} of the "
                        f"{target_rank}-dimensional pair target")

    solver = SpanSolver(spec, sent_rows, p.M)
    recover_first = _recovery_matrix(stars, solver, f)
    if strategy == CASCADE:
        # the rebuilt first node acts as one more helper for the second
        extended = sent_rows + stars.node_tensor_rows(f)
        solver2 = SpanSolver(spec, extended, p.M)
        recover_second = _recovery_matrix(stars, solver2, g)
        second_uses_first = True
    else:
        recover_second = _recovery_matrix(stars, solver, g)
        second_uses_first = False

    plan = CentralRepairPlan(
        failed=(f, g), helpers=tuple(helpers), strategy=strategy,
        per_helper_sent=tuple(per_helper_sent),
        total_bandwidth=sum(c for _, c in per_helper_sent))
    return CentralRepairProgram(plan, tuple(send_matrices),
                                recover_first, recover_second, second_uses_first)


def _values_matrix(stars: StarFamily, h: int, tensor_rows: list[list[int]]) -> Matrix:
    """Coefficients that turn node h's stored values into the given
    tensors' evaluations (each tensor lies in the node subspace)."""
    spec = stars.spec
    solver = SpanSolver(spec, stars.node_tensor_rows(h), stars.params.M)
    rows = []
    for row in tensor_rows:
        coeffs = solver.coefficients_for(row)
        if coeffs is None:
            raise AxiomViolationError(
                "message-containment", subset=(h,),
                message=f"helper {h} cannot evaluate a requested tensor")
        rows.append(coeffs)
    return Matrix(spec, rows)


def _recovery_matrix(stars, solver, target_node):
    rows = []
    for tensor in stars.node_tensor_rows(target_node):
        coeffs = solver.coefficients_for(tensor)
        if coeffs is None:
            raise AxiomViolationError("pair-repair-span",
                                      failed_node=target_node,
                                      message="agent pool misses the target")
        rows.append(coeffs)
    return Matrix(stars.spec, rows)


def central_repair_two(file: FileTensor, stars: StarFamily, f: int, g: int,
                       helpers: list[int], strategy: str = SUBSPACE):
    """Repair nodes f and g at once through a central agent.

    Helpers compute transmissions from their own stored values only.
    Returns (content_f, content_g, plan); plan.total_bandwidth counts
    the symbols actually sent to the agent.
    """
    program = central_repair_program(stars, f, g, helpers, strategy)
    spec = stars.spec
    received: list[int] = []
    for (h, _), S in zip(program.plan.per_helper_sent, program.send_matrices):
        stored = node_content(file, stars, h).values
        received.extend(S.matvec(stored).values)
    rec = Vector(spec, received)
    values_f = program.recover_first.matvec(rec)
    if program.second_uses_first:
        extended = Vector(spec, received + values_f.values)
        values_g = program.recover_second.matvec(extended)
    else:
        values_g = program.recover_second.matvec(rec)
    return (NodeContent(f, values_f), NodeContent(g, values_g), program.plan)
