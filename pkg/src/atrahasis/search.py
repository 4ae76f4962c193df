"""Finding and certifying star families.

Two routes:

* grow_pool -- deterministic greedy brute force.  Candidate evaluation
  points are scanned in canonical field order; a point joins the pool
  iff every spanning condition touching it still holds.  The exhaustive
  check is the certification path for concrete families.

* nullstellensatz_witness -- randomized polynomial identity testing for
  the repair-span determinant.  Random star vectors over a small prime
  field are expanded into the d*beta square matrix; one nonzero
  determinant evaluation witnesses that the determinant polynomial is
  nonzero over the integers, hence star vectors exist over sufficiently
  large fields.  A witness does NOT certify any specific family over a
  specific field; grow_pool (or verify_axioms) does that.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .code import EXTERIOR, SYMMETRIC, CodeParams, StarFamily, derive_params
from .errors import UsageError
from .fields import FieldSpec, prime_field
from .linalg import Matrix, Vector, det, rank_of_rows
from .tensors import (ExtBasis, SymBasis, ext_tensor_rows, sym_tensor_rows,
                      unit_vectors)

NONZERO_WITNESSED = "nonzero-witnessed"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SearchConfig:
    """Inputs of a deterministic pool search.

    x_pattern / y_pattern are exponent lists: point a becomes
    x = [a^e for e in x_pattern] (with 0^0 = 1) and likewise for the
    second star vector.  Pattern lengths must be t and the second-space
    dimension (k-t+1 symmetric, k exterior).
    """

    spec: FieldSpec
    params: CodeParams
    x_pattern: tuple
    y_pattern: tuple
    seed: int = 0
    max_redraws: int = 10

    def __post_init__(self):
        object.__setattr__(self, "x_pattern", tuple(self.x_pattern))
        object.__setattr__(self, "y_pattern", tuple(self.y_pattern))
        p = self.params
        if len(self.x_pattern) != p.t or len(self.y_pattern) != p.y_dim:
            raise UsageError(f"patterns must have lengths {p.t} and {p.y_dim}")
        if any(e < 0 for e in self.x_pattern + self.y_pattern):
            raise UsageError("pattern exponents must be non-negative")


@dataclass(frozen=True)
class PoolResult:
    """Outcome of grow_pool: the pool found, and a family when viable.

    ok means the pool supports at least one valid code (pool >= d+1,
    since a code needs n-1 >= d).  The family spans the whole pool; any
    subfamily inherits the axioms, which quantify over all subsets.
    """

    ok: bool
    pool: tuple
    family: StarFamily | None
    reason: str = ""


class _Expander:
    """Per-point axiom rows, cached across incremental checks."""

    def __init__(self, spec: FieldSpec, params: CodeParams):
        self.spec = spec
        self.p = params
        p = params
        if p.flavor == SYMMETRIC:
            self.msg_sub = SymBasis(p.y_dim, p.t - 2)
            self.inner = SymBasis(p.y_dim, p.t - 1)
        else:
            self.msg_sub = ExtBasis(p.k, p.t - 2)
            self.inner = ExtBasis(p.k, p.t - 1)
        self.full_rank = p.t * self.inner.dim
        self._rows: dict = {}
        self._quot: dict = {}

    def axiom_rows(self, x: Vector, s: Vector):
        key = (tuple(x.values), tuple(s.values))
        rows = self._rows.get(key)
        if rows is None:
            dim2 = self.p.y_dim
            prods = [[s] + unit_vectors(self.spec, dim2, mono)
                     for mono in self.msg_sub.index]
            if self.p.flavor == SYMMETRIC:
                rows = sym_tensor_rows(self.spec, x, prods, self.inner)
            else:
                rows = ext_tensor_rows(self.spec, x, prods, self.inner)
            self._rows[key] = rows
        return rows

    def quotient_rows(self, s: Vector):
        key = tuple(s.values)
        rows = self._quot.get(key)
        if rows is None:
            rows = []
            for c in range(self.p.t):
                x_unit = [0] * self.p.t
                x_unit[c] = 1
                rows.extend(ext_tensor_rows(
                    self.spec, x_unit,
                    [[s] + unit_vectors(self.spec, self.p.k, mono)
                     for mono in self.msg_sub.index],
                    self.inner))
            self._quot[key] = rows
        return rows


def _pattern_vector(spec: FieldSpec, a: int, pattern) -> Vector:
    return Vector(spec, [spec.pow(a, e) for e in pattern])


def grow_pool(cfg: SearchConfig) -> PoolResult:
    """Greedy brute-force pool growth over the whole field.

    Incremental checking: only subsets touching the candidate point are
    re-verified, which is equivalent to full re-verification because
    previously accepted subsets are untouched by a new point.
    """
    spec = cfg.spec
    p = cfg.params
    expander = _Expander(spec, p)
    pool: list[int] = []
    xs: list[Vector] = []
    ss: list[Vector] = []
    for v in range(spec.order):
        x = _pattern_vector(spec, v, cfg.x_pattern)
        s = _pattern_vector(spec, v, cfg.y_pattern)
        if p.flavor == EXTERIOR and s.is_zero():
            continue
        if _point_admissible(spec, p, expander, xs, ss, x, s):
            pool.append(v)
            xs.append(x)
            ss.append(s)
    if len(pool) < p.d + 1:
        return PoolResult(False, tuple(pool), None,
                          f"pool of {len(pool)} points cannot support d={p.d}")
    params = derive_params(len(pool), p.k, p.d, p.flavor)
    family = StarFamily(spec, params, xs, ss)
    return PoolResult(True, tuple(pool), family)


def _point_admissible(spec, p, expander, xs, ss, x_new, s_new) -> bool:
    """Do all spanning conditions still hold once (x_new, s_new) joins?"""
    m = len(xs)
    if p.t <= m + 1:
        for rest in combinations(range(m), p.t - 1):
            rows = [xs[i].values for i in rest] + [x_new.values]
            if rank_of_rows(spec, rows) != p.t:
                return False
    ydim = p.y_dim
    if ydim <= m + 1:
        for rest in combinations(range(m), ydim - 1):
            rows = [ss[i].values for i in rest] + [s_new.values]
            if rank_of_rows(spec, rows) != ydim:
                return False

    full = expander.full_rank
    trial_xs = xs + [x_new]
    trial_ss = ss + [s_new]
    new = m

    def stacked(indices, f=None):
        rows = []
        for i in indices:
            rows.extend(expander.axiom_rows(trial_xs[i], trial_ss[i]))
        if f is not None:
            rows.extend(expander.quotient_rows(trial_ss[f]))
        return rows

    if p.flavor == SYMMETRIC:
        if p.d <= m + 1:
            for rest in combinations(range(m), p.d - 1):
                if rank_of_rows(spec, stacked((*rest, new))) != full:
                    return False
    else:
        # pairs (f, H) touching the new point: it is the failed node, or
        # it is one of the d helpers
        if p.d <= m:
            for helpers in combinations(range(m), p.d):
                if rank_of_rows(spec, stacked(helpers, f=new)) != full:
                    return False
        if p.d <= m + 1 and m >= 1:
            for f in range(m):
                others = [i for i in range(m) if i != f]
                for rest in combinations(others, p.d - 1):
                    if rank_of_rows(spec, stacked((*rest, new), f=f)) != full:
                        return False
    return True


@dataclass(frozen=True)
class WitnessCase:
    k: int
    d: int
    t: int
    alpha: int


@dataclass(frozen=True)
class WitnessReport:
    """One randomized determinant run and its verdict.

    A nonzero-witnessed verdict records the evaluation point (the drawn
    star vectors) and the determinant value, so the run can be replayed.
    """

    case: WitnessCase
    field_order_used: int
    redraws: int
    verdict: str
    x_points: tuple = ()
    y_points: tuple = ()
    determinant: int = 0


def witness_matrix(spec: FieldSpec, k: int, d: int, t: int,
                   xs: list[list[int]], ys: list[list[int]]) -> Matrix:
    """Stack the d*beta expanded tensors into the square witness matrix."""
    m = k - t + 1
    msg_sub = SymBasis(m, t - 2)
    inner = SymBasis(m, t - 1)
    rows = []
    for x, y in zip(xs, ys):
        rows.extend(sym_tensor_rows(
            spec, x, [[y] + unit_vectors(spec, m, mono) for mono in msg_sub.index],
            inner))
    return Matrix(spec, rows)


def nullstellensatz_witness(params: CodeParams, witness_field: FieldSpec,
                            seed=0, max_redraws: int = 10) -> WitnessReport:
    """Randomized nonzero test of the repair-span determinant.

    Draws d random x and y star vectors uniformly over the witness
    field, evaluates the d*beta by d*beta determinant, and redraws on
    zero.  One nonzero evaluation proves the determinant polynomial is
    nonzero over the integers.
    """
    k, d, t = params.k, params.d, params.t
    case = WitnessCase(k=k, d=d, t=t, alpha=params.alpha)
    rng = random.Random(seed)
    order = witness_field.order
    for redraw in range(max_redraws):
        xs = [[rng.randrange(order) for _ in range(t)] for _ in range(d)]
        ys = [[rng.randrange(order) for _ in range(k - t + 1)] for _ in range(d)]
        value = det(witness_matrix(witness_field, k, d, t, xs, ys)).value
        if value != 0:
            return WitnessReport(case, order, redraw, NONZERO_WITNESSED,
                                 tuple(map(tuple, xs)), tuple(map(tuple, ys)), value)
    return WitnessReport(case, order, max_redraws, INCONCLUSIVE)


def enumerate_primitive_cases(alpha_cap: int) -> list[WitnessCase]:
    """All (k, d, t) with integral t and alpha <= alpha_cap.

    r = d-k+1 must divide k-1, so for each k the cases are indexed by
    the divisors of k-1.  k is scanned up to alpha_cap + 2, which covers
    the boundary t = 2 case alpha = k-1 = cap and keeps the alpha = 1
    (t = k) family finite.
    """
    cases = []
    for k in range(2, alpha_cap + 3):
        for r in range(1, k):
            if (k - 1) % r != 0:
                continue
            d = k - 1 + r
            t = d // r
            alpha = comb(k - 1, t - 1)
            if alpha <= alpha_cap:
                cases.append(WitnessCase(k=k, d=d, t=t, alpha=alpha))
    return cases


def sweep_small_cases(alpha_cap: int, witness_field: FieldSpec | None = None,
                      seed: int = 0, max_redraws: int = 10) -> list[WitnessReport]:
    """Run the witness over every primitive case with alpha <= alpha_cap.

    Each case gets an independent stream derived from (seed, k, d), so
    results do not depend on evaluation order.
    """
    if witness_field is None:
        witness_field = prime_field(127)
    reports = []
    for case in enumerate_primitive_cases(alpha_cap):
        params = derive_params(case.d + 1, case.k, case.d, SYMMETRIC)
        case_seed = f"{seed}:{case.k}:{case.d}:{case.t}"
        reports.append(nullstellensatz_witness(
            params, witness_field, seed=case_seed, max_redraws=max_redraws))
    return reports


def render_report_table(reports: list[WitnessReport]) -> str:
    """Tab-separated table: k, d, t, alpha, field, redraws, verdict."""
    lines = ["k\td\tt\talpha\tfield\tredraws\tverdict"]
    for r in reports:
        c = r.case
        lines.append(f"{c.k}\t{c.d}\t{c.t}\t{c.alpha}\t"
                     f"{r.field_order_used}\t{r.redraws}\t{r.verdict}")
    return "\n".join(lines) + "\n"
