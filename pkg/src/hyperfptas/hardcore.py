"""Truncated correlation-decay recursion and FPTAS for the hypergraph hardcore model.

An independent set may not contain any hyperedge entirely; a set ``I`` has
weight ``lam**|I|``. The marginal ratio ``R_v = Pr[v in I] / Pr[v not in I]``
satisfies

    R_v = lam * prod_i (1 - prod_j R_ij / (1 + R_ij))

over the incident edges ``e_i`` of ``v`` and the vertices ``v_ij`` of
``e_i - v``, where ``R_ij`` is the ratio of ``v_ij`` in the smaller
instance built by :func:`hyperfptas.hypergraph.hardcore_child`. Truncating
this recursion with an edge-size dependent depth discount gives a
polynomial-size computation tree, and telescoping over a vertex elimination
chain turns ratios into ``Z``.
"""

from __future__ import annotations

import math
import time
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import DeadInstance, InvalidArgument, OutsideRegion, ThresholdProximity
from .estimate import (
    PartitionEstimate,
    check_epsilon,
    depth_budget,
    depth_step,
    evaluate_steps,
    sum_log1p,
)
from .hypergraph import LabeledHypergraph, _hardcore_child, _rebuild, pivot_component

ALPHA_CEILING = 0.999
C_SAFETY = 0.99
GRID_POINTS = 1024
GOLDEN_TOL = 1e-12


def lambda_critical(delta: int) -> float:
    """Uniqueness threshold ``(delta-1)**(delta-1) / (delta-2)**delta``; infinite for ``delta=2``."""
    if not isinstance(delta, int) or delta < 2:
        raise InvalidArgument(f"degree bound must be an integer >= 2, got {delta!r}")
    if delta == 2:
        return math.inf
    return (delta - 1) ** (delta - 1) / (delta - 2) ** delta


@dataclass(frozen=True)
class HardcoreParams:
    lam: float
    delta: int

    def __post_init__(self):
        if not self.lam > 0 or not math.isfinite(self.lam):
            raise InvalidArgument(f"activity must be a positive real, got {self.lam!r}")
        lambda_critical(self.delta)

    @property
    def inside_uniqueness(self) -> bool:
        return self.lam < lambda_critical(self.delta)


@dataclass(frozen=True)
class HardcoreDecayPlan:
    lam: float
    delta: int
    c: float
    alpha: float
    bigC: float
    L: int | None = None
    guaranteed: bool = True

    def with_depth(self, L: int, guaranteed: bool | None = None) -> "HardcoreDecayPlan":
        g = self.guaranteed if guaranteed is None else guaranteed
        return HardcoreDecayPlan(self.lam, self.delta, self.c, self.alpha, self.bigC, L, g)


def schedule_exponent_bound(lam: float) -> float:
    """Upper limit on ``c`` for which the edge-size weighted decay rate stays below ``alpha``."""
    a = (math.log1p(lam) - math.log(lam)) / (2 + 4 * lam)
    b = (2 * lam + 1) / 2 * math.log((1 + lam) / lam) - 1
    return min(a, b)


def _jensen_value(lam: float, d: int, z: float) -> float:
    zd = z**d
    inner = lam * zd * (1 - z) / (1 + lam * zd)
    return d * math.sqrt(max(inner, 0.0))


def jensen_peak(lam: float, d: int) -> tuple[float, float]:
    """Maximise ``d*sqrt(lam z^d (1-z) / (1 + lam z^d))`` over ``z in [0, 1]``.

    Grid search on 1024 points followed by golden-section refinement of the
    best bracket. Returns ``(z*, value)``.
    """
    grid = [k / (GRID_POINTS - 1) for k in range(GRID_POINTS)]
    vals = [_jensen_value(lam, d, z) for z in grid]
    k = max(range(GRID_POINTS), key=vals.__getitem__)
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, GRID_POINTS - 1)]
    invphi = (math.sqrt(5) - 1) / 2
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = _jensen_value(lam, d, x1)
    f2 = _jensen_value(lam, d, x2)
    while b - a > GOLDEN_TOL:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = _jensen_value(lam, d, x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = _jensen_value(lam, d, x1)
    z = (a + b) / 2
    best = max((vals[k], grid[k]), (_jensen_value(lam, d, z), z))
    return best[1], best[0]


def decay_rate(lam: float, delta: int) -> float:
    """Largest Jensen bound over the non-root degrees ``d = 1..delta-1``."""
    return max(jensen_peak(lam, d)[1] for d in range(1, delta))


def plan_constants(
    p: HardcoreParams,
    *,
    force: bool = False,
    alpha: float | None = None,
    c: float | None = None,
) -> HardcoreDecayPlan:
    """Decay constants ``c``, ``alpha`` and ``C`` for ``p`` (no depth yet).

    Outside the uniqueness region, or with user-supplied ``alpha``/``c``,
    ``force=True`` is required and the plan carries no guarantee.
    """
    inside = p.inside_uniqueness
    if not inside and not force:
        raise OutsideRegion(
            f"lambda={p.lam} is not below the uniqueness threshold {lambda_critical(p.delta):.12g} for delta={p.delta}"
        )
    custom = alpha is not None or c is not None
    if custom and not force:
        raise InvalidArgument("custom alpha/c require force mode")
    c_val = C_SAFETY * schedule_exponent_bound(p.lam) if c is None else float(c)
    a_val = decay_rate(p.lam, p.delta) if alpha is None else float(alpha)
    if a_val >= ALPHA_CEILING and not force:
        raise ThresholdProximity(f"decay rate {a_val:.12g} >= {ALPHA_CEILING}; lambda too close to the threshold")
    big_c = 6 * p.lam * math.sqrt(1 + p.lam)
    guaranteed = inside and not custom and a_val < ALPHA_CEILING
    return HardcoreDecayPlan(p.lam, p.delta, c_val, a_val, big_c, None, guaranteed)


def depth_for_accuracy(plan: HardcoreDecayPlan, n: int, eps: float) -> int:
    return depth_budget(plan.bigC, plan.alpha, n, eps)


class HardcoreRecursion:
    """Evaluator for the truncated recursion ``R(G, v, L)``.

    Counts visited nodes in ``nodes``. With ``memo=True`` results are cached
    by ``(instance, pivot, budget)``, which never changes the value returned.
    """

    def __init__(self, plan: HardcoreDecayPlan, memo: bool = False):
        self.lam = plan.lam
        self.delta = plan.delta
        self.c = plan.c
        self.alpha = plan.alpha
        self.memo: dict | None = {} if memo else None
        self.nodes = 0
        self._steps: dict[int, int] = {}

    def step(self, w: int) -> int:
        s = self._steps.get(w)
        if s is None:
            s = self._steps[w] = depth_step(w, self.c, self.alpha)
        return s

    def ratio(self, G: LabeledHypergraph, v: int, L: int, root: bool = True) -> float:
        G, v = pivot_component(G, v)
        if self.memo is not None:
            key = (G, v, L)
            hit = self.memo.get(key)
            if hit is not None:
                return hit
            r = self._ratio(G, v, L, root)
            self.memo[key] = r
            return r
        return self._ratio(G, v, L, root)

    def _ratio(self, G: LabeledHypergraph, v: int, L: int, root: bool) -> float:
        self.nodes += 1
        lam = self.lam
        inc = [k for k, e in enumerate(G.edges) if v in e.vertices]
        d = len(inc)
        if d > self.delta:
            raise InvalidArgument(f"vertex degree {d} exceeds the degree bound {self.delta}")
        full = d == self.delta
        if full and not root:
            raise AssertionError("degree-delta pivot below the root; child construction is broken")
        if not full and L <= 0:
            return lam
        if d == 0:
            return lam
        for k in inc:
            if len(G.edges[k].vertices) == 1:
                # {v} is itself an edge: v can never be occupied
                return 0.0
        prod = 1.0
        for i, k in enumerate(inc, start=1):
            w = len(G.edges[k].vertices) - 1
            child_L = L if full else L - self.step(w)
            occupied = 1.0
            for j in range(1, w + 1):
                child, pivot = _hardcore_child(G, v, inc, i, j)
                r = self.ratio(child, pivot, child_L, False)
                occupied *= r / (1.0 + r)
                if occupied == 0.0:
                    break
            prod *= 1.0 - occupied
        return lam * prod


def _require_hardcore(G: LabeledHypergraph) -> None:
    if not G.is_hardcore:
        raise InvalidArgument("hardcore engine needs beta=1, gamma=0 on every edge")


def marginal_ratio(
    G: LabeledHypergraph, v: int, L: int, plan: HardcoreDecayPlan, *, memo: bool = False
) -> float:
    """Truncated estimate ``R(G, v, L)`` of ``Pr[v in I] / Pr[v not in I]``.

    Raises :class:`DeadInstance` if ``G`` has an empty edge (``Z(G) = 0``).
    """
    _require_hardcore(G)
    if G.has_empty_edge():
        raise DeadInstance("instance contains an empty edge; Z = 0 and ratios are undefined")
    return HardcoreRecursion(plan, memo).ratio(G, v, L, True)


def elimination_chain(G: LabeledHypergraph) -> list[LabeledHypergraph]:
    """``G_1 = G`` and ``G_{i+1} = G_i - v_i - (edges at v_i)``; each ``v_i`` is index 0 of ``G_i``."""
    chain = []
    cur = G
    while cur.n:
        chain.append(cur)
        inc = cur.incident(0)
        cur, _ = _rebuild(cur, {0: None}, inc)
        assert not cur.has_empty_edge(), "elimination created an empty edge"
    return chain


def _step(job) -> tuple[float, int]:
    plan, G, L, memo = job
    rec = HardcoreRecursion(plan, memo)
    r = rec.ratio(G, 0, L, True)
    return r, rec.nodes


def partition_function(
    G: LabeledHypergraph,
    p: HardcoreParams,
    eps: float | None,
    *,
    force: bool = False,
    max_depth: int | None = None,
    alpha: float | None = None,
    c: float | None = None,
    memo: bool = False,
    threads: int = 1,
) -> PartitionEstimate:
    """Estimate ``Z(G)`` as ``prod_i (1 + R(G_i, v_i, L))``.

    In guaranteed mode ``exp(-eps) <= Z / Zhat <= exp(eps)``. ``max_depth``
    replaces the budget derived from ``eps`` and drops the guarantee.
    """
    t0 = time.perf_counter()
    _require_hardcore(G)
    if G.max_degree > p.delta:
        raise InvalidArgument(f"max degree {G.max_degree} exceeds delta={p.delta}")
    plan = plan_constants(p, force=force, alpha=alpha, c=c)
    if max_depth is None:
        if eps is None:
            raise InvalidArgument("either eps or max_depth is required")
        if not plan.alpha < 1:
            raise ThresholdProximity(f"decay rate {plan.alpha:.12g} >= 1; supply max_depth")
        L = depth_for_accuracy(plan, G.n, eps)
        plan = plan.with_depth(L)
    else:
        if eps is not None:
            check_epsilon(eps)
        L = int(max_depth)
        plan = plan.with_depth(L, guaranteed=False)

    if G.has_empty_edge():
        return PartitionEstimate("hardcore", -math.inf, [], L, 0, _ms(t0), plan.guaranteed, plan)

    chain = elimination_chain(G)
    results = evaluate_steps(_step, [(plan, Gi, L, memo) for Gi in chain], threads)
    ratios = [r for r, _ in results]
    steps = [k for _, k in results]
    return PartitionEstimate(
        "hardcore", sum_log1p(ratios), ratios, L, sum(steps), _ms(t0), plan.guaranteed, plan, steps
    )


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def amortized_decay_rate(x: Sequence[float], arities: Sequence[int], p: HardcoreParams, c: float) -> float:
    """Edge-size weighted decay rate at the point ``x`` (flattened, grouped by ``arities``).

    Evaluates ``sqrt(f/(1+f)) * sum_a w_a^c * P_a/(1-P_a) * sum_b (1-t_ab)/sqrt(t_ab)``
    with ``t = x/(1+x)`` and ``P_a = prod_b t_ab``. Groups containing a zero
    entry have ``P_a = 0`` and contribute nothing.
    """
    if sum(arities) != len(x):
        raise InvalidArgument("arities do not partition x")
    lam = p.lam
    f = lam
    total = 0.0
    pos = 0
    for w in arities:
        t = [xi / (1.0 + xi) for xi in x[pos : pos + w]]
        pos += w
        prod_t = math.prod(t)
        f *= 1.0 - prod_t
        if prod_t == 0.0:
            continue
        total += w**c * prod_t / (1.0 - prod_t) * sum((1.0 - ti) / math.sqrt(ti) for ti in t)
    return math.sqrt(f / (1.0 + f)) * total
