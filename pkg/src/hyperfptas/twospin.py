"""Truncated recursion and FPTAS for anti-ferromagnetic two-state spin systems on hypergraphs.

A configuration ``sigma: V -> {0, 1}`` has weight ``lam**|sigma^-1(1)|``
times, for every edge, ``beta(e)`` if the edge is all-zero, ``gamma(e)`` if
it is all-one and 1 otherwise. Anti-ferromagnetic Ising is the case
``beta = gamma <= 1``.

The marginal ratio of a pivot ``v`` factorises over its incident edges,

    R_v = lam * prod_i [1 - (1-gamma_i) x_i1 prod_{j>=2} y_ij]
                     / [1 - (1-beta_i) (1-x_i1) prod_{j>=2} (1-z_ij)]

with ``x = r0/(1+r0)``, ``y = r1/(1+r1)``, ``z = r0/(1+r0)`` built from the
ratios of the pinned child instances of
:func:`hyperfptas.hypergraph.spin_children`.
"""

from __future__ import annotations

import math
import time
import warnings
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import InvalidArgument, OutsideRegion, ParameterDomain
from .estimate import (
    PartitionEstimate,
    check_epsilon,
    depth_budget,
    depth_step,
    evaluate_steps,
    sum_log1p,
)
from .hypergraph import LabeledHypergraph, PinnedValue, _rebuild, _spin_children, pivot_component


def beta_critical(delta: int) -> float:
    """Smallest edge label covered by the guarantee: ``1 - 2/(2 e^{-1/2} delta + 3)``."""
    if not isinstance(delta, int) or delta < 2:
        raise InvalidArgument(f"degree bound must be an integer >= 2, got {delta!r}")
    return 1.0 - 2.0 / (2.0 * math.exp(-0.5) * delta + 3.0)


@dataclass(frozen=True)
class SpinParams:
    lam: float
    delta: int

    def __post_init__(self):
        if not self.lam > 0 or not math.isfinite(self.lam):
            raise InvalidArgument(f"external field must be a positive real, got {self.lam!r}")
        beta_critical(self.delta)


@dataclass(frozen=True)
class SpinDecayPlan:
    lam: float
    delta: int
    beta_c: float
    delta_margin: float
    w_hat: int
    alpha: float
    c1: float
    c2: float
    c: float
    bigC: float
    L: int | None = None
    guaranteed: bool = True

    def with_depth(self, L: int, guaranteed: bool | None = None) -> "SpinDecayPlan":
        g = self.guaranteed if guaranteed is None else guaranteed
        return SpinDecayPlan(
            self.lam, self.delta, self.beta_c, self.delta_margin, self.w_hat,
            self.alpha, self.c1, self.c2, self.c, self.bigC, L, g,
        )

    @property
    def ratio_range(self) -> tuple[float, float]:
        """Interval every exact (and truncated) ratio lies in when labels are in ``[beta_c, 1]``."""
        s = self.beta_c**self.delta
        return self.lam * s, self.lam / s


def plan_constants(p: SpinParams) -> SpinDecayPlan:
    """Closed-form decay constants for the external field and degree bound in ``p``."""
    lam, delta = p.lam, p.delta
    beta_c = beta_critical(delta)
    s = beta_c**delta
    lo = lam * s / (1.0 + lam * s)
    hi = (lam / s) / (1.0 + lam / s)
    margin = min(lo, 1.0 - hi)
    if not 0.0 < margin < 0.5:
        raise ParameterDomain(f"ratio margin {margin!r} outside (0, 1/2)")
    w_hat = max(math.ceil(1.0 / margin), math.ceil(-1.0 / math.log1p(-margin))) + 1
    k = 1.0 / (2.0 * beta_c) - 1.0
    alpha = math.sqrt((1.0 + k / w_hat) ** w_hat / math.exp(k))
    c1 = -math.log(alpha) / math.log(w_hat)
    c2 = -w_hat * math.log1p(-margin) - 1.0
    c = min(c1, c2)
    big_c = 4.0 / lam * math.exp(0.5 + math.sqrt(math.e))
    return SpinDecayPlan(lam, delta, beta_c, margin, w_hat, alpha, c1, c2, c, big_c, None, True)


def depth_for_accuracy(plan: SpinDecayPlan, n: int, eps: float) -> int:
    return depth_budget(plan.bigC, plan.alpha, n, eps)


def check_region(G: LabeledHypergraph, plan: SpinDecayPlan) -> list[str]:
    """Reasons ``(G, plan)`` falls outside the guaranteed region (empty if inside)."""
    problems = []
    if G.max_degree > plan.delta:
        problems.append(f"max degree {G.max_degree} exceeds delta={plan.delta}")
    if not plan.lam < 1.0:
        problems.append(f"external field {plan.lam} is not in (0, 1)")
    for e in G.edges:
        for name, val in (("beta", e.beta_f), ("gamma", e.gamma_f)):
            if not plan.beta_c <= val <= 1.0:
                problems.append(f"edge {e.vertices} has {name}={val} outside [{plan.beta_c:.6f}, 1]")
                break
    return problems


def _active(G: LabeledHypergraph) -> LabeledHypergraph:
    # edges that weigh 1 in every configuration, and empty edges, are constants
    keep = tuple(e for e in G.edges if e.vertices and not (e.beta == "1" and e.gamma == "1"))
    if len(keep) == len(G.edges):
        return G
    return LabeledHypergraph._raw(G.n, keep)


class SpinRecursion:
    """Evaluator for the truncated recursion ``R(G, v, L)``.

    Tracks the number of visited nodes and the range of every ratio it
    produced (``min_ratio``/``max_ratio``).
    """

    def __init__(self, plan: SpinDecayPlan, memo: bool = False):
        self.lam = plan.lam
        self.delta = plan.delta
        self.c = plan.c
        self.alpha = plan.alpha
        self.memo: dict | None = {} if memo else None
        self.nodes = 0
        self.min_ratio = math.inf
        self.max_ratio = -math.inf
        self._steps: dict[int, int] = {}

    def step(self, w: int) -> int:
        s = self._steps.get(w)
        if s is None:
            s = self._steps[w] = depth_step(w, self.c, self.alpha)
        return s

    def ratio(self, G: LabeledHypergraph, v: int, L: int) -> float:
        if L <= 0:
            self.nodes += 1
            r = self.lam
        else:
            G, v = pivot_component(_active(G), v)
            if self.memo is not None:
                key = (G, v, L)
                r = self.memo.get(key)
                if r is None:
                    r = self.memo[key] = self._ratio(G, v, L)
            else:
                r = self._ratio(G, v, L)
        if r < self.min_ratio:
            self.min_ratio = r
        if r > self.max_ratio:
            self.max_ratio = r
        return r

    def _ratio(self, G: LabeledHypergraph, v: int, L: int) -> float:
        self.nodes += 1
        inc = [k for k, e in enumerate(G.edges) if v in e.vertices]
        if len(inc) > self.delta:
            raise InvalidArgument(f"vertex degree {len(inc)} exceeds the degree bound {self.delta}")
        prod = 1.0
        for i, k in enumerate(inc, start=1):
            e = G.edges[k]
            w = len(e.vertices) - 1
            bf, gf = e.beta_f, e.gamma_f
            if w == 0:
                prod *= gf / bf
                continue
            child_L = L - self.step(w)
            # a label equal to 1 zeroes its whole product; skip those children
            need_one = gf != 1.0
            need_zero = bf != 1.0
            g0, _, pivot = _spin_children(G, v, inc, i, 1, (True, False))
            r = self.ratio(g0, pivot, child_L)
            all_one = r / (1.0 + r)
            all_zero = 1.0 / (1.0 + r)
            for j in range(2, w + 1):
                g0, g1, pivot = _spin_children(G, v, inc, i, j, (need_zero, need_one))
                if need_one:
                    r1 = self.ratio(g1, pivot, child_L)
                    all_one *= r1 / (1.0 + r1)
                if need_zero:
                    r0 = self.ratio(g0, pivot, child_L)
                    all_zero *= 1.0 / (1.0 + r0)
            prod *= (1.0 - (1.0 - gf) * all_one) / (1.0 - (1.0 - bf) * all_zero)
        return self.lam * prod


def _require_spin(G: LabeledHypergraph) -> None:
    for e in G.edges:
        if not 0.0 < e.beta_f <= 1.0 or not 0.0 <= e.gamma_f <= 1.0:
            raise InvalidArgument(f"edge {e.vertices} labels ({e.beta}, {e.gamma}) outside (0,1] x [0,1]")


def marginal_ratio(
    G: LabeledHypergraph, v: int, L: int, plan: SpinDecayPlan, *, memo: bool = False
) -> float:
    """Truncated estimate ``R(G, v, L)`` of ``Pr[sigma(v)=1] / Pr[sigma(v)=0]``."""
    _require_spin(G)
    if not 0 <= v < G.n:
        raise InvalidArgument(f"vertex {v} out of range for n={G.n}")
    return SpinRecursion(plan, memo).ratio(G, v, L)


def elimination_chain(G: LabeledHypergraph) -> list[LabeledHypergraph]:
    """``G_1 = G``, ``G_{i+1} = G_i|_{v_i=0}``; each ``v_i`` is index 0 of ``G_i``."""
    chain = []
    cur = G
    while cur.n:
        chain.append(cur)
        cur, _ = _rebuild(cur, {0: PinnedValue.ZERO})
    return chain


def _step(job) -> tuple[float, int]:
    plan, G, L, memo = job
    rec = SpinRecursion(plan, memo)
    r = rec.ratio(G, 0, L)
    return r, rec.nodes


def partition_function(
    G: LabeledHypergraph,
    p: SpinParams,
    eps: float | None,
    *,
    force: bool = False,
    max_depth: int | None = None,
    memo: bool = False,
    threads: int = 1,
) -> PartitionEstimate:
    """Estimate ``Z(G) = prod_e beta(e) * prod_i (1 + R(G_i, v_i, L))``.

    The product of ``beta`` is the weight of the all-zero configuration, and
    each factor ``1 + R_i`` undoes conditioning one more vertex to 0.
    """
    t0 = time.perf_counter()
    _require_spin(G)
    plan = plan_constants(p)
    problems = check_region(G, plan)
    if problems and not force:
        raise OutsideRegion("; ".join(problems))
    if problems and G.max_degree > plan.delta:
        raise InvalidArgument(problems[0])
    guaranteed = not problems
    if not guaranteed and plan.lam >= 1.0:
        warnings.warn("external field >= 1: running without the decay guarantee", stacklevel=2)
    if max_depth is None:
        if eps is None:
            raise InvalidArgument("either eps or max_depth is required")
        L = depth_for_accuracy(plan, G.n, eps)
    else:
        if eps is not None:
            check_epsilon(eps)
        L = int(max_depth)
        guaranteed = False
    plan = plan.with_depth(L, guaranteed)

    anchor = math.fsum(math.log(e.beta_f) for e in G.edges)
    chain = elimination_chain(G)
    results = evaluate_steps(_step, [(plan, Gi, L, memo) for Gi in chain], threads)
    ratios = [r for r, _ in results]
    steps = [k for _, k in results]
    return PartitionEstimate(
        "spin", anchor + sum_log1p(ratios), ratios, L, sum(steps), (time.perf_counter() - t0) * 1000.0,
        guaranteed, plan, steps,
    )


def amortized_decay_rate(
    edges: Sequence[tuple[float, float, Sequence[float], Sequence[float]]], plan: SpinDecayPlan
) -> float:
    """Edge-size weighted decay rate of the recursion at given child ratios.

    Each entry of ``edges`` is ``(beta_i, gamma_i, r0, r1)`` where ``r0``
    holds ``r0_i1..r0_iw`` and ``r1`` holds ``r1_i2..r1_iw`` (one shorter).
    With potential ``1/x`` each term ``(r/f) |df/dr|`` has a closed form.
    """
    c = plan.c
    total = 0.0
    for beta, gamma, r0, r1 in edges:
        w = len(r0)
        if w == 0:
            continue
        if len(r1) != w - 1:
            raise InvalidArgument("r1 must hold the ratios for j = 2..w")
        x = r0[0] / (1.0 + r0[0])
        ys = [r / (1.0 + r) for r in r1]
        zs = [r / (1.0 + r) for r in r0[1:]]
        one_minus_a = (1.0 - gamma) * x * math.prod(ys)
        one_minus_b = (1.0 - beta) * (1.0 - x) * math.prod(1.0 - z for z in zs)
        a = 1.0 - one_minus_a
        b = 1.0 - one_minus_b
        first = abs((1.0 - x) * one_minus_a + x * one_minus_b - one_minus_a * one_minus_b) / (a * b)
        rest = one_minus_a / a * sum(1.0 - y for y in ys) + one_minus_b / b * sum(zs)
        total += w**c * (first + rest)
    return total


def edge_decay_term(w: int, x: float, y: float, z: float, beta: float) -> float:
    """``V_w(x, y, z)``: the per-edge quantity whose ``w^c`` multiple must stay below :func:`edge_decay_ceiling`."""
    yw = y ** (w - 1)
    zw = (1.0 - z) ** (w - 1)
    return (1.0 - x) * x * (yw + zw) + beta * (w - 1) * x * yw * (1.0 - y) + beta * (w - 1) * (1.0 - x) * zw * z


def edge_decay_ceiling(plan: SpinDecayPlan) -> float:
    b = plan.beta_c
    return plan.alpha * b * math.exp(1.0 / (2.0 * b) - 1.0)
