"""Result type and plumbing shared by the hardcore and two-spin engines."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .errors import InvalidArgument

# Guards floor(1 + c*log_{1/alpha} w) against rounding just above an integer.
FLOOR_NUDGE = 1e-12


@dataclass
class PartitionEstimate:
    """Log-space estimate of a partition function plus run diagnostics."""

    model: str
    log_z: float
    ratios: list[float]
    depth: int
    nodes: int
    elapsed_ms: float
    guaranteed: bool
    plan: Any
    step_nodes: list[int] = field(default_factory=list)

    @property
    def z(self) -> float:
        if self.log_z == -math.inf:
            return 0.0
        try:
            return math.exp(self.log_z)
        except OverflowError:
            return math.inf


def check_epsilon(eps: float) -> float:
    if not (isinstance(eps, (int, float)) and 0 < eps < 0.5):
        raise InvalidArgument(f"epsilon must lie in (0, 1/2), got {eps!r}")
    return float(eps)


def depth_budget(big_c: float, alpha: float, n: int, eps: float) -> int:
    """``ceil(ln(2 C n / eps) / ln(1/alpha))``, at least 1."""
    eps = check_epsilon(eps)
    if not 0 < alpha < 1:
        raise InvalidArgument(f"decay rate must lie in (0, 1) to size the depth budget, got {alpha!r}")
    if n <= 0:
        return 1
    L = math.ceil(math.log(2.0 * big_c * n / eps) / math.log(1.0 / alpha))
    return max(1, L)


def depth_step(w: int, c: float, alpha: float) -> int:
    """Budget consumed by an edge with ``w`` other vertices: ``floor(1 + c log_{1/alpha} w)``."""
    if w <= 1:
        return 1
    x = c * math.log(w) / math.log(1.0 / alpha)
    return max(1, math.floor(1.0 + x - FLOOR_NUDGE))


def evaluate_steps(fn: Callable[[Any], Any], jobs: Sequence[Any], threads: int = 1) -> list[Any]:
    """Map ``fn`` over the telescoping steps, results in step order.

    Every step is a self-contained pure computation, so the output does not
    depend on ``threads``.
    """
    if threads < 1:
        raise InvalidArgument(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(jobs) < 2:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def sum_log1p(ratios: Sequence[float]) -> float:
    return math.fsum(math.log1p(r) for r in ratios)
