"""Brute-force exact partition functions and marginals.

Everything is computed in exact rational arithmetic: decimal labels and
activities are read as :class:`fractions.Fraction`, so the oracle itself
contributes no rounding error to any comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Union

from .errors import DegenerateMarginal, InvalidArgument, OracleTooLarge
from .hypergraph import LabeledHypergraph

HARDCORE_MAX_N = 25
SPIN_MAX_N = 22

Number = Union[int, float, str, Decimal, Fraction]


def as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(str(x)) if isinstance(x, Decimal) else Fraction(x)


@dataclass(frozen=True)
class ExactResult:
    z: Fraction
    marginals: tuple[Fraction, ...]

    @property
    def log_z(self) -> float:
        if self.z == 0:
            return -math.inf
        # exact log of a big rational: split numerator and denominator
        return _log_int(self.z.numerator) - _log_int(self.z.denominator)

    def ratio(self, v: int) -> Fraction:
        p = self.marginals[v]
        if self.z == 0 or p == 1:
            raise DegenerateMarginal(f"Pr[vertex {v} unoccupied] = 0")
        return p / (1 - p)


def _log_int(k: int) -> float:
    bits = k.bit_length()
    if bits < 1000:
        return math.log(k)
    shift = bits - 900
    return math.log(k >> shift) + shift * math.log(2)


def exact_hardcore(G: LabeledHypergraph, lam: Number) -> ExactResult:
    """Sum ``lam**|I|`` over the independent sets of ``G`` by pruned DFS.

    Counts are accumulated per set size as integers, so the activity only
    enters at the very end.
    """
    if G.n > HARDCORE_MAX_N:
        raise OracleTooLarge(f"n={G.n} exceeds the hardcore oracle guard {HARDCORE_MAX_N}")
    lam = as_fraction(lam)
    n = G.n
    if G.has_empty_edge():
        return ExactResult(Fraction(0), tuple(Fraction(0) for _ in range(n)))
    # an edge is decided once its largest vertex is decided
    closing: list[list[int]] = [[] for _ in range(n)]
    for e in G.edges:
        mask = 0
        for u in e.vertices:
            mask |= 1 << u
        closing[e.vertices[-1]].append(mask)

    count = [0] * (n + 1)
    per_vertex = [[0] * (n + 1) for _ in range(n)]

    def dfs(u: int, chosen: int, size: int) -> None:
        if u == n:
            count[size] += 1
            bits = chosen
            while bits:
                low = bits & -bits
                per_vertex[low.bit_length() - 1][size] += 1
                bits ^= low
            return
        dfs(u + 1, chosen, size)
        with_u = chosen | (1 << u)
        for mask in closing[u]:
            if mask & with_u == mask:
                return
        dfs(u + 1, with_u, size + 1)

    dfs(0, 0, 0)
    powers = [lam**k for k in range(n + 1)]
    z = sum(c * p for c, p in zip(count, powers))
    marg = tuple(sum(c * p for c, p in zip(row, powers)) / z for row in per_vertex)
    return ExactResult(z, marg)


def exact_spin(G: LabeledHypergraph, lam: Number) -> ExactResult:
    """Sum ``w(sigma)`` over all ``2**n`` configurations.

    An edge that has become empty (all its vertices pinned away) is a
    constant factor ``beta * gamma``: pinning always sets one of the two
    labels to 1, so this is the weight the pinned vertices committed to.
    """
    if G.n > SPIN_MAX_N:
        raise OracleTooLarge(f"n={G.n} exceeds the spin oracle guard {SPIN_MAX_N}")
    lam = as_fraction(lam)
    n = G.n
    const = Fraction(1)
    edges = []
    for e in G.edges:
        b, g = Fraction(e.beta), Fraction(e.gamma)
        if not e.vertices:
            const *= b * g
            continue
        if b == 1 and g == 1:
            continue
        mask = 0
        for u in e.vertices:
            mask |= 1 << u
        edges.append((mask, b, g))
    powers = [lam**k for k in range(n + 1)]
    z = Fraction(0)
    marg = [Fraction(0)] * n
    for sigma in range(1 << n):
        w = powers[sigma.bit_count()]
        for mask, b, g in edges:
            hit = sigma & mask
            if hit == 0:
                w *= b
            elif hit == mask:
                w *= g
        if w == 0:
            continue
        z += w
        bits = sigma
        while bits:
            low = bits & -bits
            marg[low.bit_length() - 1] += w
            bits ^= low
    z *= const
    if z == 0:
        return ExactResult(Fraction(0), tuple(Fraction(0) for _ in range(n)))
    return ExactResult(z, tuple(m * const / z for m in marg))


def exact_ratio(G: LabeledHypergraph, v: int, model: str, lam: Number) -> Fraction:
    """Exact ``Pr[v occupied] / Pr[v unoccupied]`` under the chosen model."""
    if not 0 <= v < G.n:
        raise InvalidArgument(f"vertex {v} out of range for n={G.n}")
    if model == "hardcore":
        res = exact_hardcore(G, lam)
    elif model == "spin":
        res = exact_spin(G, lam)
    else:
        raise InvalidArgument(f"unknown model {model!r}")
    return res.ratio(v)
