"""Instance files, seeded generators and the edge-cover reduction.

File format (one directive per line, ``#`` starts a comment)::

    hgraph 1
    model hardcore|spin
    lambda <decimal>
    n <vertex count>
    e v1 v2 ...              # hardcore edge
    e v1 v2 ... : beta gamma # spin edge

Serialization is canonical: fixed header order, normalized decimals, edges
and their vertices sorted. ``parse(serialize(G, spec))`` returns ``(G, spec)``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from decimal import Decimal

from .errors import GenerationError, InvalidArgument, ParseError, ReductionError
from .hypergraph import Edge, LabeledHypergraph, normalize_decimal

FORMAT_TAG = "hgraph"
FORMAT_VERSION = 1
MAX_FRACTION_DIGITS = 12
MODELS = ("hardcore", "spin")

_DECIMAL = re.compile(r"^\d+(?:\.(\d+))?$")
_INT = re.compile(r"^\d+$")


@dataclass(frozen=True)
class ModelSpec:
    model: str
    lam: str
    mode: str = "guaranteed"

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidArgument(f"model must be one of {MODELS}, got {self.model!r}")
        if self.mode not in ("guaranteed", "force"):
            raise InvalidArgument(f"mode must be 'guaranteed' or 'force', got {self.mode!r}")
        object.__setattr__(self, "lam", normalize_decimal(self.lam))

    @property
    def lam_f(self) -> float:
        return float(self.lam)


class Xorshift64Star:
    """xorshift64* (Vigna): 64-bit xorshift state, multiplicative output scrambler.

    Seeded directly with the given integer; seed 0 maps to a fixed non-zero
    state because the all-zero state is a fixed point.
    """

    NAME = "xorshift64*"
    _MASK = (1 << 64) - 1
    _MULT = 0x2545F4914F6CDD1D
    _ZERO_SEED = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        s = seed & self._MASK
        self.state = s if s else self._ZERO_SEED

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & self._MASK
        x ^= x >> 27
        self.state = x
        return (x * self._MULT) & self._MASK

    def below(self, k: int) -> int:
        """Integer in ``[0, k)`` (plain modulo reduction)."""
        return self.next_u64() % k

    def uniform(self) -> float:
        """Float in ``[0, 1)`` from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def _decimal_token(tok: str, line: int, col: int, what: str) -> str:
    m = _DECIMAL.match(tok)
    if not m:
        raise ParseError(f"malformed decimal {tok!r} for {what}", line, col)
    if m.group(1) and len(m.group(1)) > MAX_FRACTION_DIGITS:
        raise ParseError(f"{what} has more than {MAX_FRACTION_DIGITS} fractional digits", line, col)
    return normalize_decimal(tok)


def _tokens(raw: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with 1-based columns; ``#`` ends the line."""
    text = raw.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", text)]


def parse(text: str) -> tuple[LabeledHypergraph, ModelSpec]:
    """Read an instance file; every error carries its line and column."""
    header: dict[str, str] = {}
    order = ["hgraph", "model", "lambda", "n"]
    n = None
    model = None
    edges: list[Edge] = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        key, col = toks[0]
        if len(header) < len(order):
            expected = order[len(header)]
            if key != expected:
                raise ParseError(f"expected '{expected}' directive, got {key!r}", lineno, col)
            if len(toks) != 2:
                raise ParseError(f"'{key}' takes exactly one value", lineno, col)
            val, vcol = toks[1]
            if key == "hgraph":
                if val != str(FORMAT_VERSION):
                    raise ParseError(f"unsupported format version {val!r}", lineno, vcol)
            elif key == "model":
                if val not in MODELS:
                    raise ParseError(f"unknown model {val!r}", lineno, vcol)
                model = val
            elif key == "lambda":
                val = _decimal_token(val, lineno, vcol, "lambda")
                if Decimal(val) <= 0:
                    raise ParseError("lambda must be positive", lineno, vcol)
            elif key == "n":
                if not _INT.match(val):
                    raise ParseError(f"malformed vertex count {val!r}", lineno, vcol)
                n = int(val)
            header[key] = val
            continue
        if key != "e":
            raise ParseError(f"expected an edge line 'e ...', got {key!r}", lineno, col)
        body = toks[1:]
        labels = None
        if any(t == ":" for t, _ in body):
            cut = next(k for k, (t, _) in enumerate(body) if t == ":")
            labels = body[cut + 1 :]
            body = body[:cut]
            if model == "hardcore":
                raise ParseError("hardcore edges take no labels", lineno, toks[1 + cut][1])
            if len(labels) != 2:
                raise ParseError("expected ': beta gamma'", lineno, toks[1 + cut][1])
        elif model == "spin":
            raise ParseError("spin edges need ': beta gamma'", lineno, col)
        verts = []
        for tok, tcol in body:
            if not _INT.match(tok):
                raise ParseError(f"malformed vertex index {tok!r}", lineno, tcol)
            u = int(tok)
            if u >= n:
                raise ParseError(f"vertex {u} out of range for n={n}", lineno, tcol)
            verts.append(u)
        if labels is None:
            edges.append(Edge.make(verts))
            continue
        if not verts:
            raise ParseError("spin edges must contain at least one vertex", lineno, col)
        (btok, bcol), (gtok, gcol) = labels
        beta = _decimal_token(btok, lineno, bcol, "beta")
        gamma = _decimal_token(gtok, lineno, gcol, "gamma")
        if not 0 < Decimal(beta) <= 1:
            raise ParseError(f"beta={beta} outside (0, 1]", lineno, bcol)
        if not 0 <= Decimal(gamma) <= 1:
            raise ParseError(f"gamma={gamma} outside [0, 1]", lineno, gcol)
        edges.append(Edge.make(verts, beta, gamma))
    if len(header) < len(order):
        raise ParseError(f"missing '{order[len(header)]}' directive", lineno + 1, 1)
    return LabeledHypergraph(n, edges), ModelSpec(model, header["lambda"])


def serialize(G: LabeledHypergraph, spec: ModelSpec, comments: Iterable[str] = ()) -> str:
    """Canonical text form; ``comments`` are emitted as ``#`` lines after the header tag."""
    lines = [f"{FORMAT_TAG} {FORMAT_VERSION}"]
    lines += [f"# {c}" for c in comments]
    lines += [f"model {spec.model}", f"lambda {spec.lam}", f"n {G.n}"]
    for e in G.edges:
        verts = "".join(f" {u}" for u in e.vertices)
        if spec.model == "spin":
            lines.append(f"e{verts} : {e.beta} {e.gamma}")
        else:
            if (e.beta, e.gamma) != ("1", "0"):
                raise InvalidArgument(f"edge {e.vertices} carries spin labels in a hardcore instance")
            lines.append(f"e{verts}")
    return "\n".join(lines) + "\n"


def gen_random(
    n: int,
    m: int,
    max_degree: int,
    max_arity: int,
    seed: int,
    model: str = "hardcore",
    label_range: tuple[float, float] = (0.7, 1.0),
    lam: str = "1",
    ising: bool = False,
) -> tuple[LabeledHypergraph, ModelSpec]:
    """Seeded random instance with every degree <= ``max_degree``.

    Each edge draws an arity uniformly from ``[2, max_arity]`` and that many
    distinct vertices by partial Fisher-Yates; candidates hitting a
    saturated vertex are rejected. Spin labels are uniform in
    ``label_range`` rounded to 6 decimals (``ising=True`` sets gamma=beta).
    """
    if model not in MODELS:
        raise InvalidArgument(f"unknown model {model!r}")
    if n < 0 or m < 0 or max_degree < 1 or max_arity < 2:
        raise GenerationError("need n, m >= 0, max_degree >= 1 and max_arity >= 2")
    if m and (n < 2 or 2 * m > n * max_degree):
        raise GenerationError(f"cannot place {m} edges of arity >= 2 on {n} vertices with max degree {max_degree}")
    lo, hi = label_range
    if not 0 < lo <= hi <= 1:
        raise GenerationError(f"label range {label_range} not inside (0, 1]")
    rng = Xorshift64Star(seed)
    top = min(max_arity, n)
    deg = [0] * n
    edges: list[Edge] = []
    budget = 1000 * (m + 1)
    while len(edges) < m:
        budget -= 1
        if budget < 0:
            raise GenerationError(f"gave up after rejecting too many candidate edges ({len(edges)}/{m} placed)")
        k = 2 + rng.below(max_arity - 1)
        if k > top:
            continue
        pool = list(range(n))
        for a in range(k):
            b = a + rng.below(n - a)
            pool[a], pool[b] = pool[b], pool[a]
        verts = pool[:k]
        if any(deg[u] >= max_degree for u in verts):
            continue
        for u in verts:
            deg[u] += 1
        if model == "spin":
            beta = f"{lo + rng.uniform() * (hi - lo):.6f}"
            gamma = beta if ising else f"{lo + rng.uniform() * (hi - lo):.6f}"
            edges.append(Edge.make(verts, beta, gamma))
        else:
            edges.append(Edge.make(verts))
    return LabeledHypergraph(n, edges), ModelSpec(model, lam)


def generator_comment(seed: int, **params) -> str:
    extra = " ".join(f"{k}={v}" for k, v in params.items())
    return f"generator {Xorshift64Star.NAME} seed={seed} {extra}".rstrip()


EDGE_COVER_NOTE = (
    "hypergraph vertex k is normal edge edges[k]; each normal vertex becomes the hyperedge of its incident edges. "
    "Independent sets are complements of edge covers: with cover-edge weight w, "
    "sum over covers C of w^|C| = w^m * Z(lambda = 1/w); at lambda=1, Z counts edge covers."
)


def edge_cover_reduction(graph: Mapping[int, Iterable[int]] | Sequence[Iterable[int]]) -> tuple[LabeledHypergraph, str]:
    """Hypergraph whose hardcore partition function counts edge covers of ``graph``.

    ``graph`` is an adjacency list (sequence or mapping over vertices
    ``0..N-1``). Normal edges become hypergraph vertices in ascending
    ``(u, v)`` order; every normal vertex becomes the hyperedge of its
    incident edges.
    """
    items = graph.items() if isinstance(graph, Mapping) else enumerate(graph)
    adj = {int(u): [int(x) for x in nbrs] for u, nbrs in items}
    N = max(adj, default=-1) + 1
    for u in range(N):
        adj.setdefault(u, [])
    pairs = set()
    for u, nbrs in adj.items():
        for x in nbrs:
            if x == u:
                raise ReductionError(f"self-loop at vertex {u}")
            if x not in adj:
                raise ReductionError(f"neighbour {x} of {u} is not a vertex")
            pairs.add((min(u, x), max(u, x)))
    edges = sorted(pairs)
    index = {p: k for k, p in enumerate(edges)}
    hyper = []
    for u in range(N):
        inc = [index[(min(u, x), max(u, x))] for x in set(adj[u])]
        if not inc:
            raise ReductionError(f"vertex {u} is isolated; it admits no cover")
        hyper.append(sorted(inc))
    return LabeledHypergraph(len(edges), hyper), f"{EDGE_COVER_NOTE} edges={edges}"


def parse_edge_list(text: str) -> list[list[int]]:
    """Adjacency list from ``u v`` lines (optional ``n N`` line for trailing isolated vertices)."""
    pairs = []
    N = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        if toks[0][0] == "n" and len(toks) == 2 and _INT.match(toks[1][0]):
            N = max(N, int(toks[1][0]))
            continue
        if len(toks) != 2 or not all(_INT.match(t) for t, _ in toks):
            raise ParseError("expected 'u v'", lineno, toks[0][1])
        u, v = int(toks[0][0]), int(toks[1][0])
        pairs.append((u, v))
        N = max(N, u + 1, v + 1)
    adj: list[list[int]] = [[] for _ in range(N)]
    for u, v in pairs:
        adj[u].append(v)
        adj[v].append(u)
    return adj
