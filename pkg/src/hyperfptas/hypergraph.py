"""Immutable labeled hypergraphs and the graph modifications used by both recursions.

Vertices are the integers ``0..n-1``. Every edge carries a pair of labels
``(beta, gamma)`` stored as normalized decimal strings together with a float
cache; hardcore instances use ``beta=1, gamma=0`` throughout.

Edges are kept in a canonical sorted order, so two instances with the same
vertex count and the same multiset of labeled edges compare (and hash) equal.
"Incident edge ordering" everywhere in this package means ascending position
in that canonical order, and the vertices of an edge are always ascending.

Every modification removes vertices and shifts the survivors down densely,
preserving their relative order; :func:`vertex_map` reproduces the old->new
index map for any set of removed vertices.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from decimal import Decimal, InvalidOperation
from typing import NamedTuple, Union

from .errors import InvalidArgument

__all__ = [
    "Edge",
    "LabeledHypergraph",
    "PinnedValue",
    "canonical_encode",
    "hardcore_child",
    "normalize_decimal",
    "pin",
    "pivot_component",
    "remove_edge",
    "remove_vertex",
    "spin_children",
    "split_vertex",
    "vertex_map",
]

LabelLike = Union[str, int, float, Decimal]


def normalize_decimal(value: LabelLike) -> str:
    """Return the canonical decimal spelling of ``value`` (``"0.750"`` -> ``"0.75"``)."""
    if isinstance(value, float):
        value = repr(value)
    try:
        d = Decimal(value) if not isinstance(value, Decimal) else value
    except (InvalidOperation, TypeError, ValueError):
        raise InvalidArgument(f"not a decimal: {value!r}") from None
    if not d.is_finite():
        raise InvalidArgument(f"not a finite decimal: {value!r}")
    if d.is_zero():
        return "0"
    text = format(d.normalize(), "f")
    return text


class PinnedValue(enum.Enum):
    ZERO = 0
    ONE = 1


class Edge(NamedTuple):
    """One hyperedge: ascending vertex tuple plus its ``(beta, gamma)`` labels."""

    vertices: tuple[int, ...]
    beta: str = "1"
    gamma: str = "0"
    beta_f: float = 1.0
    gamma_f: float = 0.0

    @classmethod
    def make(cls, vertices: Iterable[int], beta: LabelLike = "1", gamma: LabelLike = "0") -> "Edge":
        b = normalize_decimal(beta)
        g = normalize_decimal(gamma)
        return cls(tuple(sorted(set(int(u) for u in vertices))), b, g, float(b), float(g))

    @property
    def arity(self) -> int:
        return len(self.vertices)

    def relabeled(self, beta: str | None = None, gamma: str | None = None) -> "Edge":
        b = self.beta if beta is None else beta
        g = self.gamma if gamma is None else gamma
        return Edge(self.vertices, b, g, float(b), float(g))


class LabeledHypergraph:
    """An immutable hypergraph on vertices ``0..n-1`` with labeled edges.

    ``edges`` may mix :class:`Edge` objects and plain vertex iterables; the
    latter become hardcore edges (``beta=1, gamma=0``). Duplicate vertices
    inside an edge are collapsed; duplicate edges are kept.
    """

    __slots__ = ("n", "edges", "_hash")

    def __init__(self, n: int, edges: Iterable[Edge | Iterable[int]] = ()):
        if n < 0:
            raise InvalidArgument(f"vertex count must be non-negative, got {n}")
        built = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge.make(e)
            else:
                e = Edge.make(e.vertices, e.beta, e.gamma)
            for u in e.vertices:
                if not 0 <= u < n:
                    raise InvalidArgument(f"edge {e.vertices} references vertex {u} >= n={n}")
            built.append(e)
        built.sort()
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(built)
        self._hash = None

    @classmethod
    def _raw(cls, n: int, edges: tuple[Edge, ...]) -> "LabeledHypergraph":
        # trusted constructor: edges already validated and sorted
        g = cls.__new__(cls)
        g.n = n
        g.edges = edges
        g._hash = None
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    def incident(self, v: int) -> list[int]:
        """Indices of the edges containing ``v``, ascending."""
        return [k for k, e in enumerate(self.edges) if v in e.vertices]

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e.vertices)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for u in e.vertices:
                deg[u] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    @property
    def is_hardcore(self) -> bool:
        return all(e.beta == "1" and e.gamma == "0" for e in self.edges)

    def has_empty_edge(self) -> bool:
        return any(not e.vertices for e in self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledHypergraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.edges))
        return self._hash

    def __repr__(self) -> str:
        parts = []
        for e in self.edges:
            verts = "{" + ",".join(map(str, e.vertices)) + "}"
            parts.append(verts if (e.beta, e.gamma) == ("1", "0") else f"{verts}:{e.beta}/{e.gamma}")
        return f"LabeledHypergraph(n={self.n}, edges=[{', '.join(parts)}])"

    def __reduce__(self):
        return (_unpickle, (self.n, self.edges))


def _unpickle(n, edges):
    return LabeledHypergraph._raw(n, tuple(Edge(*e) for e in edges))


# Vertex actions understood by _rebuild; None means plain deletion.
_KEEP = object()


def _check_vertex(G: LabeledHypergraph, v: int) -> None:
    if not isinstance(v, int) or not 0 <= v < G.n:
        raise InvalidArgument(f"vertex {v!r} out of range for n={G.n}")


def vertex_map(n: int, removed: Iterable[int]) -> list[int | None]:
    """Dense shift-down map ``old -> new`` (``None`` for removed vertices)."""
    gone = set(removed)
    out: list[int | None] = []
    k = 0
    for u in range(n):
        if u in gone:
            out.append(None)
        else:
            out.append(k)
            k += 1
    return out


def _rebuild(G: LabeledHypergraph, actions: dict, dropped: Iterable[int] = ()) -> tuple[LabeledHypergraph, list[int]]:
    """Delete the vertices keyed in ``actions`` and the edges in ``dropped``.

    ``actions[u]`` is ``None`` (delete u from its edges, labels unchanged),
    ``PinnedValue.ZERO`` (also set gamma=1 on its edges) or
    ``PinnedValue.ONE`` (also set beta=1).
    """
    new_index = [-1] * G.n
    k = 0
    for u in range(G.n):
        if u not in actions:
            new_index[u] = k
            k += 1
    dropped = set(dropped)
    zero, one = PinnedValue.ZERO, PinnedValue.ONE
    edges = []
    for idx, e in enumerate(G.edges):
        if idx in dropped:
            continue
        verts = []
        beta, gamma, bf, gf = e.beta, e.gamma, e.beta_f, e.gamma_f
        for u in e.vertices:
            a = actions.get(u, _KEEP)
            if a is _KEEP:
                verts.append(new_index[u])
            elif a is zero:
                gamma, gf = "1", 1.0
            elif a is one:
                beta, bf = "1", 1.0
        edges.append(Edge(tuple(verts), beta, gamma, bf, gf))
    edges.sort()
    return LabeledHypergraph._raw(k, tuple(edges)), new_index


def remove_vertex(G: LabeledHypergraph, v: int) -> LabeledHypergraph:
    """``G - v``: delete ``v`` from the vertex set and from every edge.

    Edges keep their labels; an edge that becomes empty stays in the instance.
    """
    _check_vertex(G, v)
    return _rebuild(G, {v: None})[0]


def remove_edge(G: LabeledHypergraph, e: int) -> LabeledHypergraph:
    if not isinstance(e, int) or not 0 <= e < G.m:
        raise InvalidArgument(f"edge index {e!r} out of range for m={G.m}")
    return LabeledHypergraph._raw(G.n, G.edges[:e] + G.edges[e + 1 :])


def pin(G: LabeledHypergraph, v: int, b: PinnedValue) -> LabeledHypergraph:
    """``G|_{v=b}``: delete ``v``; edges that contained it get gamma=1 (b=0) or beta=1 (b=1)."""
    _check_vertex(G, v)
    if not isinstance(b, PinnedValue):
        b = PinnedValue(b)
    return _rebuild(G, {v: b})[0]


def split_vertex(G: LabeledHypergraph, v: int) -> tuple[LabeledHypergraph, list[int]]:
    """Replace ``v`` by one private copy per incident edge.

    The survivors of ``V - v`` keep their shift-down indices ``0..n-2``; the
    copies are appended as ``n-1, ..., n-2+d`` in incident-edge order.
    Returns the new instance and the copy indices.
    """
    _check_vertex(G, v)
    inc = G.incident(v)
    if not inc:
        raise InvalidArgument(f"vertex {v} is isolated and cannot be split")
    shift = vertex_map(G.n, [v])
    copies = [G.n - 1 + k for k in range(len(inc))]
    copy_of = dict(zip(inc, copies))
    edges = []
    for idx, e in enumerate(G.edges):
        verts = [shift[u] for u in e.vertices if u != v]
        if idx in copy_of:
            verts.append(copy_of[idx])
        edges.append(Edge(tuple(verts), e.beta, e.gamma, e.beta_f, e.gamma_f))
    edges.sort()
    return LabeledHypergraph._raw(G.n - 1 + len(inc), tuple(edges)), copies


def _check_ordinals(G: LabeledHypergraph, v: int, i: int, j: int) -> list[int]:
    _check_vertex(G, v)
    inc = G.incident(v)
    if not 1 <= i <= len(inc):
        raise InvalidArgument(f"edge ordinal {i} out of range 1..{len(inc)}")
    w = len(G.edges[inc[i - 1]].vertices) - 1
    if not 1 <= j <= w:
        raise InvalidArgument(f"vertex ordinal {j} out of range 1..{w}")
    return inc


def _hardcore_child(G: LabeledHypergraph, v: int, inc: Sequence[int], i: int, j: int):
    others = [u for u in G.edges[inc[i - 1]].vertices if u != v]
    pivot = others[j - 1]
    actions = {v: None}
    for u in others[: j - 1]:
        actions[u] = None
    child, new_index = _rebuild(G, actions, inc[:i])
    return child, new_index[pivot]


def hardcore_child(G: LabeledHypergraph, v: int, i: int, j: int) -> tuple[LabeledHypergraph, int]:
    """The instance ``G_ij`` of the hardcore recursion and its pivot ``v_ij``.

    ``i`` and ``j`` are 1-based ordinals: ``e_i`` is the i-th incident edge of
    ``v`` and ``v_ij`` the j-th vertex of ``e_i - v``. The copies of ``v`` are
    all gone in ``G_ij``: copies ``k >= i`` are deleted by definition and
    copies ``k < i`` are isolated once their edges are removed, so they are
    dropped too (isolated vertices do not influence any marginal).
    """
    inc = _check_ordinals(G, v, i, j)
    return _hardcore_child(G, v, inc, i, j)


def _spin_children(G: LabeledHypergraph, v: int, inc: Sequence[int], i: int, j: int, want=(True, True)):
    zero, one = PinnedValue.ZERO, PinnedValue.ONE
    others = [u for u in G.edges[inc[i - 1]].vertices if u != v]
    pivot = others[j - 1]
    # copies of v: k < i pinned to 0, k > i pinned to 1, copy i leaves with e_i.
    # All copies live in distinct edges, so this is a per-edge relabel.
    edges = list(G.edges)
    for k, idx in enumerate(inc, start=1):
        if k < i:
            edges[idx] = edges[idx].relabeled(gamma="1")
        elif k > i:
            edges[idx] = edges[idx].relabeled(beta="1")
    base = LabeledHypergraph._raw(G.n, tuple(edges))
    out = []
    for b, wanted in zip((zero, one), want):
        if not wanted:
            out.append(None)
            continue
        actions = {v: None}
        for u in others[: j - 1]:
            actions[u] = b
        child, new_index = _rebuild(base, actions, (inc[i - 1],))
        out.append(child)
    return out[0], out[1], new_index[pivot]


def spin_children(G: LabeledHypergraph, v: int, i: int, j: int) -> tuple[LabeledHypergraph, LabeledHypergraph, int]:
    """The pair ``(G0_ij, G1_ij)`` of the two-state spin recursion and pivot ``v_ij``.

    Both start from ``G'`` with copies ``v_k`` (k<i) pinned to 0, copies
    (k>i) pinned to 1 and ``e_i`` removed together with its private copy;
    ``G0`` then pins ``v_i1..v_i(j-1)`` to 0, ``G1`` pins them to 1. For
    ``j=1`` the two instances coincide.
    """
    inc = _check_ordinals(G, v, i, j)
    return _spin_children(G, v, inc, i, j)


def pivot_component(G: LabeledHypergraph, v: int) -> tuple[LabeledHypergraph, int]:
    """Restrict ``G`` to the connected component of ``v``.

    Empty edges are discarded, as is everything not reachable from ``v``.
    Returns the restricted instance and the new index of ``v``.
    """
    _check_vertex(G, v)
    adj: list[list[int]] = [[] for _ in range(G.n)]
    for k, e in enumerate(G.edges):
        for u in e.vertices:
            adj[u].append(k)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for k in adj[u]:
            for x in G.edges[k].vertices:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
    if len(seen) == G.n and all(e.vertices for e in G.edges):
        return G, v
    comp = sorted(seen)
    index = {u: k for k, u in enumerate(comp)}
    edges = [
        Edge(tuple(index[u] for u in e.vertices), e.beta, e.gamma, e.beta_f, e.gamma_f)
        for e in G.edges
        if e.vertices and e.vertices[0] in index
    ]
    edges.sort()
    return LabeledHypergraph._raw(len(comp), tuple(edges)), index[v]


def canonical_encode(G: LabeledHypergraph) -> bytes:
    """Deterministic byte key: equal for equal instances, distinct otherwise."""
    body = ";".join(",".join(map(str, e.vertices)) + ":" + e.beta + ":" + e.gamma for e in G.edges)
    return f"hg1|{G.n}|{body}".encode("ascii")
