"""Finite quivers, evolutions, and the ancestor preorder.

A quiver is a finite directed multigraph. Edges are (tail, head) pairs and
point from a child to one of its parents, so walking forward along edges
from a vertex visits its ancestors. Loops and parallel edges are allowed;
parallel edges never influence reachability or anything derived from it.

An evolution is a directed path recorded ancestor-first: the sequence
(A0, A1, ..., Am) is valid when each step Ak -> A(k-1) is backed by an edge
with tail Ak and head A(k-1). A is an ancestor of B exactly when some
evolution runs from A to B, i.e. when A is reachable from B along edges.
Isotypy (mutual ancestry) partitions the vertices into the strongly
connected components.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import InputError

_CACHE = 8192


@dataclass(frozen=True)
class Quiver:
    """Immutable finite quiver over string vertex ids.

    ``edges[i] = (tail, head)`` reads "tail descends from head". Optional
    display labels ride along but take no part in any computation.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    labels: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.vertices:
            raise InputError("a quiver needs at least one vertex")
        seen: set[str] = set()
        for v in self.vertices:
            if v in seen:
                raise InputError(f"duplicate vertex id {v!r}")
            seen.add(v)
        for tail, head in self.edges:
            if tail not in seen:
                raise InputError(f"edge ({tail!r}, {head!r}): unknown tail vertex")
            if head not in seen:
                raise InputError(f"edge ({tail!r}, {head!r}): unknown head vertex")
        for v, _ in self.labels:
            if v not in seen:
                raise InputError(f"label attached to unknown vertex {v!r}")

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str]],
        labels: Mapping[str, str] | None = None,
    ) -> "Quiver":
        lab = tuple(sorted((labels or {}).items()))
        return cls(tuple(vertices), tuple((t, h) for t, h in edges), lab)

    @property
    def vertex_set(self) -> frozenset[str]:
        return _vertex_set(self)

    def check_vertex(self, v: str) -> None:
        if v not in _vertex_set(self):
            raise InputError(f"unknown vertex id {v!r}")

    def out_neighbors(self, v: str) -> tuple[str, ...]:
        """Distinct heads of edges with tail ``v`` (direct parents), sorted."""
        self.check_vertex(v)
        return _adjacency(self)[0][v]

    def in_neighbors(self, v: str) -> tuple[str, ...]:
        """Distinct tails of edges with head ``v`` (direct children), sorted."""
        self.check_vertex(v)
        return _adjacency(self)[1][v]

    def has_edge(self, tail: str, head: str) -> bool:
        return (tail, head) in _edge_set(self)

    def __repr__(self) -> str:  # the default dataclass repr drowns test output
        return f"Quiver({len(self.vertices)} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class Condensation:
    """Partition of a quiver into isotypy classes plus the class-level DAG.

    ``classes`` are the strongly connected components, each sorted, and the
    classes themselves sorted by their first member. ``class_edges`` holds
    deduplicated (tail class, head class) pairs between distinct classes;
    ``has_internal_edge[i]`` records whether some quiver edge (loops
    included) stays inside class ``i``.
    """

    classes: tuple[tuple[str, ...], ...]
    class_index: Mapping[str, int]
    class_edges: frozenset[tuple[int, int]]
    has_internal_edge: tuple[bool, ...]

    def members(self, i: int) -> tuple[str, ...]:
        return self.classes[i]

    def class_of(self, v: str) -> int:
        try:
            return self.class_index[v]
        except KeyError:
            raise InputError(f"unknown vertex id {v!r}") from None


@dataclass(frozen=True)
class Evolution:
    """A validated directed path, listed ancestor-first.

    ``vertices = (A0, ..., Am)`` with initial vertex A0 and terminal vertex
    Am; ``edge_indices[k]`` points into ``quiver.edges`` and realizes the
    step A(k+1) -> Ak. Construct through :func:`validate_evolution`.
    """

    quiver: Quiver
    vertices: tuple[str, ...]
    edge_indices: tuple[int, ...]

    @property
    def initial(self) -> str:
        return self.vertices[0]

    @property
    def terminal(self) -> str:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def __repr__(self) -> str:
        return "Evolution(" + " <- ".join(self.vertices) + ")"


def validate_evolution(
    quiver: Quiver,
    vertices: Iterable[str],
    edge_indices: Iterable[int] | None = None,
) -> Evolution:
    """Check a vertex sequence (and optional edge choices) against a quiver.

    Steps are numbered 1..m; step k needs an edge with tail ``vertices[k]``
    and head ``vertices[k-1]``. When ``edge_indices`` is omitted, the first
    matching edge is selected for every step.
    """
    seq = tuple(vertices)
    if not seq:
        raise InputError("an evolution contains at least one vertex")
    for v in seq:
        quiver.check_vertex(v)
    m = len(seq) - 1
    if edge_indices is None:
        chosen = []
        lookup = _edge_lookup(quiver)
        for k in range(1, m + 1):
            idx = lookup.get((seq[k], seq[k - 1]))
            if idx is None:
                raise InputError(
                    f"step {k}: no edge from {seq[k]!r} to {seq[k - 1]!r}"
                )
            chosen.append(idx)
        return Evolution(quiver, seq, tuple(chosen))
    picked = tuple(edge_indices)
    if len(picked) != m:
        raise InputError(
            f"expected {m} edge choices for {m + 1} vertices, got {len(picked)}"
        )
    for k, idx in enumerate(picked, start=1):
        if not 0 <= idx < len(quiver.edges):
            raise InputError(f"step {k}: edge index {idx} out of range")
        tail, head = quiver.edges[idx]
        if (tail, head) != (seq[k], seq[k - 1]):
            raise InputError(
                f"step {k}: edge {idx} is ({tail!r}, {head!r}), "
                f"need tail {seq[k]!r} and head {seq[k - 1]!r}"
            )
    return Evolution(quiver, seq, picked)


def concat(alpha: Evolution, beta: Evolution) -> Evolution:
    """Concatenate two evolutions; the terminal of ``alpha`` must be the
    initial vertex of ``beta``."""
    if alpha.quiver != beta.quiver:
        raise InputError("cannot concatenate evolutions from different quivers")
    if alpha.terminal != beta.initial:
        raise InputError(
            f"endpoint mismatch: {alpha.terminal!r} != {beta.initial!r}"
        )
    return Evolution(
        alpha.quiver,
        alpha.vertices + beta.vertices[1:],
        alpha.edge_indices + beta.edge_indices,
    )


def ancestors(quiver: Quiver, v: str) -> frozenset[str]:
    """All vertices reachable from ``v`` along edges, ``v`` included."""
    quiver.check_vertex(v)
    cond = condense(quiver)
    down, _ = _class_reach(quiver)
    out: set[str] = set()
    for c in down[cond.class_of(v)]:
        out.update(cond.classes[c])
    return frozenset(out)


def descendants(quiver: Quiver, v: str) -> frozenset[str]:
    """All vertices from which ``v`` is reachable, ``v`` included."""
    quiver.check_vertex(v)
    cond = condense(quiver)
    _, up = _class_reach(quiver)
    out: set[str] = set()
    for c in up[cond.class_of(v)]:
        out.update(cond.classes[c])
    return frozenset(out)


def ancestor_of(quiver: Quiver, a: str, b: str) -> bool:
    """True when some evolution runs from ``a`` to ``b`` (a <= b); length 0
    counts, so every vertex is an ancestor of itself."""
    quiver.check_vertex(a)
    quiver.check_vertex(b)
    cond = condense(quiver)
    down, _ = _class_reach(quiver)
    return cond.class_of(a) in down[cond.class_of(b)]


def isotypic(quiver: Quiver, a: str, b: str) -> bool:
    """True when ``a`` and ``b`` are mutually ancestral, i.e. share a
    strongly connected component."""
    quiver.check_vertex(a)
    quiver.check_vertex(b)
    cond = condense(quiver)
    return cond.class_of(a) == cond.class_of(b)


@lru_cache(maxsize=_CACHE)
def condense(quiver: Quiver) -> Condensation:
    """Strongly connected components and the acyclic class digraph."""
    out_adj, _ = _adjacency(quiver)
    comps = _tarjan(quiver.vertices, out_adj)
    classes = tuple(sorted((tuple(sorted(c)) for c in comps), key=lambda c: c[0]))
    class_index = {v: i for i, cls in enumerate(classes) for v in cls}
    class_edges: set[tuple[int, int]] = set()
    internal = [False] * len(classes)
    for tail, head in quiver.edges:
        a, b = class_index[tail], class_index[head]
        if a == b:
            internal[a] = True
        else:
            class_edges.add((a, b))
    return Condensation(classes, class_index, frozenset(class_edges), tuple(internal))


def induced_subquiver(quiver: Quiver, keep: Iterable[str]) -> Quiver:
    """Sub-quiver on ``keep`` with every edge whose endpoints both survive.
    Vertex and edge order of the host is preserved."""
    kept = set(keep)
    for v in kept:
        quiver.check_vertex(v)
    if not kept:
        raise InputError("induced sub-quiver needs at least one vertex")
    return Quiver(
        tuple(v for v in quiver.vertices if v in kept),
        tuple(e for e in quiver.edges if e[0] in kept and e[1] in kept),
        tuple(lab for lab in quiver.labels if lab[0] in kept),
    )


# -- cached internals -------------------------------------------------------


@lru_cache(maxsize=_CACHE)
def _vertex_set(quiver: Quiver) -> frozenset[str]:
    return frozenset(quiver.vertices)


@lru_cache(maxsize=_CACHE)
def _edge_set(quiver: Quiver) -> frozenset[tuple[str, str]]:
    return frozenset(quiver.edges)


@lru_cache(maxsize=_CACHE)
def _edge_lookup(quiver: Quiver) -> Mapping[tuple[str, str], int]:
    lookup: dict[tuple[str, str], int] = {}
    for i, e in enumerate(quiver.edges):
        lookup.setdefault(e, i)
    return lookup


@lru_cache(maxsize=_CACHE)
def _adjacency(
    quiver: Quiver,
) -> tuple[Mapping[str, tuple[str, ...]], Mapping[str, tuple[str, ...]]]:
    out: dict[str, set[str]] = {v: set() for v in quiver.vertices}
    inn: dict[str, set[str]] = {v: set() for v in quiver.vertices}
    for tail, head in quiver.edges:
        out[tail].add(head)
        inn[head].add(tail)
    return (
        {v: tuple(sorted(s)) for v, s in out.items()},
        {v: tuple(sorted(s)) for v, s in inn.items()},
    )


def _tarjan(
    vertices: tuple[str, ...], out: Mapping[str, tuple[str, ...]]
) -> list[list[str]]:
    """Iterative Tarjan SCC; components come out ancestors-first."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[list[str]] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work: list[tuple[str, Iterable[str]]] = [(root, iter(out[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(out[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


@lru_cache(maxsize=_CACHE)
def _class_reach(
    quiver: Quiver,
) -> tuple[tuple[frozenset[int], ...], tuple[frozenset[int], ...]]:
    """Reachability closures of the class DAG.

    ``down[i]`` holds every class reachable from class ``i`` along class
    edges (the ancestor direction); ``up[i]`` the co-reachable classes.
    """
    cond = condense(quiver)
    k = len(cond.classes)
    succ: dict[int, set[int]] = {i: set() for i in range(k)}
    pred: dict[int, set[int]] = {i: set() for i in range(k)}
    for a, b in cond.class_edges:
        succ[a].add(b)
        pred[b].add(a)
    order = list(graphlib.TopologicalSorter(succ).static_order())
    down: list[frozenset[int]] = [frozenset()] * k
    for i in order:  # successors of i precede it in the order
        acc = {i}
        for j in succ[i]:
            acc.update(down[j])
        down[i] = frozenset(acc)
    up: list[frozenset[int]] = [frozenset()] * k
    for i in graphlib.TopologicalSorter(pred).static_order():
        acc = {i}
        for j in pred[i]:
            acc.update(up[j])
        up[i] = frozenset(acc)
    return tuple(down), tuple(up)
