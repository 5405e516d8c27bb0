"""Partially directed graphs on vertices 1..p: arrows, lines, chain
components, chordality, lexicographic BFS and orientations.

An edge is an ordered pair of distinct vertices: the pair (a, b) alone is the
arrow a -> b; the presence of both (a, b) and (b, a) is the line a - b.
A pair and its reverse therefore never encode a directed 2-cycle.

Paths follow arrows forward and lines in either direction; a partially
directed cycle is a cyclic path containing at least one arrow. Graphs without
partially directed cycles are chain graphs; their line-connected components
("chain components") carry a partial order induced by the arrows.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from itertools import combinations
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Invalid graph input or operation."""


class DirectedCycle(GraphError):
    """A (partially) directed cycle where none is allowed."""


class NotUndirected(GraphError):
    """Operation requires a graph whose edges are all lines."""


class NotAnArrow(GraphError):
    """Operation requires an arrow a -> b."""


class NotALine(GraphError):
    """Operation requires a line a - b."""


class NotAnEdge(GraphError):
    """Operation requires an edge between the two vertices."""


class VerticesAdjacent(GraphError):
    """Operation requires the two vertices to be non-adjacent."""


#: An ordering of vertices, e.g. a LexBFS output or a topological order.
VertexOrdering = tuple[int, ...]


class Graph:
    """Partially directed graph with O(1) edge queries.

    Parameters
    ----------
    p : number of vertices; the vertex set is 1..p.
    arrows : iterable of (tail, head) pairs.
    lines : iterable of {a, b} pairs, orientation-free.

    An arrow listed together with its reverse collapses to a line. Listing
    a pair both as an arrow and a line keeps the line.
    """

    __slots__ = ("p", "_pa", "_ch", "_nb")

    def __init__(
        self,
        p: int,
        arrows: Iterable[tuple[int, int]] = (),
        lines: Iterable[tuple[int, int]] = (),
    ):
        if p < 0:
            raise GraphError(f"vertex count must be >= 0, got {p}")
        self.p = p
        self._pa: list[set[int]] = [set() for _ in range(p + 1)]
        self._ch: list[set[int]] = [set() for _ in range(p + 1)]
        self._nb: list[set[int]] = [set() for _ in range(p + 1)]
        for a, b in arrows:
            self._check_pair(a, b)
            if a in self._pa[b] or b in self._nb[a]:
                continue
            if b in self._pa[a]:
                # reverse arrow already present: the pair set encodes a line
                self._pa[a].discard(b)
                self._ch[b].discard(a)
                self._add_line(a, b)
            else:
                self._pa[b].add(a)
                self._ch[a].add(b)
        for a, b in lines:
            self._check_pair(a, b)
            self._drop_edge(a, b)
            self._add_line(a, b)

    def _check_pair(self, a: int, b: int) -> None:
        if not (1 <= a <= self.p and 1 <= b <= self.p):
            raise GraphError(f"edge ({a}, {b}) outside vertex range 1..{self.p}")
        if a == b:
            raise GraphError(f"self-loop at {a}")

    # -- private mutators; public Graph values are never mutated in place --

    def _add_line(self, a: int, b: int) -> None:
        self._nb[a].add(b)
        self._nb[b].add(a)

    def _add_arrow(self, a: int, b: int) -> None:
        self._pa[b].add(a)
        self._ch[a].add(b)

    def _drop_edge(self, a: int, b: int) -> None:
        self._pa[a].discard(b)
        self._pa[b].discard(a)
        self._ch[a].discard(b)
        self._ch[b].discard(a)
        self._nb[a].discard(b)
        self._nb[b].discard(a)

    def _orient(self, a: int, b: int) -> None:
        """Turn the line a - b into the arrow a -> b."""
        self._nb[a].discard(b)
        self._nb[b].discard(a)
        self._add_arrow(a, b)

    def _disorient(self, a: int, b: int) -> None:
        """Turn the arrow a -> b into the line a - b."""
        self._pa[b].discard(a)
        self._ch[a].discard(b)
        self._add_line(a, b)

    # -- queries --

    def parents(self, v: int) -> set[int]:
        return set(self._pa[v])

    def children(self, v: int) -> set[int]:
        return set(self._ch[v])

    def neighbors(self, v: int) -> set[int]:
        """Vertices joined to v by a line."""
        return set(self._nb[v])

    def adjacent(self, v: int) -> set[int]:
        """Vertices joined to v by any edge."""
        return self._pa[v] | self._ch[v] | self._nb[v]

    def has_arrow(self, a: int, b: int) -> bool:
        return a in self._pa[b]

    def has_line(self, a: int, b: int) -> bool:
        return b in self._nb[a]

    def is_adjacent(self, a: int, b: int) -> bool:
        return b in self._nb[a] or a in self._pa[b] or b in self._pa[a]

    @property
    def vertices(self) -> range:
        return range(1, self.p + 1)

    @property
    def arrows(self) -> list[tuple[int, int]]:
        """Sorted (tail, head) pairs."""
        return sorted((a, b) for b in self.vertices for a in self._pa[b])

    @property
    def lines(self) -> list[tuple[int, int]]:
        """Sorted (a, b) pairs with a < b, one per line."""
        return sorted((a, b) for b in self.vertices for a in self._nb[b] if a < b)

    @property
    def num_arrows(self) -> int:
        return sum(len(s) for s in self._pa)

    @property
    def num_lines(self) -> int:
        return sum(len(s) for s in self._nb) // 2

    @property
    def num_edges(self) -> int:
        return self.num_arrows + self.num_lines

    def is_undirected(self) -> bool:
        return self.num_arrows == 0

    def is_directed(self) -> bool:
        return self.num_lines == 0

    def copy(self) -> "Graph":
        """Mutable plain-Graph copy; subclasses drop their validated type
        so the copy can be edited freely and rewrapped afterwards."""
        g = Graph.__new__(Graph)
        g.p = self.p
        g._pa = [set(s) for s in self._pa]
        g._ch = [set(s) for s in self._ch]
        g._nb = [set(s) for s in self._nb]
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.p == other.p
            and self._pa == other._pa
            and self._nb == other._nb
        )

    def __hash__(self) -> int:
        return hash(
            (
                self.p,
                frozenset((a, b) for b in self.vertices for a in self._pa[b]),
                frozenset(self.lines),
            )
        )

    def __repr__(self) -> str:
        return f"Graph(p={self.p}, arrows={self.arrows}, lines={self.lines})"

    # -- serialization --

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "arrows": [list(e) for e in self.arrows],
            "lines": [list(e) for e in self.lines],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Graph":
        return cls(int(d["p"]), arrows=[tuple(e) for e in d.get("arrows", [])],
                   lines=[tuple(e) for e in d.get("lines", [])])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(", ", ": "))

    @classmethod
    def from_json(cls, s: str) -> "Graph":
        return cls.from_dict(json.loads(s))


class Dag(Graph):
    """Graph whose edges are all arrows and whose arrows are acyclic."""

    __slots__ = ()

    def __init__(
        self,
        p: int,
        arrows: Iterable[tuple[int, int]] = (),
        lines: Iterable[tuple[int, int]] = (),
    ):
        super().__init__(p, arrows=arrows, lines=lines)
        if self.num_lines:
            raise GraphError(f"DAG cannot contain lines: {self.lines}")
        topological_order(self)  # raises DirectedCycle


class ChainGraph(Graph):
    """Graph without partially directed cycles."""

    __slots__ = ()

    def __init__(
        self,
        p: int,
        arrows: Iterable[tuple[int, int]] = (),
        lines: Iterable[tuple[int, int]] = (),
    ):
        super().__init__(p, arrows=arrows, lines=lines)
        chain_components(self)  # raises DirectedCycle


def as_chain_graph(g: Graph) -> ChainGraph:
    """Validate g as a chain graph and rewrap it without re-normalizing."""
    chain_components(g)
    cg = g.copy()
    cg.__class__ = ChainGraph
    return cg  # type: ignore[return-value]


def skeleton(g: Graph) -> Graph:
    """The undirected graph with a line wherever g has any edge."""
    out = Graph(g.p)
    for b in g.vertices:
        for a in g._pa[b]:
            out._add_line(a, b)
        for a in g._nb[b]:
            if a < b:
                out._add_line(a, b)
    return out


def v_structures(g: Graph) -> set[tuple[int, int, int]]:
    """Canonical triples (a, b, c), a < c, with a -> b <- c and a, c
    non-adjacent."""
    out = set()
    for b in g.vertices:
        pa = sorted(g._pa[b])
        for a, c in combinations(pa, 2):
            if not g.is_adjacent(a, c):
                out.add((a, b, c))
    return out


def chain_components(g: Graph) -> list[frozenset[int]]:
    """Line-connected components in a topological order of the component
    quotient; raises DirectedCycle if g has a partially directed cycle."""
    comp_of = [0] * (g.p + 1)
    comps: list[set[int]] = []
    for s in g.vertices:
        if comp_of[s]:
            continue
        comps.append({s})
        idx = len(comps)
        comp_of[s] = idx
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for b in g._nb[a]:
                if not comp_of[b]:
                    comp_of[b] = idx
                    comps[idx - 1].add(b)
                    queue.append(b)
    n = len(comps)
    succ: list[set[int]] = [set() for _ in range(n + 1)]
    indeg = [0] * (n + 1)
    for a, b in ((a, b) for b in g.vertices for a in g._pa[b]):
        ca, cb = comp_of[a], comp_of[b]
        if ca == cb:
            raise DirectedCycle(
                f"arrow ({a}, {b}) inside a line-connected component"
            )
        if cb not in succ[ca]:
            succ[ca].add(cb)
            indeg[cb] += 1
    # Kahn's algorithm, smallest component index first for determinism
    ready = [i for i in range(1, n + 1) if indeg[i] == 0]
    heapq.heapify(ready)
    order: list[frozenset[int]] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(frozenset(comps[i - 1]))
        for j in sorted(succ[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)
    if len(order) != n:
        raise DirectedCycle("cycle in the component quotient graph")
    return order


def is_acyclic(g: Graph) -> bool:
    """True iff g has no partially directed cycle (chain-graph property)."""
    try:
        chain_components(g)
    except DirectedCycle:
        return False
    return True


def topological_order(g: Graph) -> VertexOrdering:
    """Topological order of a fully directed graph, smallest vertex first
    among the ready set; raises DirectedCycle."""
    if g.num_lines:
        raise NotUndirected("topological_order requires a fully directed graph")
    indeg = [len(g._pa[v]) for v in range(g.p + 1)]
    ready = [v for v in g.vertices if indeg[v] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in g._ch[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(order) != g.p:
        raise DirectedCycle("arrows contain a directed cycle")
    return tuple(order)


def component_of(g: Graph, v: int) -> frozenset[int]:
    """The line-connected component containing v."""
    seen = {v}
    queue = deque([v])
    while queue:
        a = queue.popleft()
        for b in g._nb[a]:
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return frozenset(seen)


def _check_restriction(g: Graph, vertices: Iterable[int] | None) -> set[int]:
    vs = set(g.vertices) if vertices is None else set(vertices)
    for v in vs:
        if not 1 <= v <= g.p:
            raise GraphError(f"vertex {v} outside 1..{g.p}")
        for w in g._pa[v]:
            if w in vs:
                raise NotUndirected(
                    f"arrow ({w}, {v}) inside the restriction; lines required"
                )
    return vs


def lexbfs(
    start_order: Sequence[int],
    g: Graph,
    vertices: Iterable[int] | None = None,
) -> VertexOrdering:
    """Lexicographic breadth-first search over the lines of g, restricted to
    `vertices` (default: all).

    The search keeps a sequence of FIFO buckets, emits the front vertex of
    the front bucket, and splits each bucket into (neighbours of the emitted
    vertex, rest), preserving relative order. `start_order` seeds the initial
    bucket: its vertices come first, remaining vertices follow in ascending
    id, so the first emitted vertex is start_order[0] and ties are broken by
    seed position throughout.
    """
    vs = _check_restriction(g, vertices)
    start = list(start_order)
    if len(set(start)) != len(start):
        raise GraphError("start_order contains duplicates")
    for v in start:
        if v not in vs:
            raise GraphError(f"start vertex {v} not in the searched vertex set")
    seed = start + sorted(vs - set(start))
    if not seed:
        return ()
    buckets: list[list[int]] = [seed]
    out: list[int] = []
    while buckets:
        front = buckets[0]
        a = front.pop(0)
        if not front:
            buckets.pop(0)
        out.append(a)
        nxt: list[list[int]] = []
        for bucket in buckets:
            moved = [b for b in bucket if b in g._nb[a]]
            if not moved:
                nxt.append(bucket)
                continue
            rest = [b for b in bucket if b not in g._nb[a]]
            nxt.append(moved)
            if rest:
                nxt.append(rest)
        buckets = nxt
    return tuple(out)


def is_perfect_elimination(ordering: Sequence[int], g: Graph) -> bool:
    """True iff, for every vertex, its neighbours occurring earlier in
    `ordering` are pairwise adjacent (so orienting every line towards the
    later endpoint yields clique in-neighbourhoods, hence no v-structures).

    `ordering` must enumerate exactly the vertices it is checked on; edges
    of g between vertices outside `ordering` are ignored.
    """
    pos = {v: i for i, v in enumerate(ordering)}
    if len(pos) != len(ordering):
        raise GraphError("ordering contains duplicates")
    for v in ordering:
        earlier = [w for w in g._nb[v] if pos.get(w, len(pos)) < pos[v]]
        for a, b in combinations(earlier, 2):
            if not g.has_line(a, b):
                return False
    return True


def is_chordal(g: Graph, vertices: Iterable[int] | None = None) -> bool:
    """True iff the undirected graph (restriction) has no chordless cycle of
    length >= 4; raises NotUndirected if the restriction contains arrows."""
    vs = _check_restriction(g, vertices)
    order = lexbfs(sorted(vs)[:1], g, vs)
    return is_perfect_elimination(order, g)


def orient_by(ordering: Sequence[int], g: Graph) -> Dag:
    """Orient every line of the undirected graph g from the earlier to the
    later endpoint of `ordering` (a permutation of 1..p)."""
    if not g.is_undirected():
        raise NotUndirected("orient_by requires an undirected graph")
    pos = {v: i for i, v in enumerate(ordering)}
    if sorted(pos) != list(g.vertices) or len(ordering) != g.p:
        raise GraphError("ordering must be a permutation of 1..p")
    arrows = []
    for a, b in g.lines:
        arrows.append((a, b) if pos[a] < pos[b] else (b, a))
    return Dag(g.p, arrows=arrows)


def has_path(
    g: Graph,
    frm: int,
    to: int,
    forbidden: Iterable[int] = (),
) -> bool:
    """True iff a path of >= 1 edges leads from `frm` to `to`, following
    arrows forward and lines either way, visiting no forbidden vertex."""
    blocked = set(forbidden)
    if frm in blocked or to in blocked:
        return False
    seen = {frm}
    queue = deque([frm])
    while queue:
        a = queue.popleft()
        for b in g._ch[a] | g._nb[a]:
            if b == to:
                return True
            if b not in seen and b not in blocked:
                seen.add(b)
                queue.append(b)
    return False


def cliques_in_neighborhood(
    g: Graph,
    within: Iterable[int],
) -> list[frozenset[int]]:
    """All subsets of `within` (including the empty set) that are cliques of
    the line subgraph of g, in increasing size then lexicographic order."""
    base = sorted(within)
    levels: list[list[tuple[int, ...]]] = [[()]]
    while levels[-1]:
        prev = levels[-1]
        nxt = []
        for c in prev:
            last = c[-1] if c else 0
            for w in base:
                if w <= last:
                    continue
                if all(g.has_line(u, w) for u in c):
                    nxt.append(c + (w,))
        levels.append(nxt)
    return [frozenset(c) for level in levels[:-1] for c in level]
