"""Brute-force reference implementations used to cross-check the package.

Everything here is written from first principles against the raw edge lists
(graph.p, graph.arrows, graph.lines) and raw data arrays, deliberately not
reusing any package traversal, scoring or equivalence logic. The oracles
favour exhaustive scans over clever algorithms; they are only ever run on
small instances.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

Pair = frozenset
ArrowSet = frozenset


def pair_states(p, arrows, lines):
    """Map each unordered vertex pair to 'none', 'line' or the arrow (a, b)."""
    states = {Pair((a, b)): "none" for a, b in itertools.combinations(range(1, p + 1), 2)}
    for a, b in arrows:
        states[Pair((a, b))] = (a, b)
    for a, b in lines:
        states[Pair((a, b))] = "line"
    return states


def skeleton_pairs(g):
    return frozenset(Pair(e) for e in list(g.arrows) + list(g.lines))


def adjacency(p, arrows, lines):
    adj = {v: set() for v in range(1, p + 1)}
    for a, b in list(arrows) + list(lines):
        adj[a].add(b)
        adj[b].add(a)
    return adj


def v_structures(g):
    """Triples (a, b, c), a < c, with arrows a -> b <- c and a, c non-adjacent."""
    adj = adjacency(g.p, g.arrows, g.lines)
    parents = {v: set() for v in range(1, g.p + 1)}
    for a, b in g.arrows:
        parents[b].add(a)
    out = set()
    for b in range(1, g.p + 1):
        for a, c in itertools.combinations(sorted(parents[b]), 2):
            if c not in adj[a]:
                out.add((a, b, c))
    return out


def is_acyclic_arrows(p, arrows):
    """Kahn's algorithm on the arrows alone (lines ignored)."""
    indeg = {v: 0 for v in range(1, p + 1)}
    ch = {v: [] for v in range(1, p + 1)}
    for a, b in arrows:
        indeg[b] += 1
        ch[a].append(b)
    ready = [v for v in indeg if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in ch[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return seen == p


def has_path(g, frm, to, forbidden=()):
    """Semi-directed reachability: arrows forward, lines either way."""
    step = {v: set() for v in range(1, g.p + 1)}
    for a, b in g.arrows:
        step[a].add(b)
    for a, b in g.lines:
        step[a].add(b)
        step[b].add(a)
    blocked = set(forbidden)
    if frm in blocked or to in blocked:
        return False
    seen, queue = {frm}, [frm]
    while queue:
        x = queue.pop()
        for y in step[x]:
            if y == to:
                return True
            if y not in seen and y not in blocked:
                seen.add(y)
                queue.append(y)
    return False


def chain_components(g):
    """Line-connected components via union-find, as a set of frozensets."""
    parent = {v: v for v in range(1, g.p + 1)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.lines:
        parent[find(a)] = find(b)
    comps = {}
    for v in range(1, g.p + 1):
        comps.setdefault(find(v), set()).add(v)
    return {frozenset(c) for c in comps.values()}


def is_chordal(vertices, line_pairs):
    """Simplicial elimination: repeatedly delete a vertex whose remaining
    neighbours are pairwise adjacent."""
    verts = set(vertices)
    adj = {v: set() for v in verts}
    for a, b in line_pairs:
        if a in verts and b in verts:
            adj[a].add(b)
            adj[b].add(a)
    while verts:
        for v in sorted(verts):
            nb = adj[v] & verts
            if all(y in adj[x] for x, y in itertools.combinations(sorted(nb), 2)):
                verts.discard(v)
                break
        else:
            return False
    return True


def cliques_within(line_pairs, within):
    """Every subset of `within` (the empty set included) whose members are
    pairwise joined by a line."""
    within = sorted(within)
    joined = {Pair(e) for e in line_pairs}
    out = []
    for r in range(len(within) + 1):
        for sub in itertools.combinations(within, r):
            if all(Pair((x, y)) in joined for x, y in itertools.combinations(sub, 2)):
                out.append(frozenset(sub))
    return out


def shd_counts(g1, g2):
    """(fp, fn, wo): skeleton additions, deletions and edge-type mismatches
    of g1 relative to g2, one count per vertex pair."""
    s1 = pair_states(g1.p, g1.arrows, g1.lines)
    s2 = pair_states(g2.p, g2.arrows, g2.lines)
    fp = fn = wo = 0
    for pair, a in s1.items():
        b = s2[pair]
        if a == b:
            continue
        if a == "none":
            fn += 1
        elif b == "none":
            fp += 1
        else:
            wo += 1
    return fp, fn, wo


@lru_cache(maxsize=None)
def all_dag_arrow_sets(p):
    """Arrow sets of every DAG on p vertices (25 for p=3, 543 for p=4)."""
    pairs = list(itertools.combinations(range(1, p + 1), 2))
    out = []
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        arrows = []
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                arrows.append((a, b))
            elif c == 2:
                arrows.append((b, a))
        if is_acyclic_arrows(p, arrows):
            out.append(ArrowSet(arrows))
    return tuple(out)


def intervention_skeleton(p, arrows, target):
    """Skeleton of the graph left after cutting arrows into the target."""
    t = set(target)
    return frozenset(Pair((a, b)) for a, b in arrows if b not in t)


def class_signature(p, arrows, targets):
    """Equivalence invariant: skeleton, v-structures and the per-target
    skeletons of the intervened graphs."""

    class _G:
        pass

    g = _G()
    g.p, g.arrows, g.lines = p, list(arrows), []
    return (
        skeleton_pairs(g),
        frozenset(v_structures(g)),
        tuple(intervention_skeleton(p, arrows, t) for t in targets),
    )


def equivalent(p, arrows1, arrows2, targets):
    return class_signature(p, arrows1, targets) == class_signature(p, arrows2, targets)


def class_members(p, arrows, targets):
    """Arrow sets of every DAG equivalent to the given one under the family."""
    sig = class_signature(p, arrows, targets)
    return [
        a for a in all_dag_arrow_sets(p) if class_signature(p, a, targets) == sig
    ]


def union_graph(p, member_arrow_sets):
    """(arrows, lines) of the graph union of a class: pairs oriented the same
    way by every member stay arrows, disputed pairs become lines."""
    seen = {}
    for arrows in member_arrow_sets:
        for a, b in arrows:
            seen.setdefault(Pair((a, b)), set()).add((a, b))
    arrows, lines = set(), set()
    for pair, orientations in seen.items():
        if len(orientations) == 1:
            arrows.add(next(iter(orientations)))
        else:
            lines.add(tuple(sorted(pair)))
    return frozenset(arrows), frozenset(lines)


def component_orientations(line_pairs, comp):
    """All ways to orient the lines of one component into an acyclic,
    v-structure-free subgraph, by filtering the full product."""
    edges = sorted((a, b) for a, b in (tuple(sorted(e)) for e in line_pairs)
                   if a in comp and b in comp)
    adj = {v: set() for v in comp}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    out = []
    for flips in itertools.product((0, 1), repeat=len(edges)):
        arrows = [(a, b) if f == 0 else (b, a) for (a, b), f in zip(edges, flips)]
        parents = {v: set() for v in comp}
        for a, b in arrows:
            parents[b].add(a)
        indeg_ok = is_acyclic_subset(comp, arrows)
        collider = any(
            c not in adj[a]
            for v in comp
            for a, c in itertools.combinations(sorted(parents[v]), 2)
        )
        if indeg_ok and not collider:
            out.append(frozenset(arrows))
    return out


def is_acyclic_subset(comp, arrows):
    indeg = {v: 0 for v in comp}
    ch = {v: [] for v in comp}
    for a, b in arrows:
        indeg[b] += 1
        ch[a].append(b)
    ready = [v for v in indeg if indeg[v] == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in ch[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return seen == len(comp)


VARIANCE_FLOOR = 1e-12


def local_score(v, parents, X, targets, penalty="total"):
    """BIC local term recomputed with numpy.linalg.lstsq from scratch."""
    rows = [i for i, t in enumerate(targets) if v not in t]
    n_v = len(rows)
    y = X[rows, v - 1]
    parents = sorted(parents)
    if parents:
        A = X[np.ix_(rows, [u - 1 for u in parents])]
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = y - A @ coef
        rss = float(resid @ resid)
    else:
        rss = float(y @ y)
    sigma2 = max(rss / n_v, VARIANCE_FLOOR)
    n_pen = len(targets) if penalty == "total" else n_v
    return -0.5 * n_v * (math.log(sigma2) + 1.0) - 0.5 * (1 + len(parents)) * math.log(n_pen)


def total_score(arrows, p, X, targets, penalty="total"):
    parents = {v: [] for v in range(1, p + 1)}
    for a, b in arrows:
        parents[b].append(a)
    return sum(local_score(v, parents[v], X, targets, penalty) for v in range(1, p + 1))


def best_dag_score(p, X, targets, penalty="total"):
    """Exact optimum by scoring every DAG, with memoized local terms."""
    memo = {}

    def local(v, pa):
        key = (v, frozenset(pa))
        if key not in memo:
            memo[key] = local_score(v, pa, X, targets, penalty)
        return memo[key]

    best = -math.inf
    best_arrows = None
    for arrows in all_dag_arrow_sets(p):
        parents = {v: [] for v in range(1, p + 1)}
        for a, b in arrows:
            parents[b].append(a)
        s = sum(local(v, parents[v]) for v in range(1, p + 1))
        if s > best:
            best, best_arrows = s, arrows
    return best, best_arrows
