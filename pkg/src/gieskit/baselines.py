"""Comparison algorithms: greedy DAG search, observational greedy search
and an exact dynamic-programming optimizer.

gds hill-climbs in the space of DAGs with single-arrow insertions, deletions
and reversals, using the same phase shell, tie-breaking and lazy acyclicity
checks as the class-space search; with a complete single-vertex intervention
family every equivalence class is a singleton and the two searches coincide
move for move. ges erases all intervention labels and searches with the
purely observational family. dp_exact maximizes the decomposable score over
all DAGs by dynamic programming over vertex subsets (best-parent-set tables
followed by a best-sink recursion), exponential in the vertex count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum

from .graphs import Dag, Graph, GraphError, has_path
from .interventions import OBSERVATIONAL, TargetFamily, _require_conservative
from .scoring import (
    InterventionalDataset,
    ScoreCache,
    ScoringError,
    local_score,
    total_score,
)
from .search import (
    GiesOptions,
    MoveCandidate,
    MoveKind,
    SearchResult,
    SearchTrace,
    TraceEntry,
    gies,
)


class TooLarge(GraphError):
    """Vertex count exceeds the limit of the exponential-time optimizer."""

    def __init__(self, p: int, max_p: int):
        super().__init__(f"p = {p} exceeds the exact-search limit {max_p}")
        self.p = p
        self.max_p = max_p


@dataclass
class DagSearchResult:
    dag: Dag
    score: float
    steps: int
    trace: SearchTrace | None


@dataclass
class DpResult:
    dag: Dag
    score: float
    metadata: dict = field(default_factory=dict)


# -- greedy DAG search ------------------------------------------------------


def _gds_forward(g, data, cache, max_degree):
    for v in g.vertices:
        ad_v = g.adjacent(v)
        if max_degree is not None and len(ad_v) >= max_degree:
            continue
        pa_v = frozenset(g._pa[v])
        for u in g.vertices:
            if u == v or u in ad_v:
                continue
            if max_degree is not None and len(g.adjacent(u)) >= max_degree:
                continue
            try:
                delta = local_score(v, pa_v | {u}, data, cache=cache) - local_score(
                    v, pa_v, data, cache=cache
                )
            except ScoringError:
                continue
            yield MoveCandidate(MoveKind.INSERT, u, v, frozenset(), delta)


def _gds_backward(g, data, cache):
    for v in g.vertices:
        pa_v = frozenset(g._pa[v])
        for u in sorted(pa_v):
            try:
                delta = local_score(v, pa_v - {u}, data, cache=cache) - local_score(
                    v, pa_v, data, cache=cache
                )
            except ScoringError:
                continue
            yield MoveCandidate(MoveKind.DELETE, u, v, frozenset(), delta)


def _gds_turning(g, data, cache):
    # reversing v -> u is keyed like the class-space turn of that arrow
    for v in g.vertices:
        pa_v = frozenset(g._pa[v])
        for u in sorted(g._ch[v]):
            pa_u = frozenset(g._pa[u])
            try:
                # fsum keeps the sign exact; a reversal's delta is then the
                # exact negation and neutral turns cannot cycle on rounding
                delta = fsum((
                    local_score(v, pa_v | {u}, data, cache=cache),
                    local_score(u, pa_u - {v}, data, cache=cache),
                    -local_score(v, pa_v, data, cache=cache),
                    -local_score(u, pa_u, data, cache=cache),
                ))
            except ScoringError:
                continue
            yield MoveCandidate(MoveKind.TURN_ARROW, u, v, frozenset(), delta)


def _gds_lazy_valid(g: Graph, move: MoveCandidate) -> bool:
    if move.kind == MoveKind.INSERT:
        return not has_path(g, move.v, move.u, forbidden=frozenset())
    if move.kind == MoveKind.TURN_ARROW:
        cut = g.copy()
        cut._pa[move.u].discard(move.v)
        cut._ch[move.v].discard(move.u)
        return not has_path(cut, move.v, move.u, forbidden=frozenset())
    return True


def _gds_best(g, phase, data, cache, max_degree):
    if phase == "forward":
        it = _gds_forward(g, data, cache, max_degree)
    elif phase == "backward":
        it = _gds_backward(g, data, cache)
    elif phase == "turning":
        it = _gds_turning(g, data, cache)
    else:
        raise GraphError(f"unknown phase {phase!r}")
    for cand in sorted(it, key=lambda c: (-c.delta, c.key())):
        if cand.delta <= 0.0:
            return None
        if _gds_lazy_valid(g, cand):
            return cand
    return None


def _gds_apply(g: Graph, move: MoveCandidate) -> None:
    if move.kind == MoveKind.INSERT:
        g._add_arrow(move.u, move.v)
    elif move.kind == MoveKind.DELETE:
        g._drop_edge(move.u, move.v)
    elif move.kind == MoveKind.TURN_ARROW:
        g._drop_edge(move.v, move.u)
        g._add_arrow(move.u, move.v)
    else:
        raise GraphError(f"gds cannot apply a {move.kind.name} move")


def gds(
    data: InterventionalDataset,
    fam: TargetFamily,
    options: GiesOptions | None = None,
) -> DagSearchResult:
    """Greedy DAG-space search from the empty DAG."""
    opts = options or GiesOptions()
    _require_conservative(fam, data.p)
    data.check_family(fam)
    cache = ScoreCache(data, penalty=opts.penalty)
    g = Graph(data.p)
    score = total_score(Dag(data.p), data, cache=cache)
    trace = SearchTrace() if opts.trace else None
    steps = 0

    def run_phase(phase: str) -> bool:
        nonlocal score, steps
        changed = False
        while True:
            move = _gds_best(g, phase, data, cache, opts.max_degree)
            if move is None:
                return changed
            _gds_apply(g, move)
            score += move.delta
            steps += 1
            changed = True
            if trace is not None:
                trace.entries.append(
                    TraceEntry(
                        phase=phase,
                        kind=move.kind.name.lower(),
                        u=move.u,
                        v=move.v,
                        C=[],
                        delta=move.delta,
                        score=score,
                    )
                )

    if opts.variant == "gies-nt":
        for ph in opts.phase_order:
            if ph != "turning":
                run_phase(ph)
    else:
        while True:
            keep_going = False
            for ph in opts.phase_order:
                changed = run_phase(ph)
                if changed and (ph != "forward" or opts.continue_after_forward):
                    keep_going = True
            if not keep_going:
                break
    return DagSearchResult(
        dag=Dag(data.p, arrows=g.arrows), score=score, steps=steps, trace=trace
    )


# -- observational greedy search --------------------------------------------


def ges(
    data: InterventionalDataset, options: GiesOptions | None = None
) -> SearchResult:
    """Class-space greedy search with all intervention labels erased."""
    return gies(data.erase_targets(), TargetFamily([OBSERVATIONAL]), options)


# -- exact dynamic programming ----------------------------------------------


def dp_exact(
    data: InterventionalDataset,
    fam: TargetFamily,
    max_p: int = 15,
    max_parents: int | None = None,
) -> DpResult:
    """Globally optimal DAG for the decomposable score.

    Runs the subset dynamic program: per vertex, the best parent set within
    every candidate set; then the best sink per vertex subset. Time and
    memory grow as p * 2^p, hence the hard max_p guard. max_parents caps
    the parent-set size of the local-score table (defaults to unlimited up
    to 12 vertices and 5 beyond); a cap can exclude the true optimum, so
    the applied value is reported in the metadata.
    """
    p = data.p
    if p > max_p:
        raise TooLarge(p, max_p)
    _require_conservative(fam, p)
    data.check_family(fam)
    cache = ScoreCache(data)
    if max_parents is None:
        cap = p - 1 if p <= 12 else 5
    else:
        cap = max_parents
    full = (1 << p) - 1
    neg_inf = float("-inf")

    def bit(v: int) -> int:
        return 1 << (v - 1)

    def members(mask: int) -> list[int]:
        return [v for v in range(1, p + 1) if mask & bit(v)]

    # best_local[v][S]: best local score of v over parent sets inside S;
    # best_pa[v][S]: the parent set achieving it (smaller sets win ties)
    best_local = [None] + [[neg_inf] * (full + 1) for _ in range(p)]
    best_pa = [None] + [[0] * (full + 1) for _ in range(p)]
    for v in range(1, p + 1):
        bl, bp = best_local[v], best_pa[v]
        bl[0] = local_score(v, frozenset(), data, cache=cache)
        for S in range(1, full + 1):
            if S & bit(v):
                continue
            best, arg = neg_inf, 0
            for w in members(S):
                sub = S & ~bit(w)
                if bl[sub] > best:
                    best, arg = bl[sub], bp[sub]
            if S.bit_count() <= cap:
                try:
                    own = local_score(v, frozenset(members(S)), data, cache=cache)
                except ScoringError:
                    own = neg_inf
                if own > best:
                    best, arg = own, S
            bl[S], bp[S] = best, arg

    # best_net[U]: best score of a DAG on the vertex set U; sink[U]: its
    # last vertex in topological order (smallest such vertex on ties)
    best_net = [0.0] * (full + 1)
    sink = [0] * (full + 1)
    for U in range(1, full + 1):
        best, arg = neg_inf, 0
        for s in members(U):
            rest = U & ~bit(s)
            cand = best_net[rest] + best_local[s][rest]
            if cand > best:
                best, arg = cand, s
        best_net[U], sink[U] = best, arg

    arrows: list[tuple[int, int]] = []
    U = full
    while U:
        s = sink[U]
        U &= ~bit(s)
        arrows.extend((w, s) for w in members(best_pa[s][U]))
    dag = Dag(p, arrows=arrows)
    return DpResult(
        dag=dag,
        score=best_net[full],
        metadata={
            "max_p": max_p,
            "max_parents": cap,
            "capped": cap < p - 1,
            "score": best_net[full],
        },
    )
