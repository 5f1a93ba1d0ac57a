"""End-to-end solver: preprocessing, depth-first candidates, then edge-opening improvement."""

from __future__ import annotations

import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Any

import numpy as np

from . import _kernels
from .dfs import DepthFirstSearch, SearchBudget, choose_starts
from .graph import Digraph, SccInfo, analyze
from .opening import STRATEGIES, PathImprover
from .scoring import ScoreTable, order_neighbors, path_weight_sums, vertex_scores

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    budget_ms: float = 10_000.0
    dfs_fraction: float = 0.8
    seed: int = 0
    workers: int = 1
    # scoring
    score_depth_k: int = 3
    score_coeffs: tuple[float, ...] | None = None
    low_indegree_threshold: int = 1
    # depth-first search
    starts_count: int = 4
    stagnation_iters: int | None = 1_000_000
    back_erase: int = 3
    forward_fraction: float = 0.7
    # improvement
    improve_budget_ms: float | None = None
    strategy: str = "all"
    refine_steps_factor: float = 4.0
    candidates: int = 3
    plateau_moves: int = 200

    def __post_init__(self) -> None:
        if self.score_coeffs is None:
            self.score_coeffs = (1.0,) * self.score_depth_k
        self.score_coeffs = tuple(float(c) for c in self.score_coeffs)
        self.validate()

    def validate(self) -> None:
        def need(ok: bool, what: str) -> None:
            if not ok:
                raise ValueError(f"invalid config: {what}")

        need(self.budget_ms >= 0, "budget_ms must be >= 0")
        need(0 < self.dfs_fraction < 1, "dfs_fraction must be in (0, 1)")
        need(isinstance(self.seed, int) and self.seed >= 0, "seed must be a nonnegative integer")
        need(self.workers >= 1, "workers must be positive")
        need(self.score_depth_k >= 1, "score_depth_k must be positive")
        need(len(self.score_coeffs) == self.score_depth_k, "score_coeffs needs score_depth_k entries")
        need(all(c > 0 for c in self.score_coeffs), "score_coeffs must be positive")
        need(self.low_indegree_threshold >= 0, "low_indegree_threshold must be >= 0")
        need(self.starts_count >= 1, "starts_count must be positive")
        need(self.stagnation_iters is None or self.stagnation_iters >= 1, "stagnation_iters must be positive")
        need(self.back_erase >= 0, "back_erase must be >= 0")
        need(0 < self.forward_fraction <= 1, "forward_fraction must be in (0, 1]")
        need(self.improve_budget_ms is None or self.improve_budget_ms >= 0, "improve_budget_ms must be >= 0")
        need(self.strategy in STRATEGIES, f"strategy must be one of {STRATEGIES}")
        need(self.refine_steps_factor >= 0, "refine_steps_factor must be >= 0")
        need(self.candidates >= 1, "candidates must be positive")
        need(self.plateau_moves >= 0, "plateau_moves must be >= 0")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SolverConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes: Any) -> SolverConfig:
        data = asdict(self)
        data.update(changes)
        if "score_depth_k" in changes and "score_coeffs" not in changes:
            data["score_coeffs"] = None
        return SolverConfig(**data)


@dataclass
class SolveReport:
    path: list[int]
    weight: float
    phase_timings_ms: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    iterations: int = 0
    events: list[dict[str, Any]] = field(default_factory=list)
    upper_bound: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def text(self) -> str:
        return f"{' '.join(map(str, self.path))}\nweight {format_weight(self.weight)}\n"


def format_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


@dataclass(frozen=True, eq=False)
class Instance:
    """A graph ready for searching: sorted adjacency, components, ranks and scores."""

    graph: Digraph
    info: SccInfo
    scores: ScoreTable


def preprocess(graph: Digraph, config: SolverConfig | None = None) -> Instance:
    config = config or SolverConfig()
    info = analyze(graph)
    tables = path_weight_sums(graph, config.score_depth_k)
    scores = vertex_scores(tables, config.score_coeffs)
    sorted_graph = order_neighbors(graph, scores, info, config.low_indegree_threshold)
    return Instance(sorted_graph, info, scores)


def component_bounds(graph: Digraph, info: SccInfo) -> dict[int, tuple[list[int], float]]:
    """Weak components with an upper bound on their heaviest path.

    A path on k vertices uses out-edges of k-1 distinct vertices, so the sum
    of per-vertex max out-weights minus the smallest of them bounds it.
    """
    comps: dict[int, list[int]] = {}
    for v, c in enumerate(info.wcc_id):
        comps.setdefault(c, []).append(v)
    out = {}
    for c, verts in comps.items():
        best_out = [max((w for _, w in graph.out_adj[v]), default=0.0) for v in verts]
        out[c] = (verts, sum(best_out) - min(best_out))
    return out


def _worker_seeds(seed: int, workers: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(workers)]


def _better(new: float, old: float) -> bool:
    return new > old + 1e-9 * max(1.0, abs(old))


def _pipeline(inst: Instance, config: SolverConfig, seed: int, worker: int, t0: float) -> dict[str, Any]:
    graph, info = inst.graph, inst.info
    rng = random.Random(seed)
    deadline = t0 + config.budget_ms / 1000.0
    comps = component_bounds(graph, info)
    ranked = sorted(comps.values(), key=lambda cb: (-cb[1], cb[0][0]))
    bound = ranked[0][1] if ranked else 0.0

    best_verts: list[int] = [0]
    best_w = 0.0
    events: list[dict[str, Any]] = []
    iterations = 0
    # Set once every start of every component that could still beat the
    # best path has been searched exhaustively: the best path is then optimal.
    proven = False

    def offer(verts: list[int], w: float, phase: str) -> None:
        nonlocal best_verts, best_w
        if _better(w, best_w):
            best_verts, best_w = verts, w
            events.append({"phase": phase, "t_ms": (time.perf_counter() - t0) * 1000.0, "weight": w})

    def done() -> bool:
        return proven or best_w >= bound - 1e-9 * max(1.0, bound) or time.perf_counter() >= deadline

    # depth-first phase
    t_dfs = time.perf_counter()
    live = [(verts, b) for verts, b in ranked if len(verts) > 1 and b > 0]
    total_edges = sum(sum(len(graph.out_adj[v]) for v in verts) for verts, _ in live) or 1
    dfs_ms = config.budget_ms * config.dfs_fraction
    candidates: list[tuple[float, list[int]]] = []
    open_comps = 0
    shares = [dfs_ms * sum(len(graph.out_adj[v]) for v in verts) / total_edges for verts, _ in live]
    for idx, (verts, comp_bound) in enumerate(live):
        if not _better(comp_bound, best_w):
            continue
        if done():
            open_comps += 1
            continue
        comp_deadline = time.perf_counter() + shares[idx] / 1000.0
        # While every search of the component runs to exhaustion the DFS is
        # heading for an exact answer: it may then run on until only the
        # time owed to later components is left, and backward phases are
        # skipped since every start gets its own forward enumeration.
        exact_deadline = deadline - sum(shares[idx + 1 :]) / 1000.0
        # Every worker walks the whole start list, from its own offset; a
        # search that stops early (exhausted or stagnant) hands its time on.
        starts = choose_starts(info, len(verts), inst.scores.score_out, verts)
        offset = worker * config.starts_count % len(starts)
        starts = starts[offset:] + starts[:offset]
        per_start = shares[idx] / min(config.starts_count, len(starts))
        tried = exhausted = 0
        for s in starts:
            exact = tried > 0 and exhausted == tried
            end = max(comp_deadline, exact_deadline) if exact else comp_deadline
            left = (end - time.perf_counter()) * 1000.0
            if left <= 0 or done():
                break
            budget = SearchBudget(
                time_ms=min(per_start, left),
                stagnation_iters=config.stagnation_iters,
                forward_fraction=1.0 if exact else config.forward_fraction,
                back_erase=config.back_erase,
                backward_after_exhaust=not exact,
            )
            search = DepthFirstSearch(graph, budget)
            p = search.run(s)
            iterations += search.iterations
            candidates.append((p.weight, p.vertices()))
            offer(p.vertices(), p.weight, "dfs")
            tried += 1
            exhausted += search.exhausted
        open_comps += exhausted < len(starts)
    proven = open_comps == 0
    dfs_elapsed = time.perf_counter() - t_dfs

    # improvement phase
    t_imp = time.perf_counter()
    if config.improve_budget_ms is not None:
        deadline = min(deadline, t_imp + config.improve_budget_ms / 1000.0)
    candidates.sort(key=lambda c: -c[0])
    pool: list[list[int]] = []
    for _, verts in candidates:
        if verts not in pool:
            pool.append(verts)
        if len(pool) == config.candidates:
            break
    if not pool and live:
        pool.append([live[0][0][0]])

    improver = PathImprover(
        graph, info, rng, config.strategy, config.refine_steps_factor, plateau=config.plateau_moves
    )

    def improve(verts: list[int]) -> None:
        left = (deadline - time.perf_counter()) * 1000.0
        if left <= 0:
            return
        p = improver.run(verts, left)
        offer(p.vertices(), p.weight, "improve")

    for verts in pool:
        if done():
            break
        improve(verts)
    # Restart rounds until the budget runs out: re-sweep the best path under
    # fresh orders, regrow a random piece of it (a local optimum that covers
    # its whole component has nothing left to open), and start over from a
    # random vertex.
    starts_cycle = [v for verts, _ in live for v in verts]
    while not done() and live:
        improve(best_verts)
        if not done() and len(best_verts) > 2:
            a, b = sorted(rng.sample(range(len(best_verts) + 1), 2))
            improve(best_verts[a:b])
        if not done():
            improve([starts_cycle[rng.randrange(len(starts_cycle))]])
    iterations += improver.openings
    return {
        "path": best_verts,
        "weight": best_w,
        "events": events,
        "iterations": iterations,
        "dfs_ms": dfs_elapsed * 1000.0,
        "improve_ms": (time.perf_counter() - t_imp) * 1000.0,
        "bound": bound,
    }


def _run_worker(args: tuple[Instance, SolverConfig, int, int, float]) -> dict[str, Any]:
    inst, config, seed, worker, budget_start_offset = args
    return _pipeline(inst, config, seed, worker, time.perf_counter() - budget_start_offset)


def solve(graph: Digraph, config: SolverConfig | None = None, instance: Instance | None = None) -> SolveReport:
    """Search for a heavy simple path in ``graph`` within ``config.budget_ms``.

    Pass a ready ``instance`` to skip preprocessing.
    """
    config = config or SolverConfig()
    if graph.n == 0:
        return SolveReport([], 0.0, {"compile": 0.0, "preprocess": 0.0, "dfs": 0.0, "improve": 0.0, "total": 0.0}, config.seed)
    # One-off JIT compile or cache load; not charged to the search budget.
    t_jit = time.perf_counter()
    _kernels.warm_up()
    t0 = time.perf_counter()
    inst = instance or preprocess(graph, config)
    t_pre = time.perf_counter()
    seeds = _worker_seeds(config.seed, config.workers)
    if config.workers == 1:
        results = [_pipeline(inst, config, seeds[0], 0, t0)]
    else:
        elapsed = time.perf_counter() - t0
        jobs = [(inst, config, seeds[w], w, elapsed) for w in range(config.workers)]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_worker, jobs))
    # Max weight wins; ties go to the lowest worker index.
    best = results[0]
    for r in results[1:]:
        if _better(r["weight"], best["weight"]):
            best = r
    verts = best["path"]
    weight = graph.path_weight(verts)
    log.debug("solved n=%d m=%d weight=%s", graph.n, graph.m, weight)
    return SolveReport(
        path=[graph.label(v) for v in verts],
        weight=weight,
        phase_timings_ms={
            "compile": (t0 - t_jit) * 1000.0,
            "preprocess": (t_pre - t0) * 1000.0,
            "dfs": best["dfs_ms"],
            "improve": best["improve_ms"],
            "total": (time.perf_counter() - t0) * 1000.0,
        },
        seed=config.seed,
        iterations=sum(r["iterations"] for r in results),
        events=best["events"],
        upper_bound=best["bound"],
    )
