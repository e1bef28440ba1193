"""Baseline seed-set selectors: greedy, degree, degree-discount, random,
and the two non-adaptive evolutionary counterparts.

All selectors are deterministic for a fixed rng and break ties by the
smallest node id.
"""

from __future__ import annotations

import random
from typing import Iterable

from .diffusion import Evaluator, ICParams, SpreadCache, estimate_spread, stable_seed
from .evolve import GAConfig, SeedSet, TraceSink, _evolution_loop, fitness_master_token
from .graph import Snapshot
from .nomination import InfluencerPool

__all__ = [
    "greedy_seed",
    "degree_seed",
    "ddh_seed",
    "random_seed",
    "plain_ga_seed",
    "pool_ga_seed",
    "GREEDY_MC_RUNS",
]

GREEDY_MC_RUNS = 200


def greedy_seed(
    s: Snapshot,
    k: int,
    ic: ICParams,
    rng: random.Random,
) -> SeedSet:
    """Hill-climbing greedy: k rounds of best marginal spread.

    Every round estimates the spread of S + {v} afresh for every
    remaining candidate with ``ic.mc_runs`` cascades. Candidate
    simulation seeds are derived from a token drawn once from ``rng``
    plus the candidate identity, so evaluations are order-independent
    and may run concurrently.
    """
    _check_k(s, k)
    token = rng.getrandbits(64)
    chosen: list[int] = []
    for it in range(k):
        best_v = None
        best_val = -1.0
        base = tuple(chosen)
        for v in sorted(s.nodes):
            if v in chosen:
                continue
            est = estimate_spread(
                s,
                base + (v,),
                ic,
                random.Random(stable_seed("greedy", token, it, v)),
            )
            if est.mean > best_val:
                best_val = est.mean
                best_v = v
        chosen.append(best_v)
    return SeedSet(tuple(chosen))


def degree_seed(s: Snapshot, k: int) -> SeedSet:
    """Top-k nodes by degree, smallest id first among ties."""
    _check_k(s, k)
    ranked = sorted(s.nodes, key=lambda v: (-len(s.adjacency[v]), v))
    return SeedSet(tuple(ranked[:k]))


def ddh_seed(s: Snapshot, k: int, p_a: float) -> SeedSet:
    """Degree discount heuristic.

    After each pick, every unselected neighbour v of the pick updates
    its score to d_v - 2*t_v - (d_v - t_v) * t_v * p_a, where t_v counts
    v's already-selected neighbours.
    """
    _check_k(s, k)
    if not 0.0 <= p_a <= 1.0:
        raise ValueError("p_a must lie in [0, 1]")
    dd = {v: float(len(s.adjacency[v])) for v in s.nodes}
    t = {v: 0 for v in s.nodes}
    chosen: list[int] = []
    taken: set[int] = set()
    for _ in range(k):
        best_v = None
        best_val = -float("inf")
        for v in sorted(s.nodes):
            if v in taken:
                continue
            if dd[v] > best_val:
                best_val = dd[v]
                best_v = v
        chosen.append(best_v)
        taken.add(best_v)
        for w in s.adjacency[best_v]:
            if w in taken:
                continue
            t[w] += 1
            d = float(len(s.adjacency[w]))
            dd[w] = d - 2.0 * t[w] - (d - t[w]) * t[w] * p_a
    return SeedSet(tuple(chosen))


def random_seed(s: Snapshot, k: int, rng: random.Random) -> SeedSet:
    """Uniform sample of k distinct nodes."""
    _check_k(s, k)
    return SeedSet(tuple(rng.sample(sorted(s.nodes), k)))


def plain_ga_seed(
    s: Snapshot,
    cfg: GAConfig,
    ic: ICParams,
    rng: random.Random,
    *,
    trace_sink: TraceSink | None = None,
    workers: int = 0,
    cache: SpreadCache | None = None,
) -> SeedSet:
    """Standard GA over the whole node set: no pool, no re-calibration."""
    every = tuple(sorted(s.nodes))
    return _ga_variant(s, cfg, ic, rng, init_source=every, replacement_source=every,
                       trace_pool_size=len(every), trace_sink=trace_sink,
                       workers=workers, cache=cache)


def pool_ga_seed(
    s: Snapshot,
    pool: InfluencerPool,
    cfg: GAConfig,
    ic: ICParams,
    rng: random.Random,
    *,
    trace_sink: TraceSink | None = None,
    workers: int = 0,
    cache: SpreadCache | None = None,
) -> SeedSet:
    """GA initialised from the influencer pool; mutation and repair draw
    from the whole node set and no re-calibration takes place."""
    every = tuple(sorted(s.nodes))
    return _ga_variant(s, cfg, ic, rng, init_source=pool, replacement_source=every,
                       trace_pool_size=len(pool), trace_sink=trace_sink,
                       workers=workers, cache=cache)


def _ga_variant(
    s: Snapshot,
    cfg: GAConfig,
    ic: ICParams,
    rng: random.Random,
    *,
    init_source,
    replacement_source,
    trace_pool_size: int,
    trace_sink: TraceSink | None,
    workers: int,
    cache: SpreadCache | None,
) -> SeedSet:
    token = rng.getrandbits(64)
    evaluator = Evaluator(s, ic, fitness_master_token(token, 0),
                          cache=cache if cache is not None else SpreadCache())
    loop_rng = random.Random(stable_seed(token, "engine", 0))
    outcome = _evolution_loop(
        s,
        cfg,
        evaluator,
        loop_rng,
        init_source=init_source,
        replacement_source=replacement_source,
        adaptive=False,
        trace=trace_sink,
        trace_pool_size=trace_pool_size,
        workers=workers,
    )
    return outcome.best


def _check_k(s: Snapshot, k: int) -> None:
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > len(s.nodes):
        raise ValueError("k exceeds the snapshot's node count")
