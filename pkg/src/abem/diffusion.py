"""Independent-cascade diffusion: Monte-Carlo estimates and an exact oracle.

The cascade model: seeds start active; each newly activated node gets one
chance to activate each currently inactive neighbour, succeeding with
probability ``activation_probability``. The process runs until no new
activations occur, or until ``max_hops`` rounds have elapsed when a hop
cap is set. Influence spread is the expected number of active nodes at
the end, seeds included.

``exact_spread_bruteforce`` computes that expectation exactly by
enumerating all 2^|E| live-edge subgraphs, which is why it is guarded to
at most 20 edges. It exists to anchor the Monte-Carlo estimator in tests.
"""

from __future__ import annotations

import hashlib
import random
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import MissingNodeError, Snapshot

__all__ = [
    "ICParams",
    "SpreadEstimate",
    "EnumerationLimitError",
    "BRUTEFORCE_EDGE_LIMIT",
    "GA_FITNESS_MC_RUNS",
    "FINAL_REPORT_MC_RUNS",
    "LOCAL_ESTIMATE_MC_RUNS",
    "DEFAULT_LOCAL_HOPS",
    "simulate_ic_once",
    "estimate_spread",
    "estimate_local_influence",
    "exact_spread_bruteforce",
    "stable_seed",
    "SpreadCache",
    "Evaluator",
]

# Monte-Carlo budgets: cheap estimates inside the evolutionary loop,
# high-precision re-evaluation for reported numbers, and a small budget
# for per-node local influence scoring during nomination.
GA_FITNESS_MC_RUNS = 100
FINAL_REPORT_MC_RUNS = 1000
LOCAL_ESTIMATE_MC_RUNS = 50
DEFAULT_LOCAL_HOPS = 2

BRUTEFORCE_EDGE_LIMIT = 20


class EnumerationLimitError(ValueError):
    """Raised when exact enumeration would exceed the edge-count guard."""


@dataclass(frozen=True)
class ICParams:
    """Cascade parameters shared by every simulation entry point."""

    activation_probability: float
    mc_runs: int = GA_FITNESS_MC_RUNS
    max_hops: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.activation_probability <= 1.0:
            raise ValueError("activation_probability must lie in [0, 1]")
        if self.mc_runs < 1:
            raise ValueError("mc_runs must be at least 1")
        if self.max_hops is not None and self.max_hops < 1:
            raise ValueError("max_hops must be a positive integer when set")


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    std_error: float
    runs: int


def stable_seed(*parts) -> int:
    """Deterministic 64-bit seed derived from primitive parts.

    Unlike ``hash()`` this is stable across processes, which keeps
    simulation schedules reproducible and independent of evaluation
    order.
    """
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _seed_indices(s: Snapshot, seeds: Iterable[int]) -> list[int]:
    _, index, _ = s._compiled()
    out = []
    for v in sorted(set(seeds)):
        if v not in index:
            raise MissingNodeError(v)
        out.append(index[v])
    if not out:
        raise ValueError("seed set must not be empty")
    return out


def _cascade_size(
    adj_idx: list[tuple[int, ...]],
    n: int,
    seed_idx: list[int],
    p: float,
    rand,
    max_hops: int | None,
) -> int:
    """Run one cascade over the compact index space, returning its size."""
    mark = bytearray(n)
    frontier = list(seed_idx)
    for i in frontier:
        mark[i] = 1
    count = len(frontier)
    rounds_left = n if max_hops is None else max_hops
    while frontier and rounds_left > 0:
        nxt = []
        for u in frontier:
            for v in adj_idx[u]:
                if not mark[v] and rand() < p:
                    mark[v] = 1
                    nxt.append(v)
        count += len(nxt)
        frontier = nxt
        rounds_left -= 1
    return count


def simulate_ic_once(
    s: Snapshot,
    seeds: Iterable[int],
    p_a: float,
    rng: random.Random,
    max_hops: int | None = None,
) -> set[int]:
    """Simulate a single cascade and return the activated node set."""
    if not 0.0 <= p_a <= 1.0:
        raise ValueError("p_a must lie in [0, 1]")
    order, _, adj_idx = s._compiled()
    seed_idx = _seed_indices(s, seeds)
    n = len(order)
    mark = bytearray(n)
    frontier = list(seed_idx)
    for i in frontier:
        mark[i] = 1
    activated = list(frontier)
    rand = rng.random
    rounds_left = n if max_hops is None else max_hops
    while frontier and rounds_left > 0:
        nxt = []
        for u in frontier:
            for v in adj_idx[u]:
                if not mark[v] and rand() < p_a:
                    mark[v] = 1
                    nxt.append(v)
        activated.extend(nxt)
        frontier = nxt
        rounds_left -= 1
    return {order[i] for i in activated}


def estimate_spread(
    s: Snapshot,
    seeds: Iterable[int],
    params: ICParams,
    rng: random.Random | int,
    per_run_seeds: Sequence[int] | None = None,
) -> SpreadEstimate:
    """Monte-Carlo estimate of expected cascade size.

    By default all runs draw from one sequential stream of ``rng``. When
    ``per_run_seeds`` is given, run r uses its own generator seeded with
    ``per_run_seeds[r]``; matched seed lists couple the noise of
    different seed sets (common random numbers).
    """
    order, _, adj_idx = s._compiled()
    seed_idx = _seed_indices(s, seeds)
    n = len(order)
    p = params.activation_probability
    runs = params.mc_runs
    hops = params.max_hops
    if per_run_seeds is not None:
        if len(per_run_seeds) != runs:
            raise ValueError("per_run_seeds length must equal mc_runs")
        sizes = [
            _cascade_size(adj_idx, n, seed_idx, p, random.Random(sd).random, hops)
            for sd in per_run_seeds
        ]
    else:
        if isinstance(rng, int):
            rng = random.Random(rng)
        rand = rng.random
        sizes = [
            _cascade_size(adj_idx, n, seed_idx, p, rand, hops) for _ in range(runs)
        ]
    arr = np.asarray(sizes, dtype=np.float64)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / np.sqrt(runs)) if runs > 1 else 0.0
    return SpreadEstimate(mean=mean, std_error=se, runs=runs)


def estimate_local_influence(
    s: Snapshot,
    v: int,
    params: ICParams,
    rng: random.Random | int,
) -> SpreadEstimate:
    """Hop-capped single-seed spread estimate used for agent scoring."""
    if params.max_hops is None:
        raise ValueError("local influence estimation requires max_hops to be set")
    return estimate_spread(s, (v,), params, rng)


def exact_spread_bruteforce(s: Snapshot, seeds: Iterable[int], p_a: float) -> float:
    """Exact expected spread by live-edge subgraph enumeration.

    Every edge is independently live with probability ``p_a``; the
    expected spread is the reachability mass from the seed set summed
    over all 2^|E| live-edge realisations, each weighted by its
    probability. Refuses graphs with more than ``BRUTEFORCE_EDGE_LIMIT``
    edges.
    """
    if not 0.0 <= p_a <= 1.0:
        raise ValueError("p_a must lie in [0, 1]")
    edges = sorted(s.edges())
    m = len(edges)
    if m > BRUTEFORCE_EDGE_LIMIT:
        raise EnumerationLimitError(
            f"{m} edges exceeds the enumeration guard of {BRUTEFORCE_EDGE_LIMIT}"
        )
    seed_list = sorted(set(seeds))
    for v in seed_list:
        if v not in s.nodes:
            raise MissingNodeError(v)
    if not seed_list:
        raise ValueError("seed set must not be empty")

    q = 1.0 - p_a
    total = 0.0
    for mask in range(1 << m):
        live = mask.bit_count()
        weight = (p_a**live) * (q ** (m - live))
        if weight == 0.0:
            continue
        adj: dict[int, list[int]] = {}
        for i in range(m):
            if mask >> i & 1:
                u, v = edges[i]
                adj.setdefault(u, []).append(v)
                if not s.directed:
                    adj.setdefault(v, []).append(u)
        reached = set(seed_list)
        stack = list(seed_list)
        while stack:
            u = stack.pop()
            for w in adj.get(u, ()):
                if w not in reached:
                    reached.add(w)
                    stack.append(w)
        total += weight * len(reached)
    return total


# -- fitness evaluation machinery -------------------------------------------


class SpreadCache:
    """Thread-safe memo of spread estimates keyed by snapshot content,
    seed-set content and cascade parameters. Purely a speedup: entries
    are reproducible from their keys, so hits never change results."""

    def __init__(self):
        self._data: dict[tuple, SpreadEstimate] = {}
        self._lock = threading.Lock()

    def get(self, key: tuple) -> SpreadEstimate | None:
        with self._lock:
            return self._data.get(key)

    def put(self, key: tuple, value: SpreadEstimate) -> None:
        with self._lock:
            self._data[key] = value

    def __len__(self) -> int:
        with self._lock:
            return len(self._data)


class Evaluator:
    """Deterministic fitness oracle for seed sets on one snapshot.

    The simulation seed for a seed set is derived from the master token,
    the snapshot fingerprint, the cascade parameters and the sorted gene
    content, so results do not depend on evaluation order and identical
    chromosomes always agree. With ``crn=True`` the gene content is
    replaced by a caller-supplied token (usually the generation index),
    giving every chromosome of a generation the same noise schedule.
    """

    def __init__(
        self,
        snapshot: Snapshot,
        params: ICParams,
        master_token: int,
        crn: bool = False,
        cache: SpreadCache | None = None,
    ):
        self.snapshot = snapshot
        self.params = params
        self.master_token = master_token
        self.crn = crn
        self.cache = cache if cache is not None else SpreadCache()

    def fitness(self, genes: Iterable[int], crn_token=None) -> SpreadEstimate:
        genes_key = tuple(sorted(genes))
        p = self.params
        noise_token = crn_token if (self.crn and crn_token is not None) else genes_key
        key = (
            self.snapshot.fingerprint,
            p.activation_probability,
            p.mc_runs,
            p.max_hops,
            genes_key,
            noise_token if self.crn else None,
        )
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        seed = stable_seed(
            "spread",
            self.master_token,
            self.snapshot.fingerprint,
            p.activation_probability,
            p.mc_runs,
            p.max_hops,
            noise_token,
        )
        est = estimate_spread(self.snapshot, genes_key, p, random.Random(seed))
        self.cache.put(key, est)
        return est
