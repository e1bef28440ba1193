"""Agent-based influencer nomination and the shared influencer pool.

Each agent scores its own hop-capped local influence and compares it
against its neighbourhood. An agent nominates itself when its score
ranks high enough among the neighbourhood and its degree clears a
threshold; pooled agents that no longer qualify withdraw. Refreshes are
evaluated against one shared score table and committed in a single
phase, so the outcome never depends on node iteration order.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .diffusion import (
    DEFAULT_LOCAL_HOPS,
    ICParams,
    LOCAL_ESTIMATE_MC_RUNS,
    estimate_local_influence,
    stable_seed,
)
from .graph import MissingNodeError, Snapshot, degree

__all__ = [
    "NominationParams",
    "CandidateInfo",
    "InfluencerPool",
    "NominationDecision",
    "local_influence_map",
    "evaluate_nomination",
    "refresh_pool",
    "pool_from_influence",
    "pool_size_curve",
    "pool_to_table",
    "pool_from_table",
    "local_ic_params",
]


def local_ic_params(p_a: float, mc_runs: int = LOCAL_ESTIMATE_MC_RUNS,
                    max_hops: int = DEFAULT_LOCAL_HOPS) -> ICParams:
    """Cascade parameters for local influence scoring (hop cap required)."""
    return ICParams(activation_probability=p_a, mc_runs=mc_runs, max_hops=max_hops)


@dataclass(frozen=True)
class NominationParams:
    """Thresholds and scoring budget for self-nomination.

    ``degree_threshold`` is the minimum degree; ``quantile_threshold``
    is the minimum rank fraction within the closed neighbourhood, where
    the rank fraction of v is |{u in L : score(u) < score(v)}| / |L|
    over L = {v} union neighbours(v). Ties count as not-smaller.
    """

    degree_threshold: int
    quantile_threshold: float
    ic_params: ICParams

    def __post_init__(self):
        if self.degree_threshold < 1:
            raise ValueError("degree_threshold must be at least 1")
        if not 0.0 <= self.quantile_threshold <= 1.0:
            raise ValueError("quantile_threshold must lie in [0, 1]")
        if self.ic_params.max_hops is None:
            raise ValueError("nomination scoring requires a hop-capped ICParams")


@dataclass(frozen=True)
class CandidateInfo:
    local_influence: float
    degree_at_nomination: int
    nominated_at: int


@dataclass
class InfluencerPool:
    """Current influencer candidates with their nomination metadata."""

    candidates: dict[int, CandidateInfo] = field(default_factory=dict)

    def __contains__(self, node: int) -> bool:
        return node in self.candidates

    def __len__(self) -> int:
        return len(self.candidates)

    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.candidates))

    def get(self, node: int) -> CandidateInfo | None:
        return self.candidates.get(node)


class NominationDecision(enum.Enum):
    NOMINATE = "nominate"
    WITHDRAW = "withdraw"
    UNCHANGED = "unchanged"


def local_influence_map(
    s: Snapshot,
    params: NominationParams,
    rng: random.Random | int,
    nodes: Iterable[int] | None = None,
) -> dict[int, float]:
    """Score local influence for ``nodes`` (default: every node).

    Per-node simulation seeds are derived from one token drawn from
    ``rng``, so the same seed always yields the same score table and a
    node's score does not depend on whose neighbourhood asked for it.
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    token = rng.getrandbits(64)
    targets = sorted(s.nodes) if nodes is None else sorted(set(nodes))
    scores: dict[int, float] = {}
    for v in targets:
        if v not in s.nodes:
            raise MissingNodeError(v)
        est = estimate_local_influence(
            s, v, params.ic_params, random.Random(stable_seed("local", token, v))
        )
        scores[v] = est.mean
    return scores


def _passes(s: Snapshot, v: int, params: NominationParams,
            influence: Mapping[int, float]) -> bool:
    if degree(s, v) < params.degree_threshold:
        return False
    group = [v, *s.adjacency[v]]
    own = influence[v]
    below = sum(1 for u in group if influence[u] < own)
    return below / len(group) >= params.quantile_threshold


def evaluate_nomination(
    s: Snapshot,
    v: int,
    params: NominationParams,
    rng: random.Random | int,
    pool: InfluencerPool | None = None,
    influence: Mapping[int, float] | None = None,
) -> NominationDecision:
    """Decide one agent's nomination against its closed neighbourhood.

    Returns NOMINATE when the agent passes both thresholds, WITHDRAW
    when it is currently pooled but fails, and UNCHANGED otherwise. A
    precomputed ``influence`` table may be supplied; otherwise scores
    for the closed neighbourhood are estimated fresh from ``rng``.
    """
    if v not in s.nodes:
        raise MissingNodeError(v)
    if influence is None:
        influence = local_influence_map(
            s, params, rng, nodes=[v, *s.adjacency[v]]
        )
    if _passes(s, v, params, influence):
        return NominationDecision.NOMINATE
    if pool is not None and v in pool:
        return NominationDecision.WITHDRAW
    return NominationDecision.UNCHANGED


def refresh_pool(
    s: Snapshot,
    prior: InfluencerPool,
    params: NominationParams,
    rng: random.Random | int,
) -> InfluencerPool:
    """Re-run nomination for every node and commit the new pool.

    Scores are computed once and shared across all neighbourhood
    evaluations. Nodes that pass enter or stay in the pool; pooled nodes
    that fail or left the snapshot are dropped. Continuously pooled
    nodes keep their original nomination metadata, with the influence
    score refreshed.
    """
    influence = local_influence_map(s, params, rng)
    out: dict[int, CandidateInfo] = {}
    for v in sorted(s.nodes):
        if not _passes(s, v, params, influence):
            continue
        kept = prior.get(v)
        if kept is not None:
            out[v] = CandidateInfo(
                local_influence=influence[v],
                degree_at_nomination=kept.degree_at_nomination,
                nominated_at=kept.nominated_at,
            )
        else:
            out[v] = CandidateInfo(
                local_influence=influence[v],
                degree_at_nomination=degree(s, v),
                nominated_at=s.time_index,
            )
    return InfluencerPool(out)


def pool_from_influence(
    s: Snapshot,
    params: NominationParams,
    influence: dict[int, float],
) -> InfluencerPool:
    """Build a fresh pool from an existing local-influence table.

    Useful for threshold sweeps, where many (degree_threshold,
    quantile_threshold) pairs should be judged against one shared set of
    score estimates rather than re-simulated per grid point.
    """
    out = {
        v: CandidateInfo(
            local_influence=influence[v],
            degree_at_nomination=degree(s, v),
            nominated_at=s.time_index,
        )
        for v in sorted(s.nodes)
        if _passes(s, v, params, influence)
    }
    return InfluencerPool(out)


def pool_size_curve(
    s: Snapshot,
    grid: Iterable[tuple[int, float]],
    ic_params: ICParams,
    rng: random.Random | int,
) -> list[tuple[int, float, int]]:
    """Pool size per (degree_threshold, quantile_threshold) grid point.

    All grid points share one score table, so sizes are directly
    comparable: raising either threshold can only shrink the pool.
    """
    points = list(grid)
    if not points:
        return []
    base = NominationParams(
        degree_threshold=1, quantile_threshold=0.0, ic_params=ic_params
    )
    influence = local_influence_map(s, base, rng)
    out = []
    for theta_s, theta_q in points:
        params = NominationParams(
            degree_threshold=theta_s, quantile_threshold=theta_q, ic_params=ic_params
        )
        size = sum(1 for v in s.nodes if _passes(s, v, params, influence))
        out.append((theta_s, theta_q, size))
    return out


# -- pool import/export ------------------------------------------------------

_TABLE_HEADER = "# node_id local_influence degree_at_nomination nominated_at"


def pool_to_table(pool: InfluencerPool) -> str:
    """Serialise a pool to a whitespace-separated text table."""
    lines = [_TABLE_HEADER]
    for v in pool.ids():
        c = pool.candidates[v]
        lines.append(
            f"{v} {c.local_influence!r} {c.degree_at_nomination} {c.nominated_at}"
        )
    return "\n".join(lines) + "\n"


def pool_from_table(text: str) -> InfluencerPool:
    """Parse a text table produced by :func:`pool_to_table`."""
    candidates: dict[int, CandidateInfo] = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 4:
            raise ValueError(f"pool table line {i}: expected 4 fields")
        node = int(tokens[0])
        candidates[node] = CandidateInfo(
            local_influence=float(tokens[1]),
            degree_at_nomination=int(tokens[2]),
            nominated_at=int(tokens[3]),
        )
    return InfluencerPool(candidates)
