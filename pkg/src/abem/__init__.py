"""Adaptive agent-based evolutionary influencer seeding.

The package selects k influencers in static or evolving social networks
by combining (a) decentralised influencer nomination into a candidate
pool, (b) a genetic algorithm whose chromosomes are seed sets drawn
from that pool, and (c) population recalibration when the network
changes underneath a running search. Influence is measured by
Monte-Carlo simulation of the Independent Cascade process.

Public layers:

- :mod:`abem.graph` - snapshots, dynamic networks, loaders, generators
- :mod:`abem.diffusion` - cascade simulation and spread estimation
- :mod:`abem.nomination` - local influence scoring and candidate pools
- :mod:`abem.evolve` - the adaptive evolutionary engine
- :mod:`abem.baselines` - greedy, degree, discounted-degree, random
  and plain/pool-initialised GA seeders
- :mod:`abem.harness` - experiment configs, commands and CSV outputs
"""

from .baselines import (
    ddh_seed,
    degree_seed,
    greedy_seed,
    plain_ga_seed,
    pool_ga_seed,
    random_seed,
)
from .diffusion import (
    Evaluator,
    EnumerationLimitError,
    ICParams,
    SpreadCache,
    SpreadEstimate,
    estimate_local_influence,
    estimate_spread,
    exact_spread_bruteforce,
    simulate_ic_once,
    stable_seed,
)
from .evolve import (
    GAConfig,
    GenerationTrace,
    Population,
    SeedingResult,
    SeedSet,
    SnapshotOutcome,
    crossover,
    init_population,
    mutate,
    recalibrate,
    run_abem,
    select,
    selection_rates,
)
from .graph import (
    DynamicNetwork,
    EdgeListParseError,
    GraphError,
    MissingNodeError,
    Snapshot,
    SnapshotDelta,
    apply_delta,
    diff,
    fixed_width_buckets,
    generate_synthetic,
    load_edge_list,
    load_temporal_edge_list,
    quarter_buckets,
    value_buckets,
)
from .nomination import (
    CandidateInfo,
    InfluencerPool,
    NominationDecision,
    NominationParams,
    evaluate_nomination,
    local_ic_params,
    local_influence_map,
    pool_from_influence,
    pool_from_table,
    pool_size_curve,
    pool_to_table,
    refresh_pool,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # graph
    "Snapshot",
    "SnapshotDelta",
    "DynamicNetwork",
    "GraphError",
    "EdgeListParseError",
    "MissingNodeError",
    "diff",
    "apply_delta",
    "load_edge_list",
    "load_temporal_edge_list",
    "quarter_buckets",
    "fixed_width_buckets",
    "value_buckets",
    "generate_synthetic",
    # diffusion
    "ICParams",
    "SpreadEstimate",
    "SpreadCache",
    "Evaluator",
    "EnumerationLimitError",
    "simulate_ic_once",
    "estimate_spread",
    "estimate_local_influence",
    "exact_spread_bruteforce",
    "stable_seed",
    # nomination
    "NominationParams",
    "CandidateInfo",
    "InfluencerPool",
    "NominationDecision",
    "local_ic_params",
    "local_influence_map",
    "evaluate_nomination",
    "refresh_pool",
    "pool_from_influence",
    "pool_size_curve",
    "pool_to_table",
    "pool_from_table",
    # evolve
    "SeedSet",
    "Population",
    "GAConfig",
    "GenerationTrace",
    "SnapshotOutcome",
    "SeedingResult",
    "init_population",
    "selection_rates",
    "select",
    "crossover",
    "mutate",
    "recalibrate",
    "run_abem",
    # baselines
    "greedy_seed",
    "degree_seed",
    "ddh_seed",
    "random_seed",
    "plain_ga_seed",
    "pool_ga_seed",
]
