"""Adaptive evolutionary engine for influencer seed-set search.

Chromosomes are ordered tuples of k distinct node ids with set
semantics: fitness depends only on the gene content, and repairs keep
genes distinct. Each generation applies, in order: re-calibration
against the current snapshot (adaptive runs only), fitness-proportional
selection back to the configured population size, best-partner
single-point crossover that appends offspring, and per-gene mutation.
Fitness is the Monte-Carlo influence spread of the gene set.

Determinism: all stochastic draws flow from the configured seed, and
per-chromosome simulation seeds are derived from gene content, so
results are bit-identical for identical inputs and independent of
evaluation order (including concurrent evaluation).
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from .diffusion import Evaluator, ICParams, SpreadCache, SpreadEstimate, stable_seed
from .graph import DynamicNetwork, Snapshot, degree
from .nomination import InfluencerPool, NominationParams, refresh_pool

__all__ = [
    "SeedSet",
    "Population",
    "GAConfig",
    "GenerationTrace",
    "SnapshotOutcome",
    "SeedingResult",
    "init_population",
    "selection_rates",
    "stochastic_keep",
    "select",
    "crossover",
    "mutate",
    "recalibrate",
    "run_abem",
    "fitness_master_token",
]


@dataclass
class SeedSet:
    """One chromosome: an ordered tuple of k distinct node ids."""

    genes: tuple[int, ...]
    cached_fitness: SpreadEstimate | None = None

    def __post_init__(self):
        self.genes = tuple(self.genes)
        if len(set(self.genes)) != len(self.genes):
            raise ValueError("chromosome genes must be distinct")
        if not self.genes:
            raise ValueError("chromosome must hold at least one gene")

    @property
    def k(self) -> int:
        return len(self.genes)

    def gene_set(self) -> frozenset[int]:
        return frozenset(self.genes)


@dataclass
class Population:
    members: list[SeedSet]
    generation: int = 0
    best_ever: SeedSet | None = None


@dataclass(frozen=True)
class GAConfig:
    """Evolution parameters. ``generations`` caps the generation counter:
    a run traces populations 0 (initial) through at most generations-1."""

    seed_set_size: int
    population_size: int = 50
    generations: int = 1000
    crossover_rate: float = 1.0
    mutation_rate: float = 0.1
    convergence_window: int | None = 100
    rng_seed: int = 0

    def __post_init__(self):
        if self.seed_set_size < 1:
            raise ValueError("seed_set_size must be at least 1")
        if self.population_size < 1:
            raise ValueError("population_size must be at least 1")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.convergence_window is not None and self.convergence_window < 1:
            raise ValueError("convergence_window must be positive when set")


@dataclass(frozen=True)
class GenerationTrace:
    snapshot_index: int
    generation: int
    best_fitness: float
    avg_fitness: float
    pool_size: int


@dataclass(frozen=True)
class SnapshotOutcome:
    time_index: int
    best: SeedSet
    generations: int
    pool_size: int
    elapsed_seconds: float


@dataclass(frozen=True)
class SeedingResult:
    outcomes: tuple[SnapshotOutcome, ...]


TraceSink = Callable[[GenerationTrace], None]


def _candidate_ids(pool) -> tuple[int, ...]:
    if isinstance(pool, InfluencerPool):
        return pool.ids()
    return tuple(sorted(set(pool)))


def init_population(
    pool,
    fallback_nodes: Iterable[int],
    cfg: GAConfig,
    rng: random.Random,
) -> Population:
    """Sample the initial population from the candidate pool.

    Each chromosome draws k distinct ids uniformly without replacement
    from the pool; when the pool holds fewer than k ids, the whole pool
    is taken and the remainder comes from ``fallback_nodes``.
    """
    pool_ids = _candidate_ids(pool)
    fallback = tuple(sorted(set(fallback_nodes) - set(pool_ids)))
    k = cfg.seed_set_size
    if len(pool_ids) + len(fallback) < k:
        raise ValueError("candidate universe smaller than the seed set size")
    members = []
    for _ in range(cfg.population_size):
        if len(pool_ids) >= k:
            genes = tuple(rng.sample(pool_ids, k))
        else:
            genes = pool_ids + tuple(rng.sample(fallback, k - len(pool_ids)))
        members.append(SeedSet(genes))
    return Population(members=members, generation=0)


def selection_rates(fitnesses: Sequence[float]) -> list[float]:
    """Fitness-proportional keep rates; uniform when all fitnesses are 0."""
    if not fitnesses:
        raise ValueError("at least one fitness value is required")
    if any(f < 0 for f in fitnesses):
        raise ValueError("fitness values must be non-negative")
    total = float(sum(fitnesses))
    if total == 0.0:
        return [1.0 / len(fitnesses)] * len(fitnesses)
    return [f / total for f in fitnesses]


def stochastic_keep(rates: Sequence[float], rng: random.Random) -> list[bool]:
    """Independent Bernoulli keep decisions, one draw per member."""
    return [rng.random() < r for r in rates]


def _cached_mean(member: SeedSet) -> float:
    if member.cached_fitness is None:
        raise ValueError("member has no cached fitness; pass fitness_of")
    return member.cached_fitness.mean


def select(
    pop: Population,
    target_size: int,
    rng: random.Random,
    fitness_of: Callable[[SeedSet], float] | None = None,
) -> Population:
    """Shrink an augmented population back to ``target_size``.

    A population already at the target passes through untouched. Larger
    populations go through an independent Bernoulli keep pass at
    fitness-proportional rates; the current best member is guaranteed to
    survive. Undersized outcomes are refilled with the highest-fitness
    missing members, oversized outcomes truncated to the top fitnesses.
    """
    if len(pop.members) < target_size:
        raise ValueError("population smaller than the selection target")
    if len(pop.members) == target_size:
        return Population(pop.members, pop.generation, pop.best_ever)

    fit = fitness_of if fitness_of is not None else _cached_mean
    values = [fit(m) for m in pop.members]
    rates = selection_rates(values)
    kept = stochastic_keep(rates, rng)

    best_idx = max(range(len(values)), key=lambda i: (values[i], -i))
    if not kept[best_idx]:
        kept[best_idx] = True

    chosen = [i for i, keep in enumerate(kept) if keep]
    if len(chosen) < target_size:
        missing = sorted(
            (i for i in range(len(values)) if not kept[i]),
            key=lambda i: (-values[i], i),
        )
        chosen.extend(missing[: target_size - len(chosen)])
        chosen.sort()
    elif len(chosen) > target_size:
        ranked = sorted(chosen, key=lambda i: (-values[i], i))
        chosen = sorted(ranked[:target_size])

    members = [pop.members[i] for i in chosen]
    return Population(members, pop.generation, pop.best_ever)


def _repair_genes(
    genes: Sequence[int],
    k: int,
    pool_ids: Sequence[int],
    fallback_nodes: Sequence[int],
    rng: random.Random,
) -> tuple[int, ...]:
    """Top up a deduplicated gene sequence to k distinct genes."""
    out = list(dict.fromkeys(genes))
    have = set(out)
    eligible = [c for c in pool_ids if c not in have]
    while len(out) < k:
        if not eligible:
            eligible = [c for c in fallback_nodes if c not in have]
            if not eligible:
                raise ValueError("no candidates left to repair chromosome")
        pick = eligible.pop(rng.randrange(len(eligible)))
        out.append(pick)
        have.add(pick)
    return tuple(out)


def crossover(
    pop: Population,
    pool,
    p_c: float,
    rng: random.Random,
    fallback_nodes: Iterable[int] = (),
    fitness_of: Callable[[SeedSet], float] | None = None,
) -> Population:
    """Best-partner single-point crossover; offspring are appended.

    Each pre-existing member enters crossover with probability ``p_c``,
    pairing with the best-fitness other member. Gene suffixes beyond a
    slicing point drawn from [1, k-1] are exchanged; duplicate genes are
    repaired by appending uniform-random pool candidates. Chromosomes of
    size one are never crossed (no interior slicing point exists).
    """
    parents = list(pop.members)
    if len(parents) < 2 or parents[0].k < 2:
        return Population(parents, pop.generation, pop.best_ever)
    fit = fitness_of if fitness_of is not None else _cached_mean
    values = [fit(m) for m in parents]
    pool_ids = _candidate_ids(pool)
    fallback = tuple(sorted(set(fallback_nodes)))
    members = list(parents)
    for i, mother in enumerate(parents):
        if rng.random() >= p_c:
            continue
        partner_idx = max(
            (j for j in range(len(parents)) if j != i),
            key=lambda j: (values[j], -j),
        )
        father = parents[partner_idx]
        k = mother.k
        xi = rng.randint(1, k - 1)
        raw_a = mother.genes[:xi] + father.genes[xi:]
        raw_b = father.genes[:xi] + mother.genes[xi:]
        members.append(SeedSet(_repair_genes(raw_a, k, pool_ids, fallback, rng)))
        members.append(SeedSet(_repair_genes(raw_b, k, pool_ids, fallback, rng)))
    return Population(members, pop.generation, pop.best_ever)


def mutate(
    pop: Population,
    pool,
    p_m: float,
    rng: random.Random,
) -> Population:
    """Per-gene mutation: each gene is independently replaced with
    probability ``p_m`` by a uniform-random pool candidate not already in
    the chromosome. Genes with no eligible replacement stay put."""
    pool_ids = _candidate_ids(pool)
    members = []
    for member in pop.members:
        genes = list(member.genes)
        have = set(genes)
        changed = False
        for pos in range(len(genes)):
            if rng.random() >= p_m:
                continue
            eligible = [c for c in pool_ids if c not in have]
            if not eligible:
                continue
            pick = eligible[rng.randrange(len(eligible))]
            have.discard(genes[pos])
            have.add(pick)
            genes[pos] = pick
            changed = True
        members.append(SeedSet(tuple(genes)) if changed else member)
    return Population(members, pop.generation, pop.best_ever)


def recalibrate(
    pop: Population,
    s: Snapshot,
    pool: InfluencerPool,
    degree_history: dict[int, int],
    rng: random.Random,
    fallback_nodes: Iterable[int] = (),
) -> Population:
    """Replace departed and degraded genes against the current snapshot.

    A gene that left the snapshot is always replaced. A gene still
    present but outside the pool is replaced with probability
    p_d = max(0, 1 - current_degree / prior_degree), where the prior
    degree was recorded when the gene last entered a chromosome.
    Replacements draw uniformly from pool candidates not already in the
    chromosome, falling back to random snapshot nodes when the pool is
    exhausted. Altered chromosomes lose their cached fitness.
    """
    pool_ids = pool.ids()
    fallback = tuple(sorted(set(fallback_nodes) if fallback_nodes else s.nodes))
    members = []
    for member in pop.members:
        genes = list(member.genes)
        have = set(genes)
        changed = False
        for pos, gene in enumerate(list(genes)):
            replace_now = False
            if gene not in s.nodes:
                replace_now = True
            elif gene not in pool:
                prior = degree_history.get(gene, 0)
                if prior > 0:
                    p_d = max(0.0, min(1.0, 1.0 - degree(s, gene) / prior))
                else:
                    p_d = 0.0
                if p_d > 0.0 and rng.random() < p_d:
                    replace_now = True
            if not replace_now:
                continue
            eligible = [c for c in pool_ids if c not in have]
            if not eligible:
                eligible = [c for c in fallback if c not in have]
            if not eligible:
                continue
            pick = eligible[rng.randrange(len(eligible))]
            have.discard(gene)
            have.add(pick)
            genes[pos] = pick
            changed = True
        members.append(SeedSet(tuple(genes)) if changed else member)
    return Population(members, pop.generation, pop.best_ever)


# -- engine ------------------------------------------------------------------


def fitness_master_token(rng_seed: int, snapshot_index: int) -> int:
    """Master token for the fitness schedule of one snapshot's run."""
    return stable_seed(rng_seed, "fit", snapshot_index)


def _evaluate_members(
    members: Sequence[SeedSet],
    evaluator: Evaluator,
    workers: int = 0,
) -> None:
    pending = [m for m in members if m.cached_fitness is None]
    if workers > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda m: evaluator.fitness(m.genes), pending))
        for m, est in zip(pending, results):
            m.cached_fitness = est
    else:
        for m in pending:
            m.cached_fitness = evaluator.fitness(m.genes)


def _best_member(members: Sequence[SeedSet]) -> SeedSet:
    best = members[0]
    for m in members[1:]:
        if m.cached_fitness.mean > best.cached_fitness.mean:
            best = m
    return best


@dataclass
class _LoopOutcome:
    population: Population
    best: SeedSet
    generations: int


def _evolution_loop(
    snapshot: Snapshot,
    cfg: GAConfig,
    evaluator: Evaluator,
    rng: random.Random,
    *,
    init_source,
    replacement_source,
    pool: InfluencerPool | None = None,
    degree_history: dict[int, int] | None = None,
    adaptive: bool = False,
    start_members: Sequence[SeedSet] | None = None,
    trace: TraceSink | None = None,
    snapshot_index: int = 0,
    trace_pool_size: int = 0,
    workers: int = 0,
) -> _LoopOutcome:
    """Run one snapshot's evolution. Shared by the adaptive engine and
    the plain/pool GA baselines (which disable re-calibration)."""
    if len(snapshot.nodes) < cfg.seed_set_size:
        raise ValueError("snapshot has fewer nodes than the seed set size")
    fallback = tuple(sorted(snapshot.nodes))

    if start_members is None:
        pop = init_population(init_source, fallback, cfg, rng)
    else:
        pop = Population([SeedSet(m.genes) for m in start_members], generation=0)
        if adaptive:
            pop = recalibrate(pop, snapshot, pool, degree_history, rng,
                              fallback_nodes=fallback)

    def fitness_of(member: SeedSet) -> float:
        if member.cached_fitness is None:
            member.cached_fitness = evaluator.fitness(member.genes)
        return member.cached_fitness.mean

    _evaluate_members(pop.members, evaluator, workers)
    if adaptive:
        assert degree_history is not None
        for m in pop.members:
            for g in m.genes:
                if g not in degree_history and g in snapshot.nodes:
                    degree_history[g] = degree(snapshot, g)

    champion = _best_member(pop.members)
    best = SeedSet(champion.genes, cached_fitness=champion.cached_fitness)
    pop.best_ever = best
    stall = 0

    def emit() -> None:
        if trace is None:
            return
        avg = sum(m.cached_fitness.mean for m in pop.members) / len(pop.members)
        trace(GenerationTrace(
            snapshot_index=snapshot_index,
            generation=pop.generation,
            best_fitness=best.cached_fitness.mean,
            avg_fitness=avg,
            pool_size=trace_pool_size,
        ))

    emit()
    cap = cfg.generations - 1
    while pop.generation < cap:
        if cfg.convergence_window is not None and stall >= cfg.convergence_window:
            break
        if adaptive:
            pop = recalibrate(pop, snapshot, pool, degree_history, rng,
                              fallback_nodes=fallback)
        pop = select(pop, cfg.population_size, rng, fitness_of=fitness_of)
        pop = crossover(pop, replacement_source, cfg.crossover_rate, rng,
                        fallback_nodes=fallback, fitness_of=fitness_of)
        pop = mutate(pop, replacement_source, cfg.mutation_rate, rng)
        _evaluate_members(pop.members, evaluator, workers)
        pop.generation += 1

        if adaptive:
            live = {g for m in pop.members for g in m.genes}
            updated = {}
            for g in live:
                if g in degree_history:
                    updated[g] = degree_history[g]
                elif g in snapshot.nodes:
                    updated[g] = degree(snapshot, g)
            degree_history.clear()
            degree_history.update(updated)

        gen_best = _best_member(pop.members)
        if gen_best.cached_fitness.mean > best.cached_fitness.mean:
            best = SeedSet(gen_best.genes, cached_fitness=gen_best.cached_fitness)
            stall = 0
        else:
            stall += 1
        pop.best_ever = best
        emit()
    return _LoopOutcome(population=pop, best=best, generations=pop.generation)


def run_abem(
    net: Snapshot | DynamicNetwork,
    nom_params: NominationParams,
    cfg: GAConfig,
    ic: ICParams,
    trace_sink: TraceSink | None = None,
    *,
    workers: int = 0,
    cache: SpreadCache | None = None,
    fixed_pool: InfluencerPool | None = None,
) -> SeedingResult:
    """Adaptive evolutionary seeding over a snapshot or snapshot sequence.

    Per snapshot: the influencer pool is refreshed, the population is
    initialised from the pool (first snapshot) or carried forward and
    re-calibrated (later snapshots), and the evolution loop runs until
    the generation cap or the convergence window is hit. Returns the
    best seed set found on each snapshot together with the generations
    used and the pool size. Fully deterministic for a fixed
    ``cfg.rng_seed``.

    ``fixed_pool`` skips the per-snapshot nomination refresh and uses
    the given pool throughout, which lets callers sweep thresholds over
    a single shared local-influence table.
    """
    snaps = list(net) if isinstance(net, DynamicNetwork) else [net]
    root = cfg.rng_seed
    shared_cache = cache if cache is not None else SpreadCache()
    pool = InfluencerPool()
    carried: list[SeedSet] | None = None
    history: dict[int, int] = {}
    outcomes = []
    for si, snap in enumerate(snaps):
        t0 = time.perf_counter()
        if fixed_pool is not None:
            pool = fixed_pool
        else:
            pool = refresh_pool(
                snap, pool, nom_params, random.Random(stable_seed(root, "pool", si))
            )
        evaluator = Evaluator(
            snap, ic, fitness_master_token(root, si), cache=shared_cache
        )
        loop_rng = random.Random(stable_seed(root, "engine", si))
        outcome = _evolution_loop(
            snap,
            cfg,
            evaluator,
            loop_rng,
            init_source=pool,
            replacement_source=pool,
            pool=pool,
            degree_history=history,
            adaptive=True,
            start_members=carried,
            trace=trace_sink,
            snapshot_index=si,
            trace_pool_size=len(pool),
            workers=workers,
        )
        carried = outcome.population.members
        outcomes.append(SnapshotOutcome(
            time_index=snap.time_index,
            best=outcome.best,
            generations=outcome.generations,
            pool_size=len(pool),
            elapsed_seconds=time.perf_counter() - t0,
        ))
    return SeedingResult(outcomes=tuple(outcomes))
