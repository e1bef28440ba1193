"""The evolutionary engine: operators, populations, and full runs."""

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abem.diffusion import ICParams, SpreadEstimate
from abem.evolve import (
    GAConfig,
    Population,
    SeedSet,
    crossover,
    init_population,
    mutate,
    recalibrate,
    run_abem,
    select,
    selection_rates,
    stochastic_keep,
)
from abem.graph import Snapshot, generate_synthetic
from abem.nomination import CandidateInfo, InfluencerPool, NominationParams, local_ic_params


def member(genes, fit=None) -> SeedSet:
    m = SeedSet(tuple(genes))
    if fit is not None:
        m.cached_fitness = SpreadEstimate(float(fit), 0.0, 1)
    return m


def pool_of(*ids) -> InfluencerPool:
    return InfluencerPool({v: CandidateInfo(1.0, 1, 0) for v in ids})


# -- SeedSet / GAConfig -------------------------------------------------------


def test_seedset_rejects_duplicates_and_empties():
    with pytest.raises(ValueError):
        SeedSet((1, 1, 2))
    with pytest.raises(ValueError):
        SeedSet(())
    assert SeedSet((3, 1)).k == 2
    assert SeedSet((3, 1)).gene_set() == frozenset({1, 3})


def test_gaconfig_validation():
    GAConfig(seed_set_size=2)
    with pytest.raises(ValueError):
        GAConfig(seed_set_size=0)
    with pytest.raises(ValueError):
        GAConfig(seed_set_size=1, crossover_rate=1.5)
    with pytest.raises(ValueError):
        GAConfig(seed_set_size=1, mutation_rate=-0.1)
    with pytest.raises(ValueError):
        GAConfig(seed_set_size=1, population_size=0)
    with pytest.raises(ValueError):
        GAConfig(seed_set_size=1, generations=0)
    with pytest.raises(ValueError):
        GAConfig(seed_set_size=1, convergence_window=0)


# -- init_population ----------------------------------------------------------


def test_init_population_samples_from_pool():
    cfg = GAConfig(seed_set_size=3, population_size=20)
    pop = init_population(pool_of(1, 2, 3, 4, 5), [], cfg, random.Random(0))
    assert len(pop.members) == 20
    for m in pop.members:
        assert m.k == 3
        assert m.gene_set() <= {1, 2, 3, 4, 5}
    assert pop.generation == 0


def test_init_population_pool_equals_k():
    cfg = GAConfig(seed_set_size=3, population_size=5)
    pop = init_population(pool_of(7, 8, 9), [], cfg, random.Random(0))
    assert all(m.gene_set() == {7, 8, 9} for m in pop.members)


def test_init_population_falls_back_beyond_pool():
    cfg = GAConfig(seed_set_size=4, population_size=10)
    pop = init_population(pool_of(1, 2), range(10, 20), cfg, random.Random(1))
    for m in pop.members:
        assert {1, 2} <= m.gene_set()
        assert len(m.gene_set() - {1, 2}) == 2


def test_init_population_universe_too_small():
    cfg = GAConfig(seed_set_size=5, population_size=2)
    with pytest.raises(ValueError):
        init_population(pool_of(1, 2), [3], cfg, random.Random(0))


def test_init_population_deterministic():
    cfg = GAConfig(seed_set_size=2, population_size=8)
    a = init_population(pool_of(*range(10)), [], cfg, random.Random(5))
    b = init_population(pool_of(*range(10)), [], cfg, random.Random(5))
    assert [m.genes for m in a.members] == [m.genes for m in b.members]


# -- selection ----------------------------------------------------------------


def test_selection_rates_worked_examples():
    assert selection_rates([3, 1]) == pytest.approx([0.75, 0.25])
    assert selection_rates([2, 3, 5]) == pytest.approx([0.2, 0.3, 0.5])
    assert selection_rates([4, 4, 4, 4]) == pytest.approx([0.25] * 4)


def test_selection_rates_all_zero_uniform():
    assert selection_rates([0, 0]) == pytest.approx([0.5, 0.5])


def test_selection_rates_rejects_negative():
    with pytest.raises(ValueError):
        selection_rates([1, -1])


@settings(max_examples=200)
@given(st.lists(st.floats(0, 1000, allow_nan=False), min_size=1, max_size=30))
def test_selection_rates_sum_to_one(fits):
    rates = selection_rates(fits)
    assert abs(sum(rates) - 1.0) < 1e-12
    assert all(0.0 <= r <= 1.0 for r in rates)


def test_select_passthrough_at_target():
    pop = Population([member([1], 5), member([2], 1)])
    out = select(pop, 2, random.Random(0))
    assert [m.genes for m in out.members] == [(1,), (2,)]


def test_select_returns_exact_target_size():
    rng = random.Random(3)
    for trial in range(50):
        members = [member([i], fit=i + 1) for i in range(10)]
        out = select(Population(members), 4, rng)
        assert len(out.members) == 4


def test_select_keeps_best_member():
    rng = random.Random(4)
    for trial in range(100):
        members = [member([i], fit=1.0) for i in range(9)]
        members.append(member([99], fit=50.0))
        out = select(Population(members), 3, rng)
        assert any(m.genes == (99,) for m in out.members)


def test_select_requires_enough_members():
    with pytest.raises(ValueError):
        select(Population([member([1], 1)]), 2, random.Random(0))


def test_stochastic_keep_frequency():
    rng = random.Random(11)
    n = 10_000
    kept = sum(stochastic_keep([0.75], rng)[0] for _ in range(n))
    assert abs(kept / n - 0.75) < 0.02


# -- crossover ----------------------------------------------------------------


def find_crossover_rng(parent_count=2, want_xi=2, k=4):
    """A seed whose first draws select member 0 for crossover with
    slicing point want_xi, then skip the remaining members."""
    for seed in range(10_000):
        rng = random.Random(seed)
        if rng.random() >= 1.0:
            continue
        if rng.randint(1, k - 1) != want_xi:
            continue
        ok = all(rng.random() >= 0.0 for _ in range(parent_count - 1))
        return random.Random(seed)
    raise AssertionError("no seed found")


def test_crossover_worked_example():
    """Parents {1,2,3,4} and {5,6,7,8} at slicing point 2 exchange
    suffixes into {1,2,7,8} and {5,6,3,4}."""
    parents = [member([1, 2, 3, 4], fit=1.0), member([5, 6, 7, 8], fit=2.0)]
    pop = Population(list(parents))
    # p_c = 1 crosses both members; capture the first pair of offspring.
    for seed in range(5000):
        rng = random.Random(seed)
        rng.random()
        if rng.randint(1, 3) == 2:
            out = crossover(Population(list(parents)), pool_of(), 1.0,
                            random.Random(seed))
            break
    child_sets = [m.gene_set() for m in out.members[2:4]]
    assert {1, 2, 7, 8} in child_sets
    assert {5, 6, 3, 4} in child_sets
    assert out.members[0].genes == (1, 2, 3, 4)
    assert out.members[1].genes == (5, 6, 7, 8)


def test_crossover_appends_offspring():
    parents = [member([1, 2], fit=1.0), member([3, 4], fit=2.0)]
    out = crossover(Population(parents), pool_of(9), 1.0, random.Random(0))
    assert len(out.members) == 6
    for m in out.members:
        assert m.k == 2


def test_crossover_zero_rate_is_identity():
    parents = [member([1, 2], 1), member([3, 4], 2)]
    out = crossover(Population(list(parents)), pool_of(), 0.0, random.Random(0))
    assert [m.genes for m in out.members] == [(1, 2), (3, 4)]


def test_crossover_repair_path():
    """Overlapping parents shrink on dedup and are repaired from the pool."""
    parents = [member([1, 2, 3], fit=1.0), member([3, 4, 5], fit=2.0)]
    out = crossover(
        Population(list(parents)), pool_of(100, 101, 102), 1.0, random.Random(2)
    )
    for child in out.members[2:]:
        assert child.k == 3
        assert len(child.gene_set()) == 3


def test_crossover_partner_is_best_other():
    """Each mother pairs with the best-fitness member other than itself,
    so every offspring's genes come from that specific pair."""
    a = member([1, 2], fit=10.0)
    b = member([3, 4], fit=5.0)
    c = member([5, 6], fit=1.0)
    for seed in range(40):
        out = crossover(
            Population([a, b, c]), pool_of(), 1.0, random.Random(seed),
            fallback_nodes=range(50, 60),
        )
        assert len(out.members) == 9
        pair_of = {0: {1, 2, 3, 4},   # a x b (best other than a)
                   1: {3, 4, 1, 2},   # b x a
                   2: {5, 6, 1, 2}}   # c x a
        for idx in range(3):
            for child in out.members[3 + 2 * idx: 5 + 2 * idx]:
                assert child.gene_set() <= pair_of[idx]


def test_crossover_k1_unchanged():
    parents = [member([1], 1), member([2], 2)]
    out = crossover(Population(list(parents)), pool_of(5), 1.0, random.Random(0))
    assert [m.genes for m in out.members] == [(1,), (2,)]


# -- mutation -----------------------------------------------------------------


def test_mutate_zero_rate_identity():
    pop = Population([member([1, 2], 1)])
    out = mutate(pop, pool_of(9, 10), 0.0, random.Random(0))
    assert out.members[0] is pop.members[0]


def test_mutate_full_rate_disjoint_pool():
    pop = Population([member([1, 2, 3])])
    out = mutate(pop, pool_of(7, 8, 9), 1.0, random.Random(1))
    assert out.members[0].gene_set() == {7, 8, 9}


def test_mutate_no_candidates_leaves_gene():
    pop = Population([member([1, 2])])
    out = mutate(pop, pool_of(1, 2), 1.0, random.Random(2))
    assert out.members[0].gene_set() == {1, 2}


def test_mutate_preserves_size_and_distinctness():
    rng = random.Random(3)
    pop = Population([member(random.Random(i).sample(range(30), 4)) for i in range(20)])
    out = mutate(pop, pool_of(*range(30)), 0.5, rng)
    for m in out.members:
        assert m.k == 4
        assert len(m.gene_set()) == 4


def test_mutate_frequency():
    """Empirical mutated-gene fraction tracks p_m."""
    rng = random.Random(4)
    genes_total = 0
    genes_changed = 0
    pool = pool_of(*range(1000))
    while genes_total < 10_000:
        original = member(random.Random(genes_total).sample(range(1000, 1500), 5))
        out = mutate(Population([original]), pool, 0.1, rng)
        new = out.members[0]
        genes_changed += sum(a != b for a, b in zip(original.genes, new.genes))
        genes_total += 5
    assert abs(genes_changed / genes_total - 0.1) < 0.01


# -- recalibration ------------------------------------------------------------


def test_recalibrate_replaces_departed_gene():
    s = Snapshot(1, [1, 2, 3], [(1, 2), (2, 3)])
    pop = Population([member([1, 99])])
    out = recalibrate(pop, s, pool_of(1, 2, 3), {99: 4}, random.Random(0))
    new = out.members[0]
    assert 99 not in new.gene_set()
    assert new.k == 2
    assert new.gene_set() <= {1, 2, 3}
    assert new.cached_fitness is None


def test_recalibrate_keeps_stable_genes():
    s = Snapshot(1, [1, 2, 3], [(1, 2), (2, 3)])
    original = member([1, 2], fit=3.0)
    pop = Population([original])
    out = recalibrate(pop, s, pool_of(1, 2), {1: 1, 2: 2}, random.Random(0))
    assert out.members[0] is original
    assert out.members[0].cached_fitness is not None


def test_recalibrate_degree_unchanged_never_replaced():
    s = Snapshot(1, [1, 2, 3], [(1, 2), (1, 3)])
    pop = Population([member([1])])
    # gene 1 is off-pool but its degree matches history → p_d = 0
    out = recalibrate(pop, s, pool_of(5), {1: 2}, random.Random(0),
                      fallback_nodes=s.nodes)
    assert out.members[0].genes == (1,)


def test_recalibrate_degree_halved_frequency():
    """Off-pool gene whose degree halved is replaced about half the time."""
    s = Snapshot(1, [1, 2, 3], [(1, 2)])  # degree(1) = 1
    pool = pool_of(3)
    rng = random.Random(5)
    replaced = 0
    trials = 10_000
    for _ in range(trials):
        out = recalibrate(Population([member([1, 2])]), s, pool, {1: 2, 2: 1}, rng)
        if 1 not in out.members[0].gene_set():
            replaced += 1
    assert abs(replaced / trials - 0.5) < 0.02


def test_recalibrate_pd_clamped_for_grown_degree():
    s = Snapshot(1, [1, 2, 3], [(1, 2), (1, 3)])  # degree(1) = 2
    pop = Population([member([1])])
    out = recalibrate(pop, s, pool_of(9), {1: 1}, random.Random(6))
    assert out.members[0].genes == (1,)


def test_recalibrate_pool_exhausted_uses_snapshot():
    s = Snapshot(1, [1, 2], [(1, 2)])
    pop = Population([member([1, 99])])
    out = recalibrate(pop, s, InfluencerPool(), {}, random.Random(7))
    assert out.members[0].gene_set() == {1, 2}


# -- full runs ----------------------------------------------------------------


def nom(p_a=0.1, theta_s=1, theta_q=0.0, mc=20):
    return NominationParams(theta_s, theta_q, local_ic_params(p_a, mc_runs=mc))


def test_run_abem_deterministic_and_monotone():
    s = generate_synthetic("erdos_renyi", 30, p=0.12, rng_seed=2)
    cfg = GAConfig(seed_set_size=2, population_size=10, generations=12,
                   convergence_window=None, rng_seed=4)
    traces = []
    first = run_abem(s, nom(), cfg, ICParams(0.2, 50), trace_sink=traces.append)
    second = run_abem(s, nom(), cfg, ICParams(0.2, 50))
    assert first.outcomes[0].best.genes == second.outcomes[0].best.genes
    assert first.outcomes[0].best.cached_fitness == second.outcomes[0].best.cached_fitness
    best = [t.best_fitness for t in traces]
    assert len(traces) == 12
    assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))
    assert [t.generation for t in traces] == list(range(12))


def test_run_abem_chromosomes_stay_valid():
    s = generate_synthetic("barabasi_albert", 25, m=2, rng_seed=3)
    cfg = GAConfig(seed_set_size=3, population_size=8, generations=8,
                   convergence_window=None, rng_seed=1)
    result = run_abem(s, nom(), cfg, ICParams(0.3, 30))
    best = result.outcomes[0].best
    assert best.k == 3
    assert len(best.gene_set()) == 3
    assert best.gene_set() <= s.nodes


def test_run_abem_k_equals_n_trivial():
    s = Snapshot(0, [0, 1, 2], [(0, 1), (1, 2)])
    cfg = GAConfig(seed_set_size=3, population_size=4, generations=3,
                   convergence_window=None, rng_seed=0)
    result = run_abem(s, nom(p_a=1.0), cfg, ICParams(1.0, 10))
    out = result.outcomes[0]
    assert out.best.gene_set() == {0, 1, 2}
    assert out.best.cached_fitness.mean == 3.0


def test_run_abem_generation_cap():
    s = generate_synthetic("erdos_renyi", 20, p=0.2, rng_seed=5)
    cfg = GAConfig(seed_set_size=2, population_size=6, generations=5,
                   convergence_window=None, rng_seed=2)
    traces = []
    result = run_abem(s, nom(), cfg, ICParams(0.1, 20), trace_sink=traces.append)
    assert result.outcomes[0].generations <= 5
    assert max(t.generation for t in traces) == 4


def test_run_abem_convergence_window_stops_early():
    s = generate_synthetic("erdos_renyi", 20, p=0.2, rng_seed=6)
    capped = GAConfig(seed_set_size=2, population_size=6, generations=400,
                      convergence_window=5, rng_seed=3)
    traces = []
    run_abem(s, nom(), capped, ICParams(0.05, 20), trace_sink=traces.append)
    assert len(traces) < 400


def test_run_abem_dynamic_carries_population():
    from abem.graph import DynamicNetwork

    a = generate_synthetic("erdos_renyi", 25, p=0.15, rng_seed=7)
    b_edges = set(a.edges())
    b_edges.discard(next(iter(sorted(b_edges))))
    b = Snapshot(1, a.nodes, b_edges)
    net = DynamicNetwork([a, b])
    cfg = GAConfig(seed_set_size=2, population_size=8, generations=6,
                   convergence_window=None, rng_seed=9)
    traces = []
    result = run_abem(net, nom(), cfg, ICParams(0.2, 30), trace_sink=traces.append)
    assert len(result.outcomes) == 2
    assert {t.snapshot_index for t in traces} == {0, 1}
    for outcome, snap in zip(result.outcomes, (a, b)):
        assert outcome.best.gene_set() <= snap.nodes


def test_run_abem_rejects_k_above_n():
    s = Snapshot(0, [0, 1], [(0, 1)])
    cfg = GAConfig(seed_set_size=3, population_size=4, generations=2, rng_seed=0)
    with pytest.raises(ValueError):
        run_abem(s, nom(), cfg, ICParams(0.5, 10))


# -- operator pipeline with silent rates --------------------------------------


def test_pipeline_with_zero_rates_only_filters():
    """With p_c = p_m = 0 on a static snapshot, gene content can only be
    filtered by selection, never altered."""
    s = generate_synthetic("erdos_renyi", 20, p=0.25, rng_seed=8)
    cfg = GAConfig(seed_set_size=2, population_size=6, generations=6,
                   crossover_rate=0.0, mutation_rate=0.0,
                   convergence_window=None, rng_seed=11)
    pool = pool_of(*sorted(s.nodes))
    rng = random.Random(0)
    pop = init_population(pool, [], cfg, rng)
    initial_sets = {m.gene_set() for m in pop.members}
    out = crossover(pop, pool, 0.0, rng, fitness_of=lambda m: 1.0)
    out = mutate(out, pool, 0.0, rng)
    assert {m.gene_set() for m in out.members} <= initial_sets
