"""Experiment harness: config files, dataset assembly, and the five
experiment commands behind the command line interface.

A single YAML config drives every command. The harness resolves all
defaults, emits the resolved config next to the outputs as
``config_used.yaml``, and stamps every result row with a short hash of
that canonical form plus the master rng seed. Results are written as
``results.csv`` with the frozen column set

    algorithm,k,snapshot,coverage,std_error,seconds,generations,pool_size,config_hash,rng_seed

(sweep outputs prepend the grid columns ``theta_s,theta_q,
generations_budget``). Evolutionary runs also emit per-generation trace
files with columns ``generation,best_fitness,avg_fitness,pool_size``.

Every command is deterministic for a fixed (config, seed) pair: cell
work is seeded from the master seed and the cell coordinates, and the
wall-clock column is recorded only when ``timing.record_wall_clock`` is
enabled (it is off by default precisely so that re-runs are
byte-identical). Completed cells are checkpointed under ``.cells/`` so
``--resume`` recomputes only what is missing and still assembles the
same final CSVs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import yaml

from .baselines import (
    GREEDY_MC_RUNS,
    ddh_seed,
    degree_seed,
    greedy_seed,
    plain_ga_seed,
    pool_ga_seed,
    random_seed,
)
from .diffusion import (
    Evaluator,
    FINAL_REPORT_MC_RUNS,
    GA_FITNESS_MC_RUNS,
    ICParams,
    LOCAL_ESTIMATE_MC_RUNS,
    DEFAULT_LOCAL_HOPS,
    SpreadEstimate,
    stable_seed,
)
from .evolve import GAConfig, GenerationTrace, run_abem
from .graph import (
    DynamicNetwork,
    GraphError,
    Snapshot,
    fixed_width_buckets,
    generate_synthetic,
    load_edge_list,
    load_temporal_edge_list,
    quarter_buckets,
    value_buckets,
)
from .nomination import (
    InfluencerPool,
    NominationParams,
    local_ic_params,
    local_influence_map,
    pool_from_influence,
    refresh_pool,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "resolve_config",
    "build_dataset",
    "generate_temporal_synthetic_text",
    "edge_list_text",
    "cmd_convergence",
    "cmd_static",
    "cmd_sweep",
    "cmd_dynamic",
    "cmd_gen_synthetic",
    "RESULT_COLUMNS",
    "TRACE_COLUMNS",
    "EVOLUTIONARY",
    "ALL_ALGORITHMS",
]

RESULT_COLUMNS = (
    "algorithm",
    "k",
    "snapshot",
    "coverage",
    "std_error",
    "seconds",
    "generations",
    "pool_size",
    "config_hash",
    "rng_seed",
)
SWEEP_EXTRA_COLUMNS = ("theta_s", "theta_q", "generations_budget")
TRACE_COLUMNS = ("generation", "best_fitness", "avg_fitness", "pool_size")

EVOLUTIONARY = ("abem", "ga", "ga_pool")
ALL_ALGORITHMS = ("abem", "ga", "ga_pool", "greedy", "degree", "ddh", "random")


class ConfigError(Exception):
    """Configuration is malformed, inconsistent, or references missing files."""


# -- config loading and resolution -------------------------------------------


def _section(raw: dict, name: str, allowed: Iterable[str]) -> dict:
    sec = raw.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    unknown = set(sec) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {sorted(unknown)}")
    return sec


def _req(sec: dict, name: str, key: str):
    if key not in sec or sec[key] is None:
        raise ConfigError(f"'{name}.{key}' is required")
    return sec[key]


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: dict
    algorithms: tuple[str, ...] | None
    k_values: tuple[int, ...]
    p_a: float
    ic_mc_runs: int
    ic_max_hops: int | None
    final_mc_runs: int
    nom_degree_threshold: int
    nom_quantile_threshold: float
    nom_mc_runs: int
    nom_max_hops: int
    nom_p_a: float
    population_size: int
    generations: int
    crossover_rate: float
    mutation_rate: float
    convergence_window: int | None
    workers: int
    greedy_mc_runs: int
    baseline_recalibration_every: int
    sweep_degree_thresholds: tuple[int, ...]
    sweep_quantile_thresholds: tuple[float, ...]
    sweep_generations: tuple[int, ...]
    record_wall_clock: bool
    rng_seed: int

    def canonical_dict(self) -> dict:
        return {
            "dataset": dict(sorted(self.dataset.items())),
            "algorithms": list(self.algorithms) if self.algorithms else None,
            "k": list(self.k_values),
            "ic": {
                "p_a": self.p_a,
                "mc_runs": self.ic_mc_runs,
                "max_hops": self.ic_max_hops,
                "final_mc_runs": self.final_mc_runs,
            },
            "nomination": {
                "degree_threshold": self.nom_degree_threshold,
                "quantile_threshold": self.nom_quantile_threshold,
                "mc_runs": self.nom_mc_runs,
                "max_hops": self.nom_max_hops,
                "p_a": self.nom_p_a,
            },
            "ga": {
                "population_size": self.population_size,
                "generations": self.generations,
                "crossover_rate": self.crossover_rate,
                "mutation_rate": self.mutation_rate,
                "convergence_window": self.convergence_window,
                "workers": self.workers,
            },
            "greedy": {"mc_runs": self.greedy_mc_runs},
            "baseline_recalibration_every": self.baseline_recalibration_every,
            "sweep": {
                "degree_thresholds": list(self.sweep_degree_thresholds),
                "quantile_thresholds": list(self.sweep_quantile_thresholds),
                "generations": list(self.sweep_generations),
            },
            "timing": {"record_wall_clock": self.record_wall_clock},
            "rng_seed": self.rng_seed,
        }

    def canonical_yaml(self) -> str:
        return yaml.safe_dump(self.canonical_dict(), sort_keys=True)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_yaml().encode()).hexdigest()[:12]

    def ga_config_for(self, k: int, cell_seed: int,
                      generations: int | None = None,
                      convergence_window: int | None | str = "config") -> GAConfig:
        window = (
            self.convergence_window
            if convergence_window == "config" else convergence_window
        )
        return GAConfig(
            seed_set_size=k,
            population_size=self.population_size,
            generations=generations if generations is not None else self.generations,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate,
            convergence_window=window,
            rng_seed=cell_seed,
        )

    def nomination_params(self) -> NominationParams:
        return NominationParams(
            degree_threshold=self.nom_degree_threshold,
            quantile_threshold=self.nom_quantile_threshold,
            ic_params=local_ic_params(
                self.nom_p_a, mc_runs=self.nom_mc_runs, max_hops=self.nom_max_hops
            ),
        )

    def fitness_ic(self) -> ICParams:
        return ICParams(self.p_a, self.ic_mc_runs, self.ic_max_hops)


def load_config(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    return raw


_TOP_KEYS = (
    "dataset",
    "algorithms",
    "k",
    "ic",
    "nomination",
    "ga",
    "greedy",
    "baseline_recalibration_every",
    "sweep",
    "timing",
    "rng_seed",
)

_DATASET_KEYS = (
    "kind",
    "model",
    "n",
    "p",
    "m",
    "path",
    "directed",
    "buckets",
    "join_quit",
    "snapshots",
    "churn_rate",
    "seed",
)


def resolve_config(raw: dict, seed_override: int | None = None) -> ExperimentConfig:
    """Validate a raw config mapping and fill in every default."""
    unknown = set(raw) - set(_TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")

    dataset = dict(_section(raw, "dataset", _DATASET_KEYS))
    if "kind" not in dataset:
        raise ConfigError("'dataset.kind' is required")
    kind = dataset["kind"]
    if kind not in ("synthetic", "edge_list", "temporal_edge_list", "temporal_synthetic"):
        raise ConfigError(f"unknown dataset kind {kind!r}")

    algorithms = raw.get("algorithms")
    if algorithms is not None:
        if not isinstance(algorithms, (list, tuple)) or not algorithms:
            raise ConfigError("'algorithms' must be a non-empty list")
        bad = [a for a in algorithms if a not in ALL_ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithm name(s): {bad}")
        algorithms = tuple(algorithms)

    k_raw = raw.get("k", [5])
    if isinstance(k_raw, int):
        k_raw = [k_raw]
    if not isinstance(k_raw, (list, tuple)) or not k_raw:
        raise ConfigError("'k' must be an int or a non-empty list of ints")
    k_values = []
    for k in k_raw:
        if not isinstance(k, int) or k < 1:
            raise ConfigError(f"seed set size k must be a positive int, got {k!r}")
        k_values.append(k)

    ic = _section(raw, "ic", ("p_a", "mc_runs", "max_hops", "final_mc_runs"))
    p_a = float(_req(ic, "ic", "p_a"))
    if not 0.0 <= p_a <= 1.0:
        raise ConfigError("'ic.p_a' must lie in [0, 1]")
    ic_mc_runs = int(ic.get("mc_runs", GA_FITNESS_MC_RUNS))
    ic_max_hops = ic.get("max_hops")
    if ic_max_hops is not None:
        ic_max_hops = int(ic_max_hops)
    final_mc_runs = int(ic.get("final_mc_runs", FINAL_REPORT_MC_RUNS))

    nom = _section(
        raw, "nomination",
        ("degree_threshold", "quantile_threshold", "mc_runs", "max_hops", "p_a"),
    )
    nom_p_a = nom.get("p_a")
    nom_p_a = p_a if nom_p_a is None else float(nom_p_a)

    ga = _section(
        raw, "ga",
        ("population_size", "generations", "crossover_rate", "mutation_rate",
         "convergence_window", "workers"),
    )
    window = ga.get("convergence_window", 100)
    if window is not None:
        window = int(window)

    greedy = _section(raw, "greedy", ("mc_runs",))
    sweep = _section(
        raw, "sweep", ("degree_thresholds", "quantile_thresholds", "generations")
    )
    timing = _section(raw, "timing", ("record_wall_clock",))

    seed = raw.get("rng_seed", 0)
    if seed_override is not None:
        seed = seed_override
    if not isinstance(seed, int):
        raise ConfigError("'rng_seed' must be an integer")

    cadence = raw.get("baseline_recalibration_every", 4)
    if not isinstance(cadence, int) or cadence < 0:
        raise ConfigError("'baseline_recalibration_every' must be a non-negative int")

    rc = ExperimentConfig(
        dataset=dataset,
        algorithms=algorithms,
        k_values=tuple(k_values),
        p_a=p_a,
        ic_mc_runs=ic_mc_runs,
        ic_max_hops=ic_max_hops,
        final_mc_runs=final_mc_runs,
        nom_degree_threshold=int(nom.get("degree_threshold", 2)),
        nom_quantile_threshold=float(nom.get("quantile_threshold", 0.7)),
        nom_mc_runs=int(nom.get("mc_runs", LOCAL_ESTIMATE_MC_RUNS)),
        nom_max_hops=int(nom.get("max_hops", DEFAULT_LOCAL_HOPS)),
        nom_p_a=nom_p_a,
        population_size=int(ga.get("population_size", 50)),
        generations=int(ga.get("generations", 1000)),
        crossover_rate=float(ga.get("crossover_rate", 1.0)),
        mutation_rate=float(ga.get("mutation_rate", 0.1)),
        convergence_window=window,
        workers=int(ga.get("workers", 0)),
        greedy_mc_runs=int(greedy.get("mc_runs", GREEDY_MC_RUNS)),
        baseline_recalibration_every=cadence,
        sweep_degree_thresholds=tuple(
            int(x) for x in sweep.get("degree_thresholds", [])
        ),
        sweep_quantile_thresholds=tuple(
            float(x) for x in sweep.get("quantile_thresholds", [])
        ),
        sweep_generations=tuple(int(x) for x in sweep.get("generations", [])),
        record_wall_clock=bool(timing.get("record_wall_clock", False)),
        rng_seed=seed,
    )
    try:
        # Constructor validation covers ranges shared with the library types.
        _ = rc.ga_config_for(k=max(k_values), cell_seed=0)
        _ = rc.nomination_params()
        ICParams(p_a, ic_mc_runs, ic_max_hops)
        ICParams(p_a, final_mc_runs, ic_max_hops)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return rc


# -- dataset assembly ---------------------------------------------------------


def _bucket_rule(spec: str):
    if spec == "quarter":
        return quarter_buckets()
    if spec == "value":
        return value_buckets()
    if isinstance(spec, str) and spec.startswith("fixed:"):
        parts = spec.split(":")
        if len(parts) == 2:
            return fixed_width_buckets(int(parts[1]))
        if len(parts) == 3:
            return fixed_width_buckets(int(parts[1]), origin=int(parts[2]))
    raise ConfigError(f"unknown bucket rule {spec!r}")


def edge_list_text(s: Snapshot) -> str:
    """Serialise a snapshot as a plain ``u v`` edge list."""
    lines = [f"{u} {v}" for u, v in sorted(s.edges())]
    return "\n".join(lines) + "\n"


def generate_temporal_synthetic_text(
    model: str,
    n: int,
    *,
    p: float | None = None,
    m: int | None = None,
    snapshots: int,
    churn_rate: float,
    rng_seed: int = 0,
) -> str:
    """Generate ``u v t`` lines for a churned synthetic snapshot sequence.

    Snapshot 0 is a fresh synthetic graph; each later snapshot removes a
    ``churn_rate`` fraction of the current edges (rounded) and adds the
    same number of fresh random non-edges, so per-snapshot edge turnover
    equals the churn rate up to rounding. Timestamps are the snapshot
    indices themselves (load with the ``value`` bucket rule).
    """
    if snapshots < 1:
        raise ValueError("snapshots must be at least 1")
    if not 0.0 <= churn_rate <= 1.0:
        raise ValueError("churn_rate must lie in [0, 1]")
    base = generate_synthetic(model, n, p=p, m=m, rng_seed=rng_seed)
    rng = random.Random(stable_seed(rng_seed, "churn"))
    edges = set(base.edges())
    if not edges:
        raise ValueError("base synthetic graph has no edges")
    lines: list[str] = []
    max_edges = n * (n - 1) // 2
    for t in range(snapshots):
        for u, v in sorted(edges):
            lines.append(f"{u} {v} {t}")
        if t == snapshots - 1:
            break
        turn = round(churn_rate * len(edges))
        removed = rng.sample(sorted(edges), turn)
        edges.difference_update(removed)
        added = 0
        while added < turn and len(edges) < max_edges:
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u == v:
                continue
            e = (u, v) if u < v else (v, u)
            if e in edges:
                continue
            edges.add(e)
            added += 1
    return "\n".join(lines) + "\n"


def build_dataset(rc: ExperimentConfig) -> Snapshot | DynamicNetwork:
    """Construct the configured dataset, validating file references."""
    d = rc.dataset
    kind = d["kind"]
    seed = d.get("seed")
    if seed is None:
        seed = stable_seed(rc.rng_seed, "dataset")
    try:
        if kind == "synthetic":
            return generate_synthetic(
                _req(d, "dataset", "model"),
                int(_req(d, "dataset", "n")),
                p=d.get("p"),
                m=d.get("m"),
                rng_seed=seed,
            )
        if kind == "edge_list":
            path = Path(_req(d, "dataset", "path"))
            if not path.is_file():
                raise ConfigError(f"dataset file not found: {path}")
            return load_edge_list(path, directed=bool(d.get("directed", False)))
        if kind == "temporal_edge_list":
            path = Path(_req(d, "dataset", "path"))
            if not path.is_file():
                raise ConfigError(f"dataset file not found: {path}")
            return load_temporal_edge_list(
                path,
                _bucket_rule(d.get("buckets", "quarter")),
                directed=bool(d.get("directed", False)),
                join_quit=bool(d.get("join_quit", True)),
            )
        if kind == "temporal_synthetic":
            text = generate_temporal_synthetic_text(
                d.get("model", "erdos_renyi"),
                int(_req(d, "dataset", "n")),
                p=d.get("p"),
                m=d.get("m"),
                snapshots=int(_req(d, "dataset", "snapshots")),
                churn_rate=float(_req(d, "dataset", "churn_rate")),
                rng_seed=seed,
            )
            return load_temporal_edge_list(text.encode(), value_buckets())
    except (ValueError, GraphError) as exc:
        raise ConfigError(f"dataset construction failed: {exc}") from exc
    raise ConfigError(f"unknown dataset kind {kind!r}")


def _require_static(net, command: str) -> Snapshot:
    if isinstance(net, DynamicNetwork):
        raise ConfigError(f"'{command}' requires a static dataset")
    return net


def _require_dynamic(net, command: str) -> DynamicNetwork:
    if not isinstance(net, DynamicNetwork):
        raise ConfigError(f"'{command}' requires a temporal dataset")
    return net


def _check_k_fits(net, k_values: Sequence[int]) -> None:
    snaps = list(net) if isinstance(net, DynamicNetwork) else [net]
    smallest = min(len(s.nodes) for s in snaps)
    for k in k_values:
        if k > smallest:
            raise ConfigError(
                f"k={k} exceeds the smallest snapshot's node count ({smallest})"
            )


# -- output helpers -----------------------------------------------------------


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _result_row(rc: ExperimentConfig, algorithm: str, k: int, snapshot: int,
                cov_mean: float, cov_se: float, seconds: float,
                generations: int, pool_size: int) -> dict:
    return {
        "algorithm": algorithm,
        "k": k,
        "snapshot": snapshot,
        "coverage": f"{cov_mean:.6f}",
        "std_error": f"{cov_se:.6f}",
        "seconds": f"{seconds if rc.record_wall_clock else 0.0:.3f}",
        "generations": generations,
        "pool_size": pool_size,
        "config_hash": rc.config_hash,
        "rng_seed": rc.rng_seed,
    }


def _emit_outputs(out: Path, rc: ExperimentConfig, rows: list[dict],
                  traces: dict[str, list[tuple]], extra_cols: Sequence[str] = ()) -> None:
    (out / "config_used.yaml").write_text(rc.canonical_yaml())
    header = list(extra_cols) + list(RESULT_COLUMNS)
    _write_csv(out / "results.csv", header, ([r[c] for c in header] for r in rows))
    for name, recs in sorted(traces.items()):
        _write_csv(
            out / name,
            TRACE_COLUMNS,
            (
                [g, f"{best:.6f}", f"{avg:.6f}", pool]
                for g, best, avg, pool in recs
            ),
        )


def _final_coverage(rc: ExperimentConfig, snap: Snapshot, si: int,
                    genes: Sequence[int]):
    """High-precision re-evaluation with a noise schedule shared across
    algorithms, so reported coverages are directly comparable."""
    live = [g for g in genes if g in snap.nodes]
    if not live:
        return SpreadEstimate(0.0, 0.0, 0)
    ev = Evaluator(
        snap,
        ICParams(rc.p_a, rc.final_mc_runs, rc.ic_max_hops),
        stable_seed(rc.rng_seed, "final-eval"),
        crn=True,
    )
    return ev.fitness(live, crn_token=("final", si))


def _cell_seed(rc: ExperimentConfig, command: str, *coords) -> int:
    return stable_seed(rc.rng_seed, command, *coords)


class _CellStore:
    """JSON checkpoint per unit of work, enabling --resume."""

    def __init__(self, out: Path, rc: ExperimentConfig, command: str, resume: bool):
        self.dir = out / ".cells"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.prefix = f"{rc.config_hash}_{rc.rng_seed}_{command}"
        self.resume = resume

    def _path(self, coords) -> Path:
        tag = hashlib.sha256(f"{self.prefix}|{coords!r}".encode()).hexdigest()[:20]
        return self.dir / f"{tag}.json"

    def run(self, coords, compute):
        path = self._path(coords)
        if self.resume and path.is_file():
            return json.loads(path.read_text())
        result = compute()
        path.write_text(json.dumps(result))
        return result


# -- algorithm execution ------------------------------------------------------


def _trace_rows(records: list[GenerationTrace]) -> list[tuple]:
    return [
        (r.generation, r.best_fitness, r.avg_fitness, r.pool_size) for r in records
    ]


def _run_static_algorithm(
    rc: ExperimentConfig,
    command: str,
    snap: Snapshot,
    algorithm: str,
    k: int,
    *,
    harness_pool: InfluencerPool | None = None,
    generations: int | None = None,
    convergence_window="config",
    fixed_pool: InfluencerPool | None = None,
    si: int = 0,
) -> dict:
    """Run one algorithm on one snapshot; returns a JSON-friendly dict."""
    cell_seed = _cell_seed(rc, command, algorithm, k, si)
    records: list[GenerationTrace] = []
    t0 = time.perf_counter()
    generations_used = 0
    pool_size = 0

    if algorithm == "abem":
        cfg = rc.ga_config_for(k, cell_seed, generations, convergence_window)
        result = run_abem(
            snap, rc.nomination_params(), cfg, rc.fitness_ic(),
            trace_sink=records.append, workers=rc.workers, fixed_pool=fixed_pool,
        )
        outcome = result.outcomes[0]
        genes = outcome.best.genes
        generations_used = outcome.generations
        pool_size = outcome.pool_size
    elif algorithm == "ga":
        cfg = rc.ga_config_for(k, cell_seed, generations, convergence_window)
        best = plain_ga_seed(
            snap, cfg, rc.fitness_ic(), random.Random(cell_seed),
            trace_sink=records.append, workers=rc.workers,
        )
        genes = best.genes
        generations_used = records[-1].generation if records else 0
        pool_size = len(snap.nodes)
    elif algorithm == "ga_pool":
        cfg = rc.ga_config_for(k, cell_seed, generations, convergence_window)
        assert harness_pool is not None
        best = pool_ga_seed(
            snap, harness_pool, cfg, rc.fitness_ic(), random.Random(cell_seed),
            trace_sink=records.append, workers=rc.workers,
        )
        genes = best.genes
        generations_used = records[-1].generation if records else 0
        pool_size = len(harness_pool)
    elif algorithm == "greedy":
        best = greedy_seed(
            snap, k, ICParams(rc.p_a, rc.greedy_mc_runs, rc.ic_max_hops),
            random.Random(cell_seed),
        )
        genes = best.genes
    elif algorithm == "degree":
        genes = degree_seed(snap, k).genes
    elif algorithm == "ddh":
        genes = ddh_seed(snap, k, rc.p_a).genes
    elif algorithm == "random":
        genes = random_seed(snap, k, random.Random(cell_seed)).genes
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")

    seconds = time.perf_counter() - t0
    cov = _final_coverage(rc, snap, si, genes)
    return {
        "genes": list(genes),
        "coverage": [cov.mean, cov.std_error],
        "seconds": seconds,
        "generations": generations_used,
        "pool_size": pool_size,
        "trace": _trace_rows(records),
    }


def _harness_pool_chain(rc: ExperimentConfig, snaps: Sequence[Snapshot]) -> list[InfluencerPool]:
    """Influencer pools per snapshot, refreshed in sequence as the
    adaptive engine would, for the pool-initialised GA baseline."""
    pools = []
    pool = InfluencerPool()
    for si, snap in enumerate(snaps):
        pool = refresh_pool(
            snap, pool, rc.nomination_params(),
            random.Random(stable_seed(rc.rng_seed, "pool", si)),
        )
        pools.append(pool)
    return pools


# -- commands -----------------------------------------------------------------


def cmd_convergence(rc: ExperimentConfig, out: Path, resume: bool = False) -> Path:
    """Fixed-budget convergence traces for the evolutionary algorithms."""
    algorithms = rc.algorithms or EVOLUTIONARY
    bad = [a for a in algorithms if a not in EVOLUTIONARY]
    if bad:
        raise ConfigError(f"'convergence' supports {EVOLUTIONARY}, got {bad}")
    if len(rc.k_values) != 1:
        raise ConfigError("'convergence' expects exactly one k value")
    net = _require_static(build_dataset(rc), "convergence")
    _check_k_fits(net, rc.k_values)
    k = rc.k_values[0]
    out.mkdir(parents=True, exist_ok=True)
    store = _CellStore(out, rc, "convergence", resume)
    pools = _harness_pool_chain(rc, [net]) if "ga_pool" in algorithms else [None]

    rows, traces = [], {}
    for alg in algorithms:
        cell = store.run(
            (alg, k),
            lambda alg=alg: _run_static_algorithm(
                rc, "convergence", net, alg, k,
                harness_pool=pools[0], convergence_window=None,
            ),
        )
        cov_mean, cov_se = cell["coverage"]
        rows.append(_result_row(
            rc, alg, k, net.time_index, cov_mean, cov_se,
            cell["seconds"], cell["generations"], cell["pool_size"],
        ))
        traces[f"trace_{alg}.csv"] = [tuple(t) for t in cell["trace"]]
    _emit_outputs(out, rc, rows, traces)
    return out / "results.csv"


def cmd_static(rc: ExperimentConfig, out: Path, resume: bool = False) -> Path:
    """All configured algorithms at every k on one static snapshot."""
    algorithms = rc.algorithms or ALL_ALGORITHMS
    net = _require_static(build_dataset(rc), "static")
    _check_k_fits(net, rc.k_values)
    out.mkdir(parents=True, exist_ok=True)
    store = _CellStore(out, rc, "static", resume)
    pools = _harness_pool_chain(rc, [net]) if "ga_pool" in algorithms else [None]

    rows, traces = [], {}
    for alg in algorithms:
        for k in rc.k_values:
            cell = store.run(
                (alg, k),
                lambda alg=alg, k=k: _run_static_algorithm(
                    rc, "static", net, alg, k, harness_pool=pools[0],
                ),
            )
            cov_mean, cov_se = cell["coverage"]
            rows.append(_result_row(
                rc, alg, k, net.time_index, cov_mean, cov_se,
                cell["seconds"], cell["generations"], cell["pool_size"],
            ))
            if alg in EVOLUTIONARY and cell["trace"]:
                traces[f"trace_{alg}_k{k}.csv"] = [tuple(t) for t in cell["trace"]]
    _emit_outputs(out, rc, rows, traces)
    return out / "results.csv"


def cmd_sweep(rc: ExperimentConfig, out: Path, resume: bool = False) -> Path:
    """Nomination-threshold and budget grid for the adaptive algorithm.

    All grid points share one local-influence table per snapshot, so the
    pool_size column varies only through the thresholds themselves.
    """
    if not (rc.sweep_degree_thresholds and rc.sweep_quantile_thresholds
            and rc.sweep_generations):
        raise ConfigError(
            "'sweep' requires non-empty sweep.degree_thresholds, "
            "sweep.quantile_thresholds and sweep.generations"
        )
    algorithms = rc.algorithms or ("abem",)
    if tuple(algorithms) != ("abem",):
        raise ConfigError("'sweep' supports only the adaptive algorithm")
    net = _require_static(build_dataset(rc), "sweep")
    _check_k_fits(net, rc.k_values)
    out.mkdir(parents=True, exist_ok=True)
    store = _CellStore(out, rc, "sweep", resume)

    sigma = local_influence_map(
        net,
        rc.nomination_params(),
        random.Random(stable_seed(rc.rng_seed, "sweep-sigma")),
    )

    rows = []
    for theta_s in rc.sweep_degree_thresholds:
        for theta_q in rc.sweep_quantile_thresholds:
            params = NominationParams(
                degree_threshold=theta_s,
                quantile_threshold=theta_q,
                ic_params=local_ic_params(
                    rc.nom_p_a, mc_runs=rc.nom_mc_runs, max_hops=rc.nom_max_hops
                ),
            )
            pool = pool_from_influence(net, params, sigma)
            for g in rc.sweep_generations:
                for k in rc.k_values:
                    cell = store.run(
                        ("abem", k, theta_s, theta_q, g),
                        lambda k=k, g=g, pool=pool: _run_static_algorithm(
                            rc, "sweep", net, "abem", k,
                            generations=g, fixed_pool=pool,
                        ),
                    )
                    cov_mean, cov_se = cell["coverage"]
                    row = _result_row(
                        rc, "abem", k, net.time_index, cov_mean, cov_se,
                        cell["seconds"], cell["generations"], cell["pool_size"],
                    )
                    row["theta_s"] = theta_s
                    row["theta_q"] = theta_q
                    row["generations_budget"] = g
                    rows.append(row)
    _emit_outputs(out, rc, rows, {}, extra_cols=SWEEP_EXTRA_COLUMNS)
    return out / "results.csv"


def cmd_dynamic(rc: ExperimentConfig, out: Path, resume: bool = False) -> Path:
    """Snapshot-sequence comparison: continuous adaptation vs. periodic
    or per-snapshot recomputation."""
    algorithms = rc.algorithms or ALL_ALGORITHMS
    net = _require_dynamic(build_dataset(rc), "dynamic")
    _check_k_fits(net, rc.k_values)
    snaps = list(net)
    out.mkdir(parents=True, exist_ok=True)
    store = _CellStore(out, rc, "dynamic", resume)
    pools = (
        _harness_pool_chain(rc, snaps)
        if "ga_pool" in algorithms else [None] * len(snaps)
    )
    cadence = rc.baseline_recalibration_every

    rows, traces = [], {}
    for alg in algorithms:
        for k in rc.k_values:
            cell = store.run(
                (alg, k),
                lambda alg=alg, k=k: _run_dynamic_algorithm(
                    rc, net, snaps, alg, k, pools, cadence
                ),
            )
            for rec in cell["per_snapshot"]:
                rows.append(_result_row(
                    rc, alg, k, rec["snapshot"],
                    rec["coverage"][0], rec["coverage"][1],
                    rec["seconds"], rec["generations"], rec["pool_size"],
                ))
                if alg in EVOLUTIONARY and rec["trace"]:
                    name = f"trace_{alg}_k{k}_s{rec['snapshot']}.csv"
                    traces[name] = [tuple(t) for t in rec["trace"]]
    _emit_outputs(out, rc, rows, traces)
    return out / "results.csv"


def _run_dynamic_algorithm(rc: ExperimentConfig, net: DynamicNetwork,
                           snaps: Sequence[Snapshot], algorithm: str, k: int,
                           pools: Sequence, cadence: int) -> dict:
    cell_seed = _cell_seed(rc, "dynamic", algorithm, k)
    per_snapshot: list[dict] = []

    if algorithm == "abem":
        records: list[GenerationTrace] = []
        cfg = rc.ga_config_for(k, cell_seed)
        result = run_abem(
            net, rc.nomination_params(), cfg, rc.fitness_ic(),
            trace_sink=records.append, workers=rc.workers,
        )
        for si, outcome in enumerate(result.outcomes):
            cov = _final_coverage(rc, snaps[si], si, outcome.best.genes)
            per_snapshot.append({
                "snapshot": outcome.time_index,
                "genes": list(outcome.best.genes),
                "coverage": [cov.mean, cov.std_error],
                "seconds": outcome.elapsed_seconds,
                "generations": outcome.generations,
                "pool_size": outcome.pool_size,
                "trace": _trace_rows(
                    [r for r in records if r.snapshot_index == si]
                ),
            })
        return {"per_snapshot": per_snapshot}

    if algorithm in ("greedy", "degree", "ddh"):
        held: tuple[int, ...] = ()
        for si, snap in enumerate(snaps):
            recompute = si == 0 if cadence == 0 else si % cadence == 0
            seconds = 0.0
            if recompute:
                t0 = time.perf_counter()
                if algorithm == "greedy":
                    held = greedy_seed(
                        snap, k,
                        ICParams(rc.p_a, rc.greedy_mc_runs, rc.ic_max_hops),
                        random.Random(stable_seed(cell_seed, si)),
                    ).genes
                elif algorithm == "degree":
                    held = degree_seed(snap, k).genes
                else:
                    held = ddh_seed(snap, k, rc.p_a).genes
                seconds = time.perf_counter() - t0
            cov = _final_coverage(rc, snap, si, held)
            per_snapshot.append({
                "snapshot": snap.time_index,
                "genes": list(held),
                "coverage": [cov.mean, cov.std_error],
                "seconds": seconds,
                "generations": 0,
                "pool_size": 0,
                "trace": [],
            })
        return {"per_snapshot": per_snapshot}

    # ga, ga_pool and random start fresh on every snapshot.
    for si, snap in enumerate(snaps):
        sub = _run_static_algorithm(
            rc, "dynamic", snap, algorithm, k,
            harness_pool=pools[si], si=si,
        )
        sub["snapshot"] = snap.time_index
        per_snapshot.append(sub)
    return {"per_snapshot": per_snapshot}


def cmd_gen_synthetic(rc: ExperimentConfig, out: Path, resume: bool = False) -> Path:
    """Write a synthetic dataset (static or temporal) as an edge list."""
    d = rc.dataset
    kind = d["kind"]
    out.mkdir(parents=True, exist_ok=True)
    (out / "config_used.yaml").write_text(rc.canonical_yaml())
    seed = d.get("seed")
    if seed is None:
        seed = stable_seed(rc.rng_seed, "dataset")
    if kind == "synthetic":
        snap = generate_synthetic(
            d.get("model", "erdos_renyi"), int(_req(d, "dataset", "n")),
            p=d.get("p"), m=d.get("m"), rng_seed=seed,
        )
        path = out / "edges.txt"
        path.write_text(edge_list_text(snap))
        return path
    if kind == "temporal_synthetic":
        text = generate_temporal_synthetic_text(
            d.get("model", "erdos_renyi"), int(_req(d, "dataset", "n")),
            p=d.get("p"), m=d.get("m"),
            snapshots=int(_req(d, "dataset", "snapshots")),
            churn_rate=float(_req(d, "dataset", "churn_rate")),
            rng_seed=seed,
        )
        path = out / "temporal_edges.txt"
        path.write_text(text)
        return path
    raise ConfigError("'gen-synthetic' requires a synthetic dataset kind")
