"""Sweep drivers for the tomography comparisons, with deterministic seeding.

Every trial draws from its own generator, derived by hashing
``(master_seed, tag, trial)``; see :func:`derived_seed`. Results therefore do
not depend on how trials are spread over worker processes.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ValidationError
from .measure import COUNT_MODELS, basis_set_from_descriptor, simulate_counts
from .metrics import METRIC_NAMES, concurrence_unclamped, hs_distance
from .mle import AnnealConfig, anneal
from .states import StateSpec

log = logging.getLogger(__name__)

EXPERIMENTS = ("error_sweep", "concurrence_sweep", "basis_count_sweep")
DEFAULT_TRIALS = {"error_sweep": 1000, "concurrence_sweep": 300, "basis_count_sweep": 60}
DEFAULT_N_GRID = tuple(int(round(x)) for x in np.logspace(2, 6, 8))
BASIS_COUNT_N = 250_000
CSV_FIELDS = ("experiment", "scheme", "N", "m", "trial", "seed_used", "metric_name", "metric_value", "truth_value")
AGGREGATE_TRIAL = -1


def derived_seed(master_seed: int, experiment_tag: str, trial: int) -> int:
    """64-bit seed: first 8 bytes (big-endian) of SHA-256 over ``"{master}|{tag}|{trial}"``."""
    digest = hashlib.sha256(f"{int(master_seed)}|{experiment_tag}|{int(trial)}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def derive_seed(master_seed: int, experiment_tag: str, trial: int) -> np.random.Generator:
    """Independent PCG64 stream for one trial of one experiment."""
    return np.random.Generator(np.random.PCG64(derived_seed(master_seed, experiment_tag, trial)))


@dataclass(frozen=True)
class SweepRow:
    experiment: str
    scheme: str
    N: int
    m: int
    trial: int
    seed_used: int
    metric_name: str
    metric_value: float
    truth_value: float | None = None


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    state: StateSpec
    schemes: tuple[str, ...] = ("standard", "overcomplete")
    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    m_grid: tuple[int, ...] = ()
    trials: int | None = None
    master_seed: int = 42
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    output_path: str = "sweep.csv"
    count_model: str = "poisson"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.trials is None:
            object.__setattr__(self, "trials", DEFAULT_TRIALS[self.experiment])
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        if not self.n_grid:
            raise ConfigError("n_grid must not be empty")
        if any(n <= 0 for n in self.n_grid) or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError(f"n_grid must be positive and strictly increasing, got {list(self.n_grid)}")
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be an integer >= 1, got {self.trials}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        if any(not 4 <= m <= 36 for m in self.m_grid):
            raise ConfigError(f"m_grid entries must lie in [4, 36], got {list(self.m_grid)}")
        if self.count_model not in COUNT_MODELS:
            raise ConfigError(f"count_model must be one of {COUNT_MODELS}, got {self.count_model!r}")
        if self.experiment == "basis_count_sweep":
            if not self.m_grid:
                raise ConfigError("basis_count_sweep needs a non-empty m_grid")
            if self.state.n_qubits != 2:
                raise ConfigError("basis_count_sweep uses two-qubit basis prefixes")
        elif not self.schemes:
            raise ConfigError("schemes must not be empty")
        if self.experiment == "concurrence_sweep" and self.state.kind not in ("bell_diagonal", "werner"):
            raise ConfigError("concurrence_sweep needs a bell_diagonal or werner state")
        for desc in self.scheme_descriptors():
            try:
                basis_set_from_descriptor(desc, self.state.n_qubits)
            except ValidationError as exc:
                raise ConfigError(str(exc)) from None

    def scheme_descriptors(self) -> tuple[str, ...]:
        if self.experiment == "basis_count_sweep":
            return tuple(f"table1:{m}" for m in self.m_grid)
        return self.schemes

    def replace(self, **changes) -> "SweepConfig":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return SweepConfig(**d)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "state": self.state.to_dict(),
            "schemes": list(self.schemes),
            "n_grid": list(self.n_grid),
            "m_grid": list(self.m_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "anneal": self.anneal.to_dict(),
            "output_path": self.output_path,
            "count_model": self.count_model,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            d["state"] = StateSpec(**d["state"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad state specification: {exc}") from None
        d["anneal"] = AnnealConfig.from_dict(d.get("anneal"))
        if d.get("experiment") == "basis_count_sweep" and "n_grid" not in d:
            d["n_grid"] = (BASIS_COUNT_N,)
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_config(path) -> SweepConfig:
    """Read a JSON (or, by suffix, YAML) config file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(text)
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return SweepConfig.from_dict(data)


def _scheme_name(desc: str) -> str:
    return "table1_prefix" if desc.startswith("table1") else desc


def _run_trial(config: SweepConfig, trial: int) -> list[SweepRow]:
    exp = config.experiment
    n_qubits = config.state.n_qubits
    if config.state.is_fixed:
        truth = config.state.build()
    else:
        # one state per trial, shared by every (N, scheme) cell
        truth = config.state.build(derive_seed(config.master_seed, f"{exp}/state", trial))
    truth_c = concurrence_unclamped(truth) if exp == "concurrence_sweep" else None

    rows = []
    for n_total in config.n_grid:
        for desc in config.scheme_descriptors():
            basis = basis_set_from_descriptor(desc, n_qubits)
            tag = f"{exp}/{desc}/N={n_total}"
            seed = derived_seed(config.master_seed, tag, trial)
            rng = np.random.Generator(np.random.PCG64(seed))
            record = simulate_counts(truth, basis, n_total, rng, config.count_model)
            estimate = anneal(record, config.anneal, rng).estimate
            common = dict(experiment=exp, scheme=_scheme_name(desc), N=n_total, m=basis.m, trial=trial, seed_used=seed)
            if exp == "concurrence_sweep":
                rows.append(SweepRow(**common, metric_name="concurrence_unclamped",
                                     metric_value=concurrence_unclamped(estimate), truth_value=truth_c))
            rows.append(SweepRow(**common, metric_name="hs_distance", metric_value=hs_distance(truth, estimate),
                                 truth_value=0.0))
    return rows


def _trial_task(args):
    config, trial = args
    return _run_trial(config, trial)


def aggregate(rows: list[SweepRow], master_seed: int = 0) -> list[SweepRow]:
    """Per-(scheme, N, m, metric) statistics as rows with ``trial = -1``.

    The metric name carries the statistic after a colon: ``mean`` and
    ``stderr`` always; ``bias`` and ``rmse`` when a truth value is present.
    """
    groups: dict[tuple, list[SweepRow]] = {}
    for r in rows:
        if r.trial == AGGREGATE_TRIAL:
            continue
        groups.setdefault((r.experiment, r.scheme, r.N, r.m, r.metric_name), []).append(r)
    out = []
    for (exp, scheme, n_total, m, name), grp in groups.items():
        vals = np.array([r.metric_value for r in grp])
        truth = grp[0].truth_value
        stderr = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        stats = {"mean": float(vals.mean()), "stderr": stderr}
        if truth is not None and name != "hs_distance":
            stats["bias"] = float(vals.mean() - truth)
            stats["rmse"] = float(np.sqrt(np.mean((vals - truth) ** 2)))
        for stat, value in stats.items():
            out.append(SweepRow(exp, scheme, n_total, m, AGGREGATE_TRIAL, int(master_seed), f"{name}:{stat}",
                                value, truth))
    return out


def run_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRow]:
    """Run all trials (optionally in a process pool) and append aggregate rows.

    Trial rows are ordered by trial index, then N, then scheme.
    """
    tasks = [(config, trial) for trial in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(_trial_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        per_trial = [_trial_task(t) for t in tasks]
    rows = [r for trial_rows in per_trial for r in trial_rows]
    log.info("%s: %d trials, %d rows", config.experiment, config.trials, len(rows))
    return rows + aggregate(rows, config.master_seed)


def _expect(config: SweepConfig, experiment: str):
    if config.experiment != experiment:
        raise ConfigError(f"expected a {experiment} config, got {config.experiment}")


def run_error_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRow]:
    _expect(config, "error_sweep")
    return run_sweep(config, workers)


def run_concurrence_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRow]:
    _expect(config, "concurrence_sweep")
    return run_sweep(config, workers)


def run_basis_count_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRow]:
    _expect(config, "basis_count_sweep")
    return run_sweep(config, workers)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(rows: list[SweepRow], path, config: SweepConfig | None = None) -> None:
    """Write rows as CSV plus a ``<path>.meta.json`` sidecar describing the run."""
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            for r in rows:
                writer.writerow([_fmt(getattr(r, f)) for f in CSV_FIELDS])
        meta = {
            "library_version": __version__,
            "written_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "metric_names": list(METRIC_NAMES),
            "aggregate_rows": "trial = -1, metric_name = '<metric>:<mean|stderr|bias|rmse>'",
        }
        if config is not None:
            meta["config"] = config.to_dict()
            meta["master_seed"] = config.master_seed
            meta["seed_derivation"] = "sha256('{master_seed}|{tag}|{trial}')[:8] big-endian -> PCG64"
            if config.state.kind == "random":
                meta["random_state_measure"] = "haar_pure" if config.state.pure_only else "hilbert_schmidt"
            if config.experiment == "basis_count_sweep":
                meta["ground_truth"] = "exact simulated state (replaces the high-count reference estimate)"
        with open(f"{path}.meta.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            SweepRow(
                experiment=rec["experiment"],
                scheme=rec["scheme"],
                N=int(rec["N"]),
                m=int(rec["m"]),
                trial=int(rec["trial"]),
                seed_used=int(rec["seed_used"]),
                metric_name=rec["metric_name"],
                metric_value=float(rec["metric_value"]),
                truth_value=float(rec["truth_value"]) if rec["truth_value"] else None,
            )
            for rec in reader
        ]


def summary_table(rows: list[SweepRow], metric: str = "hs_distance") -> dict[tuple[str, int, int], dict[str, float]]:
    """Aggregate statistics keyed by (scheme, N, m) for one metric."""
    out: dict[tuple[str, int, int], dict[str, float]] = {}
    prefix = metric + ":"
    for r in rows:
        if r.trial == AGGREGATE_TRIAL and r.metric_name.startswith(prefix):
            out.setdefault((r.scheme, r.N, r.m), {})[r.metric_name[len(prefix):]] = r.metric_value
    return out


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
