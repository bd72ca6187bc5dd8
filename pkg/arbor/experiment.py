"""
Simulation runs: grow trees, hide their labels, run the estimators and
record the realized risks.

A work unit is one (model, n, replicate) tree shared by every estimator and
alpha of the run. Tree and estimator streams are seeded from the master
seed, so serial and parallel runs write identical CSV files.
"""

import json
import logging
import multiprocessing
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from . import estimators, risk, treegen
from .config import ExperimentConfig
from .exceptions import ArborError, ConfigError, ExperimentError
from .models import (
    RATE_FIT_COLUMNS,
    RISK_SUMMARY_COLUMNS,
    RateFit,
    RiskSample,
    RiskSummary,
)
from .rng import derive_seed, make_rng

logger = logging.getLogger(__name__)

ORACLE_ASSISTED_LABEL = "oracle-assisted"
LABEL_ONLY_LABEL = "label-only"

COMPARE_COLUMNS = RISK_SUMMARY_COLUMNS + ["rank", "recursive_violation_rate", "information"]

Unit = Tuple[int, str, int, int, Tuple[float, ...], Tuple[str, ...]]


def tree_seed(master_seed: int, model: str, n: int, replicate: int) -> int:
    """Seed of the tree grown for one replicate."""
    return derive_seed(master_seed, model, n, replicate)


def estimator_seed(master_seed: int, model: str, n: int, replicate: int, estimator: str) -> int:
    """Seed of one estimator's tie-breaking stream on one replicate."""
    return derive_seed(master_seed, model, n, replicate, estimator)


def _run_unit(unit: Unit) -> Tuple[List[Dict[str, Any]], Dict[str, bool]]:
    """Worker for one (model, n, replicate); module level so it pickles."""
    seed, model, n, replicate, alphas, names = unit
    rng = make_rng(tree_seed(seed, model, n, replicate))
    labeled, truth = treegen.shuffle_labels(treegen.generate(model, n, rng), rng)

    rows: List[Dict[str, Any]] = []
    recursive: Dict[str, bool] = {}
    for name in names:
        cell = {"model": model, "n": n, "replicate": replicate, "estimator": name}
        est_seed = estimator_seed(seed, model, n, replicate, name)
        est_rng = make_rng(est_seed)
        try:
            # only the descendant ordering ever sees the true root
            if name in estimators.ORACLE_ASSISTED:
                ordering = estimators.ORACLE_ASSISTED[name](labeled, truth.root, est_rng)
            else:
                ordering = estimators.LABEL_ONLY[name](labeled, est_rng)
        except ArborError as e:
            raise ExperimentError(
                f"{name} failed on {model} n={n} replicate={replicate}: {e}", cell=cell
            ) from e
        recursive[name] = estimators.is_recursive_ordering(labeled, ordering)
        for alpha in alphas:
            value = risk.risk_alpha(ordering, truth, alpha)
            sample = RiskSample(model, n, alpha, name, replicate, est_seed, value)
            rows.append(sample.to_dict())
    logger.debug("Finished %s n=%d replicate=%d", model, n, replicate)
    return rows, recursive


class RunManifest:
    """Everything needed to reproduce a run bit for bit."""

    def __init__(self, config: ExperimentConfig, version: str, started: str):
        self.config = config
        self.version = version
        self.started = started
        self.finished: Optional[str] = None
        self.seeds: List[Dict[str, Any]] = []

    def record_seeds(self) -> None:
        """
        Record every derived seed and check that none repeat.

        Raises:
            ExperimentError: On a seed collision
        """
        cfg = self.config
        seen: Dict[int, str] = {}
        self.seeds = []
        for n in cfg.sizes:
            for rep in range(cfg.replicates):
                entry = {
                    "model": cfg.model,
                    "n": n,
                    "replicate": rep,
                    "tree_seed": tree_seed(cfg.seed, cfg.model, n, rep),
                    "estimator_seeds": {
                        name: estimator_seed(cfg.seed, cfg.model, n, rep, name) for name in cfg.estimators
                    },
                }
                tags = [("tree", entry["tree_seed"])] + list(entry["estimator_seeds"].items())
                for tag, value in tags:
                    where = f"n={n} replicate={rep} {tag}"
                    if value in seen:
                        raise ExperimentError(
                            f"Seed collision between {seen[value]} and {where}",
                            cell={"model": cfg.model, "n": n, "replicate": rep},
                        )
                    seen[value] = where
                self.seeds.append(entry)

    def to_dict(self) -> Dict[str, Any]:
        information = {
            name: ORACLE_ASSISTED_LABEL if name in estimators.ORACLE_ASSISTED else LABEL_ONLY_LABEL
            for name in self.config.estimators
        }
        return {
            "version": self.version,
            "config": self.config.to_dict(),
            "information": information,
            "started": self.started,
            "finished": self.finished,
            "seed_derivation": "blake2b-64(master_seed|model|n|replicate[|estimator])",
            "seeds": self.seeds,
        }


class SimulationResult:
    """Samples, per-cell summaries and the manifest of one run."""

    def __init__(
        self,
        config: ExperimentConfig,
        samples: List[RiskSample],
        manifest: RunManifest,
        recursive_violations: Dict[str, int],
    ):
        self.config = config
        self.samples = samples
        self.summaries: List[RiskSummary] = risk.summarize(samples)
        self.manifest = manifest
        self.recursive_violations = recursive_violations

    @property
    def trees(self) -> int:
        return len(self.config.sizes) * self.config.replicates

    def violation_rate(self, estimator: str) -> float:
        """Share of trees on which the estimator's ordering was not recursive."""
        return self.recursive_violations.get(estimator, 0) / self.trees

    def samples_frame(self) -> pd.DataFrame:
        return risk.samples_frame(self.samples)

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame([s.to_dict() for s in self.summaries], columns=RISK_SUMMARY_COLUMNS)

    def bounds_frame(self) -> pd.DataFrame:
        return risk.bound_curves(self.config.model, self.config.sizes, self.config.alphas)

    def write(self, output_dir: Optional[Union[str, Path]] = None) -> Path:
        """
        Write samples.csv, summary.csv and manifest.json, plus bounds.csv
        and SVG boxplots when the config asks for them.

        Returns:
            The output directory
        """
        out = Path(output_dir or self.config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.samples_frame().to_csv(out / "samples.csv", index=False)
        self.summary_frame().to_csv(out / "summary.csv", index=False)
        bounds = self.bounds_frame() if self.config.bounds else None
        if bounds is not None:
            bounds.to_csv(out / "bounds.csv", index=False)
        if self.config.svg:
            from . import plots

            frame = self.samples_frame()
            for name in self.config.estimators:
                plots.plot_risk_boxplots(frame, name, out / f"risk_{name}.svg", bounds=bounds)
        with open(out / "manifest.json", "w", encoding="utf-8") as handle:
            json.dump(self.manifest.to_dict(), handle, indent=2, sort_keys=True)
        logger.info("Wrote %d samples to %s", len(self.samples), out)
        return out


def _units(config: ExperimentConfig) -> List[Unit]:
    alphas = tuple(config.alphas)
    names = tuple(config.estimators)
    return [
        (config.seed, config.model, n, rep, alphas, names)
        for n in config.sizes
        for rep in range(config.replicates)
    ]


def simulate(config: ExperimentConfig, threads: Optional[int] = None) -> SimulationResult:
    """
    Run every (n, replicate) of the config and score every estimator.

    Args:
        config: Experiment settings, validated here
        threads: Worker processes; defaults to ``config.threads``

    Returns:
        SimulationResult with canonically sorted samples

    Raises:
        ConfigError: If the config is invalid
        ExperimentError: If an estimator fails; ``cell`` names the failure
    """
    from . import __version__

    config.validate()
    threads = threads or config.threads
    manifest = RunManifest(config, __version__, datetime.now(timezone.utc).isoformat())
    manifest.record_seeds()
    units = _units(config)
    logger.info(
        "Simulating %s: %d trees, estimators %s, alphas %s (%d worker%s)",
        config.model, len(units), ", ".join(config.estimators),
        ", ".join(f"{a:g}" for a in config.alphas), threads, "" if threads == 1 else "s",
    )

    if threads > 1 and len(units) > 1:
        with multiprocessing.Pool(min(threads, len(units))) as pool:
            outcomes = list(pool.imap_unordered(_run_unit, units))
    else:
        outcomes = [_run_unit(unit) for unit in units]

    samples: List[RiskSample] = []
    violations = {name: 0 for name in config.estimators}
    for rows, recursive in outcomes:
        samples.extend(RiskSample(**row) for row in rows)
        for name, ok in recursive.items():
            violations[name] += 0 if ok else 1
    samples.sort(key=RiskSample.key)

    manifest.finished = datetime.now(timezone.utc).isoformat()
    return SimulationResult(config, samples, manifest, violations)


class ComparisonResult:
    """Side-by-side estimator summaries, ranked by median risk within each (n, alpha)."""

    def __init__(self, simulation: SimulationResult):
        self.simulation = simulation
        self.ranking: List[RiskSummary] = sorted(
            simulation.summaries, key=lambda s: (s.n, s.alpha, s.median, s.estimator)
        )

    def to_frame(self) -> pd.DataFrame:
        rows = []
        rank: Dict[Tuple[int, float], int] = {}
        for s in self.ranking:
            position = rank[(s.n, s.alpha)] = rank.get((s.n, s.alpha), 0) + 1
            row = s.to_dict()
            row["rank"] = position
            row["recursive_violation_rate"] = self.simulation.violation_rate(s.estimator)
            row["information"] = (
                ORACLE_ASSISTED_LABEL if s.estimator in estimators.ORACLE_ASSISTED else LABEL_ONLY_LABEL
            )
            rows.append(row)
        return pd.DataFrame(rows, columns=COMPARE_COLUMNS)

    def order(self, n: int, alpha: float) -> List[str]:
        """Estimators from lowest to highest median risk in one cell."""
        return [s.estimator for s in self.ranking if s.n == n and s.alpha == alpha]

    def write(self, output_dir: Optional[Union[str, Path]] = None) -> Path:
        out = self.simulation.write(output_dir)
        self.to_frame().to_csv(out / "compare.csv", index=False)
        return out


def compare(config: ExperimentConfig, threads: Optional[int] = None) -> ComparisonResult:
    """Simulate several estimators on the same trees and rank them by median risk."""
    result = ComparisonResult(simulate(config, threads))
    for n in config.sizes:
        for alpha in config.alphas:
            logger.info("n=%d alpha=%g: %s", n, alpha, " < ".join(result.order(n, alpha)))
    return result


class RatesResult:
    """Growth exponents fitted across sizes."""

    def __init__(self, simulation: SimulationResult, fits: Sequence[RateFit], statistic: str):
        self.simulation = simulation
        self.fits = list(fits)
        self.statistic = statistic

    def slope(self, estimator: str, alpha: float) -> float:
        for fit in self.fits:
            if fit.estimator == estimator and fit.alpha == alpha:
                return fit.slope
        raise KeyError((estimator, alpha))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([f.to_dict() for f in self.fits], columns=RATE_FIT_COLUMNS)

    def write(self, output_dir: Optional[Union[str, Path]] = None) -> Path:
        out = self.simulation.write(output_dir)
        self.to_frame().to_csv(out / "rates.csv", index=False)
        if self.simulation.config.svg:
            from . import plots

            plots.plot_rates(
                self.simulation.summary_frame(), self.fits, out / "rates.svg", statistic=self.statistic
            )
        return out


def rates(config: ExperimentConfig, threads: Optional[int] = None, statistic: str = "median") -> RatesResult:
    """
    Simulate and fit log(risk) against log(n) per (estimator, alpha).

    Raises:
        ConfigError: If fewer than two distinct sizes are configured
    """
    if len(set(config.sizes)) < 2:
        raise ConfigError("rates needs at least two distinct sizes")
    simulation = simulate(config, threads)
    return RatesResult(simulation, risk.fit_rates(simulation.summaries, statistic), statistic)
