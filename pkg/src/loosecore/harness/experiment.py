"""Monte Carlo runs over H^r(n, p) comparing core statistics with predictions."""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ..analytic import AnalyticParams, derived_params, predicted_histograms
from ..cores import padded_core_from_reduced, peeled_degrees, reduced_core
from ..errors import InvalidParams
from ..factor_graph import build_factor_graph
from ..hypergraph import ModelParams, sample_hypergraph
from .extremal import certificate_bound
from .stats import folded_histogram, tv_distance

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TV_TOLERANCE = 0.02
COEFF_TOLERANCE = 0.01


@dataclass
class ExperimentConfig:
    r: int = 3
    n: int = 10_000
    d: float | None = 1.0
    p: float | None = None
    trials: int = 1
    seed: int = 0
    rounds: int | None = None
    max_degree: int = 30
    workers: int = 1
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParams("trials must be >= 1")
        if self.max_degree < 2:
            raise InvalidParams("max_degree must be >= 2")
        if self.workers < 1:
            raise InvalidParams("workers must be >= 1")
        if self.rounds is not None and self.rounds < 0:
            raise InvalidParams("rounds must be >= 0")
        if self.format not in ("json", "csv"):
            raise InvalidParams(f"unknown output format {self.format!r}")
        if self.p is None and self.d is None:
            raise InvalidParams("give either d or p")
        self.model(0)

    def model(self, trial: int) -> ModelParams:
        seed = self.seed + trial
        if self.p is not None:
            return ModelParams.from_probability(self.r, self.n, self.p, seed)
        return ModelParams.from_degree(self.r, self.n, self.d, seed)

    @property
    def degree_parameter(self) -> float:
        return self.model(0).d

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("out", "workers")}


_INT_KEYS = {"r", "n", "trials", "seed", "rounds", "max_degree", "workers"}
_FLOAT_KEYS = {"d", "p"}


def parse_config(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name for f in fields(ExperimentConfig)}
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParams(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise InvalidParams(f"config line {lineno}: unknown key {key!r}")
        if value.lower() in ("", "none"):
            out[key] = None
        elif key in _INT_KEYS:
            out[key] = int(value)
        elif key in _FLOAT_KEYS:
            out[key] = float(value)
        else:
            out[key] = value
    return out


def load_config(path, **overrides) -> ExperimentConfig:
    values = parse_config(Path(path).read_text())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


@dataclass
class TrialResult:
    trial: int
    seed: int
    n: int
    m: int
    rounds_to_fixpoint: int
    core_order: float  # v(C_H) / n
    core_size: float  # e(C_H) / n
    certificate: int
    mu: np.ndarray
    zeta: np.ndarray
    zeta_hat: np.ndarray
    zeta_round: np.ndarray | None = None
    zeta_hat_round: np.ndarray | None = None
    tv: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "trial": self.trial,
            "seed": self.seed,
            "n": self.n,
            "m": self.m,
            "rounds_to_fixpoint": self.rounds_to_fixpoint,
            "core_order": self.core_order,
            "core_size": self.core_size,
            "certificate": self.certificate,
            "mu": self.mu.tolist(),
            "zeta": self.zeta.tolist(),
            "zeta_hat": self.zeta_hat.tolist(),
            "tv": dict(self.tv),
        }
        if self.zeta_round is not None:
            out["zeta_round"] = self.zeta_round.tolist()
            out["zeta_hat_round"] = self.zeta_hat_round.tolist()
        if timings:
            out["seconds"] = self.seconds
        return out


def run_trial(cfg: ExperimentConfig, trial: int, predicted: dict | None = None) -> TrialResult:
    start = time.perf_counter()
    J = cfg.max_degree
    model = cfg.model(trial)
    H = sample_hypergraph(model)
    G = build_factor_graph(H)
    R = padded_core_from_reduced(G, reduced_core(G))
    zeta = folded_histogram(R.variable_degrees, J)
    zeta_hat = folded_histogram(R.factor_degrees, J)
    mu = folded_histogram(R.padded_variable_degrees, J)
    res = TrialResult(
        trial=trial,
        seed=model.seed,
        n=G.n,
        m=G.m,
        rounds_to_fixpoint=int(R.rounds),
        core_order=1.0 - float(mu[0]),
        core_size=int(np.count_nonzero(R.padded_factor_degrees)) / G.n,
        certificate=certificate_bound(G, R),
        mu=mu,
        zeta=zeta,
        zeta_hat=zeta_hat,
    )
    if cfg.rounds is not None:
        deg = peeled_degrees(G, cfg.rounds)
        res.zeta_round = folded_histogram(deg[: G.n], J)
        res.zeta_hat_round = folded_histogram(deg[G.n :], J)
    if predicted is not None:
        res.tv = {key: tv_distance(getattr(res, key), predicted[key]) for key in ("mu", "zeta", "zeta_hat")}
    res.seconds = time.perf_counter() - start
    return res


def _trial_job(args):
    cfg, trial, predicted = args
    return run_trial(cfg, trial, predicted)


@dataclass
class TrialReport:
    config: ExperimentConfig
    predictions: AnalyticParams
    predicted: dict
    trials: list[TrialResult]
    interrupted: bool = False

    def aggregate(self) -> dict:
        out: dict = {"trials_completed": len(self.trials)}
        if not self.trials:
            return out
        ddof = 1 if len(self.trials) > 1 else 0
        for key in ("m", "rounds_to_fixpoint", "core_order", "core_size", "certificate"):
            vals = np.array([getattr(t, key) for t in self.trials], dtype=float)
            out[key] = {"mean": float(vals.mean()), "std": float(vals.std(ddof=ddof))}
        for key in ("mu", "zeta", "zeta_hat"):
            stack = np.stack([getattr(t, key) for t in self.trials])
            out[key] = {"mean": stack.mean(axis=0).tolist(), "std": stack.std(axis=0, ddof=ddof).tolist()}
        return out

    def tv(self) -> dict:
        if not self.trials:
            return {}
        out = {}
        for key in ("mu", "zeta", "zeta_hat"):
            mean = np.stack([getattr(t, key) for t in self.trials]).mean(axis=0)
            out[key] = {
                "mean_histogram": tv_distance(mean, self.predicted[key]),
                "per_trial_max": max(t.tv[key] for t in self.trials),
            }
        return out

    def mean(self, key: str) -> float:
        return float(np.mean([getattr(t, key) for t in self.trials]))

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "interrupted": self.interrupted,
            "tolerances": {"tv": TV_TOLERANCE, "coefficient": COEFF_TOLERANCE},
            "predictions": {
                **self.predictions.to_dict(),
                "histograms": {k: v.tolist() for k, v in self.predicted.items()},
            },
            "per_trial": [t.to_dict(timings) for t in self.trials],
            "aggregate": self.aggregate(),
            "tv": self.tv(),
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2) + "\n"

    def write_histogram_csv(self, path) -> None:
        """One row per (trial, j); ``j = J + 1`` is the tail bucket."""
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["trial", "j", "mu", "zeta", "zeta_hat", "mu_pred", "zeta_pred", "zeta_hat_pred"])
            for t in self.trials:
                for j in range(len(t.mu)):
                    out.writerow(
                        [
                            t.trial,
                            j,
                            repr(float(t.mu[j])),
                            repr(float(t.zeta[j])),
                            repr(float(t.zeta_hat[j])),
                            repr(float(self.predicted["mu"][j])),
                            repr(float(self.predicted["zeta"][j])),
                            repr(float(self.predicted["zeta_hat"][j])),
                        ]
                    )


def run_experiment(cfg: ExperimentConfig) -> TrialReport:
    """Run ``cfg.trials`` independent trials with seeds ``seed, seed+1, ...``.

    Results are folded in trial order whatever the worker count.  On
    KeyboardInterrupt the trials finished so far are returned with
    ``interrupted=True``.
    """
    params = derived_params(cfg.r, cfg.degree_parameter)
    predicted = predicted_histograms(params, cfg.max_degree)
    report = TrialReport(cfg, params, predicted, [])
    jobs = [(cfg, i, predicted) for i in range(cfg.trials)]
    try:
        if cfg.workers == 1:
            for job in jobs:
                report.trials.append(_trial_job(job))
                log.info("trial %d done", job[1])
        else:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for res in pool.map(_trial_job, jobs):
                    report.trials.append(res)
    except KeyboardInterrupt:
        log.warning("interrupted after %d of %d trials", len(report.trials), cfg.trials)
        report.interrupted = True
    return report

