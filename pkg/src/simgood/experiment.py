"""Monte-Carlo study of the deviation bound on synthetic tasks.

Each trial generates one pooled sample (so train and test share a single
unit-ball rescale), splits it, draws landmarks from the train part, trains
a separator, and evaluates the bound next to the observed train/test risk
gap. Trial seeds are derived deterministically from the master seed, so a
study is reproducible row for row.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass

import numpy as np

from .data import LabeledSample, gen_circles, gen_two_gaussians
from .embedding import draw_landmarks, embed
from .errors import UsageError
from .robustness import build_cover, empirical_gap, generalization_bound
from .similarity import (
    SimilarityFunction,
    lipschitz_constant,
    similarity_from_json,
    validate_range,
)
from .solver import empirical_risk, train_lp, train_subgradient

TRIAL_CSV_COLUMNS = (
    "seed",
    "d_l",
    "gamma",
    "sigma",
    "family",
    "rho",
    "M",
    "term_robust",
    "term_stat",
    "bound",
    "train_risk",
    "test_risk",
    "gap",
)

_GENERATORS = {"two-gaussians", "circles"}


@dataclass
class ExperimentConfig:
    task: dict
    similarity: SimilarityFunction
    gamma: float
    grid_side: float
    delta: float
    d_l: int
    d_test: int
    trials: int
    master_seed: int
    backend: str = "lp"
    d_u: int = 20
    sgd_steps: int = 20_000

    def __post_init__(self):
        name = self.task.get("name") if isinstance(self.task, dict) else None
        if name not in _GENERATORS:
            raise UsageError(f"task name must be one of {sorted(_GENERATORS)}, got {name!r}")
        if self.backend not in ("lp", "sgd"):
            raise UsageError(f"backend must be 'lp' or 'sgd', got {self.backend!r}")
        for attr in ("d_l", "d_test", "trials", "d_u", "sgd_steps"):
            if getattr(self, attr) < 1:
                raise UsageError(f"{attr} must be >= 1, got {getattr(self, attr)}")
        if self.gamma <= 0:
            raise UsageError(f"gamma must be positive, got {self.gamma}")

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        try:
            sim = similarity_from_json(obj["similarity"])
            return cls(
                task=obj["task"],
                similarity=sim,
                gamma=float(obj["gamma"]),
                grid_side=float(obj["grid_side"]),
                delta=float(obj["delta"]),
                d_l=int(obj["d_l"]),
                d_test=int(obj["d_test"]),
                trials=int(obj["trials"]),
                master_seed=int(obj["master_seed"]),
                backend=obj.get("backend", "lp"),
                d_u=int(obj.get("d_u", 20)),
                sgd_steps=int(obj.get("sgd_steps", 20_000)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed experiment config: {exc}") from exc


@dataclass
class TrialResult:
    seed: int
    d_l: int
    gamma: float
    sigma: float | None
    family: str
    rho: float
    M: int
    term_robust: float
    term_stat: float
    bound: float
    train_risk: float
    test_risk: float
    gap: float

    def csv_row(self) -> list:
        return [
            self.seed,
            self.d_l,
            self.gamma,
            "" if self.sigma is None else self.sigma,
            self.family,
            self.rho,
            self.M,
            self.term_robust,
            self.term_stat,
            self.bound,
            self.train_risk,
            self.test_risk,
            self.gap,
        ]


def _generate(task: dict, n: int, seed: int) -> LabeledSample:
    name = task["name"]
    if name == "two-gaussians":
        return gen_two_gaussians(
            n=n,
            d=int(task.get("d", 2)),
            separation=float(task.get("separation", 3.0)),
            rng_seed=seed,
        )
    return gen_circles(
        n=n,
        d=int(task.get("d", 2)),
        radii=tuple(task.get("radii", (0.3, 0.9))),
        noise=float(task.get("noise", 0.0)),
        rng_seed=seed,
    )


def run_trial(cfg: ExperimentConfig, trial_seed: int) -> TrialResult:
    rr = np.random.default_rng(trial_seed)
    gen_seed, lm_seed, sgd_seed = (int(s) for s in rr.integers(0, 2**31 - 1, 3))
    pooled = _generate(cfg.task, cfg.d_l + cfg.d_test, gen_seed)
    train_s = pooled.subset(slice(0, cfg.d_l))
    test_s = pooled.subset(slice(cfg.d_l, None))
    landmarks = draw_landmarks(train_s, cfg.d_u, lm_seed)
    f = cfg.similarity
    train_e = embed(train_s, landmarks, f)
    test_e = embed(test_s, landmarks, f)
    rng_report = validate_range(f, pooled, landmarks)
    if rng_report.violated:
        print(
            f"warning: trial {trial_seed}: similarity range violated "
            f"[{rng_report.min_value}, {rng_report.max_value}]",
            file=sys.stderr,
        )
    if cfg.backend == "lp":
        model, _ = train_lp(train_e, cfg.gamma)
    else:
        model, _ = train_subgradient(train_e, cfg.gamma, steps=cfg.sgd_steps, rng_seed=sgd_seed)
    cover = build_cover(train_s, cfg.grid_side)
    report = generalization_bound(
        lipschitz_constant(f), cover.rho, cfg.gamma, cover.M, cfg.delta, cfg.d_l
    )
    train_risk = empirical_risk(model, train_e)
    test_risk = empirical_risk(model, test_e)
    return TrialResult(
        seed=trial_seed,
        d_l=cfg.d_l,
        gamma=cfg.gamma,
        sigma=f.sigma,
        family=f.family,
        rho=cover.rho,
        M=cover.M,
        term_robust=report.term_robust,
        term_stat=report.term_stat,
        bound=report.bound,
        train_risk=train_risk,
        test_risk=test_risk,
        gap=empirical_gap(model, train_e, test_e),
    )


def run_experiment(cfg: ExperimentConfig) -> list[TrialResult]:
    master = np.random.default_rng(cfg.master_seed)
    trial_seeds = [int(s) for s in master.integers(0, 2**31 - 1, cfg.trials)]
    return [run_trial(cfg, s) for s in trial_seeds]


def write_trials_csv(results: list[TrialResult], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIAL_CSV_COLUMNS)
        for r in results:
            writer.writerow(r.csv_row())


def summarize(results: list[TrialResult]) -> dict:
    n = len(results)
    within = sum(1 for r in results if r.gap <= r.bound)
    return {
        "trials": n,
        "frac_gap_within_bound": within / n if n else float("nan"),
        "mean_bound": float(np.mean([r.bound for r in results])) if n else float("nan"),
        "mean_gap": float(np.mean([r.gap for r in results])) if n else float("nan"),
        "mean_train_risk": float(np.mean([r.train_risk for r in results])) if n else float("nan"),
        "mean_test_risk": float(np.mean([r.test_risk for r in results])) if n else float("nan"),
    }
