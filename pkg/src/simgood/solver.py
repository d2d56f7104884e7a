"""L1-constrained hinge-loss separators over embedded features.

The training problem: minimize the mean hinge loss
``mean_i max(0, 1 - l_i <alpha, phi_i>)`` subject to ``||alpha||_1 <= 1/gamma``.
Two backends:

* ``train_lp``: exact global optimum via the standard split-variable LP
  (alpha = alpha+ - alpha-, one slack per example), solved with HiGHS.
* ``train_subgradient``: projected subgradient descent with step c/sqrt(t)
  and sort-based Euclidean projection onto the L1 ball; returns the best
  iterate seen. Scales past the sizes where the LP is comfortable.

There is deliberately no intercept and the constraint is kept as a hard
constraint (not a penalty): the downstream robustness argument consumes
``||alpha||_1 <= 1/gamma`` directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .embedding import EmbeddedSample
from .errors import NumericError, UsageError
from .similarity import SimilarityFunction, similarity_from_json, similarity_to_json

_L1_SLACK = 1e-8


@dataclass
class SeparatorModel:
    """Coefficients over landmarks with margin gamma; ||alpha||_1 <= 1/gamma."""

    alpha: np.ndarray
    gamma: float
    landmarks_ref: str | None = None
    similarity_ref: SimilarityFunction | None = None

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float).reshape(-1)
        if not np.all(np.isfinite(a)):
            raise UsageError("alpha contains non-finite entries")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise UsageError(f"gamma must be positive, got {self.gamma}")
        budget = (1.0 / self.gamma) * (1.0 + _L1_SLACK)
        l1 = float(np.abs(a).sum())
        if l1 > budget:
            raise UsageError(f"||alpha||_1 = {l1} exceeds 1/gamma = {1.0 / self.gamma}")
        self.alpha = a
        self.gamma = float(self.gamma)


@dataclass
class TrainReport:
    objective: float
    backend: str
    iterations: int
    duality_or_stationarity_gap: float


def instantaneous_loss(model: SeparatorModel, embedded_row, label) -> float:
    """Hinge loss max(0, 1 - label * <alpha, row>) at one embedded example."""
    row = np.asarray(embedded_row, dtype=float).reshape(-1)
    if row.shape[0] != model.alpha.shape[0]:
        raise UsageError(
            f"row length {row.shape[0]} does not match alpha length {model.alpha.shape[0]}"
        )
    return max(0.0, 1.0 - float(label) * float(model.alpha @ row))


def losses(model: SeparatorModel, data: EmbeddedSample) -> np.ndarray:
    """Vector of hinge losses over all rows of an embedded sample."""
    if data.d_u != model.alpha.shape[0]:
        raise UsageError(
            f"feature width {data.d_u} does not match alpha length {model.alpha.shape[0]}"
        )
    margins = data.labels * (data.features @ model.alpha)
    return np.maximum(0.0, 1.0 - margins)


def empirical_risk(model: SeparatorModel, data: EmbeddedSample) -> float:
    """Mean hinge loss over the sample."""
    if data.n == 0:
        raise UsageError("empirical risk of an empty sample is undefined")
    return float(losses(model, data).mean())


def _snap_to_budget(alpha: np.ndarray, gamma: float) -> np.ndarray:
    # solver tolerances can leave ||alpha||_1 a hair over 1/gamma; rescale down
    l1 = float(np.abs(alpha).sum())
    budget = 1.0 / gamma
    if l1 > budget:
        alpha = alpha * (budget / l1)
    return alpha


def train_lp(data: EmbeddedSample, gamma: float) -> tuple[SeparatorModel, TrainReport]:
    """Globally optimal separator via the split-variable LP reformulation.

    Variables (alpha+, alpha-, xi); minimize mean(xi) subject to
    xi_i >= 1 - l_i <alpha, phi_i>, xi >= 0, sum(alpha+ + alpha-) <= 1/gamma.
    The reported objective is the hinge risk recomputed from the returned
    coefficients; its distance to the LP optimum is the reported gap.
    """
    if gamma <= 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    if data.n == 0:
        raise UsageError("cannot train on an empty sample")
    n, m = data.features.shape
    P = data.labels[:, None] * data.features
    c = np.concatenate([np.zeros(2 * m), np.full(n, 1.0 / n)])
    A_ub = np.zeros((n + 1, 2 * m + n))
    A_ub[:n, :m] = -P
    A_ub[:n, m : 2 * m] = P
    A_ub[:n, 2 * m :] = -np.eye(n)
    A_ub[n, : 2 * m] = 1.0
    b_ub = np.concatenate([-np.ones(n), [1.0 / gamma]])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    if not res.success:
        raise NumericError(f"LP solver failed: {res.message}", last_value=res)
    alpha = _snap_to_budget(res.x[:m] - res.x[m : 2 * m], gamma)
    model = SeparatorModel(alpha=alpha, gamma=gamma)
    objective = empirical_risk(model, data)
    report = TrainReport(
        objective=objective,
        backend="lp",
        iterations=int(res.nit),
        duality_or_stationarity_gap=abs(objective - float(res.fun)),
    )
    return model, report


def project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto {x : ||x||_1 <= radius} (sort-based)."""
    if radius <= 0:
        raise UsageError(f"radius must be positive, got {radius}")
    v = np.asarray(v, dtype=float)
    mag = np.abs(v)
    if mag.sum() <= radius:
        return v.copy()
    u = np.sort(mag)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, v.size + 1)
    rho = np.nonzero(u - (css - radius) / ks > 0)[0][-1]
    theta = (css[rho] - radius) / (rho + 1.0)
    w = np.sign(v) * np.maximum(mag - theta, 0.0)
    # guard against rounding pushing the sum a hair over the radius
    s = float(np.abs(w).sum())
    if s > radius:
        w *= radius / s
    return w


def sample_l1_ball(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    """One point drawn uniformly from the L1 ball of the given radius."""
    mags = rng.dirichlet(np.ones(dim))
    signs = rng.integers(0, 2, dim) * 2 - 1
    scale = radius * rng.uniform(0.0, 1.0) ** (1.0 / dim)
    return scale * signs * mags


def train_subgradient(
    data: EmbeddedSample,
    gamma: float,
    steps: int = 20_000,
    rng_seed: int = 0,
    step_scale: float | None = None,
) -> tuple[SeparatorModel, TrainReport]:
    """Projected subgradient descent on the mean hinge over the L1 ball.

    Step size is ``c / sqrt(t)`` with ``c`` defaulting to the feasible-set
    radius 1/gamma. The seed only picks the starting point (uniform in the
    feasible ball); the descent itself is deterministic. The reported gap is
    the best-objective improvement over the final 10% of steps (a stagnation
    measure), 0.0 when the run stopped at an exact optimum.
    """
    if gamma <= 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    if steps < 1:
        raise UsageError(f"steps must be >= 1, got {steps}")
    if data.n == 0:
        raise UsageError("cannot train on an empty sample")
    rng = np.random.default_rng(rng_seed)
    n, m = data.features.shape
    radius = 1.0 / gamma
    c = (1.0 / gamma) if step_scale is None else float(step_scale)
    if c <= 0:
        raise UsageError(f"step_scale must be positive, got {c}")
    P = data.labels[:, None] * data.features
    alpha = sample_l1_ball(rng, m, radius)

    def objective(a):
        return float(np.maximum(0.0, 1.0 - P @ a).mean())

    best = alpha.copy()
    best_obj = objective(alpha)
    window = max(1, steps // 10)
    obj_at_window_start = best_obj
    t_done = 0
    for t in range(1, steps + 1):
        t_done = t
        if t == steps - window + 1:
            obj_at_window_start = best_obj
        margins = P @ alpha
        active = margins < 1.0
        if best_obj == 0.0:
            break
        if not active.any():
            # zero loss everywhere: current iterate is optimal
            obj = objective(alpha)
            if obj < best_obj:
                best, best_obj = alpha.copy(), obj
            break
        g = -P[active].sum(axis=0) / n
        alpha = project_l1_ball(alpha - (c / math.sqrt(t)) * g, radius)
        obj = objective(alpha)
        if obj < best_obj:
            best, best_obj = alpha.copy(), obj
    gap = max(0.0, obj_at_window_start - best_obj) if t_done >= steps else 0.0
    model = SeparatorModel(alpha=best, gamma=gamma)
    report = TrainReport(
        objective=best_obj,
        backend="subgradient",
        iterations=t_done,
        duality_or_stationarity_gap=gap,
    )
    return model, report


def model_to_json(model: SeparatorModel) -> dict:
    return {
        "gamma": model.gamma,
        "alpha": [float(v) for v in model.alpha],
        "landmarks": model.landmarks_ref,
        "similarity": (
            similarity_to_json(model.similarity_ref) if model.similarity_ref is not None else None
        ),
    }


def model_from_json(obj: dict) -> SeparatorModel:
    try:
        gamma = float(obj["gamma"])
        alpha = np.array(obj["alpha"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed model JSON: {exc}") from exc
    sim = obj.get("similarity")
    return SeparatorModel(
        alpha=alpha,
        gamma=gamma,
        landmarks_ref=obj.get("landmarks"),
        similarity_ref=similarity_from_json(sim) if sim is not None else None,
    )


def save_model(model: SeparatorModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> SeparatorModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    return model_from_json(obj)
