"""Empirical goodness of a similarity function on a labeled sample.

The score of a point is the mean signed similarity to a designated
"reasonable" subset: g(x) = mean over reasonable x' of label(x') K(x, x').
The goodness estimate is the mean hinge of the margin-normalized score,
``mean_x max(0, 1 - label(x) g(x) / gamma)``, together with the mass of
the reasonable subset. The reasonable subset is supplied as a boolean mask
(default: every point); nothing here tries to choose it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledSample
from .errors import UsageError
from .similarity import SimilarityFunction, similarity_matrix


@dataclass(frozen=True)
class GoodnessEstimate:
    epsilon_hat: float
    tau_hat: float
    gamma: float
    n_reasonable: int

    def to_json(self) -> dict:
        return {
            "epsilon_hat": self.epsilon_hat,
            "tau_hat": self.tau_hat,
            "gamma": self.gamma,
            "n_reasonable": self.n_reasonable,
        }


def g_value(x, reasonable: LabeledSample, f: SimilarityFunction) -> float:
    """Mean of label(x') * K(x, x') over the reasonable points x'."""
    if reasonable.n == 0:
        raise UsageError("the reasonable set is empty")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    sims = similarity_matrix(f, x, reasonable.points)[0]
    return float(np.mean(reasonable.labels * sims))


def estimate_goodness(
    sample: LabeledSample,
    reasonable_mask,
    f: SimilarityFunction,
    gamma: float,
) -> GoodnessEstimate:
    """Estimate (epsilon_hat, tau_hat) at margin gamma.

    ``reasonable_mask`` is a boolean vector over the sample (None means
    all points are reasonable). tau_hat is exactly the mask density.
    """
    if gamma <= 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    if sample.n == 0:
        raise UsageError("cannot estimate goodness on an empty sample")
    if reasonable_mask is None:
        mask = np.ones(sample.n, dtype=bool)
    else:
        mask = np.asarray(reasonable_mask)
        if mask.shape != (sample.n,):
            raise UsageError(f"mask shape {mask.shape} does not match sample size {sample.n}")
        if mask.dtype != bool:
            if not np.all(np.isin(mask, (0, 1))):
                raise UsageError("mask entries must be 0/1 or booleans")
            mask = mask.astype(bool)
    k = int(mask.sum())
    if k == 0:
        raise UsageError("mask selects no reasonable points")
    sims = similarity_matrix(f, sample.points, sample.points[mask])
    g = sims @ sample.labels[mask] / k
    hinge_args = sample.labels * g / gamma
    epsilon_hat = float(np.maximum(0.0, 1.0 - hinge_args).mean())
    return GoodnessEstimate(
        epsilon_hat=epsilon_hat,
        tau_hat=k / sample.n,
        gamma=float(gamma),
        n_reasonable=k,
    )
