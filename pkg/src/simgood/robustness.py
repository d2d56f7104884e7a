"""Cover partitions, the robustness constant, and the generalization bound.

The example space [-1,1]^d x {-1,+1} is partitioned by an axis-aligned grid
of side ``grid_side`` crossed with the two labels, so same-cell examples
share a label and sit within L2 distance ``rho = grid_side * sqrt(d)`` of
each other. The cell count ``M = 2 * ceil(2/grid_side)^d`` counts the whole
grid (not just occupied cells), keeping the partition independent of the
data. For an l-Lipschitz similarity and a separator with
``||alpha||_1 <= 1/gamma``, hinge losses of same-cell examples differ by at
most ``l * rho / gamma``; the deviation bound adds the statistical term
``B * sqrt((2 M ln 2 + 2 ln(1/delta)) / d_l)`` with ``B = 1 + 1/gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledSample
from .embedding import EmbeddedSample, LandmarkSet, embed
from .errors import UsageError
from .similarity import SimilarityFunction
from .solver import SeparatorModel, empirical_risk, instantaneous_loss

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass
class CoverPartition:
    """Label-crossed grid partition of the unit-ball example space.

    ``cell_ids[i]`` is the cell of the i-th point the cover was built on;
    ``assign`` maps any (point, label) pair to its cell. ``M`` is an exact
    integer (arbitrary precision -- it grows like ceil(2/side)^d).
    """

    grid_side: float
    dim: int
    cells_per_axis: int
    M: int
    rho: float
    cell_ids: list = field(default_factory=list)

    def assign(self, x, label) -> int:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise UsageError(f"point dimension {x.shape[0]} does not match cover dim {self.dim}")
        if label not in (-1, 1):
            raise UsageError(f"label must be -1 or 1, got {label!r}")
        coords = np.floor((x + 1.0) / self.grid_side).astype(int)
        coords = np.clip(coords, 0, self.cells_per_axis - 1)
        cell = 0
        for c in coords:
            cell = cell * self.cells_per_axis + int(c)
        if label == 1:
            cell += self.cells_per_axis**self.dim
        return cell


def build_cover(points: LabeledSample, grid_side: float) -> CoverPartition:
    """Partition the sample's space by a grid of the given side, per label."""
    if not (grid_side > 0):
        raise UsageError(f"grid_side must be positive, got {grid_side}")
    if grid_side > 2:
        raise UsageError(f"grid_side must be <= 2 (the diameter of [-1,1]), got {grid_side}")
    d = points.d
    # tiny slack so exact divisors of 2 don't gain a phantom cell to float noise
    cells_per_axis = int(math.ceil(2.0 / grid_side - 1e-9))
    M = 2 * cells_per_axis**d
    cover = CoverPartition(
        grid_side=float(grid_side),
        dim=d,
        cells_per_axis=cells_per_axis,
        M=M,
        rho=float(grid_side) * math.sqrt(d),
    )
    cover.cell_ids = [
        cover.assign(x, int(lab)) for x, lab in zip(points.points, points.labels)
    ]
    return cover


def robustness_epsilon(l: float, rho: float, gamma: float) -> float:
    """Same-cell loss deviation constant l * rho / gamma."""
    if l < 0 or rho < 0:
        raise UsageError(f"l and rho must be nonnegative, got l={l}, rho={rho}")
    if gamma <= 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    return l * rho / gamma


@dataclass
class BoundReport:
    """All inputs and outputs of one deviation-bound evaluation."""

    lipschitz: float
    rho: float
    gamma: float
    M: int
    B: float
    delta: float
    d_l: int
    term_robust: float
    term_stat: float
    bound: float
    empirical_gap: float | None = None

    def to_json(self) -> dict:
        out = {
            "lipschitz": self.lipschitz,
            "rho": self.rho,
            "gamma": self.gamma,
            "M": self.M if isinstance(self.M, int) and abs(self.M) < 2**53 else float("inf"),
            "B": self.B,
            "delta": self.delta,
            "d_l": self.d_l,
            "term_robust": self.term_robust,
            "term_stat": self.term_stat,
            "bound": self.bound,
        }
        if self.empirical_gap is not None:
            out["empirical_gap"] = self.empirical_gap
        return out


def _stat_term(B: float, M: int, delta: float, d_l: int) -> float:
    try:
        Mf = float(M)
    except OverflowError:
        Mf = math.inf
    if math.isfinite(Mf):
        val = B * math.sqrt((2.0 * Mf * math.log(2.0) + 2.0 * math.log(1.0 / delta)) / d_l)
        if math.isfinite(val):
            return val
    # M too large for float arithmetic: work in logs (the delta term is
    # negligible at this magnitude); report inf when even the log overflows
    log_val = math.log(B) + 0.5 * (math.log(2.0 * math.log(2.0)) + math.log(M) - math.log(d_l))
    return math.exp(log_val) if log_val < _LOG_FLOAT_MAX else math.inf


def generalization_bound(
    l: float, rho: float, gamma: float, M: int, delta: float, d_l: int
) -> BoundReport:
    """Evaluate both bound terms: l*rho/gamma plus the M-dependent statistical term."""
    if not 0 < delta < 1:
        raise UsageError(f"delta must be in (0, 1), got {delta}")
    if d_l < 1:
        raise UsageError(f"d_l must be >= 1, got {d_l}")
    if M < 1:
        raise UsageError(f"M must be >= 1, got {M}")
    term_robust = robustness_epsilon(l, rho, gamma)
    B = 1.0 + 1.0 / gamma
    term_stat = _stat_term(B, M, delta, d_l)
    return BoundReport(
        lipschitz=float(l),
        rho=float(rho),
        gamma=float(gamma),
        M=M,
        B=B,
        delta=float(delta),
        d_l=int(d_l),
        term_robust=term_robust,
        term_stat=term_stat,
        bound=term_robust + term_stat,
    )


def same_cell_loss_gap(
    model: SeparatorModel,
    f: SimilarityFunction,
    landmarks: LandmarkSet,
    z1: tuple,
    z2: tuple,
) -> float:
    """|loss(z1) - loss(z2)| for two same-label examples z = (x, label)."""
    x1, lab1 = z1
    x2, lab2 = z2
    if lab1 != lab2:
        raise UsageError(f"same-cell examples must share a label, got {lab1} and {lab2}")
    pair = LabeledSample(np.vstack([np.asarray(x1, float), np.asarray(x2, float)]),
                         np.array([lab1, lab2]))
    emb = embed(pair, landmarks, f)
    l1 = instantaneous_loss(model, emb.features[0], lab1)
    l2 = instantaneous_loss(model, emb.features[1], lab2)
    return abs(l1 - l2)


def empirical_gap(model: SeparatorModel, train: EmbeddedSample, test: EmbeddedSample) -> float:
    """|mean test hinge - mean train hinge| as a plug-in deviation estimate."""
    if train.n == 0 or test.n == 0:
        raise UsageError("empirical gap requires nonempty train and test samples")
    return abs(empirical_risk(model, test) - empirical_risk(model, train))
