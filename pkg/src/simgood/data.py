"""Labeled samples: synthetic generators and CSV round-tripping.

Every sample in the package lives inside the unit L2 ball; generators and
the loader rescale to keep that invariant rather than rejecting data.
CSV layout: header ``f1,...,fd,label``, one example per row, label in
{-1, 1} in the last column.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import UsageError

_BALL_TOL = 1e-9


class UnitBallRescaleWarning(UserWarning):
    """Emitted when loaded data is shrunk into the unit ball.

    ``scale`` is the multiplicative factor that was applied to every point.
    """

    def __init__(self, message: str, scale: float):
        super().__init__(message)
        self.scale = scale


@dataclass
class LabeledSample:
    """Feature matrix (n, d) with labels in {-1, +1}, all rows in the unit ball."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        lab = np.asarray(self.labels)
        if pts.ndim != 2:
            raise UsageError(f"points must be 2-D, got shape {pts.shape}")
        if lab.ndim != 1 or lab.shape[0] != pts.shape[0]:
            raise UsageError(f"labels shape {lab.shape} does not match {pts.shape[0]} points")
        if not np.all(np.isfinite(pts)):
            raise UsageError("points contain non-finite values")
        if lab.size and not np.all(np.isin(lab, (-1, 1))):
            bad = lab[~np.isin(lab, (-1, 1))][0]
            raise UsageError(f"labels must be -1 or 1, found {bad!r}")
        if pts.size:
            mx = float(np.linalg.norm(pts, axis=1).max())
            if mx > 1.0 + _BALL_TOL:
                raise UsageError(f"points must lie in the unit L2 ball, max norm {mx}")
        self.points = pts
        self.labels = lab.astype(int)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def subset(self, idx) -> "LabeledSample":
        return LabeledSample(self.points[idx], self.labels[idx])


def gen_two_gaussians(n: int, d: int, separation: float, rng_seed: int) -> LabeledSample:
    """Balanced classes from two isotropic gaussians at +-(separation/2) e1.

    The whole sample is rescaled so the largest point norm is exactly 1,
    and rows are shuffled so prefix splits are class-balanced in expectation.
    """
    if n < 2:
        raise UsageError(f"n must be >= 2, got {n}")
    if d < 1:
        raise UsageError(f"d must be >= 1, got {d}")
    if separation < 0:
        raise UsageError(f"separation must be >= 0, got {separation}")
    rng = np.random.default_rng(rng_seed)
    pts = rng.standard_normal((n, d))
    n_pos = n // 2
    pts[:n_pos, 0] += separation / 2.0
    pts[n_pos:, 0] -= separation / 2.0
    labels = np.concatenate([np.ones(n_pos, dtype=int), -np.ones(n - n_pos, dtype=int)])
    perm = rng.permutation(n)
    pts, labels = pts[perm], labels[perm]
    mx = float(np.linalg.norm(pts, axis=1).max())
    if mx > 0:
        pts /= mx
    return LabeledSample(pts, labels)


def gen_circles(n: int, d: int = 2, radii=(0.3, 0.9), noise: float = 0.0, rng_seed: int = 0) -> LabeledSample:
    """Two concentric noisy spheres; +1 on the first radius, -1 on the second.

    Rescaled into the unit ball only when noise pushes a point outside it.
    """
    if n < 2:
        raise UsageError(f"n must be >= 2, got {n}")
    if d < 1:
        raise UsageError(f"d must be >= 1, got {d}")
    if len(radii) != 2 or radii[0] == radii[1]:
        raise UsageError(f"radii must be two distinct values, got {radii}")
    if noise < 0:
        raise UsageError(f"noise must be >= 0, got {noise}")
    rng = np.random.default_rng(rng_seed)
    dirs = rng.standard_normal((n, d))
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    dirs /= norms
    n_pos = n // 2
    r = np.empty(n)
    r[:n_pos] = radii[0]
    r[n_pos:] = radii[1]
    r += noise * rng.standard_normal(n)
    labels = np.concatenate([np.ones(n_pos, dtype=int), -np.ones(n - n_pos, dtype=int)])
    pts = dirs * r[:, None]
    perm = rng.permutation(n)
    pts, labels = pts[perm], labels[perm]
    mx = float(np.linalg.norm(pts, axis=1).max())
    if mx > 1.0:
        pts /= mx
    return LabeledSample(pts, labels)


def save_csv(sample: LabeledSample, path) -> None:
    """Write ``f1,...,fd,label`` rows; floats carry 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i+1}" for i in range(sample.d)] + ["label"])
        for row, lab in zip(sample.points, sample.labels):
            writer.writerow([f"{v:.17g}" for v in row] + [str(int(lab))])


def load_csv(path) -> LabeledSample:
    """Load a sample, rescaling into the unit ball if needed (with a warning)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise UsageError(f"{path}: empty file") from None
        n_cols = len(header)
        if n_cols < 2:
            raise UsageError(f"{path}: header must list at least one feature and a label column")
        pts, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_cols:
                raise UsageError(f"{path}: line {lineno}: expected {n_cols} fields, got {len(row)}")
            try:
                vals = [float(v) for v in row[:-1]]
                lab = float(row[-1])
            except ValueError as exc:
                raise UsageError(f"{path}: line {lineno}: {exc}") from exc
            if lab not in (-1.0, 1.0):
                raise UsageError(f"{path}: line {lineno}: label must be -1 or 1, got {row[-1]}")
            pts.append(vals)
            labels.append(int(lab))
    if not pts:
        raise UsageError(f"{path}: no data rows")
    points = np.array(pts, dtype=float)
    if not np.all(np.isfinite(points)):
        raise UsageError(f"{path}: non-finite feature value")
    mx = float(np.linalg.norm(points, axis=1).max())
    if mx > 1.0 + _BALL_TOL:
        points /= mx
        warnings.warn(
            UnitBallRescaleWarning(
                f"{path}: max point norm {mx} exceeds 1; rescaled all points by {1.0 / mx}",
                scale=1.0 / mx,
            ),
            stacklevel=2,
        )
    return LabeledSample(points, np.array(labels, dtype=int))
