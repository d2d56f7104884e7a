"""Landmark sets and the similarity feature map.

A landmark set is a small collection of unit-ball points; embedding a sample
against it produces one feature per landmark, feature (i, j) being the
similarity of example i to landmark j. Labels are never needed for the
landmarks themselves.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .data import LabeledSample, UnitBallRescaleWarning
from .errors import UsageError
from .similarity import SimilarityFunction, similarity_matrix

_BALL_TOL = 1e-9


@dataclass
class LandmarkSet:
    """Unit-ball points used as embedding anchors; provenance in ``source``."""

    points: np.ndarray
    source: str = "sampled"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise UsageError(f"landmarks must be a non-empty 2-D array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise UsageError("landmarks contain non-finite values")
        mx = float(np.linalg.norm(pts, axis=1).max())
        if mx > 1.0 + _BALL_TOL:
            raise UsageError(f"landmarks must lie in the unit L2 ball, max norm {mx}")
        if self.source not in ("sampled", "user-provided"):
            raise UsageError(f"unknown landmark source {self.source!r}")
        self.points = pts

    @property
    def d_u(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass
class EmbeddedSample:
    """Similarity features (n, d_u) plus the labels copied from the source sample."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        lab = np.asarray(self.labels)
        if feats.ndim != 2:
            raise UsageError(f"features must be 2-D, got shape {feats.shape}")
        if lab.ndim != 1 or lab.shape[0] != feats.shape[0]:
            raise UsageError(f"labels shape {lab.shape} does not match {feats.shape[0]} rows")
        if lab.size and not np.all(np.isin(lab, (-1, 1))):
            raise UsageError("labels must be -1 or 1")
        self.features = feats
        self.labels = lab.astype(int)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d_u(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "EmbeddedSample":
        return EmbeddedSample(self.features[idx], self.labels[idx])


def landmark_count(tau: float, eps1: float, gamma: float, delta: float) -> int:
    """Number of landmarks sufficient for the margin-preservation guarantee.

    ceil((2/tau) * (ln(2/delta) + 16 ln(2/delta) / (eps1*gamma)^2)), valid
    only when delta < gamma*eps1/4. Natural log throughout.
    """
    if not 0 < tau <= 1:
        raise UsageError(f"tau must be in (0, 1], got {tau}")
    if eps1 <= 0:
        raise UsageError(f"eps1 must be positive, got {eps1}")
    if gamma <= 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    if delta <= 0:
        raise UsageError(f"delta must be positive, got {delta}")
    limit = gamma * eps1 / 4.0
    if delta >= limit:
        raise UsageError(
            f"admissibility requires delta < gamma*eps1/4 = {limit}, got delta = {delta}"
        )
    log_term = math.log(2.0 / delta)
    raw = (2.0 / tau) * (log_term + 16.0 * log_term / (eps1 * gamma) ** 2)
    return int(math.ceil(raw))


def draw_landmarks(sample: LabeledSample, d_u: int, rng_seed: int) -> LandmarkSet:
    """Draw d_u landmarks i.i.d. with replacement from the sample's points."""
    if d_u < 1:
        raise UsageError(f"d_u must be >= 1, got {d_u}")
    if sample.n == 0:
        raise UsageError("cannot draw landmarks from an empty sample")
    rng = np.random.default_rng(rng_seed)
    idx = rng.integers(0, sample.n, size=d_u)
    return LandmarkSet(points=sample.points[idx].copy(), source="sampled")


def embed(sample: LabeledSample, landmarks: LandmarkSet, f: SimilarityFunction) -> EmbeddedSample:
    """Map each example to its vector of similarities to the landmarks."""
    if sample.d != landmarks.d:
        raise UsageError(f"dimension mismatch: sample d={sample.d}, landmarks d={landmarks.d}")
    if sample.d != f.d:
        raise UsageError(f"dimension mismatch: sample d={sample.d}, similarity d={f.d}")
    feats = similarity_matrix(f, sample.points, landmarks.points)
    return EmbeddedSample(features=feats, labels=sample.labels.copy())


def save_landmarks(landmarks: LandmarkSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i+1}" for i in range(landmarks.d)])
        for row in landmarks.points:
            writer.writerow([f"{v:.17g}" for v in row])


def load_landmarks(path, source: str = "user-provided") -> LandmarkSet:
    """Load landmark points; a header row is detected and skipped if present."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise UsageError(f"{path}: empty landmark file")
    start = 0
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        start = 1
    pts = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if len(row) != len(rows[start]):
            raise UsageError(f"{path}: line {lineno}: ragged row")
        try:
            pts.append([float(v) for v in row])
        except ValueError as exc:
            raise UsageError(f"{path}: line {lineno}: {exc}") from exc
    if not pts:
        raise UsageError(f"{path}: no landmark rows")
    points = np.array(pts, dtype=float)
    mx = float(np.linalg.norm(points, axis=1).max())
    if mx > 1.0 + _BALL_TOL:
        points /= mx
        warnings.warn(
            UnitBallRescaleWarning(
                f"{path}: max landmark norm {mx} exceeds 1; rescaled by {1.0 / mx}",
                scale=1.0 / mx,
            ),
            stacklevel=2,
        )
    return LandmarkSet(points=points, source=source)
