"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written the slow, obvious way (plain loops,
exhaustive enumeration, full grids) and avoids the package's vectorized
code paths, so agreement is meaningful.
"""

import itertools
import math

import numpy as np


def grid_min_hinge(features, labels, gamma, step=1e-3, chunk_rows=100):
    """Full-grid minimum of the mean hinge over the L1 ball (d_u <= 2).

    The grid places points every ``step`` per coordinate across the whole
    ball's bounding box and keeps only feasible candidates.
    """
    n, m = features.shape
    r = 1.0 / gamma
    P = labels[:, None] * features
    count = int(round(2 * r / step)) + 1
    axis = np.linspace(-r, r, count)
    if m == 1:
        marg = axis[:, None] @ P.T
        return float(np.maximum(0.0, 1.0 - marg).mean(axis=1).min())
    if m != 2:
        raise ValueError("full grid oracle only supports 1 or 2 coefficients")
    best = math.inf
    for i0 in range(0, count, chunk_rows):
        a0 = axis[i0 : i0 + chunk_rows]
        A0, A1 = np.meshgrid(a0, axis, indexing="ij")
        cand = np.stack([A0.ravel(), A1.ravel()], axis=1)
        cand = cand[np.abs(cand).sum(axis=1) <= r + 1e-12]
        if len(cand):
            obj = np.maximum(0.0, 1.0 - cand @ P.T).mean(axis=1)
            best = min(best, float(obj.min()))
    return best


def vertex_min_hinge(features, labels, gamma):
    """Exact minimum of the mean hinge over the L1 ball.

    The objective is convex piecewise-linear, so some minimizer lies at an
    intersection of d_u independent hyperplanes drawn from the hinge kinks
    (margin = 1) and the ball facets; enumerate them all plus the origin.
    """
    n, m = features.shape
    r = 1.0 / gamma
    P = labels[:, None] * features
    rows = [(P[i], 1.0) for i in range(n)]
    for s in itertools.product((-1.0, 1.0), repeat=m):
        rows.append((np.array(s), r))
    combos = list(itertools.combinations(range(len(rows)), m))
    A = np.array([[rows[i][0] for i in combo] for combo in combos])
    b = np.array([[rows[i][1] for i in combo] for combo in combos])
    dets = np.linalg.det(A)
    ok = np.abs(dets) > 1e-12
    cands = [np.zeros(m)]
    if ok.any():
        sols = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
        sols = sols[np.abs(sols).sum(axis=1) <= r + 1e-9]
        cands.extend(sols)
    C = np.array(cands)
    return float(np.maximum(0.0, 1.0 - C @ P.T).mean(axis=1).min())


def similarity_value(family, A, sigma, x, y):
    """Per-pair similarity via plain Python loops (no numpy linear algebra)."""
    d = len(x)
    if family == "k2":
        total = 0.0
        for i in range(d):
            for j in range(d):
                total += x[i] * A[i][j] * y[j]
        return total
    q = 0.0
    for i in range(d):
        for j in range(d):
            q += (x[i] - y[i]) * A[i][j] * (x[j] - y[j])
    if family == "k1":
        return 1.0 - q
    return math.exp(-q / (2.0 * sigma * sigma))


def goodness_bruteforce(points, labels, mask, family, A, sigma, gamma):
    """Direct double loop over the goodness expression; returns (eps_hat, tau_hat)."""
    n = len(points)
    reasonable = [i for i in range(n) if mask[i]]
    total = 0.0
    for i in range(n):
        g = 0.0
        for j in reasonable:
            g += labels[j] * similarity_value(family, A, sigma, points[i], points[j])
        g /= len(reasonable)
        total += max(0.0, 1.0 - labels[i] * g / gamma)
    return total / n, len(reasonable) / n


def spectral_norm_2x2(A):
    """Closed-form largest singular value of a 2x2 matrix."""
    (a, b), (c, d) = A
    t = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = max(0.0, t * t - 4.0 * det * det)
    return math.sqrt((t + math.sqrt(disc)) / 2.0)
