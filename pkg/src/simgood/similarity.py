"""Parameterized similarity families and their analytic Lipschitz constants.

Three families over points in the unit L2 ball, each parameterized by a
square matrix ``A`` (no symmetry or positive-definiteness is required):

* ``k1`` (affine Mahalanobis):  K(x, y) = 1 - (x-y)^T A (x-y)
* ``k2`` (bilinear):            K(x, y) = x^T A y
* ``k3`` (exponential):         K(x, y) = exp(-(x-y)^T A (x-y) / (2 sigma^2))

Each family carries a closed-form Lipschitz constant in its first argument,
scaled by the spectral norm of ``A``:

* ``k1``: 4 * ||A||_2
* ``k2``: ||A||_2
* ``k3``: (2 ||A||_2 / sigma^2) * (exp(1/(2 sigma^2)) - exp(-1/(2 sigma^2)))

Values are nominally in [-1, 1]; large ``||A||_2`` can push the families
outside that range, which ``validate_range`` reports (never clamps --
clamping would invalidate the constants above).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, UsageError

FAMILIES = ("k1", "k2", "k3")

_SPECTRAL_TOL = 1e-10
_SPECTRAL_MAX_ITER = 10_000


def _as_square_matrix(A) -> np.ndarray:
    M = np.array(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise UsageError(f"parameter matrix must be square 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise UsageError("parameter matrix contains non-finite entries")
    M.flags.writeable = False
    return M


@dataclass(frozen=True, eq=False)
class SimilarityFunction:
    """One of the three similarity families plus its parameters.

    ``sigma`` is the bandwidth of the exponential family and is required
    (and only meaningful) when ``family == "k3"``.
    """

    family: str
    A: np.ndarray
    sigma: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UsageError(f"unknown similarity family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "A", _as_square_matrix(self.A))
        if self.family == "k3":
            if self.sigma is None or not math.isfinite(self.sigma) or self.sigma <= 0:
                raise UsageError(f"family k3 requires sigma > 0, got {self.sigma!r}")
            object.__setattr__(self, "sigma", float(self.sigma))
        else:
            object.__setattr__(self, "sigma", None)

    @property
    def d(self) -> int:
        return self.A.shape[0]


def mahalanobis_similarity(A) -> SimilarityFunction:
    """K(x, y) = 1 - (x-y)^T A (x-y)."""
    return SimilarityFunction("k1", A)


def bilinear_similarity(A) -> SimilarityFunction:
    """K(x, y) = x^T A y."""
    return SimilarityFunction("k2", A)


def exponential_similarity(A, sigma: float) -> SimilarityFunction:
    """K(x, y) = exp(-(x-y)^T A (x-y) / (2 sigma^2))."""
    return SimilarityFunction("k3", A, sigma)


def _check_dim(f: SimilarityFunction, *vecs: np.ndarray) -> None:
    for v in vecs:
        if v.shape[-1] != f.d:
            raise UsageError(f"dimension mismatch: similarity expects d={f.d}, got {v.shape[-1]}")


def _row_quadratic(U: np.ndarray, A: np.ndarray) -> np.ndarray:
    # u_i^T A u_i for each row u_i
    return np.einsum("ij,jk,ik->i", U, A, U)


def eval_similarity(f: SimilarityFunction, x, x2) -> float:
    """Evaluate K(x, x2) for a single pair of points."""
    x = np.asarray(x, dtype=float).reshape(-1)
    x2 = np.asarray(x2, dtype=float).reshape(-1)
    if x.shape[0] != x2.shape[0]:
        raise UsageError(f"dimension mismatch between inputs: {x.shape[0]} vs {x2.shape[0]}")
    _check_dim(f, x, x2)
    if f.family == "k2":
        val = float(x @ f.A @ x2)
    else:
        u = x - x2
        q = float(u @ f.A @ u)
        if f.family == "k1":
            val = 1.0 - q
        else:
            try:
                val = math.exp(-q / (2.0 * f.sigma**2))
            except OverflowError:
                raise NumericError(
                    f"similarity overflowed: exp({-q / (2.0 * f.sigma**2)})"
                ) from None
    if not math.isfinite(val):
        raise NumericError(f"similarity value is not finite ({val!r})", last_value=val)
    return val


def eval_similarity_rows(f: SimilarityFunction, X, X2) -> np.ndarray:
    """Row-paired evaluation: result[i] = K(X[i], X2[i])."""
    X = np.asarray(X, dtype=float)
    X2 = np.asarray(X2, dtype=float)
    if X.shape != X2.shape or X.ndim != 2:
        raise UsageError(f"row-paired evaluation needs equal 2-D shapes, got {X.shape} vs {X2.shape}")
    _check_dim(f, X)
    if f.family == "k2":
        return np.einsum("ij,jk,ik->i", X, f.A, X2)
    q = _row_quadratic(X - X2, f.A)
    if f.family == "k1":
        return 1.0 - q
    with np.errstate(over="ignore"):  # inf is reported/raised downstream
        return np.exp(-q / (2.0 * f.sigma**2))


def similarity_matrix(f: SimilarityFunction, points, landmarks) -> np.ndarray:
    """All-pairs evaluation: result[i, j] = K(points[i], landmarks[j])."""
    X = np.asarray(points, dtype=float)
    L = np.asarray(landmarks, dtype=float)
    if X.ndim != 2 or L.ndim != 2:
        raise UsageError("points and landmarks must be 2-D arrays")
    _check_dim(f, X, L)
    A = f.A
    if f.family == "k2":
        return X @ A @ L.T
    # (x-l)^T A (x-l) expanded so asymmetric A is handled exactly
    qx = _row_quadratic(X, A)
    ql = _row_quadratic(L, A)
    D = qx[:, None] - X @ (A + A.T) @ L.T + ql[None, :]
    if f.family == "k1":
        return 1.0 - D
    with np.errstate(over="ignore"):  # inf is reported/raised downstream
        return np.exp(-D / (2.0 * f.sigma**2))


def spectral_norm(A, tol: float = _SPECTRAL_TOL, max_iter: int = _SPECTRAL_MAX_ITER) -> float:
    """Largest singular value of ``A`` by power iteration on A^T A.

    The start vector is fixed (normalized all-ones plus a small ramp) so
    results are reproducible run to run; the ramp keeps the start from being
    exactly orthogonal to the top singular direction for common structured
    matrices (e.g. [[2,-1],[-1,2]], whose top eigenvector is (1,-1)).
    Rayleigh-quotient based, so the estimate never exceeds the true value.
    Stopping uses the geometric decay of the iterate diffs to bound the
    error left behind. Nearly coalescing top singular values converge to
    the shared value; an isolated pair with relative gap below ~1e-3 can
    need more than the default max_iter and then raises NumericError.
    """
    A = _as_square_matrix(A)
    if tol <= 0:
        raise UsageError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise UsageError(f"max_iter must be >= 1, got {max_iter}")
    d = A.shape[0]
    if not A.any():
        return 0.0

    v = np.ones(d) + 1e-3 * np.linspace(0.0, 1.0, d)
    v /= np.linalg.norm(v)
    restarts = iter(range(d))
    s_prev = None
    diff_prev = None
    s = 0.0
    for _ in range(max_iter):
        w = A @ v
        s = math.sqrt(float(w @ w))  # Rayleigh quotient of A^T A at unit v
        if s_prev is not None:
            diff = abs(s - s_prev)
            if diff <= 4e-16 * s:
                return s
            # the error left behind is ~ diff * q / (1 - q) where q is the
            # geometric decay of the diffs; stop once that estimate is small
            if diff_prev is not None and diff < diff_prev:
                q = diff / diff_prev
                if diff * q / (1.0 - q) <= tol * max(s, 1e-300):
                    return s
            diff_prev = diff
        s_prev = s
        u = A.T @ w
        nu = np.linalg.norm(u)
        if nu == 0.0:
            # start landed in the null space of A^T A; fall back to basis vectors
            try:
                k = next(restarts)
            except StopIteration:
                return 0.0
            v = np.zeros(d)
            v[k] = 1.0
            s_prev = None
            diff_prev = None
            continue
        v = u / nu
    raise NumericError(
        f"spectral norm did not converge within {max_iter} iterations (last estimate {s})",
        last_value=s,
    )


def lipschitz_constant(f: SimilarityFunction) -> float:
    """Analytic Lipschitz constant of the family w.r.t. its first argument."""
    s = spectral_norm(f.A)
    if f.family == "k1":
        return 4.0 * s
    if f.family == "k2":
        return s
    sig2 = f.sigma**2
    return (2.0 * s / sig2) * (math.exp(1.0 / (2.0 * sig2)) - math.exp(-1.0 / (2.0 * sig2)))


@dataclass(frozen=True)
class RangeReport:
    """Min/max similarity over a sample x landmark grid and whether [-1, 1] holds."""

    min_value: float
    max_value: float
    violated: bool
    tol: float = 1e-9

    def to_json(self) -> dict:
        return {
            "min_value": self.min_value,
            "max_value": self.max_value,
            "violated": self.violated,
            "tol": self.tol,
        }


def validate_range(f: SimilarityFunction, sample, landmarks, tol: float = 1e-9) -> RangeReport:
    """Report the similarity range over all sample x landmark pairs.

    Violations of [-1, 1] (beyond a small numeric slack) are reported, never
    raised and never clamped. Non-finite values (e.g. exponential overflow
    with an indefinite matrix) show up as an infinite max and a violation.
    """
    S = similarity_matrix(f, sample.points, landmarks.points)
    mn = float(np.min(S)) if S.size else math.nan
    mx = float(np.max(S)) if S.size else math.nan
    violated = bool(S.size) and (mn < -1.0 - tol or mx > 1.0 + tol or not np.all(np.isfinite(S)))
    return RangeReport(min_value=mn, max_value=mx, violated=violated, tol=tol)


@dataclass(frozen=True)
class LipschitzAudit:
    """Result of a randomized audit of the analytic Lipschitz constant."""

    family: str
    analytic_l: float
    max_ratio: float
    n_triples: int
    seed: int
    within_bound: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "within_bound", self.max_ratio <= self.analytic_l + 1e-9)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "analytic_l": self.analytic_l,
            "max_ratio": self.max_ratio,
            "n_triples": self.n_triples,
            "seed": self.seed,
            "within_bound": self.within_bound,
        }


def sample_unit_ball(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """n points drawn uniformly from the unit L2 ball in R^d."""
    u = rng.standard_normal((n, d))
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    r = rng.uniform(0.0, 1.0, n) ** (1.0 / d)
    return u / norms * r[:, None]


def lipschitz_audit(f: SimilarityFunction, n_triples: int, rng_seed: int) -> LipschitzAudit:
    """Probe |K(x, z) - K(y, z)| / ||x - y|| on random unit-ball triples.

    Returns the largest observed ratio next to the analytic constant; the
    audit can only ever find violations, not certify the constant.
    """
    if n_triples < 1:
        raise UsageError(f"n_triples must be >= 1, got {n_triples}")
    rng = np.random.default_rng(rng_seed)
    d = f.d
    X = sample_unit_ball(rng, n_triples, d)
    Y = sample_unit_ball(rng, n_triples, d)
    Z = sample_unit_ball(rng, n_triples, d)
    kx = eval_similarity_rows(f, X, Z)
    ky = eval_similarity_rows(f, Y, Z)
    if not (np.all(np.isfinite(kx)) and np.all(np.isfinite(ky))):
        raise NumericError("similarity overflowed to a non-finite value during the audit")
    dist = np.linalg.norm(X - Y, axis=1)
    mask = dist > 0
    ratios = np.abs(kx[mask] - ky[mask]) / dist[mask]
    return LipschitzAudit(
        family=f.family,
        analytic_l=lipschitz_constant(f),
        max_ratio=float(ratios.max()) if ratios.size else 0.0,
        n_triples=n_triples,
        seed=rng_seed,
    )


def similarity_to_json(f: SimilarityFunction) -> dict:
    d = f.d
    out = {"family": f.family, "A": {"d": d, "entries": [float(v) for v in f.A.ravel()]}}
    if f.family == "k3":
        out["sigma"] = f.sigma
    return out


def similarity_from_json(obj: dict) -> SimilarityFunction:
    try:
        family = obj["family"]
        mat = obj["A"]
        d = int(mat["d"])
        entries = mat["entries"]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed similarity JSON: missing {exc}") from exc
    if len(entries) != d * d:
        raise UsageError(f"similarity JSON: expected {d*d} matrix entries, got {len(entries)}")
    A = np.array(entries, dtype=float).reshape(d, d)
    sigma = obj.get("sigma")
    return SimilarityFunction(family, A, sigma)


def save_similarity(f: SimilarityFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(similarity_to_json(f), fh, indent=2)
        fh.write("\n")


def load_similarity(path) -> SimilarityFunction:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    return similarity_from_json(obj)
