import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from simgood import (
    LabeledSample,
    LandmarkSet,
    UnitBallRescaleWarning,
    UsageError,
    bilinear_similarity,
    draw_landmarks,
    embed,
    exponential_similarity,
    landmark_count,
    load_landmarks,
    mahalanobis_similarity,
    save_landmarks,
    validate_range,
)


class TestLandmarkCount:
    def test_hand_value_779(self):
        assert landmark_count(0.5, 0.5, 1.0, 0.1) == 779

    def test_hand_value_79(self):
        assert landmark_count(1.0, 1.0, 1.0, 0.2) == 79

    def test_admissibility_boundary_rejected(self):
        with pytest.raises(UsageError, match="gamma\\*eps1/4"):
            landmark_count(0.5, 0.5, 1.0, 0.2)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(tau=0.0, eps1=1.0, gamma=1.0, delta=0.1),
            dict(tau=1.5, eps1=1.0, gamma=1.0, delta=0.1),
            dict(tau=0.5, eps1=-1.0, gamma=1.0, delta=0.1),
            dict(tau=0.5, eps1=1.0, gamma=0.0, delta=0.1),
            dict(tau=0.5, eps1=1.0, gamma=1.0, delta=0.0),
        ],
    )
    def test_domain_errors(self, kwargs):
        with pytest.raises(UsageError):
            landmark_count(**kwargs)

    admissible = st.tuples(
        st.floats(0.05, 1.0),  # tau
        st.floats(0.1, 4.0),   # eps1
        st.floats(0.1, 4.0),   # gamma
        st.floats(1e-4, 0.5),  # delta
    )

    @given(admissible, st.floats(1.0, 3.0))
    @settings(max_examples=120, deadline=None)
    def test_monotone_nonincreasing_in_each_parameter(self, params, factor):
        tau, eps1, gamma, delta = params
        assume(delta < gamma * eps1 / 4)
        base = landmark_count(tau, eps1, gamma, delta)
        grown = {
            "tau": (min(1.0, tau * factor), eps1, gamma, delta),
            "eps1": (tau, eps1 * factor, gamma, delta),
            "gamma": (tau, eps1, gamma * factor, delta),
            "delta": (tau, eps1, gamma, delta * factor),
        }
        for name, (t, e, g, dl) in grown.items():
            assume(dl < g * e / 4)
            assert landmark_count(t, e, g, dl) <= base, f"not monotone in {name}"


class TestDrawLandmarks:
    def test_single_point_sample_repeats(self):
        sample = LabeledSample(np.array([[0.2, 0.4]]), np.array([1]))
        lms = draw_landmarks(sample, 3, rng_seed=0)
        assert lms.d_u == 3
        np.testing.assert_array_equal(lms.points, np.tile([[0.2, 0.4]], (3, 1)))

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(-0.5, 0.5, (30, 3))
        sample = LabeledSample(pts, np.where(rng.random(30) < 0.5, -1, 1))
        a = draw_landmarks(sample, 10, rng_seed=7)
        b = draw_landmarks(sample, 10, rng_seed=7)
        np.testing.assert_array_equal(a.points, b.points)
        c = draw_landmarks(sample, 10, rng_seed=8)
        assert not np.array_equal(a.points, c.points)

    def test_bootstrap_membership(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(-0.5, 0.5, (25, 2))
        sample = LabeledSample(pts, np.ones(25, dtype=int))
        lms = draw_landmarks(sample, 25, rng_seed=3)
        rows = {tuple(r) for r in pts}
        assert all(tuple(r) in rows for r in lms.points)
        assert lms.source == "sampled"

    def test_errors(self):
        sample = LabeledSample(np.array([[0.1]]), np.array([1]))
        with pytest.raises(UsageError):
            draw_landmarks(sample, 0, rng_seed=0)
        empty = LabeledSample(np.empty((0, 1)), np.empty(0, dtype=int))
        with pytest.raises(UsageError):
            draw_landmarks(empty, 2, rng_seed=0)


class TestEmbed:
    def test_k3_self_landmark_gives_one(self):
        pts = np.array([[0.3, 0.1], [-0.2, 0.5]])
        sample = LabeledSample(pts, np.array([1, -1]))
        lms = LandmarkSet(pts[0:1].copy(), source="user-provided")
        f = exponential_similarity(np.array([[1.0, 0.2], [0.0, 2.0]]), 0.8)
        emb = embed(sample, lms, f)
        assert emb.features[0, 0] == 1.0

    def test_k2_identity_gives_dot_products(self):
        rng = np.random.default_rng(4)
        pts = rng.uniform(-0.4, 0.4, (6, 3))
        sample = LabeledSample(pts, np.ones(6, dtype=int))
        lms = LandmarkSet(rng.uniform(-0.4, 0.4, (4, 3)), source="user-provided")
        emb = embed(sample, lms, bilinear_similarity(np.eye(3)))
        np.testing.assert_allclose(emb.features, pts @ lms.points.T, atol=1e-12)

    def test_k1_hand_table(self):
        sample = LabeledSample(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([1, -1]))
        lms = LandmarkSet(np.array([[0.0, 0.0], [0.5, 0.0]]), source="user-provided")
        emb = embed(sample, lms, mahalanobis_similarity(np.eye(2)))
        np.testing.assert_allclose(
            emb.features, np.array([[0.0, 0.75], [0.0, -0.25]]), atol=1e-12
        )
        np.testing.assert_array_equal(emb.labels, [1, -1])

    def test_landmark_permutation_permutes_columns(self):
        rng = np.random.default_rng(5)
        sample = LabeledSample(rng.uniform(-0.4, 0.4, (8, 2)), np.ones(8, dtype=int))
        base = rng.uniform(-0.4, 0.4, (5, 2))
        perm = rng.permutation(5)
        f = exponential_similarity(np.eye(2), 0.6)
        emb1 = embed(sample, LandmarkSet(base, source="user-provided"), f)
        emb2 = embed(sample, LandmarkSet(base[perm], source="user-provided"), f)
        np.testing.assert_array_equal(emb1.features[:, perm], emb2.features)

    def test_embedded_values_respect_range_validation(self):
        rng = np.random.default_rng(6)
        sample = LabeledSample(rng.uniform(-0.3, 0.3, (20, 2)), np.ones(20, dtype=int))
        lms = draw_landmarks(sample, 6, rng_seed=1)
        f = bilinear_similarity(np.eye(2))
        emb = embed(sample, lms, f)
        report = validate_range(f, sample, lms)
        assert not report.violated
        assert emb.features.min() >= report.min_value - 1e-15
        assert emb.features.max() <= report.max_value + 1e-15

    def test_dimension_mismatch(self):
        sample = LabeledSample(np.array([[0.1, 0.2]]), np.array([1]))
        lms = LandmarkSet(np.array([[0.1, 0.2, 0.3]]), source="user-provided")
        with pytest.raises(UsageError):
            embed(sample, lms, bilinear_similarity(np.eye(2)))
        lms2 = LandmarkSet(np.array([[0.1, 0.2]]), source="user-provided")
        with pytest.raises(UsageError):
            embed(sample, lms2, bilinear_similarity(np.eye(3)))


class TestLandmarkIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        lms = LandmarkSet(rng.uniform(-0.5, 0.5, (9, 3)), source="sampled")
        path = tmp_path / "landmarks.csv"
        save_landmarks(lms, path)
        loaded = load_landmarks(path)
        np.testing.assert_array_equal(loaded.points, lms.points)
        assert loaded.source == "user-provided"

    def test_load_rescales_out_of_ball_points(self, tmp_path):
        path = tmp_path / "big.csv"
        path.write_text("f1,f2\n2,0\n0,1\n")
        with pytest.warns(UnitBallRescaleWarning):
            loaded = load_landmarks(path)
        np.testing.assert_allclose(loaded.points, [[1.0, 0.0], [0.0, 0.5]])

    def test_invariants(self):
        with pytest.raises(UsageError):
            LandmarkSet(np.array([[2.0, 0.0]]))
        with pytest.raises(UsageError):
            LandmarkSet(np.empty((0, 2)))
        with pytest.raises(UsageError):
            LandmarkSet(np.array([[0.1, 0.1]]), source="other")
