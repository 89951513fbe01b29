"""Registration driver: fixed points, termination, errors, determinism."""

import numpy as np
import pytest

from mvndt.geometry import RigidTransform, apply_many, compose, invert, so3_exp
from mvndt.io import PointSet
from mvndt.metrics import error_report, rotation_error, translation_error
from mvndt.registration import (
    RegistrationConfig,
    RegistrationError,
    default_k,
    register,
)
from mvndt.synthetic import make_scene


def _cloud(seed, n=400):
    return np.random.default_rng(seed).uniform(-1, 1, (n, 3))


def _identity(count):
    return [RigidTransform.identity() for _ in range(count)]


class TestConfig:
    def test_defaults(self):
        cfg = RegistrationConfig()
        assert cfg.max_iterations == 300
        assert cfg.likelihood_tolerance == 1e-6
        assert cfg.epsilon_reg == 1e-6
        assert cfg.k_override is None

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iterations": 0},
            {"likelihood_tolerance": 0.0},
            {"epsilon_reg": -1.0},
            {"k_override": 0},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            RegistrationConfig(**kwargs)


class TestDefaultK:
    def test_override(self):
        sets = [PointSet("a", _cloud(0)), PointSet("b", _cloud(1))]
        assert default_k(sets, RegistrationConfig(k_override=500)) == 500

    def test_rule(self):
        sets = [PointSet(str(i), np.zeros((2000, 3)) + 1) for i in range(10)]
        assert default_k(sets, RegistrationConfig()) == 1250


class TestRegister:
    def test_identical_scans_stay_at_identity(self):
        pts = _cloud(2, 600)
        sets = [PointSet("a", pts), PointSet("b", pts.copy())]
        transforms, state = register(sets, _identity(2))
        angle = rotation_error(transforms, _identity(2))
        shift = translation_error(transforms, _identity(2))
        assert angle <= 1e-6
        assert shift <= 1e-6
        assert state.iteration >= 1

    def test_single_iteration_bound(self):
        pts = _cloud(3, 500)
        sets = [PointSet("a", pts), PointSet("b", pts + 0.01)]
        _, state = register(sets, _identity(2), RegistrationConfig(max_iterations=1))
        assert state.iteration == 1
        assert len(state.likelihood_trace) == 1
        assert len(state.records) == 1

    def test_reference_scan_bit_identical(self):
        rng = np.random.default_rng(4)
        pts = _cloud(5, 500)
        anchor = RigidTransform(so3_exp(rng.normal(size=3) * 0.2), rng.uniform(-1, 1, 3))
        sets = [PointSet("a", pts), PointSet("b", pts + 0.005)]
        initial = [anchor, RigidTransform.identity()]
        transforms, state = register(sets, initial, RegistrationConfig(max_iterations=5))
        assert transforms[0] is anchor
        np.testing.assert_array_equal(transforms[0].rotation, anchor.rotation)
        np.testing.assert_array_equal(transforms[0].translation, anchor.translation)

    def test_deterministic(self):
        scene = make_scene(3, 400, 0.02, 0.02, seed=21)
        cfg = RegistrationConfig(max_iterations=25)
        t1, s1 = register(scene.point_sets, scene.initial, cfg)
        t2, s2 = register(scene.point_sets, scene.initial, cfg)
        assert s1.likelihood_trace == s2.likelihood_trace
        for a, b in zip(t1, t2):
            np.testing.assert_array_equal(a.rotation, b.rotation)
            np.testing.assert_array_equal(a.translation, b.translation)

    def test_trace_and_records_aligned(self):
        scene = make_scene(3, 400, 0.01, 0.01, seed=22)
        _, state = register(scene.point_sets, scene.initial,
                            RegistrationConfig(max_iterations=8))
        assert len(state.likelihood_trace) == len(state.records) == state.iteration
        for i, record in enumerate(state.records, start=1):
            assert record.iteration == i
            assert record.log_likelihood == state.likelihood_trace[i - 1]
            assert record.step_norms[0] == 0.0
            assert len(record.step_norms) == 3
            assert record.valid_clusters > 0

    def test_frozen_models_within_iteration(self):
        # the models each scan optimizes against are the iteration's snapshot
        scene = make_scene(3, 300, 0.01, 0.01, seed=23)
        _, state = register(scene.point_sets, scene.initial,
                            RegistrationConfig(max_iterations=1))
        assert len(state.ndts) == default_k(scene.point_sets, RegistrationConfig())

    def test_multiview_recovery(self):
        """Four clean scans with small perturbations recover tightly."""
        scene = make_scene(4, 1500, 0.03, 0.0, seed=24)
        diag = scene.diagonal
        scene = make_scene(4, 1500, 0.03, 0.02 * diag, seed=24)
        transforms, _ = register(scene.point_sets, scene.initial)
        report = error_report(transforms, scene.ground_truth)
        assert report.rotation_error <= 0.005
        assert report.translation_error <= 0.005 * diag

    def test_rejects_single_scan(self):
        with pytest.raises(RegistrationError, match="at least 2"):
            register([PointSet("a", _cloud(6))], _identity(1))

    def test_rejects_count_mismatch(self):
        sets = [PointSet("a", _cloud(7)), PointSet("b", _cloud(8))]
        with pytest.raises(RegistrationError, match="initial transforms"):
            register(sets, _identity(3))

    def test_rejects_invalid_initial(self):
        sets = [PointSet("a", _cloud(9)), PointSet("b", _cloud(10))]
        bad = RigidTransform(np.eye(3) * 1.01, np.zeros(3))
        with pytest.raises(RegistrationError, match="rigid"):
            register(sets, [RigidTransform.identity(), bad])

    def test_reports_all_clusters_invalid(self):
        # six points, six clusters: every cluster holds one point
        pts = np.arange(18, dtype=float).reshape(6, 3)
        sets = [PointSet("a", pts[:3]), PointSet("b", pts[3:])]
        with pytest.raises(RegistrationError, match="invalid"):
            register(sets, _identity(2), RegistrationConfig(k_override=6))

    def test_reports_scan_without_valid_points(self):
        # the far scan's 5 points monopolize one centroid, so its only
        # cluster stays invalid while the near cluster is fine
        far = np.random.default_rng(12).uniform(-0.05, 0.05, (5, 3)) + 50.0
        near = _cloud(11, 20) * 0.1
        sets = [PointSet("faraway", far), PointSet("near", near)]
        with pytest.raises(RegistrationError, match="faraway"):
            register(sets, _identity(2), RegistrationConfig(k_override=2))

    def test_likelihood_terminates_before_cap(self):
        pts = _cloud(13, 800)
        sets = [PointSet("a", pts), PointSet("b", pts.copy())]
        _, state = register(sets, _identity(2), RegistrationConfig(max_iterations=300))
        assert state.iteration < 300
