import numpy as np
import pytest

from hugkit.core.exceptions import InvalidInputError, NonFiniteError
from hugkit.models.proxy_set import ProxySet, ProxyStrategy
from hugkit.schemas.loss import LossSpec, LossVariant
from hugkit.schemas.optim import OptimConfig, ScheduleKind, StepSchedule
from hugkit.services.energy_service import average_energy
from hugkit.services.geometry_service import sample_gaussian_sphere
from hugkit.services.gnc_service import etf_deviation
from hugkit.services.losses import compute_loss
from hugkit.services.optim_service import default_energy_config, minimize_energy, pgd_step, run
from hugkit.services.oracle_service import etf_energy

from conftest import make_state


class TestStepSchedule:
    def test_constant(self):
        schedule = StepSchedule(kind=ScheduleKind.CONSTANT)
        assert schedule.step_at(0.5, 999, 1000) == 0.5

    def test_milestones(self):
        schedule = StepSchedule(milestones=[0.5, 0.8], factor=0.1)
        assert schedule.step_at(1.0, 49, 100) == 1.0
        assert schedule.step_at(1.0, 50, 100) == pytest.approx(0.1)
        assert schedule.step_at(1.0, 80, 100) == pytest.approx(0.01)

    def test_every_k(self):
        schedule = StepSchedule(every_k=10, factor=0.5)
        assert schedule.step_at(1.0, 25, 100) == pytest.approx(0.25)


class TestPgdStep:
    def test_rows_stay_on_the_sphere(self, small_state):
        grad = np.ones_like(small_state.X)
        moved, _ = pgd_step(small_state, grad, np.ones_like(small_state.W), OptimConfig(step_size=0.3))
        np.testing.assert_allclose(np.linalg.norm(moved.X, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(moved.W, axis=1), 1.0, atol=1e-12)

    def test_untouched_proxies(self, small_state):
        moved, _ = pgd_step(small_state, np.ones_like(small_state.X), None, OptimConfig())
        np.testing.assert_array_equal(moved.W, small_state.W)

    def test_momentum_accumulates(self, small_state):
        cfg = OptimConfig(step_size=0.1, momentum=0.5)
        grad = 0.01 * np.ones_like(small_state.X)
        _, velocity = pgd_step(small_state, grad, None, cfg)
        _, velocity = pgd_step(small_state, grad, None, cfg, velocity=velocity)
        np.testing.assert_allclose(velocity[0], 1.5 * grad)

    def test_displacement_clip(self, small_state):
        cfg = OptimConfig(step_size=1.0, max_displacement=1e-3)
        grad = 10.0 * np.ones_like(small_state.X)
        moved, _ = pgd_step(small_state, grad, None, cfg)
        assert np.max(np.linalg.norm(moved.X - small_state.X, axis=1)) <= 1.001e-3

    def test_non_finite_update(self, small_state):
        grad = np.full_like(small_state.X, np.inf)
        with pytest.raises(NonFiniteError):
            pgd_step(small_state, grad, None, OptimConfig())


class TestRun:
    def test_records_on_cadence(self, small_state):
        cfg = OptimConfig(max_iters=20, record_every=5)
        outcome = run(small_state, LossSpec(), cfg)
        assert [r.iteration for r in outcome.trajectory.records] == [0, 5, 10, 15, 20]
        assert outcome.iterations == 20
        assert not outcome.converged

    def test_line_search_is_monotone(self):
        state = make_state(3, 5, 2, seed=1)
        cfg = OptimConfig(step_size=1.0, max_iters=60, record_every=1, line_search=True,
                          schedule=StepSchedule(kind=ScheduleKind.CONSTANT))
        outcome = run(state, LossSpec(variant=LossVariant.CE), cfg)
        losses = [r.loss for r in outcome.trajectory.records]
        assert all(b <= a for a, b in zip(losses, losses[1:]))
        assert losses[-1] < losses[0]

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_line_search_compares_under_one_draw(self, seed):
        state = make_state(3, 4, 3, seed=seed)
        spec = LossSpec(variant=LossVariant.PF_HUG_RELAXED, seed=seed)
        cfg = OptimConfig(step_size=1.0, max_iters=1, record_every=1, line_search=True,
                          schedule=StepSchedule(kind=ScheduleKind.CONSTANT))
        outcome = run(state, spec, cfg)
        assert outcome.iterations == 1
        start = outcome.trajectory.records[0].loss
        assert compute_loss(outcome.final_state, spec, 0).value <= start
        assert outcome.final_loss == compute_loss(outcome.final_state, spec, 1).value

    def test_static_proxies_do_not_move(self, small_state):
        ps = ProxySet(base=small_state.proxies, strategy=ProxyStrategy.STATIC_RANDOM)
        outcome = run(small_state, LossSpec(), OptimConfig(max_iters=10), proxy_set=ps)
        np.testing.assert_array_equal(outcome.final_state.W, small_state.W)
        assert not np.array_equal(outcome.final_state.X, small_state.X)

    def test_proxy_energy_is_recorded(self, small_state):
        ps = ProxySet(base=small_state.proxies, strategy=ProxyStrategy.STATIC_RANDOM)
        outcome = run(small_state, LossSpec(), OptimConfig(max_iters=10, record_every=5), proxy_set=ps)
        expected = average_energy(small_state.proxies, 2.0)
        energies = [r.proxy_energy for r in outcome.trajectory.records]
        np.testing.assert_allclose(energies, [expected] * 3, rtol=1e-12)
        assert outcome.trajectory.to_frame().columns[-1] == "proxy_energy"

    def test_partially_learnable_proxies_rotate_rigidly(self, small_state):
        ps = ProxySet(base=small_state.proxies, strategy=ProxyStrategy.PARTIALLY_LEARNABLE)
        outcome = run(small_state, LossSpec(), OptimConfig(max_iters=10), proxy_set=ps)
        w = outcome.final_state.W
        np.testing.assert_allclose(w @ w.T, small_state.W @ small_state.W.T, atol=1e-10)
        assert np.any(outcome.proxy_set.rotation_params != 0)

    def test_gnc_snapshots(self, small_state):
        cfg = OptimConfig(max_iters=10, record_every=5)
        outcome = run(small_state, LossSpec(), cfg, gnc_every=10)
        records = outcome.trajectory.records
        assert records[0].gnc is not None
        assert records[1].gnc is None
        assert records[2].gnc is not None
        assert "acme" in outcome.trajectory.to_frame().columns

    def test_variant_must_match_state_kind(self, small_state):
        with pytest.raises(InvalidInputError):
            run(small_state, LossSpec(variant=LossVariant.UNNORMALIZED_HUG), OptimConfig(max_iters=1))

    def test_unnormalized_run(self, raw_state):
        outcome = run(raw_state, LossSpec(variant=LossVariant.UNNORMALIZED_HUG),
                      OptimConfig(max_iters=20, step_size=0.05, line_search=True))
        assert outcome.final_loss <= outcome.trajectory.records[0].loss

    def test_converges_on_tolerance(self):
        state = make_state(2, 3, 2, seed=3)
        cfg = OptimConfig(step_size=0.5, max_iters=5000, grad_tol=1e-3, line_search=True,
                          schedule=StepSchedule(kind=ScheduleKind.CONSTANT))
        outcome = run(state, LossSpec(variant=LossVariant.CE), cfg)
        assert outcome.converged
        assert outcome.iterations < 5000


class TestMinimizeEnergy:
    def test_triangle(self):
        minimum = minimize_energy(3, 2, 2.0, default_energy_config(seed=0, restarts=2))
        assert minimum.energy == pytest.approx(2.0, abs=1e-8)
        assert len(minimum.energies) == 2
        assert minimum.energy == min(minimum.energies)

    def test_tetrahedron(self):
        minimum = minimize_energy(4, 3, 2.0, default_energy_config(seed=1, restarts=2))
        assert minimum.energy == pytest.approx(etf_energy(4, 2.0), rel=1e-8)
        assert etf_deviation(minimum.config) < 1e-4

    def test_reproducible(self):
        cfg = default_energy_config(seed=3, restarts=3)
        assert minimize_energy(5, 3, 1.0, cfg).energies == minimize_energy(5, 3, 1.0, cfg).energies

    def test_needs_two_points(self):
        with pytest.raises(InvalidInputError):
            minimize_energy(1, 3, 2.0)

    def test_negative_exponent_spreads_points(self):
        minimum = minimize_energy(2, 3, -1.0, default_energy_config(seed=0, restarts=1))
        assert minimum.energy == pytest.approx(-4.0, abs=1e-8)
