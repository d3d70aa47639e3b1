import math

import numpy as np
import pytest

from finsler_engine.flows.base_flow import Trajectory, TrajectoryStatus, max_distance
from finsler_engine.flows.diagnostics import time_derivative
from finsler_engine.flows.extremal_flow import ExtremalFlow, n_extremal_flow
from finsler_engine.flows.geodesic_flow import GeodesicFlow, geodesic_flow
from finsler_engine.flows.normal import initial_conditions, normal_vector
from finsler_engine.flows.parallel_flow import ParallelFlow, n_parallel_flow


def start(x0, fiber):
    return np.concatenate((np.asarray(x0, dtype=float), np.asarray(fiber, dtype=float)))


def test_euclidean_parallel_is_straight(euclidean):
    trajectory = n_parallel_flow(euclidean, (0.0, 0.0), (0.0, 1.0), length=1.0, step=0.05)
    assert trajectory.status == TrajectoryStatus.COMPLETED
    assert len(trajectory) == 21
    assert np.allclose(trajectory.positions[:, 0], trajectory.times, atol=1e-12)
    assert np.allclose(trajectory.positions[:, 1], 0.0, atol=1e-12)
    assert trajectory.max_abs('k') < 1e-10
    assert trajectory.max_abs('sigma') == pytest.approx(1.0)


def test_step_is_adjusted_to_length(euclidean):
    flow = ParallelFlow(euclidean, length=1.0, step=0.3)
    assert flow.n_steps == 3
    assert flow.step == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        ParallelFlow(euclidean, length=-1.0, step=0.1)


def test_sphere_geodesic_matches_great_circle(sphere):
    x0 = (1.0, 0.5)
    T0 = sphere.normalize(x0, (0.6, 0.8))
    trajectory = geodesic_flow(sphere, x0, T0, length=1.0, step=0.01)
    expected = sphere.oracles.geodesic(x0, T0, trajectory.times)
    assert np.max(np.abs(trajectory.positions - expected)) < 1e-6
    assert trajectory.max_abs('indicatrix_drift') < 1e-12


def test_rk4_step_halving(sphere):
    x0 = (1.0, 0.5)
    T0 = sphere.normalize(x0, (0.6, 0.8))
    errors = []
    for step in (0.1, 0.05):
        flow = GeodesicFlow(sphere, length=1.0, step=step, renormalize=False)
        trajectory = flow.integrate(start(x0, T0))
        expected = sphere.oracles.geodesic(x0, T0, [trajectory.times[-1]])[0]
        errors.append(np.linalg.norm(trajectory.positions[-1] - expected))
    assert errors[0] / errors[1] >= 12.0


def test_riemannian_parallel_equals_geodesic(sphere):
    x0, T0, N0 = initial_conditions(sphere, (1.2, -0.3), T0=(0.3, 1.0))
    parallel = n_parallel_flow(sphere, x0, N0, length=1.0, step=0.01)
    geodesic = geodesic_flow(sphere, x0, T0, length=1.0, step=0.01)
    assert max_distance(parallel, geodesic) < 1e-6


@pytest.mark.slow
def test_riemannian_parallel_equals_geodesic_at_fine_step(sphere):
    x0, T0, N0 = initial_conditions(sphere, (1.2, -0.3), T0=(0.3, 1.0))
    parallel = n_parallel_flow(sphere, x0, N0, length=1.0, step=1e-3)
    geodesic = geodesic_flow(sphere, x0, T0, length=1.0, step=1e-3)
    assert max_distance(parallel, geodesic) < 1e-6


@pytest.mark.parametrize('step', [0.01, pytest.param(1e-3, marks=pytest.mark.slow)])
@pytest.mark.parametrize('name', ['sphere', 'randers'])
def test_parallel_equals_extremal_when_I1_vanishes(name, step, sphere, randers):
    surface = {'sphere': sphere, 'randers': randers}[name]
    x0 = (1.0, 0.2)
    N0 = surface.normalize(x0, (0.4, 1.0))
    parallel = ParallelFlow(surface, 1.0, step).integrate(start(x0, N0))
    extremal = ExtremalFlow(surface, 1.0, step).integrate(start(x0, N0))
    assert parallel.status == extremal.status == TrajectoryStatus.COMPLETED
    assert max_distance(parallel, extremal) < 1e-7


@pytest.mark.parametrize('name', ['euclidean', 'randers'])
def test_reversed_normal_gives_mirrored_curve(name, euclidean, randers):
    surface = {'euclidean': euclidean, 'randers': randers}[name]
    x0 = (0.3, -0.2)
    up = n_parallel_flow(surface, x0, (0.0, 1.0), length=1.0, step=0.05)
    down = n_parallel_flow(surface, x0, (0.0, -1.0), length=1.0, step=0.05)
    assert up.status == down.status == TrajectoryStatus.COMPLETED
    # σ > 0 翻轉行進方向，曲線對 x1 = x0[0] 鏡射
    assert np.allclose(down.positions[:, 0], 2.0 * x0[0] - up.positions[:, 0], atol=1e-10)
    assert np.allclose(down.positions[:, 1], up.positions[:, 1], atol=1e-10)
    assert down.positions[-1][0] < x0[0] < up.positions[-1][0]
    assert np.all(up.column('sigma') > 0.0)
    assert np.all(down.column('sigma') > 0.0)


def test_randers_mirrored_endpoints(randers):
    up = n_parallel_flow(randers, (0.0, 0.0), (0.0, 1.0), length=1.0, step=0.05)
    down = n_parallel_flow(randers, (0.0, 0.0), (0.0, -1.0), length=1.0, step=0.05)
    end_up, end_down = up.positions[-1], down.positions[-1]
    assert end_down[0] == pytest.approx(-end_up[0], abs=1e-10)
    assert end_down[1] == pytest.approx(end_up[1], abs=1e-10)
    # 漂移 b = (0.3, 0) 讓兩條曲線都往 x2 < 0 偏
    assert end_up[1] / end_up[0] == pytest.approx(-0.3, abs=1e-10)


@pytest.mark.parametrize('flow', [n_parallel_flow, n_extremal_flow])
def test_fiber_matches_normal_of_tangent(flow, nonberwald):
    step = 0.01
    x0 = (-0.5, 0.1)
    N0 = nonberwald.normalize(x0, (0.2, 1.0))
    trajectory = flow(nonberwald, x0, N0, length=1.0, step=step)
    assert trajectory.status == TrajectoryStatus.COMPLETED
    velocities = time_derivative(trajectory.positions, step)
    for s in range(0, len(trajectory), 10):
        sample = trajectory.samples[s]
        N = normal_vector(nonberwald, sample.x, velocities[s])
        assert np.max(np.abs(N - sample.fiber)) < 1e-6, sample.t


@pytest.mark.slow
def test_nonberwald_parallel_and_extremal_separate(nonberwald):
    step = 1e-3
    x0 = (-0.9, -0.9)
    N0 = nonberwald.normalize(x0, (-1.0, 1.0))
    parallel = ParallelFlow(nonberwald, 1.5, step).integrate(start(x0, N0))
    extremal = ExtremalFlow(nonberwald, 1.5, step).integrate(start(x0, N0))
    assert parallel.status == extremal.status == TrajectoryStatus.COMPLETED
    assert max_distance(parallel, extremal) > 10.0 * step


def test_cross_validation_gap(nonberwald):
    x0 = (-0.5, 0.1)
    N0 = nonberwald.normalize(x0, (0.2, 1.0))
    trajectory = n_parallel_flow(nonberwald, x0, N0, length=1.0, step=0.01, cross_validate=True)
    assert trajectory.status == TrajectoryStatus.COMPLETED
    assert trajectory.params['cross_validation_status'] == TrajectoryStatus.COMPLETED
    assert trajectory.params['cross_validation_gap'] < 1e-6


def test_chart_exit_truncates(euclidean):
    trajectory = n_parallel_flow(euclidean, (4.5, 0.0), (0.0, 1.0), length=1.0, step=0.05)
    assert trajectory.status == TrajectoryStatus.CHART_EXIT
    assert trajectory.aborted
    assert 0.45 - 1e-9 <= trajectory.samples[-1].t <= 0.5 + 1e-9
    assert trajectory.positions[-1][0] < 5.0
    assert 'chart_exit' in trajectory.status_line()


def test_extremal_degenerate_status(nonberwald):
    trajectory = n_extremal_flow(nonberwald, (0.0, 0.0), (0.0, 1.0), length=0.1, step=0.01,
                                 tol_degenerate=10.0)
    assert trajectory.status == TrajectoryStatus.EL_DEGENERATE
    assert 'EL degenerate' in trajectory.message
    assert len(trajectory) == 1


def test_renormalization_keeps_indicatrix(nonberwald):
    x0 = (0.0, 0.0)
    N0 = nonberwald.normalize(x0, (1.0, 1.0))
    trajectory = n_extremal_flow(nonberwald, x0, N0, length=0.2, step=0.02)
    assert trajectory.status == TrajectoryStatus.COMPLETED
    assert trajectory.max_abs('indicatrix_drift') < 1e-12
    assert trajectory.params['tol_degenerate'] == pytest.approx(1e-6)


def test_trajectory_summary():
    trajectory = Trajectory('n_parallel', {'step': 0.1})
    assert trajectory.summary()['n_samples'] == 0
    assert math.isnan(trajectory.summary()['final_t'])
    assert math.isnan(max_distance(trajectory, trajectory))
