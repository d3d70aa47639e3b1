import numpy as np
import pytest

from finsler_engine.flows.base_flow import Trajectory, TrajectorySample, TrajectoryStatus
from finsler_engine.flows.diagnostics import DiagnosticsError, diagnostics, time_derivative
from finsler_engine.flows.extremal_flow import n_extremal_flow
from finsler_engine.flows.parallel_flow import n_parallel_flow


def test_time_derivative_is_exact_on_quartics():
    h = 0.1
    t = np.arange(12) * h
    result = time_derivative(t ** 4 - 2.0 * t, h)
    assert np.allclose(result, 4.0 * t ** 3 - 2.0, atol=1e-10)


def test_time_derivative_short_series():
    h = 0.5
    t = np.arange(4) * h
    assert np.allclose(time_derivative(t ** 2, h), 2.0 * t)
    assert np.allclose(time_derivative(np.column_stack((t, 3.0 * t)), h), [[1.0, 3.0]] * 4)
    with pytest.raises(DiagnosticsError):
        time_derivative([0.0, 1.0], h)


def test_diagnostics_needs_uniform_samples():
    samples = [TrajectorySample(t=t, x=np.zeros(2), fiber=np.array([0.0, 1.0])) for t in (0.0, 0.1, 0.3)]
    with pytest.raises(DiagnosticsError):
        diagnostics(None, Trajectory('n_parallel', {}, samples))
    with pytest.raises(DiagnosticsError):
        diagnostics(None, Trajectory('n_parallel', {}, samples[:2]))


def test_euclidean_diagnostics(euclidean):
    trajectory = n_parallel_flow(euclidean, (0.5, 0.5), (-0.6, 0.8), length=0.5, step=0.05)
    series = diagnostics(euclidean, trajectory, attach=False)
    assert np.allclose(series.sigma, 1.0, atol=1e-10)
    assert series.max_abs('k') < 1e-10
    assert series.max_abs('k_cov') < 1e-10
    assert series.max_abs('orth_drift') < 1e-10
    assert series.max_abs('el_residual') < 1e-10
    assert np.allclose(series.T, [[0.8, 0.6]] * len(trajectory), atol=1e-12)


def test_sphere_parallel_has_zero_curvature(sphere):
    N0 = sphere.normalize((1.0, 0.0), (0.3, 1.0))
    trajectory = n_parallel_flow(sphere, (1.0, 0.0), N0, length=0.5, step=0.01)
    assert trajectory.max_abs('k') < 1e-6
    assert trajectory.max_abs('orth_drift') < 1e-6
    assert trajectory.max_abs('sigma') == pytest.approx(1.0, abs=1e-6)


def test_extremal_flow_satisfies_euler_lagrange(nonberwald):
    x0 = (0.1, -0.2)
    N0 = nonberwald.normalize(x0, (0.7, 1.0))
    trajectory = n_extremal_flow(nonberwald, x0, N0, length=0.3, step=0.01)
    assert trajectory.max_abs('el_residual') < 1e-6
    assert trajectory.max_abs('el_system_residual') < 1e-6
    sigma = trajectory.column('sigma')
    assert np.all(sigma > 0.0)


def test_parallel_curvature_is_independent(nonberwald):
    x0 = (0.1, -0.2)
    N0 = nonberwald.normalize(x0, (0.7, 1.0))
    trajectory = n_parallel_flow(nonberwald, x0, N0, length=0.3, step=0.01)
    # N-平行曲線 k ≡ 0，協變導數給出同樣的結果
    assert trajectory.max_abs('k') < 1e-6
    assert trajectory.max_abs('k_cov') < 1e-6


@pytest.mark.slow
def test_parallel_constraints_at_fine_step(nonberwald):
    x0 = (-0.5, 0.1)
    N0 = nonberwald.normalize(x0, (0.2, 1.0))
    trajectory = n_parallel_flow(nonberwald, x0, N0, length=1.0, step=1e-3)
    assert trajectory.status == TrajectoryStatus.COMPLETED
    assert len(trajectory) == 1001
    assert trajectory.max_abs('k') < 1e-7
    assert trajectory.max_abs('orth_drift') < 1e-7
    assert trajectory.max_abs('indicatrix_drift') < 1e-7


@pytest.mark.slow
def test_extremal_constraints_at_fine_step(nonberwald):
    x0 = (-0.5, 0.1)
    N0 = nonberwald.normalize(x0, (0.2, 1.0))
    trajectory = n_extremal_flow(nonberwald, x0, N0, length=1.0, step=1e-3)
    assert trajectory.status == TrajectoryStatus.COMPLETED
    assert trajectory.max_abs('el_residual') < 1e-6
    assert trajectory.max_abs('el_system_residual') < 1e-6
    assert trajectory.max_abs('orth_drift') < 1e-7
    assert trajectory.max_abs('indicatrix_drift') < 1e-7
    # 非 Berwald 曲面上極值曲線的 k 不為零
    assert trajectory.max_abs('k') > 1e-6
