import math

import numpy as np
import pytest

from finsler_engine.engine.scalar_field import BundlePoint
from finsler_engine.flows.normal import (fiber_gradient, initial_conditions, normal_vector,
                                         tangent_from_normal)
from finsler_engine.geometry.connection import metric_jet


def dense_scan_normal(surface, x, T, n=10000):
    """獨立的密集掃描：在指標線上找 F_y(N)·T 變號且 σ > 0 的點"""
    thetas = 2.0 * np.pi * np.arange(n) / n
    best = None
    for theta in thetas:
        N = surface.normalize(x, (math.cos(theta), math.sin(theta)))
        h = abs(float(fiber_gradient(surface, x, N) @ T))
        sigma = N[1] * T[0] - T[1] * N[0]
        if sigma > 0 and (best is None or h < best[0]):
            best = (h, N)
    return best[1]


def test_euclidean_normal(euclidean):
    N = normal_vector(euclidean, (0.0, 0.0), (1.0, 0.0))
    assert np.allclose(N, [0.0, 1.0], atol=1e-12)


def test_randers_normal_conditions(randers):
    x = (0.0, 0.0)
    T = randers.normalize(x, (1.0, 0.0))
    N = normal_vector(randers, x, T)
    g = metric_jet(randers, BundlePoint(x, tuple(N))).g
    assert float(N @ g @ N) == pytest.approx(1.0, abs=1e-10)
    assert float(N @ g @ T) == pytest.approx(0.0, abs=1e-10)
    assert N[1] * T[0] - T[1] * N[0] > 0.0

    # 非對稱範數下 N 不是 T 的歐氏垂線
    cosine = float(N @ T) / (np.linalg.norm(N) * np.linalg.norm(T))
    assert abs(math.degrees(math.acos(cosine)) - 90.0) > 1.0


def test_normal_agrees_with_dense_scan(randers):
    x = (0.5, -0.5)
    T = randers.normalize(x, (0.6, 0.8))
    reference = dense_scan_normal(randers, x, T, n=2000)
    assert np.allclose(normal_vector(randers, x, T), reference, atol=5e-3)


@pytest.mark.parametrize('theta', [0.2, 1.7, 3.3, 5.1])
def test_tangent_normal_round_trip(nonberwald, theta):
    x = (0.3, -0.2)
    N = nonberwald.normalize(x, (math.cos(theta), math.sin(theta)))
    T = tangent_from_normal(nonberwald, x, N)
    assert nonberwald.norm(x, T) == pytest.approx(1.0)
    assert np.allclose(normal_vector(nonberwald, x, T), N, atol=1e-9)


def test_initial_conditions(nonberwald):
    x0, T0, N0 = initial_conditions(nonberwald, (0.1, 0.1), T0=(2.0, 0.0))
    assert nonberwald.norm(x0, T0) == pytest.approx(1.0)
    assert nonberwald.norm(x0, N0) == pytest.approx(1.0)
    _, T1, _ = initial_conditions(nonberwald, (0.1, 0.1), N0=N0)
    assert np.allclose(T1, T0, atol=1e-9)

    with pytest.raises(ValueError):
        initial_conditions(nonberwald, (0.1, 0.1))
    with pytest.raises(ValueError):
        initial_conditions(nonberwald, (0.1, 0.1), T0=(1.0, 0.0), N0=(0.0, 1.0))


def test_zero_tangent_rejected(euclidean):
    with pytest.raises(ValueError):
        normal_vector(euclidean, (0.0, 0.0), (0.0, 0.0))
