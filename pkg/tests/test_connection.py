import math

import numpy as np
import pytest

from finsler_engine.engine import jet as jm
from finsler_engine.engine.scalar_field import BundlePoint, ChartDomainError, EvaluationError
from finsler_engine.geometry.connection import (ConvexityError, LocalGeometry, metric_jet,
                                                spray_and_connections, values)
from finsler_engine.geometry.surface import ChartDomain, custom_surface, minkowski_surface

POINTS = [((0.6, 0.4), 0.3), ((1.2, -0.7), 2.0), ((-0.4, 0.1), 4.4)]


def fiber(theta, scale=1.0):
    return (scale * math.cos(theta), scale * math.sin(theta))


def test_euclidean_is_flat(euclidean):
    p = BundlePoint((1.0, -2.0), (0.3, 0.9))
    metric = metric_jet(euclidean, p)
    connection = spray_and_connections(euclidean, p)
    assert np.allclose(metric.g, np.eye(2))
    assert metric.det_g == pytest.approx(1.0)
    assert np.allclose(metric.A, 0.0, atol=1e-14)
    assert np.allclose(connection.G, 0.0, atol=1e-14)
    assert np.allclose(connection.Gamma, 0.0, atol=1e-14)


@pytest.mark.parametrize('x, theta', [((1.0, 0.5), 0.3), ((2.0, -3.0), 2.5)])
def test_sphere_matches_levi_civita(sphere, x, theta):
    p = BundlePoint(x, fiber(theta))
    metric = metric_jet(sphere, p)
    connection = spray_and_connections(sphere, p)
    assert np.allclose(metric.g, sphere.oracles.metric(x, p.y), atol=1e-12)
    assert np.allclose(metric.g_inv @ metric.g, np.eye(2), atol=1e-12)
    assert np.allclose(connection.Gamma, sphere.oracles.christoffel(x), atol=1e-10)


def test_poincare_matches_levi_civita(poincare):
    x = (0.3, -0.2)
    connection = spray_and_connections(poincare, BundlePoint(x, fiber(1.1)))
    assert np.allclose(connection.Gamma, poincare.oracles.christoffel(x), atol=1e-10)


@pytest.mark.parametrize('x, theta', POINTS)
def test_randers_metric_oracle(nonberwald, x, theta):
    p = BundlePoint(x, fiber(theta, 1.7))
    metric = metric_jet(nonberwald, p)
    assert np.allclose(metric.g, nonberwald.oracles.metric(x, p.y), atol=1e-12)
    # A 對 y 為 −1 次齊次，A_ijk y^k = 0
    assert np.allclose(np.einsum('ijk,k->ij', metric.A, p.y), 0.0, atol=1e-12)


@pytest.mark.parametrize('x, theta', POINTS)
def test_chern_connection_reproduces_nonlinear_connection(nonberwald, x, theta):
    p = BundlePoint(x, fiber(theta))
    connection = spray_and_connections(nonberwald, p)
    assert np.allclose(connection.NLC, np.einsum('ijk,k->ij', connection.Gamma, p.y), atol=1e-12)
    assert np.allclose(connection.Gamma, np.swapaxes(connection.Gamma, 1, 2))
    # G 為 2 次齊次
    assert np.allclose(2.0 * connection.G, connection.NLC @ np.array(p.y), atol=1e-12)


def test_minkowski_spray_vanishes(randers):
    connection = spray_and_connections(randers, BundlePoint((0.5, 0.5), fiber(0.8)))
    assert np.allclose(connection.G, 0.0, atol=1e-14)
    assert np.allclose(connection.Gamma, 0.0, atol=1e-14)


def test_convexity_error():
    chart = ChartDomain.rectangle((-1.0, 1.0), (-1.0, 1.0))
    surface = minkowski_surface('saddle', chart, lambda y1, y2: jm.sqrt(y1 * y1 - 0.5 * y2 * y2))
    with pytest.raises(ConvexityError, match='not strongly convex'):
        metric_jet(surface, BundlePoint((0.0, 0.0), (1.0, 0.0)))


def test_local_geometry_guards(euclidean):
    with pytest.raises(ChartDomainError):
        LocalGeometry(euclidean, BundlePoint((6.0, 0.0), (1.0, 0.0)), 3)
    with pytest.raises(ValueError):
        LocalGeometry(euclidean, BundlePoint((0.0, 0.0), (1.0, 0.0)), 9)
    chart = ChartDomain.rectangle((-1.0, 1.0), (-1.0, 1.0))
    negative = custom_surface('negative', chart, lambda x1, x2, y1, y2: -jm.sqrt(y1 * y1 + y2 * y2))
    with pytest.raises(EvaluationError):
        LocalGeometry(negative, BundlePoint((0.0, 0.0), (1.0, 0.0)), 3).F


def test_values_converts_nested(euclidean):
    geometry = LocalGeometry(euclidean, BundlePoint((0.0, 0.0), (2.0, 0.0)), 3)
    assert values(geometry.F_y).tolist() == pytest.approx([1.0, 0.0])
    assert values(geometry.F) == pytest.approx(2.0)
