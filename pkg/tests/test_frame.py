import math

import numpy as np
import pytest

from finsler_engine.engine.scalar_field import BundlePoint
from finsler_engine.geometry.frame import (FrameGeometry, berwald_frame, directional_derivative,
                                           invariants)

from .conftest import unit_point

SAMPLES = [((0.9, 0.3), 0.4), ((1.4, -2.0), 2.2), ((2.1, 1.0), 4.0), ((0.5, 5.5), 5.8)]
DISK_SAMPLES = [((0.1, 0.2), 0.4), ((-0.5, 0.3), 2.2), ((0.2, -0.6), 4.0)]


def test_euclidean_invariants_vanish(euclidean):
    inv = invariants(euclidean, unit_point(euclidean, (0.5, -1.0), 1.3))
    for name, value in inv.to_dict().items():
        assert abs(value) < 1e-12, name
    assert inv.one_plus_I3 == pytest.approx(1.0)


@pytest.mark.parametrize('x, theta', SAMPLES)
def test_sphere_curvature(sphere, x, theta):
    inv = invariants(sphere, unit_point(sphere, x, theta))
    assert inv.K == pytest.approx(1.0, abs=1e-6)
    assert abs(inv.I) < 1e-8
    assert abs(inv.J) < 1e-8
    assert abs(inv.K1) < 1e-6 and abs(inv.K2) < 1e-6 and abs(inv.K3) < 1e-6


@pytest.mark.parametrize('x, theta', DISK_SAMPLES)
def test_poincare_curvature(poincare, x, theta):
    inv = invariants(poincare, unit_point(poincare, x, theta))
    assert inv.K == pytest.approx(-1.0, abs=1e-6)
    assert abs(inv.I) < 1e-8


@pytest.mark.parametrize('theta', [0.3, 1.9, 3.5, 5.0])
def test_randers_minkowski_invariants(randers, theta):
    inv = invariants(randers, unit_point(randers, (0.2, -0.3), theta))
    for name in ('K', 'J', 'I1', 'I2'):
        assert abs(getattr(inv, name)) < 1e-7, name
    assert abs(inv.I) > 1e-3
    assert abs(inv.I3) > 1e-4


def test_randers_frame_at_reference_direction(randers):
    frame = berwald_frame(randers, BundlePoint((0.0, 0.0), (1.0, 0.0)))
    assert np.allclose(frame.m_up, [0.0, -1.0 / math.sqrt(1.3)], atol=1e-12)
    assert np.allclose(frame.m_down, [0.0, -math.sqrt(1.3)], atol=1e-12)
    assert np.allclose(frame.l_up, [1.0 / 1.3, 0.0], atol=1e-12)
    assert np.allclose(frame.l_down, [1.3, 0.0], atol=1e-12)


@pytest.mark.parametrize('x, theta', [((0.3, 0.4), 0.7), ((-1.2, -0.5), 3.9)])
def test_coframe_duality(nonberwald, x, theta):
    frame = berwald_frame(nonberwald, unit_point(nonberwald, x, theta))
    assert np.allclose(frame.duality(), np.eye(3), atol=1e-10)
    # ê₃ 是垂直場
    assert frame.ehat[2].components[:2] == (0.0, 0.0)


def test_invariants_are_fiber_homogeneous(nonberwald):
    p = unit_point(nonberwald, (0.4, 0.5), 2.0)
    base = invariants(nonberwald, p).to_dict()
    scaled = invariants(nonberwald, p.scaled(3.0)).to_dict()
    for name, value in base.items():
        assert scaled[name] == pytest.approx(value, abs=1e-9), name


def test_directional_derivative_by_name(nonberwald):
    p = unit_point(nonberwald, (0.4, -0.5), 1.0)
    inv = invariants(nonberwald, p)
    assert directional_derivative(nonberwald, 'I', p, 1) == pytest.approx(inv.I1, abs=1e-12)
    assert directional_derivative(nonberwald, 'K', p, 3) == pytest.approx(inv.K3, abs=1e-10)
    assert directional_derivative(nonberwald, 'J', p, 2) == pytest.approx(inv.J2, abs=1e-10)


def test_directional_derivative_of_field(nonberwald):
    p = unit_point(nonberwald, (0.4, -0.5), 1.0)
    frame = berwald_frame(nonberwald, p)
    position = lambda x1, x2, y1, y2: x1
    assert directional_derivative(nonberwald, position, p, 1) == pytest.approx(frame.m_up[0])
    assert directional_derivative(nonberwald, position, p, 2) == pytest.approx(frame.l_up[0])
    assert directional_derivative(nonberwald, position, p, 3) == pytest.approx(0.0, abs=1e-14)


def test_directional_derivative_rejects_bad_input(nonberwald):
    p = unit_point(nonberwald, (0.0, 0.0), 0.5)
    with pytest.raises(ValueError):
        directional_derivative(nonberwald, 'I', p, 4)
    with pytest.raises(ValueError):
        directional_derivative(nonberwald, 'Q', p, 1)
    with pytest.raises(ValueError):
        FrameGeometry(nonberwald, p, 4).scalar('Q')


def test_nonberwald_invariant_varies_horizontally(nonberwald):
    values = [invariants(nonberwald, unit_point(nonberwald, (0.3, 0.2), theta)) for theta in (0.8, 2.4)]
    assert max(abs(v.I1) for v in values) > 1e-3
