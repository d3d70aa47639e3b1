import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats

from finsler_engine.engine import jet as jm
from finsler_engine.geometry.fixtures import build_fixture, randers_minkowski
from finsler_engine.geometry.surface import ChartDomain, custom_surface
from finsler_engine.geometry.validation import validate_surface

lam = floats(min_value=0.1, max_value=20.0)


def test_fixtures_validate(any_surface):
    report = validate_surface(any_surface, n_samples=16)
    assert report.passed, report.summary()
    assert {c.name for c in report.checks} >= {'positivity', 'homogeneity', 'convexity'}


def test_randers_b_norm_limit():
    report = validate_surface(randers_minkowski(1.1, 0.0), n_samples=16)
    assert not report.passed
    assert report.check('b_norm').value == pytest.approx(1.1)
    assert 'b-norm ≥ 1' in report.summary()


def test_inhomogeneous_norm_is_reported():
    chart = ChartDomain.rectangle((-1.0, 1.0), (-1.0, 1.0))
    surface = custom_surface('bump', chart, lambda x1, x2, y1, y2: y1 * y1 + y2 * y2 + 1.0)
    report = validate_surface(surface, n_samples=8)
    assert not report.check('homogeneity').passed
    assert report.check('positivity').passed


def test_report_to_dict():
    report = validate_surface(build_fixture('euclidean'), n_samples=4)
    data = report.to_dict()
    assert data['pass'] is True
    assert data['n_samples'] == 4
    assert all('message' in check for check in data['checks'])


@settings(max_examples=25, deadline=None)
@given(lam)
def test_randers_norm_is_positively_homogeneous(scale):
    surface = build_fixture('randers_nonberwald')
    x, y = (0.3, -0.6), (0.7, -1.1)
    assert surface.norm(x, (scale * y[0], scale * y[1])) == pytest.approx(scale * surface.norm(x, y), rel=1e-12)


def test_negative_scaling_is_not_reversible():
    surface = build_fixture('randers_minkowski')
    x = (0.0, 0.0)
    assert surface.norm(x, (1.0, 0.0)) != pytest.approx(surface.norm(x, (-1.0, 0.0)))
    assert surface.b_norm(x) == pytest.approx(0.3)
    assert build_fixture('sphere').b_norm((1.0, 0.0)) is None
    assert jm.value_of(surface.F(0.0, 0.0, 1.0, 0.0)) == pytest.approx(1.3)
