"""
共用測試夾具
"""

import json
import math

import pytest

from finsler_engine.engine.scalar_field import BundlePoint
from finsler_engine.geometry import fixtures

SURFACES = ['euclidean', 'sphere', 'poincare_disk', 'randers_minkowski', 'randers_nonberwald']


@pytest.fixture(scope='session')
def euclidean():
    return fixtures.euclidean()


@pytest.fixture(scope='session')
def sphere():
    return fixtures.sphere()


@pytest.fixture(scope='session')
def poincare():
    return fixtures.poincare_disk()


@pytest.fixture(scope='session')
def randers():
    return fixtures.randers_minkowski(0.3, 0.0)


@pytest.fixture(scope='session')
def nonberwald():
    return fixtures.randers_nonberwald(0.2)


@pytest.fixture(params=SURFACES)
def any_surface(request):
    return fixtures.build_fixture(request.param)


def unit_point(surface, x, theta):
    """x 處方向角 theta 的指標線上的點"""
    y = surface.normalize(x, (math.cos(theta), math.sin(theta)))
    return BundlePoint(tuple(x), (float(y[0]), float(y[1])))


@pytest.fixture
def write_config(tmp_path):
    """把設定寫成 JSON 檔並回傳路徑"""
    def write(data, name='run.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return str(path)
    return write
