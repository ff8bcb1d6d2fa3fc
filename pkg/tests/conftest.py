import numpy as np
import pytest
from hypothesis import settings

from spherebits.onebit import PointSet

settings.register_profile("spherebits", deadline=None, max_examples=50)
settings.load_profile("spherebits")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def basis():
    """Orthonormal basis of R^3 as points on S^2"""
    return PointSet(points=np.eye(3))


@pytest.fixture
def north():
    return PointSet(points=np.array([[0.0, 0.0, 1.0]]))


@pytest.fixture
def antipodal_pair():
    return PointSet(points=np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))


def write_csv(path, rows, header=None):
    """Write a point-set style CSV by hand (for malformed-file tests)"""
    lines = [header] if header else []
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return str(path)
