import numpy as np
import pytest

from hrmod.generate import random_points_variogram

# Unit-weight Laplacian of the cycle 1-2-3-4-1 and its variogram
# (effective resistances: adjacent 1*3/(1+3), opposite 2*2/4).
C4_THETA = np.array(
    [
        [2.0, -1.0, 0.0, -1.0],
        [-1.0, 2.0, -1.0, 0.0],
        [0.0, -1.0, 2.0, -1.0],
        [-1.0, 0.0, -1.0, 2.0],
    ]
)
C4_GAMMA = np.array(
    [
        [0.0, 0.75, 1.0, 0.75],
        [0.75, 0.0, 0.75, 1.0],
        [1.0, 0.75, 0.0, 0.75],
        [0.75, 1.0, 0.75, 0.0],
    ]
)
EQUILATERAL = np.ones((3, 3)) - np.eye(3)
# path 1-2-3 with unit weights: tree additive, Gamma_13 = Gamma_12 + Gamma_23
PATH3_GAMMA = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])


@pytest.fixture
def c4():
    return C4_GAMMA.copy()


@pytest.fixture
def equilateral():
    return EQUILATERAL.copy()


@pytest.fixture
def path3():
    return PATH3_GAMMA.copy()


def random_instances(n, dims=(2, 3, 4, 5, 6), seed=0):
    out = []
    for k in range(n):
        d = dims[k % len(dims)]
        out.append(random_points_variogram(d, seed=seed * 100_000 + k).gamma)
    return out
