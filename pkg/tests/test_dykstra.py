import numpy as np
import pytest

from oracles import random_point
from tbsolve.dykstra import dykstra_project, flow_matrix
from tbsolve.projection import project
from tbsolve.treeplex import simplex_treeplex


def test_fixed_point(shapes, rng):
    for tp in shapes.values():
        R = 3.0 * random_point(tp, rng)
        np.testing.assert_allclose(dykstra_project(tp, R, "cone"), R, atol=1e-12)


def test_agrees_on_simplex_batch(rng):
    tp = simplex_treeplex(2)
    Y = rng.normal(size=(1000, 3)) * 2
    Q = dykstra_project(tp, Y, "cone", sweeps=20000)
    P = np.array([project(tp, y, "cone") for y in Y])
    assert np.max(np.abs(P - Q)) <= 1e-6


def test_weighted_grid_search():
    # cone({1} x simplex(2)) = {(t, p t, (1 - p) t)}: brute force over (t, p)
    tp = simplex_treeplex(2)
    w = np.array([1.0, 4.0, 9.0])
    y = np.array([0.3, 1.2, -0.4])
    t = np.linspace(0, 2, 801)[:, None]
    p = np.linspace(0, 1, 801)[None, :]
    cost = (w[0] * (t - y[0]) ** 2 + w[1] * (p * t - y[1]) ** 2
            + w[2] * ((1 - p) * t - y[2]) ** 2)
    i, j = np.unravel_index(np.argmin(cost), cost.shape)
    best = np.array([t[i, 0], p[0, j] * t[i, 0], (1 - p[0, j]) * t[i, 0]])
    q = dykstra_project(tp, y, "cone", weights=w)
    assert np.max(np.abs(q - best)) <= 5e-3
    np.testing.assert_allclose(project(tp, y, "cone", weights=w), q, atol=1e-8)


def test_flow_matrix_kernel(shapes, rng):
    for tp in shapes.values():
        B, c = flow_matrix(tp, fix_root=True)
        x = random_point(tp, rng)
        np.testing.assert_allclose(B @ x, c, atol=1e-12)


def test_errors():
    tp = simplex_treeplex(2)
    with pytest.raises(ValueError):
        dykstra_project(tp, np.zeros(4))
    with pytest.raises(ValueError):
        dykstra_project(tp, np.zeros(3), "stable")
    with pytest.raises(ValueError):
        dykstra_project(tp, np.zeros(3), weights=[1, 0, 1])
