import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_point
from tbsolve.dykstra import dykstra_project
from tbsolve.projection import lambda_build, project, smpl_root
from tbsolve.treeplex import (is_cone_member, is_member, pure_strategies, random_treeplex,
                              simplex_treeplex)


def feasible_sample(tp, kind, r0, rng):
    z = random_point(tp, rng)
    if kind == "treeplex":
        return z
    scale = rng.exponential(2.0)
    if kind == "stable":
        scale += r0
    return scale * z


def member(tp, x, kind, r0, tol):
    if kind == "treeplex":
        return is_member(tp, x, tol)
    ok = is_cone_member(tp, x, tol)
    return ok and (kind == "cone" or x[0] >= r0 - tol)


@pytest.mark.parametrize("kind", ["cone", "stable", "treeplex"])
@pytest.mark.parametrize("weighted", [False, True])
def test_feasible_and_variational_inequality(shapes, rng, kind, weighted):
    r0 = 0.3
    for tp in shapes.values():
        y = rng.normal(size=tp.dim) * 3
        w = rng.uniform(0.2, 5, size=tp.dim) if weighted else np.ones(tp.dim)
        p = project(tp, y, kind, r0=r0, weights=w)
        assert member(tp, p, kind, r0, 1e-8)
        scale = 1.0 + np.abs(y).max() ** 2
        for _ in range(100):
            z = feasible_sample(tp, kind, r0, rng)
            assert np.sum(w * (y - p) * (z - p)) <= 1e-8 * scale


def test_idempotent_on_cone_points(shapes, rng):
    for tp in shapes.values():
        R = 2.5 * random_point(tp, rng)
        np.testing.assert_allclose(project(tp, R, "cone"), R, atol=1e-12)
        x = random_point(tp, rng)
        np.testing.assert_allclose(project(tp, x, "treeplex"), x, atol=1e-12)


def test_negative_point_goes_to_apex():
    tp = simplex_treeplex(2)
    np.testing.assert_array_equal(project(tp, [-1.0, -1.0, -1.0], "cone"), np.zeros(3))


def test_small_case_matches_long_dykstra():
    tp = simplex_treeplex(2)
    y = np.array([1.0, 1.0, -1.0])
    q = dykstra_project(tp, y, "cone", sweeps=100_000)
    np.testing.assert_allclose(project(tp, y, "cone"), q, atol=1e-7)


def test_stable_keeps_r0(shapes, rng):
    for tp in shapes.values():
        for r0 in (0.01, 0.1, 2.0):
            p = project(tp, rng.normal(size=tp.dim) - 1.0, "stable", r0=r0)
            assert p[0] >= r0 - 1e-9


def test_stable_from_origin_is_scaled_uniform(shapes):
    from tbsolve.treeplex import uniform_strategy
    tp = simplex_treeplex(2)
    p = project(tp, np.zeros(tp.dim), "stable", r0=0.1)
    np.testing.assert_allclose(p, 0.1 * uniform_strategy(tp), atol=1e-12)
    np.testing.assert_allclose(dykstra_project(tp, np.zeros(tp.dim), "stable", r0=0.1), p,
                               atol=1e-9)


@pytest.mark.parametrize("kind, r0, w, msg", [
    ("ball", None, None, "unknown"),
    ("stable", None, None, "r0"),
    ("stable", -1.0, None, "r0"),
    ("cone", None, [1, -1, 1], "positive"),
])
def test_bad_arguments(kind, r0, w, msg):
    with pytest.raises(ValueError, match=msg):
        project(simplex_treeplex(2), np.zeros(3), kind, r0=r0, weights=w)


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="shape"):
        project(simplex_treeplex(2), np.zeros(5))


def test_root_matches_grid_scan(rng):
    # the scale of the empty sequence minimizes 0.5 (t - y0)^2 + 0.5 dist^2(y, tZ)
    tp = random_treeplex(np.random.default_rng(7), 3, max_sequences=25)
    y = rng.normal(size=tp.dim)
    y[0] = 1.5
    lam = lambda_build(tp, y)
    from tbsolve.projection import SmplFn
    full = SmplFn(lam.zeta - y[0], lam.alpha0 + 1.0, lam.breakpoints, lam.increments)
    t_star = smpl_root(full)
    grid = np.arange(1e-3, 4.0, 1e-3)
    Y = np.array([y / t for t in grid])
    Y[:, 0] = 1.0
    Z = dykstra_project(tp, Y, "treeplex", sweeps=4000, tol=1e-13)
    dist = 0.5 * (grid - y[0]) ** 2 + 0.5 * np.sum((grid[:, None] * Z - y)[:, 1:] ** 2, axis=1)
    assert abs(grid[np.argmin(dist)] - t_star) <= 2e-3


def test_lipschitz_of_normalization(shapes, rng):
    for tp in shapes.values():
        if tp.num_sequences > 30:
            continue
        omega = max(np.linalg.norm(z) for z in pure_strategies(tp))
        for _ in range(30):
            R1 = rng.exponential(1.0) * random_point(tp, rng)
            R2 = rng.exponential(1.0) * random_point(tp, rng)
            lhs = np.linalg.norm(R1 / R1[0] - R2 / R2[0])
            rhs = omega * np.linalg.norm(R1 - R2) / max(R1[0], R2[0])
            assert lhs <= rhs + 1e-9


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), eta=st.sampled_from([1e-3, 0.5, 7.0, 1e3]))
def test_conic_homogeneity_property(seed, eta):
    rng = np.random.default_rng(seed)
    tp = random_treeplex(rng, int(rng.integers(1, 5)), max_sequences=40)
    u = rng.normal(size=tp.dim)
    a = project(tp, eta * u, "cone")
    b = eta * project(tp, u, "cone")
    assert np.max(np.abs(a - b)) <= 1e-10 * max(1e-300, np.max(np.abs(b)), eta * 1e-6)
