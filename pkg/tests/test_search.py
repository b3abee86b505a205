import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from insulair.geometry import ConvexPolygon, Disk, area, perimeter, rectangle, regular_polygon
from insulair.radial import RadialConfig, dispersion_ball
from insulair.fem import dispersion_of
from insulair.search import (PENALTY_INFEASIBLE, SearchConfig, SupportVector, convexity_violation,
                             edge_lengths, maximality_test, minimize_dispersion, normalized_polygon,
                             objective, random_convex, recentre, regularity_deviation, repair_convexity,
                             support_area, support_perimeter, support_to_polygon)


def test_support_to_polygon_examples():
    sq = support_to_polygon(np.ones(4))
    assert perimeter(sq) == pytest.approx(8)
    assert area(sq) == pytest.approx(4)
    assert np.allclose(np.abs(sq.vertices), 1)
    m, R = 12, 1.7
    poly = support_to_polygon(np.full(m, R))
    assert np.allclose(np.linalg.norm(poly.vertices, axis=1), R / math.cos(math.pi / m))
    h = np.array([1, 1.2, 0.9, 1.1, 1.0, 0.95])
    assert perimeter(support_to_polygon(3 * h)) == pytest.approx(3 * perimeter(support_to_polygon(h)))
    with pytest.raises(ValueError):
        support_to_polygon([1, 0.1, 1, 0.1, 1, 0.1, 5, 0.1])


def test_support_formulas_match_polygon():
    sv = random_convex(11, 4.0, 2)
    poly = support_to_polygon(sv)
    assert sv.perimeter == pytest.approx(perimeter(poly), rel=1e-12)
    assert sv.area == pytest.approx(area(poly), rel=1e-12)
    assert np.allclose(poly.support(np.column_stack([np.cos(2 * np.pi * np.arange(11) / 11),
                                                     np.sin(2 * np.pi * np.arange(11) / 11)])), sv.h)


def test_random_convex_examples():
    for seed in range(5):
        assert random_convex(16, 3.7, seed).perimeter == pytest.approx(3.7, rel=1e-12)
    flat = random_convex(8, 5.0, 0, amplitude=0.0)
    assert regularity_deviation(flat.h) < 1e-12
    a, b = random_convex(16, 1.0, 42).h, random_convex(16, 1.0, 42).h
    assert np.array_equal(a, b)


def test_random_convex_many_seeds():
    for seed in range(1000):
        sv = random_convex(32, 2 * math.pi, seed)
        assert np.all(sv.h > 0)
        assert np.all(edge_lengths(sv.h) >= -1e-12 * sv.h.mean())
        assert abs(sv.perimeter - 2 * math.pi) <= 1e-12 * 2 * math.pi
        assert area(support_to_polygon(sv)) > 0


def test_support_vector_validation():
    with pytest.raises(ValueError):
        SupportVector([1, 1])
    with pytest.raises(ValueError):
        SupportVector([1, -1, 1, 1])
    with pytest.raises(ValueError):
        SupportVector([1, 0.1, 1, 0.1, 1, 0.1, 5, 0.1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.1, 10), min_size=3, max_size=40))
def test_repair(h):
    fixed = repair_convexity(h)
    assert convexity_violation(fixed) <= 1e-12 * np.mean(fixed) * len(fixed)
    assert np.array_equal(repair_convexity(fixed), fixed)  # idempotent on feasible input


def test_recentre_moves_centroid_to_origin():
    sv = random_convex(9, 4.0, 3)
    h = sv.h + 0.3 * np.cos(2 * np.pi * np.arange(9) / 9)  # translate by (0.3, 0)
    poly = support_to_polygon(recentre(h))
    assert np.allclose(poly.centroid, 0, atol=1e-12)
    assert perimeter(poly) == pytest.approx(support_perimeter(h))


def test_maximality_small():
    rep = maximality_test(8, 16, 2 * math.pi, 1.0, 1.0, (64, 16), seed=0)
    assert rep.passed
    assert rep.tol == pytest.approx(2 * abs(rep.fem_disk - rep.I_disk))
    assert len(rep.values) == 8 and min(rep.margins) > 0


def test_maximality_special_shapes():
    near = regular_polygon(64, 1.0)
    near = near.scaled(2 * math.pi / perimeter(near))
    long = rectangle(10, 1.0)
    long = long.scaled(2 * math.pi / perimeter(long))
    rep = maximality_test(0, 16, 2 * math.pi, 1.0, 1.0, (128, 32), shapes=[near, long])
    m_near, m_long = rep.margins
    assert abs(m_near) < 0.02 * rep.I_disk
    assert m_long > 5 * rep.tol and m_long > m_near


def small_config(**kw):
    base = dict(constraint="perimeter", value=2 * math.pi, m=6, beta=1.0, delta=1.0, seed=3,
                restarts=2, max_iters=15, resolution=(32, 8), final_resolution=(64, 16))
    base.update(kw)
    return SearchConfig(**base)


def test_objective_examples():
    cfg = small_config(m=16, resolution=(64, 16))
    disk = dispersion_of(Disk(1.0), 1.0, 1.0, (64, 16))
    assert objective(np.ones(16), cfg) == pytest.approx(disk, rel=2e-2)
    assert objective(np.full(16, np.nan), cfg) == PENALTY_INFEASIBLE
    assert objective(-np.ones(16), cfg) == PENALTY_INFEASIBLE
    bad = np.ones(16)
    bad[3] = 3.0
    assert objective(bad, cfg) > objective(repair_convexity(bad), cfg)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000), st.floats(0.05, 20), st.sampled_from(["perimeter", "area"]))
def test_objective_scale_invariance(seed, lam, constraint):
    cfg = small_config(constraint=constraint, value=3.0, m=8)
    h = random_convex(8, 1.0, seed).h
    assert objective(lam * h, cfg) == pytest.approx(objective(h, cfg), rel=1e-12)


def test_normalized_polygon():
    h = random_convex(10, 1.0, 5).h
    assert perimeter(normalized_polygon(h, small_config(value=7.0))) == pytest.approx(7.0)
    assert area(normalized_polygon(h, small_config(constraint="area", value=2.0))) == pytest.approx(2.0)


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(constraint="volume")
    with pytest.raises(ValueError):
        SearchConfig(value=0)
    with pytest.raises(ValueError):
        SearchConfig(restarts=0)


def test_minimize_zero_iterations_returns_initial():
    cfg = small_config(max_iters=0, restarts=1)
    trace = minimize_dispersion(cfg)
    assert len(trace.iterations) == 1
    h0 = np.array(trace.iterations[0]["h"])
    assert np.allclose(trace.best_h, repair_convexity(h0))
    assert trace.best_value == trace.initial_values[0]


def test_minimize_perimeter_below_disk_and_reproducible():
    cfg = small_config()
    a = minimize_dispersion(cfg)
    b = minimize_dispersion(cfg)
    assert a.to_json() == b.to_json()
    assert a.iterations == b.iterations
    assert a.final_value <= dispersion_ball(RadialConfig(2, 1.0, 1.0, 1.0))
    assert a.best_value <= min(a.initial_values)
    for r in range(cfg.restarts):
        vals = [it["objective"] for it in a.iterations if it["restart"] == r]
        assert all(y <= x + 1e-15 for x, y in zip(vals, vals[1:]))
    poly = ConvexPolygon(a.best_polygon)
    assert perimeter(poly) == pytest.approx(2 * math.pi, rel=1e-10)


def test_minimize_area_constraint():
    cfg = small_config(constraint="area", value=math.pi, max_iters=5, restarts=1)
    trace = minimize_dispersion(cfg)
    assert area(ConvexPolygon(trace.best_polygon)) == pytest.approx(math.pi, rel=1e-10)
    assert support_area(trace.best_h) > 0
