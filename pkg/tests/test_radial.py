import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from insulair.radial import (DIRICHLET, RadialConfig, c2, cn, dispersion_ball, dispersion_derivative,
                             dispersion_derivative_sign, dispersion_limit_dirichlet, energy_quadrature,
                             monotonicity_threshold, radial_profile, record, sphere_area)

from oracles import shoot, shooting_energy


def test_c2_examples():
    assert c2(1, 1, 0) == 1.0
    assert c2(1, 1, 1) == pytest.approx(1 / (0.5 + math.log(2)), rel=1e-15)
    assert c2(1, 1, 1) == pytest.approx(0.838123, abs=5e-6)
    assert c2(1, DIRICHLET, 1) == pytest.approx(1 / math.log(2), rel=1e-15)
    assert c2(1, 1e12, 1) == pytest.approx(1 / math.log(2), rel=1e-9)


def test_cn_examples():
    assert cn(3, 1, 1, 0) == pytest.approx(1.0)
    assert cn(3, 1, 1, 1) == pytest.approx(4 / 3, rel=1e-15)
    assert cn(3, 1, DIRICHLET, 1) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(ValueError):
        cn(2, 1, 1, 1)


@pytest.mark.parametrize("n,R,beta,delta", [(2, 1, 1, 1), (3, 1, 1, 1), (2, 0.3, 7, 2.5), (4, 2, 0.2, 0.4)])
def test_normalization_matches_shooting(n, R, beta, delta):
    cfg = RadialConfig(n, R, beta, delta)
    flux, slope, _ = shoot(n, R, beta, delta)
    c = -slope * R if n == 2 else -slope * R / (n - 2)
    expected = c2(R, beta, delta) if n == 2 else cn(n, R, beta, delta)
    assert c == pytest.approx(expected, rel=1e-9)
    assert dispersion_ball(cfg) == pytest.approx(flux, rel=1e-9)


def test_profile_examples():
    p2 = radial_profile(RadialConfig(2, 1, 1, 1))
    assert p2.v(2) == pytest.approx(1 - c2(1, 1, 1) * math.log(2))
    assert p2.v(2) == pytest.approx(0.419062, abs=5e-6)
    assert p2.v(1) == 1.0
    p3 = radial_profile(RadialConfig(3, 1, 1, 1))
    assert p3.v(2) == pytest.approx(1 / 3, rel=1e-14)
    assert p3.v(1) == 1.0
    with pytest.raises(ValueError):
        p2.v(2.5)
    with pytest.raises(ValueError):
        p2.dv(0.5)


def test_dispersion_examples():
    I = dispersion_ball(RadialConfig(2, 1, 1, 1))
    assert I == pytest.approx(2 * math.pi / (0.5 + math.log(2)), rel=1e-14)
    assert I == pytest.approx(5.26608, abs=5e-5)  # quoted figure is rounded
    assert dispersion_ball(RadialConfig(2, 1, 0, 1)) == 0
    assert dispersion_ball(RadialConfig(3, 2, 0, 1)) == 0
    assert dispersion_ball(RadialConfig(2, 1, 1, 0)) == pytest.approx(2 * math.pi)


def test_energy_oracles():
    cfg = RadialConfig(2, 1, 1, 1)
    assert shooting_energy(2, 1, 1, 1) == pytest.approx(dispersion_ball(cfg), rel=1e-9)
    assert shooting_energy(3, 1, 1, 1) == pytest.approx(dispersion_ball(RadialConfig(3, 1, 1, 1)), rel=1e-9)
    assert energy_quadrature(cfg) == pytest.approx(dispersion_ball(cfg), rel=1e-12)


def test_dirichlet_limit_examples():
    assert dispersion_limit_dirichlet(2, 1, 1) == pytest.approx(2 * math.pi / math.log(2))
    assert dispersion_limit_dirichlet(2, 1, 1) == pytest.approx(9.06472, abs=1e-5)
    assert dispersion_limit_dirichlet(3, 1, math.inf) == pytest.approx(4 * math.pi)
    assert dispersion_limit_dirichlet(3, 1, 1e9) == pytest.approx(4 * math.pi, rel=1e-8)
    assert dispersion_limit_dirichlet(2, 1, 0) == math.inf
    assert dispersion_limit_dirichlet(2, 1, 1e-8) > 1e8
    assert dispersion_ball(RadialConfig(2, 1, DIRICHLET, 1)) == dispersion_limit_dirichlet(2, 1, 1)
    assert shoot(2, 1, math.inf, 1)[0] == pytest.approx(dispersion_limit_dirichlet(2, 1, 1), rel=1e-9)
    assert shoot(3, 1, math.inf, 1)[0] == pytest.approx(dispersion_limit_dirichlet(3, 1, 1), rel=1e-9)


def test_threshold_examples():
    assert monotonicity_threshold(2, 0.5, 1) == 1.0
    assert monotonicity_threshold(2, 2, 1) == 0.0
    assert monotonicity_threshold(3, 1, 1) == 1.0


def fd(cfg, h=1e-5):
    lo = RadialConfig(cfg.n, cfg.R, cfg.beta, cfg.delta - h)
    hi = RadialConfig(cfg.n, cfg.R, cfg.beta, cfg.delta + h)
    return (dispersion_ball(hi) - dispersion_ball(lo)) / (2 * h)


def test_derivative_sign_examples():
    pos = RadialConfig(2, 1, 0.5, 0.5)
    neg = RadialConfig(2, 1, 0.5, 1.5)
    zero = RadialConfig(2, 1, 0.5, 1.0)
    assert dispersion_derivative_sign(pos) == 1 and fd(pos) > 0
    assert dispersion_derivative_sign(neg) == -1 and fd(neg) < 0
    assert dispersion_derivative_sign(zero) == 0
    assert abs(fd(zero)) < 1e-8
    assert fd(RadialConfig(2, 1, 0.5, 1.0 - 1e-3)) > 0 > fd(RadialConfig(2, 1, 0.5, 1.0 + 1e-3))


def test_threshold_sign_in_higher_dimensions():
    for n in (3, 4):
        R, beta = 1.0, 0.5
        t = monotonicity_threshold(n, beta, R)
        assert dispersion_derivative_sign(RadialConfig(n, R, beta, 0.9 * t)) == 1
        assert dispersion_derivative_sign(RadialConfig(n, R, beta, 1.1 * t)) == -1
        assert abs(dispersion_derivative(RadialConfig(n, R, beta, t))) < 1e-12
        assert fd(RadialConfig(n, R, beta, 0.99 * t)) > 0 > fd(RadialConfig(n, R, beta, 1.01 * t))


def test_record_fields():
    rec = record(RadialConfig(2, 1, DIRICHLET, 1))
    assert set(rec) == {"n", "R", "beta", "delta", "I", "c", "threshold"}
    assert rec["beta"] == "inf"
    assert rec["I"] == pytest.approx(9.06472, abs=1e-5)


def test_config_validation():
    for bad in [(1, 1, 1, 1), (2, 0, 1, 1), (2, 1, -1, 1), (2, 1, 1, -0.1), (2.5, 1, 1, 1)]:
        with pytest.raises(ValueError):
            RadialConfig(*bad)
    with pytest.raises(ValueError):
        radial_profile(RadialConfig(2, 1, 1, 0))


configs = st.builds(
    RadialConfig,
    st.integers(2, 4),
    st.floats(-1, 1).map(lambda x: 10 ** x),
    st.floats(-2, 2).map(lambda x: 10 ** x),
    st.floats(-2, 1).map(lambda x: 10 ** x),
)


@settings(max_examples=1000, deadline=None)
@given(configs)
def test_profile_invariants(cfg):
    prof = radial_profile(cfg)
    R, d, n = cfg.R, cfg.delta, cfg.n
    scale = max(1.0, cfg.beta, abs(prof.dv(R)))
    assert abs(prof.robin_residual()) <= 1e-12 * scale
    assert prof.v(R) == 1.0
    flux = [r ** (n - 1) * prof.dv(r) for r in np.linspace(R, R + d, 5)]
    assert np.allclose(flux, flux[0], rtol=1e-12, atol=0)
    assert prof.v(R + d) < prof.v(R + d / 2) < 1


@settings(max_examples=200, deadline=None)
@given(configs)
def test_energy_equals_flux(cfg):
    assert energy_quadrature(cfg) == pytest.approx(dispersion_ball(cfg), rel=1e-8)


@settings(max_examples=200, deadline=None)
@given(configs)
def test_dispersion_bounds(cfg):
    I = dispersion_ball(cfg)
    assert 0 < I <= cfg.beta * sphere_area(cfg.n, cfg.R + cfg.delta) * (1 + 1e-12)
    assert I <= dispersion_limit_dirichlet(cfg.n, cfg.R, cfg.delta) * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(configs)
def test_large_beta_limit(cfg):
    big = RadialConfig(cfg.n, cfg.R, 1e8, cfg.delta)
    lim = dispersion_limit_dirichlet(cfg.n, cfg.R, cfg.delta)
    assert dispersion_ball(big) == pytest.approx(lim, rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.floats(0.1, 10), st.floats(0.02, 0.98))
def test_monotone_on_either_side_of_threshold(n, R, frac):
    beta = frac * (n - 1) / R
    t = monotonicity_threshold(n, beta, R)
    grid = np.linspace(0, 4 * t + 1, 201)[1:]
    I = np.array([dispersion_ball(RadialConfig(n, R, beta, d)) for d in grid])
    dI = np.diff(I)
    tol = 1e-12 * I.max()
    assert np.all(dI[grid[1:] <= t] >= -tol)
    assert np.all(dI[grid[:-1] >= t] <= tol)


@settings(max_examples=200, deadline=None)
@given(configs)
def test_derivative_matches_finite_difference(cfg):
    h = 1e-5 * cfg.delta
    lo = dispersion_ball(RadialConfig(cfg.n, cfg.R, cfg.beta, cfg.delta - h))
    hi = dispersion_ball(RadialConfig(cfg.n, cfg.R, cfg.beta, cfg.delta + h))
    d = dispersion_derivative(cfg)
    assert (hi - lo) / (2 * h) == pytest.approx(d, rel=1e-4, abs=1e-7 * dispersion_ball(cfg) / cfg.delta)
