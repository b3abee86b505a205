"""Closed-form dispersion for concentric balls B_R inside B_{R+delta}.

The Dirichlet limit (beta = inf) is handled on separate code paths; pass
``DIRICHLET`` (``math.inf``) as beta to select it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .geometry import unit_ball_volume

DIRICHLET = math.inf


def is_dirichlet(beta: float) -> bool:
    return math.isinf(beta) and beta > 0


@dataclass(frozen=True)
class RadialConfig:
    n: int
    R: float
    beta: float
    delta: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension n must be an integer >= 2")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not self.delta >= 0 or math.isinf(self.delta):
            raise ValueError("delta must be finite and >= 0")
        if not (self.beta >= 0):
            raise ValueError("beta must be >= 0 (or DIRICHLET)")


def c2(R: float, beta: float, delta: float) -> float:
    if is_dirichlet(beta):
        return 1.0 / math.log1p(delta / R)
    return beta / (1.0 / (R + delta) + beta * math.log1p(delta / R))


def cn(n: int, R: float, beta: float, delta: float) -> float:
    if n < 3:
        raise ValueError("cn is defined for n >= 3; use c2 for the plane")
    q = (R / (R + delta)) ** (n - 2)
    if is_dirichlet(beta):
        return 1.0 / -math.expm1((n - 2) * math.log(R / (R + delta)))
    return beta / ((n - 2) * q / (R + delta) + beta * -math.expm1((n - 2) * math.log(R / (R + delta))))


def normalization(cfg: RadialConfig) -> float:
    if cfg.n == 2:
        return c2(cfg.R, cfg.beta, cfg.delta)
    return cn(cfg.n, cfg.R, cfg.beta, cfg.delta)


@dataclass(frozen=True)
class RadialProfile:
    """Radial minimizer v(r) on [R, R + delta]."""

    config: RadialConfig
    c: float

    def _check(self, r: float):
        R, d = self.config.R, self.config.delta
        tol = 1e-12 * (R + d)
        if r < R - tol or r > R + d + tol:
            raise ValueError(f"r={r} outside [{R}, {R + d}]")

    def v(self, r: float) -> float:
        self._check(r)
        n, R = self.config.n, self.config.R
        if n == 2:
            return 1.0 - self.c * math.log(r / R)
        return 1.0 - self.c * -math.expm1((n - 2) * math.log(R / r))

    def dv(self, r: float) -> float:
        self._check(r)
        n, R = self.config.n, self.config.R
        if n == 2:
            return -self.c / r
        return -self.c * (n - 2) * R ** (n - 2) / r ** (n - 1)

    def robin_residual(self) -> float:
        b = self.config.beta
        r = self.config.R + self.config.delta
        if is_dirichlet(b):
            return self.v(r)
        return self.dv(r) + b * self.v(r)


def radial_profile(cfg: RadialConfig) -> RadialProfile:
    if cfg.delta == 0:
        raise ValueError("no insulating layer: the profile is undefined for delta = 0")
    return RadialProfile(cfg, normalization(cfg))


def sphere_area(n: int, r: float) -> float:
    return n * unit_ball_volume(n) * r ** (n - 1)


def dispersion_ball(cfg: RadialConfig) -> float:
    """Heat dispersion of B_R insulated by a layer of thickness delta."""
    n, R, beta, delta = cfg.n, cfg.R, cfg.beta, cfg.delta
    if is_dirichlet(beta):
        return dispersion_limit_dirichlet(n, R, delta)
    if delta == 0:
        return beta * sphere_area(n, R)
    if beta == 0:
        return 0.0
    if n == 2:
        return 2 * math.pi * c2(R, beta, delta)
    return n * unit_ball_volume(n) * R ** (n - 2) * (n - 2) * cn(n, R, beta, delta)


def dispersion_limit_dirichlet(n: int, R: float, delta: float) -> float:
    """Capacity of B_R relative to B_{R+delta} (the beta -> inf limit)."""
    if delta == 0:
        return math.inf
    if n == 2:
        return 2 * math.pi / math.log1p(delta / R)
    if math.isinf(delta):
        return n * (n - 2) * unit_ball_volume(n) * R ** (n - 2)
    return n * (n - 2) * unit_ball_volume(n) / (R ** (2 - n) - (R + delta) ** (2 - n))


def monotonicity_threshold(n: int, beta: float, R: float) -> float:
    """Thickness below which adding insulation to B_R increases dispersion."""
    if beta <= 0:
        return math.inf
    return max(0.0, (n - 1) / beta - R)


def dispersion_derivative(cfg: RadialConfig) -> float:
    """Exact d/d(delta) of dispersion_ball."""
    n, R, beta, delta = cfg.n, cfg.R, cfg.beta, cfg.delta
    rho = R + delta
    if is_dirichlet(beta):
        if n == 2:
            L = math.log1p(delta / R)
            return -2 * math.pi / (L * L * rho)
        k = n * (n - 2) * unit_ball_volume(n)
        den = R ** (2 - n) - rho ** (2 - n)
        return -k * (n - 2) * rho ** (1 - n) / (den * den)
    if beta == 0:
        return 0.0
    if n == 2:
        den = 1.0 / rho + beta * math.log1p(delta / R)
        dden = (beta * rho - 1.0) / rho ** 2
        return -2 * math.pi * beta * dden / den ** 2
    q = R ** (n - 2)
    den = (n - 2) * q / rho ** (n - 1) + beta * (1 - q / rho ** (n - 2))
    dden = (n - 2) * q * rho ** (-n) * (beta * rho - (n - 1))
    k = n * unit_ball_volume(n) * q * (n - 2)
    return -k * beta * dden / den ** 2


def dispersion_derivative_sign(cfg: RadialConfig, tol: float = 1e-8) -> int:
    d = dispersion_derivative(cfg)
    scale = max(dispersion_ball(cfg), 1.0) if not is_dirichlet(cfg.beta) else 1.0
    if abs(d) <= tol * scale:
        return 0
    return 1 if d > 0 else -1


def energy_quadrature(cfg: RadialConfig) -> float:
    """Dirichlet + Robin energy of the radial profile by adaptive quadrature.

    Independent of the flux formula; used to cross-check dispersion_ball.
    """
    prof = radial_profile(cfg)
    n, R, d = cfg.n, cfg.R, cfg.delta
    bulk, _ = quad(lambda r: prof.dv(r) ** 2 * sphere_area(n, r), R, R + d,
                   epsabs=0.0, epsrel=1e-13, limit=200)
    if is_dirichlet(cfg.beta):
        return bulk
    return bulk + cfg.beta * prof.v(R + d) ** 2 * sphere_area(n, R + d)


def record(cfg: RadialConfig) -> dict:
    """JSON-ready summary used by the ``radial`` command."""
    c = math.inf if (cfg.delta == 0 and is_dirichlet(cfg.beta)) else normalization(cfg)
    beta = "inf" if is_dirichlet(cfg.beta) else cfg.beta
    I = dispersion_ball(cfg)
    return {
        "n": cfg.n, "R": cfg.R, "beta": beta, "delta": cfg.delta,
        "I": I if math.isfinite(I) else "inf",
        "c": c if math.isfinite(c) else "inf",
        "threshold": monotonicity_threshold(cfg.n, cfg.beta, cfg.R) if not is_dirichlet(cfg.beta) else 0.0,
    }
