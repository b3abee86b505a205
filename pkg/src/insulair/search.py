"""Convex polygons by support values, theorem fuzzing and shape minimization.

A convex polygon with outer normals at the uniform angles 2*pi*i/m is fixed
by its support values h_i.  Edge i has length
(h_{i-1} + h_{i+1} - 2 h_i cos a) / sin a with a = 2*pi/m, so convexity is
a set of linear inequalities and the perimeter is linear in h.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import minimize

from ._parallel import parallel_map
from .fem import dispersion_of
from .geometry import ConvexPolygon, Disk
from .radial import RadialConfig, dispersion_ball

PENALTY_INFEASIBLE = 1e6
PENALTY_WEIGHT = 1e3


def support_angles(m: int) -> np.ndarray:
    return 2 * np.pi * np.arange(m) / m


def edge_lengths(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    a = 2 * np.pi / len(h)
    return (np.roll(h, 1) + np.roll(h, -1) - 2 * h * math.cos(a)) / math.sin(a)


def convexity_violation(h) -> float:
    return float(np.sum(np.maximum(0.0, -edge_lengths(h))))


def support_perimeter(h) -> float:
    h = np.asarray(h, dtype=float)
    return 2 * math.tan(math.pi / len(h)) * math.fsum(h)


def support_area(h) -> float:
    h = np.asarray(h, dtype=float)
    return 0.5 * math.fsum(h * edge_lengths(h))


def _feasible(h) -> bool:
    return bool(np.all(edge_lengths(h) >= -1e-12 * np.mean(np.abs(h))))


@dataclass(frozen=True, eq=False)
class SupportVector:
    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.ndim != 1 or len(h) < 3:
            raise ValueError("need at least 3 support values")
        if np.any(h <= 0):
            raise ValueError("support values must be positive")
        if not _feasible(h):
            raise ValueError("support values violate convexity")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def m(self) -> int:
        return len(self.h)

    @property
    def perimeter(self) -> float:
        return support_perimeter(self.h)

    @property
    def area(self) -> float:
        return support_area(self.h)


def repair_convexity(h, max_sweeps: int = 100_000) -> np.ndarray:
    """Cyclic smoothing until every edge length is nonnegative.

    Feasible input is returned unchanged.  Smoothing is linear, so repair
    commutes with positive scaling.
    """
    h = np.array(h, dtype=float)
    for _ in range(max_sweeps):
        if _feasible(h):
            return h
        h = 0.5 * h + 0.25 * (np.roll(h, 1) + np.roll(h, -1))
    raise ValueError("convexity repair did not converge")


def support_to_polygon(h) -> ConvexPolygon:
    if isinstance(h, SupportVector):
        h = h.h
    h = np.asarray(h, dtype=float)
    if not _feasible(h):
        raise ValueError("support values violate convexity")
    m = len(h)
    phi = support_angles(m)
    a = 2 * np.pi / m
    h1 = np.roll(h, -1)
    p1 = np.roll(phi, -1)
    x = (h * np.sin(p1) - h1 * np.sin(phi)) / math.sin(a)
    y = (h1 * np.cos(phi) - h * np.cos(p1)) / math.sin(a)
    return ConvexPolygon(np.column_stack([x, y]))


def recentre(h) -> np.ndarray:
    """Support values of the same polygon translated so its centroid is the origin."""
    c = support_to_polygon(h).centroid
    phi = support_angles(len(h))
    return np.asarray(h) - (c[0] * np.cos(phi) + c[1] * np.sin(phi))


def regularity_deviation(h) -> float:
    """max |h_i - mean| / mean after centring; 0 for a regular m-gon."""
    hc = recentre(h)
    return float(np.max(np.abs(hc - hc.mean())) / hc.mean())


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_support_values(m: int, rng, amplitude: float = 0.3) -> np.ndarray:
    """Low-frequency Fourier perturbation plus noise of the constant support vector."""
    phi = support_angles(m)
    h = np.ones(m)
    if amplitude > 0:
        kmax = max(2, min(6, m // 2))
        for k in range(2, kmax + 1):
            h += amplitude * rng.uniform(-1, 1) / (k - 1) * np.cos(k * phi + rng.uniform(0, 2 * np.pi))
        h += 0.25 * amplitude * rng.uniform(-1, 1, m)
    h = repair_convexity(h)
    if np.min(h) <= 0:
        h = recentre(h)
    return h


def random_convex(m: int, P_target: float, seed=None, amplitude: float = 0.3) -> SupportVector:
    h = random_support_values(m, _rng(seed), amplitude)
    h = h * (P_target / support_perimeter(h))
    return SupportVector(h)


# --- theorem fuzzing ---------------------------------------------------------

@dataclass
class MaximalityReport:
    P: float
    beta: float
    delta: float
    resolution: tuple
    I_disk: float
    fem_disk: float
    tol: float
    values: list
    margins: list
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["min_margin"] = min(self.margins) if self.margins else None
        return d


def maximality_test(samples: int, m: int, P: float, beta: float, delta: float,
                    resolution=(128, 32), seed=0, amplitude: float = 0.3, shapes=None) -> MaximalityReport:
    """Check FEM dispersion of random perimeter-P shapes against the equal-perimeter disk.

    The tolerance is twice the FEM error of the disk at the same resolution.
    Extra ``shapes`` (support vectors or polygons) are appended to the random ones.
    """
    R = P / (2 * math.pi)
    I_disk = dispersion_ball(RadialConfig(2, R, beta, delta))
    fem_disk = dispersion_of(Disk(R), beta, delta, resolution)
    tol = 2 * abs(fem_disk - I_disk)
    rng = _rng(seed)
    hs = [random_convex(m, P, rng, amplitude).h for _ in range(samples)]
    polys = [support_to_polygon(h) for h in hs] + list(shapes or [])
    polys = [p if isinstance(p, ConvexPolygon) else support_to_polygon(p) for p in polys]
    values = parallel_map(partial(dispersion_of, beta=beta, delta=delta, resolution=resolution), polys)
    margins = [I_disk + tol - v for v in values]
    violations = [{"vertices": p.vertices.tolist(), "I": v, "margin": mg}
                  for p, v, mg in zip(polys, values, margins) if mg < 0]
    return MaximalityReport(P, beta, delta, tuple(resolution), I_disk, fem_disk, tol,
                            values, margins, violations)


# --- minimization --------------------------------------------------------------

@dataclass
class SearchConfig:
    constraint: str = "perimeter"
    value: float = 2 * math.pi
    m: int = 16
    beta: float = 1.0
    delta: float = 1.0
    seed: int = 0
    restarts: int = 10
    max_iters: int = 400
    resolution: tuple = (64, 16)
    final_resolution: tuple = (256, 64)
    amplitude: float = 0.3
    step: float = 0.05

    def __post_init__(self):
        if self.constraint not in ("perimeter", "area"):
            raise ValueError("constraint must be 'perimeter' or 'area'")
        if not self.value > 0:
            raise ValueError("constraint value must be positive")
        if self.m < 3 or self.restarts < 1 or self.max_iters < 0:
            raise ValueError("need m >= 3, restarts >= 1, max_iters >= 0")
        self.resolution = tuple(self.resolution)
        self.final_resolution = tuple(self.final_resolution)


def normalized_polygon(h, config: SearchConfig) -> ConvexPolygon:
    """Polygon of (feasible) support values rescaled onto the constraint."""
    if config.constraint == "perimeter":
        lam = config.value / support_perimeter(h)
    else:
        lam = math.sqrt(config.value / support_area(h))
    return support_to_polygon(lam * np.asarray(h))


def objective(h, config: SearchConfig, resolution=None) -> float:
    """FEM dispersion of the constraint-normalized, repaired shape plus a convexity penalty.

    The penalty uses the violation relative to the mean support value so that
    the objective is invariant under h -> lambda*h.
    """
    h = np.asarray(h, dtype=float)
    scale = float(np.mean(h))
    if not np.all(np.isfinite(h)) or scale <= 0:
        return PENALTY_INFEASIBLE
    penalty = PENALTY_WEIGHT * convexity_violation(h) / scale
    try:
        hr = repair_convexity(h)
        if support_perimeter(hr) <= 0 or support_area(hr) <= 0:
            return PENALTY_INFEASIBLE
        poly = normalized_polygon(hr, config)
        I = dispersion_of(poly, config.beta, config.delta, resolution or config.resolution)
    except (ValueError, RuntimeError):
        return PENALTY_INFEASIBLE
    return I + penalty


@dataclass
class SearchTrace:
    config: SearchConfig
    iterations: list = field(default_factory=list)  # dicts: restart, iter, h, objective
    initial_values: list = field(default_factory=list)
    restart_values: list = field(default_factory=list)
    best_h: list | None = None
    best_value: float | None = None
    final_value: float | None = None
    best_polygon: list | None = None

    def to_json(self) -> dict:
        return {
            "config": asdict(self.config),
            "initial_values": self.initial_values,
            "restart_values": self.restart_values,
            "best_h": self.best_h,
            "best_value": self.best_value,
            "final_value": self.final_value,
            "best_polygon": self.best_polygon,
        }


def _run_restart(r: int, config: SearchConfig):
    rng = np.random.default_rng([config.seed, r])
    h0 = random_support_values(config.m, rng, config.amplitude)
    f0 = objective(h0, config)
    iters = [{"restart": r, "iter": 0, "h": h0.tolist(), "objective": f0}]
    if config.max_iters == 0 or f0 >= PENALTY_INFEASIBLE:
        return h0, f0, f0, iters
    simplex = np.vstack([h0] + [h0 + config.step * np.mean(h0) * e for e in np.eye(config.m)])

    def callback(intermediate_result):
        iters.append({"restart": r, "iter": len(iters), "h": intermediate_result.x.tolist(),
                      "objective": float(intermediate_result.fun)})

    res = minimize(objective, h0, args=(config,), method="Nelder-Mead", callback=callback,
                   options={"maxiter": config.max_iters, "initial_simplex": simplex,
                            "xatol": 1e-7, "fatol": 1e-10})
    if res.fun <= f0:
        return np.asarray(res.x), float(res.fun), f0, iters
    return h0, f0, f0, iters


def minimize_dispersion(config: SearchConfig) -> SearchTrace:
    """Nelder-Mead over support values with seeded restarts; best-of."""
    trace = SearchTrace(config)
    results = parallel_map(partial(_run_restart, config=config), range(config.restarts))
    best = None
    for h, f, f0, iters in results:
        trace.iterations.extend(iters)
        trace.initial_values.append(f0)
        trace.restart_values.append(f)
        if f < PENALTY_INFEASIBLE and (best is None or f < best[1]):
            best = (h, f)
    if best is None:
        raise RuntimeError("no restart produced a feasible shape")
    h = repair_convexity(best[0])
    poly = normalized_polygon(h, config)
    trace.best_h = h.tolist()
    trace.best_value = best[1]
    trace.best_polygon = poly.vertices.tolist()
    trace.final_value = dispersion_of(poly, config.beta, config.delta, config.final_resolution)
    return trace
