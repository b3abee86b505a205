"""P1 finite elements for the Robin-Dirichlet insulation problem in the plane.

The insulating layer is meshed as a structured polar graph between two
star-shaped boundaries around a common centre.  The conductor boundary carries
u = 1, the outer wall either the Robin condition du/dn + beta*u = 0 or, for
``beta = DIRICHLET``, u = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .geometry import (ConvexPolygon, Disk, OffsetBoundary, Region, minkowski_offset,
                       perimeter, radial_function)
from .radial import DIRICHLET, is_dirichlet

DEFAULT_RESOLUTION = (256, 64)


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class AnnularMesh:
    nodes: np.ndarray
    triangles: np.ndarray
    inner_nodes: np.ndarray
    outer_nodes: np.ndarray
    outer_edges: np.ndarray
    outer_edge_lengths: np.ndarray
    center: np.ndarray
    n_theta: int
    n_s: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        a, b, c = p[:, 0], p[:, 1], p[:, 2]
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    def euler_characteristic(self) -> int:
        t = self.triangles
        e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        n_edges = len(np.unique(e, axis=0))
        return self.n_nodes - n_edges + len(t)

    def boundary_edges(self) -> np.ndarray:
        t = self.triangles
        e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        return uniq[counts == 1]

    def to_ascii(self) -> str:
        lines = [f"{self.n_nodes} {len(self.triangles)}"]
        lines += [f"{x:.17g} {y:.17g}" for x, y in self.nodes]
        lines += [f"{a} {b} {c}" for a, b, c in self.triangles]
        return "\n".join(lines) + "\n"


def _feature_angles(region, center) -> np.ndarray:
    if isinstance(region, ConvexPolygon):
        rel = region.vertices - center
        return np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * np.pi)
    return np.empty(0)


def _equidistributed_angles(inner, outer, center, n_theta: int) -> np.ndarray:
    """Angles whose boundary points are evenly spread in arc length.

    The monitor averages normalized arc length along both boundaries, so
    concentric circles give the uniform grid.
    """
    fine = 2 * np.pi * np.arange(16 * n_theta + 1) / (16 * n_theta)
    levels = np.zeros_like(fine)
    for region in (inner, outer):
        r = radial_function(region, center, fine)
        pts = np.column_stack([r * np.cos(fine), r * np.sin(fine)])
        s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
        levels += 0.5 * s / s[-1]
    return np.interp(np.arange(n_theta) / n_theta, levels, fine)


def _snap_features(theta: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Move the nearest free grid angle onto each polygon corner (insert if taken)."""
    theta = theta.copy()
    n = len(theta)
    taken = np.zeros(n, dtype=bool)
    extra = []
    for f in np.sort(features):
        gaps = np.abs((f - theta + np.pi) % (2 * np.pi) - np.pi)
        i = int(np.argmin(gaps))
        if gaps[i] < 1e-12:
            taken[i] = True
        elif not taken[i]:
            theta[i] = f
            taken[i] = True
        else:
            extra.append(f)
    theta = np.sort(np.mod(np.concatenate([theta, extra]), 2 * np.pi))
    keep = np.concatenate([[True], np.diff(theta) > 1e-12])
    return theta[keep]


def build_mesh(inner: Region, outer: Region, center=None, n_theta: int = 256, n_s: int = 64) -> AnnularMesh:
    """Structured polar-graph mesh of the region between two star-shaped boundaries.

    Rays are spread evenly in boundary arc length, and polygon corners of
    either boundary are snapped onto the ray set so polygonal boundaries are
    represented exactly.
    """
    if n_theta < 8 or n_s < 2:
        raise ValueError("resolution must satisfy n_theta >= 8 and n_s >= 2")
    if center is None:
        center = inner.centroid
    center = np.asarray(center, dtype=float)

    feats = np.concatenate([_feature_angles(inner, center), _feature_angles(outer, center)])
    theta = _snap_features(_equidistributed_angles(inner, outer, center, n_theta), feats)
    nt = len(theta)
    r_in = radial_function(inner, center, theta)
    r_out = radial_function(outer, center, theta)
    if np.any(r_out <= r_in * (1 + 1e-12)):
        raise ValueError("outer boundary must strictly contain the inner one")

    s = np.linspace(0.0, 1.0, n_s + 1)
    r = r_in[:, None] + s[None, :] * (r_out - r_in)[:, None]  # (nt, n_s+1)
    nodes = np.stack([center[0] + r * np.cos(theta)[:, None],
                      center[1] + r * np.sin(theta)[:, None]], axis=-1).reshape(-1, 2)

    idx = np.arange(nt * (n_s + 1)).reshape(nt, n_s + 1)
    a = idx[:, :-1]
    b = idx[:, 1:]
    c = np.roll(idx, -1, axis=0)[:, 1:]
    d = np.roll(idx, -1, axis=0)[:, :-1]
    a, b, c, d = (x.ravel() for x in (a, b, c, d))
    # quad a-b-c-d is CCW (outward, then forward in theta); cut the shorter diagonal
    ac = np.sum((nodes[a] - nodes[c]) ** 2, axis=1)
    bd = np.sum((nodes[b] - nodes[d]) ** 2, axis=1)
    use_ac = ac <= bd
    t1 = np.where(use_ac[:, None], np.column_stack([a, b, c]), np.column_stack([a, b, d]))
    t2 = np.where(use_ac[:, None], np.column_stack([a, c, d]), np.column_stack([b, c, d]))
    tris = np.concatenate([t1, t2])

    outer_nodes = idx[:, -1]
    oe = np.column_stack([outer_nodes, np.roll(outer_nodes, -1)])
    lengths = np.linalg.norm(nodes[oe[:, 1]] - nodes[oe[:, 0]], axis=1)

    mesh = AnnularMesh(nodes, tris, idx[:, 0].copy(), outer_nodes.copy(), oe, lengths,
                       center, n_theta, n_s)
    if np.any(mesh.triangle_areas() <= 0):
        raise ValueError("mesh generation produced inverted triangles")
    return mesh


def build_offset_mesh(D: ConvexPolygon, delta: float, n_theta: int = 256, n_s: int = 64) -> AnnularMesh:
    """Structured mesh of the layer (D + delta*B) minus D in normal coordinates.

    Each outer boundary point q is joined to its nearest point q - delta*nu on
    D; the lines are split into n_s equal layers.  Along arcs the inner ends
    coincide at a polygon vertex and the first layer degenerates into a fan.
    About n_theta columns are spread by outer arc length, with at least
    n_theta/8 per full turn of arc.
    """
    if n_theta < 8 or n_s < 2:
        raise ValueError("resolution must satisfy n_theta >= 8 and n_s >= 2")
    if not delta > 0:
        raise ValueError("offset mesh needs delta > 0")
    v, nrm, e = D.vertices, D.outward_normals, D.edges
    m = len(v)
    L_out = perimeter(D) + 2 * np.pi * delta
    feet, normals, foot_id = [], [], []
    next_id = m  # ids < m are vertices
    for i in range(m):
        j = (i + 1) % m
        k = max(1, int(round(n_theta * np.hypot(*e[i]) / L_out)))
        for t in np.arange(k) / k:
            feet.append(v[i] + t * e[i])
            normals.append(nrm[i])
            if t == 0:
                foot_id.append(i)
            else:
                foot_id.append(next_id)
                next_id += 1
        a0 = np.arctan2(nrm[i, 1], nrm[i, 0])
        sweep = (np.arctan2(nrm[j, 1], nrm[j, 0]) - a0) % (2 * np.pi)
        k = max(1, int(round(n_theta * delta * sweep / L_out)), int(np.ceil(sweep / (2 * np.pi) * n_theta / 8)))
        for a in a0 + sweep * np.arange(k) / k:
            feet.append(v[j])
            normals.append((np.cos(a), np.sin(a)))
            foot_id.append(j)
    feet = np.array(feet)
    normals = np.array(normals)
    foot_id = np.array(foot_id)
    ncol = len(feet)

    # inner nodes: one per distinct foot, numbered first
    uniq, first, inv = np.unique(foot_id, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    inner_idx = rank[inv]
    n_inner = len(uniq)
    inner_pts = feet[first[order]]

    s = np.linspace(0.0, 1.0, n_s + 1)[1:]
    layer = feet[:, None, :] + delta * s[None, :, None] * normals[:, None, :]
    nodes = np.concatenate([inner_pts, layer.reshape(-1, 2)])
    idx = np.empty((ncol, n_s + 1), dtype=int)
    idx[:, 0] = inner_idx
    idx[:, 1:] = n_inner + np.arange(ncol * n_s).reshape(ncol, n_s)

    a = idx[:, :-1]
    b = idx[:, 1:]
    c = np.roll(idx, -1, axis=0)[:, 1:]
    d = np.roll(idx, -1, axis=0)[:, :-1]
    a, b, c, d = (x.ravel() for x in (a, b, c, d))
    fan = a == d
    ac = np.sum((nodes[a] - nodes[c]) ** 2, axis=1)
    bd = np.sum((nodes[b] - nodes[d]) ** 2, axis=1)
    use_ac = (ac <= bd) | fan
    t1 = np.where(use_ac[:, None], np.column_stack([a, b, c]), np.column_stack([a, b, d]))
    t2 = np.where(use_ac[:, None], np.column_stack([a, c, d]), np.column_stack([b, c, d]))
    tris = np.concatenate([t1, t2[~fan]])

    outer_nodes = idx[:, -1]
    oe = np.column_stack([outer_nodes, np.roll(outer_nodes, -1)])
    lengths = np.linalg.norm(nodes[oe[:, 1]] - nodes[oe[:, 0]], axis=1)
    mesh = AnnularMesh(nodes, tris, np.arange(n_inner), outer_nodes.copy(), oe, lengths,
                       D.centroid, n_theta, n_s)
    if np.any(mesh.triangle_areas() <= 0):
        raise ValueError("mesh generation produced inverted triangles")
    return mesh


def assemble(mesh: AnnularMesh):
    """Return (stiffness, outer edge mass, outer edge load vector 'integral of phi')."""
    p = mesh.nodes[mesh.triangles]
    area = mesh.triangle_areas()
    # gradients of barycentric basis functions: rotate opposite edges
    e0 = p[:, 2] - p[:, 1]
    e1 = p[:, 0] - p[:, 2]
    e2 = p[:, 1] - p[:, 0]
    g = np.stack([e0, e1, e2], axis=1)
    g = np.stack([-g[..., 1], g[..., 0]], axis=-1) / (2 * area)[:, None, None]
    kloc = np.einsum("tik,tjk->tij", g, g) * area[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    N = mesh.n_nodes
    K = sp.coo_matrix((kloc.ravel(), (rows, cols)), shape=(N, N)).tocsr()

    L = mesh.outer_edge_lengths
    e = mesh.outer_edges
    mloc = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    vals = (L[:, None, None] * mloc).ravel()
    r = np.repeat(e, 2, axis=1).ravel()
    c = np.tile(e, (1, 2)).ravel()
    M = sp.coo_matrix((vals, (r, c)), shape=(N, N)).tocsr()
    f = np.zeros(N)
    np.add.at(f, e[:, 0], 0.5 * L)
    np.add.at(f, e[:, 1], 0.5 * L)
    return K, M, f


def pcg(A, b, x0=None, rtol=1e-12, maxiter=None):
    """Jacobi-preconditioned conjugate gradients. Returns (x, iterations, relres)."""
    n = len(b)
    maxiter = maxiter or n
    dinv = 1.0 / A.diagonal()
    x = np.zeros(n) if x0 is None else x0.copy()
    r = b - A @ x
    nb = np.linalg.norm(b)
    if nb == 0:
        return np.zeros(n), 0, 0.0
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0:
            raise SolverError(f"matrix not positive definite (p.Ap = {pAp:.3e} at iteration {it})")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        res = np.linalg.norm(r) / nb
        if res <= rtol:
            return x, it, res
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, maxiter, np.linalg.norm(b - A @ x) / nb


@dataclass(frozen=True, eq=False)
class FemSolution:
    mesh: AnnularMesh
    beta: float
    u: np.ndarray
    energy: float
    boundary_integral: float  # beta * integral of u over the outer wall (flux in Dirichlet mode)
    dispersion: float
    iterations: int
    residual: float
    outer_length: float = field(default=0.0)

    def to_json(self) -> dict:
        return {
            "I": self.dispersion,
            "energy": self.energy,
            "boundary_integral": self.boundary_integral,
            "resolution": [self.mesh.n_theta, self.mesh.n_s],
            "residual": self.residual,
        }


def solve(mesh: AnnularMesh, beta: float, rtol: float = 1e-12) -> FemSolution:
    """Solve the Robin-Dirichlet problem (or the Dirichlet problem for beta = DIRICHLET)."""
    if not beta >= 0:
        raise ValueError("beta must be >= 0 or DIRICHLET")
    K, M, f = assemble(mesh)
    N = mesh.n_nodes
    dirichlet = is_dirichlet(beta)
    fixed = np.zeros(N, dtype=bool)
    fixed[mesh.inner_nodes] = True
    if dirichlet:
        fixed[mesh.outer_nodes] = True
        A = K
    else:
        A = K + beta * M
    u = np.zeros(N)
    u[mesh.inner_nodes] = 1.0
    free = np.flatnonzero(~fixed)

    A = A.tocsr()
    Aff = A[free][:, free]
    rhs = -(A[free] @ u)
    maxiter = int(50 * math.sqrt(N))
    x, its, res = pcg(Aff, rhs, x0=np.full(len(free), 0.5), rtol=rtol, maxiter=maxiter)
    if not res <= rtol:
        raise SolverError(f"CG did not converge: relative residual {res:.3e} after {its} iterations "
                          f"(nodes={N}, beta={beta})")
    u[free] = x

    outer_len = float(mesh.outer_edge_lengths.sum())
    if dirichlet:
        energy = float(u @ (K @ u))
        ind = np.zeros(N)
        ind[mesh.inner_nodes] = 1.0
        flux = float(u @ (K @ ind))
        return FemSolution(mesh, beta, u, energy, flux, energy, its, res, outer_len)
    energy = float(u @ (K @ u) + beta * (u @ (M @ u)))
    bint = float(beta * (f @ u))
    return FemSolution(mesh, beta, u, energy, bint, bint, its, res, outer_len)


def outer_of(D, delta: float):
    """Exact outer wall D + delta*B."""
    if isinstance(D, Disk):
        return Disk(D.radius + delta, D.center)
    return minkowski_offset(D, delta)


def region_perimeter(D) -> float:
    if isinstance(D, Disk):
        return 2 * math.pi * D.radius
    if isinstance(D, OffsetBoundary):
        return D.length
    return perimeter(D)


def dispersion_of(D, beta: float, delta: float, resolution=DEFAULT_RESOLUTION) -> float:
    """Heat dispersion of conductor D insulated by a constant-thickness layer."""
    if delta == 0:
        if is_dirichlet(beta):
            return math.inf
        return beta * region_perimeter(D)
    if beta == 0:
        return 0.0
    return solve_layer(D, beta, delta, resolution).dispersion


def layer_mesh(D, delta: float, resolution=DEFAULT_RESOLUTION) -> AnnularMesh:
    """Mesh of the constant-thickness layer around D (polar for disks, normal otherwise)."""
    if isinstance(D, Disk):
        return build_mesh(D, outer_of(D, delta), None, *resolution)
    return build_offset_mesh(D, delta, *resolution)


def solve_layer(D, beta: float, delta: float, resolution=DEFAULT_RESOLUTION) -> FemSolution:
    return solve(layer_mesh(D, delta, resolution), beta)


def dispersion_general(inner_disk_R: float, outer: ConvexPolygon, center, beta: float,
                       resolution=DEFAULT_RESOLUTION) -> float:
    """Dispersion of the disk B_R(center) inside an arbitrary convex wall."""
    disk = Disk(inner_disk_R, tuple(center))
    rel = outer.vertices - np.asarray(center, dtype=float)
    n = outer.outward_normals
    if np.any(np.sum(n * rel, axis=1) <= inner_disk_R):
        raise ValueError("disk is not strictly contained in the outer polygon")
    if beta == 0:
        return 0.0
    mesh = build_mesh(disk, outer, center, *resolution)
    return solve(mesh, beta).dispersion


@dataclass
class ConvergenceRow:
    h: float
    I: float
    error: float | None
    rate: float | None


def convergence_study(D, beta: float, delta: float, resolutions, reference: float | None = None):
    """Observed convergence of the dispersion under mesh refinement.

    With a ``reference`` value the error is |I_h - reference|; otherwise successive
    differences are used (Richardson-style, needs three levels for a rate).
    Rates are None where undefined (repeated resolutions or zero error).
    """
    rows: list[ConvergenceRow] = []
    values = []
    hs = []
    for nt, ns in resolutions:
        I = dispersion_of(D, beta, delta, (nt, ns))
        h = 2 * math.pi / nt
        values.append(I)
        hs.append(h)
    for k, (h, I) in enumerate(zip(hs, values)):
        if reference is not None:
            err = abs(I - reference)
        elif k + 1 < len(values):
            err = abs(values[k + 1] - I)
        else:
            err = None
        rows.append(ConvergenceRow(h, I, err, None))
    for k in range(1, len(rows)):
        e0, e1 = rows[k - 1].error, rows[k].error
        h0, h1 = rows[k - 1].h, rows[k].h
        if e0 and e1 and h0 != h1:
            rows[k].rate = math.log(e0 / e1) / math.log(h0 / h1)
    return rows
