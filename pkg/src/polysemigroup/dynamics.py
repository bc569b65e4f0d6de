"""Numerical diagnostics: Julia sets by inverse iteration, maximal-entropy
measure approximation by preimage equidistribution, Hausdorff distances, and
complete-invariance checks.

Everything here is double precision and diagnostic only; verdicts are decided
algebraically elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np
from scipy.spatial import cKDTree

from .polynomials import Polynomial


class RootFindingError(RuntimeError):
    pass


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # complex128
    source: str         # 'inverse-iteration' | 'escape-boundary'

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("point cloud must be non-empty")


@dataclass(frozen=True)
class GridMeasure:
    bounds: tuple        # (x0, x1, y0, y1)
    resolution: tuple    # (nx, ny)
    mass: np.ndarray     # shape (ny, nx), sums to 1
    start_used: complex = 0j
    restarts: int = 0


def escape_radius(p: Polynomial) -> float:
    cs = np.asarray(p.complex_coeffs())
    lead = abs(cs[-1])
    return 1.0 + max(1.0, float(np.sum(np.abs(cs[:-1])) / lead))


def _preimages(coeffs: np.ndarray, targets: np.ndarray, polish: bool = True) -> np.ndarray:
    """All degree-n preimages per target: roots of p(w) = z, shape (len(targets), n)."""
    n = len(coeffs) - 1
    N = len(targets)
    comp = np.zeros((N, n, n), dtype=complex)
    idx = np.arange(n - 1)
    comp[:, idx + 1, idx] = 1.0
    last = np.empty((N, n), dtype=complex)
    last[:] = -(coeffs[:-1] / coeffs[-1])
    last[:, 0] += targets / coeffs[-1]
    comp[:, :, n - 1] = last
    roots = np.linalg.eigvals(comp)
    if polish:
        pw = np.zeros_like(roots)
        dpw = np.zeros_like(roots)
        for c in coeffs[::-1]:
            dpw = dpw * roots + pw
            pw = pw * roots + c
        denom_ok = np.abs(dpw) > 1e-14
        corr = np.where(denom_ok, (pw - targets[:, None]) / np.where(denom_ok, dpw, 1.0), 0.0)
        roots = roots - corr
    if not np.all(np.isfinite(roots)):
        raise RootFindingError("non-finite preimage roots")
    return roots


def julia_inverse_iteration(p: Polynomial, n_points: int = 10_000, burn_in: int = 50,
                            seed: int = 0) -> PointCloud:
    """Random backward orbits from a generic start; deterministic under the seed."""
    if p.degree < 2:
        raise ValueError("need degree >= 2")
    coeffs = np.asarray(p.complex_coeffs())
    n = p.degree
    rng = np.random.default_rng(seed)
    z = np.full(n_points, 0.4310 + 0.2719j, dtype=complex)
    retries = 0
    for _ in range(burn_in):
        try:
            roots = _preimages(coeffs, z)
        except RootFindingError:
            retries += 1
            if retries > 8:
                raise
            z = z + (rng.standard_normal(n_points) + 1j * rng.standard_normal(n_points)) * 1e-9
            continue
        pick = rng.integers(0, n, size=n_points)
        z = roots[np.arange(n_points), pick]
    R = escape_radius(p)
    keep = np.abs(z) <= R + 1e-9
    if not np.all(keep):
        z = z[keep]
        if len(z) == 0:
            raise RootFindingError("all orbit points escaped the dynamical radius")
    return PointCloud(points=z, source="inverse-iteration")


def _default_bounds(p: Polynomial) -> tuple:
    R = escape_radius(p)
    return (-R, R, -R, R)


def mme_pullback(p: Polynomial, depth: int, start: complex = 0.4310 + 0.2719j,
                 bounds: tuple | None = None, resolution: tuple = (256, 256),
                 preimage_cap: int = 2_000_000, seed: int = 0) -> GridMeasure:
    """Equal mass on the depth-level preimages of a generic start, binned to a grid."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = p.degree
    if n ** depth > preimage_cap:
        raise ValueError(f"{n}**{depth} preimages exceed the cap {preimage_cap}")
    coeffs = np.asarray(p.complex_coeffs())
    rng = np.random.default_rng(seed)
    restarts = 0
    z0 = complex(start)
    while True:
        pts = np.array([z0], dtype=complex)
        collapsed = False
        for _ in range(depth):
            roots = _preimages(coeffs, pts)
            pts = roots.reshape(-1)
            uniq = np.unique(np.round(pts, 9))
            if len(uniq) < 0.6 * len(pts):
                collapsed = True
                break
        if not collapsed:
            break
        restarts += 1
        if restarts > 5:
            raise RootFindingError("could not find a non-exceptional start point")
        z0 = complex(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8))
    if bounds is None:
        bounds = _default_bounds(p)
    x0, x1, y0, y1 = bounds
    nx, ny = resolution
    hist, _, _ = np.histogram2d(pts.imag, pts.real, bins=(ny, nx),
                                range=((y0, y1), (x0, x1)))
    total = hist.sum()
    if total == 0:
        raise RootFindingError("no preimages landed inside the grid bounds")
    mass = hist / total
    return GridMeasure(bounds=bounds, resolution=(nx, ny), mass=mass,
                       start_used=z0, restarts=restarts)


def julia_distance(a: PointCloud, b: PointCloud) -> float:
    """Symmetric Hausdorff distance between the two point sets."""
    pa = np.column_stack([a.points.real, a.points.imag])
    pb = np.column_stack([b.points.real, b.points.imag])
    ta, tb = cKDTree(pa), cKDTree(pb)
    d_ab = tb.query(pa, k=1)[0].max()
    d_ba = ta.query(pb, k=1)[0].max()
    return float(max(d_ab, d_ba))


def check_pullback_invariance(p: Polynomial, cloud: PointCloud) -> float:
    """Hausdorff distance between p^{-1}(cloud) and cloud; small = invariant."""
    coeffs = np.asarray(p.complex_coeffs())
    roots = _preimages(coeffs, cloud.points).reshape(-1)
    pre = PointCloud(points=roots, source=cloud.source)
    return julia_distance(pre, cloud)


# ---------------------------------------------------------------------------
# escape-time rendering and exports
# ---------------------------------------------------------------------------

def escape_time_grid(p: Polynomial, bounds: tuple | None = None,
                     resolution: tuple = (512, 512), max_iter: int = 64) -> np.ndarray:
    """Iterations to escape per pixel (max_iter for bounded points); row-major."""
    if bounds is None:
        bounds = _default_bounds(p)
    x0, x1, y0, y1 = bounds
    nx, ny = resolution
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    Z = xs[None, :] + 1j * ys[:, None]
    coeffs = np.asarray(p.complex_coeffs())
    R = escape_radius(p)
    counts = np.full(Z.shape, max_iter, dtype=np.uint16)
    alive = np.ones(Z.shape, dtype=bool)
    W = Z.copy()
    for it in range(max_iter):
        V = np.zeros_like(W)
        for c in coeffs[::-1]:
            V = V * W + c
        W = np.where(alive, V, W)
        escaped = alive & (np.abs(W) > R)
        counts[escaped] = it
        alive &= ~escaped
        if not alive.any():
            break
    return counts


def escape_boundary_cloud(p: Polynomial, resolution: tuple = (512, 512),
                          max_iter: int = 64) -> PointCloud:
    """Pixel centers on the escaped/bounded interface of the escape-time grid."""
    bounds = _default_bounds(p)
    counts = escape_time_grid(p, bounds, resolution, max_iter)
    bounded = counts >= max_iter
    edge = np.zeros_like(bounded)
    edge[:-1, :] |= bounded[:-1, :] ^ bounded[1:, :]
    edge[:, :-1] |= bounded[:, :-1] ^ bounded[:, 1:]
    ys, xs = np.nonzero(edge)
    x0, x1, y0, y1 = bounds
    nx, ny = resolution
    px = x0 + (x1 - x0) * (xs + 0.5) / nx
    py = y0 + (y1 - y0) * (ys + 0.5) / ny
    return PointCloud(points=px + 1j * py, source="escape-boundary")


def cloud_to_csv(cloud: PointCloud, path: str):
    with open(path, "w") as fh:
        fh.write("re,im\n")
        for z in cloud.points:
            fh.write(f"{z.real!r},{z.imag!r}\n")


def grid_to_csv(grid: GridMeasure, path: str):
    np.savetxt(path, grid.mass, delimiter=",")


def write_pgm16(array2d: np.ndarray, path: str):
    """Binary 16-bit PGM (P5), row-major, linear values (no gamma)."""
    a = np.asarray(array2d, dtype=np.float64)
    peak = a.max()
    scaled = (a / peak * 65535.0).astype(">u2") if peak > 0 else a.astype(">u2")
    ny, nx = scaled.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n65535\n".encode())
        fh.write(scaled.tobytes())


def grid_to_pgm(grid: GridMeasure, path: str):
    write_pgm16(grid.mass, path)


def uniform_circle_measure(bounds: tuple, resolution: tuple, radius: float = 1.0,
                           center: complex = 0j, samples_per_cell: int = 0) -> GridMeasure:
    """Arc-length measure of a circle binned to the grid (analytic oracle).

    Integrates the uniform angle measure with a fine fixed subdivision, far
    below the grid scale, which is exact up to the reported mass granularity.
    """
    x0, x1, y0, y1 = bounds
    nx, ny = resolution
    n_sub = 64 * max(nx, ny)
    theta = (np.arange(n_sub) + 0.5) * (2 * np.pi / n_sub)
    zs = center + radius * np.exp(1j * theta)
    hist, _, _ = np.histogram2d(zs.imag, zs.real, bins=(ny, nx),
                                range=((y0, y1), (x0, x1)))
    mass = hist / hist.sum()
    return GridMeasure(bounds=bounds, resolution=resolution, mass=mass)


def total_variation(a: GridMeasure, b: GridMeasure) -> float:
    if a.resolution != b.resolution or a.bounds != b.bounds:
        raise ValueError("grids must share bounds and resolution")
    return float(0.5 * np.abs(a.mass - b.mass).sum())
