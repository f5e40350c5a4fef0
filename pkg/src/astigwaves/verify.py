"""Finite-difference PDE residual oracles.

The ground-truth check of the package: every closed-form family must make
the residual of its equation, (d_t^2 - Lap + m^2) u, vanish to O(h^2) under
second-order central differences.  Fields are evaluated in log form and the
whole stencil is renormalized by the center value before differencing, so
the check works unchanged at magnitudes like exp(-25000); linearity of the
equations makes the renormalized residual meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvaluationError, ParameterError
from .lcfield import LogComplexField, SpacetimePoint


@dataclass(frozen=True)
class ResidualReport:
    point: SpacetimePoint
    h: float
    residual: float
    normalization: float
    order_estimate: float | None = None


@dataclass(frozen=True)
class ScanReport:
    max_residual: float
    mean_residual: float
    worst_point: SpacetimePoint
    h: float
    n_points: int


@dataclass(frozen=True)
class ConvergenceReport:
    order: float | None
    residuals: tuple
    steps: tuple
    floor_limited: bool

    @property
    def floor(self):
        return min(self.residuals)


def _stencil_arrays(t, z, r, h):
    """Stencil offsets (center, t+-h, z+-h, r_j+-h) stacked on a new axis."""
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    r = np.asarray(r, dtype=float)
    d = r.shape[-1]
    k = 2 * d + 5
    ts = np.broadcast_to(t, (k,) + t.shape).copy()
    zs = np.broadcast_to(z, (k,) + z.shape).copy()
    rs = np.broadcast_to(r, (k,) + r.shape).copy()
    ts[1] += h
    ts[2] -= h
    zs[3] += h
    zs[4] -= h
    for j in range(d):
        rs[5 + 2 * j, ..., j] += h
        rs[6 + 2 * j, ..., j] -= h
    return ts, zs, rs


def _renormalized_stencil(field, t, z, r, h):
    ts, zs, rs = _stencil_arrays(t, z, r, h)
    lf = field(SpacetimePoint(ts, zs, rs))
    if not isinstance(lf, LogComplexField):
        lf = LogComplexField.from_value(lf)
    log_vals = np.asarray(lf.log_abs, dtype=float) + 1j * np.asarray(lf.phase, dtype=float)
    if not np.all(np.isfinite(log_vals)):
        raise EvaluationError("field evaluation non-finite inside the stencil")
    return np.exp(log_vals - log_vals[0])


def _kgf_operator(w, h, m, d):
    """(d_t^2 - Lap + m^2) of the renormalized stencil values w."""
    utt = (w[1] - 2.0 * w[0] + w[2]) / h ** 2
    lap = (w[3] - 2.0 * w[0] + w[4]) / h ** 2
    for j in range(d):
        lap = lap + (w[5 + 2 * j] - 2.0 * w[0] + w[6 + 2 * j]) / h ** 2
    num = np.abs(utt - lap + m * m * w[0])
    norm = np.maximum(np.maximum(np.abs(utt), np.abs(lap)), m * m * np.abs(w[0]))
    return num, norm


def fd_residual(field, point: SpacetimePoint, h: float, m: float = 0.0) -> ResidualReport:
    """Normalized residual of (d_t^2 - Lap + m^2) u at one point.

    ``field`` maps a SpacetimePoint (array entries allowed) to a
    LogComplexField.  m = 0 checks the wave equation.
    """
    d = point.dim
    w = _renormalized_stencil(field, point.t, point.z, point.r_perp, h)
    num, norm = _kgf_operator(w, h, m, d)
    if norm == 0:
        raise EvaluationError("degenerate point: residual normalization is zero")
    return ResidualReport(point=point, h=h, residual=float(num / norm),
                          normalization=float(norm))


def residual_scan(field, points: SpacetimePoint, h: float, m: float = 0.0) -> ScanReport:
    """Vectorized residual scan over a batch of points.

    ``points`` holds equal-shaped arrays; the entire batch and its stencils
    are evaluated in a single field call.  The reduction order is fixed by
    the flattened grid index, so results are reproducible.
    """
    t = np.asarray(points.t, dtype=float).ravel()
    z = np.asarray(points.z, dtype=float).ravel()
    r = np.asarray(points.r_perp, dtype=float).reshape(t.size, -1)
    if t.size == 0:
        raise ParameterError("empty grid")
    d = r.shape[-1]
    w = _renormalized_stencil(field, t, z, r, h)
    num, norm = _kgf_operator(w, h, m, d)
    if np.any(norm == 0):
        raise EvaluationError("degenerate point inside scan grid")
    res = num / norm
    idx = int(np.argmax(res))
    worst = SpacetimePoint(t[idx], z[idx], r[idx])
    return ScanReport(max_residual=float(res[idx]), mean_residual=float(np.mean(res)),
                      worst_point=worst, h=h, n_points=t.size)


def convergence_order(field, point: SpacetimePoint, m: float, h0: float) -> ConvergenceReport:
    """Richardson slope of the residual under step halving h0, h0/2, h0/4."""
    steps = (h0, h0 / 2.0, h0 / 4.0)
    res = tuple(fd_residual(field, point, h, m).residual for h in steps)
    if not (res[0] > res[1] > res[2]):
        return ConvergenceReport(order=None, residuals=res, steps=steps,
                                 floor_limited=True)
    x = np.log(steps)
    y = np.log(res)
    slope = float(np.polyfit(x, y, 1)[0])
    return ConvergenceReport(order=slope, residuals=res, steps=steps,
                             floor_limited=False)


def grid_points(t, z_range, x_range, n, d, y_range=None) -> SpacetimePoint:
    """Rectangular evaluation lattice at fixed time (helper for scans).

    Builds an n x n (x n) lattice over (z, x[, y]); any remaining transverse
    coordinates sit at zero.
    """
    if n < 2:
        raise ParameterError("grid needs at least 2 samples per axis")
    zs = np.linspace(*z_range, n)
    xs = np.linspace(*x_range, n)
    if d >= 2 and y_range is not None:
        ys = np.linspace(*y_range, n)
        zz, xx, yy = np.meshgrid(zs, xs, ys, indexing="ij")
        r = np.zeros(zz.shape + (d,))
        r[..., 0] = xx
        r[..., 1] = yy
    else:
        zz, xx = np.meshgrid(zs, xs, indexing="ij")
        r = np.zeros(zz.shape + (d,))
        r[..., 0] = xx
    tt = np.full(zz.shape, float(t))
    return SpacetimePoint(tt, zz, r)
