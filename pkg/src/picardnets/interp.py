"""One-hidden-layer networks that interpolate or approximate scalar functions.

`interp_net_relu` reproduces the piecewise-linear interpolant of given knot
values exactly on all of R (clamped to the boundary values outside the grid).
`interp_net_leaky` realizes the same function under a leaky slope, and
`interp_net_softplus` a smoothed variant whose distance to the piecewise
interpolant is controlled by the sharpness parameter. The `approx_net_*`
constructors pick the grid from a Lipschitz bound and a growth-weighted error
target and return the network together with its audited guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .calculus import activation_wrapper, affine, compose, scalar_mul, sum_same_depth
from .network import Network, param_count


@dataclass(frozen=True)
class Grid:
    """Strictly increasing knot locations, at least two of them."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a grid needs at least two knots in a 1-D array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid knots must be finite")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid knots must be strictly increasing")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def cells(self) -> int:
        return self.points.size - 1


@dataclass(frozen=True)
class LipschitzFn:
    """A scalar function together with a declared Lipschitz constant."""

    fn: Callable[[np.ndarray], np.ndarray]
    lipschitz: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.lipschitz) or self.lipschitz < 0:
            raise ValueError("Lipschitz constant must be finite and >= 0")


@dataclass(frozen=True)
class ApproxGuarantee:
    """Audited size and accuracy data for an approximation network."""

    eps: float
    q: float
    b: float
    K: int
    width: int
    params: int


def _values_array(grid: Grid, values: object) -> np.ndarray:
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != grid.points.shape:
        raise ValueError(f"need one value per knot, got {vals.shape} for {grid.points.shape}")
    if not np.all(np.isfinite(vals)):
        raise ValueError("knot values must be finite")
    return vals


def lin_interp(grid: Grid, values: object, x: object) -> np.ndarray:
    """Piecewise-linear interpolant through the knots, clamped outside the grid."""
    vals = _values_array(grid, values)
    pts = grid.points
    xs = np.asarray(x, dtype=np.float64)
    cell = np.clip(np.searchsorted(pts, xs, side="right") - 1, 0, pts.size - 2)
    x0 = pts[cell]
    x1 = pts[cell + 1]
    frac = np.clip((xs - x0) / (x1 - x0), 0.0, 1.0)
    return vals[cell] + frac * (vals[cell + 1] - vals[cell])


def empirical_modulus(fn: Callable[[np.ndarray], np.ndarray], xs: object, h: float) -> float:
    """Largest |f(x_i) - f(x_j)| over sample pairs closer than h (a test oracle)."""
    xs = np.asarray(xs, dtype=np.float64)
    fx = np.asarray(fn(xs), dtype=np.float64)
    dx = np.abs(xs[:, None] - xs[None, :])
    df = np.abs(fx[:, None] - fx[None, :])
    mask = dx <= h
    return float(df[mask].max()) if np.any(mask) else 0.0


def _kink_coefficients(grid: Grid, values: object) -> np.ndarray:
    """Slope changes c_k of the clamped interpolant at each knot.

    c_k is the outgoing cell slope minus the incoming cell slope, with the two
    boundary knots using a flat (clamped) outer slope, so that
    f_0 + sum_k c_k * max(x - knot_k, 0) equals the interpolant everywhere.
    """
    vals = _values_array(grid, values)
    pts = grid.points
    k = np.arange(pts.size)
    up = np.minimum(k + 1, pts.size - 1)
    lo = np.maximum(k - 1, 0)
    right_slope = (vals[up] - vals[k]) / (pts[up] - pts[np.minimum(k, pts.size - 2)])
    left_slope = (vals[k] - vals[lo]) / (pts[np.maximum(k, 1)] - pts[lo])
    return right_slope - left_slope


def interp_net_relu(grid: Grid, values: object) -> Network:
    """Width K+1 single-hidden-layer net; under max(x, 0) it realizes
    the clamped piecewise-linear interpolant exactly on all of R."""
    coeffs = _kink_coefficients(grid, values)
    vals = _values_array(grid, values)
    terms = [
        scalar_mul(c, compose(activation_wrapper(1), affine([[1.0]], [-p])))
        for c, p in zip(coeffs, grid.points)
    ]
    return compose(affine([[1.0]], [vals[0]]), sum_same_depth(terms))


def interp_net_leaky(grid: Grid, values: object, alpha: float) -> Network:
    """Width 2(K+1) net realizing the same clamped interpolant under a leaky slope.

    Each ReLU kink max(z, 0) is rebuilt from the two-sided identity
    (alpha * a(-s z) + a(s z)) * s / (1 - alpha^2) with s = |1-alpha|/(1-alpha),
    which holds pointwise for every alpha >= 0 except 1.
    """
    if alpha < 0 or alpha == 1.0 or not np.isfinite(alpha):
        raise ValueError("leaky slope must be finite, >= 0, and != 1")
    coeffs = _kink_coefficients(grid, values)
    vals = _values_array(grid, values)
    s = abs(1.0 - alpha) / (1.0 - alpha)
    denom = (1.0 - alpha) * (1.0 - alpha**2)
    terms = []
    for c, p in zip(coeffs, grid.points):
        h = c * abs(1.0 - alpha) * alpha / denom
        terms.append(scalar_mul(h, compose(activation_wrapper(1), affine([[-s]], [s * p]))))
    for c, p in zip(coeffs, grid.points):
        h = c * abs(1.0 - alpha) / denom
        terms.append(scalar_mul(h, compose(activation_wrapper(1), affine([[s]], [-s * p]))))
    return compose(affine([[1.0]], [vals[0]]), sum_same_depth(terms))


def interp_net_softplus(grid: Grid, values: object, beta: float) -> Network:
    """Width K+1 net; under softplus it realizes the interpolant smoothed at
    scale 1/beta, within (log 2 / beta) * sum_k |c_k| of the exact one."""
    if beta <= 0 or not np.isfinite(beta):
        raise ValueError("sharpness must be finite and > 0")
    coeffs = _kink_coefficients(grid, values)
    vals = _values_array(grid, values)
    terms = [
        scalar_mul(c / beta, compose(activation_wrapper(1), affine([[beta]], [-beta * p])))
        for c, p in zip(coeffs, grid.points)
    ]
    return compose(affine([[1.0]], [vals[0]]), sum_same_depth(terms))


def _approx_grid(fn: LipschitzFn, q: float, eps: float) -> tuple[Grid, np.ndarray, float, int]:
    """Pick the symmetric grid for a growth-weighted error target.

    The half-width b solves max(1, 2L) = eps * b**(q-1), so outside [-b, b] the
    clamped interpolant's error is absorbed by the weight max(1, |x|**q); the
    cell count K = max(1, ceil(2 L b / eps)) makes the on-grid error <= eps.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError("error target must lie in (0, 1]")
    if q <= 1.0:
        raise ValueError("growth exponent must exceed 1")
    L = fn.lipschitz
    b = (max(1.0, 2.0 * L) / eps) ** (1.0 / (q - 1.0))
    K = max(1, math.ceil(2.0 * L * b / eps))
    pts = np.linspace(-b, b, K + 1)
    vals = np.asarray(fn.fn(pts), dtype=np.float64)
    return Grid(pts), vals, b, K


def approx_net_relu(fn: LipschitzFn, q: float, eps: float) -> tuple[Network, ApproxGuarantee]:
    """ReLU approximation with |net(x) - f(x)| <= eps * max(1, |x|**q) on all of R."""
    grid, vals, b, K = _approx_grid(fn, q, eps)
    net = interp_net_relu(grid, vals)
    return net, ApproxGuarantee(eps=eps, q=q, b=b, K=K, width=K + 1, params=param_count(net))


def approx_net_leaky(
    fn: LipschitzFn, q: float, eps: float, alpha: float
) -> tuple[Network, ApproxGuarantee]:
    """Leaky-slope approximation realizing exactly the ReLU interpolant; double width."""
    grid, vals, b, K = _approx_grid(fn, q, eps)
    net = interp_net_leaky(grid, vals, alpha)
    return net, ApproxGuarantee(eps=eps, q=q, b=b, K=K, width=2 * (K + 1), params=param_count(net))


def approx_net_softplus(fn: LipschitzFn, q: float, eps: float) -> tuple[Network, ApproxGuarantee]:
    """Softplus approximation with |net(x) - f(x)| <= 2 * eps * max(1, |x|**q).

    The sharpness beta = max(2, 2 K^2 L log(2) / eps) keeps the smoothing gap
    to the exact interpolant below eps, which doubles the weighted error bound
    relative to the piecewise-linear constructions.
    """
    grid, vals, b, K = _approx_grid(fn, q, eps)
    beta = max(2.0, 2.0 * K * K * fn.lipschitz * math.log(2.0) / eps)
    net = interp_net_softplus(grid, vals, beta)
    return net, ApproxGuarantee(eps=eps, q=q, b=b, K=K, width=K + 1, params=param_count(net))
