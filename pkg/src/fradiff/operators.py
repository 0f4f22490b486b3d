"""Catalog of spatial diffusion operators, local and nonlocal.

Each operator is a discrete map Field -> Field with the sign convention
that the evolution reads  d_t^alpha u + N[u] = 0,  i.e. N is "minus the
diffusion":  N[u] = -Laplacian(u) for classical heat flow.

Local operators are conservative finite differences in flux form on
staggered midpoints.  Nonlocal operators are principal-value singular
integrals discretized by symmetric pairing of +/- offsets on the grid,
with the far-field tail computed in closed form from the zero exterior
extension (values outside the box are identically zero, so the tail of
the integral only sees the node value itself).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad
from scipy.interpolate import CubicSpline

from .grid import Field, Grid

__all__ = [
    "Laplacian",
    "PLaplacian",
    "PorousMedium",
    "DoublyNonlinear",
    "MeanCurvature",
    "FracLaplacian",
    "FracPLaplacian",
    "FracSum",
    "DirectionalFrac",
    "FracPorousMedium",
    "FracMeanCurvature",
    "OperatorSpec",
    "apply_operator",
    "apply_local",
    "apply_nonlocal",
    "apply_frac_mean_curvature",
    "frac_mean_curv_F",
    "predicted_gamma",
    "is_local",
    "is_linear",
    "max_gradient",
]


class OperatorParameterError(ValueError):
    pass


def _check_open(name: str, value: float, lo: float, hi: float) -> None:
    if not (lo < value < hi):
        raise OperatorParameterError(
            f"{name} must lie in the open interval ({lo}, {hi}), got {value}"
        )


@dataclass(frozen=True)
class Laplacian:
    pass


@dataclass(frozen=True)
class PLaplacian:
    p: float

    def __post_init__(self):
        _check_open("p", self.p, 1.0, math.inf)


@dataclass(frozen=True)
class PorousMedium:
    m: float

    def __post_init__(self):
        _check_open("m", self.m, 0.0, math.inf)


@dataclass(frozen=True)
class DoublyNonlinear:
    p: float
    m: float

    def __post_init__(self):
        _check_open("p", self.p, 1.0, math.inf)
        _check_open("m", self.m, 0.0, math.inf)


@dataclass(frozen=True)
class MeanCurvature:
    pass


@dataclass(frozen=True)
class FracLaplacian:
    sigma: float

    def __post_init__(self):
        _check_open("sigma", self.sigma, 0.0, 1.0)


@dataclass(frozen=True)
class FracPLaplacian:
    sigma: float
    p: float

    def __post_init__(self):
        _check_open("sigma", self.sigma, 0.0, 1.0)
        _check_open("p", self.p, 1.0, math.inf)


@dataclass(frozen=True)
class FracSum:
    """Weighted sum of fractional p-kernels: sum_j beta_j (-Lap)^{sigma_j}_{p_j}."""

    terms: tuple[tuple[float, float, float], ...]  # (sigma_j, p_j, beta_j)

    def __post_init__(self):
        if len(self.terms) == 0:
            raise OperatorParameterError("FracSum needs at least one term")
        for sigma, p, beta in self.terms:
            _check_open("sigma", sigma, 0.0, 1.0)
            _check_open("p", p, 1.0, math.inf)
            _check_open("beta", beta, 0.0, math.inf)


@dataclass(frozen=True)
class DirectionalFrac:
    """Sum over axes of 1D fractional Laplacians, beta_j-weighted per axis."""

    terms: tuple[tuple[float, float], ...]  # (sigma_j, beta_j), one per axis

    def __post_init__(self):
        if len(self.terms) == 0:
            raise OperatorParameterError("DirectionalFrac needs at least one axis")
        for sigma, beta in self.terms:
            _check_open("sigma", sigma, 0.0, 1.0)
            _check_open("beta", beta, 0.0, math.inf)


@dataclass(frozen=True)
class FracPorousMedium:
    sigma: float
    m: float

    def __post_init__(self):
        _check_open("sigma", self.sigma, 0.0, 1.0)
        _check_open("m", self.m, 0.0, math.inf)


@dataclass(frozen=True)
class FracMeanCurvature:
    sigma: float

    def __post_init__(self):
        _check_open("sigma", self.sigma, 0.0, 1.0)


OperatorSpec = (
    Laplacian
    | PLaplacian
    | PorousMedium
    | DoublyNonlinear
    | MeanCurvature
    | FracLaplacian
    | FracPLaplacian
    | FracSum
    | DirectionalFrac
    | FracPorousMedium
    | FracMeanCurvature
)

_LOCAL = (Laplacian, PLaplacian, PorousMedium, DoublyNonlinear, MeanCurvature)
_NONLOCAL = (FracLaplacian, FracPLaplacian, FracSum, DirectionalFrac, FracPorousMedium)


def is_local(spec: OperatorSpec) -> bool:
    return isinstance(spec, _LOCAL)


def is_linear(spec: OperatorSpec) -> bool:
    """True when the implicit step reduces to a linear solve."""
    if isinstance(spec, (Laplacian, FracLaplacian)):
        return True
    if isinstance(spec, DirectionalFrac):
        return True
    if isinstance(spec, FracSum):
        return all(p == 2.0 for _, p, _ in spec.terms)
    return False


def predicted_gamma(spec: OperatorSpec) -> float:
    """Decay exponent gamma so that ||u||_{L^s}(t) <= C/(1 + t^{alpha/gamma})."""
    if isinstance(spec, Laplacian):
        return 1.0
    if isinstance(spec, PLaplacian):
        return spec.p - 1.0
    if isinstance(spec, PorousMedium):
        return spec.m
    if isinstance(spec, DoublyNonlinear):
        return spec.m * (spec.p - 1.0)
    if isinstance(spec, MeanCurvature):
        return 1.0
    if isinstance(spec, FracLaplacian):
        return 1.0
    if isinstance(spec, FracPLaplacian):
        return spec.p - 1.0
    if isinstance(spec, FracSum):
        return max(p for _, p, _ in spec.terms) - 1.0
    if isinstance(spec, DirectionalFrac):
        return 1.0
    if isinstance(spec, FracPorousMedium):
        return spec.m
    if isinstance(spec, FracMeanCurvature):
        return 1.0
    raise TypeError(f"unknown operator spec {spec!r}")


# ---------------------------------------------------------------------------
# local operators (flux form)
# ---------------------------------------------------------------------------


def _pflux_factor(gsq: np.ndarray, p: float, eps: float) -> np.ndarray:
    # |g|^{p-2} with (g^2 + eps^2)^{(p-2)/2} regularization for degenerate p < 2
    if p == 2.0:
        return np.ones_like(gsq)
    if p > 2.0:
        return gsq ** ((p - 2.0) / 2.0)
    return (gsq + eps * eps) ** ((p - 2.0) / 2.0)


def _apply_local_raw(spec: OperatorSpec, grid: Grid, u: np.ndarray) -> np.ndarray:
    if isinstance(spec, Laplacian):
        p, m = 2.0, 1.0
    elif isinstance(spec, PLaplacian):
        p, m = spec.p, 1.0
    elif isinstance(spec, PorousMedium):
        p, m = 2.0, spec.m
    elif isinstance(spec, DoublyNonlinear):
        p, m = spec.p, spec.m
    elif isinstance(spec, MeanCurvature):
        p, m = None, 1.0
    else:
        raise TypeError(f"{spec!r} is not a local operator")

    w = np.maximum(u, 0.0) ** m if m != 1.0 else u
    eps = 1e-8 * max(float(np.max(np.abs(u), initial=0.0)), 1.0)
    out = np.zeros_like(u)

    if grid.dim == 1:
        (h,) = grid.spacing
        g = np.diff(w) / h  # midpoint gradients, length N-1
        if p is None:
            flux = g / np.sqrt(1.0 + g * g)
        else:
            flux = _pflux_factor(g * g, p, eps) * g
        out[1:-1] = -(flux[1:] - flux[:-1]) / h
        return out

    hx, hy = grid.spacing
    # x-direction midpoint gradients at (i+1/2, j), j interior
    gx = (w[1:, 1:-1] - w[:-1, 1:-1]) / hx
    ty = (w[:, 2:] - w[:, :-2]) / (2.0 * hy)  # transverse, per node
    gx_t = 0.5 * (ty[1:, :] + ty[:-1, :])
    # y-direction midpoint gradients at (i, j+1/2), i interior
    gy = (w[1:-1, 1:] - w[1:-1, :-1]) / hy
    tx = (w[2:, :] - w[:-2, :]) / (2.0 * hx)
    gy_t = 0.5 * (tx[:, 1:] + tx[:, :-1])

    if p is None:
        fx = gx / np.sqrt(1.0 + gx * gx + gx_t * gx_t)
        fy = gy / np.sqrt(1.0 + gy * gy + gy_t * gy_t)
    else:
        fx = _pflux_factor(gx * gx + gx_t * gx_t, p, eps) * gx
        fy = _pflux_factor(gy * gy + gy_t * gy_t, p, eps) * gy
    out[1:-1, 1:-1] = -(fx[1:, :] - fx[:-1, :]) / hx - (fy[:, 1:] - fy[:, :-1]) / hy
    return out


# ---------------------------------------------------------------------------
# nonlocal operators (PV quadrature + analytic exterior tail)
# ---------------------------------------------------------------------------


def _phi(d: np.ndarray, p: float) -> np.ndarray:
    if p == 2.0:
        return d
    return np.sign(d) * np.abs(d) ** (p - 1.0)


def _frac_p_1d(u: np.ndarray, h: float, sigma: float, p: float) -> np.ndarray:
    """1D kernel |y|^{-(1 + sigma*p)} with p-increment nonlinearity."""
    n = u.size
    pad = np.zeros(n - 1)
    up = np.concatenate([pad, u, pad])
    out = np.zeros_like(u)
    off = n - 1
    for ell in range(1, n):
        kern = (ell * h) ** (-(1.0 + sigma * p)) * h
        dplus = u - up[off + ell : off + ell + n]
        dminus = u - up[off - ell : off - ell + n]
        out += kern * (_phi(dplus, p) + _phi(dminus, p))
    # exterior tail: u vanishes beyond the sampled cells, so the integrand
    # there is phi(u(x)) * kernel, integrable in closed form
    r0 = (n - 1) * h + h / 2.0
    out += _phi(u, p) * 2.0 * r0 ** (-sigma * p) / (sigma * p)
    return out


def _frac_p_2d(
    u: np.ndarray, spacing: tuple[float, float], sigma: float, p: float
) -> np.ndarray:
    hx, hy = spacing
    nx, ny = u.shape
    lx, ly = (nx - 1) * hx, (ny - 1) * hy
    r0 = math.hypot(lx, ly) + max(hx, hy) / 2.0
    jx = int(math.ceil(r0 / hx))
    jy = int(math.ceil(r0 / hy))
    up = np.zeros((nx + 2 * jx, ny + 2 * jy))
    up[jx : jx + nx, jy : jy + ny] = u
    out = np.zeros_like(u)
    cell = hx * hy
    for dj in range(-jx, jx + 1):
        for dk in range(-jy, jy + 1):
            if dj == 0 and dk == 0:
                continue
            r = math.hypot(dj * hx, dk * hy)
            if r > r0:
                continue
            kern = r ** (-(2.0 + sigma * p)) * cell
            shifted = up[jx + dj : jx + dj + nx, jy + dk : jy + dk + ny]
            out += kern * _phi(u - shifted, p)
    out += _phi(u, p) * 2.0 * math.pi * r0 ** (-sigma * p) / (sigma * p)
    return out


def _frac_directional(
    u: np.ndarray,
    spacing: tuple[float, ...],
    terms: tuple[tuple[float, float], ...],
) -> np.ndarray:
    out = np.zeros_like(u)
    for axis, (sigma, beta) in enumerate(terms):
        h = spacing[axis]
        if u.ndim == 1:
            out += beta * _frac_p_1d(u, h, sigma, 2.0)
        else:
            moved = np.moveaxis(u, axis, -1)
            res = np.zeros_like(moved)
            for i in range(moved.shape[0]):
                res[i] = _frac_p_1d(moved[i], h, sigma, 2.0)
            out += beta * np.moveaxis(res, -1, axis)
    return out


def _apply_nonlocal_raw(spec: OperatorSpec, grid: Grid, u: np.ndarray) -> np.ndarray:
    if isinstance(spec, FracLaplacian):
        terms = ((spec.sigma, 2.0, 1.0),)
        base = u
    elif isinstance(spec, FracPLaplacian):
        terms = ((spec.sigma, spec.p, 1.0),)
        base = u
    elif isinstance(spec, FracSum):
        terms = spec.terms
        base = u
    elif isinstance(spec, FracPorousMedium):
        terms = ((spec.sigma, 2.0, 1.0),)
        base = np.maximum(u, 0.0) ** spec.m
    elif isinstance(spec, DirectionalFrac):
        if len(spec.terms) != grid.dim:
            raise OperatorParameterError(
                f"DirectionalFrac needs one (sigma, beta) pair per axis: "
                f"got {len(spec.terms)} for dim {grid.dim}"
            )
        return _frac_directional(u, grid.spacing, spec.terms)
    else:
        raise TypeError(f"{spec!r} is not a nonlocal p-kernel operator")

    out = np.zeros_like(u)
    for sigma, p, beta in terms:
        if grid.dim == 1:
            out += beta * _frac_p_1d(base, grid.spacing[0], sigma, p)
        else:
            out += beta * _frac_p_2d(base, grid.spacing, sigma, p)
    return out


# ---------------------------------------------------------------------------
# fractional mean curvature
# ---------------------------------------------------------------------------


def frac_mean_curv_F(r: float, n: int, sigma: float) -> float:
    """Odd bounded profile integral_0^r (1 + tau^2)^(-(n+1+sigma)/2) dtau."""
    _check_open("sigma", sigma, 0.0, 1.0)
    if n < 1:
        raise OperatorParameterError(f"dimension must be >= 1, got {n}")
    if r == 0.0:
        return 0.0
    expo = (n + 1 + sigma) / 2.0
    val, _ = quad(lambda tau: (1.0 + tau * tau) ** (-expo), 0.0, abs(r), epsabs=1e-12)
    return math.copysign(val, r)


@lru_cache(maxsize=32)
def _f_profile_spline(n: int, sigma: float):
    # substitution tau = tan(theta) turns the profile into
    # integral_0^theta cos(phi)^(n + sigma - 1) dphi on [0, pi/2):
    # smooth, bounded, tabulated once and interpolated for all r
    theta = np.linspace(0.0, math.pi / 2.0, 4097)
    integrand = np.cos(theta) ** (n + sigma - 1.0)
    table = cumulative_trapezoid(integrand, theta, initial=0.0)
    return CubicSpline(theta, table)


def _f_eval(r: np.ndarray, n: int, sigma: float) -> np.ndarray:
    spline = _f_profile_spline(n, sigma)
    return np.sign(r) * spline(np.arctan(np.abs(r)))


_TAIL_NODES, _TAIL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_TAIL_NODES = 0.5 * (_TAIL_NODES + 1.0)
_TAIL_WEIGHTS = 0.5 * _TAIL_WEIGHTS


def _apply_fmc_raw(spec: FracMeanCurvature, grid: Grid, u: np.ndarray) -> np.ndarray:
    sigma = spec.sigma
    n = grid.dim
    out = np.zeros_like(u)
    if n == 1:
        (h,) = grid.spacing
        npts = u.size
        pad = np.zeros(npts - 1)
        up = np.concatenate([pad, u, pad])
        off = npts - 1
        for ell in range(1, npts):
            y = ell * h
            kern = y ** (-(1.0 + sigma)) * h
            dplus = (u - up[off + ell : off + ell + npts]) / y
            dminus = (u - up[off - ell : off - ell + npts]) / y
            out += kern * (_f_eval(dplus, n, sigma) + _f_eval(dminus, n, sigma))
        r0 = (npts - 1) * h + h / 2.0
        surf = 2.0
    else:
        hx, hy = grid.spacing
        nx, ny = u.shape
        r0 = math.hypot((nx - 1) * hx, (ny - 1) * hy) + max(hx, hy) / 2.0
        jx = int(math.ceil(r0 / hx))
        jy = int(math.ceil(r0 / hy))
        up = np.zeros((nx + 2 * jx, ny + 2 * jy))
        up[jx : jx + nx, jy : jy + ny] = u
        cell = hx * hy
        for dj in range(-jx, jx + 1):
            for dk in range(-jy, jy + 1):
                if dj == 0 and dk == 0:
                    continue
                r = math.hypot(dj * hx, dk * hy)
                if r > r0:
                    continue
                kern = r ** (-(2.0 + sigma)) * cell
                shifted = up[jx + dj : jx + dj + nx, jy + dk : jy + dk + ny]
                out += kern * _f_eval((u - shifted) / r, n, sigma)
        surf = 2.0 * math.pi

    # exterior tail: integral_{r > r0} r^{-1-sigma} F(u(x)/r) dr per unit
    # surface measure, mapped to a smooth integral on (0, 1] by r = r0 q^{-1/sigma}
    q_pow = _TAIL_NODES ** (1.0 / sigma)
    args = (np.maximum(u, 0.0)[..., None] / r0) * q_pow
    tail = _f_eval(args, n, sigma) @ _TAIL_WEIGHTS
    out += surf * (r0 ** (-sigma) / sigma) * tail
    return out


# ---------------------------------------------------------------------------
# public application entry points
# ---------------------------------------------------------------------------


def _apply_raw(spec: OperatorSpec, grid: Grid, u: np.ndarray) -> np.ndarray:
    """Array-level operator application; zeroes the boundary entries."""
    if is_local(spec):
        out = _apply_local_raw(spec, grid, u)
    elif isinstance(spec, FracMeanCurvature):
        out = _apply_fmc_raw(spec, grid, u)
    else:
        out = _apply_nonlocal_raw(spec, grid, u)
    out[grid.boundary_mask()] = 0.0
    return out


def _wrap(field: Field, values: np.ndarray) -> Field:
    return Field(field.grid, values, field.time, nonnegative=False)


def apply_local(spec: OperatorSpec, u: Field) -> Field:
    if not is_local(spec):
        raise TypeError(f"{spec!r} is not a local operator")
    return _wrap(u, _apply_local_raw(spec, u.grid, u.values) * _zero_boundary(u.grid))


def apply_nonlocal(spec: OperatorSpec, u: Field) -> Field:
    if is_local(spec) or isinstance(spec, FracMeanCurvature):
        raise TypeError(f"{spec!r} is not a nonlocal p-kernel operator")
    return _wrap(u, _apply_nonlocal_raw(spec, u.grid, u.values) * _zero_boundary(u.grid))


def apply_frac_mean_curvature(spec: FracMeanCurvature, u: Field) -> Field:
    return _wrap(u, _apply_fmc_raw(spec, u.grid, u.values) * _zero_boundary(u.grid))


def apply_operator(spec: OperatorSpec, u: Field) -> Field:
    """Dispatch to the right discrete application for any catalog operator."""
    return _wrap(u, _apply_raw(spec, u.grid, u.values))


@lru_cache(maxsize=64)
def _zero_boundary_cached(grid: Grid) -> np.ndarray:
    mask = np.ones(grid.shape)
    mask[grid.boundary_mask()] = 0.0
    return mask


def _zero_boundary(grid: Grid) -> np.ndarray:
    return _zero_boundary_cached(grid)


def max_gradient(u: Field) -> float:
    """Max magnitude of the one-sided difference quotients, all axes."""
    g = 0.0
    for axis, h in enumerate(u.grid.spacing):
        d = np.diff(u.values, axis=axis) / h
        g = max(g, float(np.max(np.abs(d), initial=0.0)))
    return g
