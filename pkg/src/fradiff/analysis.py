"""Runtime audits of the energy inequalities and decay-rate estimation.

The audits check, along a computed trajectory, the discrete analogues of
the chain of inequalities that produce the power-law decay: the structural
energy inequality linking the L^s norm to the dissipation, the convexity
inequality bounding the fractional derivative of the norm by the interior
energy, the resulting differential inequality for the norm, and the
non-increase of the norm itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, inner_energy, lp_norm
from .operators import (
    DirectionalFrac,
    FracLaplacian,
    FracPLaplacian,
    FracSum,
    OperatorSpec,
    _apply_raw,
    predicted_gamma,
)
from .stepping import HistoryBuffer, TimeMesh, discrete_caputo

__all__ = [
    "DecayReport",
    "check_sa",
    "check_lemma_az",
    "fit_decay_exponent",
    "estimate_cstar",
    "symmetrized_energy",
    "FitError",
]

VACUOUS_RATIO = math.inf


class FitError(ValueError):
    pass


@dataclass
class DecayReport:
    """Per-run record of norms, audits and the fitted tail exponent."""

    s_list: tuple[float, ...]
    alpha: float
    gamma_: float
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norms: dict[float, np.ndarray] = field(default_factory=dict)
    sa_ratio: np.ndarray = field(default_factory=lambda: np.zeros(0))
    az_slack: np.ndarray = field(default_factory=lambda: np.zeros(0))
    caputo_v: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bound_value: np.ndarray = field(default_factory=lambda: np.zeros(0))
    fitted: dict[float, tuple[float, float]] = field(default_factory=dict)
    predicted_rate: float = 0.0
    cstar: float = 0.0
    audits: dict[str, bool] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    failure: str | None = None

    @property
    def completed(self) -> bool:
        return self.failure is None


def check_sa(u: Field, spec: OperatorSpec, s: float, gamma_: float | None = None) -> float:
    """Ratio R = (integral of u^(s-1) N[u]) / ||u||_s^(s-1+gamma).

    The structural inequality holds along a trajectory with constant
    C = 1 / inf R.  The ratio for u == 0 is the +inf vacuous sentinel.
    """
    if gamma_ is None:
        gamma_ = predicted_gamma(spec)
    v = lp_norm(u, s)
    image = Field(u.grid, _apply_raw(spec, u.grid, u.values), u.time, nonnegative=False)
    energy = inner_energy(u, s, image)
    if v == 0.0:
        if abs(energy) > 1e-12:
            raise ArithmeticError("zero norm with nonzero interior energy")
        return VACUOUS_RATIO
    return energy / v ** (s - 1.0 + gamma_)


def check_lemma_az(
    norm_series: np.ndarray,
    field_series: HistoryBuffer,
    s: float,
    alpha: float,
    mesh: TimeMesh,
    k: int,
) -> float:
    """Slack of the convexity inequality at step k:

        integral u^(s-1) d_t^alpha u dx  -  v^(s-1) d_t^alpha v  >= 0

    with both fractional derivatives taken by the same L1 rule.  Negative
    slack beyond round-off means the inequality chain is broken.
    """
    grid = field_series.grid
    du = discrete_caputo(field_series.data, alpha, mesh, k)
    uk = field_series.data[k]
    w = grid.quad_weights()
    lhs = float(np.sum(w * np.maximum(uk, 0.0) ** (s - 1.0) * du))
    v = np.asarray(norm_series, dtype=float)
    dv = discrete_caputo(v, alpha, mesh, k)
    rhs = v[k] ** (s - 1.0) * dv
    return lhs - rhs


def fit_decay_exponent(
    times, values, tail_fraction: float = 0.9
) -> tuple[float, float]:
    """Least-squares slope magnitude on (log t, log v) over the tail window.

    The window keeps t >= (1 - tail_fraction) * t_max; the default keeps
    the last decade of simulated time.  Returns (exponent, RMS log10
    misfit).  Requires >= 10 tail points spanning about a decade (>= 0.95), all
    positive.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    sel = t >= (1.0 - tail_fraction) * t[-1]
    sel &= t > 0.0
    t, v = t[sel], v[sel]
    if t.size < 10:
        raise FitError(f"need >= 10 tail points, got {t.size}")
    if np.any(v <= 0.0):
        raise FitError("tail values must be positive for a log-log fit")
    span = math.log10(t[-1] / t[0])
    if span < 0.95:
        raise FitError(f"tail spans {span:.3f} decades, need about one")
    logt, logv = np.log10(t), np.log10(v)
    slope, intercept = np.polyfit(logt, logv, 1)
    resid = logv - (slope * logt + intercept)
    return abs(float(slope)), float(np.sqrt(np.mean(resid**2)))


def estimate_cstar(times, values, alpha: float, gamma_: float) -> float:
    """Empirical decay constant sup_k v(t_k) * (1 + t_k^(alpha/gamma))."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    return float(np.max(v * (1.0 + t ** (alpha / gamma_)), initial=0.0))


def _pkernel_terms(spec: OperatorSpec):
    if isinstance(spec, FracLaplacian):
        return ((spec.sigma, 2.0, 1.0),)
    if isinstance(spec, FracPLaplacian):
        return ((spec.sigma, spec.p, 1.0),)
    if isinstance(spec, FracSum):
        return spec.terms
    if isinstance(spec, DirectionalFrac):
        return tuple((sigma, 2.0, beta) for sigma, beta in spec.terms)
    raise TypeError(f"{spec!r} has no p-kernel double-sum form")


def symmetrized_energy(spec: OperatorSpec, u: Field, s: float) -> float:
    """Independent double-sum evaluation of the interior energy of a 1D
    nonlocal p-kernel operator.

    Pairs every node with every other node (and with the zero exterior)
    under the half-weighted symmetrized integrand; must agree with the
    single-sum quadrature of u^(s-1) N[u] and be nonnegative.
    """
    grid = u.grid
    if grid.dim != 1:
        raise ValueError("double-sum oracle implemented for 1D grids")
    (h,) = grid.spacing
    n = grid.shape[0]
    uv = u.values
    us = np.maximum(uv, 0.0) ** (s - 1.0)
    total = 0.0
    for sigma, p, beta in _pkernel_terms(spec):
        sp = sigma * p
        acc = 0.0
        # symmetrized near field: each unordered real-real pair once with
        # the difference of u^(s-1) weights, plus real-exterior pairs where
        # the partner value is identically zero
        for ell in range(1, n):
            kern = (ell * h) ** (-(1.0 + sp)) * h * h
            d = uv[:-ell] - uv[ell:]
            phi = np.sign(d) * np.abs(d) ** (p - 1.0)
            acc += float(np.sum(kern * phi * (us[:-ell] - us[ell:])))
            for vals, weights in ((uv[:ell], us[:ell]), (uv[n - ell :], us[n - ell :])):
                phi_v = np.sign(vals) * np.abs(vals) ** (p - 1.0)
                acc += float(np.sum(kern * phi_v * weights))
        r0 = (n - 1) * h + h / 2.0
        tail = 2.0 * r0 ** (-sp) / sp
        phi_u = np.sign(uv) * np.abs(uv) ** (p - 1.0)
        acc += float(np.sum(h * tail * phi_u * us))
        total += beta * acc
    return total
