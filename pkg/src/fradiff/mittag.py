"""Mittag-Leffler relaxation and the scalar power-nonlinearity fractional ODE.

These are the comparison objects behind the decay bounds: the linear
relaxation d_t^alpha e = -e is solved by E_alpha(-t^alpha), and the scalar
problem d_t^alpha w = -w^gamma / C dominates every norm trajectory that
satisfies the structural energy inequality.  The explicit piecewise
power-law barrier with a knee at t0 = Cbar * w(0)^((1-gamma)/alpha) bounds
w from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .stepping import TimeMesh, l1_coefficients

__all__ = [
    "mittag_leffler",
    "solve_scalar_fode",
    "barrier",
    "fit_barrier_constant",
    "FodeSolution",
]

# beyond this the power series cancels catastrophically; the exact
# integral representation takes over
Z_SWITCH = 5.0
_SERIES_MAX_AMPLIFICATION = 1e7


def _ml_series(alpha: float, z: float) -> float | None:
    """Power series sum_k z^k / Gamma(1 + alpha k); None when float64
    cancellation would destroy more than ~9 digits."""
    total = 1.0
    largest = 1.0
    log_absz = math.log(abs(z)) if z != 0.0 else -math.inf
    for k in range(1, 500):
        log_term = k * log_absz - math.lgamma(1.0 + alpha * k)
        if log_term > 700.0:
            return None
        term = math.exp(log_term)
        if k % 2 == 1 and z < 0.0:
            term = -term
        total += term
        largest = max(largest, abs(term))
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and k > 3:
            break
    else:
        return None
    if largest > _SERIES_MAX_AMPLIFICATION * max(abs(total), 1e-300):
        return None
    return total


def _ml_integral(alpha: float, x: float) -> float:
    """E_alpha(-x) for x > 0 via the completely monotone spectral form.

    Substituting y = r^alpha in the standard representation gives

        E_alpha(-x) = sin(pi alpha)/(alpha pi) *
                      int_0^inf exp(-(x y)^(1/alpha)) / (y^2 + 2 y cos(pi alpha) + 1) dy

    with a smooth integrand; accurate for every alpha in (0, 1).
    """
    c = math.cos(math.pi * alpha)
    inv_alpha = 1.0 / alpha

    def integrand(y):
        return math.exp(-((x * y) ** inv_alpha)) / (y * y + 2.0 * y * c + 1.0)

    mid = min(1.0 / x, 1.0)
    val = 0.0
    val += quad(integrand, 0.0, mid, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    val += quad(integrand, mid, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return math.sin(math.pi * alpha) / (alpha * math.pi) * val


def _ml_scalar(alpha: float, z: float) -> float:
    if z > 0.0:
        raise ValueError("only the decay branch z <= 0 is supported")
    if z == 0.0:
        return 1.0
    if alpha == 1.0:
        return math.exp(z)
    if abs(z) <= Z_SWITCH:
        val = _ml_series(alpha, z)
        if val is not None:
            return val
    return _ml_integral(alpha, -z)


def mittag_leffler(alpha: float, z):
    """One-parameter Mittag-Leffler function E_alpha(z) for z <= 0.

    Scalar in, float out; array in, array out.  alpha in (0, 1].
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    arr = np.asarray(z, dtype=float)
    if arr.ndim == 0:
        return _ml_scalar(alpha, float(arr))
    out = np.empty(arr.shape)
    flat_in, flat_out = arr.ravel(), out.ravel()
    for i, zi in enumerate(flat_in):
        flat_out[i] = _ml_scalar(alpha, float(zi))
    return out


@dataclass(frozen=True)
class FodeSolution:
    """Sampled solution of d_t^alpha w = -w^gamma / C, w(0) = v0."""

    alpha: float
    gamma_: float
    C: float
    mesh: TimeMesh
    values: np.ndarray
    cbar: float
    t0: float
    cstar: float

    @property
    def times(self) -> np.ndarray:
        return self.mesh.nodes

    def barrier_values(self) -> np.ndarray:
        return barrier(self.alpha, self.gamma_, self.cbar, float(self.values[0]),
                       self.times)


def _fode_march(alpha, gamma_, C, v0, mesh) -> np.ndarray:
    w = np.empty(mesh.nsteps + 1)
    w[0] = v0
    for k in range(1, mesh.nsteps + 1):
        coeffs = l1_coefficients(mesh, k)
        c_last = coeffs[-1]
        memory = float(coeffs[:-1] @ np.diff(w[:k])) if k >= 2 else 0.0
        b = c_last * w[k - 1] - memory
        if b <= 0.0:
            w[k] = 0.0
            continue

        def g(x):
            return c_last * x + x**gamma_ / C - b

        hi = b / c_last
        # g is strictly increasing on [0, hi] with g(0) <= 0 <= g(hi)
        w[k] = brentq(g, 0.0, hi, xtol=1e-15, rtol=1e-14)
    return w


def barrier(alpha: float, gamma_: float, cbar: float, w0: float, times) -> np.ndarray:
    """Piecewise constant / power-law upper barrier.

    Equal to w0 up to the knee t0 = cbar * w0^((1-gamma)/alpha) and then
    decays like (t0/t)^(alpha/gamma); continuous at the knee.
    """
    if cbar <= 0.0:
        raise ValueError("cbar must be positive")
    if w0 < 0.0:
        raise ValueError("w0 must be nonnegative")
    t = np.asarray(times, dtype=float)
    if w0 == 0.0:
        return np.zeros_like(t)
    t0 = cbar * w0 ** ((1.0 - gamma_) / alpha)
    out = np.full_like(t, w0)
    late = t > t0
    out[late] = w0 * (t0 / t[late]) ** (alpha / gamma_)
    return out


def fit_barrier_constant(
    alpha: float, gamma_: float, times, values, at_index: int | None = None
) -> float:
    """Smallest knee constant cbar making w <= barrier.

    With ``at_index`` the inequality is imposed at that single node (the
    barrier then may be undercut elsewhere); by default it is imposed at
    every node, which pins cbar at the touching point of the trajectory.
    """
    t = np.asarray(times, dtype=float)
    w = np.asarray(values, dtype=float)
    w0 = float(w[0])
    if w0 == 0.0:
        return 1.0
    if at_index is not None:
        sel = np.array([at_index])
    else:
        sel = np.arange(1, len(t))
    tk, wk = t[sel], w[sel]
    pos = tk > 0.0
    # w(t) <= w0 (t0/t)^(alpha/gamma)  <=>  t0 >= t (w/w0)^(gamma/alpha)
    t0_req = float(np.max(tk[pos] * (wk[pos] / w0) ** (gamma_ / alpha), initial=0.0))
    t0_req = max(t0_req, float(np.min(t[t > 0.0])) * 1e-12)
    return t0_req / w0 ** ((1.0 - gamma_) / alpha)


def solve_scalar_fode(
    alpha: float, gamma_: float, C: float, v0: float, mesh: TimeMesh
) -> FodeSolution:
    """Implicit L1 march of d_t^alpha w = -w^gamma / C with w(0) = v0."""
    if gamma_ <= 0.0:
        raise ValueError("gamma must be positive")
    if C <= 0.0:
        raise ValueError("C must be positive")
    if v0 < 0.0:
        raise ValueError("v0 must be nonnegative")
    if abs(alpha - mesh.alpha) > 1e-14:
        raise ValueError("alpha disagrees with the mesh")
    w = _fode_march(alpha, gamma_, C, v0, mesh)
    t = mesh.nodes
    cbar = fit_barrier_constant(alpha, gamma_, t, w)
    t0 = cbar * v0 ** ((1.0 - gamma_) / alpha) if v0 > 0 else 0.0
    cstar = float(np.max(w * (1.0 + t ** (alpha / gamma_))))
    return FodeSolution(alpha, gamma_, C, mesh, w, cbar, t0, cstar)
