"""L1 discretization of the Caputo derivative and the implicit time marching.

The evolution  d_t^alpha u + N[u] = 0  is discretized by the classical L1
scheme: piecewise-linear interpolation of the history inside the weakly
singular memory integral, with the standard 1/Gamma(1-alpha) normalization
restored so that the Mittag-Leffler relaxation is the exact solution of the
linear scalar case.  Meshes may be uniform or graded toward t = 0 to
resolve the t^alpha initial layer.

Each step solves the implicit nonlinear system

    c_k (u^k - u^{k-1}) + memory + N[u^k] = 0,     c_k = dt_k^{-alpha}/Gamma(2-alpha)

with a spectral solve for linear operators, Newton-Krylov for nonlinear
ones and an Anderson-accelerated Picard fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .grid import Field, Grid
from .operators import OperatorSpec, _apply_raw, is_linear

__all__ = [
    "TimeMesh",
    "HistoryBuffer",
    "StepError",
    "caputo_weights",
    "l1_coefficients",
    "discrete_caputo",
    "step",
    "evolve",
    "linear_operator_matrix",
    "smallest_eigenpair",
]


class StepError(RuntimeError):
    """Nonlinear solve failed; carries the last residual norm."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class TimeMesh:
    """Time nodes t_0 = 0 < ... < t_K = t_end, uniform or graded.

    grading = None gives the uniform mesh t_k = k dt; grading = r >= 1
    gives t_k = t_end (k/K)^r, clustering nodes near t = 0.
    """

    alpha: float
    t_end: float
    nsteps: int
    grading: float | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.nsteps < 1:
            raise ValueError("nsteps must be >= 1")
        if self.grading is not None and self.grading < 1.0:
            raise ValueError("grading exponent must be >= 1")

    @property
    def nodes(self) -> np.ndarray:
        k = np.arange(self.nsteps + 1, dtype=float)
        if self.grading is None:
            return self.t_end * k / self.nsteps
        return self.t_end * (k / self.nsteps) ** self.grading


class HistoryBuffer:
    """Append-only record of the solution fields u^0 ... u^k."""

    def __init__(self, grid: Grid, mesh: TimeMesh):
        self.grid = grid
        self.mesh = mesh
        self._data = np.zeros((mesh.nsteps + 1,) + grid.shape)
        self._filled = 0

    def append(self, values: np.ndarray) -> None:
        if self._filled > self.mesh.nsteps:
            raise IndexError("history buffer is full")
        self._data[self._filled] = values
        self._filled += 1

    def __len__(self) -> int:
        return self._filled

    @property
    def data(self) -> np.ndarray:
        """(k+1, *grid.shape) array of the recorded values; do not mutate."""
        return self._data[: self._filled]

    @property
    def times(self) -> np.ndarray:
        return self.mesh.nodes[: self._filled]

    def field(self, k: int) -> Field:
        if k >= self._filled:
            raise IndexError(f"no recorded step {k}")
        return Field(self.grid, self._data[k].copy(), float(self.mesh.nodes[k]))


def caputo_weights(alpha: float, k: int) -> np.ndarray:
    """Uniform-mesh L1 weights b_j = (j+1)^(1-alpha) - j^(1-alpha), j < k."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if k < 1:
        raise ValueError("need k >= 1")
    j = np.arange(k, dtype=float)
    return (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)


def l1_coefficients(mesh: TimeMesh, k: int) -> np.ndarray:
    """Coefficients c_j of the L1 form  d_t^alpha v(t_k) ~= sum_j c_j (v^{j+1} - v^j).

    Valid on arbitrary strictly increasing meshes; on a uniform mesh this
    reduces to dt^(-alpha)/Gamma(2-alpha) times the reversed b-weights.
    """
    if k < 1 or k > mesh.nsteps:
        raise ValueError(f"step index {k} outside 1..{mesh.nsteps}")
    t = mesh.nodes
    alpha = mesh.alpha
    left = (t[k] - t[:k]) ** (1.0 - alpha)
    right = (t[k] - t[1 : k + 1]) ** (1.0 - alpha)
    dt = np.diff(t[: k + 1])
    return (left - right) / (math.gamma(2.0 - alpha) * dt)


def discrete_caputo(history: np.ndarray, alpha: float, mesh: TimeMesh, k: int):
    """L1 value of the Caputo derivative of the recorded series at t_k.

    ``history`` holds v^0 ... v^k (scalars or fields) along axis 0.
    """
    history = np.asarray(history, dtype=float)
    if history.shape[0] < k + 1:
        raise ValueError(f"history holds {history.shape[0]} entries, need {k + 1}")
    if abs(alpha - mesh.alpha) > 1e-14:
        raise ValueError("alpha disagrees with the mesh")
    c = l1_coefficients(mesh, k)
    diffs = np.diff(history[: k + 1], axis=0)
    val = np.tensordot(c, diffs, axes=(0, 0))
    return float(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# linear operator spectral factorization
# ---------------------------------------------------------------------------

_linear_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def linear_operator_matrix(spec: OperatorSpec, grid: Grid) -> np.ndarray:
    """Dense matrix of a linear catalog operator on the interior nodes."""
    interior = grid.interior_mask()
    idx = np.flatnonzero(interior.ravel())
    n_int = idx.size
    mat = np.empty((n_int, n_int))
    basis = np.zeros(grid.shape)
    flat = basis.ravel()
    for col, j in enumerate(idx):
        flat[j] = 1.0
        mat[:, col] = _apply_raw(spec, grid, basis).ravel()[idx]
        flat[j] = 0.0
    return mat


def _linear_eig(spec: OperatorSpec, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    key = (spec, grid)
    if key not in _linear_cache:
        mat = linear_operator_matrix(spec, grid)
        evals, evecs = sla.eigh(mat)
        _linear_cache[key] = (evals, evecs)
    return _linear_cache[key]


def smallest_eigenpair(spec: OperatorSpec, grid: Grid) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and eigenvector (as a full-grid array) of a
    linear catalog operator with Dirichlet data."""
    evals, evecs = _linear_eig(spec, grid)
    vec = np.zeros(grid.shape)
    vec[grid.interior_mask()] = evecs[:, 0]
    if vec.sum() < 0:
        vec = -vec
    return float(evals[0]), vec


# ---------------------------------------------------------------------------
# the implicit step
# ---------------------------------------------------------------------------


def _solve_linear(spec, grid, c_last, b_int):
    evals, evecs = _linear_eig(spec, grid)
    coeff = evecs.T @ b_int
    return evecs @ (coeff / (c_last + evals))


def _fd_jacobian(residual, x, F):
    n = x.size
    J = np.empty((n, n))
    base = np.sqrt(np.finfo(float).eps)
    for j in range(n):
        eps = base * max(abs(x[j]), 1e-3)
        xp = x.copy()
        xp[j] += eps
        J[:, j] = (residual(xp) - F) / eps
    return J


def _damped_newton(residual, x0, maxiter, f_tol, c_last, op_jac=None):
    """Dense Newton with Armijo backtracking and a reusable chord Jacobian.

    Sized for the interior systems that reach it (1D meshes / small 2D);
    robust where Krylov solvers stall on the degenerate p-Laplacian
    Jacobian at gradient zeros.  ``op_jac`` is the finite-difference
    Jacobian of the operator part only (residual minus c_last*x); it is
    carried over from previous steps and refreshed when the damped
    iteration stops contracting.  Returns (x, residual_norm, op_jac).
    """
    x = np.array(x0, dtype=float)
    F = residual(x)
    fn = float(np.max(np.abs(F)))
    eye = np.eye(x.size)
    fresh = False
    since_refresh = 0
    for _ in range(maxiter):
        if fn <= f_tol:
            return x, fn, op_jac
        if op_jac is None or since_refresh > 10:
            op_jac = _fd_jacobian(residual, x, F) - c_last * eye
            fresh, since_refresh = True, 0
        try:
            dx = sla.solve(op_jac + c_last * eye, -F)
        except sla.LinAlgError:
            dx = sla.lstsq(op_jac + c_last * eye, -F)[0]
        lam = 1.0
        xt, Ft, ft = x, F, fn
        for _ in range(40):
            xt = x + lam * dx
            Ft = residual(xt)
            ft = float(np.max(np.abs(Ft)))
            if ft <= (1.0 - 1e-4 * lam) * fn:
                break
            lam *= 0.5
        if ft >= fn:
            if fresh:
                # no descent with an up-to-date Jacobian: genuine stall
                return x, fn, op_jac
            op_jac = None
            continue
        x, F, fn = xt, Ft, ft
        fresh = False
        since_refresh += 1
    return x, fn, op_jac


def step(
    spec: OperatorSpec,
    history: HistoryBuffer,
    mesh: TimeMesh,
    k: int,
    tol_newton: float = 1e-10,
    max_newton: int = 50,
    solver_cache: dict | None = None,
) -> Field:
    """Advance the recorded history to t_k by one implicit L1 step."""
    if len(history) < k:
        raise ValueError(f"history covers {len(history)} steps, cannot take step {k}")
    grid = history.grid
    c = l1_coefficients(mesh, k)
    c_last = c[-1]
    data = history.data
    if k >= 2:
        memory = np.tensordot(c[:-1], np.diff(data[:k], axis=0), axes=(0, 0))
    else:
        memory = np.zeros(grid.shape)
    u_prev = data[k - 1]
    b = c_last * u_prev - memory

    interior = grid.interior_mask()
    scale = max(float(np.max(np.abs(u_prev))), 1e-30)
    f_tol = tol_newton * c_last * scale

    if is_linear(spec):
        full = np.zeros(grid.shape)
        full[interior] = _solve_linear(spec, grid, c_last, b[interior])
        residual_norm = 0.0
    else:

        def residual(x_int):
            full = np.zeros(grid.shape)
            full[interior] = x_int
            img = _apply_raw(spec, grid, np.maximum(full, 0.0))
            return c_last * x_int + img[interior] - b[interior]

        x0 = u_prev[interior]
        op_jac = None if solver_cache is None else solver_cache.get("op_jac")
        x, residual_norm, op_jac = _damped_newton(
            residual, x0, max_newton, f_tol, c_last, op_jac
        )
        if solver_cache is not None:
            solver_cache["op_jac"] = op_jac
        if residual_norm > 10.0 * f_tol:
            raise StepError(
                f"step {k}: nonlinear solve stalled with residual "
                f"{residual_norm:g} (tolerance {f_tol:g})",
                residual_norm,
            )
        full = np.zeros(grid.shape)
        full[interior] = x

    # negatives at solver-tolerance level are round-off of the clamped solve
    neg_floor = -100.0 * tol_newton * scale
    if float(np.min(full)) < neg_floor:
        raise StepError(
            f"step {k}: solution went negative beyond solver tolerance "
            f"(min {float(np.min(full)):g})",
            residual_norm,
        )
    full = np.maximum(full, 0.0)
    return Field(grid, full, float(mesh.nodes[k]))


def evolve(
    spec: OperatorSpec,
    u0: Field,
    mesh: TimeMesh,
    tol_newton: float = 1e-10,
    callback=None,
) -> HistoryBuffer:
    """March the initial field across the whole mesh; returns the history."""
    history = HistoryBuffer(u0.grid, mesh)
    history.append(u0.values)
    if callback is not None:
        callback(0, u0)
    cache: dict = {}
    for k in range(1, mesh.nsteps + 1):
        uk = step(spec, history, mesh, k, tol_newton=tol_newton,
                  solver_cache=cache)
        history.append(uk.values)
        if callback is not None:
            callback(k, uk)
    return history
