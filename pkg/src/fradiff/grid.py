"""Uniform tensor grids, nonnegative fields and trapezoid quadrature.

Everything downstream (operators, time stepping, audits) computes on these
two types.  Grids are 1D or 2D boxes with homogeneous Dirichlet data on the
boundary nodes; the exterior of the box is identically zero by convention,
which is what makes the far-field tails of the nonlocal operators exactly
computable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Grid", "Field", "lp_norm", "inner_energy", "NEG_TOL_REL"]

# relative tolerance for negative round-off in field values
NEG_TOL_REL = 1e-12


class GridError(ValueError):
    pass


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform grid on a box in R^n, n in {1, 2}.

    bounds[i] = (a_i, b_i) and npoints[i] >= 3 per axis; spacing
    h_i = (b_i - a_i)/(npoints[i] - 1).  Boundary nodes carry the Dirichlet
    value 0 and the exterior of the box is identically 0.
    """

    bounds: tuple[tuple[float, float], ...]
    npoints: tuple[int, ...]

    def __post_init__(self):
        if len(self.bounds) != len(self.npoints):
            raise GridError("bounds and npoints must have equal length")
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        for (a, b), n in zip(self.bounds, self.npoints):
            if not a < b:
                raise GridError(f"need a < b per axis, got ({a}, {b})")
            if n < 3:
                raise GridError(f"need at least 3 points per axis, got {n}")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((b - a) / (n - 1) for (a, b), n in zip(self.bounds, self.npoints))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.npoints

    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.linspace(a, b, n) for (a, b), n in zip(self.bounds, self.npoints)
        )

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def quad_weights(self) -> np.ndarray:
        """Tensor-product trapezoid weights, one per node."""
        w = np.ones(1)
        for h, n in zip(self.spacing, self.npoints):
            w1 = np.full(n, h)
            w1[0] = w1[-1] = h / 2
            w = np.multiply.outer(w, w1)
        return w.reshape(self.shape)

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        if self.dim == 1:
            mask[1:-1] = True
        else:
            mask[1:-1, 1:-1] = True
        return mask

    def boundary_mask(self) -> np.ndarray:
        return ~self.interior_mask()


def _validate_values(grid: Grid, values: np.ndarray, nonnegative: bool) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise FieldError(f"values shape {values.shape} != grid shape {grid.shape}")
    if np.any(np.isnan(values)):
        raise FieldError("NaN in field values")
    if nonnegative:
        scale = max(float(np.max(values, initial=0.0)), 1.0)
        tol = NEG_TOL_REL * scale
        if np.any(values < -tol):
            raise FieldError(
                f"field has negative values beyond round-off (min {values.min():g}, "
                f"tolerance {-tol:g})"
            )
        # round-off negatives are clamped so fractional powers stay real
        values = np.maximum(values, 0.0)
    if np.any(values[grid.boundary_mask()] != 0.0):
        raise FieldError("boundary nodes must be exactly zero")
    return values


@dataclass(frozen=True)
class Field:
    """Sample values of u(., t) on a grid, zero on the boundary.

    Solution fields are nonnegative (negative round-off below a relative
    1e-12 is clamped, anything worse is an error).  Operator images
    N[u] are sign-indefinite; they are constructed with
    ``nonnegative=False`` and skip the sign check.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    time: float = 0.0
    nonnegative: bool = True

    def __post_init__(self):
        object.__setattr__(
            self, "values", _validate_values(self.grid, self.values, self.nonnegative)
        )
        if self.time < 0:
            raise FieldError("time label must be >= 0")

    def with_values(self, values: np.ndarray, time: float | None = None) -> "Field":
        return Field(self.grid, values, self.time if time is None else time)


def lp_norm(field: Field, s: float) -> float:
    """Lebesgue norm (sum_nodes w * u^s)^(1/s) with trapezoid weights w."""
    if s < 1:
        raise ValueError(f"norm exponent must be >= 1, got {s}")
    w = field.grid.quad_weights()
    return float(np.sum(w * field.values**s) ** (1.0 / s))


def inner_energy(field: Field, s: float, operator_image: Field) -> float:
    """Trapezoid quadrature of integral of u^(s-1) * N[u] over the box.

    ``operator_image`` is any field on the same grid; the value is
    nonnegative when it is a genuine catalog operator applied to ``field``
    (see the symmetrization audit in the analysis module), but no sign is
    imposed here.
    """
    if field.grid != operator_image.grid:
        raise ValueError("field and operator_image live on different grids")
    if s <= 1:
        raise ValueError(f"energy exponent must be > 1, got {s}")
    w = field.grid.quad_weights()
    img = np.asarray(operator_image.values, dtype=float)
    return float(np.sum(w * field.values ** (s - 1.0) * img))
