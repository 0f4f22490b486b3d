"""Flat key-value scenario configuration.

The config grammar is line oriented: ``dotted.key = value`` with ``#``
comments and blank lines ignored.  See the README for the full key table.
List values are comma separated; tuple-valued entries (operator terms,
per-axis bounds) use colon-separated components.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import Field, Grid
from .operators import (
    DirectionalFrac,
    DoublyNonlinear,
    FracLaplacian,
    FracMeanCurvature,
    FracPLaplacian,
    FracPorousMedium,
    FracSum,
    Laplacian,
    MeanCurvature,
    OperatorSpec,
    PLaplacian,
    PorousMedium,
)
from .stepping import TimeMesh, smallest_eigenpair

__all__ = ["ScenarioConfig", "ConfigError", "parse_config", "parse_config_file",
           "initial_field"]


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending key."""


@dataclass(frozen=True)
class ScenarioConfig:
    operator: OperatorSpec
    grid: Grid
    mesh: TimeMesh
    ic_preset: str = "bump"
    ic_amplitude: float = 1.0
    seed: int = 1234
    s_list: tuple[float, ...] = (2.0,)
    output_csv: str | None = None
    audits_enabled: bool = True
    audit_tol: float = 1e-8
    gradient_bound: float = 50.0
    tol_newton: float = 1e-10

    def with_steps(self, nsteps: int) -> "ScenarioConfig":
        return replace(self, mesh=replace(self.mesh, nsteps=nsteps))


_PRESETS = ("bump", "eigen", "plateau", "random")


def _parse_lines(text: str) -> dict[str, str]:
    table: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        table[key] = value
    return table


def _pop_float(table, key, default=None):
    if key not in table:
        if default is None:
            raise ConfigError(f"missing required key {key}")
        return default
    try:
        return float(table.pop(key))
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number") from exc


def _pop_int(table, key, default=None):
    if key not in table:
        if default is None:
            raise ConfigError(f"missing required key {key}")
        return default
    try:
        return int(table.pop(key))
    except ValueError as exc:
        raise ConfigError(f"{key}: not an integer") from exc


def _build_operator(table: dict[str, str]) -> OperatorSpec:
    kind = table.pop("operator.kind", None)
    if kind is None:
        raise ConfigError("missing required key operator.kind")
    kind = kind.lower()
    try:
        if kind == "laplacian":
            return Laplacian()
        if kind == "p_laplacian":
            return PLaplacian(_pop_float(table, "operator.p"))
        if kind == "porous_medium":
            return PorousMedium(_pop_float(table, "operator.m"))
        if kind == "doubly_nonlinear":
            return DoublyNonlinear(
                _pop_float(table, "operator.p"), _pop_float(table, "operator.m")
            )
        if kind == "mean_curvature":
            return MeanCurvature()
        if kind == "frac_laplacian":
            return FracLaplacian(_pop_float(table, "operator.sigma"))
        if kind == "frac_p_laplacian":
            return FracPLaplacian(
                _pop_float(table, "operator.sigma"), _pop_float(table, "operator.p")
            )
        if kind == "frac_porous_medium":
            return FracPorousMedium(
                _pop_float(table, "operator.sigma"), _pop_float(table, "operator.m")
            )
        if kind == "frac_mean_curvature":
            return FracMeanCurvature(_pop_float(table, "operator.sigma"))
        if kind == "frac_sum":
            raw = table.pop("operator.terms", None)
            if raw is None:
                raise ConfigError("operator.terms required for frac_sum")
            terms = []
            for chunk in raw.split(","):
                parts = chunk.strip().split(":")
                if len(parts) != 3:
                    raise ConfigError(
                        "operator.terms: frac_sum entries are sigma:p:beta"
                    )
                terms.append(tuple(float(x) for x in parts))
            return FracSum(tuple(terms))
        if kind == "directional_frac":
            raw = table.pop("operator.terms", None)
            if raw is None:
                raise ConfigError("operator.terms required for directional_frac")
            terms = []
            for chunk in raw.split(","):
                parts = chunk.strip().split(":")
                if len(parts) != 2:
                    raise ConfigError(
                        "operator.terms: directional_frac entries are sigma:beta"
                    )
                terms.append(tuple(float(x) for x in parts))
            return DirectionalFrac(tuple(terms))
    except ValueError as exc:
        raise ConfigError(f"operator: {exc}") from exc
    raise ConfigError(f"operator.kind: unknown kind {kind!r}")


def _build_grid(table: dict[str, str]) -> Grid:
    dim = _pop_int(table, "grid.dim", 1)
    if dim not in (1, 2):
        raise ConfigError(f"grid.dim: must be 1 or 2, got {dim}")
    raw_n = table.pop("grid.n", "101")
    try:
        npoints = tuple(int(x) for x in raw_n.split(","))
    except ValueError as exc:
        raise ConfigError("grid.n: not integers") from exc
    if len(npoints) == 1:
        npoints = npoints * dim
    if len(npoints) != dim:
        raise ConfigError("grid.n: need one count, or one per axis")
    raw_bounds = table.pop("grid.bounds", None)
    if raw_bounds is None:
        bounds = ((0.0, 1.0),) * dim  # the default box; the theory never fixes one
    else:
        try:
            bounds = tuple(
                tuple(float(x) for x in chunk.strip().split(":"))
                for chunk in raw_bounds.split(",")
            )
        except ValueError as exc:
            raise ConfigError("grid.bounds: entries are a:b per axis") from exc
        if len(bounds) == 1:
            bounds = bounds * dim
        if len(bounds) != dim or any(len(b) != 2 for b in bounds):
            raise ConfigError("grid.bounds: need a:b per axis")
    try:
        return Grid(bounds, npoints)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def _build_mesh(table: dict[str, str]) -> TimeMesh:
    alpha = _pop_float(table, "mesh.alpha")
    t_end = _pop_float(table, "mesh.t_end")
    nsteps = _pop_int(table, "mesh.steps")
    kind = table.pop("mesh.kind", "uniform").lower()
    if kind not in ("uniform", "graded"):
        raise ConfigError(f"mesh.kind: must be uniform or graded, got {kind!r}")
    grading = None
    if kind == "graded":
        grading = _pop_float(table, "mesh.grading", 2.0 / alpha)
    elif "mesh.grading" in table:
        raise ConfigError("mesh.grading: only valid with mesh.kind = graded")
    try:
        return TimeMesh(alpha, t_end, nsteps, grading)
    except ValueError as exc:
        raise ConfigError(f"mesh: {exc}") from exc


def parse_config(text: str) -> ScenarioConfig:
    table = _parse_lines(text)
    operator = _build_operator(table)
    grid = _build_grid(table)
    mesh = _build_mesh(table)
    preset = table.pop("ic.preset", "bump").lower()
    if preset not in _PRESETS:
        raise ConfigError(f"ic.preset: unknown preset {preset!r}")
    amplitude = _pop_float(table, "ic.amplitude", 1.0)
    if amplitude <= 0.0:
        raise ConfigError("ic.amplitude: initial datum must not vanish identically")
    seed = _pop_int(table, "ic.seed", 1234)
    raw_s = table.pop("norms.s", "2")
    try:
        s_list = tuple(float(x) for x in raw_s.split(","))
    except ValueError as exc:
        raise ConfigError("norms.s: not numbers") from exc
    if any(s <= 1.0 for s in s_list):
        raise ConfigError("norms.s: exponents must be > 1")
    cfg = ScenarioConfig(
        operator=operator,
        grid=grid,
        mesh=mesh,
        ic_preset=preset,
        ic_amplitude=amplitude,
        seed=seed,
        s_list=s_list,
        output_csv=table.pop("output.csv", None),
        audits_enabled=table.pop("audits.enabled", "true").lower() != "false",
        audit_tol=_pop_float(table, "audits.tolerance", 1e-8),
        gradient_bound=_pop_float(table, "audits.gradient_bound", 50.0),
        tol_newton=_pop_float(table, "solver.tol_newton", 1e-10),
    )
    if table:
        raise ConfigError(f"unknown keys: {', '.join(sorted(table))}")
    return cfg


def parse_config_file(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _bump_profile(xi: np.ndarray) -> np.ndarray:
    out = np.zeros_like(xi)
    inside = np.abs(xi) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi[inside] ** 2))
    return out


def _plateau_profile(xi: np.ndarray) -> np.ndarray:
    # trapezoid: ramps over the outer quarters, flat top in the middle
    return np.clip(2.0 * (1.0 - np.abs(xi)), 0.0, 1.0)


def initial_field(config: ScenarioConfig) -> Field:
    """Build the configured nonnegative initial datum on the grid."""
    grid = config.grid
    amp = config.ic_amplitude
    if config.ic_preset == "eigen":
        _, vec = smallest_eigenpair(Laplacian(), grid)
        values = amp * vec / np.max(vec)
    elif config.ic_preset == "random":
        rng = np.random.default_rng(config.seed)
        values = amp * rng.random(grid.shape)
        values[grid.boundary_mask()] = 0.0
    else:
        profile = _bump_profile if config.ic_preset == "bump" else _plateau_profile
        values = np.full(grid.shape, amp)
        for axis, ((a, b), ax) in enumerate(zip(grid.bounds, grid.axes())):
            xi = 2.0 * (ax - (a + b) / 2.0) / (b - a)
            shape = [1] * grid.dim
            shape[axis] = -1
            values = values * profile(xi).reshape(shape)
        values[grid.boundary_mask()] = 0.0
    if not np.any(values > 0.0):
        raise ConfigError("initial datum vanishes identically")
    return Field(grid, values, 0.0)
