"""Acceptance suite: seven oracle/property checks at desk scale.

Each criterion is a standalone function returning a CriterionResult; the
decay-matrix runs (criterion 3) are cached so the audit sweep (criterion 4)
reuses them.  ``run_suite`` is the single entry point used by the CLI.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as Gamma

from .analysis import DecayReport
from .config import ScenarioConfig
from .grid import Field, Grid, lp_norm
from .mittag import TimeMesh, mittag_leffler, solve_scalar_fode
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
    PLaplacian,
    PorousMedium,
    apply_operator,
    predicted_gamma,
)
from .runner import run_scenario, write_report_csv
from .stepping import l1_coefficients, smallest_eigenpair
from .analysis import symmetrized_energy
from .grid import inner_energy

__all__ = [
    "CriterionResult",
    "SuiteResult",
    "run_suite",
    "criterion_1_linear_oracle",
    "criterion_2_ml_asymptotic",
    "criterion_3_decay_matrix",
    "criterion_4_audits",
    "criterion_5_l1_order",
    "criterion_6_fode_barrier",
    "criterion_7_nonlocal_identities",
]


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str


@dataclass
class SuiteResult:
    results: list[CriterionResult] = field(default_factory=list)
    reports: dict[str, DecayReport] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def summary(self) -> str:
        lines = []
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"[{mark}] {r.name}: {r.detail}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _nthreads() -> int:
    raw = os.environ.get("FRADIFF_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n >= 1 else min(4, os.cpu_count() or 1)


# -- criterion 1 -----------------------------------------------------------

def criterion_1_linear_oracle() -> CriterionResult:
    """L2 norm of the eigen-datum heat run tracks E_alpha(-lam1 t^alpha)."""
    alpha = 0.5
    grid = Grid(bounds=((0.0, 1.0),), npoints=(201,))
    mesh = TimeMesh(alpha=alpha, t_end=50.0, nsteps=2000, grading=2.0 / alpha)
    config = ScenarioConfig(
        operator=Laplacian(), grid=grid, mesh=mesh, ic_preset="eigen",
        audits_enabled=False,
    )
    report = run_scenario(config)
    lam1, _ = smallest_eigenpair(Laplacian(), grid)
    v = report.norms[2.0]
    ratio = v / v[0]
    t = report.times
    exact = mittag_leffler(alpha, -lam1 * t**alpha)
    keep = ratio >= 1e-3
    rel = np.abs(ratio[keep] - exact[keep]) / exact[keep]
    worst = float(np.max(rel))
    return CriterionResult(
        "1 linear fractional heat oracle",
        worst <= 0.02,
        f"max relative deviation {worst:.3e} over {int(keep.sum())} nodes "
        f"with norm ratio >= 1e-3 (tolerance 2e-2)",
    )


# -- criterion 2 -----------------------------------------------------------

def criterion_2_ml_asymptotic() -> CriterionResult:
    """t^alpha E_alpha(-t^alpha) vs 1/Gamma(1-alpha) at t = 1e4."""
    t = 1.0e4
    worst = 0.0
    parts = []
    for alpha in (0.3, 0.5, 0.7):
        x = t**alpha
        val = x * mittag_leffler(alpha, -x)
        ref = 1.0 / Gamma(1.0 - alpha)
        rel = abs(val - ref) / ref
        worst = max(worst, rel)
        parts.append(f"alpha={alpha}: {rel:.3e}")
    return CriterionResult(
        "2 Mittag-Leffler asymptotic",
        worst <= 0.01,
        "; ".join(parts) + " (tolerance 1e-2 each)",
    )


# -- criteria 3 and 4 ------------------------------------------------------

_MATRIX_SPECS = (
    ("p_laplacian", PLaplacian(p=3.0)),
    ("porous_medium", PorousMedium(m=2.0)),
    ("doubly_nonlinear", DoublyNonlinear(p=3.0, m=2.0)),
    ("mean_curvature", MeanCurvature()),
    ("frac_laplacian", FracLaplacian(sigma=0.5)),
    ("frac_p_laplacian", FracPLaplacian(sigma=0.5, p=3.0)),
    ("frac_sum", FracSum(terms=((0.4, 2.0, 1.0), (0.6, 3.0, 1.0)))),
    ("directional_frac", DirectionalFrac(terms=((0.5, 1.0), (0.5, 1.0)))),
    ("frac_porous_medium", FracPorousMedium(sigma=0.5, m=2.0)),
    ("frac_mean_curvature", FracMeanCurvature(sigma=0.5)),
)

_MATRIX_K = 160


def matrix_configs() -> list[tuple[str, ScenarioConfig]]:
    alpha = 0.5
    out = []
    for name, spec in _MATRIX_SPECS:
        if isinstance(spec, DirectionalFrac):
            grid = Grid(bounds=((0.0, 1.0), (0.0, 1.0)), npoints=(21, 21))
        else:
            grid = Grid(bounds=((0.0, 1.0),), npoints=(81,))
        mesh = TimeMesh(alpha=alpha, t_end=1.0e3, nsteps=_MATRIX_K,
                        grading=2.0 / alpha)
        out.append((name, ScenarioConfig(
            operator=spec, grid=grid, mesh=mesh, ic_preset="bump",
        )))
    return out


_matrix_cache: dict[str, DecayReport] = {}


def run_matrix() -> dict[str, DecayReport]:
    """Run every criterion-3 scenario at K and 2K steps (cached)."""
    if _matrix_cache:
        return _matrix_cache
    jobs = []
    for name, cfg in matrix_configs():
        jobs.append((name, cfg))
        jobs.append((name + "@half_dt", cfg.with_steps(2 * _MATRIX_K)))
    with ThreadPoolExecutor(max_workers=_nthreads()) as pool:
        for (name, _), report in zip(jobs, pool.map(
                lambda item: run_scenario(item[1]), jobs)):
            _matrix_cache[name] = report
    return _matrix_cache


def criterion_3_decay_matrix() -> CriterionResult:
    reports = run_matrix()
    failures = []
    parts = []
    for name, _ in _MATRIX_SPECS:
        rep, rep2 = reports[name], reports[name + "@half_dt"]
        rate = rep.predicted_rate
        ok = True
        if not (rep.completed and rep2.completed):
            ok = False
            parts.append(f"{name}: step failure ({rep.failure or rep2.failure})")
        elif 2.0 not in rep.fitted:
            ok = False
            parts.append(f"{name}: tail fit unavailable")
        else:
            fitted = rep.fitted[2.0][0]
            drift = abs(rep2.cstar - rep.cstar) / rep.cstar
            ok = (fitted >= 0.85 * rate and math.isfinite(rep.cstar)
                  and drift <= 0.10)
            parts.append(
                f"{name}: fitted {fitted:.3f} vs 0.85*rate {0.85 * rate:.3f}, "
                f"cstar {rep.cstar:.3g} drift {drift:.2%}"
            )
        if not ok:
            failures.append(name)
    passed = not failures
    detail = "; ".join(parts)
    if failures:
        detail = "failed {" + ", ".join(failures) + "} -- " + detail
    return CriterionResult("3 decay-exponent matrix", passed, detail)


def criterion_4_audits() -> CriterionResult:
    reports = run_matrix()
    failures = []
    for name, rep in reports.items():
        bad = [key for key, ok in rep.audits.items() if not ok]
        if bad:
            failures.append(f"{name}: {','.join(bad)}")
    return CriterionResult(
        "4 inequality audits",
        not failures,
        "; ".join(failures) if failures
        else f"lemma-AZ, SA positivity, (v3), norm non-increase hold at "
             f"every step of all {len(reports)} runs",
    )


# -- criterion 5 -----------------------------------------------------------

def _l1_error_uniform(alpha: float, nsteps: int) -> float:
    """Max error of the implicit L1 march for d_t^alpha v = f, v = t^2."""
    mesh = TimeMesh(alpha=alpha, t_end=1.0, nsteps=nsteps)
    t = mesh.nodes
    f = Gamma(3.0) / Gamma(3.0 - alpha) * t ** (2.0 - alpha)
    v = np.zeros(nsteps + 1)
    for k in range(1, nsteps + 1):
        coeffs = l1_coefficients(mesh, k)
        c_last = coeffs[-1]
        memory = float(coeffs[:-1] @ np.diff(v[:k])) if k >= 2 else 0.0
        v[k] = v[k - 1] + (f[k] - memory) / c_last
    return float(np.max(np.abs(v - t**2)))


def criterion_5_l1_order() -> CriterionResult:
    parts = []
    ok = True
    for alpha in (0.3, 0.7):
        errs = [_l1_error_uniform(alpha, n) for n in (100, 200, 400)]
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        order = sum(orders) / len(orders)
        lo, hi = 2.0 - alpha - 0.2, 2.0 - alpha + 0.2
        ok &= lo <= order <= hi
        parts.append(f"alpha={alpha}: order {order:.3f} in [{lo:.2f},{hi:.2f}]")
    return CriterionResult("5 L1 convergence order", ok, "; ".join(parts))


# -- criterion 6 -----------------------------------------------------------

def criterion_6_fode_barrier() -> CriterionResult:
    cases = ((0.5, 1.0, 1.0), (0.5, 2.0, 1.0), (0.3, 3.0, 2.0))
    parts = []
    ok = True
    for alpha, gam, C in cases:
        mesh = TimeMesh(alpha=alpha, t_end=50.0, nsteps=800,
                        grading=2.0 / alpha)
        sol = solve_scalar_fode(alpha, gam, C, 1.0, mesh)
        w = sol.values
        mono = bool(np.all(np.diff(w) <= 1e-12))
        nonneg = bool(np.all(w >= 0.0))
        dominated = bool(np.all(w <= sol.barrier_values() * (1.0 + 1e-10)))
        case_ok = mono and nonneg and dominated
        msg = (f"(a={alpha},g={gam},C={C}): monotone={mono} "
               f"nonneg={nonneg} dominated={dominated}")
        if gam == 1.0:
            exact = mittag_leffler(alpha, -mesh.nodes**alpha / C)
            rel = float(np.max(np.abs(w - exact) / np.maximum(exact, 1e-300)))
            case_ok &= rel <= 0.02
            msg += f" ml-dev={rel:.3e}"
        ok &= case_ok
        parts.append(msg)
    return CriterionResult("6 scalar FODE vs barrier", ok, "; ".join(parts))


# -- criterion 7 -----------------------------------------------------------

def criterion_7_nonlocal_identities() -> CriterionResult:
    rng = np.random.default_rng(7)
    grid = Grid(bounds=((0.0, 1.0),), npoints=(65,))
    parts = []
    ok = True

    # symmetrization double-sum identity on random nonnegative fields
    worst_sym = 0.0
    for spec in (FracLaplacian(sigma=0.4), FracPLaplacian(sigma=0.5, p=3.0),
                 FracSum(terms=((0.3, 2.0, 1.0), (0.6, 2.5, 0.5)))):
        for _ in range(3):
            vals = rng.uniform(0.0, 1.0, grid.shape)
            vals[0] = vals[-1] = 0.0
            u = Field(grid, vals)
            direct = inner_energy(u, 2.0, apply_operator(spec, u))
            sym = symmetrized_energy(spec, u, 2.0)
            worst_sym = max(worst_sym, abs(direct - sym) / abs(sym))
    ok &= worst_sym <= 1e-10
    parts.append(f"symmetrization identity rel dev {worst_sym:.3e} (tol 1e-10)")

    # singleton FracSum is exactly the fractional p-Laplacian
    vals = rng.uniform(0.0, 1.0, grid.shape)
    vals[0] = vals[-1] = 0.0
    u = Field(grid, vals)
    a = apply_operator(FracSum(terms=((0.5, 3.0, 1.0),)), u).values
    b = apply_operator(FracPLaplacian(sigma=0.5, p=3.0), u).values
    single_dev = float(np.max(np.abs(a - b)))
    ok &= single_dev == 0.0 or single_dev <= 1e-13 * np.max(np.abs(b))
    parts.append(f"FracSum singleton node-wise dev {single_dev:.3e}")

    # (-Delta)^{1/2} of the half-sphere profile is flat in the interior
    g2 = Grid(bounds=((-1.0, 1.0),), npoints=(401,))
    x = g2.axes()[0]
    prof = np.sqrt(np.clip(1.0 - x**2, 0.0, None))
    image = apply_operator(FracLaplacian(sigma=0.5), Field(g2, prof)).values
    window = np.abs(x) <= 0.9
    vals_w = image[window]
    spread = float((vals_w.max() - vals_w.min()) / np.mean(vals_w))
    ok &= abs(spread) <= 0.02
    parts.append(f"half-sphere interior spread {spread:.3e} on |x|<=0.9 "
                 "(tol 2e-2)")

    return CriterionResult("7 nonlocal operator identities", ok, "; ".join(parts))


# -- suite -----------------------------------------------------------------

def run_suite(output_dir: str | None = None) -> SuiteResult:
    suite = SuiteResult()
    suite.results.append(criterion_1_linear_oracle())
    suite.results.append(criterion_2_ml_asymptotic())
    suite.results.append(criterion_3_decay_matrix())
    suite.results.append(criterion_4_audits())
    suite.results.append(criterion_5_l1_order())
    suite.results.append(criterion_6_fode_barrier())
    suite.results.append(criterion_7_nonlocal_identities())
    suite.reports = dict(_matrix_cache)
    if output_dir is not None:
        os.makedirs(output_dir, exist_ok=True)
        for name, rep in suite.reports.items():
            write_report_csv(rep, os.path.join(output_dir, f"{name}.csv"))
        with open(os.path.join(output_dir, "summary.txt"), "w",
                  encoding="utf-8") as fh:
            fh.write(suite.summary() + "\n")
    return suite
