"""End-to-end validation against the bundled pneumatic-gauge case study.

The repository ships the case study's two designed experiments (an 11-run
two-level factorial with replicated center runs, and a 15-run Box-Behnken
design) together with known-good reference outputs for every analysis this
package performs on them: plain polynomial fits of first and second order,
the two theory-scaled fits, the flow solvers, and the headline adequacy
verdicts.  :func:`run_validation` recomputes everything from the bundled
files and compares number by number, which makes it both an install check
and a regression test for the numerical core.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import config, dataset, gauge, hybrid, inference
from .errors import AnalysisError
from .linalg import ols_solve

FACTORIAL_BASENAME = "gauge_factorial"
BOXBEHNKEN_BASENAME = "gauge_boxbehnken"

# Reference values for the bundled case study.  Tolerances: "abs" is a
# per-entry absolute bound, "rel" a relative one.
COEF_FIRST_ORDER = (208.423, -34.409, 36.616, 18.277)
COEF_SECOND_ORDER = (212.598, -34.274, 38.221, 21.697, 0.286, -2.362,
                     -6.333, -9.561, 13.288, 6.227)
COEF_ADIABATIC = (27.044, 4.607, 6.614, 3.894, 0.907, -0.012, -0.010, -0.016)
COEF_ISOCHORIC = (15.429, 5.647, 7.694, 2.555, 0.971, -0.006, -0.026, -0.013)

FITTED_ADIABATIC = (188.345, 126.913, 283.472, 154.861, 198.295, 166.684,
                    294.225, 240.605, 213.083, 213.083, 213.083)
FITTED_ISOCHORIC = (188.704, 126.729, 283.427, 154.948, 198.099, 166.922,
                    294.322, 240.681, 212.938, 212.938, 212.938)

BACKPRESSURE_ADIABATIC = (187.986, 115.955, 280.554, 134.781, 196.727,
                          155.951, 293.607, 229.213, 206.223, 206.223, 206.223)
BACKPRESSURE_ISOCHORIC = (187.410, 116.513, 279.595, 136.175, 196.582,
                          155.431, 293.388, 226.924, 204.463, 204.463, 204.463)

KNOWN_DISCREPANCIES = (
    "first-order ANOVA: computed total df is 10 (n-1 for 11 runs); the "
    "reference table printed 14, which is not matched",
    "Box-Behnken table: the recorded fitted column equals the observations "
    "on all non-center runs, inconsistent with its own residual sum of "
    "squares 123.114; observations and coefficients are trusted instead",
    "Box-Behnken table: natural-unit sensor areas 0.546 and 1.834 disagree "
    "with the coded levels +1 used for fitting; coded columns are "
    "authoritative for the fit",
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: float
    got: float
    tol: float
    tol_kind: str  # "abs" or "rel"

    @property
    def passed(self) -> bool:
        if self.tol_kind == "abs":
            return abs(self.got - self.expected) <= self.tol
        return abs(self.got - self.expected) <= self.tol * abs(self.expected)


@dataclass(frozen=True)
class ValidationResult:
    checks: tuple[CheckResult, ...]
    notes: tuple[str, ...]
    constants: gauge.GaugeConstants

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def default_data_dir() -> Path:
    """Locate the repository data directory (cwd/data, or relative to the
    source checkout for editable installs)."""
    candidates = [
        Path.cwd() / "data",
        Path(__file__).resolve().parents[2] / "data",
    ]
    for cand in candidates:
        if (cand / f"{FACTORIAL_BASENAME}.tsv").is_file():
            return cand
    raise AnalysisError(
        "bundled case-study data not found; pass an explicit data directory "
        f"(tried {', '.join(str(c) for c in candidates)})"
    )


def _load(data_dir: Path, basename: str, extras: tuple[str, ...] = ()):
    cfg = config.read_keyvalues(data_dir / f"{basename}_spec.txt")
    specs = config.factor_specs(cfg)
    response, units = config.response_column(cfg)
    schema = dataset.TableSchema(
        factors=specs, response=response, extras=extras, response_units=units
    )
    ds = dataset.load_table(data_dir / f"{basename}.tsv", schema)
    return ds, cfg


def _check_vector(checks, name, expected, got, tol, tol_kind):
    for i, (e, g) in enumerate(zip(expected, got)):
        checks.append(CheckResult(f"{name}[{i}]", float(e), float(g), tol, tol_kind))


def run_validation(data_dir: Path | None = None) -> ValidationResult:
    """Recompute the full case study and compare against reference values.

    The result carries the individual check outcomes, notes on the known
    discrepancies in the reference tables (logged, never matched), and the
    gauge constants used for the solver checks.
    """
    data_dir = Path(data_dir) if data_dir is not None else default_data_dir()
    for basename in (FACTORIAL_BASENAME, BOXBEHNKEN_BASENAME):
        for suffix in (".tsv", "_spec.txt"):
            path = data_dir / f"{basename}{suffix}"
            if not path.is_file():
                raise AnalysisError(f"bundled case-study file missing: {path}")
    checks: list[CheckResult] = []

    # --- first-order plain fit on the factorial design -------------------
    ds5, cfg5 = _load(
        data_dir, FACTORIAL_BASENAME, extras=("P_adiabatic", "P_isochoric")
    )
    coded5 = dataset.code(ds5)
    design1 = dataset.build_design(coded5, "first")
    y5 = ds5.response
    groups5 = dataset.replicate_groups(ds5)

    q1 = ols_solve(design1.values, y5)
    _check_vector(checks, "mlr1.coef", COEF_FIRST_ORDER, q1, 1e-3, "abs")
    fitted1 = design1.values @ q1
    part1 = inference.mlr_partition(y5, fitted1, design1.n_coef)
    pe1 = inference.pure_error(y5, groups5, fitted1, part1.df_residual)
    f0_1 = (part1.ss_regression / part1.df_regression) / (
        part1.ss_residual / part1.df_residual
    )
    f_lof1, _ = inference.lack_of_fit_test(pe1)
    checks.append(CheckResult("mlr1.ss_regression", 2.287e4, part1.ss_regression, 0.005, "rel"))
    checks.append(CheckResult("mlr1.ss_residual", 2.99e3, part1.ss_residual, 0.005, "rel"))
    checks.append(CheckResult("mlr1.ss_pure_error", 0.949, pe1.ss_pure_error, 0.005, "rel"))
    checks.append(CheckResult("mlr1.f_regression", 17.85, f0_1, 0.005, "rel"))
    checks.append(CheckResult("mlr1.f_lack_of_fit", 1260.0, f_lof1, 0.02, "rel"))
    for name, expected, got in [
        ("mlr1.df_regression", 3, part1.df_regression),
        ("mlr1.df_residual", 7, part1.df_residual),
        ("mlr1.df_lack_of_fit", 5, pe1.df_lack_of_fit),
        ("mlr1.df_pure_error", 2, pe1.df_pure_error),
    ]:
        checks.append(CheckResult(name, expected, got, 0.0, "abs"))

    # --- second-order plain fit on the Box-Behnken design ----------------
    ds7, _ = _load(data_dir, BOXBEHNKEN_BASENAME)
    coded7 = dataset.code(ds7)
    design2 = dataset.build_design(coded7, "second")
    y7 = ds7.response
    groups7 = dataset.replicate_groups(ds7)

    q2 = ols_solve(design2.values, y7)
    _check_vector(checks, "mlr2.coef", COEF_SECOND_ORDER, q2, 1e-3, "abs")
    fitted2 = design2.values @ q2
    part2 = inference.mlr_partition(y7, fitted2, design2.n_coef)
    pe2 = inference.pure_error(y7, groups7, fitted2, part2.df_residual)
    f0_2 = (part2.ss_regression / part2.df_regression) / (
        part2.ss_residual / part2.df_residual
    )
    f_lof2, _ = inference.lack_of_fit_test(pe2)
    checks.append(CheckResult("mlr2.ss_regression", 2.624e4, part2.ss_regression, 0.005, "rel"))
    checks.append(CheckResult("mlr2.ss_residual", 123.114, part2.ss_residual, 0.005, "rel"))
    checks.append(CheckResult("mlr2.f_regression", 118.419, f0_2, 0.02, "rel"))
    checks.append(CheckResult("mlr2.f_lack_of_fit", 85.831, f_lof2, 0.02, "rel"))

    # --- theory-scaled fits on the factorial design ----------------------
    lof_stats = {}
    for label, column, coef_ref, fitted_ref, ss_gain_ref, f_design_ref, f_gain_ref in [
        ("adiabatic", "P_adiabatic", COEF_ADIABATIC, FITTED_ADIABATIC,
         2986.0, 84730.0, 505.0),
        ("isochoric", "P_isochoric", COEF_ISOCHORIC, FITTED_ISOCHORIC,
         2987.0, 145200.0, 866.0),
    ]:
        theory = hybrid.TheoryVector(ds5.extras[column], f"column:{column}")
        system = hybrid.assemble(design1, theory)
        fit = hybrid.solve(system, y5)
        _check_vector(checks, f"{label}.coef", coef_ref, fit.coef, 5e-3, "abs")
        _check_vector(checks, f"{label}.fitted", fitted_ref, fit.fitted, 0.5, "abs")
        part = inference.partition(system, y5)
        fstats = inference.f_statistics(part)
        pe = inference.pure_error(y5, groups5, fit.fitted, part.df_residual)
        f_lof, _ = inference.lack_of_fit_test(pe)
        lof_stats[label] = (f_lof, pe)
        checks.append(CheckResult(f"{label}.ss_design", 5.007e5, part.ss_design, 0.005, "rel"))
        checks.append(CheckResult(f"{label}.ss_theory_gain", ss_gain_ref, part.ss_theory_gain, 0.005, "rel"))
        checks.append(CheckResult(f"{label}.f_design", f_design_ref, fstats.f_design, 0.02, "rel"))
        checks.append(CheckResult(f"{label}.f_theory_gain", f_gain_ref, fstats.f_theory_gain, 0.02, "rel"))
        if label == "adiabatic":
            checks.append(CheckResult("adiabatic.ss_residual", 4.432, part.ss_residual, 0.005, "rel"))
            checks.append(CheckResult("adiabatic.ss_lack_of_fit", 3.483, pe.ss_lack_of_fit, 0.005, "rel"))
            checks.append(CheckResult("adiabatic.ss_pure_error", 0.949, pe.ss_pure_error, 0.005, "rel"))
            checks.append(CheckResult("adiabatic.f_lack_of_fit", 7.342, f_lof, 0.02, "rel"))
        else:
            checks.append(CheckResult("isochoric.ss_residual", 2.586, part.ss_residual, 0.005, "rel"))
            checks.append(CheckResult("isochoric.f_lack_of_fit", 3.45, f_lof, 0.02, "rel"))
            iso_ss_res = part.ss_residual

    # headline comparisons between the second-order plain fit and the
    # isochoric theory-scaled fit
    checks.append(CheckResult(
        "headline.ss_residual_ratio", 47.6, part2.ss_residual / iso_ss_res, 0.02, "rel"
    ))
    checks.append(CheckResult(
        "headline.sample_sd_mlr2", 2.965,
        float(np.sqrt(part2.ss_residual / (ds7.n_runs - 1))), 0.02, "rel",
    ))
    checks.append(CheckResult(
        "headline.sample_sd_isochoric", 0.509,
        float(np.sqrt(iso_ss_res / (ds5.n_runs - 1))), 0.02, "rel",
    ))

    # --- prediction-usefulness margins (critical over observed lack-of-fit
    # F; a useful predictor needs a margin of at least four) ---------------
    for label, margin_ref, useful_ref in [
        ("adiabatic", 2.5, False),
        ("isochoric", 5.4, True),
    ]:
        f_lof, pe = lof_stats[label]
        crit = inference.f_critical(0.05, pe.df_lack_of_fit, pe.df_pure_error)
        margin, useful = inference.box_wetz_ratio(crit, f_lof)
        checks.append(CheckResult(f"{label}.box_wetz_margin", margin_ref, margin, 0.05, "rel"))
        checks.append(CheckResult(
            f"{label}.box_wetz_useful", float(useful_ref), float(useful), 0.0, "abs"
        ))

    # --- flow solvers against the recorded simulation columns ------------
    constants, _ = config.gauge_constants(cfg5)
    for label, reference in [
        ("adiabatic", BACKPRESSURE_ADIABATIC),
        ("isochoric", BACKPRESSURE_ISOCHORIC),
    ]:
        solved = gauge.simulate_design(ds5, label, constants)
        _check_vector(checks, f"gauge.{label}", reference, solved.values, 0.5, "abs")

    return ValidationResult(
        checks=tuple(checks), notes=KNOWN_DISCREPANCIES, constants=constants
    )


def render_validation_report(result: ValidationResult) -> str:
    """Human-readable pass/fail table, one line per reference number."""
    n_pass = sum(c.passed for c in result.checks)
    k = result.constants
    lines = [
        "case-study validation: "
        f"{n_pass}/{len(result.checks)} checks passed",
        f"gauge constants: gamma={k.gamma:g}, p_atm={k.p_atm:g} kPa, "
        f"c_orifice={k.c_orifice:g}, c_sensor={k.c_sensor:g}",
        "",
        f"{'status':6}  {'check':28}  {'expected':>12}  {'got':>14}  tolerance",
    ]
    for c in result.checks:
        tol = f"{c.tol:g} ({c.tol_kind})"
        lines.append(
            f"{'PASS' if c.passed else 'FAIL':6}  {c.name:28}  "
            f"{c.expected:>12.6g}  {c.got:>14.8g}  {tol}"
        )
    lines.append("")
    lines.append("known discrepancies in the reference tables (logged, not matched):")
    for note in result.notes:
        lines.append(f"  - {note}")
    return "\n".join(lines) + "\n"
