"""Report rendering: ANOVA tables (text and delimited rows), coefficient
files, residual-plot point files, and standalone SVG plots.

All output is plain text with fixed float formatting, so identical analyses
produce byte-identical files.  Text tables print sums of squares and mean
squares at four significant figures and F statistics at six; the delimited
row files carry full precision for machine consumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .inference import (
    MlrPartition,
    PureErrorDecomposition,
    ResidualDiagnostics,
    SSPartition,
    f_cdf,
)


@dataclass(frozen=True)
class AnovaRow:
    source: str
    ss: float
    df: int
    ms: float | None = None
    f: float | None = None
    p: float | None = None


@dataclass(frozen=True)
class AnovaReport:
    title: str
    rows: tuple[AnovaRow, ...]


def _fmt_ss(v: float) -> str:
    return f"{v:.4g}"


def _fmt_f(v: float) -> str:
    return f"{v:.6g}"


def _fmt_p(v: float) -> str:
    return f"{v:.4g}"


def _row_cells(row: AnovaRow) -> list[str]:
    return [
        row.source,
        _fmt_ss(row.ss),
        str(row.df),
        _fmt_ss(row.ms) if row.ms is not None else "",
        _fmt_f(row.f) if row.f is not None else "",
        _fmt_p(row.p) if row.p is not None else "",
    ]


HEADER = ["Source", "SS", "df", "MS", "F", "p"]


def render_anova_text(report: AnovaReport) -> str:
    """Aligned plain-text rendering of an ANOVA table."""
    table = [HEADER] + [_row_cells(r) for r in report.rows]
    widths = [max(len(row[c]) for row in table) for c in range(len(HEADER))]
    lines = [report.title, "-" * (sum(widths) + 2 * (len(widths) - 1))]
    for row in table:
        lines.append(
            "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        )
    return "\n".join(lines) + "\n"


def render_anova_rows(report: AnovaReport) -> str:
    """Tab-separated machine-readable rendering of an ANOVA table."""
    lines = ["\t".join(["source", "ss", "df", "ms", "f", "p"])]
    for row in report.rows:
        lines.append(
            "\t".join(
                [
                    row.source,
                    repr(row.ss),
                    str(row.df),
                    repr(row.ms) if row.ms is not None else "",
                    repr(row.f) if row.f is not None else "",
                    repr(row.p) if row.p is not None else "",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _mean_square(ss: float, df: int) -> float | None:
    return ss / df if df > 0 else None


def _f_and_p(ms_num: float | None, df_num: int, ms_den: float | None, df_den: int):
    if ms_num is None or ms_den is None or ms_den <= 0.0 or df_den <= 0:
        return None, None
    f = ms_num / ms_den
    return f, 1.0 - f_cdf(f, df_num, df_den)


def hybrid_anova_overall(part: SSPartition) -> AnovaReport:
    """Overall fit table: regression on all ranked directions vs residual."""
    ms_res = _mean_square(part.ss_residual, part.df_residual)
    ms_reg = _mean_square(part.ss_regression, part.df_regression)
    f, p = _f_and_p(ms_reg, part.df_regression, ms_res, part.df_residual)
    return AnovaReport(
        title="Analysis of variance: overall fit",
        rows=(
            AnovaRow("Regression", part.ss_regression, part.df_regression, ms_reg, f, p),
            AnovaRow("Residual", part.ss_residual, part.df_residual, ms_res),
            AnovaRow("Total", part.ss_total, part.n_runs),
        ),
    )


def hybrid_anova_partitioned(
    part: SSPartition, pe: PureErrorDecomposition | None
) -> AnovaReport:
    """Full table separating the plain-polynomial term from the theory gain,
    with the lack-of-fit / pure-error breakdown when replicates exist."""
    ms_res = _mean_square(part.ss_residual, part.df_residual)
    ms_design = _mean_square(part.ss_design, part.df_design)
    ms_gain = _mean_square(part.ss_theory_gain, part.df_theory_gain)
    f_design, p_design = _f_and_p(ms_design, part.df_design, ms_res, part.df_residual)
    f_gain, p_gain = _f_and_p(ms_gain, part.df_theory_gain, ms_res, part.df_residual)
    rows = [
        AnovaRow(
            "Linear regression", part.ss_design, part.df_design, ms_design,
            f_design, p_design,
        ),
        AnovaRow(
            "Corrected regression", part.ss_theory_gain, part.df_theory_gain,
            ms_gain, f_gain, p_gain,
        ),
        AnovaRow("Residual", part.ss_residual, part.df_residual, ms_res),
    ]
    rows += _lof_rows(pe)
    rows.append(AnovaRow("Total", part.ss_total, part.n_runs))
    return AnovaReport(
        title="Analysis of variance: linear term and theory correction",
        rows=tuple(rows),
    )


def hybrid_anova_corrected(part: SSPartition) -> AnovaReport:
    """Abbreviated table with the plain-polynomial part removed from the
    total."""
    ms_res = _mean_square(part.ss_residual, part.df_residual)
    ms_gain = _mean_square(part.ss_theory_gain, part.df_theory_gain)
    f_gain, p_gain = _f_and_p(ms_gain, part.df_theory_gain, ms_res, part.df_residual)
    return AnovaReport(
        title="Analysis of variance: corrected for the linear term",
        rows=(
            AnovaRow(
                "Corrected regression", part.ss_theory_gain, part.df_theory_gain,
                ms_gain, f_gain, p_gain,
            ),
            AnovaRow("Residual", part.ss_residual, part.df_residual, ms_res),
            AnovaRow(
                "Corrected total", part.ss_total_corrected,
                part.n_runs - part.df_design,
            ),
        ),
    )


def _lof_rows(pe: PureErrorDecomposition | None) -> list[AnovaRow]:
    if pe is None or pe.df_pure_error <= 0:
        return []
    ms_lof = _mean_square(pe.ss_lack_of_fit, pe.df_lack_of_fit)
    ms_pe = _mean_square(pe.ss_pure_error, pe.df_pure_error)
    f_lof, p_lof = _f_and_p(ms_lof, pe.df_lack_of_fit, ms_pe, pe.df_pure_error)
    return [
        AnovaRow(
            "Lack of fit", pe.ss_lack_of_fit, pe.df_lack_of_fit, ms_lof,
            f_lof, p_lof,
        ),
        AnovaRow("Pure error", pe.ss_pure_error, pe.df_pure_error, ms_pe),
    ]


def mlr_anova_uncorrected(
    y: np.ndarray, fitted: np.ndarray, n_coef: int
) -> AnovaReport:
    """Uncorrected overall table for a plain polynomial fit (intercept kept
    in the regression row)."""
    y = np.asarray(y, dtype=float).ravel()
    fitted = np.asarray(fitted, dtype=float).ravel()
    n = y.shape[0]
    ss_total = float(y @ y)
    ss_reg = float(fitted @ y)
    ss_res = ss_total - ss_reg
    df_res = n - n_coef
    ms_res = _mean_square(ss_res, df_res)
    ms_reg = _mean_square(ss_reg, n_coef)
    f, p = _f_and_p(ms_reg, n_coef, ms_res, df_res)
    return AnovaReport(
        title="Analysis of variance: overall fit",
        rows=(
            AnovaRow("Regression", ss_reg, n_coef, ms_reg, f, p),
            AnovaRow("Residual", ss_res, df_res, ms_res),
            AnovaRow("Total", ss_total, n),
        ),
    )


def mlr_anova_corrected(
    part: MlrPartition, pe: PureErrorDecomposition | None
) -> AnovaReport:
    """Classical about-the-mean ANOVA for a plain polynomial fit, with the
    lack-of-fit breakdown when replicates exist."""
    ms_res = _mean_square(part.ss_residual, part.df_residual)
    ms_reg = _mean_square(part.ss_regression, part.df_regression)
    f0, p0 = _f_and_p(ms_reg, part.df_regression, ms_res, part.df_residual)
    rows = [
        AnovaRow("Regression", part.ss_regression, part.df_regression, ms_reg, f0, p0),
        AnovaRow("Residual", part.ss_residual, part.df_residual, ms_res),
    ]
    rows += _lof_rows(pe)
    rows.append(AnovaRow("Total (about mean)", part.ss_total_about_mean, part.df_total))
    return AnovaReport(
        title="Analysis of variance about the mean",
        rows=tuple(rows),
    )


def mlr_anova_regression_only(part: MlrPartition) -> AnovaReport:
    """Abbreviated about-the-mean table without the lack-of-fit breakdown."""
    ms_res = _mean_square(part.ss_residual, part.df_residual)
    ms_reg = _mean_square(part.ss_regression, part.df_regression)
    f0, p0 = _f_and_p(ms_reg, part.df_regression, ms_res, part.df_residual)
    return AnovaReport(
        title="Analysis of variance about the mean (abbreviated)",
        rows=(
            AnovaRow("Regression", part.ss_regression, part.df_regression, ms_reg, f0, p0),
            AnovaRow("Residual", part.ss_residual, part.df_residual, ms_res),
            AnovaRow("Total (about mean)", part.ss_total_about_mean, part.df_total),
        ),
    )


def render_coefficients(
    labels: Sequence[str],
    estimates: np.ndarray,
    std_errors: np.ndarray | None = None,
) -> str:
    """Tab-separated coefficient table: term, estimate, standard error."""
    lines = ["\t".join(["term", "estimate", "std_error"])]
    for i, label in enumerate(labels):
        se = "" if std_errors is None else f"{std_errors[i]:.6g}"
        lines.append("\t".join([label, f"{estimates[i]:.3f}", se]))
    return "\n".join(lines) + "\n"


def render_points(
    points: Sequence[tuple[float, float]], xname: str, yname: str
) -> str:
    """Tab-separated two-column point file."""
    lines = ["\t".join([xname, yname])]
    for x, y in points:
        lines.append(f"{x:.6f}\t{y:.6f}")
    return "\n".join(lines) + "\n"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def scatter_svg(
    points: Sequence[tuple[float, float]],
    xlabel: str,
    ylabel: str,
    title: str,
    width: int = 640,
    height: int = 480,
) -> str:
    """Standalone SVG scatter plot with labeled axes.

    Hand-built rather than delegated to a plotting library so that output
    bytes depend only on the data.
    """
    margin = 70.0
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = (x_hi - x_lo) * 0.08 or max(abs(x_lo), 1.0) * 0.08
    y_pad = (y_hi - y_lo) * 0.08 or max(abs(y_lo), 1.0) * 0.08
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def py(y: float) -> float:
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 18}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{xlabel}</text>',
        f'<text x="20" y="{height / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {height / 2:.1f})">{ylabel}</text>',
    ]
    for t in _ticks(x_lo + x_pad, x_hi - x_pad):
        parts.append(
            f'<line x1="{px(t):.2f}" y1="{height - margin}" x2="{px(t):.2f}" '
            f'y2="{height - margin + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px(t):.2f}" y="{height - margin + 20}" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{t:.4g}</text>'
        )
    for t in _ticks(y_lo + y_pad, y_hi - y_pad):
        parts.append(
            f'<line x1="{margin - 5}" y1="{py(t):.2f}" x2="{margin}" '
            f'y2="{py(t):.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{py(t):.2f}" text-anchor="end" '
            f'dominant-baseline="middle" font-family="sans-serif" '
            f'font-size="11">{t:.4g}</text>'
        )
    if y_lo < 0.0 < y_hi:
        parts.append(
            f'<line x1="{margin}" y1="{py(0):.2f}" x2="{width - margin}" '
            f'y2="{py(0):.2f}" stroke="#bbbbbb" stroke-dasharray="4 3"/>'
        )
    for x, y in points:
        parts.append(
            f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3.5" '
            f'fill="none" stroke="#1f4e9c" stroke-width="1.4"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_diagnostic_files(
    diag: ResidualDiagnostics, out_dir: Path, response_units: str
) -> list[Path]:
    """Write residual plot point files and SVG plots with stable names."""
    unit = f" ({response_units})" if response_units else ""
    written = []
    normal_tsv = out_dir / "residuals_normal.tsv"
    normal_tsv.write_text(
        render_points(diag.normal_plot, "normal_quantile", "ordered_residual"),
        encoding="utf-8",
    )
    written.append(normal_tsv)
    normal_svg = out_dir / "residuals_normal.svg"
    normal_svg.write_text(
        scatter_svg(
            diag.normal_plot,
            "standard normal quantile",
            f"ordered residual{unit}",
            "Normal probability plot of residuals",
        ),
        encoding="utf-8",
    )
    written.append(normal_svg)
    fitted_tsv = out_dir / "residuals_fitted.tsv"
    fitted_tsv.write_text(
        render_points(diag.scatter, "fitted", "residual"), encoding="utf-8"
    )
    written.append(fitted_tsv)
    fitted_svg = out_dir / "residuals_fitted.svg"
    fitted_svg.write_text(
        scatter_svg(
            diag.scatter,
            f"fitted value{unit}",
            f"residual{unit}",
            "Residuals versus fitted values",
        ),
        encoding="utf-8",
    )
    written.append(fitted_svg)
    return written
