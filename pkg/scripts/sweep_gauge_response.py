#!/usr/bin/env python3
"""Sweep the gauge solvers over sensor area and supply pressure.

Writes a point file per flow model (back-pressure vs sensor area at several
supply pressures) plus an SVG of the adiabatic response curve.  Useful for
eyeballing the back-pressure/clearance relation the regression models sit on.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from hybridfit.gauge import (
    GaugeConstants,
    GaugeInputs,
    solve_backpressure_adiabatic,
    solve_backpressure_isochoric,
)
from hybridfit.report import scatter_svg

SOLVERS = {
    "adiabatic": solve_backpressure_adiabatic,
    "isochoric": solve_backpressure_isochoric,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/gauge_sweep")
    parser.add_argument("--orifice-area", type=float, default=0.817)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    constants = GaugeConstants()
    areas = np.linspace(0.15, 1.6, 60)
    supplies = (0.199, 0.248, 0.297)

    for name, solver in SOLVERS.items():
        lines = ["area_sensor\tpressure_supply\tbackpressure"]
        for ps in supplies:
            for a in areas:
                p = solver(GaugeInputs(a, ps, args.orifice_area), constants)
                lines.append(f"{a:.6f}\t{ps:.3f}\t{p:.3f}")
        path = out / f"sweep_{name}.tsv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {path}")

    points = [
        (a, solve_backpressure_adiabatic(GaugeInputs(a, 0.248, args.orifice_area), constants))
        for a in areas
    ]
    svg = out / "sweep_adiabatic.svg"
    svg.write_text(
        scatter_svg(
            points,
            "sensor area (mm^2)",
            "back-pressure (kPa)",
            "Adiabatic back-pressure vs sensor area (Ps = 0.248 MPa)",
        ),
        encoding="utf-8",
    )
    print(f"wrote {svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
