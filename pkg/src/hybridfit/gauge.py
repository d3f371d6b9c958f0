"""Deterministic pneumatic-gauge simulators.

A jet of air flows from a supply chamber through an orifice of area B, then
out of a nozzle whose effective exit area A is set by the nozzle-to-workpiece
clearance.  In steady state the weight flow rates through the two restrictors
are equal, which pins the back-pressure between them.  Two flow idealizations
are provided (adiabatic and isochoric); each yields a flow-equality equation
solved for the back-pressure by bisection.

The sqrt(2g/RT) factor common to both sides of the flow equality cancels, so
gravity, the gas constant, and temperature never enter.  Likewise only the
area ratio A/B matters, so areas may be given in any common unit (mm^2 in the
bundled data).  Supply pressure is absolute MPa; all other pressures are kPa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .dataset import Dataset
from .errors import AnalysisError, InconsistencyError, RootBracketError, ShapeError
from .hybrid import TheoryVector

# The root solve bisects until the bracket collapses to adjacent floats,
# then requires the flow-equality residual to be this small relative to the
# orifice-side flow.  A collapsed bracket with a sign change is accepted
# regardless: no representable value can do better when the equality is very
# steep (roots within a few ulp of the bracket edge).
RESIDUAL_REL_TOL = 1e-9

# Continuity of the two-branch flow factors at their regime boundary.
BRANCH_CONTINUITY_TOL = 1e-9


@dataclass(frozen=True)
class GaugeConstants:
    """Physical constants and discharge coefficients for the flow solvers."""

    gamma: float = 1.4          # ratio of specific heats (diatomic air)
    p_atm: float = 101.325      # outlet (atmosphere) pressure, kPa
    c_orifice: float = 1.0
    c_sensor: float = 1.0

    def __post_init__(self) -> None:
        if not self.gamma > 1.0:
            raise AnalysisError(f"gamma must exceed 1, got {self.gamma}")
        if not self.p_atm > 0.0:
            raise AnalysisError(f"p_atm must be positive, got {self.p_atm}")
        for name in ("c_orifice", "c_sensor"):
            c = getattr(self, name)
            if not 0.0 < c <= 1.0:
                raise AnalysisError(f"{name} must lie in (0, 1], got {c}")


@dataclass(frozen=True)
class GaugeInputs:
    """One gauge operating point: sensor exit area A (mm^2), absolute supply
    pressure (MPa), and orifice area B (mm^2)."""

    area_sensor: float
    pressure_supply: float
    area_orifice: float

    def __post_init__(self) -> None:
        for name in ("area_sensor", "pressure_supply", "area_orifice"):
            v = getattr(self, name)
            if not v > 0.0:
                raise AnalysisError(f"{name} must be positive, got {v}")

    @property
    def pressure_supply_kpa(self) -> float:
        return self.pressure_supply * 1000.0


def critical_pressure_ratio(gamma: float) -> float:
    """Downstream/upstream pressure ratio below which adiabatic flow chokes."""
    return (2.0 / (gamma + 1.0)) ** (gamma / (gamma - 1.0))


def flow_factor_adiabatic(pressure_ratio: float, gamma: float) -> float:
    """Dimensionless adiabatic flow factor as a function of the
    downstream/upstream pressure ratio.

    Subsonic branch above the critical ratio, constant (choked) below it;
    the two branches join continuously at the critical ratio.
    """
    if not 0.0 < pressure_ratio <= 1.0:
        raise AnalysisError(
            f"pressure ratio must lie in (0, 1], got {pressure_ratio}"
        )
    r = pressure_ratio
    if r >= critical_pressure_ratio(gamma):
        inner = r ** (2.0 / gamma) - r ** ((gamma + 1.0) / gamma)
        return math.sqrt(gamma / (gamma - 1.0) * max(inner, 0.0))
    return math.sqrt(
        gamma / (gamma + 1.0) * (2.0 / (gamma + 1.0)) ** (2.0 / (gamma - 1.0))
    )


def flow_factor_isochoric(p_up: float, p_down: float) -> float:
    """Isochoric flow factor (kPa-scaled) for flow from ``p_up`` down to
    ``p_down``; chokes at a pressure ratio of one half."""
    if not 0.0 < p_down <= p_up:
        raise AnalysisError(
            f"need 0 < downstream <= upstream, got {p_down}, {p_up}"
        )
    if p_down / p_up >= 0.5:
        return math.sqrt(p_down * (p_up - p_down))
    return p_up / 2.0


def _bisect(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """Bisection until the bracket collapses to adjacent floats.

    The flow-equality residual is continuous and strictly decreasing in the
    back-pressure, so bisection converges unconditionally.  Returns the final
    bracket, whose endpoints carry residuals of opposite sign (or zero).
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, lo
    if fhi == 0.0:
        return hi, hi
    if flo * fhi > 0.0:
        raise RootBracketError(
            "flow equality has no sign change on the bracket: "
            f"residual {flo:.6g} at {lo:.6g} kPa and {fhi:.6g} at {hi:.6g} kPa"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # adjacent floats
        fmid = f(mid)
        if fmid == 0.0:
            return mid, mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return lo, hi


def _solve_equality(
    inputs: GaugeInputs,
    constants: GaugeConstants,
    orifice_side: Callable[[float], float],
    sensor_side: Callable[[float], float],
) -> float:
    p_s = inputs.pressure_supply_kpa
    p_a = constants.p_atm
    if p_s <= p_a:
        raise AnalysisError(
            f"supply pressure {p_s} kPa must exceed outlet pressure {p_a} kPa"
        )

    def residual(p: float) -> float:
        return orifice_side(p) - sensor_side(p)

    eps = 1e-9 * (p_s - p_a)
    lo, hi = _bisect(residual, p_a + eps, p_s - eps)
    root = hi if abs(residual(hi)) < abs(residual(lo)) else lo
    reference = orifice_side(root)
    collapsed = math.nextafter(lo, math.inf) >= hi
    if not collapsed and abs(residual(root)) > RESIDUAL_REL_TOL * max(reference, 1e-300):
        raise InconsistencyError(
            f"flow-equality residual {residual(root):.3e} at the returned "
            f"root exceeds {RESIDUAL_REL_TOL:g} of the orifice-side flow "
            f"{reference:.6g}"
        )
    return root


def solve_backpressure_adiabatic(
    inputs: GaugeInputs, constants: GaugeConstants
) -> float:
    """Back-pressure (kPa) balancing adiabatic flow through orifice and
    sensor.  Unique root of the flow equality in (p_atm, supply)."""
    p_s = inputs.pressure_supply_kpa
    g = constants.gamma

    def orifice_side(p: float) -> float:
        return (
            constants.c_orifice
            * inputs.area_orifice
            * p_s
            * flow_factor_adiabatic(p / p_s, g)
        )

    def sensor_side(p: float) -> float:
        return (
            constants.c_sensor
            * inputs.area_sensor
            * p
            * flow_factor_adiabatic(constants.p_atm / p, g)
        )

    return _solve_equality(inputs, constants, orifice_side, sensor_side)


def solve_backpressure_isochoric(
    inputs: GaugeInputs, constants: GaugeConstants
) -> float:
    """Back-pressure (kPa) balancing isochoric flow through orifice and
    sensor."""
    p_s = inputs.pressure_supply_kpa

    def orifice_side(p: float) -> float:
        return constants.c_orifice * inputs.area_orifice * flow_factor_isochoric(p_s, p)

    def sensor_side(p: float) -> float:
        return constants.c_sensor * inputs.area_sensor * flow_factor_isochoric(
            p, constants.p_atm
        )

    return _solve_equality(inputs, constants, orifice_side, sensor_side)


_SOLVERS = {
    "adiabatic": solve_backpressure_adiabatic,
    "isochoric": solve_backpressure_isochoric,
}


def simulate_design(
    ds: Dataset, model: str, constants: GaugeConstants
) -> TheoryVector:
    """Run the chosen flow solver at every row of the design.

    The dataset's factors must be (sensor area mm^2, supply pressure MPa,
    orifice area mm^2) in that order.  The simulation is deterministic:
    identical rows give bit-identical back-pressures.
    """
    if model not in _SOLVERS:
        raise AnalysisError(f"unknown gauge model {model!r}")
    if ds.n_factors != 3:
        raise ShapeError(
            f"gauge simulation needs the three factors (A, Ps, B), got "
            f"{ds.n_factors}"
        )
    solver = _SOLVERS[model]
    values = []
    cache: dict[tuple[float, ...], float] = {}
    for i, row in enumerate(ds.naturals):
        key = tuple(row)
        if key not in cache:
            try:
                cache[key] = solver(GaugeInputs(*row), constants)
            except AnalysisError as exc:
                raise type(exc)(f"row {i + 1}: {exc}") from exc
        values.append(cache[key])
    return TheoryVector(values=values, source_label=model)
