"""Equilibrium analysis of the thermal model and the steady-state cooling region.

At equilibrium the indoor temperature is affine in the cooling supply,
``t_in = k * q_ac + b``. Inverting that map against the comfort band and the
HVAC capacity gives the interval of cooling supplies whose steady state is
comfortable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroSlope
from .thermal import ContinuousStateSpace, Disturbance, ThermalState, _check_invertible


@dataclass(frozen=True)
class ComfortBand:
    t_low: float
    t_high: float

    def __post_init__(self):
        if not self.t_low < self.t_high:
            raise ValueError(f"comfort band needs t_low < t_high, got [{self.t_low}, {self.t_high}]")

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return self.t_low - tol <= t <= self.t_high + tol


@dataclass(frozen=True)
class AffineIndoorMap:
    k: float  # degC per W
    b: float  # degC at zero cooling

    def __call__(self, q_ac):
        return self.k * q_ac + self.b


@dataclass(frozen=True)
class FeasibleRegion:
    """Closed interval [lo, hi] of cooling supply in W.

    When no supply reaches the band, ``empty`` is set and the interval collapses
    to the single supply in [0, q_max] whose steady state is closest to the band.
    """

    lo: float
    hi: float
    empty: bool = False

    def contains(self, q: float) -> bool:
        return self.lo <= q <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


def equilibrium(ss: ContinuousStateSpace, q_ac: float, d: Disturbance) -> ThermalState:
    _check_invertible(ss.a)
    rhs = ss.b[:, 0] * q_ac + ss.g @ d.as_array()
    return ThermalState.from_array(-np.linalg.solve(ss.a, rhs))


def affine_indoor_map(ss: ContinuousStateSpace, d: Disturbance) -> AffineIndoorMap:
    _check_invertible(ss.a)
    sens_q = -np.linalg.solve(ss.a, ss.b[:, 0])
    sens_d = -np.linalg.solve(ss.a, ss.g)
    return AffineIndoorMap(k=float(sens_q[0]), b=float(sens_d[0] @ d.as_array()))


def indoor_sensitivities(ss: ContinuousStateSpace) -> tuple[float, np.ndarray]:
    """Slope in q_ac and the disturbance row of the equilibrium indoor temperature.

    Lets callers evaluate many intercepts as one dot product each.
    """
    _check_invertible(ss.a)
    return float(-np.linalg.solve(ss.a, ss.b[:, 0])[0]), -np.linalg.solve(ss.a, ss.g)[0]


def feasible_region(m: AffineIndoorMap, band: ComfortBand, q_ac_max: float) -> FeasibleRegion:
    if q_ac_max <= 0:
        raise ValueError(f"q_ac_max must be positive, got {q_ac_max!r}")
    if m.k == 0 or not np.isfinite(m.k):
        raise ZeroSlope(f"indoor map slope is {m.k!r}")

    # supply that puts the steady state exactly on each band edge
    q_at_high = (band.t_high - m.b) / m.k
    q_at_low = (band.t_low - m.b) / m.k
    band_lo, band_hi = min(q_at_high, q_at_low), max(q_at_high, q_at_low)

    lo = max(0.0, band_lo)
    hi = min(band_hi, q_ac_max)
    if lo <= hi:
        return FeasibleRegion(float(lo), float(hi), empty=False)

    # the band is reachable only outside [0, q_max]; pick the capacity edge nearest it
    point = q_ac_max if band_lo > q_ac_max else 0.0
    return FeasibleRegion(float(point), float(point), empty=True)
