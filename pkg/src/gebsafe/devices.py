"""Battery (ESS) and PV availability models. Power in kW, energy in kWh, time in hours."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import IndexOutOfRange


@dataclass(frozen=True)
class EssParams:
    e_min: float = 0.3
    e_max: float = 2.0
    p_ch_max: float = 1.0
    p_dch_min: float = -1.0
    eta_ch: float = 0.98
    eta_dis: float = 0.85

    def __post_init__(self):
        if not 0 <= self.e_min < self.e_max:
            raise ValueError(f"need 0 <= e_min < e_max, got {self.e_min}, {self.e_max}")
        if not self.p_dch_min < 0 < self.p_ch_max:
            raise ValueError("need p_dch_min < 0 < p_ch_max")
        for name in ("eta_ch", "eta_dis"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class EssState:
    energy: float


def energy_delta(params: EssParams, p_e: float, dt: float) -> float:
    """Stored-energy change for grid-side power ``p_e`` (charging positive)."""
    if p_e >= 0:
        return params.eta_ch * p_e * dt
    return p_e / params.eta_dis * dt


def hypothetical_energy(params: EssParams, state: EssState, p_e: float, dt: float) -> float:
    """Energy after applying ``p_e`` with no power clipping or capacity clamp."""
    return state.energy + energy_delta(params, p_e, dt)


def step_ess(params: EssParams, state: EssState, p_e: float, dt: float) -> tuple[EssState, float]:
    """Advance the battery one interval.

    Returns the new state and the power actually exchanged, which differs from
    ``p_e`` when the power limits or the capacity bounds bind.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    p = min(max(p_e, params.p_dch_min), params.p_ch_max)
    target = state.energy + energy_delta(params, p, dt)
    energy = min(max(target, params.e_min), params.e_max)
    if energy == target:
        return EssState(energy), p
    moved = energy - state.energy
    if moved == 0:
        return EssState(energy), 0.0
    if moved > 0:
        p_applied = moved / (params.eta_ch * dt)
    else:
        p_applied = moved * params.eta_dis / dt
    return EssState(energy), p_applied


@dataclass(frozen=True, eq=False)
class PvProfile:
    p_max: np.ndarray  # kW per step

    def __post_init__(self):
        arr = np.array(self.p_max, dtype=float)
        if arr.ndim != 1:
            raise ValueError("PV profile must be one-dimensional")
        if np.any(~np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("PV availability must be finite and non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "p_max", arr)

    def __len__(self) -> int:
        return len(self.p_max)


def pv_available(profile: PvProfile, t: int) -> float:
    if not 0 <= t < len(profile):
        raise IndexOutOfRange(f"step {t} outside PV profile of length {len(profile)}")
    return float(profile.p_max[t])
