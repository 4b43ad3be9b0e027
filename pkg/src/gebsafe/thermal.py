"""4R4C building thermal network: continuous model, exact discretization, stepping.

State ordering is (indoor, wall, attic, mass) throughout. The disturbance vector
is ordered (t_amb, q_ihl, q_sol, t_sol_w, t_sol_f, t_sol_a). All quantities are SI:
temperatures in degC, heat flows in W, capacitances in J/degC, time in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np
from scipy.linalg import expm

from .errors import InvalidParams, NonHurwitz, SingularA

N_STATES = 4
N_DISTURBANCES = 6


@dataclass(frozen=True)
class BuildingParams:
    c_in: float
    c_w: float
    c_m: float
    c_a: float
    r_w: float
    r_a: float
    r_m: float
    r_win: float
    r_f: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float

    def __post_init__(self):
        for name in ("c_in", "c_w", "c_m", "c_a", "r_w", "r_a", "r_m", "r_win", "r_f"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise InvalidParams(f"{name} must be positive and finite, got {v!r}")
        for name in ("c1", "c2", "c3", "c4", "c5"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidParams(f"{name} must be non-negative and finite, got {v!r}")

    @classmethod
    def paper_defaults(cls) -> "BuildingParams":
        """Identified residential-house parameters used in the reference simulations."""
        return cls(
            c_in=329_472.0,
            c_w=10_000_000.0,
            c_m=14_644_976.0,
            c_a=2_330_670.0,
            r_w=0.0057,
            r_a=0.2,
            r_m=0.1,
            r_win=0.0807,
            r_f=0.0965,
            c1=0.5,
            c2=0.5,
            c3=0.4,
            c4=0.8,
            c5=0.5,
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class ThermalState:
    t_in: float
    t_w: float
    t_a: float
    t_m: float

    def as_array(self) -> np.ndarray:
        return np.array([self.t_in, self.t_w, self.t_a, self.t_m], dtype=float)

    @classmethod
    def from_array(cls, x) -> "ThermalState":
        x = np.asarray(x, dtype=float)
        if x.shape != (N_STATES,):
            raise ValueError(f"expected shape (4,), got {x.shape}")
        return cls(*(float(v) for v in x))


@dataclass(frozen=True)
class Disturbance:
    t_amb: float
    q_ihl: float
    q_sol: float
    t_sol_w: float
    t_sol_f: float
    t_sol_a: float

    def __post_init__(self):
        vals = self.as_array()
        if not np.all(np.isfinite(vals)):
            raise ValueError("disturbance entries must be finite")
        if self.q_ihl < 0 or self.q_sol < 0:
            raise ValueError("heat gains q_ihl and q_sol must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.t_amb, self.q_ihl, self.q_sol, self.t_sol_w, self.t_sol_f, self.t_sol_a],
            dtype=float,
        )

    @classmethod
    def from_array(cls, d) -> "Disturbance":
        return cls(*(float(v) for v in np.asarray(d, dtype=float)))

    @classmethod
    def zero(cls) -> "Disturbance":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True, eq=False)
class ContinuousStateSpace:
    """x' = a x + b q_ac + g d, with a (4x4), b (4x1), g (4x6)."""

    a: np.ndarray
    b: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "g"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.a.shape != (N_STATES, N_STATES) or self.b.shape != (N_STATES, 1):
            raise ValueError("a must be 4x4 and b 4x1")
        if self.g.shape != (N_STATES, N_DISTURBANCES):
            raise ValueError("g must be 4x6")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.a)

    def is_hurwitz(self) -> bool:
        return bool(np.all(self.eigenvalues().real < 0))


@dataclass(frozen=True, eq=False)
class DiscreteStateSpace:
    a_d: np.ndarray
    b_d: np.ndarray
    g_d: np.ndarray
    dt: float

    def __post_init__(self):
        for name in ("a_d", "b_d", "g_d"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.a_d))))


def raw_matrices(params: BuildingParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-hand sides of the four heat-balance ODEs before division by capacitance.

    The attic row keeps the +(T_a - T_in)/R_a sign of the published heat balance.
    """
    p = params
    a = np.array(
        [
            [-2 / p.r_w - 1 / p.r_a - 1 / p.r_m - 1 / p.r_win, 2 / p.r_w, 1 / p.r_a, 1 / p.r_m],
            [2 / p.r_w, -4 / p.r_w, 0.0, 0.0],
            [-1 / p.r_a, 0.0, 1 / p.r_a - 1 / p.r_f, 0.0],
            [1 / p.r_m, 0.0, 0.0, -1 / p.r_m],
        ]
    )
    b = np.array([[-p.c1], [0.0], [0.0], [-p.c5]])
    g = np.array(
        [
            [1 / p.r_win, 1.0, p.c2, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 2 / p.r_w, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1 / p.r_f, p.c4],
            [0.0, 0.0, p.c3, 0.0, 0.0, 0.0],
        ]
    )
    return a, b, g


def capacitances(params: BuildingParams) -> np.ndarray:
    """Capacitance of each state row, in state order (indoor, wall, attic, mass)."""
    return np.array([params.c_in, params.c_w, params.c_a, params.c_m], dtype=float)


def build_state_space(params: BuildingParams) -> ContinuousStateSpace:
    """Continuous model with every row divided by its capacitance.

    Raises NonHurwitz if the resulting system matrix is not asymptotically stable.
    """
    a, b, g = raw_matrices(params)
    cap = capacitances(params)[:, None]
    ss = ContinuousStateSpace(a / cap, b / cap, g / cap)
    eig = ss.eigenvalues()
    if not np.all(eig.real < 0):
        raise NonHurwitz(f"system matrix has eigenvalues {eig}")
    return ss


def _check_invertible(a: np.ndarray) -> None:
    # Scale-aware singularity test; entries of A are ~1e-3 so an absolute det test is useless.
    if np.linalg.cond(a) > 1e14:
        raise SingularA("system matrix is numerically singular")


def discretize(ss: ContinuousStateSpace, dt: float) -> DiscreteStateSpace:
    """Zero-order-hold discretization over an interval of ``dt`` seconds."""
    if not np.isfinite(dt) or dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt!r}")
    _check_invertible(ss.a)
    a_d = expm(ss.a * dt)
    delta = a_d - np.eye(N_STATES)
    b_d = np.linalg.solve(ss.a, delta @ ss.b)
    g_d = np.linalg.solve(ss.a, delta @ ss.g)
    return DiscreteStateSpace(a_d, b_d, g_d, float(dt))


def step_array(disc: DiscreteStateSpace, x: np.ndarray, q_ac: float, d: np.ndarray) -> np.ndarray:
    """Array form of :func:`step_thermal`; used on hot paths."""
    return disc.a_d @ x + disc.b_d[:, 0] * q_ac + disc.g_d @ d


def step_thermal(
    disc: DiscreteStateSpace, x: ThermalState, q_ac: float, d: Disturbance
) -> ThermalState:
    if q_ac < 0:
        raise ValueError(f"cooling supply must be non-negative, got {q_ac!r}")
    return ThermalState.from_array(step_array(disc, x.as_array(), q_ac, d.as_array()))
