"""Episode environment: HVAC + PV + battery per house, shared tariff, safety layer.

Step ``t`` covers the interval [t, t+1). Everything acting over that interval
(disturbance, price, PV availability, setpoint) comes from profile row ``t``,
and the observation at step ``t`` exposes that same row. The safety layer
targets the state reached at t+1, so its cooling region is built from the
forecast disturbance of row ``t+1`` (the last row is reused at the end of the
profile).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .devices import EssParams, EssState, hypothetical_energy, step_ess
from .errors import DimensionMismatch, EpisodeFinished, ProfileTooShort
from .profiles import ProfileSeries
from .safety import apply_safety_layer
from .steady_state import AffineIndoorMap, ComfortBand, FeasibleRegion, feasible_region, indoor_sensitivities
from .thermal import BuildingParams, build_state_space, discretize

OBS_FIELDS = ("t_in", "t_set", "price", "t_amb", "pv_max", "ess_energy")


@dataclass(frozen=True)
class RewardWeights:
    alpha1: float = 1.0  # energy cost
    alpha2: float = 0.1  # squared setpoint deviation
    alpha3: float = 1.0  # PV limit violation
    alpha4: float = 1.0  # ESS power-limit violation
    alpha5: float = 1.0  # ESS capacity violation
    alpha_hat: float = 1e-5  # per W of projected distance (0.01 per kW)

    def __post_init__(self):
        for k, v in vars(self).items():
            if not v >= 0:
                raise ValueError(f"{k} must be non-negative, got {v!r}")


@dataclass(frozen=True)
class ObsScaling:
    """Min-max ranges used to normalize each observation field."""

    temp: tuple[float, float] = (10.0, 30.0)  # indoor temperature and setpoint
    t_amb: tuple[float, float] = (15.0, 45.0)
    price: tuple[float, float] = (0.0, 0.3)
    pv_max: tuple[float, float] = (0.0, 0.3)
    ess_energy: tuple[float, float] = (0.0, 2.0)

    def ranges(self) -> list[tuple[float, float]]:
        return [self.temp, self.temp, self.price, self.t_amb, self.pv_max, self.ess_energy]


@dataclass(frozen=True)
class EnvConfig:
    building: BuildingParams = field(default_factory=BuildingParams.paper_defaults)
    ess: EssParams = field(default_factory=EssParams)
    band: ComfortBand = field(default_factory=lambda: ComfortBand(18.0, 22.0))
    q_ac_max: float = 6000.0  # W thermal
    delta_cop: float = 0.29  # kW electrical per kW of cooling
    dt: float = 900.0  # s
    horizon: int = 96
    n_houses: int = 1
    weights: RewardWeights = field(default_factory=RewardWeights)
    safety_enabled: bool = True
    ess_initial: float = 1.0  # kWh
    init_jitter: float = 0.0  # degC std of seeded noise on the initial thermal state
    scaling: ObsScaling = field(default_factory=ObsScaling)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.horizon < 1 or self.n_houses < 1:
            raise ValueError("horizon and n_houses must be at least 1")
        if not self.delta_cop > 0:
            raise ValueError("delta_cop must be positive")
        if not self.q_ac_max > 0:
            raise ValueError("q_ac_max must be positive")
        if not self.ess.e_min <= self.ess_initial <= self.ess.e_max:
            raise ValueError("ess_initial must lie within the ESS capacity bounds")
        if self.init_jitter < 0:
            raise ValueError("init_jitter must be non-negative")

    @property
    def dt_hours(self) -> float:
        return self.dt / 3600.0


@dataclass(frozen=True, eq=False)
class EnvState:
    """Per-house arrays of length n_houses plus shared price and step index.

    ``thermal`` is the full (n_houses, 4) temperature state; only its first
    column is observable.
    """

    t_in: np.ndarray
    t_set: np.ndarray
    t_amb: np.ndarray
    pv_max: np.ndarray
    ess_energy: np.ndarray
    price: float
    step: int
    thermal: np.ndarray

    @property
    def n_houses(self) -> int:
        return len(self.t_in)


@dataclass(frozen=True, eq=False)
class Action:
    q_ac: np.ndarray  # W
    p_s: np.ndarray  # kW
    p_e: np.ndarray  # kW

    def __post_init__(self):
        for name in ("q_ac", "p_s", "p_e"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"action field {name} must be finite")
            object.__setattr__(self, name, arr)
        if not len(self.q_ac) == len(self.p_s) == len(self.p_e):
            raise DimensionMismatch("action fields must have one entry per house")

    @classmethod
    def single(cls, q_ac: float, p_s: float = 0.0, p_e: float = 0.0) -> "Action":
        return cls(np.array([q_ac]), np.array([p_s]), np.array([p_e]))


@dataclass(frozen=True)
class RewardBreakdown:
    c_pr: float
    c_tem: float
    c_s: float
    c_cd: float
    c_ess: float
    r: float
    r_hat: float
    total: float

    @classmethod
    def compose(cls, weights: RewardWeights, c_pr, c_tem, c_s, c_cd, c_ess, r_hat) -> "RewardBreakdown":
        w = weights
        r = -w.alpha1 * c_pr - w.alpha2 * c_tem - w.alpha3 * c_s - w.alpha4 * c_cd - w.alpha5 * c_ess
        return cls(c_pr, c_tem, c_s, c_cd, c_ess, r, r_hat, r + r_hat)


def normalize(values: np.ndarray, scaling: ObsScaling) -> np.ndarray:
    v = np.asarray(values, dtype=float).reshape(-1, len(OBS_FIELDS))
    lo = np.array([r[0] for r in scaling.ranges()])
    hi = np.array([r[1] for r in scaling.ranges()])
    return ((v - lo) / (hi - lo)).ravel()


def denormalize(obs: np.ndarray, scaling: ObsScaling) -> np.ndarray:
    v = np.asarray(obs, dtype=float).reshape(-1, len(OBS_FIELDS))
    lo = np.array([r[0] for r in scaling.ranges()])
    hi = np.array([r[1] for r in scaling.ranges()])
    return (v * (hi - lo) + lo).ravel()


def raw_observation(state: EnvState) -> np.ndarray:
    n = state.n_houses
    cols = [state.t_in, state.t_set, np.full(n, state.price), state.t_amb, state.pv_max, state.ess_energy]
    return np.stack(cols, axis=1).ravel()


def observe(state: EnvState, scaling: ObsScaling | None = None) -> np.ndarray:
    """Flat vector (t_in, t_set, price, t_amb, pv_max, ess_energy) per house, min-max scaled."""
    return normalize(raw_observation(state), scaling or ObsScaling())


class BuildingEnv:
    """Mutable episode runner over a fixed configuration and profile series."""

    def __init__(self, config: EnvConfig, profiles: ProfileSeries):
        if len(profiles) < config.horizon:
            raise ProfileTooShort(f"profile has {len(profiles)} steps, horizon needs {config.horizon}")
        self.config = config
        self.profiles = profiles
        self.ss = build_state_space(config.building)
        self.disc = discretize(self.ss, config.dt)
        k, d_row = indoor_sensitivities(self.ss)
        self._eq_d = -np.linalg.solve(self.ss.a, self.ss.g)
        self.maps = [AffineIndoorMap(k, float(d_row @ profiles.disturbances[t])) for t in range(len(profiles))]
        self.regions = [feasible_region(m, config.band, config.q_ac_max) for m in self.maps]
        self._state: EnvState | None = None

    @property
    def state(self) -> EnvState:
        if self._state is None:
            raise RuntimeError("call reset() first")
        return self._state

    def region(self, t: int) -> FeasibleRegion:
        """Feasible region for the disturbance of profile row ``t``."""
        return self.regions[t]

    def step_region(self, step: int) -> FeasibleRegion:
        """Region the safety layer applies when acting at ``step``."""
        return self.regions[self._row(step + 1)]

    def passive_equilibrium(self, t: int = 0) -> np.ndarray:
        return self._eq_d @ self.profiles.disturbances[t]

    def _row(self, step: int) -> int:
        return min(step, len(self.profiles) - 1)

    def _make_state(self, thermal: np.ndarray, ess: np.ndarray, step: int) -> EnvState:
        row = self._row(step)
        n = self.config.n_houses
        p = self.profiles
        return EnvState(
            t_in=thermal[:, 0].copy(),
            t_set=np.full(n, p.t_set[row]),
            t_amb=np.full(n, p.disturbances[row, 0]),
            pv_max=np.full(n, p.pv_max[row]),
            ess_energy=ess.copy(),
            price=float(p.price[row]),
            step=step,
            thermal=thermal.copy(),
        )

    def reset(self, seed: int | None = None) -> EnvState:
        cfg = self.config
        x0 = np.tile(self.passive_equilibrium(0), (cfg.n_houses, 1))
        if cfg.init_jitter > 0:
            rng = np.random.default_rng(seed)
            x0 = x0 + rng.normal(0.0, cfg.init_jitter, size=x0.shape)
        ess = np.full(cfg.n_houses, cfg.ess_initial)
        self._state = self._make_state(x0, ess, 0)
        return self._state

    def observe(self, state: EnvState | None = None) -> np.ndarray:
        return observe(state if state is not None else self.state, self.config.scaling)

    def step(self, action: Action):
        cfg = self.config
        s = self.state
        t = s.step
        if t >= cfg.horizon:
            raise EpisodeFinished(f"episode ended at step {cfg.horizon}; call reset()")
        n = cfg.n_houses
        if len(action.q_ac) != n:
            raise DimensionMismatch(f"action has {len(action.q_ac)} houses, env has {n}")

        d = self.profiles.disturbances[t]
        price = float(self.profiles.price[t])
        pv_max = float(self.profiles.pv_max[t])
        t_set = float(self.profiles.t_set[t])
        region = self.step_region(t)
        dt_h = cfg.dt_hours
        ess_p = cfg.ess

        q_exec = np.empty(n)
        p_s_exec = np.empty(n)
        p_e_exec = np.empty(n)
        projected = np.zeros(n, dtype=bool)
        new_energy = np.empty(n)
        r_hat = c_s = c_cd = c_ess = 0.0
        pv_violation = np.zeros(n, dtype=bool)
        cd_violation = np.zeros(n, dtype=bool)
        ess_violation = np.zeros(n, dtype=bool)

        for j in range(n):
            q_raw = float(action.q_ac[j])
            if cfg.safety_enabled:
                out = apply_safety_layer(q_raw, region, cfg.weights.alpha_hat)
                q_exec[j] = out.q_safe
                projected[j] = out.was_projected
                r_hat += out.penalty
            else:
                q_exec[j] = min(max(q_raw, 0.0), cfg.q_ac_max)

            ps = float(action.p_s[j])
            c_s += (ps - pv_max) ** 2
            pv_violation[j] = ps < 0 or ps > pv_max
            p_s_exec[j] = min(max(ps, 0.0), pv_max)

            pe = float(action.p_e[j])
            cd = max(0.0, pe - ess_p.p_ch_max) + max(0.0, ess_p.p_dch_min - pe)
            e_now = EssState(float(s.ess_energy[j]))
            e_hyp = hypothetical_energy(ess_p, e_now, pe, dt_h)
            ce = max(0.0, e_hyp - ess_p.e_max) + max(0.0, ess_p.e_min - e_hyp)
            c_cd += cd
            c_ess += ce
            cd_violation[j] = cd > 0
            ess_violation[j] = ce > 0
            st, p_applied = step_ess(ess_p, e_now, pe, dt_h)
            new_energy[j] = st.energy
            p_e_exec[j] = p_applied

        x = s.thermal @ self.disc.a_d.T + np.outer(q_exec, self.disc.b_d[:, 0]) + self.disc.g_d @ d
        t_in = x[:, 0]
        p_h = cfg.delta_cop * q_exec / 1000.0
        c_pr = float(np.sum((p_h + p_e_exec - p_s_exec) * dt_h * price))
        c_tem = float(np.sum((t_in - t_set) ** 2))
        reward = RewardBreakdown.compose(cfg.weights, c_pr, c_tem, c_s, c_cd, c_ess, r_hat)

        self._state = self._make_state(x, new_energy, t + 1)
        done = t + 1 == cfg.horizon
        info = {
            "step": t,
            "region": region,
            "q_ac_raw": np.asarray(action.q_ac, dtype=float).copy(),
            "q_ac_exec": q_exec,
            "p_s_exec": p_s_exec,
            "p_e_exec": p_e_exec,
            "projected": projected,
            "band_violation": (t_in < cfg.band.t_low) | (t_in > cfg.band.t_high),
            "pv_violation": pv_violation,
            "cd_violation": cd_violation,
            "ess_violation": ess_violation,
        }
        return self._state, reward, done, info

    def with_config(self, **changes) -> "BuildingEnv":
        return BuildingEnv(replace(self.config, **changes), self.profiles)
