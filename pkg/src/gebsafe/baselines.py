"""Rule-based and open-loop policies used as baselines and in tests."""

from __future__ import annotations

import numpy as np

from .env import Action, BuildingEnv, EnvState


class ConstantPolicy:
    """Fixed cooling supply; PV injected up to availability; battery idle."""

    def __init__(self, q_ac: float, use_pv: bool = True):
        self.q_ac = float(q_ac)
        self.use_pv = use_pv

    def __call__(self, state: EnvState, env: BuildingEnv) -> Action:
        n = state.n_houses
        p_s = state.pv_max.copy() if self.use_pv else np.zeros(n)
        return Action(np.full(n, self.q_ac), p_s, np.zeros(n))


class ThermostatPolicy:
    """Bang-bang cooling: full capacity above ``t_high + hysteresis``, off below ``t_low - hysteresis``.

    Between the switching points the previous mode is kept. Starts in the off mode.
    """

    def __init__(self, hysteresis: float = 0.0):
        self.hysteresis = hysteresis
        self._on: np.ndarray | None = None

    def __call__(self, state: EnvState, env: BuildingEnv) -> Action:
        band = env.config.band
        if self._on is None or state.step == 0:
            self._on = np.zeros(state.n_houses, dtype=bool)
        self._on = np.where(state.t_in > band.t_high + self.hysteresis, True, self._on)
        self._on = np.where(state.t_in < band.t_low - self.hysteresis, False, self._on)
        q = np.where(self._on, env.config.q_ac_max, 0.0)
        return Action(q, state.pv_max.copy(), np.zeros(state.n_houses))


class RandomPolicy:
    """Uniform raw actions over the capacity box, reproducible from ``seed``."""

    def __init__(self, seed: int, pv_cap: float = 0.3):
        self.rng = np.random.default_rng(seed)
        self.pv_cap = pv_cap

    def __call__(self, state: EnvState, env: BuildingEnv) -> Action:
        n = state.n_houses
        ess = env.config.ess
        return Action(
            self.rng.uniform(0.0, env.config.q_ac_max, n),
            self.rng.uniform(0.0, self.pv_cap, n),
            self.rng.uniform(ess.p_dch_min, ess.p_ch_max, n),
        )


class ReplayPolicy:
    """Plays back a precomputed action list; used for paired safe/unsafe rollouts."""

    def __init__(self, actions: list[Action]):
        self.actions = actions

    def __call__(self, state: EnvState, env: BuildingEnv) -> Action:
        return self.actions[state.step]
