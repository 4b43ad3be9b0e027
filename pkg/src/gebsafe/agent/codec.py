"""Finite action grid for the Q-network output layer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env import Action, EnvConfig


@dataclass(frozen=True, eq=False)
class ActionCodec:
    """Per-house grid over (q_ac, p_s, p_e); index ordering is house-major, p_e fastest.

    For one house, ``index = (iq * n_ps + is_) * n_pe + ie``. Houses are digits of
    a mixed-radix number with house 0 most significant.
    """

    q_grid: np.ndarray
    ps_grid: np.ndarray
    pe_grid: np.ndarray
    n_houses: int = 1

    def __post_init__(self):
        for name in ("q_grid", "ps_grid", "pe_grid"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1 or len(arr) == 0:
                raise ValueError(f"{name} must be a non-empty 1-D grid")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.n_houses < 1:
            raise ValueError("n_houses must be at least 1")

    @classmethod
    def from_config(
        cls,
        cfg: EnvConfig,
        pv_cap: float,
        q_levels: int = 11,
        ps_levels: int = 5,
        pe_levels: int = 5,
    ) -> "ActionCodec":
        return cls(
            np.linspace(0.0, cfg.q_ac_max, q_levels),
            np.linspace(0.0, pv_cap, ps_levels),
            np.linspace(cfg.ess.p_dch_min, cfg.ess.p_ch_max, pe_levels),
            cfg.n_houses,
        )

    @property
    def per_house(self) -> int:
        return len(self.q_grid) * len(self.ps_grid) * len(self.pe_grid)

    @property
    def n_actions(self) -> int:
        return self.per_house**self.n_houses

    def encode(self, levels) -> int:
        """``levels`` is a sequence of (iq, is, ie) triples, one per house."""
        levels = list(levels)
        if len(levels) != self.n_houses:
            raise ValueError(f"expected {self.n_houses} level triples")
        idx = 0
        for iq, is_, ie in levels:
            if not (0 <= iq < len(self.q_grid) and 0 <= is_ < len(self.ps_grid) and 0 <= ie < len(self.pe_grid)):
                raise IndexError(f"level triple {(iq, is_, ie)} out of range")
            house = (iq * len(self.ps_grid) + is_) * len(self.pe_grid) + ie
            idx = idx * self.per_house + house
        return idx

    def decode(self, index: int) -> list[tuple[int, int, int]]:
        if not 0 <= index < self.n_actions:
            raise IndexError(f"action index {index} out of range [0, {self.n_actions})")
        houses = []
        for _ in range(self.n_houses):
            index, house = divmod(index, self.per_house)
            rest, ie = divmod(house, len(self.pe_grid))
            iq, is_ = divmod(rest, len(self.ps_grid))
            houses.append((iq, is_, ie))
        return houses[::-1]

    def to_action(self, index: int) -> Action:
        lv = self.decode(index)
        return Action(
            np.array([self.q_grid[i] for i, _, _ in lv]),
            np.array([self.ps_grid[i] for _, i, _ in lv]),
            np.array([self.pe_grid[i] for _, _, i in lv]),
        )

    def to_dict(self) -> dict:
        return {
            "q_grid": self.q_grid.tolist(),
            "ps_grid": self.ps_grid.tolist(),
            "pe_grid": self.pe_grid.tolist(),
            "n_houses": self.n_houses,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ActionCodec":
        return cls(np.array(d["q_grid"]), np.array(d["ps_grid"]), np.array(d["pe_grid"]), int(d["n_houses"]))
