"""Episode rollouts, evaluation summaries and trajectory CSV output."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .env import Action, BuildingEnv, EnvState

Policy = Callable[[EnvState, BuildingEnv], Action]

TRAJECTORY_COLUMNS = (
    "step",
    "t_in",
    "t_w",
    "t_a",
    "t_m",
    "q_ac_raw",
    "q_ac_exec",
    "p_s",
    "p_e",
    "ess_kwh",
    "psi_lo",
    "psi_hi",
    "c_pr",
    "c_tem",
    "c_s",
    "c_cd",
    "c_ess",
    "r_hat",
    "total_reward",
)


@dataclass
class EpisodeResult:
    rows: list[dict] = field(default_factory=list)
    score: float = 0.0
    energy_cost: float = 0.0
    comfort_cost: float = 0.0
    abs_dev_sum: float = 0.0
    band_violations: int = 0
    projections: int = 0
    region_violations: int = 0
    ess_min: float = np.inf
    ess_max: float = -np.inf

    @property
    def steps(self) -> int:
        return len(self.rows)


def run_episode(env: BuildingEnv, policy: Policy, seed: int | None = None, house: int = 0) -> EpisodeResult:
    """Roll one episode; trajectory rows describe ``house`` after each step.

    ``step`` in a row is the interval start, temperatures are at its end.
    """
    state = env.reset(seed)
    res = EpisodeResult()
    done = False
    while not done:
        action = policy(state, env)
        state, rew, done, info = env.step(action)
        region = info["region"]
        q_exec = info["q_ac_exec"]
        res.score += rew.total
        res.energy_cost += rew.c_pr
        res.comfort_cost += rew.c_tem
        res.abs_dev_sum += float(np.sum(np.abs(state.t_in - env.profiles.t_set[info["step"]])))
        res.band_violations += int(np.sum(info["band_violation"]))
        res.projections += int(np.sum(info["projected"]))
        if env.config.safety_enabled:
            res.region_violations += int(np.sum((q_exec < region.lo) | (q_exec > region.hi)))
        res.ess_min = min(res.ess_min, float(state.ess_energy.min()))
        res.ess_max = max(res.ess_max, float(state.ess_energy.max()))
        x = state.thermal[house]
        res.rows.append(
            {
                "step": info["step"],
                "t_in": x[0],
                "t_w": x[1],
                "t_a": x[2],
                "t_m": x[3],
                "q_ac_raw": info["q_ac_raw"][house],
                "q_ac_exec": q_exec[house],
                "p_s": info["p_s_exec"][house],
                "p_e": info["p_e_exec"][house],
                "ess_kwh": state.ess_energy[house],
                "psi_lo": region.lo,
                "psi_hi": region.hi,
                "c_pr": rew.c_pr,
                "c_tem": rew.c_tem,
                "c_s": rew.c_s,
                "c_cd": rew.c_cd,
                "c_ess": rew.c_ess,
                "r_hat": rew.r_hat,
                "total_reward": rew.total,
            }
        )
    return res


def trajectory_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJECTORY_COLUMNS)
    for row in rows:
        w.writerow([row["step"], *(repr(float(row[c])) for c in TRAJECTORY_COLUMNS[1:])])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != TRAJECTORY_COLUMNS:
        raise ValueError("trajectory header does not match the documented schema")
    out = []
    for r in reader:
        row = {k: float(v) for k, v in r.items()}
        row["step"] = int(row["step"])
        out.append(row)
    return out


@dataclass
class EvalReport:
    episodes: int
    mean_score: float
    mean_cost: float  # negated mean score
    energy_cost: float
    comfort_cost: float
    mean_abs_dev: float
    band_violations: int
    projections: int
    region_violations: int
    ess_min: float
    ess_max: float
    scores: list[float]

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(policy: Policy, env: BuildingEnv, episodes: int = 1, seed: int = 0) -> tuple[EvalReport, list[EpisodeResult]]:
    results = [run_episode(env, policy, seed=seed + i) for i in range(episodes)]
    steps = sum(r.steps for r in results) * env.config.n_houses
    scores = [r.score for r in results]
    report = EvalReport(
        episodes=episodes,
        mean_score=float(np.mean(scores)),
        mean_cost=-float(np.mean(scores)),
        energy_cost=float(sum(r.energy_cost for r in results)),
        comfort_cost=float(sum(r.comfort_cost for r in results)),
        mean_abs_dev=float(sum(r.abs_dev_sum for r in results) / steps),
        band_violations=sum(r.band_violations for r in results),
        projections=sum(r.projections for r in results),
        region_violations=sum(r.region_violations for r in results),
        ess_min=min(r.ess_min for r in results),
        ess_max=max(r.ess_max for r in results),
        scores=scores,
    )
    return report, results
