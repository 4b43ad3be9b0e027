"""Train the default agent on several seeds and compare with the thermostat.

    python scripts/train_seeds.py --seeds 0,1,2 [--episodes N]
"""

import argparse
import time
from dataclasses import replace

from gebsafe.agent import train
from gebsafe.agent.dqn import decile_means
from gebsafe.baselines import ThermostatPolicy
from gebsafe.config import default_config
from gebsafe.env import BuildingEnv
from gebsafe.profiles import default_profiles
from gebsafe.rollout import evaluate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--episodes", type=int)
    args = ap.parse_args()

    cfg = default_config()
    if args.episodes:
        cfg = replace(cfg, train=replace(cfg.train, episodes=args.episodes))
    prof = default_profiles()
    env = BuildingEnv(cfg.env, prof)
    thermo = evaluate(ThermostatPolicy(), env)[0]
    print(f"thermostat cost {thermo.mean_cost:.3f}, band violations {thermo.band_violations}")
    for seed in (int(s) for s in args.seeds.split(",")):
        t0 = time.perf_counter()
        policy, log = train(lambda c: BuildingEnv(c, prof), cfg.train, cfg.env, seed)
        first, last = decile_means(log.scores)
        rep = evaluate(policy, env)[0]
        print(
            f"seed {seed}: first decile {first:.2f}, last decile {last:.2f}, greedy cost {rep.mean_cost:.3f}, "
            f"violations {rep.band_violations}, {time.perf_counter() - t0:.0f} s"
        )


if __name__ == "__main__":
    main()
