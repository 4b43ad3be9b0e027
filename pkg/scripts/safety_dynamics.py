"""Why a steady-state cooling region does not hold the band over hours.

Prints the thermal modes, how much of the steady-state response is reached
after a 4-hour window, and paired safe/unsafe band-violation counts.
"""

import numpy as np
from scipy.linalg import expm

from gebsafe.baselines import ConstantPolicy, RandomPolicy, ReplayPolicy
from gebsafe.env import BuildingEnv, EnvConfig
from gebsafe.profiles import default_profiles
from gebsafe.rollout import run_episode
from gebsafe.thermal import BuildingParams, build_state_space


def main():
    ss = build_state_space(BuildingParams.paper_defaults())
    lam = np.sort(np.linalg.eigvals(ss.a).real)
    print("eigenvalues (1/s):", lam)
    print("time constants (h):", np.round(-1 / lam / 3600, 2))

    dc = -np.linalg.solve(ss.a, ss.b[:, 0])[0]
    for hours in (1, 4, 24, 96):
        t = hours * 3600.0
        # step response of t_in to 1 W of cooling from rest
        resp = (np.linalg.solve(ss.a, (expm(ss.a * t) - np.eye(4)) @ ss.b[:, 0]))[0]
        print(f"after {hours:3d} h: {resp / dc:6.1%} of the steady-state cooling effect")

    prof = default_profiles()
    env = BuildingEnv(EnvConfig(), prof)
    print("initial (passive) state:", np.round(env.passive_equilibrium(0), 2))
    top = run_episode(env, lambda s, e: ConstantPolicy(e.step_region(s.step).hi)(s, e), seed=0)
    print(f"always at the top of the region: {top.band_violations}/96 band violations")
    for seed in range(3):
        raw = []
        pol = RandomPolicy(seed)

        def rec(s, e):
            a = pol(s, e)
            raw.append(a)
            return a

        safe = run_episode(env, rec, seed=seed)
        unsafe = run_episode(env.with_config(safety_enabled=False), ReplayPolicy(raw), seed=seed)
        print(f"random seed {seed}: band violations safe {safe.band_violations}, unsafe {unsafe.band_violations}")


if __name__ == "__main__":
    main()
