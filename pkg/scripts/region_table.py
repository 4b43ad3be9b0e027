"""Print the steady-state cooling region for each step of the bundled day."""

from gebsafe.env import BuildingEnv, EnvConfig
from gebsafe.profiles import default_profiles


def main():
    env = BuildingEnv(EnvConfig(), default_profiles())
    print(f"slope {env.maps[0].k:.6e} degC/W")
    print("step  hour  intercept  lo_W     hi_W     empty")
    for t, (m, r) in enumerate(zip(env.maps, env.regions)):
        print(f"{t:4d}  {t / 4:5.2f}  {m.b:8.3f}  {r.lo:7.1f}  {r.hi:7.1f}  {int(r.empty)}")


if __name__ == "__main__":
    main()
