"""Recompute the frozen regression values used by the test-suite from independent oracles.

Run from the repository root: ``python scripts/derive_fixtures.py``.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import char_poly_roots, grid_scan_region, iterate_to_equilibrium, mp_forward, rk4_integrate  # noqa: E402

from gebsafe.profiles import default_profiles  # noqa: E402
from gebsafe.thermal import BuildingParams, build_state_space, discretize  # noqa: E402

NOON, PEAK = 48, 60


def main():
    np.set_printoptions(precision=17)
    params = BuildingParams.paper_defaults()
    ss = build_state_space(params)
    prof = default_profiles()
    d_noon = prof.disturbances[NOON]
    d_peak = prof.disturbances[PEAK]

    print("eigenvalues (char. poly roots, 50 digits):")
    for z in char_poly_roots(ss.a):
        print(f"  {z.real!r}  imag={z.imag!r}")

    disc = discretize(ss, 900.0)
    x_lu = -np.linalg.solve(ss.a, ss.g @ d_noon)
    x_it = iterate_to_equilibrium(disc.a_d, disc.b_d, disc.g_d, np.full(4, 20.0), 0.0, d_noon)
    print("noon passive equilibrium LU   :", repr(x_lu.tolist()))
    print("noon passive equilibrium iter :", repr(x_it.tolist()), "max diff", np.max(np.abs(x_lu - x_it)))

    x_end = rk4_integrate(ss.a, ss.b, ss.g, x_lu, 3000.0, d_noon, 96 * 900.0, h=1.0)
    print("96 steps at 3000 W from noon equilibrium (RK4, 1 s):", repr(x_end.tolist()))

    t0 = -np.linalg.solve(ss.a, ss.g @ d_noon)[0]
    t1 = -np.linalg.solve(ss.a, ss.b[:, 0] * 1000.0 + ss.g @ d_noon)[0]
    k_fd = (t1 - t0) / 1000.0
    print("slope by finite difference of equilibria:", repr(k_fd))

    b_peak = -np.linalg.solve(ss.a, ss.g @ d_peak)[0]
    qs, inside = grid_scan_region(k_fd, b_peak, 18.0, 22.0, 6000.0, step=1.0)
    print("peak intercept:", repr(b_peak), "grid-scan region:", qs[inside].min(), qs[inside].max())

    x0 = -np.linalg.solve(ss.a, ss.g @ prof.disturbances[0])
    print("reset state (passive equilibrium at step 0):", repr(x0.tolist()))

    rng = np.random.default_rng(7)
    sizes = [6, 8, 8, 5]
    ws, bs = [], []
    for i, o in zip(sizes[:-1], sizes[1:]):
        bound = 1 / np.sqrt(i)
        ws.append(rng.uniform(-bound, bound, (i, o)))
        bs.append(rng.uniform(-bound, bound, o))
    obs = np.linspace(0.1, 0.9, 6)
    print("seeded 6-8-8-5 forward (rng 7):", repr(mp_forward(ws, bs, obs)))


if __name__ == "__main__":
    main()
