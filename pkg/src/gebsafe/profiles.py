"""Per-step disturbance, tariff, PV and setpoint series, with CSV ingestion.

CSV schema (header required, one row per control step, ``step`` counting from 0)::

    step,t_amb_c,q_ihl_w,q_sol_w,t_sol_w_c,t_sol_f_c,t_sol_a_c,price_per_kwh,pv_max_kw,t_set_c
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .devices import PvProfile
from .errors import ParseError, SchemaMismatch
from .thermal import Disturbance

COLUMNS = (
    "step",
    "t_amb_c",
    "q_ihl_w",
    "q_sol_w",
    "t_sol_w_c",
    "t_sol_f_c",
    "t_sol_a_c",
    "price_per_kwh",
    "pv_max_kw",
    "t_set_c",
)
DISTURBANCE_COLUMNS = COLUMNS[1:7]
NON_NEGATIVE = ("q_ihl_w", "q_sol_w", "price_per_kwh", "pv_max_kw")

DEFAULT_PROFILE = "default_profile.csv"


@dataclass(frozen=True, eq=False)
class ProfileSeries:
    disturbances: np.ndarray  # (n, 6), columns in Disturbance order
    price: np.ndarray  # $/kWh
    pv_max: np.ndarray  # kW
    t_set: np.ndarray  # degC

    def __post_init__(self):
        d = np.array(self.disturbances, dtype=float)
        if d.ndim != 2 or d.shape[1] != 6:
            raise ValueError("disturbances must have shape (n, 6)")
        n = d.shape[0]
        arrays = {"disturbances": d}
        for name in ("price", "pv_max", "t_set"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")
            arrays[name] = arr
        for name, arr in arrays.items():
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.disturbances.shape[0]

    def disturbance(self, t: int) -> Disturbance:
        return Disturbance.from_array(self.disturbances[t])

    @property
    def pv(self) -> PvProfile:
        return PvProfile(self.pv_max)

    def slice(self, start: int, stop: int) -> "ProfileSeries":
        return ProfileSeries(
            self.disturbances[start:stop],
            self.price[start:stop],
            self.pv_max[start:stop],
            self.t_set[start:stop],
        )

    @classmethod
    def constant(
        cls, d: Disturbance, n: int, price: float = 0.1, pv_max: float = 0.0, t_set: float = 20.0
    ) -> "ProfileSeries":
        return cls(
            np.tile(d.as_array(), (n, 1)),
            np.full(n, price),
            np.full(n, pv_max),
            np.full(n, t_set),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for t in range(len(self)):
            vals = [*self.disturbances[t], self.price[t], self.pv_max[t], self.t_set[t]]
            w.writerow([t, *(repr(float(v)) for v in vals)])
        return buf.getvalue()


def parse_profiles(text: str) -> ProfileSeries:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise SchemaMismatch("profile file is empty")
    header = tuple(c.strip() for c in rows[0])
    if header != COLUMNS:
        missing = [c for c in COLUMNS if c not in header]
        extra = [c for c in header if c not in COLUMNS]
        raise SchemaMismatch(
            f"header must be {','.join(COLUMNS)}; missing={missing} unexpected={extra}"
        )
    data = rows[1:]
    if not data:
        raise SchemaMismatch("profile file has a header but no data rows")

    values = np.empty((len(data), len(COLUMNS)))
    for i, row in enumerate(data, start=1):
        if len(row) != len(COLUMNS):
            raise ParseError(i, "*", f"expected {len(COLUMNS)} fields, got {len(row)}")
        for j, (col, cell) in enumerate(zip(COLUMNS, row)):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(i, col, f"not a number: {cell.strip()!r}") from None
            if not math.isfinite(v):
                raise ParseError(i, col, f"non-finite value {cell.strip()!r}")
            if col in NON_NEGATIVE and v < 0:
                raise ParseError(i, col, f"must be non-negative, got {v}")
            values[i - 1, j] = v
        if values[i - 1, 0] != i - 1:
            raise ParseError(i, "step", f"expected step {i - 1}, got {cell_str(values[i - 1, 0])}")

    return ProfileSeries(
        disturbances=values[:, 1:7],
        price=values[:, 7],
        pv_max=values[:, 8],
        t_set=values[:, 9],
    )


def cell_str(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(v)


def load_profiles(path) -> ProfileSeries:
    return parse_profiles(Path(path).read_text())


def default_profile_path() -> Path:
    return Path(str(resources.files("gebsafe") / "data" / DEFAULT_PROFILE))


def default_profiles() -> ProfileSeries:
    return load_profiles(default_profile_path())


def synthetic_summer_day(
    steps_per_day: int = 96,
    pv_peak_kw: float = 0.3,
    t_set: float = 20.0,
) -> ProfileSeries:
    """Deterministic hot-summer day: diurnal ambient, sol-air gains, two-tier tariff.

    Ambient runs 23-33 degC with the peak at 15:00. Solar terms follow a half-sine
    between 06:00 and 18:00. Price is 0.22 $/kWh from 14:00 to 20:00, else 0.08.
    """
    hours = np.arange(steps_per_day) * 24.0 / steps_per_day
    t_amb = 28.0 + 5.0 * np.cos((hours - 15.0) / 24.0 * 2 * np.pi)
    sun = np.clip(np.sin((hours - 6.0) / 12.0 * np.pi), 0.0, None)
    q_ihl = np.full(steps_per_day, 250.0)
    q_ihl[(hours >= 7) & (hours < 9)] = 400.0
    q_ihl[(hours >= 17) & (hours < 22)] = 600.0
    q_sol = 500.0 * sun
    t_sol_w = t_amb + 8.0 * sun
    t_sol_f = t_amb + 25.0 * sun
    t_sol_a = 10.0 * sun
    price = np.where((hours >= 14) & (hours < 20), 0.22, 0.08)
    pv = pv_peak_kw * sun
    # round so the CSV is short and exact
    dist = np.round(np.stack([t_amb, q_ihl, q_sol, t_sol_w, t_sol_f, t_sol_a], axis=1), 4)
    return ProfileSeries(dist, price, np.round(pv, 6), np.full(steps_per_day, t_set))
