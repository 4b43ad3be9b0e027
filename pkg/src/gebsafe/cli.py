"""Command-line entry point: train, evaluate, region, simulate, fixtures, rerun.

Every command writes into one run directory and leaves a ``manifest.json``
there that records the resolved configuration, seed and a content hash of the
input profile, which is enough for ``gebsafe rerun`` to repeat it.

Exit codes: 0 success, 2 configuration or path error, 3 profile parse error,
4 training divergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .agent.dqn import TrainedPolicy, train
from .baselines import ConstantPolicy, ReplayPolicy, ThermostatPolicy
from .config import RunConfig, default_config_path, load_config, parse_config
from .env import BuildingEnv
from .errors import ConfigError, NonFiniteLoss, ProfileError
from .profiles import ProfileSeries, default_profile_path, parse_profiles
from .rollout import evaluate, run_episode, trajectory_csv
from .thermal import build_state_space

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROFILE = 3
EXIT_DIVERGED = 4

OUT_ROOT_ENV = "GEBSAFE_OUT_ROOT"
DEFAULT_OUT_ROOT = "runs"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def git_blob_hash(data: bytes) -> str:
    """Content hash as ``git hash-object`` computes it."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def out_root() -> Path:
    return Path(os.environ.get(OUT_ROOT_ENV, DEFAULT_OUT_ROOT))


def resolve_out(out: str | None, default_name: str) -> Path:
    path = Path(out) if out else out_root() / default_name
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_CONFIG, f"cannot create output directory {path}: {exc.strerror or exc}") from None
    return path


def read_config(path: str | None) -> RunConfig:
    try:
        return load_config(path or default_config_path())
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None


def read_profiles(path: str | None) -> tuple[ProfileSeries, dict]:
    p = Path(path) if path else default_profile_path()
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise CliError(EXIT_CONFIG, f"cannot read profiles {p}: {exc.strerror or exc}") from None
    try:
        series = parse_profiles(data.decode("utf-8"))
    except (ProfileError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_PROFILE, f"{p}: {exc}") from None
    return series, {"path": str(p.resolve()), "git_blob_sha1": git_blob_hash(data), "steps": len(series)}


def make_env(cfg: RunConfig, profiles: ProfileSeries) -> BuildingEnv:
    try:
        return BuildingEnv(cfg.env, profiles)
    except ProfileError as exc:
        raise CliError(EXIT_PROFILE, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None


def write_manifest(out: Path, command: str, cfg: RunConfig, profiles_meta: dict, **extra) -> None:
    doc = {
        "command": command,
        "version": __version__,
        "config": cfg.to_dict(),
        "profiles": profiles_meta,
        "out_dir": str(out.resolve()),
        **extra,
    }
    (out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_policy(path: str) -> TrainedPolicy:
    try:
        return TrainedPolicy.load(path)
    except OSError as exc:
        raise CliError(EXIT_CONFIG, f"cannot read policy {path}: {exc.strerror or exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_CONFIG, f"{path} is not a valid policy document: {exc}") from None


# --- train -------------------------------------------------------------------


def train_one(cfg: RunConfig, profiles: ProfileSeries, profiles_meta: dict, seed: int, out: Path) -> dict:
    make_env(cfg, profiles)  # validate before the long run
    try:
        policy, log = train(lambda c: BuildingEnv(c, profiles), cfg.train, cfg.env, seed)
    except NonFiniteLoss as exc:
        write_json(out / "divergence.json", {"error": str(exc), "diagnostics": exc.diagnostics, "seed": seed})
        raise CliError(EXIT_DIVERGED, f"training diverged (seed {seed}): {exc}") from None
    (out / "training_log.csv").write_text(log.to_csv())
    policy.save(out / "policy.json")
    env = BuildingEnv(cfg.env, profiles)
    report, results = evaluate(policy, env, episodes=1, seed=seed)
    (out / "trajectory.csv").write_text(trajectory_csv(results[0].rows))
    write_json(out / "report.json", report.to_dict())
    write_manifest(out, "train", cfg, profiles_meta, seed=seed)
    return {"seed": seed, "out": str(out), "greedy_cost": report.mean_cost, "episodes": len(log.episodes)}


def _train_worker(args):
    cfg_json, profiles_csv, profiles_meta, seed, out = args
    return train_one(parse_config(cfg_json), parse_profiles(profiles_csv), profiles_meta, seed, Path(out))


def cmd_train(args) -> int:
    cfg = read_config(args.config)
    if args.no_safety:
        cfg = replace(cfg, env=replace(cfg.env, safety_enabled=False))
    if args.episodes is not None:
        try:
            cfg = replace(cfg, train=replace(cfg.train, episodes=args.episodes))
        except ValueError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from None
    profiles, meta = read_profiles(args.profiles)
    seeds = parse_seeds(args.seeds) if args.seeds else [args.seed]
    if len(seeds) == 1:
        out = resolve_out(args.out, f"train-seed{seeds[0]}")
        summary = [train_one(cfg, profiles, meta, seeds[0], out)]
    else:
        base = resolve_out(args.out, "train")
        jobs = [(cfg.to_json(), profiles.to_csv(), meta, s, str(resolve_out(str(base / f"seed-{s}"), ""))) for s in seeds]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                summary = list(pool.map(_train_worker, jobs))
        else:
            summary = [_train_worker(j) for j in jobs]
    for s in summary:
        print(f"seed {s['seed']}: {s['episodes']} episodes, greedy cost {s['greedy_cost']:.4f} -> {s['out']}")
    return EXIT_OK


def parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CliError(EXIT_CONFIG, f"--seeds must be comma-separated integers, got {text!r}") from None
    if not seeds:
        raise CliError(EXIT_CONFIG, "--seeds is empty")
    return seeds


# --- evaluate ----------------------------------------------------------------


def paired_safety_comparison(policy, env: BuildingEnv, seed: int):
    """Roll ``policy`` with the safety layer, then replay its raw actions without it."""
    safe_env = env.with_config(safety_enabled=True)
    actions = []

    def recording(state, e):
        a = policy(state, e)
        actions.append(a)
        return a

    safe = run_episode(safe_env, recording, seed=seed)
    unsafe = run_episode(safe_env.with_config(safety_enabled=False), ReplayPolicy(actions), seed=seed)
    return safe, unsafe


def cmd_evaluate(args) -> int:
    policy = load_policy(args.policy)
    cfg = read_config(args.config)
    profiles, meta = read_profiles(args.profiles)
    if args.episodes < 1:
        raise CliError(EXIT_CONFIG, "--episodes must be at least 1")
    env = make_env(cfg, profiles)
    out = resolve_out(args.out, "evaluate")
    report, results = evaluate(policy, env, episodes=args.episodes, seed=args.seed)
    for i, r in enumerate(results):
        (out / f"trajectory_ep{i}.csv").write_text(trajectory_csv(r.rows))
    doc = {"report": report.to_dict()}
    if args.compare_unsafe:
        safe, unsafe = paired_safety_comparison(policy, env, args.seed)
        (out / "trajectory_safe.csv").write_text(trajectory_csv(safe.rows))
        (out / "trajectory_unsafe.csv").write_text(trajectory_csv(unsafe.rows))
        doc["compare_unsafe"] = {
            "safe_band_violations": safe.band_violations,
            "unsafe_band_violations": unsafe.band_violations,
            "violation_diff": unsafe.band_violations - safe.band_violations,
            "safe_cost": -safe.score,
            "unsafe_cost": -unsafe.score,
        }
    write_json(out / "report.json", doc)
    write_manifest(out, "evaluate", cfg, meta, seed=args.seed, policy=str(Path(args.policy).resolve()),
                   episodes=args.episodes, compare_unsafe=bool(args.compare_unsafe))
    print(f"mean cost {report.mean_cost:.4f}, band violations {report.band_violations} -> {out}")
    if args.compare_unsafe:
        c = doc["compare_unsafe"]
        print(f"band violations safe {c['safe_band_violations']} vs unsafe {c['unsafe_band_violations']}")
    return EXIT_OK


# --- region ------------------------------------------------------------------


def region_csv(env: BuildingEnv) -> str:
    lines = ["t,lo_watts,hi_watts,empty"]
    for t, r in enumerate(env.regions):
        lines.append(f"{t},{r.lo!r},{r.hi!r},{int(r.empty)}")
    return "\n".join(lines) + "\n"


def cmd_region(args) -> int:
    cfg = read_config(args.config)
    profiles, meta = read_profiles(args.profiles)
    env = make_env(cfg, profiles)
    out = resolve_out(args.out, "region")
    (out / "region.csv").write_text(region_csv(env))
    write_manifest(out, "region", cfg, meta)
    n_empty = sum(r.empty for r in env.regions)
    print(f"{len(env.regions)} steps, {n_empty} empty -> {out / 'region.csv'}")
    return EXIT_OK


# --- simulate ----------------------------------------------------------------


def parse_policy_spec(spec: str):
    if spec == "thermostat":
        return ThermostatPolicy()
    if spec.startswith("constant:"):
        try:
            q = float(spec.split(":", 1)[1])
        except ValueError:
            raise CliError(EXIT_CONFIG, f"bad constant policy {spec!r}; use constant:WATTS") from None
        if not np.isfinite(q) or q < 0:
            raise CliError(EXIT_CONFIG, "constant cooling must be finite and non-negative")
        return ConstantPolicy(q)
    return load_policy(spec)


def cmd_simulate(args) -> int:
    cfg = read_config(args.config)
    if args.no_safety:
        cfg = replace(cfg, env=replace(cfg.env, safety_enabled=False))
    profiles, meta = read_profiles(args.profiles)
    policy = parse_policy_spec(args.policy)
    env = make_env(cfg, profiles)
    out = resolve_out(args.out, "simulate")
    report, results = evaluate(policy, env, episodes=1, seed=args.seed)
    (out / "trajectory.csv").write_text(trajectory_csv(results[0].rows))
    write_json(out / "report.json", report.to_dict())
    write_manifest(out, "simulate", cfg, meta, seed=args.seed, policy=args.policy)
    print(f"cost {report.mean_cost:.4f}, band violations {report.band_violations} -> {out}")
    return EXIT_OK


# --- fixtures ----------------------------------------------------------------


def cmd_fixtures(args) -> int:
    """Write the bundled assets and model-derived reference values."""
    cfg = read_config(args.config)
    profiles, meta = read_profiles(args.profiles)
    env = make_env(cfg, profiles)
    out = resolve_out(args.out, "fixtures")
    ss = build_state_space(cfg.env.building)
    values = {
        "eigenvalues": sorted(float(v) for v in np.linalg.eigvals(ss.a).real),
        "slope_c_per_w": env.maps[0].k,
        "intercepts_c": [m.b for m in env.maps],
        "reset_state": env.passive_equilibrium(0).tolist(),
        "discrete_spectral_radius": env.disc.spectral_radius(),
    }
    write_json(out / "fixtures.json", values)
    (out / "config.json").write_text(cfg.to_json())
    (out / "profile.csv").write_text(profiles.to_csv())
    (out / "region.csv").write_text(region_csv(env))
    write_manifest(out, "fixtures", cfg, meta)
    print(f"fixtures -> {out}")
    return EXIT_OK


# --- rerun -------------------------------------------------------------------


def cmd_rerun(args) -> int:
    try:
        man = json.loads(Path(args.manifest).read_text())
        cfg_json = json.dumps(man["config"])
        command = man["command"]
        prof = man["profiles"]
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(EXIT_CONFIG, f"cannot use manifest {args.manifest}: {exc}") from None
    profiles, meta = read_profiles(prof["path"])
    if meta["git_blob_sha1"] != prof["git_blob_sha1"]:
        raise CliError(EXIT_PROFILE, f"profile {prof['path']} changed since the run (hash mismatch)")
    try:
        cfg = parse_config(cfg_json)
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    out = resolve_out(args.out, f"rerun-{command}")
    seed = int(man.get("seed", 0))
    if command == "train":
        train_one(cfg, profiles, meta, seed, out)
    elif command == "simulate":
        env = make_env(cfg, profiles)
        report, results = evaluate(parse_policy_spec(man["policy"]), env, episodes=1, seed=seed)
        (out / "trajectory.csv").write_text(trajectory_csv(results[0].rows))
        write_json(out / "report.json", report.to_dict())
        write_manifest(out, "simulate", cfg, meta, seed=seed, policy=man["policy"])
    elif command == "region":
        (out / "region.csv").write_text(region_csv(make_env(cfg, profiles)))
        write_manifest(out, "region", cfg, meta)
    else:
        raise CliError(EXIT_CONFIG, f"rerun does not support command {command!r}")
    print(f"reran {command} -> {out}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gebsafe", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON run config (default: bundled)")
        sp.add_argument("--profiles", help="profile CSV (default: bundled summer day)")
        sp.add_argument("--out", help=f"output directory (default: ${OUT_ROOT_ENV} or ./{DEFAULT_OUT_ROOT}, plus a command name)")

    sp = sub.add_parser("train", help="train a DQN agent", description="Train a DQN agent behind the safety layer.")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--seeds", help="comma-separated seeds; one run directory per seed")
    sp.add_argument("--jobs", type=int, default=1, help="parallel processes for --seeds")
    sp.add_argument("--episodes", type=int, help="override the configured episode count")
    sp.add_argument("--no-safety", action="store_true", help="disable the safety layer")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="greedy rollouts of a trained policy")
    common(sp)
    sp.add_argument("--policy", required=True, help="policy JSON written by train")
    sp.add_argument("--episodes", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--compare-unsafe", action="store_true",
                    help="replay the same raw actions without the safety layer and compare violations")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("region", help="per-step steady-state cooling region as CSV")
    common(sp)
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("simulate", help="roll a baseline or saved policy")
    common(sp)
    sp.add_argument("--policy", required=True, help="constant:WATTS, thermostat, or a policy JSON path")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-safety", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("fixtures", help="write bundled assets and model-derived reference values")
    common(sp)
    sp.set_defaults(func=cmd_fixtures)

    sp = sub.add_parser("rerun", help="repeat a run from its manifest.json")
    sp.add_argument("manifest")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_rerun)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"gebsafe: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
