"""DQN training loop: epsilon-greedy exploration, experience replay, target network."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..env import Action, BuildingEnv, EnvConfig, EnvState, ObsScaling, OBS_FIELDS
from ..errors import NonFiniteLoss
from .codec import ActionCodec
from .network import MlpNetwork, make_optimizer, q_forward
from .replay import Batch, ReplayBuffer

LOG_COLUMNS = ("episode", "score", "avg_score", "mean_loss", "epsilon", "projections", "band_violations")


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.001
    gamma: float = 0.99
    batch: int = 64
    buffer_capacity: int = 10_000
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay: float = 0.8  # fraction of all training steps over which epsilon decays
    target_sync_k: int = 5000
    episodes: int = 200
    optimizer: str = "adam"
    hidden: tuple[int, ...] = (256, 256)
    q_levels: int = 11
    ps_levels: int = 5
    pe_levels: int = 5
    pv_cap: float = 0.3  # kW, top of the PV action grid
    reward_scale: float = 1.0  # multiplies rewards before they enter the replay buffer

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not self.lr > 0:
            raise ValueError("lr must be positive")
        if not 1 <= self.batch <= self.buffer_capacity:
            raise ValueError("need 1 <= batch <= buffer_capacity")
        if not 0 <= self.eps_end <= self.eps_start <= 1:
            raise ValueError("need 0 <= eps_end <= eps_start <= 1")
        if not 0 < self.eps_decay <= 1:
            raise ValueError("eps_decay must lie in (0, 1]")
        if self.target_sync_k < 1 or self.episodes < 1:
            raise ValueError("target_sync_k and episodes must be at least 1")
        if not self.reward_scale > 0:
            raise ValueError("reward_scale must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError("optimizer must be 'adam' or 'sgd'")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))


def epsilon_at(step: int, total_steps: int, cfg: TrainConfig) -> float:
    """Linear decay from eps_start to eps_end over the first eps_decay fraction of training."""
    span = max(1.0, cfg.eps_decay * total_steps)
    frac = min(1.0, step / span)
    return cfg.eps_start + frac * (cfg.eps_end - cfg.eps_start)


def greedy(q_values: np.ndarray) -> int:
    # np.argmax returns the first maximum, which is the documented tie-break
    return int(np.argmax(q_values))


def select_action(net: MlpNetwork, obs, eps: float, rng: np.random.Generator) -> int:
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    # always draw so the random stream does not depend on network outputs
    explore = rng.random() < eps
    random_index = int(rng.integers(net.n_outputs))
    if explore:
        return random_index
    return greedy(q_forward(net, obs))


def td_targets(batch: Batch, target_net: MlpNetwork, gamma: float) -> np.ndarray:
    next_q = target_net.forward(batch.s_next).max(axis=1)
    return batch.r + gamma * (1.0 - batch.done) * next_q


def loss_and_grads(net: MlpNetwork, batch: Batch, y: np.ndarray) -> tuple[float, np.ndarray]:
    q, cache = net.forward_cached(batch.s)
    rows = np.arange(len(batch))
    err = q[rows, batch.a] - y
    loss = float(np.mean(err**2))
    d_out = np.zeros_like(q)
    d_out[rows, batch.a] = 2.0 * err / len(batch)
    return loss, net.backward(cache, d_out)


def train_step(net: MlpNetwork, target_net: MlpNetwork, batch: Batch, gamma: float, optimizer) -> float:
    """One gradient step on the mean squared TD error; returns the pre-update loss."""
    # non-finite values are reported through NonFiniteLoss rather than warnings
    with np.errstate(invalid="ignore", over="ignore"):
        y = td_targets(batch, target_net, gamma)
        loss, grads = loss_and_grads(net, batch, y)
    if not np.isfinite(loss):
        raise NonFiniteLoss(
            "TD loss is not finite",
            {"loss": loss, "max_abs_target": float(np.max(np.abs(y))), "max_abs_reward": float(np.max(np.abs(batch.r)))},
        )
    optimizer.step(net.flat, grads)
    return loss


def sync_target(net: MlpNetwork, target_net: MlpNetwork) -> None:
    target_net.load_from(net)


class TrainedPolicy:
    """Greedy policy over a Q-network, with everything needed to rebuild actions."""

    def __init__(self, net: MlpNetwork, codec: ActionCodec, scaling: ObsScaling):
        self.net = net
        self.codec = codec
        self.scaling = scaling

    def act_index(self, obs) -> int:
        return greedy(q_forward(self.net, obs))

    def __call__(self, state: EnvState, env: BuildingEnv) -> Action:
        return self.codec.to_action(self.act_index(env.observe(state)))

    def to_dict(self) -> dict:
        return {
            "format": "gebsafe-dqn-policy",
            "version": 1,
            "layer_sizes": self.net.sizes,
            "activation": "relu",
            "weights": [w.ravel(order="C").tolist() for w in self.net.weights],
            "biases": [b.tolist() for b in self.net.biases],
            "codec": self.codec.to_dict(),
            "observation_fields": list(OBS_FIELDS),
            "normalization": {k: list(v) for k, v in asdict(self.scaling).items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedPolicy":
        if d.get("format") != "gebsafe-dqn-policy":
            raise ValueError("not a gebsafe policy document")
        sizes = d["layer_sizes"]
        ws = [np.array(w, dtype=float).reshape(i, o) for w, i, o in zip(d["weights"], sizes[:-1], sizes[1:])]
        bs = [np.array(b, dtype=float) for b in d["biases"]]
        scaling = ObsScaling(**{k: tuple(v) for k, v in d["normalization"].items()})
        return cls(MlpNetwork(ws, bs), ActionCodec.from_dict(d["codec"]), scaling)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "TrainedPolicy":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class EpisodeLog:
    episode: int
    score: float
    avg_score: float
    mean_loss: float
    epsilon: float
    projections: int
    band_violations: int


@dataclass
class TrainingLog:
    episodes: list[EpisodeLog] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    sync_steps: list[int] = field(default_factory=list)
    total_steps: int = 0

    @property
    def scores(self) -> np.ndarray:
        return np.array([e.score for e in self.episodes])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(LOG_COLUMNS)
        for e in self.episodes:
            w.writerow(
                [e.episode, repr(e.score), repr(e.avg_score), repr(e.mean_loss), repr(e.epsilon), e.projections, e.band_violations]
            )
        return buf.getvalue()


def decile_means(scores: np.ndarray) -> tuple[float, float]:
    """Mean of the first and last 10% of episodes (at least one episode each)."""
    n = max(1, len(scores) // 10)
    return float(np.mean(scores[:n])), float(np.mean(scores[-n:]))


def train(
    env_factory: Callable[[EnvConfig], BuildingEnv],
    train_cfg: TrainConfig,
    env_cfg: EnvConfig,
    seed: int,
    buffer_probe: Callable[[ReplayBuffer, int], None] | None = None,
) -> tuple[TrainedPolicy, TrainingLog]:
    """Run ``train_cfg.episodes`` episodes of safe DQN training.

    The buffer stores the raw (pre-projection) action index together with the
    total reward, which includes the safety penalty. ``buffer_probe`` is called
    after each push with the buffer and the global step, for inspection.
    """
    env = env_factory(env_cfg)
    codec = ActionCodec.from_config(
        env_cfg, train_cfg.pv_cap, train_cfg.q_levels, train_cfg.ps_levels, train_cfg.pe_levels
    )
    obs_dim = len(OBS_FIELDS) * env_cfg.n_houses
    sizes = [obs_dim, *train_cfg.hidden, codec.n_actions]

    init_rng, explore_rng, sample_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    net = MlpNetwork.initialize(sizes, init_rng)
    target = net.copy()
    opt = make_optimizer(train_cfg.optimizer, train_cfg.lr)
    buffer = ReplayBuffer(train_cfg.buffer_capacity, obs_dim)

    total_steps = train_cfg.episodes * env_cfg.horizon
    log = TrainingLog()
    step = 0
    running = 0.0
    eps = train_cfg.eps_start
    for ep in range(train_cfg.episodes):
        state = env.reset(seed + ep)
        obs = env.observe(state)
        score = 0.0
        ep_losses = []
        projections = violations = 0
        done = False
        while not done:
            eps = epsilon_at(step, total_steps, train_cfg)
            a = select_action(net, obs, eps, explore_rng)
            state, rew, done, info = env.step(codec.to_action(a))
            obs_next = env.observe(state)
            buffer.push(obs, a, rew.total * train_cfg.reward_scale, obs_next, done)
            if buffer_probe is not None:
                buffer_probe(buffer, step)
            score += rew.total
            projections += int(info["projected"].sum())
            violations += int(info["band_violation"].sum())
            if len(buffer) >= train_cfg.batch:
                batch = buffer.sample(train_cfg.batch, sample_rng)
                loss = train_step(net, target, batch, train_cfg.gamma, opt)
                ep_losses.append(loss)
                log.losses.append(loss)
            step += 1
            if step % train_cfg.target_sync_k == 0:
                sync_target(net, target)
                log.sync_steps.append(step)
            obs = obs_next
        running += score
        log.episodes.append(
            EpisodeLog(
                episode=ep,
                score=float(score),
                avg_score=float(running / (ep + 1)),
                mean_loss=float(np.mean(ep_losses)) if ep_losses else float("nan"),
                epsilon=float(eps),
                projections=projections,
                band_violations=violations,
            )
        )
    log.total_steps = step
    return TrainedPolicy(net, codec, env_cfg.scaling), log
