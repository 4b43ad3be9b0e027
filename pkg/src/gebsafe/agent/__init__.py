from .codec import ActionCodec
from .dqn import (
    TrainConfig,
    TrainedPolicy,
    TrainingLog,
    epsilon_at,
    select_action,
    sync_target,
    td_targets,
    train,
    train_step,
)
from .network import Adam, MlpNetwork, Sgd, make_optimizer, q_forward
from .replay import Batch, ReplayBuffer, Transition
from ..rollout import EvalReport, evaluate

__all__ = [
    "ActionCodec",
    "Adam",
    "Batch",
    "EvalReport",
    "MlpNetwork",
    "ReplayBuffer",
    "Sgd",
    "TrainConfig",
    "TrainedPolicy",
    "TrainingLog",
    "Transition",
    "epsilon_at",
    "evaluate",
    "make_optimizer",
    "q_forward",
    "select_action",
    "sync_target",
    "td_targets",
    "train",
    "train_step",
]
