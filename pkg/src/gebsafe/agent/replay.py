from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Transition:
    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    done: bool


@dataclass(frozen=True, eq=False)
class Batch:
    s: np.ndarray  # (n, obs_dim)
    a: np.ndarray  # (n,) int
    r: np.ndarray  # (n,)
    s_next: np.ndarray
    done: np.ndarray  # (n,) float 0/1

    def __len__(self) -> int:
        return len(self.a)

    @classmethod
    def from_transitions(cls, items) -> "Batch":
        items = list(items)
        return cls(
            np.stack([t.s for t in items]),
            np.array([t.a for t in items], dtype=np.int64),
            np.array([t.r for t in items], dtype=float),
            np.stack([t.s_next for t in items]),
            np.array([float(t.done) for t in items]),
        )


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions backed by preallocated arrays."""

    def __init__(self, capacity: int, obs_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self._s = np.zeros((capacity, obs_dim))
        self._s2 = np.zeros((capacity, obs_dim))
        self._a = np.zeros(capacity, dtype=np.int64)
        self._r = np.zeros(capacity)
        self._d = np.zeros(capacity)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, s, a: int, r: float, s_next, done: bool) -> None:
        i = self._next
        self._s[i] = s
        self._a[i] = a
        self._r[i] = r
        self._s2[i] = s_next
        self._d[i] = float(done)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _ordered_indices(self) -> np.ndarray:
        start = (self._next - self._size) % self.capacity
        return (start + np.arange(self._size)) % self.capacity

    def contents(self) -> list[Transition]:
        """Stored transitions from oldest to newest."""
        return [
            Transition(self._s[i].copy(), int(self._a[i]), float(self._r[i]), self._s2[i].copy(), bool(self._d[i]))
            for i in self._ordered_indices()
        ]

    def sample(self, n: int, rng: np.random.Generator) -> Batch:
        if n > self._size:
            raise ValueError(f"cannot sample {n} from a buffer of {self._size}")
        idx = rng.choice(self._size, size=n, replace=False)
        return Batch(self._s[idx], self._a[idx], self._r[idx], self._s2[idx], self._d[idx])
