"""Safety layer: clamp the HVAC cooling command into the steady-state region."""

from __future__ import annotations

from dataclasses import dataclass

from .steady_state import FeasibleRegion


@dataclass(frozen=True)
class SafetyOutcome:
    q_safe: float
    was_projected: bool
    penalty: float = 0.0


def project(q_raw: float, region: FeasibleRegion) -> SafetyOutcome:
    """Euclidean projection onto the interval, i.e. a clamp.

    The penalty is left at zero; fill it with :func:`safety_penalty` or use
    :func:`apply_safety_layer`.
    """
    q_safe = min(max(q_raw, region.lo), region.hi)
    return SafetyOutcome(q_safe=float(q_safe), was_projected=not region.contains(q_raw))


def safety_penalty(q_raw: float, q_safe: float, alpha_hat: float) -> float:
    if alpha_hat < 0:
        raise ValueError("alpha_hat must be non-negative")
    return -alpha_hat * abs(q_safe - q_raw)


def apply_safety_layer(q_raw: float, region: FeasibleRegion, alpha_hat: float) -> SafetyOutcome:
    out = project(q_raw, region)
    pen = safety_penalty(q_raw, out.q_safe, alpha_hat) if out.was_projected else 0.0
    return SafetyOutcome(out.q_safe, out.was_projected, pen)
