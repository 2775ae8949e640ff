"""Adaptive collaborative interface.

Admittance dynamics turn the force transmitted through the carried object into
a reference velocity; an adaptive index computed over a sliding window blends
that velocity with the measured human hand velocity, so the same controller
works for objects from highly deformable (index 1) to purely rigid (index 0).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .geometry import PoseSE3


@dataclass
class AdmittanceParams:
    """Virtual mass (kg) and damping (N*s/m), per translational axis."""

    mass: np.ndarray
    damping: np.ndarray

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=float).reshape(3)
        self.damping = np.asarray(self.damping, dtype=float).reshape(3)
        if np.any(self.mass <= 0) or np.any(self.damping <= 0):
            raise ValueError("mass and damping must be positive")


def default_admittance_params() -> AdmittanceParams:
    return AdmittanceParams(mass=np.full(3, 12.0), damping=np.full(3, 150.0))


@dataclass
class AdmittanceState:
    v_adm: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.v_adm = np.asarray(self.v_adm, dtype=float).reshape(3)


def admittance_step(
    F_ee: np.ndarray, state: AdmittanceState, p: AdmittanceParams, dt: float
) -> AdmittanceState:
    """Advance the virtual mass-damper one step (semi-implicit Euler).

    v' = (M + dt*D)^-1 (M*v + dt*F), unconditionally stable for positive M, D.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    F = np.asarray(F_ee, dtype=float).reshape(3)
    if not np.all(np.isfinite(F)):
        raise ValueError("non-finite force")
    v = (p.mass * state.v_adm + dt * F) / (p.mass + dt * p.damping)
    return AdmittanceState(v)


class SlidingWindow:
    """Timestamped history of admittance and hand velocities over a fixed horizon."""

    def __init__(self, length: float = 0.5, epsilon: float = 1e-6):
        if not length > 0 or not epsilon > 0:
            raise ValueError("window length and epsilon must be positive")
        self.length = length
        self.epsilon = epsilon
        self._samples: deque[tuple[float, np.ndarray, np.ndarray]] = deque()

    def push(self, t: float, v_adm: np.ndarray, v_h: np.ndarray) -> None:
        if self._samples and t <= self._samples[-1][0]:
            raise ValueError("timestamps must be strictly increasing")
        self._samples.append(
            (t, np.asarray(v_adm, dtype=float).reshape(3), np.asarray(v_h, dtype=float).reshape(3))
        )
        cutoff = t - self.length
        while self._samples and self._samples[0][0] < cutoff:
            self._samples.popleft()

    def __len__(self) -> int:
        return len(self._samples)

    def displacements(self) -> tuple[np.ndarray, np.ndarray]:
        """Trapezoid-integrated displacement of each velocity over the window."""
        if not self._samples:
            raise ValueError("empty window")
        d_adm = np.zeros(3)
        d_h = np.zeros(3)
        samples = list(self._samples)
        for (t0, a0, h0), (t1, a1, h1) in zip(samples, samples[1:]):
            half_dt = 0.5 * (t1 - t0)
            d_adm += half_dt * (a0 + a1)
            d_h += half_dt * (h0 + h1)
        return d_adm, d_h


def adaptive_index(w: SlidingWindow) -> float:
    """Blend index in [0, 1]: 1 when the object absorbs the hand motion, 0 when rigid."""
    d_adm, d_h = w.displacements()
    alpha = 1.0 - np.linalg.norm(d_adm) / (np.linalg.norm(d_h) + w.epsilon)
    return float(min(1.0, max(0.0, alpha)))


def fuse_velocity(v_adm: np.ndarray, v_h: np.ndarray, alpha: float) -> np.ndarray:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    return np.asarray(v_adm, dtype=float) + alpha * np.asarray(v_h, dtype=float)


@dataclass
class ReferenceState:
    """Desired end-effector pose plus the latest blend index, for telemetry."""

    x_d: PoseSE3
    alpha: float = 1.0


def integrate_reference(state: ReferenceState, v_d: np.ndarray, dt: float) -> ReferenceState:
    """Advance the reference position by v_d*dt; the angular reference stays zero."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    x = state.x_d.copy()
    x.position = x.position + np.asarray(v_d, dtype=float).reshape(3) * dt
    return ReferenceState(x_d=x, alpha=state.alpha)


class ForceFilter:
    """Optional first-order low-pass on measured force (disabled by default)."""

    def __init__(self, time_constant: float = 0.0):
        self.time_constant = time_constant
        self._y: np.ndarray | None = None

    def apply(self, F: np.ndarray, dt: float) -> np.ndarray:
        F = np.asarray(F, dtype=float).reshape(3)
        if self.time_constant <= 0.0:
            return F
        if self._y is None:
            self._y = F.copy()
            return F
        a = dt / (self.time_constant + dt)
        self._y = self._y + a * (F - self._y)
        return self._y
