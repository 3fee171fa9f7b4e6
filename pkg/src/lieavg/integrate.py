"""Fixed-step RK4 time integration.

No adaptivity anywhere: sweep experiments need strictly comparable step
budgets across scenarios, and determinism means bit-identical trajectories
for identical inputs.  Diverged runs return the finite part of the
trajectory plus a flag instead of raising, so parameter sweeps can record
per-run outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .averaging import BilinearOperator, OscillationProfile

__all__ = ["Trajectory", "rk4_step", "integrate_fixed", "fast_system_rhs"]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Decimated sample of an integration run.

    `times[k]` spacing is stride*dt while the run stays on the decimation
    grid; the final state is always recorded.  `diverged` marks runs whose
    state left the finite floats, with `diverged_time` the first bad time.
    """

    times: np.ndarray
    states: np.ndarray
    stride: int
    diverged: bool = False
    diverged_time: float | None = None

    @property
    def final(self):
        return self.states[-1]


def rk4_step(f, x, t, dt):
    """One classical Runge-Kutta step for dx/dt = f(x, t)."""
    k1 = f(x, t)
    k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(x + dt * k3, t + dt)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed(f, x0, t0, t1, dt, stride=1) -> Trajectory:
    """Integrate from t0 to t1 with exactly round((t1-t0)/dt) RK4 steps,
    recording every stride-th state (the first and last always)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    steps = int(round((t1 - t0) / dt))
    x = np.asarray(x0, dtype=float).copy()
    times = [t0]
    states = [x.copy()]
    for k in range(steps):
        t = t0 + k * dt
        x = rk4_step(f, x, t, dt)
        if not np.all(np.isfinite(x)):
            return Trajectory(
                np.array(times),
                np.array(states),
                stride,
                diverged=True,
                diverged_time=t + dt,
            )
        if (k + 1) % stride == 0 or k + 1 == steps:
            times.append(t0 + (k + 1) * dt)
            states.append(x.copy())
    return Trajectory(np.array(times), np.array(states), stride)


def fast_system_rhs(B: BilinearOperator, oscillation, eps: float, x, t: float):
    """Right-hand side of the fast system dx/dt = B(x, eps*y1(t) + x).

    `oscillation` is either a callable t -> vector (direct evaluation,
    preferred when the signal is known in closed form) or an
    OscillationProfile, in which case y1(t) is its trigonometric
    interpolation.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=float)
    if isinstance(oscillation, OscillationProfile):
        y1 = oscillation.interpolate(t)
    else:
        y1 = np.asarray(oscillation(t), dtype=float)
    return B(x, eps * y1 + x)
