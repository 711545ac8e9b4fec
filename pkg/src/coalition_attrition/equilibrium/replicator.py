from __future__ import annotations

import warnings

import numpy as np

from ..errors import InvalidConfig, NegativeMass, NegativeMassWarning, NotOnSimplex


def replicator_step(state, fitness, dt: float, strict: bool = False) -> np.ndarray:
    """One Euler step of ``x_i += dt * x_i * (f_i - mean f)``, renormalized.

    A step large enough to push mass below zero is clamped and reported with
    :class:`NegativeMassWarning`, or raises :class:`NegativeMass` when
    ``strict``.
    """
    x = np.asarray(state, dtype=float)
    f = np.asarray(fitness, dtype=float)
    if x.ndim != 1 or x.shape != f.shape:
        raise NotOnSimplex("state and fitness must be 1-D vectors of equal length")
    if np.any(x < -1e-12) or abs(x.sum() - 1.0) > 1e-9:
        raise NotOnSimplex("state is not a probability vector")
    if not dt > 0:
        raise InvalidConfig(f"dt must be > 0, got {dt}")
    x = np.clip(x, 0.0, None)
    new = x + dt * x * (f - x @ f)
    if np.any(new < 0):
        if strict:
            raise NegativeMass(f"dt={dt} drives some mass below zero")
        warnings.warn(f"replicator step with dt={dt} clamped negative mass", NegativeMassWarning, stacklevel=2)
        new = np.clip(new, 0.0, None)
    return new / new.sum()


def replicator_dynamics(payoff_matrix, state, dt: float, steps: int) -> tuple[np.ndarray, int]:
    """Iterate :func:`replicator_step` with fitness ``A @ x``.

    Returns the final state and how many steps needed clamping.
    """
    A = np.asarray(payoff_matrix, dtype=float)
    x = np.asarray(state, dtype=float)
    clamped = 0
    for _ in range(steps):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NegativeMassWarning)
            x = replicator_step(x, A @ x, dt)
        clamped += sum(issubclass(w.category, NegativeMassWarning) for w in caught)
    return x, clamped
