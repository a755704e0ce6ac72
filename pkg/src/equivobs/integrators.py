"""Fixed-step integrators.

``euler`` is the plain explicit Euler update on every matrix entry. ``exp``
moves group components along one-parameter subgroups, so they stay on the
manifold; for elements of G ⋉ g it uses the full semi-direct product
exponential.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .symmetry import SymmetryElement, SymmetryVelocity, sdp_compose, sdp_exp

INTEGRATORS = ("euler", "exp")


class IntegrationError(RuntimeError):
    pass


def euler_step(values: Sequence[np.ndarray], derivatives: Sequence[np.ndarray],
               dt: float) -> tuple[np.ndarray, ...]:
    """x <- x + dt * xdot, componentwise. Group components may drift off the manifold."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return tuple(np.asarray(x) + dt * np.asarray(dx) for x, dx in zip(values, derivatives, strict=True))


def exp_step(value, velocity, dt: float):
    """Right-multiply by the exponential of ``dt * velocity`` (left-trivialized).

    ``value`` is either a group matrix with an algebra velocity, or a
    :class:`SymmetryElement` with a :class:`SymmetryVelocity`.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if isinstance(value, SymmetryElement):
        return sdp_compose(value, sdp_exp(SymmetryVelocity(dt * velocity.w1, dt * velocity.w2)))
    return value @ expm(dt * velocity)
