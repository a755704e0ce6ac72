"""Second order kinematics on TG ≅ G × g and their lift onto g ⋉ g.

Kinematics: Ṗ = P (V + U1), V̇ = U2, with full pose output y = P.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .lie import adjoint, bracket
from .symmetry import (
    InputVelocity,
    OriginPoint,
    State,
    SymmetryElement,
    SymmetryVelocity,
    input_action,
    sdp_adjoint,
    sdp_inverse,
    state_action,
)


class StateTangent(NamedTuple):
    """A tangent vector to TG at a state; the pose part is left-trivialized."""

    dP_body: np.ndarray
    dV: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.dP_body ** 2) + np.sum(self.dV ** 2)))


def dynamics(xi: State, u: InputVelocity) -> StateTangent:
    return StateTangent(xi.V + u.U1, u.U2)


def output(xi: State) -> np.ndarray:
    return xi.P


def lift(xi: State, u: InputVelocity) -> SymmetryVelocity:
    """Λ(ξ, U) = (V + U1, [V, U1] - U2)."""
    return SymmetryVelocity(xi.V + u.U1, bracket(xi.V, u.U1) - u.U2)


def dphi_at_identity(xi: State, v: SymmetryVelocity) -> StateTangent:
    """Differential of X ↦ φ(X, ξ) at the identity, applied to v."""
    return StateTangent(v.w1, -bracket(v.w1, xi.V) - v.w2)


def push_tangent(x: SymmetryElement, tangent: StateTangent) -> StateTangent:
    """dφ_X of a tangent at ξ, expressed at φ_X(ξ) in left-trivialized form.

    (PΓ, S) at (P, V) maps to (PΓA, Ad_{A^{-1}} S); at the new pose PA the body
    velocity is Ad_{A^{-1}} Γ.
    """
    Ainv = np.linalg.inv(x.A)
    return StateTangent(adjoint(Ainv, tangent.dP_body), adjoint(Ainv, tangent.dV))


def lifted_dynamics(x: SymmetryElement, origin: OriginPoint, u: InputVelocity) -> SymmetryVelocity:
    """Left-trivialized velocity of the lifted system at x: Λ(φ(x, ξ°), U)."""
    return lift(state_action(x, origin), u)


def lifted_dynamics_explicit(x: SymmetryElement, origin: OriginPoint,
                             u: InputVelocity) -> tuple[np.ndarray, np.ndarray]:
    """(Ȧ, ȧ) written out directly in the lifted coordinates."""
    A, a = x
    Ainv = np.linalg.inv(A)
    V = adjoint(Ainv, origin.V - a)
    Adot = A @ (V + u.U1)
    adot = adjoint(A, bracket(V, u.U1) - u.U2)
    return Adot, adot


def input_action_without_offset(x: SymmetryElement, u: InputVelocity) -> InputVelocity:
    Ainv = np.linalg.inv(x.A)
    return InputVelocity(adjoint(Ainv, u.U1), adjoint(Ainv, u.U2))


InputAction = Callable[[SymmetryElement, InputVelocity], InputVelocity]


def equivariance_residual(x: SymmetryElement, xi: State, u: InputVelocity,
                          act_input: InputAction = input_action) -> float:
    """‖dφ_X[f(ξ, U)] − f(φ_X(ξ), ψ_X(U))‖_F.

    ``act_input`` can be swapped out to show which input actions break equivariance.
    """
    lhs = push_tangent(x, dynamics(xi, u))
    rhs = dynamics(state_action(x, xi), act_input(x, u))
    return StateTangent(lhs.dP_body - rhs.dP_body, lhs.dV - rhs.dV).norm()


def lift_condition_residual(xi: State, u: InputVelocity) -> float:
    lhs = dphi_at_identity(xi, lift(xi, u))
    rhs = dynamics(xi, u)
    return StateTangent(lhs.dP_body - rhs.dP_body, lhs.dV - rhs.dV).norm()


def lift_equivariance_residual(x: SymmetryElement, xi: State, u: InputVelocity) -> float:
    """‖Ad_X Λ(ξ, U) − Λ(φ_{X^{-1}}(ξ), ψ_{X^{-1}}(U))‖_F."""
    xinv = sdp_inverse(x)
    lhs = sdp_adjoint(x, lift(xi, u))
    rhs = lift(state_action(xinv, xi), input_action(xinv, u))
    return float(np.sqrt(np.sum((lhs.w1 - rhs.w1) ** 2) + np.sum((lhs.w2 - rhs.w2) ** 2)))
