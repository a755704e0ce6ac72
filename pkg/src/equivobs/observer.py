"""Observer on G ⋉ g with pose measurements.

The observer integrates a copy of the lifted kinematics plus innovation
(Δ1, Δ2). The innovation needs only the measured pose y, the observer state
and the origin: since y = P° A, the group error is Ã = Â (P°^{-1} y)^{-1}.

Lyapunov quantities need the true state and are diagnostics only.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .lie import MatrixLieGroup, adjoint, bracket
from .symmetry import (
    InputVelocity,
    OriginPoint,
    State,
    SymmetryElement,
    state_action,
)


@dataclass(frozen=True)
class ObserverState:
    Ahat: np.ndarray
    ahat: np.ndarray
    origin: OriginPoint
    k1: float = 1.0
    k2: float = 1.0

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError(f"gains must be positive, got k1={self.k1}, k2={self.k2}")

    @property
    def X(self) -> SymmetryElement:
        return SymmetryElement(self.Ahat, self.ahat)

    def with_X(self, Ahat: np.ndarray, ahat: np.ndarray) -> "ObserverState":
        return replace(self, Ahat=Ahat, ahat=ahat)

    def to_dict(self, group: MatrixLieGroup) -> dict:
        return {
            "group": group.name,
            "Ahat": self.Ahat.ravel().tolist(),
            "ahat_coords": group.vee(self.ahat).tolist(),
            "origin": {"P0": self.origin.P.ravel().tolist(),
                       "V0": group.vee(self.origin.V).tolist()},
            "k1": self.k1,
            "k2": self.k2,
        }

    @classmethod
    def from_dict(cls, group: MatrixLieGroup, d: dict) -> "ObserverState":
        n = group.n
        origin = OriginPoint(group.check(np.array(d["origin"]["P0"], float).reshape(n, n)),
                             group.hat(d["origin"]["V0"]))
        return cls(group.check(np.array(d["Ahat"], float).reshape(n, n)),
                   group.hat(d["ahat_coords"]), origin, float(d["k1"]), float(d["k2"]))


class GroupError(NamedTuple):
    Atilde: np.ndarray
    atilde: np.ndarray


class Innovation(NamedTuple):
    d1: np.ndarray
    d2: np.ndarray


class DiagnosticError(NamedTuple):
    Vhat: np.ndarray
    Vtrue: np.ndarray
    Vtilde: np.ndarray


def group_error(obs: ObserverState, x_true: SymmetryElement) -> GroupError:
    """E = X̂ X^{-1}: Ã = Â A^{-1}, ã = â − Ad_Ã a."""
    Atilde = obs.Ahat @ np.linalg.inv(x_true.A)
    return GroupError(Atilde, obs.ahat - adjoint(Atilde, x_true.a))


def measured_Atilde(obs: ObserverState, y: np.ndarray) -> np.ndarray:
    """Ã reconstructed from the pose measurement and the origin."""
    # Â (P°^{-1} y)^{-1} = Â y^{-1} P°
    return obs.Ahat @ np.linalg.solve(y, obs.origin.P)


def estimated_velocity(obs: ObserverState) -> np.ndarray:
    """V̂ = Ad_{Â^{-1}}(V° − â)."""
    return adjoint(np.linalg.inv(obs.Ahat), obs.origin.V - obs.ahat)


def innovation_from_error(group: MatrixLieGroup, obs: ObserverState, Atilde: np.ndarray,
                          Ahat_inv: np.ndarray | None = None) -> Innovation:
    Ahat = obs.Ahat
    if Ahat_inv is None:
        Ahat_inv = np.linalg.inv(Ahat)
    residual = (np.eye(group.n) - Atilde) @ Atilde.T
    d1 = -obs.k1 * group.project(residual)
    Vhat = Ahat_inv @ (obs.origin.V - obs.ahat) @ Ahat
    inner = bracket(Vhat, Ahat_inv @ d1 @ Ahat) + obs.k2 * (Ahat.T @ residual @ Ahat_inv.T)
    d2 = adjoint(Ahat, group.project(inner), Ahat_inv)
    return Innovation(d1, d2)


def innovation(group: MatrixLieGroup, obs: ObserverState, y: np.ndarray,
               Ahat_inv: np.ndarray | None = None) -> Innovation:
    """(Δ1, Δ2) from the pose measurement y."""
    return innovation_from_error(group, obs, measured_Atilde(obs, y), Ahat_inv)


def observer_dynamics(obs: ObserverState, u: InputVelocity,
                      delta: Innovation) -> tuple[np.ndarray, np.ndarray]:
    """(dÂ, dâ) of the observer; dÂ is the raw matrix derivative."""
    Ahat = obs.Ahat
    Vhat = estimated_velocity(obs)
    dA = Ahat @ (Vhat + u.U1) - delta.d1 @ Ahat
    da = adjoint(Ahat, bracket(Vhat, u.U1) - u.U2) - delta.d2
    return dA, da


def observer_body_velocity(obs: ObserverState, u: InputVelocity, delta: Innovation,
                           Ahat_inv: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Observer velocity as (Â^{-1} dÂ, dâ), the form the exp integrator consumes."""
    Ahat = obs.Ahat
    if Ahat_inv is None:
        Ahat_inv = np.linalg.inv(Ahat)
    Vhat = Ahat_inv @ (obs.origin.V - obs.ahat) @ Ahat
    body = Vhat + u.U1 - Ahat_inv @ delta.d1 @ Ahat
    da = Ahat @ (bracket(Vhat, u.U1) - u.U2) @ Ahat_inv - delta.d2
    return body, da


def diagnostic_error(obs: ObserverState, x_true: SymmetryElement) -> DiagnosticError:
    Vhat = estimated_velocity(obs)
    Vtrue = adjoint(np.linalg.inv(x_true.A), obs.origin.V - x_true.a)
    return DiagnosticError(Vhat, Vtrue, Vhat - Vtrue)


def error_dynamics(err: GroupError, obs: ObserverState, x_true: SymmetryElement,
                   u: InputVelocity, delta: Innovation) -> tuple[np.ndarray, np.ndarray]:
    """(dÃ, dã) of the group error, as an identity to check against simulation."""
    Vtilde = diagnostic_error(obs, x_true).Vtilde
    drive = adjoint(obs.Ahat, Vtilde) - delta.d1
    dA = drive @ err.Atilde
    da = (adjoint(obs.Ahat, bracket(Vtilde, u.U1))
          + bracket(adjoint(err.Atilde, x_true.a), drive) - delta.d2)
    return dA, da


def lyapunov(err: GroupError, diag: DiagnosticError, k2: float) -> float:
    D = np.eye(err.Atilde.shape[0]) - err.Atilde
    return 0.5 * float(np.sum(D * D)) + float(np.sum(diag.Vtilde ** 2)) / (2.0 * k2)


def lyapunov_rate(group: MatrixLieGroup, err: GroupError, k1: float) -> float:
    """-k1 ‖pr_g((I − Ã) Ã^T)‖_F², never positive."""
    At = err.Atilde
    p = group.project((np.eye(At.shape[0]) - At) @ At.T)
    return -k1 * float(np.sum(p * p))


def estimate(obs: ObserverState) -> State:
    """ξ̂ = φ(X̂, ξ°)."""
    return state_action(obs.X, obs.origin)

