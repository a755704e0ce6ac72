"""The semi-direct product G ⋉ g and its right actions on TG and on inputs.

Multiplication is (A, a)(B, b) = (AB, a + Ad_A b). Tangent vectors at a point
X are always carried in left-trivialized form, i.e. as a pair (w1, w2) in
g × g that :func:`dL` maps to the actual tangent at X.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .lie import MatrixLieGroup, adjoint, bracket


class SymmetryElement(NamedTuple):
    A: np.ndarray
    a: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "SymmetryElement":
        return cls(np.eye(n), np.zeros((n, n)))

    def to_dict(self, group: MatrixLieGroup) -> dict:
        return {"A": self.A.ravel().tolist(), "a": group.vee(self.a).tolist()}

    @classmethod
    def from_dict(cls, group: MatrixLieGroup, d: dict) -> "SymmetryElement":
        A = np.array(d["A"], dtype=float).reshape(group.n, group.n)
        return cls(group.check(A), group.hat(d["a"]))


class SymmetryVelocity(NamedTuple):
    w1: np.ndarray
    w2: np.ndarray


class State(NamedTuple):
    """ξ = (P, V) in G × g, standing for (P, P V) in TG."""

    P: np.ndarray
    V: np.ndarray


class InputVelocity(NamedTuple):
    U1: np.ndarray
    U2: np.ndarray

    @classmethod
    def measured(cls, W: np.ndarray) -> "InputVelocity":
        return cls(np.zeros_like(W), W)


# The origin point is just a reference state.
OriginPoint = State


def _check_shapes(*mats: np.ndarray) -> None:
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise ValueError(f"descriptor mismatch: {shape} vs {m.shape}")


def sdp_compose(x: SymmetryElement, y: SymmetryElement) -> SymmetryElement:
    _check_shapes(x.A, y.A)
    return SymmetryElement(x.A @ y.A, x.a + adjoint(x.A, y.a))


def sdp_inverse(x: SymmetryElement) -> SymmetryElement:
    Ainv = np.linalg.inv(x.A)
    return SymmetryElement(Ainv, -adjoint(Ainv, x.a))


def sdp_matrix(x: SymmetryElement) -> np.ndarray:
    """Faithful 2n x 2n representation [[A, aA], [0, A]]."""
    n = x.A.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = x.A
    M[n:, n:] = x.A
    M[:n, n:] = x.a @ x.A
    return M


def sdp_from_matrix(M: np.ndarray) -> SymmetryElement:
    n = M.shape[0] // 2
    A = M[:n, :n]
    return SymmetryElement(A, M[:n, n:] @ np.linalg.inv(A))


def sdp_exp(v: SymmetryVelocity) -> SymmetryElement:
    """Group exponential: the point reached at time 1 by Ẋ = dL_X v from the identity."""
    n = v.w1.shape[0]
    Z = np.zeros((2 * n, 2 * n))
    Z[:n, :n] = v.w1
    Z[n:, n:] = v.w1
    Z[:n, n:] = v.w2
    return sdp_from_matrix(expm(Z))


def dL(x: SymmetryElement, v: SymmetryVelocity) -> tuple[np.ndarray, np.ndarray]:
    """Push (w1, w2) at the identity to the tangent space at x: (A w1, Ad_A w2)."""
    return x.A @ v.w1, adjoint(x.A, v.w2)


def sdp_adjoint(x: SymmetryElement, v: SymmetryVelocity) -> SymmetryVelocity:
    w1 = adjoint(x.A, v.w1)
    return SymmetryVelocity(w1, adjoint(x.A, v.w2) - bracket(w1, x.a))


def state_action(x: SymmetryElement, xi: State) -> State:
    """φ((A, a), (P, V)) = (P A, Ad_{A^{-1}}(V - a))."""
    _check_shapes(x.A, xi.P)
    Ainv = np.linalg.inv(x.A)
    return State(xi.P @ x.A, adjoint(Ainv, xi.V - x.a))


def input_action(x: SymmetryElement, u: InputVelocity) -> InputVelocity:
    """ψ((A, a), (U1, U2)) = (Ad_{A^{-1}}(U1 + a), Ad_{A^{-1}} U2)."""
    Ainv = np.linalg.inv(x.A)
    return InputVelocity(adjoint(Ainv, u.U1 + x.a), adjoint(Ainv, u.U2))


def transitive_solve(xi: State, xi_target: State) -> SymmetryElement:
    """The element X with state_action(X, xi) == xi_target."""
    A = np.linalg.solve(xi.P, xi_target.P)
    return SymmetryElement(A, xi.V - adjoint(A, xi_target.V))
