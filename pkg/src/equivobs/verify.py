"""Randomized checks of the algebraic identities behind the observer.

Each check reports the largest residual seen over the sampled cases next to
its tolerance. ``mutate_input_action`` swaps in an input action without the
``+a`` offset, which must make the equivariance check fail.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lie import MatrixLieGroup, adjoint, bracket, resolve_group
from .observer import (
    ObserverState,
    diagnostic_error,
    group_error,
    innovation,
    lyapunov,
    lyapunov_rate,
    observer_dynamics,
)
from .symmetry import (
    InputVelocity,
    State,
    SymmetryElement,
    SymmetryVelocity,
    dL,
    input_action,
    sdp_adjoint,
    sdp_compose,
    sdp_inverse,
    state_action,
    transitive_solve,
)
from .system import (
    dphi_at_identity,
    equivariance_residual,
    input_action_without_offset,
    lift_condition_residual,
    lift_equivariance_residual,
    lifted_dynamics,
    lifted_dynamics_explicit,
)

FD_STEP = 1e-6

TOLERANCES = {
    "group_axioms": 1e-10,
    "sdp_group_axioms": 1e-10,
    "adjoint_homomorphism": 1e-9,
    "jacobi": 1e-10,
    "projection_self_adjoint": 1e-10,
    "state_action_law": 1e-10,
    "input_action_law": 1e-10,
    "transitivity": 1e-10,
    "equivariance": 1e-10,
    "lift_condition": 1e-11,
    "lift_equivariance": 1e-10,
    "lifted_kinematics_consistency": 1e-11,
    "dL_finite_difference": 1e-5,
    "sdp_adjoint_finite_difference": 1e-5,
    "dphi_finite_difference": 1e-5,
    "lyapunov_rate_identity": 1e-6,
}


@dataclass
class CheckResult:
    name: str
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)


@dataclass
class VerifyReport:
    group: str
    cases: int
    seed: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = [f"group={self.group} cases={self.cases} seed={self.seed}"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            out.append(f"  {status} {c.name:<32} max={c.max_residual:.3e} tol={c.tol:.0e}")
        return out


def _norm(*mats: np.ndarray) -> float:
    return float(np.sqrt(sum(np.sum(m * m) for m in mats)))


def _sample(G: MatrixLieGroup, rng: np.random.Generator):
    def X():
        return SymmetryElement(G.random_element(rng), G.random_algebra(rng))

    xi = State(G.random_element(rng), G.random_algebra(rng))
    u = InputVelocity(G.random_algebra(rng), G.random_algebra(rng))
    return X(), X(), X(), xi, u


def _central_diff(f: Callable[[float], tuple], h: float = FD_STEP) -> tuple:
    plus, minus = f(h), f(-h)
    return tuple((p - m) / (2 * h) for p, m in zip(plus, minus))


def _curve(G: MatrixLieGroup, v: SymmetryVelocity, t: float) -> SymmetryElement:
    """A curve through the identity of G ⋉ g with velocity v at t = 0."""
    return SymmetryElement(G.exp(t * v.w1), t * v.w2)


def lyapunov_rate_fd(G: MatrixLieGroup, obs: ObserverState, x: SymmetryElement,
                     u: InputVelocity, h: float = FD_STEP) -> float:
    """Central difference of the Lyapunov function along the joint vector field."""
    delta = innovation(G, obs, obs.origin.P @ x.A)
    dAh, dah = observer_dynamics(obs, u, delta)
    dA, da = lifted_dynamics_explicit(x, obs.origin, u)

    def L(s):
        o = obs.with_X(obs.Ahat + s * dAh, obs.ahat + s * dah)
        xs = SymmetryElement(x.A + s * dA, x.a + s * da)
        return lyapunov(group_error(o, xs), diagnostic_error(o, xs), obs.k2)

    return (L(h) - L(-h)) / (2 * h)


def verify_suite(group: str | MatrixLieGroup, seed: int = 0, cases: int = 1000,
                 mutate_input_action: bool = False) -> VerifyReport:
    G = resolve_group(group) if isinstance(group, str) else group
    rng = np.random.default_rng(seed)
    act_input = input_action_without_offset if mutate_input_action else input_action
    worst = dict.fromkeys(TOLERANCES, 0.0)

    def record(name, value):
        worst[name] = max(worst[name], float(value))

    I = np.eye(G.n)
    for _ in range(cases):
        x, y, z, xi, u = _sample(G, rng)
        A, B, C = x.A, y.A, z.A
        w1, w2, w3 = u.U1, u.U2, xi.V

        record("group_axioms", max(
            np.linalg.norm((A @ B) @ C - A @ (B @ C)),
            np.linalg.norm(I @ A - A), np.linalg.norm(A @ I - A),
            np.linalg.norm(A @ np.linalg.inv(A) - I), np.linalg.norm(np.linalg.inv(A) @ A - I)))

        e = SymmetryElement.identity(G.n)
        lhs, rhs = sdp_compose(sdp_compose(x, y), z), sdp_compose(x, sdp_compose(y, z))
        ident = sdp_compose(x, sdp_inverse(x))
        left = sdp_compose(sdp_inverse(x), x)
        unit = sdp_compose(e, x)
        record("sdp_group_axioms", max(
            _norm(lhs.A - rhs.A, lhs.a - rhs.a), _norm(ident.A - I, ident.a),
            _norm(left.A - I, left.a), _norm(unit.A - x.A, unit.a - x.a)))

        record("adjoint_homomorphism", max(
            np.linalg.norm(adjoint(A, bracket(w1, w2)) - bracket(adjoint(A, w1), adjoint(A, w2))),
            np.linalg.norm(adjoint(A @ B, w1) - adjoint(A, adjoint(B, w1)))))
        record("jacobi", np.linalg.norm(
            bracket(w1, bracket(w2, w3)) + bracket(w2, bracket(w3, w1)) + bracket(w3, bracket(w1, w2))))
        M, N = rng.standard_normal((2, G.n, G.n))
        record("projection_self_adjoint", max(
            abs(np.trace(G.project(M).T @ N) - np.trace(M.T @ G.project(N))),
            np.linalg.norm(G.project(G.project(M)) - G.project(M))))

        s1 = state_action(x, state_action(y, xi))
        s2 = state_action(sdp_compose(y, x), xi)
        record("state_action_law", _norm(s1.P - s2.P, s1.V - s2.V))
        i1 = act_input(x, act_input(y, u))
        i2 = act_input(sdp_compose(y, x), u)
        record("input_action_law", _norm(i1.U1 - i2.U1, i1.U2 - i2.U2))

        target = State(G.random_element(rng), G.random_algebra(rng))
        reached = state_action(transitive_solve(xi, target), xi)
        record("transitivity", _norm(reached.P - target.P, reached.V - target.V))

        record("equivariance", equivariance_residual(x, xi, u, act_input))
        record("lift_condition", lift_condition_residual(xi, u))
        record("lift_equivariance", lift_equivariance_residual(x, xi, u))

        origin = State(G.random_element(rng), G.random_algebra(rng))
        dA_raw, da_raw = dL(x, lifted_dynamics(x, origin, u))
        dA_exp, da_exp = lifted_dynamics_explicit(x, origin, u)
        record("lifted_kinematics_consistency", _norm(dA_raw - dA_exp, da_raw - da_exp))

        v = SymmetryVelocity(w1, w2)
        fd = _central_diff(lambda t: tuple(sdp_compose(x, _curve(G, v, t))))
        record("dL_finite_difference", _norm(*(f - a for f, a in zip(fd, dL(x, v)))))
        xinv = sdp_inverse(x)
        fd = _central_diff(lambda t: tuple(sdp_compose(sdp_compose(x, _curve(G, v, t)), xinv)))
        ad = sdp_adjoint(x, v)
        record("sdp_adjoint_finite_difference", _norm(fd[0] - ad.w1, fd[1] - ad.w2))
        record("dphi_finite_difference", dphi_fd_residual(G, xi, v))

        obs = ObserverState(G.random_element(rng, 0.5) @ y.A, G.random_algebra(rng), origin,
                            k1=rng.uniform(0.5, 2.0), k2=rng.uniform(0.5, 2.0))
        rate = lyapunov_rate(G, group_error(obs, y), obs.k1)
        fd_rate = lyapunov_rate_fd(G, obs, y, u)
        record("lyapunov_rate_identity", abs(fd_rate - rate) / max(1.0, abs(rate)))

    checks = [CheckResult(name, worst[name], tol) for name, tol in TOLERANCES.items()]
    return VerifyReport(G.name, cases, seed, checks)


def dphi_fd_residual(G: MatrixLieGroup, xi: State, v: SymmetryVelocity,
                     h: float = FD_STEP) -> float:
    """Compare :func:`dphi_at_identity` against differentiating the action itself."""
    plus = state_action(_curve(G, v, h), xi)
    minus = state_action(_curve(G, v, -h), xi)
    dP_body = np.linalg.solve(xi.P, (plus.P - minus.P) / (2 * h))
    dV = (plus.V - minus.V) / (2 * h)
    an = dphi_at_identity(xi, v)
    return _norm(dP_body - an.dP_body, dV - an.dV)
