import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equivobs.lie import SE2, SE3, SO3
from equivobs.observer import (
    DiagnosticError,
    GroupError,
    Innovation,
    ObserverState,
    diagnostic_error,
    error_dynamics,
    estimate,
    group_error,
    innovation,
    innovation_from_error,
    lyapunov,
    lyapunov_rate,
    observer_body_velocity,
    observer_dynamics,
)
from equivobs.symmetry import (
    InputVelocity,
    State,
    SymmetryElement,
    dL,
    state_action,
    transitive_solve,
)
from equivobs.system import lifted_dynamics, lifted_dynamics_explicit
from equivobs.verify import lyapunov_rate_fd

GROUPS = [SE2, SO3, SE3]
seeds = st.integers(0, 2**32 - 1)
I3, Z3 = np.eye(3), np.zeros((3, 3))


def rot(theta, x=0.0, y=0.0):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, x], [s, c, y], [0.0, 0.0, 1.0]])


def random_observer(G, r, spread=0.5):
    origin = State(G.random_element(r), G.random_algebra(r))
    return ObserverState(G.random_element(r, spread), G.random_algebra(r), origin,
                         k1=r.uniform(0.5, 2.0), k2=r.uniform(0.5, 2.0))


def random_case(G, r):
    obs = random_observer(G, r)
    x = SymmetryElement(G.random_element(r), G.random_algebra(r))
    u = InputVelocity(G.random_algebra(r), G.random_algebra(r))
    return obs, x, u


def test_gains_must_be_positive():
    origin = State(I3, Z3)
    with pytest.raises(ValueError):
        ObserverState(I3, Z3, origin, k1=0.0)
    with pytest.raises(ValueError):
        ObserverState(I3, Z3, origin, k2=-1.0)


def test_group_error_examples(rng):
    obs, x, _ = random_case(SE2, rng)
    e = group_error(obs.with_X(*x), x)
    np.testing.assert_allclose(e.Atilde, I3, atol=1e-14)
    np.testing.assert_allclose(e.atilde, Z3, atol=1e-14)
    e = group_error(obs, SymmetryElement.identity(3))
    np.testing.assert_array_equal(e.Atilde, obs.Ahat)
    np.testing.assert_array_equal(e.atilde, obs.ahat)


def test_innovation_vanishes_for_perfect_pose(rng):
    obs = random_observer(SE3, rng)
    delta = innovation_from_error(SE3, obs, np.eye(4))
    assert not delta.d1.any() and not delta.d2.any()


def test_innovation_is_linear_in_k1(rng):
    obs = random_observer(SE2, rng)
    At = SE2.random_element(rng, 0.3)
    d = innovation_from_error(SE2, obs, At).d1
    d2x = innovation_from_error(SE2, ObserverState(obs.Ahat, obs.ahat, obs.origin, 2 * obs.k1, obs.k2), At).d1
    np.testing.assert_allclose(d2x, 2 * d, atol=1e-15)


def test_innovation_for_small_rotation():
    # (I - R)R^T = R^T - I projects to the rotation generator with coordinate -sin(0.1),
    # hand derived; V° = 0 removes the bracket term from the second component.
    obs = ObserverState(rot(0.1), Z3, State(I3, Z3), k1=1.0, k2=1.0)
    delta = innovation(SE2, obs, np.eye(3))
    s = np.sin(0.1)
    np.testing.assert_allclose(SE2.vee(delta.d1), [s, 0.0, 0.0], atol=1e-16)
    np.testing.assert_allclose(SE2.vee(delta.d2), [-s, 0.0, 0.0], atol=1e-16)
    np.testing.assert_allclose(SE2.vee(delta.d1), [0.09983341664682815, 0.0, 0.0], rtol=1e-15)


def test_innovation_regression_generic_se2():
    # frozen from an independent least-squares projection of the innovation formula
    ahat, V0 = SE2.hat([0.1, -0.3, 0.5]), SE2.hat([0.2, 0.1, -0.1])
    obs = ObserverState(rot(0.3, 0.4, -0.2), ahat, State(I3, V0), k1=1.5, k2=0.7)
    delta = innovation(SE2, obs, np.eye(3))
    np.testing.assert_allclose(SE2.vee(delta.d1), [0.4432803099920091, 0.6000000000000001,
                                                   -0.30000000000000004], atol=1e-14)
    np.testing.assert_allclose(SE2.vee(delta.d2), [-0.20686414466293757, -0.4745953570626178,
                                                   0.10543353386837136], atol=1e-14)
    err = group_error(obs, SymmetryElement.identity(3))
    L = lyapunov(err, diagnostic_error(obs, SymmetryElement.identity(3)), obs.k2)
    assert L == pytest.approx(0.44006174597585845, rel=1e-14)


def test_innovation_uses_measurement_not_truth(rng):
    obs, x, _ = random_case(SE2, rng)
    y = obs.origin.P @ x.A
    via_y = innovation(SE2, obs, y)
    via_err = innovation_from_error(SE2, obs, group_error(obs, x).Atilde)
    np.testing.assert_allclose(via_y.d1, via_err.d1, atol=1e-12)
    np.testing.assert_allclose(via_y.d2, via_err.d2, atol=1e-12)


def test_internal_model_equilibrium(rng):
    V0 = SE2.random_algebra(rng)
    obs = ObserverState(I3, V0, State(SE2.random_element(rng), V0))
    zero = Innovation(Z3, Z3)
    dA, da = observer_dynamics(obs, InputVelocity(Z3, Z3), zero)
    np.testing.assert_allclose(dA, Z3, atol=1e-15)
    np.testing.assert_allclose(da, Z3, atol=1e-15)


def test_observer_dynamics_against_term_by_term_formula(rng):
    obs, _, u = random_case(SE2, rng)
    delta = Innovation(SE2.random_algebra(rng), SE2.random_algebra(rng))
    dA, da = observer_dynamics(obs, u, delta)
    Ah, Ahi = obs.Ahat, np.linalg.inv(obs.Ahat)
    Vh = Ahi @ (obs.origin.V - obs.ahat) @ Ah
    np.testing.assert_allclose(dA, Ah @ (Vh + u.U1) - delta.d1 @ Ah, atol=1e-12)
    np.testing.assert_allclose(da, Ah @ (Vh @ u.U1 - u.U1 @ Vh - u.U2) @ Ahi - delta.d2, atol=1e-12)
    body, da_b = observer_body_velocity(obs, u, delta)
    np.testing.assert_allclose(Ah @ body, dA, atol=1e-12)
    np.testing.assert_allclose(da_b, da, atol=1e-12)


def test_error_dynamics_match_finite_difference(rng):
    obs, x, u = random_case(SE2, rng)
    delta = innovation(SE2, obs, obs.origin.P @ x.A)
    dAh, dah = observer_dynamics(obs, u, delta)
    dA, da = lifted_dynamics_explicit(x, obs.origin, u)
    h = 1e-6

    def err(s):
        return group_error(obs.with_X(obs.Ahat + s * dAh, obs.ahat + s * dah),
                           SymmetryElement(x.A + s * dA, x.a + s * da))

    fd = [(p - m) / (2 * h) for p, m in zip(err(h), err(-h))]
    an = error_dynamics(group_error(obs, x), obs, x, u, delta)
    np.testing.assert_allclose(fd[0], an[0], atol=1e-6)
    np.testing.assert_allclose(fd[1], an[1], atol=1e-6)


def test_error_equilibrium(rng):
    obs, x, u = random_case(SE2, rng)
    obs = obs.with_X(*x)
    delta = innovation(SE2, obs, obs.origin.P @ x.A)
    dA, da = error_dynamics(group_error(obs, x), obs, x, u, delta)
    np.testing.assert_allclose(dA, Z3, atol=1e-13)
    np.testing.assert_allclose(da, Z3, atol=1e-13)


def test_lyapunov_examples():
    assert lyapunov(GroupError(I3, Z3), DiagnosticError(Z3, Z3, Z3), 1.0) == 0.0
    Vt = np.zeros((3, 3))
    Vt[0, 1] = 1.0
    assert lyapunov(GroupError(I3, Z3), DiagnosticError(Vt, Z3, Vt), 1.0) == 0.5
    theta = 0.7
    L = lyapunov(GroupError(rot(theta), Z3), DiagnosticError(Z3, Z3, Z3), 1.0)
    assert L == pytest.approx(2 * (1 - np.cos(theta)), rel=1e-14)


def test_lyapunov_rate_of_perfect_estimate_is_zero():
    assert lyapunov_rate(SE2, GroupError(I3, Z3), 1.0) == 0.0


def test_diagnostic_velocity_error_is_exact_difference(rng):
    obs, x, _ = random_case(SO3, rng)
    d = diagnostic_error(obs, x)
    np.testing.assert_array_equal(d.Vtilde, d.Vhat - d.Vtrue)
    np.testing.assert_allclose(d.Vtrue, state_action(x, obs.origin).V, atol=1e-13)


def test_estimate_examples(rng):
    obs = random_observer(SE2, rng)
    est = estimate(obs.with_X(I3, Z3))
    np.testing.assert_allclose(est.P, obs.origin.P, atol=1e-15)
    np.testing.assert_allclose(est.V, obs.origin.V, atol=1e-15)
    xi = State(SE2.random_element(rng), SE2.random_algebra(rng))
    est = estimate(obs.with_X(*transitive_solve(obs.origin, xi)))
    np.testing.assert_allclose(est.P, xi.P, atol=1e-12)
    np.testing.assert_allclose(est.V, xi.V, atol=1e-12)
    est = estimate(obs)
    Ahi = np.linalg.inv(obs.Ahat)
    np.testing.assert_allclose(est.P, obs.origin.P @ obs.Ahat, atol=1e-12)
    np.testing.assert_allclose(est.V, Ahi @ (obs.origin.V - obs.ahat) @ obs.Ahat, atol=1e-12)


def test_json_round_trip(rng):
    obs = random_observer(SE3, rng)
    back = ObserverState.from_dict(SE3, obs.to_dict(SE3))
    np.testing.assert_allclose(back.Ahat, obs.Ahat, atol=1e-15)
    np.testing.assert_allclose(back.ahat, obs.ahat, atol=1e-15)
    np.testing.assert_allclose(back.origin.P, obs.origin.P, atol=1e-15)
    assert (back.k1, back.k2) == (obs.k1, obs.k2)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_innovation_stays_in_algebra(seed):
    r = np.random.default_rng(seed)
    for G in GROUPS:
        obs, x, _ = random_case(G, r)
        delta = innovation(G, obs, obs.origin.P @ x.A)
        assert G.algebra_residual(delta.d1) <= 1e-10
        assert G.algebra_residual(delta.d2) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_internal_model_property(seed):
    r = np.random.default_rng(seed)
    for G in GROUPS:
        obs, _, u = random_case(G, r)
        dA, da = observer_dynamics(obs, u, Innovation(np.zeros_like(obs.Ahat), np.zeros_like(obs.Ahat)))
        eA, ea = dL(obs.X, lifted_dynamics(obs.X, obs.origin, u))
        np.testing.assert_allclose(dA, eA, atol=1e-12)
        np.testing.assert_allclose(da, ea, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_lyapunov_rate_identity_and_sign(seed):
    r = np.random.default_rng(seed)
    for G in GROUPS:
        obs, x, u = random_case(G, r)
        obs = obs.with_X(G.random_element(r, 0.5) @ x.A, obs.ahat)
        rate = lyapunov_rate(G, group_error(obs, x), obs.k1)
        assert rate <= 0.0
        assert abs(lyapunov_rate_fd(G, obs, x, u) - rate) <= 1e-6 * max(1.0, abs(rate))
