"""Levenberg-Marquardt driver behavior."""
import numpy as np
import pytest

from casimir_membrane._leastsq import levenberg_marquardt
from casimir_membrane.errors import ConvergenceError, DomainError


def test_linear_problem_solved_in_one_shot():
    a = np.array([[2.0, 0.0], [0.0, 3.0], [1.0, 1.0]])
    target = np.array([2.0, -3.0, 0.0])

    resid = lambda p: a @ p - target
    jac = lambda p: a
    p, info = levenberg_marquardt(resid, jac, np.zeros(2))
    expected, *_ = np.linalg.lstsq(a, target, rcond=None)
    np.testing.assert_allclose(p, expected, rtol=1e-10)
    assert info["cost"] == pytest.approx(
        0.5 * float(np.sum((a @ expected - target) ** 2)), abs=1e-12
    )


def test_nonlinear_exponential_recovery():
    t = np.linspace(0.0, 3.0, 30)
    true = np.array([2.5, 1.3])
    y = true[0] * np.exp(-true[1] * t)

    resid = lambda p: p[0] * np.exp(-p[1] * t) - y
    jac = lambda p: np.column_stack(
        [np.exp(-p[1] * t), -p[0] * t * np.exp(-p[1] * t)]
    )
    p, info = levenberg_marquardt(resid, jac, np.array([1.0, 0.5]))
    np.testing.assert_allclose(p, true, rtol=1e-8)
    assert info["n_iter"] >= 1


def test_trace_records_monotone_cost():
    t = np.linspace(0.0, 3.0, 30)
    y = 2.5 * np.exp(-1.3 * t)
    resid = lambda p: p[0] * np.exp(-p[1] * t) - y
    jac = lambda p: np.column_stack(
        [np.exp(-p[1] * t), -p[0] * t * np.exp(-p[1] * t)]
    )
    _, info = levenberg_marquardt(resid, jac, np.array([1.0, 0.5]))
    trace = info["trace"]
    assert trace[0][0] == 0
    costs = [entry[2] for entry in trace]
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    assert all(isinstance(entry[1], np.ndarray) for entry in trace)


def test_convergence_error_carries_trace():
    # iteration cap of 1 cannot solve a genuinely nonlinear problem
    t = np.linspace(0.0, 3.0, 30)
    y = 2.5 * np.exp(-1.3 * t)
    resid = lambda p: p[0] * np.exp(-p[1] * t) - y
    jac = lambda p: np.column_stack(
        [np.exp(-p[1] * t), -p[0] * t * np.exp(-p[1] * t)]
    )
    with pytest.raises(ConvergenceError) as err:
        levenberg_marquardt(resid, jac, np.array([30.0, 9.0]), max_iter=1)
    assert len(err.value.trace) >= 1


def test_domain_veto_rejects_step_instead_of_crashing():
    # residual refuses p[0] <= 0; the optimum is at p = 2 so the fit must
    # approach from the feasible side
    def resid(p):
        if p[0] <= 0:
            raise DomainError("out of region")
        return np.array([np.log(p[0] / 2.0), p[0] - 2.0])

    def jac(p):
        return np.array([[1.0 / p[0]], [1.0]])

    p, _ = levenberg_marquardt(resid, jac, np.array([0.5]))
    assert p[0] == pytest.approx(2.0, rel=1e-6)


def test_x_scale_validation():
    resid = lambda p: p
    jac = lambda p: np.eye(2)
    with pytest.raises(DomainError):
        levenberg_marquardt(resid, jac, np.zeros(2), x_scale=np.array([1.0, -1.0]))
    with pytest.raises(DomainError):
        levenberg_marquardt(resid, jac, np.zeros(2), x_scale=np.ones(3))


def test_nonfinite_start_rejected():
    resid = lambda p: np.array([np.inf])
    jac = lambda p: np.ones((1, 1))
    with pytest.raises(DomainError):
        levenberg_marquardt(resid, jac, np.ones(1))
