import numpy as np
import pytest

from symtate.flows import (RabinowitzState, action, count_c1, count_c1_report,
                           convergence_order, directional_derivative, gradient,
                           gradient_norm2, heat_closed_form, heat_flow_check, heat_loop,
                           heteroclinic, integrate_rabinowitz, nearest_critical, pde_residual,
                           rabinowitz_rhs, two_mode_line, two_mode_rhs)


def _random_state(rng, window=(-4, 4)):
    n = window[1] - window[0] + 1
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return RabinowitzState(z * 0.5, float(rng.normal() * 2), window[0])


def test_critical_points():
    for ell in (-2, 0, 3):
        s = RabinowitzState.critical(ell, phase=0.7)
        assert gradient_norm2(s) < 1e-24
        assert action(s) == pytest.approx(np.pi * ell)
        near, dist = nearest_critical(s)
        assert near == ell and dist < 1e-12


def test_flow_is_gradient():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = _random_state(rng)
        f, g = rabinowitz_rhs(s), gradient(s)
        assert np.allclose(f.z, g.z) and f.eta == pytest.approx(g.eta)


def test_directional_derivative_matches_finite_differences():
    rng = np.random.default_rng(5)
    s = _random_state(rng)
    h = 1e-6
    for _ in range(20):
        dz = rng.normal(size=len(s.z)) + 1j * rng.normal(size=len(s.z))
        de = float(rng.normal())
        plus = RabinowitzState(s.z + h * dz, s.eta + h * de, s.kMin)
        minus = RabinowitzState(s.z - h * dz, s.eta - h * de, s.kMin)
        fd = (action(plus) - action(minus)) / (2 * h)
        assert fd == pytest.approx(directional_derivative(s, dz, de), rel=1e-6, abs=1e-6)


def test_integration_diagnostics():
    rng = np.random.default_rng(11)
    # a small perturbation of the critical circle at ell = 0, mode -4 left at zero
    s0 = RabinowitzState.critical(0, window=(-4, 4))
    s0.z[1:] += 0.05 * (rng.normal(size=8) + 1j * rng.normal(size=8))
    s0.eta += 0.05
    tr = integrate_rabinowitz(s0, (0.0, 0.1), samples=40)
    d = tr.diagnostics
    assert d["invariant_drift"] <= 1e-12
    assert d["action_monotone"]
    assert d["gradient_identity_error"] < 1e-6
    assert len(tr.dump().splitlines()) == 41
    with pytest.raises(ValueError):
        integrate_rabinowitz(s0, tol=0)


def test_heteroclinic_follows_the_explicit_line():
    h = heteroclinic()
    assert h.action_start == pytest.approx(0.0, abs=1e-6)
    assert h.action_end == pytest.approx(np.pi, abs=1e-6)
    assert h.closest < 1e-4
    ys = np.array([[abs(s.z[8]), abs(s.z[9]), s.eta] for s in h.trajectory.states])
    # r0 + r1 = 1 and r1 = eta along the flow line between modes 0 and 1
    assert np.max(np.abs(ys[:, 0] + ys[:, 1] - 1)) < 1e-4
    assert np.max(np.abs(ys[:, 1] - ys[:, 2])) < 1e-4
    assert h.diagnostics["invariant_drift"] <= 1e-12


def test_explicit_line_solves_two_mode_system():
    for s in np.linspace(-1, 1, 9):
        eps = 1e-6
        fd = (two_mode_line(s + eps) - two_mode_line(s - eps)) / (2 * eps)
        assert np.allclose(fd, two_mode_rhs(two_mode_line(s)), atol=1e-6)


@pytest.mark.parametrize("x0", [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9])
def test_heat_flow(x0):
    r = heat_flow_check(x0)
    assert r["passed"] and r["max_rel_error"] <= 1e-8
    assert r["limit"] == [np.sign(x0), 0.0, 0.0]


def test_heat_flow_edge_cases():
    assert heat_flow_check(0.0)["passed"]
    with pytest.raises(ValueError):
        heat_flow_check(1.0)
    assert heat_closed_form(0.4, 0.0) == pytest.approx(0.4)
    loop = heat_loop(0.6, np.linspace(0, 1, 16))
    assert np.allclose(np.sum(loop ** 2, axis=0), 1)


def test_pde_residual_and_order():
    assert pde_residual(0.3) < 1e-3
    assert convergence_order() == pytest.approx(2.0, abs=0.1)


def test_count_c1():
    assert count_c1() == 2
    assert isinstance(count_c1_report(), dict)
