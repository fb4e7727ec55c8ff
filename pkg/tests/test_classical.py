import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from oscfun.classical import (
    analytic_trajectory,
    energy,
    evolve_f,
    evolve_h0,
    integrate_eom,
    orbit_hausdorff,
    reparametrized_time,
)
from oscfun.errors import NumericalError
from oscfun.hamiltonians import builtin, resolve

BUILTINS = [builtin("identity"), builtin("einstein_rosen"), builtin("kerr", chi=1.0), builtin("kerr", chi=0.3)]


@pytest.mark.parametrize(
    "z0, T, expected",
    [(1, math.pi, -1), (1j, 0.0, 1j), (1 + 1j, math.pi / 2, 1 - 1j)],
)
def test_evolve_h0(z0, T, expected):
    assert abs(evolve_h0(z0, T) - expected) < 1e-15


def test_reparametrized_time(ident, er):
    assert reparametrized_time(ident, 0.3 + 2j, 4.5) == 4.5
    assert reparametrized_time(er, math.sqrt(2), 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert reparametrized_time(er, 3 + 1j, 0.0) == 0.0


def test_er_period_is_lengthened(er):
    z0 = math.sqrt(2)
    assert abs(evolve_f(er, z0, 2 * math.pi / math.exp(-0.5)) - z0) < 1e-14


@settings(max_examples=100, deadline=None)
@given(
    st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
    st.floats(-50, 50),
    st.floats(-50, 50),
    st.sampled_from(range(len(BUILTINS))),
)
def test_flow_properties(z0, s, t, which):
    f = BUILTINS[which]
    z = evolve_f(f, z0, t)
    assert abs(abs(z) - abs(z0)) <= 1e-12 * (1 + abs(z0))
    # same as the harmonic flow at the reparametrized time
    assert abs(z - evolve_h0(z0, reparametrized_time(f, z0, t))) <= 1e-12 * (1 + abs(z0))
    # composition holds since |z| and hence f' are conserved
    assert abs(evolve_f(f, z0, s + t) - evolve_f(f, evolve_f(f, z0, s), t)) <= 1e-11 * (1 + abs(z0))
    if abs(z0) > 1e-3:
        w = float(f.deriv(energy(z0)))
        phase = cmath.phase(z * np.conj(z0))
        diff = (phase + t * w + math.pi) % (2 * math.pi) - math.pi
        assert abs(diff) <= 1e-12 * (1 + abs(t * w))


def test_identity_flow_is_h0_flow(ident):
    ts = np.linspace(-10, 10, 41)
    np.testing.assert_allclose(evolve_f(ident, 1.3 - 0.4j, ts), evolve_h0(1.3 - 0.4j, ts), atol=1e-15)


@pytest.mark.parametrize("f", BUILTINS, ids=lambda f: f.name)
@pytest.mark.parametrize("z0", [1.0, math.sqrt(2), 2 + 1j, 0.2 - 0.7j])
def test_orbits_coincide_as_sets(f, z0):
    if float(f.deriv(energy(z0))) == 0.0:
        pytest.skip("frozen orbit")
    assert orbit_hausdorff(f, z0) < 1e-9


def test_frozen_orbit_when_derivative_vanishes(kerr1):
    # kerr(1): f'(x) = 2x - 2 vanishes at H0 = 1, i.e. |z|^2 = 2
    z0 = 1 + 1j
    assert kerr1.deriv(energy(z0)) == 0.0
    assert evolve_f(kerr1, z0, 123.4) == z0
    with pytest.raises(ValueError):
        orbit_hausdorff(kerr1, z0)


def test_rk4_identity_full_period(ident):
    tr = integrate_eom(ident, 1.0, 2 * math.pi, 1e-3)
    assert abs(tr.z[-1] - 1.0) < 1e-9


def test_rk4_matches_closed_form_er(er):
    z0 = math.sqrt(2)
    tr = integrate_eom(er, z0, 5.0, 1e-3)
    assert abs(tr.z[-1] - evolve_f(er, z0, 5.0)) < 1e-6


def test_rk4_zero_duration(er):
    tr = integrate_eom(er, 0.5 + 0.5j, 0.0, 1e-3)
    assert tr.t.tolist() == [0.0]
    assert tr.z.tolist() == [0.5 + 0.5j]


@pytest.mark.parametrize("f", BUILTINS[:3], ids=lambda f: f.name)
def test_rk4_conserves_energy(f):
    tr = integrate_eom(f, 1.2 + 0.3j, 100.0, 1e-3)
    assert tr.radius_drift() < 1e-8


def test_rk4_against_scipy(er):
    """Second opinion from an adaptive integrator."""
    z0 = 2 + 1j

    def rhs(t, y):
        w = er.deriv(0.5 * (y[0] ** 2 + y[1] ** 2))
        return [w * y[1], -w * y[0]]

    sol = solve_ivp(rhs, (0, 10), [z0.real, z0.imag], method="DOP853", rtol=1e-12, atol=1e-12)
    tr = integrate_eom(er, z0, 10.0, 1e-3)
    assert abs(tr.z[-1] - complex(*sol.y[:, -1])) < 1e-8


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_rk4_reports_blowup():
    f = resolve("exp(x^2)")
    with pytest.raises(NumericalError):
        integrate_eom(f, 5.0, 1.0, 0.1)


def test_trajectory_rows_and_grid(er):
    tr = analytic_trajectory(er, 1 + 0j, 1.0, 0.25)
    rows = list(tr.rows())
    assert [r[0] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert rows[0] == (0.0, 1.0, 0.0)


def test_bad_step():
    with pytest.raises(ValueError):
        integrate_eom(builtin("id"), 1.0, 1.0, 0.0)
