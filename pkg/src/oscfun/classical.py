"""Classical flow of H = f(H0) on the phase plane z = x + i p.

H0 = |z|^2 / 2 is conserved, so the flow of f(H0) is the harmonic rotation
run at the energy-dependent angular speed f'(H0). ``integrate_eom`` solves
Hamilton's equations numerically and is kept independent of the closed form
so that each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .grids import time_grid
from .hamiltonians import HamiltonianFunction


def energy(z: complex) -> float:
    """Oscillator energy |z|^2 / 2 of a phase point."""
    z = complex(z)
    return 0.5 * (z.real * z.real + z.imag * z.imag)


def evolve_h0(z0: complex, T: float) -> complex:
    return complex(z0) * np.exp(-1j * T)


def reparametrized_time(f: HamiltonianFunction, z0: complex, t: float) -> float:
    """Harmonic time T(t) = f'(H0) t reached by the f(H0) flow after time t."""
    return float(f.deriv(energy(z0))) * t


def evolve_f(f: HamiltonianFunction, z0: complex, t):
    """Closed-form solution z0 exp(-i t f'(|z0|^2/2)); ``t`` may be an array."""
    omega = float(f.deriv(energy(z0)))
    return complex(z0) * np.exp(-1j * omega * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class ClassicalTrajectory:
    t: np.ndarray
    z: np.ndarray
    f_name: str
    z0: complex

    @property
    def x(self):
        return self.z.real

    @property
    def p(self):
        return self.z.imag

    def radius_drift(self) -> float:
        """Largest deviation of |z| from |z0| along the samples."""
        return float(np.max(np.abs(np.abs(self.z) - abs(self.z0))))

    def rows(self):
        for t, z in zip(self.t, self.z):
            yield float(t), float(z.real), float(z.imag)


def analytic_trajectory(f: HamiltonianFunction, z0: complex, t_max: float, dt: float) -> ClassicalTrajectory:
    ts = time_grid(t_max, dt)
    return ClassicalTrajectory(ts, evolve_f(f, z0, ts), f.name, complex(z0))


def _rhs(f, x, p):
    w = f.deriv(0.5 * (x * x + p * p))
    return w * p, -w * x


def integrate_eom(f: HamiltonianFunction, z0: complex, t_max: float, dt: float) -> ClassicalTrajectory:
    """Classical RK4 on dx/dt = f'(H0) p, dp/dt = -f'(H0) x.

    H0 is recomputed from the current stage values, never taken from z0.
    """
    ts = time_grid(t_max, dt)
    x, p = float(np.real(z0)), float(np.imag(z0))
    zs = np.empty(len(ts), dtype=complex)
    zs[0] = complex(x, p)
    for i in range(1, len(ts)):
        h = ts[i] - ts[i - 1]
        k1x, k1p = _rhs(f, x, p)
        k2x, k2p = _rhs(f, x + 0.5 * h * k1x, p + 0.5 * h * k1p)
        k3x, k3p = _rhs(f, x + 0.5 * h * k2x, p + 0.5 * h * k2p)
        k4x, k4p = _rhs(f, x + h * k3x, p + h * k3p)
        x = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        p = p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if not (np.isfinite(x) and np.isfinite(p)):
            raise NumericalError(f"non-finite state at t={ts[i]:.6g} (f={f.name}, z0={z0})")
        zs[i] = complex(x, p)
    return ClassicalTrajectory(ts, zs, f.name, complex(z0))


def orbit_hausdorff(f: HamiltonianFunction, z0: complex, samples: int = 2048) -> float:
    """Sampled Hausdorff distance between the H0 orbit and one f(H0) period.

    Both orbits are sampled over one full period of their own time
    parameter. Undefined for frozen orbits (f' = 0).
    """
    omega = float(f.deriv(energy(z0)))
    if omega == 0.0:
        raise ValueError("orbit is frozen: f'(H0) = 0")
    k = np.arange(samples)
    a = evolve_h0(z0, 2 * np.pi * k / samples)
    b = evolve_f(f, z0, 2 * np.pi * k / samples / abs(omega))
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
