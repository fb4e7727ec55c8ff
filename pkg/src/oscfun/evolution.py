"""Exact quantum evolution under f(H0) and quantum/classical comparisons.

f(H0) is diagonal in the Fock basis, so evolution multiplies each amplitude
by exp(-i t f(E_n)). The diagnostics here measure how far an evolved
coherent state drifts from the coherent state sitting at the classically
evolved phase point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigurationError, NumericalError
from .fock import (
    SQRT2,
    FockState,
    _label_alpha,
    coherent_state,
    expectations,
    position_wavefunction,
)
from .grids import time_grid
from .hamiltonians import HamiltonianFunction

ENERGY_CONVENTIONS = ("classical", "quantum-mean")
_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class EvolutionPlan:
    """f evaluated once on the levels 0..nmax."""

    f: HamiltonianFunction
    nmax: int
    phases_per_unit_time: np.ndarray

    @classmethod
    def build(cls, f: HamiltonianFunction, nmax: int) -> "EvolutionPlan":
        phases = f.on_spectrum(nmax)
        if not np.all(np.isfinite(phases)):
            bad = int(np.flatnonzero(~np.isfinite(phases))[0])
            raise NumericalError(f"f({bad} + 1/2) is not finite for f={f.name}")
        phases = phases.copy()
        phases.setflags(write=False)
        return cls(f, nmax, phases)

    def factors(self, times) -> np.ndarray:
        """exp(-i t f(E_n)) with times along axis 0 and levels along axis 1."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        return np.exp(-1j * t[:, None] * self.phases_per_unit_time[None, :])

    def propagate(self, state: FockState, t: float) -> FockState:
        if state.nmax != self.nmax:
            raise ValueError(f"plan built for nmax={self.nmax}, state has nmax={state.nmax}")
        return FockState(state.amplitudes * np.exp(-1j * t * self.phases_per_unit_time), state.tail_bound)


def evolve(state: FockState, f: HamiltonianFunction, t: float) -> FockState:
    """exp(-i t f(H0)) |state>."""
    return EvolutionPlan.build(f, state.nmax).propagate(state, t)


def label_energy(alpha0: complex, energy_convention: str = "classical") -> float:
    """Energy fed to f' when moving a coherent label classically.

    "classical" uses H0 of the phase point sqrt(2) alpha, i.e. |alpha|^2;
    "quantum-mean" uses <H0> = |alpha|^2 + 1/2.
    """
    if energy_convention == "classical":
        return alpha0.real**2 + alpha0.imag**2
    if energy_convention == "quantum-mean":
        return alpha0.real**2 + alpha0.imag**2 + 0.5
    raise ConfigurationError(
        f"unknown energy convention {energy_convention!r}; choose from {ENERGY_CONVENTIONS}"
    )


def classical_label(alpha0, f: HamiltonianFunction, t, energy_convention: str = "classical"):
    """alpha0 exp(-i t f'(H_cl)); ``t`` may be an array."""
    alpha0 = _label_alpha(alpha0)
    omega = float(f.deriv(label_energy(alpha0, energy_convention)))
    return alpha0 * np.exp(-1j * omega * np.asarray(t, dtype=float))


def coherence_defect(
    alpha0,
    f: HamiltonianFunction,
    t: float,
    nmax: int | None = None,
    energy_convention: str = "classical",
) -> float:
    """1 - |<alpha_cl(t)| exp(-i t f(H0)) |alpha0>|.

    Taking the modulus removes the free global phase of the ray.
    """
    alpha0 = _label_alpha(alpha0)
    psi0 = coherent_state(alpha0, nmax)
    psi_t = evolve(psi0, f, t)
    target = coherent_state(complex(classical_label(alpha0, f, t, energy_convention)), psi0.nmax, force=True)
    return float(np.clip(1.0 - abs(target.overlap(psi_t)), 0.0, 1.0))


def autocorrelation(state0: FockState, f: HamiltonianFunction, t: float) -> float:
    """|<psi(0)|psi(t)>| = |sum_n |c_n|^2 exp(-i t f(E_n))|."""
    plan = EvolutionPlan.build(f, state0.nmax)
    return float(min(1.0, abs(state0.probabilities @ plan.factors(t)[0])))


def ehrenfest_gap(
    alpha0,
    f: HamiltonianFunction,
    t: float,
    nmax: int | None = None,
    energy_convention: str = "classical",
) -> float:
    """Distance between (<X>, <P>) at time t and the classical phase point."""
    alpha0 = _label_alpha(alpha0)
    psi_t = evolve(coherent_state(alpha0, nmax), f, t)
    z_cl = SQRT2 * complex(classical_label(alpha0, f, t, energy_convention))
    return abs(expectations(psi_t).mean_z - z_cl)


@dataclass(frozen=True, eq=False)
class DephasingSeries:
    times: np.ndarray
    defect: np.ndarray
    autocorrelation: np.ndarray
    ehrenfest_gap: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    alpha0: complex
    f_name: str
    nmax: int
    tail_bound: float
    energy_convention: str = "classical"

    CSV_HEADER = ("t", "defect", "autocorr", "ehrenfest_gap", "mean_x", "mean_p", "var_x", "var_p")

    def rows(self):
        cols = (self.times, self.defect, self.autocorrelation, self.ehrenfest_gap,
                self.mean_x, self.mean_p, self.var_x, self.var_p)
        for row in zip(*cols):
            yield tuple(float(v) for v in row)


def _scan_chunk(probs, c0, plan, times, theta_rate, sq1, sq2):
    phases = plan.factors(times)
    auto = np.minimum(np.abs(phases @ probs), 1.0)
    n = np.arange(probs.size)
    # <alpha_cl(t)| differs from <alpha0| by exp(+i n theta(t)) on level n
    label_rot = np.exp(1j * np.outer(times * theta_rate, n))
    overlap = (phases * label_rot) @ probs
    amps = c0[None, :] * phases
    a1 = np.sum(amps[:, :-1].conj() * amps[:, 1:] * sq1, axis=1)
    a2 = np.sum(amps[:, :-2].conj() * amps[:, 2:] * sq2, axis=1)
    return auto, overlap, a1, a2


def dephasing_scan(
    alpha0,
    f: HamiltonianFunction,
    t_max: float,
    dt: float,
    nmax: int | None = None,
    energy_convention: str = "classical",
    force: bool = False,
) -> DephasingSeries:
    """Defect, autocorrelation and Ehrenfest gap on a uniform time grid.

    Moments come from ladder-operator sums: with A1 = <a>, A2 = <a^2>,
    <X> + i<P> = sqrt(2) A1, <X^2> = Re A2 + <N> + 1/2, <P^2> = -Re A2 + <N> + 1/2.
    """
    alpha0 = _label_alpha(alpha0)
    psi0 = coherent_state(alpha0, nmax, force=force)
    plan = EvolutionPlan.build(f, psi0.nmax)
    times = time_grid(t_max, dt)
    c0 = psi0.amplitudes
    probs = psi0.probabilities
    norm2 = float(probs.sum())
    n = np.arange(probs.size)
    mean_n = float(probs @ n) / norm2
    sq1 = np.sqrt(n[1:])
    sq2 = np.sqrt(n[1:-1] * n[2:])
    theta_rate = float(f.deriv(label_energy(alpha0, energy_convention)))

    parts = [
        _scan_chunk(probs, c0, plan, times[i:i + _CHUNK], theta_rate, sq1, sq2)
        for i in range(0, times.size, _CHUNK)
    ]
    auto, overlap, a1, a2 = (np.concatenate(p) for p in zip(*parts))
    a1, a2 = a1 / norm2, a2 / norm2
    mean_z = SQRT2 * a1
    z_cl = SQRT2 * classical_label(alpha0, f, times, energy_convention)
    var_x = a2.real + mean_n + 0.5 - mean_z.real**2
    var_p = -a2.real + mean_n + 0.5 - mean_z.imag**2
    return DephasingSeries(
        times=times,
        defect=np.clip(1.0 - np.abs(overlap), 0.0, 1.0),
        autocorrelation=auto,
        ehrenfest_gap=np.abs(mean_z - z_cl),
        mean_x=mean_z.real,
        mean_p=mean_z.imag,
        var_x=np.maximum(var_x, 0.0),
        var_p=np.maximum(var_p, 0.0),
        alpha0=alpha0,
        f_name=f.name,
        nmax=psi0.nmax,
        tail_bound=psi0.tail_bound,
        energy_convention=energy_convention,
    )


def find_revivals(series: DephasingSeries, threshold: float) -> np.ndarray:
    """Times of interior local maxima of the autocorrelation above ``threshold``."""
    a = series.autocorrelation
    if a.size < 3:
        return np.empty(0)
    mid = a[1:-1]
    peak = (mid > a[:-2]) & (mid >= a[2:]) & (mid > threshold)
    return series.times[1:-1][peak]


def revival_peaks(series: DephasingSeries, threshold: float):
    """(time, autocorrelation) pairs for every detected revival."""
    times = find_revivals(series, threshold)
    idx = np.searchsorted(series.times, times)
    return [(float(t), float(series.autocorrelation[i])) for t, i in zip(times, idx)]


def reparametrization_distance(state0: FockState, f: HamiltonianFunction, t: float, n_grid: int = 1024) -> float:
    """min over T and phase of ||psi_f(t) - e^{i phase} psi_H0(T)||.

    H0 evolution is 2 pi periodic up to a global phase, so T ranges over one
    period. The overlap modulus |sum_n q_n e^{i n T}| is sampled by FFT and
    the best sample polished with a bounded scalar search.
    """
    probs = state0.probabilities
    q = probs * np.exp(-1j * t * EvolutionPlan.build(f, state0.nmax).phases_per_unit_time)
    size = max(n_grid, 4 * q.size)
    sampled = np.abs(np.fft.ifft(q, size)) * size
    j = int(np.argmax(sampled))
    step = 2 * np.pi / size
    n = np.arange(q.size)

    def neg_overlap(T):
        return -abs(np.sum(q * np.exp(1j * n * T)))

    res = minimize_scalar(neg_overlap, bounds=(j * step - step, j * step + step),
                          method="bounded", options={"xatol": 1e-12})
    best = max(sampled[j], -res.fun)
    norm2 = float(probs.sum())
    return math.sqrt(max(0.0, 2.0 * norm2 - 2.0 * best))


def mean_rotation_rate(state: FockState, f: HamiltonianFunction) -> float:
    """Clockwise angular speed of (<X>, <P>) at t = 0 under f(H0).

    <a>(t) = sum_n w_n exp(-i t (f(E_{n+1}) - f(E_n))) with
    w_n = sqrt(n+1) conj(c_n) c_{n+1}.
    """
    c = state.amplitudes
    fE = EvolutionPlan.build(f, state.nmax).phases_per_unit_time
    w = np.sqrt(np.arange(1, c.size)) * c[:-1].conj() * c[1:]
    A = w.sum()
    if A == 0:
        raise ValueError("<a> vanishes; rotation rate undefined")
    return float((np.sum(w * np.diff(fE)) / A).real)


def wavepacket_series(state0: FockState, f: HamiltonianFunction, times, xs) -> np.ndarray:
    """|psi(t, x)|^2 with times along axis 0 and positions along axis 1."""
    plan = EvolutionPlan.build(f, state0.nmax)
    return np.array([np.abs(position_wavefunction(plan.propagate(state0, t), xs)) ** 2 for t in times])
