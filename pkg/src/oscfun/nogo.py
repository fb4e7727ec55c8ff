"""Single-valuedness test for would-be coherent families of f(H0).

A family |z> that follows the classical flow of f(H0) must have Fock
components psi_n(r, theta) carrying the phase
exp(i (f(E_n) theta + X(theta, r)) / f'(r^2/2)) with X shared by all n.
Going once around the origin (theta -> theta + 2 pi k) and comparing two
levels removes X, leaving the requirement that

    2 pi k (f(E_n) - f(E_m)) / f'(r^2/2)  be a multiple of 2 pi

for every pair of levels, winding k and radius r. The "branch ratio" is
(f(E_n) - f(E_m)) / f'(r^2/2); it must be an integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularFrequencyError
from .hamiltonians import HamiltonianFunction, energy_level

TWO_PI = 2.0 * math.pi


def _frequency(f: HamiltonianFunction, r: float) -> float:
    w = float(f.deriv(0.5 * r * r))
    if w == 0.0 or not math.isfinite(w):
        raise SingularFrequencyError(r)
    return w


def branch_ratio(f: HamiltonianFunction, n: int, m: int, r: float) -> float:
    """(f(E_n) - f(E_m)) / f'(r^2/2)."""
    if n < 0 or m < 0:
        raise ValueError("levels must be non-negative")
    w = _frequency(f, r)
    if n == m:
        return 0.0
    return (float(f.eval(energy_level(n))) - float(f.eval(energy_level(m)))) / w


def distance_to_2pi_multiple(v: float) -> float:
    """Distance from v to the nearest element of 2 pi Z, in [0, pi]."""
    return abs(v - TWO_PI * round(v / TWO_PI))


def distance_to_integer(v: float) -> float:
    return abs(v - round(v))


@dataclass(frozen=True)
class ExistenceReport:
    verdict: str
    witness: tuple | None
    tested_levels: range
    tested_radii: tuple
    tolerance: float
    f_name: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            n, m, r, ratio = self.witness
            w = {"n": n, "m": m, "r": r, "ratio": ratio}
        return {
            "verdict": self.verdict,
            "witness": w,
            "tested_levels": [self.tested_levels.start, self.tested_levels.stop - 1],
            "tested_radii": list(self.tested_radii),
            "tolerance": self.tolerance,
        }


def family_existence_check(
    f: HamiltonianFunction, n_max: int, radii, tol: float = 1e-9
) -> ExistenceReport:
    """Pass iff every branch ratio for n < m <= n_max and every radius is an integer.

    Pairs are visited lexicographically in (n, m, radius order); the first
    failure is returned as the witness (n, m, r, ratio).
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    radii = tuple(float(r) for r in radii)
    if not radii:
        raise ValueError("need at least one radius")
    for r in radii:
        _frequency(f, r)
    levels = range(0, n_max + 1)
    for n in levels:
        for m in range(n + 1, n_max + 1):
            for r in radii:
                ratio = branch_ratio(f, n, m, r)
                if distance_to_integer(ratio) > tol:
                    return ExistenceReport("fail", (n, m, r, ratio), levels, radii, tol, f.name)
    return ExistenceReport("pass", None, levels, radii, tol, f.name)


@dataclass(frozen=True)
class ResidualSample:
    n: int
    m: int
    k: int
    r: float
    residual: float

    CSV_HEADER = ("n", "m", "k", "r", "residual")

    def row(self):
        return (self.n, self.m, self.k, self.r, self.residual)


def er_phase_mismatch(n: int, m: int, k: int, r: float) -> float:
    """4 pi k e^{r^2/4} (e^{-(n+1/2)/2} - e^{-(m+1/2)/2}) for f = 2(1 - e^{-x/2})."""
    return 4.0 * math.pi * k * math.exp(r * r / 4.0) * (
        math.exp(-0.5 * (n + 0.5)) - math.exp(-0.5 * (m + 0.5))
    )


def er_residual(n: int, m: int, k: int, r: float) -> ResidualSample:
    """How far the Einstein-Rosen winding condition is from holding, mod 2 pi."""
    if n == m:
        raise ValueError("levels must differ")
    if k == 0:
        raise ValueError("winding k must be non-zero")
    return ResidualSample(n, m, k, float(r), distance_to_2pi_multiple(er_phase_mismatch(n, m, k, r)))


def branch_residual(f: HamiltonianFunction, n: int, m: int, k: int, r: float) -> ResidualSample:
    """Same residual for any f: distance of 2 pi k * branch_ratio to 2 pi Z."""
    return ResidualSample(n, m, k, float(r), distance_to_2pi_multiple(TWO_PI * k * branch_ratio(f, n, m, r)))


@dataclass(frozen=True)
class ImpossibilityReport:
    n_max: int
    k_max: int
    radii: tuple
    floor: float
    min_residual: float
    argmin: ResidualSample
    min_by_radius: dict
    samples: list = field(repr=False, default_factory=list)

    @property
    def exceeds_floor(self) -> bool:
        return self.min_residual > self.floor

    def to_dict(self) -> dict:
        return {
            "min_residual": self.min_residual,
            "argmin": {"n": self.argmin.n, "m": self.argmin.m, "k": self.argmin.k, "r": self.argmin.r},
            "floor": self.floor,
            "exceeds_floor": self.exceeds_floor,
            "min_by_radius": [{"r": r, "min_residual": v} for r, v in self.min_by_radius.items()],
            "grid": {"n_max": self.n_max, "k_max": self.k_max, "radii": list(self.radii)},
        }


def residual_scan(sample_fn, n_max: int, k_max: int, radii, floor: float = 0.0) -> ImpossibilityReport:
    """Evaluate ``sample_fn(n, m, k, r)`` over n < m <= n_max, 1 <= k <= k_max.

    Swapping n, m or negating k only flips the sign of the phase mismatch,
    so the half grid covers every case. Ties keep the first sample in
    (r, n, m, k) order.
    """
    if n_max < 1 or k_max < 1:
        raise ValueError("n_max and k_max must be at least 1")
    radii = tuple(float(r) for r in radii)
    if not radii:
        raise ValueError("need at least one radius")
    samples = []
    best = None
    per_radius = {}
    for r in radii:
        local = math.inf
        for n in range(n_max + 1):
            for m in range(n + 1, n_max + 1):
                for k in range(1, k_max + 1):
                    s = sample_fn(n, m, k, r)
                    samples.append(s)
                    local = min(local, s.residual)
                    if best is None or s.residual < best.residual:
                        best = s
        per_radius[r] = local
    return ImpossibilityReport(n_max, k_max, radii, float(floor), best.residual, best, per_radius, samples)


def er_impossibility_scan(n_max: int = 12, k_max: int = 8, radii=(0.0, 1.0), floor: float = 0.0) -> ImpossibilityReport:
    """Smallest Einstein-Rosen residual over a finite grid of levels, windings, radii."""
    return residual_scan(er_residual, n_max, k_max, radii, floor)


def integer_phase_residuals(n_max: int, k_max: int) -> np.ndarray:
    """Residuals when the level phases differ by integers, as for f = identity."""
    out = [distance_to_2pi_multiple(TWO_PI * (k * (n - m)))
           for n in range(n_max + 1) for m in range(n + 1, n_max + 1) for k in range(1, k_max + 1)]
    return np.array(out)
