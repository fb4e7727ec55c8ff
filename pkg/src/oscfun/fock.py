"""Truncated Fock-space states, coherent states and their observables.

Conventions: a CoherentLabel stores the annihilation-operator eigenvalue
alpha. The classical phase point with the same mean position and momentum
is z = sqrt(2) * alpha, so <X> = Re z and <P> = Im z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError

SQRT2 = math.sqrt(2.0)


def truncation_rule(abs_alpha: float) -> int:
    """Smallest nmax used for a coherent state of modulus ``abs_alpha``.

    ceil(|a|^2 + 10|a| + 20) keeps the dropped Poisson tail below 1e-12 for
    |a| <= 5 with a wide margin.
    """
    a = abs(abs_alpha)
    return int(math.ceil(a * a + 10.0 * a + 20.0))


@dataclass(frozen=True)
class CoherentLabel:
    alpha: complex

    @classmethod
    def from_phase_point(cls, z: complex) -> "CoherentLabel":
        return cls(complex(z) / SQRT2)

    @property
    def phase_point(self) -> complex:
        return SQRT2 * complex(self.alpha)

    @property
    def mean_occupation(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def classical_energy(self) -> float:
        """H0 of the matching phase point, |z|^2/2 = |alpha|^2."""
        return abs(self.alpha) ** 2


def _label_alpha(label) -> complex:
    return complex(label.alpha) if isinstance(label, CoherentLabel) else complex(label)


@dataclass(frozen=True, eq=False)
class FockState:
    """Amplitudes c_0..c_nmax over oscillator eigenstates.

    ``tail_bound`` bounds the probability mass that was cut off when the
    state was built; it is 0 for states that are exact in the truncated space.
    """

    amplitudes: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size == 0:
            raise ValueError("a Fock state needs at least one amplitude")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "tail_bound", float(self.tail_bound))

    @classmethod
    def basis(cls, n: int, nmax: int) -> "FockState":
        if not 0 <= n <= nmax:
            raise ValueError(f"level {n} outside 0..{nmax}")
        c = np.zeros(nmax + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @property
    def nmax(self) -> int:
        return self.amplitudes.size - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "FockState") -> complex:
        """<self|other>, zero-padding the shorter state."""
        n = min(self.amplitudes.size, other.amplitudes.size)
        return complex(np.vdot(self.amplitudes[:n], other.amplitudes[:n]))


def coherent_amplitudes(alpha, nmax: int) -> np.ndarray:
    """e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..nmax; ``alpha`` may be an array.

    Uses c_n = c_{n-1} a / sqrt(n), which never forms a^n or n! explicitly.
    The level index is the last axis of the result.
    """
    alpha = np.asarray(alpha, dtype=complex)
    out = np.empty(alpha.shape + (nmax + 1,), dtype=complex)
    out[..., 0] = np.exp(-0.5 * np.abs(alpha) ** 2)
    for n in range(1, nmax + 1):
        out[..., n] = out[..., n - 1] * alpha / math.sqrt(n)
    return out


def _poisson_tail_bound(last_prob: float, mean: float, nmax: int, captured: float) -> float:
    if mean == 0.0:
        return 0.0
    ratio = mean / (nmax + 2)
    if ratio < 1.0:
        # p_{k+1}/p_k = mean/(k+1) <= ratio for every k > nmax
        return last_prob * mean / (nmax + 1) / (1.0 - ratio)
    return max(0.0, 1.0 - captured)


def coherent_state(label, nmax: int | None = None, force: bool = False) -> FockState:
    """Coherent state |alpha> truncated at ``nmax`` (default: truncation_rule).

    An explicit ``nmax`` below the rule raises TruncationError unless
    ``force`` is set; the resulting ``tail_bound`` then reflects the loss.
    """
    alpha = _label_alpha(label)
    required = truncation_rule(abs(alpha))
    if nmax is None:
        nmax = required
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    if nmax < required and not force:
        raise TruncationError(nmax, required)
    amps = coherent_amplitudes(alpha, nmax)
    probs = np.abs(amps) ** 2
    tail = _poisson_tail_bound(float(probs[-1]), abs(alpha) ** 2, nmax, float(probs.sum()))
    return FockState(amps, tail)


# --------------------------------------------------------------------------
# ladder operators and observables

def _padded(c):
    return np.concatenate([c, [0.0]])


def apply_annihilation(state: FockState) -> np.ndarray:
    """(a c)_n = sqrt(n+1) c_{n+1}, returned on levels 0..nmax."""
    c = state.amplitudes
    out = np.zeros_like(c)
    out[:-1] = np.sqrt(np.arange(1, c.size)) * c[1:]
    return out


def annihilation_defect(state: FockState, alpha: complex) -> float:
    """||(a - alpha)|psi>|| inside the truncated space."""
    return float(np.linalg.norm(apply_annihilation(state) - alpha * state.amplitudes))


def annihilation_defect_bound(state: FockState, alpha: complex) -> float:
    """Defect left by truncation alone: only the top level misses its partner."""
    return abs(alpha) * abs(state.amplitudes[-1])


def apply_x(state: FockState) -> np.ndarray:
    """X = (a + a^dag)/sqrt(2) applied exactly; the result lives on 0..nmax+1."""
    c = _padded(state.amplitudes)
    s = np.sqrt(np.arange(1, c.size))
    out = np.zeros_like(c)
    out[:-1] += s * c[1:]
    out[1:] += s * c[:-1]
    return out / SQRT2


def apply_p(state: FockState) -> np.ndarray:
    """P = i(a^dag - a)/sqrt(2) applied exactly; the result lives on 0..nmax+1."""
    c = _padded(state.amplitudes)
    s = np.sqrt(np.arange(1, c.size))
    out = np.zeros_like(c)
    out[:-1] -= s * c[1:]
    out[1:] += s * c[:-1]
    return 1j * out / SQRT2


@dataclass(frozen=True)
class ObservableReport:
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    mean_h0: float
    var_h0: float

    @property
    def delta_x(self) -> float:
        return math.sqrt(self.var_x)

    @property
    def delta_p(self) -> float:
        return math.sqrt(self.var_p)

    @property
    def delta_h0(self) -> float:
        return math.sqrt(self.var_h0)

    @property
    def characteristic_time(self) -> float:
        """tau = 1 / (2 Delta H0); infinite for energy eigenstates."""
        return math.inf if self.var_h0 == 0 else 1.0 / (2.0 * self.delta_h0)

    @property
    def mean_z(self) -> complex:
        return complex(self.mean_x, self.mean_p)


def expectations(state: FockState) -> ObservableReport:
    """Moments of X, P and H0 for the ray through ``state``.

    Divides by the squared norm, so truncated states are treated as the
    normalized vectors they represent.
    """
    c = _padded(state.amplitudes)
    norm2 = float(np.vdot(c, c).real)
    xc, pc = apply_x(state), apply_p(state)
    mean_x = float(np.vdot(c, xc).real) / norm2
    mean_p = float(np.vdot(c, pc).real) / norm2
    x2 = float(np.vdot(xc, xc).real) / norm2
    p2 = float(np.vdot(pc, pc).real) / norm2
    probs = state.probabilities / norm2
    energies = np.arange(probs.size) + 0.5
    mean_h0 = float(probs @ energies)
    var_h0 = float(probs @ (energies - mean_h0) ** 2)
    return ObservableReport(
        mean_x=mean_x,
        mean_p=mean_p,
        var_x=max(0.0, x2 - mean_x**2),
        var_p=max(0.0, p2 - mean_p**2),
        mean_h0=mean_h0,
        var_h0=var_h0,
    )


# --------------------------------------------------------------------------
# position representation

def position_wavefunction(state: FockState, xs) -> np.ndarray:
    """psi(x) = sum_n c_n phi_n(x) with normalized Hermite functions phi_n.

    phi_0 = pi^{-1/4} e^{-x^2/2}, phi_1 = sqrt(2) x phi_0,
    phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1}.
    """
    xs = np.asarray(xs, dtype=float)
    c = state.amplitudes
    phi_prev = np.pi ** -0.25 * np.exp(-0.5 * xs * xs)
    psi = c[0] * phi_prev
    if c.size == 1:
        return psi
    phi = SQRT2 * xs * phi_prev
    psi = psi + c[1] * phi
    for n in range(1, c.size - 1):
        phi_next = math.sqrt(2.0 / (n + 1)) * xs * phi - math.sqrt(n / (n + 1)) * phi_prev
        phi_prev, phi = phi, phi_next
        psi = psi + c[n + 1] * phi
    return psi


# --------------------------------------------------------------------------
# resolution of the identity

def identity_resolution_check(
    nmax: int,
    R: float,
    nr: int = 400,
    ntheta: int = 256,
    radial: str = "gauss",
) -> np.ndarray:
    """(1/pi) * integral over |alpha| <= R of |alpha><alpha|, in the Fock basis.

    Polar product rule: trapezoid in the angle, Gauss-Legendre (default) or
    midpoint in the radius. The exact result is diagonal with entries
    P(n+1, R^2), the regularized lower incomplete gamma function.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    if nr < 16 or ntheta < 16:
        raise ValueError("quadrature sizes must be at least 16")
    if radial == "gauss":
        nodes, weights = np.polynomial.legendre.leggauss(nr)
        r = 0.5 * R * (nodes + 1.0)
        wr = 0.5 * R * weights
    elif radial == "midpoint":
        r = (np.arange(nr) + 0.5) * (R / nr)
        wr = np.full(nr, R / nr)
    else:
        raise ValueError(f"unknown radial rule {radial!r}")
    theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
    wtheta = 2.0 * np.pi / ntheta

    alpha = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    w = (np.repeat(wr * r, ntheta) * wtheta / np.pi)
    amps = coherent_amplitudes(alpha, nmax)
    M = (amps.T * w) @ amps.conj()
    return M.real


def expected_resolution_diagonal(nmax: int, R: float) -> np.ndarray:
    """P(n+1, R^2) = 1 - e^{-R^2} sum_{k<=n} R^{2k}/k! for n = 0..nmax."""
    s = R * R
    terms = np.empty(nmax + 1)
    terms[0] = 1.0
    for k in range(1, nmax + 1):
        terms[k] = terms[k - 1] * s / k
    return -np.expm1(-s) - np.exp(-s) * (np.cumsum(terms) - 1.0)


def resolution_report(M: np.ndarray, R: float) -> dict:
    nmax = M.shape[0] - 1
    off = M - np.diag(np.diag(M))
    expected = expected_resolution_diagonal(nmax, R)
    return {
        "nmax": nmax,
        "R": float(R),
        "max_offdiag": float(np.max(np.abs(off))) if nmax > 0 else 0.0,
        "diag": [float(v) for v in np.diag(M)],
        "expected_diag": [float(v) for v in expected],
        "max_diag_error": float(np.max(np.abs(np.diag(M) - expected))),
    }
