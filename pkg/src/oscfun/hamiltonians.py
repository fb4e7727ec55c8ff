"""Functions f defining H = f(H0), and the oscillator spectrum they act on.

Every HamiltonianFunction carries both f and its exact derivative f'. The
classical flow only needs f', the quantum propagator only needs f on the
levels E_n = n + 1/2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, ExprSyntaxError, UnknownIdentifierError
from .expr import Node, differentiate, evaluate, parse_expression, to_text


def energy_level(n):
    """Oscillator eigenvalue E_n = n + 1/2 (hbar = m = k = 1). Accepts arrays."""
    return np.asarray(n, dtype=float) + 0.5 if np.ndim(n) else float(n) + 0.5


def energy_levels(nmax: int) -> np.ndarray:
    return np.arange(nmax + 1, dtype=float) + 0.5


@dataclass(frozen=True)
class HamiltonianFunction:
    """A differentiable real function of the oscillator energy.

    ``eval`` and ``deriv`` accept floats or ndarrays and work elementwise.
    """

    name: str
    eval: Callable
    deriv: Callable
    domain_min: float = 0.0
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.eval(x)

    def on_spectrum(self, nmax: int) -> np.ndarray:
        """f(E_n) for n = 0..nmax."""
        return np.asarray(self.eval(energy_levels(nmax)), dtype=float)


def _as_float(x):
    return np.asarray(x, dtype=float) if np.ndim(x) else float(x)


def _identity_eval(x):
    return _as_float(x) * 1.0


def _identity_deriv(x):
    return np.ones(np.shape(x)) if np.ndim(x) else 1.0


def _er_eval(x):
    # 2(1 - e^{-x/2}) via expm1 for accuracy near x = 0
    return -2.0 * np.expm1(-0.5 * _as_float(x))


def _er_deriv(x):
    return np.exp(-0.5 * _as_float(x))


def identity() -> HamiltonianFunction:
    return HamiltonianFunction("identity", _identity_eval, _identity_deriv)


def einstein_rosen() -> HamiltonianFunction:
    """f(x) = 2(1 - exp(-x/2)), the cylindrical-wave Hamiltonian."""
    return HamiltonianFunction("einstein_rosen", _er_eval, _er_deriv)


def kerr(chi: float) -> HamiltonianFunction:
    """Kerr Hamiltonian chi*N(N-1) rewritten through N = H0 - 1/2.

    f(x) = chi (x - 1/2)(x - 3/2), so f(E_n) = chi n (n - 1) exactly.
    """
    chi = float(chi)

    def f(x):
        x = _as_float(x)
        return chi * (x - 0.5) * (x - 1.5)

    def fp(x):
        return chi * (2.0 * _as_float(x) - 2.0)

    return HamiltonianFunction(f"kerr(chi={chi!r})", f, fp, params={"chi": chi})


_ALIASES = {
    "identity": "identity",
    "id": "identity",
    "einstein_rosen": "einstein_rosen",
    "er": "einstein_rosen",
    "kerr": "kerr",
}


def builtin(name: str, **params) -> HamiltonianFunction:
    """Look up a built-in f by name: identity, einstein_rosen, or kerr(chi=...)."""
    key = _ALIASES.get(name)
    if key is None:
        raise ConfigurationError(f"unknown built-in Hamiltonian {name!r}")
    if key == "kerr":
        if set(params) != {"chi"}:
            raise ConfigurationError("kerr requires exactly one parameter, chi")
        return kerr(params["chi"])
    if params:
        raise ConfigurationError(f"{key} takes no parameters, got {sorted(params)}")
    return identity() if key == "identity" else einstein_rosen()


def as_hamiltonian(ast: Node, name: str | None = None) -> HamiltonianFunction:
    """Wrap a parsed expression; the derivative is taken symbolically once."""
    d_ast = differentiate(ast)
    return HamiltonianFunction(
        name or to_text(ast),
        lambda x, _a=ast: evaluate(_a, x),
        lambda x, _d=d_ast: evaluate(_d, x),
        params={"expr": to_text(ast), "derivative": to_text(d_ast)},
    )


_KERR_SPEC = re.compile(r"^kerr:chi=(?P<chi>.+)$")


def resolve(spec: str) -> HamiltonianFunction:
    """Turn a command-line ``--f`` value into a HamiltonianFunction.

    Accepts ``id``, ``er``, ``kerr:chi=<real>``, the long built-in names, or
    any expression in ``x``.
    """
    spec = spec.strip()
    if not spec:
        raise ConfigurationError("empty Hamiltonian specification")
    m = _KERR_SPEC.match(spec)
    if m:
        try:
            chi = float(m.group("chi"))
        except ValueError:
            raise ConfigurationError(f"bad kerr coupling in {spec!r}") from None
        if not np.isfinite(chi):
            raise ConfigurationError(f"kerr coupling must be finite, got {chi}")
        return kerr(chi)
    if spec in _ALIASES and spec != "kerr":
        return builtin(spec)
    try:
        ast = parse_expression(spec)
    except (ExprSyntaxError, UnknownIdentifierError) as exc:
        raise ConfigurationError(f"cannot parse f = {spec!r}: {exc}") from exc
    return as_hamiltonian(ast, name=spec)


def central_difference(func, x, h=1e-4):
    return (func(x + h) - func(x - h)) / (2.0 * h)
