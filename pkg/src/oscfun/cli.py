"""Batch command line for oscfun experiments.

Usage:
    oscfun evolve   --f er --alpha 1.4142 --tmax 50 --dt 0.05 --out series.csv
    oscfun dephase  --f kerr:chi=1 --alpha 2 --tmax 4 --dt 0.001 --json summary.json
    oscfun nogo     --f er --nmax 10 --radii 0.5,1,2
    oscfun --config run.json --dt 0.1

Settings come from built-in defaults, then an optional JSON config file,
then flags given on the command line, each layer overriding the previous.
Exit status: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import classical, evolution, fock, nogo
from .errors import (
    ConfigurationError,
    ExprDomainError,
    ExprSyntaxError,
    NumericalError,
    OscfunError,
    SingularFrequencyError,
    TruncationError,
    UnknownIdentifierError,
)
from .hamiltonians import resolve
from .io import check_writable, write_csv, write_json

COMMANDS = ("evolve", "classical", "dephase", "nogo", "identity-check", "wavefunction", "revival")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def parse_complex(text) -> complex:
    """Parse ``a+bi`` style input; plain reals are accepted as pure-real."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    if not isinstance(text, str):
        raise ConfigurationError(f"cannot read a complex number from {text!r}")
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        value = complex(s)
    except ValueError:
        raise ConfigurationError(f"cannot read a complex number from {text!r}; use a+bi") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ConfigurationError(f"complex input must be finite, got {text!r}")
    return value


def format_complex(z: complex) -> str:
    return f"{z.real!r}{z.imag:+}i"


def parse_flag(value) -> bool:
    if isinstance(value, bool):
        return value
    raise ConfigurationError(f"expected true or false, got {value!r}")


def parse_radii(text) -> tuple:
    if isinstance(text, (list, tuple)):
        items = text
    else:
        items = [s for s in str(text).split(",") if s.strip()]
    try:
        return tuple(float(v) for v in items)
    except (TypeError, ValueError):
        raise ConfigurationError(f"radii must be a comma-separated list of reals, got {text!r}") from None


@dataclass
class RunConfig:
    command: str
    f: str = "id"
    alpha: complex = 1 + 0j
    z0: complex = 1 + 0j
    tmax: float = 20.0
    dt: float = 0.01
    nmax: int | None = None
    force_nmax: bool = False
    out: str | None = None
    json: str | None = None
    energy_convention: str = "classical"
    radii: tuple = (0.5, 1.0, 2.0)
    kmax: int = 8
    tol: float = 1e-9
    floor: float = 0.0
    R: float | None = None
    R2: float | None = None
    nr: int = 400
    ntheta: int = 256
    radial: str = "gauss"
    t: float = 0.0
    xmin: float = -8.0
    xmax: float = 8.0
    nx: int = 401
    threshold: float = 0.999
    dump_residuals: str | None = None

    _CONVERT = {
        "alpha": parse_complex,
        "z0": parse_complex,
        "radii": parse_radii,
        "force_nmax": parse_flag,
    }

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {fl.name: fl for fl in fields(cls)}
        clean = {}
        for key, value in values.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigurationError(f"unknown configuration key {key!r}")
            clean[name] = value
        if "command" not in clean or clean["command"] is None:
            raise ConfigurationError("no command given; choose one of " + ", ".join(COMMANDS))
        for name, value in list(clean.items()):
            if value is None or name == "command":
                continue
            clean[name] = cls._convert(name, value, known[name])
        cfg = cls(**clean)
        cfg.validate()
        return cfg

    @classmethod
    def _convert(cls, name, value, fl):
        if name in cls._CONVERT:
            return cls._CONVERT[name](value)
        kind = fl.type if isinstance(fl.type, str) else getattr(fl.type, "__name__", "")
        try:
            if kind.startswith("int"):
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError
                return int(value)
            if kind.startswith("float"):
                return float(value)
            if kind.startswith("str"):
                return str(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"bad value for {name}: {value!r}") from None
        return value

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}; choose one of " + ", ".join(COMMANDS))
        for name in ("tmax", "t", "floor"):
            if not (math.isfinite(getattr(self, name)) and getattr(self, name) >= 0):
                raise ConfigurationError(f"{name} must be a finite non-negative number")
        for name in ("dt", "tol"):
            if not (math.isfinite(getattr(self, name)) and getattr(self, name) > 0):
                raise ConfigurationError(f"{name} must be positive")
        if self.nmax is not None and self.nmax < 0:
            raise ConfigurationError("nmax must be non-negative")
        if self.kmax < 1:
            raise ConfigurationError("kmax must be at least 1")
        if self.energy_convention not in evolution.ENERGY_CONVENTIONS:
            raise ConfigurationError(f"energy convention must be one of {evolution.ENERGY_CONVENTIONS}")
        if not 0 < self.threshold:
            raise ConfigurationError("threshold must be positive")
        if self.radial not in ("gauss", "midpoint"):
            raise ConfigurationError("radial rule must be gauss or midpoint")
        if self.nr < 16 or self.ntheta < 16:
            raise ConfigurationError("nr and ntheta must be at least 16")
        if self.R is not None and self.R2 is not None:
            raise ConfigurationError("give either R or R2, not both")
        for name in ("R", "R2"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"{name} must be positive")
        if not (self.xmax > self.xmin and self.nx >= 2):
            raise ConfigurationError("need xmax > xmin and nx >= 2")
        if not self.radii:
            raise ConfigurationError("radii must be non-empty")
        if self.command == "nogo" and self.nmax is not None and self.nmax < 1:
            raise ConfigurationError("nogo needs nmax >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = format_complex(self.alpha)
        d["z0"] = format_complex(self.z0)
        d["radii"] = list(self.radii)
        return d


def load_config(path: str) -> RunConfig:
    """Read a JSON config file whose keys mirror the command-line flags."""
    return RunConfig.from_mapping(read_config_file(path))


def read_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    return data


# --------------------------------------------------------------------------
# commands

def _summary(msg: str) -> None:
    print(msg, file=sys.stderr)


def _tail_note(cfg, tail_bound: float) -> None:
    if cfg.force_nmax and cfg.nmax is not None:
        _summary(f"warning: forced nmax={cfg.nmax}, dropped probability <= {tail_bound:.3e}")


def _report(cfg, body: dict) -> dict:
    return {"command": cfg.command, "f": cfg.f, **body, "config": cfg.to_dict()}


def _coherent_nmax(cfg):
    """Validate the truncation up front so a refusal is a configuration error."""
    required = fock.truncation_rule(abs(cfg.alpha))
    if cfg.nmax is not None and cfg.nmax < required and not cfg.force_nmax:
        raise TruncationError(cfg.nmax, required)
    return cfg.nmax


def run_evolve(cfg, f):
    nmax = _coherent_nmax(cfg)
    series = evolution.dephasing_scan(cfg.alpha, f, cfg.tmax, cfg.dt, nmax, cfg.energy_convention, cfg.force_nmax)
    _tail_note(cfg, series.tail_bound)
    rows = zip(series.times, series.autocorrelation, series.mean_x, series.mean_p, series.var_x, series.var_p)
    write_csv(cfg.out, ("t", "autocorr", "mean_x", "mean_p", "var_x", "var_p"),
              ((float(v) for v in r) for r in rows))
    psi0 = fock.coherent_state(cfg.alpha, series.nmax, force=True)
    final = evolution.evolve(psi0, f, cfg.tmax)
    body = {
        "nmax": series.nmax,
        "tail_bound": series.tail_bound,
        "final_t": float(series.times[-1]),
        "final_autocorrelation": float(series.autocorrelation[-1]),
        "final_norm": final.norm(),
        "final_amplitudes": [[float(c.real), float(c.imag)] for c in final.amplitudes],
    }
    if cfg.json:
        write_json(cfg.json, _report(cfg, body))
    _summary(f"evolve f={f.name} alpha={format_complex(cfg.alpha)} t={cfg.tmax:g}: "
             f"autocorrelation={body['final_autocorrelation']:.12f} nmax={series.nmax}")


def run_classical(cfg, f):
    traj = classical.analytic_trajectory(f, cfg.z0, cfg.tmax, cfg.dt)
    rk4 = classical.integrate_eom(f, cfg.z0, cfg.tmax, cfg.dt)
    write_csv(cfg.out, ("t", "x", "p"), traj.rows())
    omega = float(f.deriv(classical.energy(cfg.z0)))
    body = {
        "z0": format_complex(complex(cfg.z0)),
        "h0": classical.energy(cfg.z0),
        "frequency": omega,
        "period": (2 * math.pi / abs(omega)) if omega else None,
        "final_z": format_complex(complex(traj.z[-1])),
        "rk4_max_deviation": float(np.max(np.abs(rk4.z - traj.z))),
        "rk4_radius_drift": rk4.radius_drift(),
    }
    if cfg.json:
        write_json(cfg.json, _report(cfg, body))
    _summary(f"classical f={f.name} z0={format_complex(complex(cfg.z0))}: frequency={omega:.12g} "
             f"rk4 deviation={body['rk4_max_deviation']:.3e}")


def _scan_body(series, threshold):
    i = int(np.argmax(series.defect))
    return {
        "nmax": series.nmax,
        "tail_bound": series.tail_bound,
        "energy_convention": series.energy_convention,
        "max_defect": float(series.defect[i]),
        "t_max_defect": float(series.times[i]),
        "final_defect": float(series.defect[-1]),
        "max_ehrenfest_gap": float(np.max(series.ehrenfest_gap)),
        "revival_threshold": threshold,
        "revivals": [{"t": t, "autocorr": a} for t, a in evolution.revival_peaks(series, threshold)],
    }


def run_dephase(cfg, f):
    nmax = _coherent_nmax(cfg)
    series = evolution.dephasing_scan(cfg.alpha, f, cfg.tmax, cfg.dt, nmax, cfg.energy_convention, cfg.force_nmax)
    _tail_note(cfg, series.tail_bound)
    write_csv(cfg.out, evolution.DephasingSeries.CSV_HEADER, series.rows())
    body = _scan_body(series, cfg.threshold)
    if cfg.json:
        write_json(cfg.json, _report(cfg, body))
    _summary(f"dephase f={f.name} alpha={format_complex(cfg.alpha)}: max defect={body['max_defect']:.6f} "
             f"at t={body['t_max_defect']:g}, {len(body['revivals'])} revivals")


def run_revival(cfg, f):
    nmax = _coherent_nmax(cfg)
    series = evolution.dephasing_scan(cfg.alpha, f, cfg.tmax, cfg.dt, nmax, cfg.energy_convention, cfg.force_nmax)
    _tail_note(cfg, series.tail_bound)
    peaks = evolution.revival_peaks(series, cfg.threshold)
    write_csv(cfg.out, ("t", "autocorr"), peaks)
    body = _scan_body(series, cfg.threshold)
    if cfg.json:
        write_json(cfg.json, _report(cfg, body))
    times = ", ".join(f"{t:.6g}" for t, _ in peaks) or "none"
    _summary(f"revival f={f.name} alpha={format_complex(cfg.alpha)}: revivals at {times}")


def run_nogo(cfg, f):
    n_max = 12 if cfg.nmax is None else cfg.nmax
    existence = nogo.family_existence_check(f, n_max, cfg.radii, cfg.tol)
    if f.name == "einstein_rosen":
        scan = nogo.er_impossibility_scan(n_max, cfg.kmax, cfg.radii, cfg.floor)
    else:
        scan = nogo.residual_scan(lambda n, m, k, r: nogo.branch_residual(f, n, m, k, r),
                                  n_max, cfg.kmax, cfg.radii, cfg.floor)
    ex = existence.to_dict()
    sc = scan.to_dict()
    body = {
        "verdict": ex["verdict"],
        "witness": ex["witness"],
        "min_residual": sc["min_residual"],
        "min_residual_at": sc["argmin"],
        "floor": sc["floor"],
        "exceeds_floor": sc["exceeds_floor"],
        "min_by_radius": sc["min_by_radius"],
        "grid": {"n_max": n_max, "k_max": cfg.kmax, "radii": list(cfg.radii), "tolerance": cfg.tol},
    }
    if cfg.dump_residuals:
        write_csv(cfg.dump_residuals, nogo.ResidualSample.CSV_HEADER, (s.row() for s in scan.samples))
    write_json(cfg.json, _report(cfg, body))
    _summary(f"nogo f={f.name}: verdict={body['verdict']} min residual={body['min_residual']:.6g}")


def run_identity_check(cfg, f):
    if cfg.R is not None:
        R = cfg.R
    elif cfg.R2 is not None:
        R = math.sqrt(cfg.R2)
    else:
        R = 1.0
    nmax = 12 if cfg.nmax is None else cfg.nmax
    M = fock.identity_resolution_check(nmax, R, cfg.nr, cfg.ntheta, cfg.radial)
    body = fock.resolution_report(M, R)
    body["R2"] = R * R
    write_json(cfg.json, _report(cfg, body))
    _summary(f"identity-check nmax={nmax} R^2={R * R:g}: max offdiag={body['max_offdiag']:.3e} "
             f"max diag error={body['max_diag_error']:.3e}")


def run_wavefunction(cfg, f):
    nmax = _coherent_nmax(cfg)
    psi = evolution.evolve(fock.coherent_state(cfg.alpha, nmax, force=cfg.force_nmax), f, cfg.t)
    _tail_note(cfg, psi.tail_bound)
    xs = np.linspace(cfg.xmin, cfg.xmax, cfg.nx)
    values = fock.position_wavefunction(psi, xs)
    dens = np.abs(values) ** 2
    write_csv(cfg.out, ("x", "re_psi", "im_psi", "abs2_psi"),
              ((float(x), float(v.real), float(v.imag), float(d)) for x, v, d in zip(xs, values, dens)))
    body = {
        "nmax": psi.nmax,
        "tail_bound": psi.tail_bound,
        "t": cfg.t,
        "grid_norm": float(np.trapezoid(dens, xs)),
        "mean_x": fock.expectations(psi).mean_x,
    }
    if cfg.json:
        write_json(cfg.json, _report(cfg, body))
    _summary(f"wavefunction f={f.name} alpha={format_complex(cfg.alpha)} t={cfg.t:g}: "
             f"grid norm={body['grid_norm']:.10f}")


RUNNERS = {
    "evolve": run_evolve,
    "classical": run_classical,
    "dephase": run_dephase,
    "nogo": run_nogo,
    "identity-check": run_identity_check,
    "wavefunction": run_wavefunction,
    "revival": run_revival,
}


def run(cfg: RunConfig) -> int:
    """Execute one experiment; returns the process exit status."""
    try:
        cfg.validate()
        f = resolve(cfg.f)
        for path in (cfg.out, cfg.json, cfg.dump_residuals):
            check_writable(path)
        RUNNERS[cfg.command](cfg, f)
    except (ConfigurationError, TruncationError, SingularFrequencyError,
            ExprSyntaxError, UnknownIdentifierError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ExprDomainError, FloatingPointError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OscfunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    p = argparse.ArgumentParser(
        prog="oscfun",
        description="Classical and quantum dynamics of H = f(H0) for the harmonic oscillator.",
        argument_default=S,
    )
    # choices are checked by RunConfig; argparse rejects its own SUPPRESS default here
    p.add_argument("command", nargs="?", default=None, help="one of: " + ", ".join(COMMANDS))
    p.add_argument("--config", help="JSON file with default settings (flags override it)")
    p.add_argument("--f", help="id | er | kerr:chi=<real> | expression in x")
    p.add_argument("--alpha", help="coherent label (annihilation eigenvalue), e.g. 1+0.5i")
    p.add_argument("--z0", help="classical phase point x+ip")
    p.add_argument("--tmax", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--t", type=float, help="evaluation time for wavefunction")
    p.add_argument("--nmax", type=int, help="Fock truncation, or level range for nogo")
    p.add_argument("--force-nmax", action="store_true", help="accept nmax below the truncation rule")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--json", help="JSON report path")
    p.add_argument("--energy-convention", choices=evolution.ENERGY_CONVENTIONS)
    p.add_argument("--radii", help="comma-separated radii for nogo")
    p.add_argument("--kmax", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--floor", type=float)
    p.add_argument("--dump-residuals", help="CSV path for every residual sample")
    p.add_argument("--R", type=float, help="integration radius for identity-check")
    p.add_argument("--R2", type=float, help="squared integration radius for identity-check")
    p.add_argument("--nr", type=int)
    p.add_argument("--ntheta", type=int)
    p.add_argument("--radial", choices=("gauss", "midpoint"))
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--nx", type=int)
    p.add_argument("--threshold", type=float)
    return p


def config_from_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    values = {}
    path = ns.pop("config", None)
    if ns.get("command") is None:
        ns.pop("command", None)
    if path is not None:
        values.update(read_config_file(path))
    values.update(ns)
    return RunConfig.from_mapping(values)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
