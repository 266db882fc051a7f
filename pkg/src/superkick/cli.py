"""Command-line front end: ``superkick {avg,scan,heatmap,crescent,selftest}``.

Parameters come from built-in defaults, then an optional ``key = value``
config file, then flags (flags win).  Every CSV starts with a version line
and the effective configuration echoed as comments.

Exit codes: 0 success, 1 selftest failure, 2 validation error, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .exceptions import DomainError, ParaxialityWarning
from .kinematics import BesselBeam, GaussianPacket, crescent_boundary
from .observables import average_transverse_momentum, heatmap_i_squared, scan_kick_vs_b
from .selftest import run_selftest

CSV_VERSION = "# superkick-csv v1"
KICK_COLUMNS = ["m", "kappa", "sigma", "b", "kb", "Px", "Py", "Pt_over_kappa", "semiclassical", "converged"]

EXIT_OK, EXIT_SELFTEST, EXIT_VALIDATION, EXIT_CONVERGENCE = 0, 1, 2, 3


class ValidationError(Exception):
    pass


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    parts = [p for p in str(text).replace(" ", "").split(",") if p]
    return [float(p) for p in parts]


def _opt_float(text):
    if text is None or str(text).lower() in ("", "none"):
        return None
    return float(text)


# name -> (type, help); defaults are per command
PARAMS = {
    "m": (int, "winding number of the twisted beam"),
    "kappa": (float, "cone momentum of the twisted beam"),
    "sigma": (float, "waist of the Gaussian packet"),
    "b": (float, "impact parameter magnitude"),
    "phi_b": (float, "azimuth of the impact parameter [rad]"),
    "p1z": (float, "longitudinal momentum of the twisted beam (> 0)"),
    "p2z": (float, "longitudinal momentum of the packet (< 0)"),
    "mass": (float, "packet particle mass"),
    "tol": (float, "relative quadrature tolerance"),
    "sigmas": (_floats, "comma-separated packet waists"),
    "b_min": (float, "smallest impact parameter"),
    "b_max": (float, "largest impact parameter"),
    "b_count": (int, "number of impact parameters"),
    "b_spacing": (str, "log or linear"),
    "b_grid": (_floats, "explicit comma-separated impact parameters (overrides b_min/b_max/b_count)"),
    "phi_p": (float, "azimuth of P_perp for the heatmap [rad]"),
    "pt_min": (float, "smallest |P_perp|"),
    "pt_max": (float, "largest |P_perp|"),
    "pt_count": (int, "number of |P_perp| cells"),
    "dpz_min": (float, "smallest dPz"),
    "dpz_max": (float, "largest dPz"),
    "dpz_count": (int, "number of dPz cells"),
    "ceiling": (_opt_float, "clamp |I|^2 at this value (none = no clamp)"),
    "points": (int, "points per crescent arc"),
    "unit": (str, "kappa (lengths in 1/kappa, momenta in kappa) or raw"),
    "threads": (int, "worker threads (SUPERKICK_THREADS overrides)"),
    "output": (str, "output file (default: standard output)"),
    "fixtures": (str, "alternative Bessel fixture file"),
}

_BEAM = {"m": 5, "kappa": 1.0, "p1z": 1000.0, "p2z": -1000.0, "mass": 0.0, "unit": "kappa"}
DEFAULTS = {
    "avg": {**_BEAM, "sigma": 0.04, "b": 0.5, "phi_b": 0.0, "tol": 1e-6, "output": None},
    "scan": {**_BEAM, "sigmas": [0.04, 0.1, 0.2, 0.3, 0.5], "b_min": 0.04, "b_max": 5.0,
             "b_count": 120, "b_spacing": "log", "b_grid": None, "phi_b": 0.0, "tol": 1e-6,
             "threads": None, "output": None},
    "heatmap": {"m": 2, "kappa": 1.0, "sigma": 0.5, "b": 0.1, "phi_b": 0.0, "p1z": 10.0,
                "p2z": -10.0, "mass": 0.0, "phi_p": 0.5 * math.pi, "pt_min": 0.0, "pt_max": 4.0,
                "pt_count": 161, "dpz_min": 0.0, "dpz_max": 1.5, "dpz_count": 151,
                "ceiling": None, "unit": "kappa", "output": None},
    "crescent": {"kappa": 1.0, "p2z": -10.0, "points": 400, "unit": "kappa", "output": None},
    "selftest": {"fixtures": None},
}
LENGTHS = {"sigma", "b", "sigmas", "b_min", "b_max", "b_grid"}
MOMENTA = {"p1z", "p2z", "mass", "pt_min", "pt_max", "dpz_min", "dpz_max"}
NOT_ECHOED = {"threads", "output", "fixtures"}


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def effective_config(command: str, config_file: dict, flags: dict) -> dict:
    allowed = DEFAULTS[command]
    cfg = dict(allowed)
    file_cfg = dict(config_file)
    if "command" in file_cfg:
        if file_cfg.pop("command") != command:
            raise ValidationError(f"config file is for a different command than {command!r}")
    for key, value in file_cfg.items():
        if key not in allowed:
            raise ValidationError(f"unknown config key {key!r} for {command}")
        try:
            cfg[key] = PARAMS[key][0](value)
        except ValueError as exc:
            raise ValidationError(f"bad value for {key}: {value!r}") from exc
    cfg.update(flags)
    if "unit" in cfg and cfg["unit"] not in ("kappa", "raw"):
        raise ValidationError(f"unit must be 'kappa' or 'raw', got {cfg['unit']!r}")
    return cfg


def physical(cfg: dict) -> dict:
    """Convert kappa-normalized inputs to raw units."""
    if cfg.get("unit", "raw") == "raw":
        return dict(cfg)
    k = cfg["kappa"]
    if not (math.isfinite(k) and k > 0):
        raise DomainError(f"kappa must be > 0 to set the unit scale, got {k}")
    out = dict(cfg)
    for key in LENGTHS & cfg.keys():
        v = cfg[key]
        if v is not None:
            out[key] = [x / k for x in v] if isinstance(v, list) else v / k
    for key in MOMENTA & cfg.keys():
        out[key] = cfg[key] * k
    return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, list):
        return ",".join(_fmt(x) for x in v)
    if v is None:
        return "none"
    if isinstance(v, str):
        return v
    return format(float(v), ".12g")


def _header(command: str, cfg: dict) -> list[str]:
    lines = [CSV_VERSION, f"# command = {command}"]
    for key in sorted(cfg):
        if key not in NOT_ECHOED:
            lines.append(f"# {key} = {_fmt(cfg[key])}")
    return lines


def _emit(lines: list[str], output) -> None:
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kick_row(m, kappa, sigma, b, Px, Py, semi, converged) -> str:
    pt = math.hypot(Px, Py) / kappa
    return ",".join(_fmt(v) for v in (m, kappa, sigma, b, kappa * b, Px, Py, pt, semi, bool(converged)))


def run_avg(cfg: dict) -> int:
    p = physical(cfg)
    beam = BesselBeam(p["p1z"], p["kappa"], p["m"])
    bvec = (p["b"] * math.cos(p["phi_b"]), p["b"] * math.sin(p["phi_b"]))
    if p["b"] < 0:
        raise DomainError(f"b must be >= 0, got {p['b']}")
    packet = GaussianPacket(p["p2z"], p["sigma"], bvec, p["mass"])
    res = average_transverse_momentum(beam, packet, p["tol"])
    lines = _header("avg", cfg) + [",".join(KICK_COLUMNS)]
    lines.append(_kick_row(beam.m, beam.kappa, packet.sigma, packet.b_mag, *res.P_avg,
                           res.P_semiclassical, res.converged))
    _emit(lines, cfg.get("output"))
    return EXIT_OK if res.converged else EXIT_CONVERGENCE


def b_grid_from(p: dict) -> list[float]:
    if p.get("b_grid"):
        grid = list(p["b_grid"])
    else:
        n = p["b_count"]
        if n < 1:
            raise DomainError("b grid is empty")
        if p["b_spacing"] == "log":
            if not (0 < p["b_min"] <= p["b_max"]):
                raise DomainError("log spacing needs 0 < b_min <= b_max")
            grid = list(np.geomspace(p["b_min"], p["b_max"], n))
        elif p["b_spacing"] == "linear":
            if not (0 <= p["b_min"] <= p["b_max"]):
                raise DomainError("linear spacing needs 0 <= b_min <= b_max")
            grid = list(np.linspace(p["b_min"], p["b_max"], n))
        else:
            raise DomainError(f"b_spacing must be log or linear, got {p['b_spacing']!r}")
    if not grid:
        raise DomainError("b grid is empty")
    if any(not math.isfinite(b) or b < 0 for b in grid):
        raise DomainError("impact parameters must be finite and >= 0")
    return grid


def run_scan(cfg: dict) -> int:
    p = physical(cfg)
    beam = BesselBeam(p["p1z"], p["kappa"], p["m"])
    sigmas = p["sigmas"]
    if not sigmas:
        raise DomainError("sigma list is empty")
    grid = b_grid_from(p)
    direction = (math.cos(p["phi_b"]), math.sin(p["phi_b"]))
    for s in sigmas:  # validate every point before any work starts
        GaussianPacket(p["p2z"], s, (grid[-1] * direction[0], grid[-1] * direction[1]), p["mass"])
    template = GaussianPacket(p["p2z"], max(sigmas), direction, p["mass"])
    result = scan_kick_vs_b(beam, template, sigmas, grid, p["tol"], cfg.get("threads"))
    lines = _header("scan", cfg) + [",".join(KICK_COLUMNS)]
    lines += [_kick_row(r.m, r.kappa, r.sigma, r.b, r.Px, r.Py, r.P_semiclassical, r.converged)
              for r in result]
    _emit(lines, cfg.get("output"))
    return EXIT_CONVERGENCE if not any(r.converged for r in result) else EXIT_OK


def _axis(lo, hi, n, name):
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"{name} grid must have at least one finite point")
    if n > 1 and not hi > lo:
        raise DomainError(f"{name} grid has zero extent")
    if n == 1 and hi != lo:
        raise DomainError(f"{name} grid with one point needs min == max")
    return np.linspace(lo, hi, n)


def run_heatmap(cfg: dict) -> int:
    p = physical(cfg)
    beam = BesselBeam(p["p1z"], p["kappa"], p["m"])
    packet = GaussianPacket(p["p2z"], p["sigma"],
                            (p["b"] * math.cos(p["phi_b"]), p["b"] * math.sin(p["phi_b"])), p["mass"])
    pt = _axis(p["pt_min"], p["pt_max"], p["pt_count"], "pt")
    dpz = _axis(p["dpz_min"], p["dpz_max"], p["dpz_count"], "dpz")
    if p["pt_count"] * p["dpz_count"] < 2 or pt[0] < 0:
        raise DomainError("heatmap grid has zero area or negative |P_perp|")
    values, boundary = heatmap_i_squared(beam, packet, pt, dpz, p["phi_p"], p["ceiling"])
    lines = _header("heatmap", cfg) + ["Pt,dPz,value,boundary_flag"]
    for i, x in enumerate(pt):
        for j, y in enumerate(dpz):
            lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(values[i, j])},{int(boundary[i, j])}")
    _emit(lines, cfg.get("output"))
    return EXIT_OK


def run_crescent(cfg: dict) -> int:
    p = physical(cfg)
    if not (p["kappa"] > 0 and p["p2z"] < 0 and p["kappa"] < abs(p["p2z"])):
        raise DomainError("crescent needs 0 < kappa < |p2z|")
    rows = crescent_boundary(p["kappa"], abs(p["p2z"]), p["points"])
    lines = _header("crescent", cfg) + ["arc,dPz,Pt"]
    lines += [f"{arc},{_fmt(d)},{_fmt(t)}" for arc, d, t in rows]
    _emit(lines, cfg.get("output"))
    return EXIT_OK


RUNNERS = {"avg": run_avg, "scan": run_scan, "heatmap": run_heatmap, "crescent": run_crescent}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superkick", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command, defaults in DEFAULTS.items():
        sp = sub.add_parser(command)
        if command != "selftest":
            sp.add_argument("--config", default=argparse.SUPPRESS, help="key = value config file")
        for key in defaults:
            typ, text = PARAMS[key]
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=typ,
                            default=argparse.SUPPRESS, help=f"{text} (default: {_fmt(defaults[key])})")
    return parser


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    if command == "selftest":
        return EXIT_OK if run_selftest(args.get("fixtures")) == 0 else EXIT_SELFTEST
    try:
        file_cfg = read_config(args.pop("config")) if "config" in args else {}
        cfg = effective_config(command, file_cfg, args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ParaxialityWarning)
            return RUNNERS[command](cfg)
    except (ValidationError, DomainError, OSError) as exc:
        print(f"superkick {command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
