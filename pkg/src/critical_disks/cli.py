"""Command-line front end: TOML config in, deterministic CSV/OBJ/JSON bundle out.

Exit codes: 0 success, 1 invalid config, 2 solver failure or infeasible
configuration, 3 regime violation. Diagnostics on a terminal are coloured
unless NO_COLOR is set.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import platform
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
try:
    import tomllib as tomli
except ModuleNotFoundError:  # Python < 3.11
    import tomli

from . import __version__
from .axisym_solver import StopSpec, drift_ok, shoot_geodesic, shoot_nongeodesic, sweep_phi0
from .curve_geometry import circle_condition, solve_circle_curvature
from .el_residuals import cap_criticality
from .energy_models import EnergyParams, curve_density_from_dict, density_from_dict, total_energy
from .errors import CriticalDisksError, InfeasibleCap, NoConvergence, NoRoot, RegimeViolation
from .special_solutions import WeingartenSpec, build_cap, weingarten_profile
from .surface_geometry import (
    hemisphere_profile,
    mesh_to_obj,
    planar_disk_profile,
    profile_from_csv,
    profile_to_csv,
    revolve,
    sphere_cap_profile,
)

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_CONFIG, EXIT_FAILURE, EXIT_REGIME = 0, 1, 2, 3

log = logging.getLogger("critical_disks")


class ConfigError(Exception):
    pass


def _use_color(stream) -> bool:
    return not os.environ.get("NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()


class _ColorFormatter(logging.Formatter):
    def __init__(self, fmt: str, color: bool):
        super().__init__(fmt)
        self.color = color

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        if self.color and record.levelno >= logging.WARNING:
            return f"\033[31m{text}\033[0m"
        return text


def _error(msg: str) -> None:
    print(f"\033[31m{msg}\033[0m" if _use_color(sys.stderr) else msg, file=sys.stderr)


def load_schema(name: str) -> dict:
    return json.loads(resources.files("critical_disks").joinpath("schemas", name).read_text())


def _locate(text: str, path: list) -> tuple[int, int]:
    """Line and column (1-based) of the key at ``path`` in TOML source, best effort."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return 1, 1
    table, key = keys[:-1], keys[-1]
    current: list[str] = []
    fallback = (1, 1)
    for n, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("[") and not stripped.startswith("[["):
            current = [k.strip() for k in stripped.strip("[]").split(".")]
            if current == keys:
                fallback = (n, line.index("[") + 1)
            continue
        lhs = stripped.split("=", 1)[0].strip()
        if "=" in stripped and lhs == key and current == table:
            return n, line.index(key) + 1
    return fallback


def load_config(path: Path) -> dict:
    text = path.read_text()
    try:
        cfg = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    validator = jsonschema.Draft202012Validator(load_schema("config.schema.json"))
    errors = sorted(validator.iter_errors(cfg), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        lines = []
        for e in errors:
            loc = list(e.absolute_path)
            if e.validator == "additionalProperties":
                extra = [k for k in e.instance if k not in e.schema.get("properties", {})]
                loc = loc + extra[:1]
            elif e.validator == "required":
                pass
            line, col = _locate(text, loc)
            field = ".".join(map(str, loc)) or "<root>"
            lines.append(f"{path}:{line}:{col}: {field}: {e.message}")
        raise ConfigError("\n".join(lines))
    return cfg


# output helpers -------------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / name, "w", newline="\n") as fh:
        fh.write(text)


def _report(command: str, status: str, cfg: dict, **fields) -> dict:
    rep = {"schema_version": SCHEMA_VERSION, "command": command, "status": status, "config": cfg}
    rep.update(fields)
    rep = _clean(rep)
    jsonschema.validate(rep, load_schema("report.schema.json"))
    return rep


def _bundle(out: Path, profile, n_t: int, n_s: int | None) -> None:
    _write(out, "profile.csv", profile_to_csv(profile))
    _write(out, "surface.obj", mesh_to_obj(revolve(profile, n_t, n_s)))


def _mesh_opts(cfg: dict) -> tuple[int, int | None]:
    o = cfg.get("output", {})
    return int(o.get("n_t", 64)), o.get("n_s")


# commands ---------------------------------------------------------------------

def cmd_axisym_solve(cfg: dict, out: Path, jobs: int = 1) -> int:
    density = density_from_dict(cfg["density"])
    Lam = curve_density_from_dict(cfg["boundary_density"])
    s = cfg.get("solver", {})
    kw = {k: s[k] for k in ("tol", "drift_tol", "ftol", "max_iter", "L_max") if k in s}
    shoot = shoot_geodesic if cfg["regime"] == "geodesic" else shoot_nongeodesic
    extra = {}
    if "sweep" in cfg:
        sw = cfg["sweep"]
        grid = np.linspace(sw["phi0_min"], sw["phi0_max"], int(sw.get("n", 64)))
        stop = StopSpec(max_length=sw.get("max_length", 4.0), h_max=sw.get("h_max", 50.0), strict=False)
        dtol = sw.get("drift_tol", 1e-9)
        trajs = sweep_phi0(density, grid, stop, tol=sw.get("tol", 1e-11), drift_tol=dtol, jobs=jobs)
        rows = ["phi0,status,L,max_abs_drift,drift_ok,n_events"]
        for a, t in zip(grid, trajs):
            rows.append(f"{a:.17g},{t.status},{t.L:.17g},{float(np.max(np.abs(t.drift))):.17g},"
                        f"{int(drift_ok(t, dtol))},{len(t.events)}")
        _write(out, "sweep.csv", "\n".join(rows) + "\n")
        extra["sweep"] = {"n": len(grid), "all_drift_ok": all(drift_ok(t, dtol) for t in trajs)}
    try:
        res = shoot(density, Lam, cfg["guess"], **kw)
    except NoConvergence as exc:
        _write(out, "report.json", dump_json(_report("axisym-solve", "no_convergence", cfg, message=str(exc),
                                                     trace=getattr(exc, "trace", None), **extra)))
        log.error("no convergence: %s", exc)
        return EXIT_FAILURE
    except RegimeViolation as exc:
        _write(out, "report.json", dump_json(_report("axisym-solve", "regime_violation", cfg, message=str(exc),
                                                     **extra)))
        log.error("regime violation: %s", exc)
        return EXIT_REGIME
    _bundle(out, res.profile, *_mesh_opts(cfg))
    rep = _report("axisym-solve", "ok", cfg, shooting=res.as_dict(), criticality=res.report.to_json_dict(), **extra)
    _write(out, "report.json", dump_json(rep))
    return EXIT_OK


def cmd_cap_check(cfg: dict, out: Path, jobs: int = 1) -> int:
    Lam = curve_density_from_dict(cfg["boundary_density"])
    p, sigma, c0, beta = cfg["p"], cfg["sigma"], cfg["c0"], cfg["beta"]
    try:
        cap = build_cap(p, sigma, c0, Lam, beta, H_o=cfg.get("H_o"), kappa_o=cfg.get("kappa_o"),
                        larger=cfg.get("larger", False))
    except (InfeasibleCap, NoRoot) as exc:
        cls = None
        if "kappa_o" in cfg:
            cls = cap_criticality(p, cfg["kappa_o"], sigma, c0, cfg.get("H_o"), raise_infeasible=False).as_dict()
        _write(out, "report.json", dump_json(_report("cap-check", "infeasible", cfg, message=str(exc),
                                                     cap=cls)))
        log.error("infeasible cap: %s", exc)
        return EXIT_FAILURE
    _bundle(out, cap.profile, *_mesh_opts(cfg))
    cls = cap.spec.classification
    rep = _report("cap-check", "ok", cfg, cap=cls.as_dict(), c0_forced=cls.c0_forced,
                  criticality=cap.report.to_json_dict())
    _write(out, "report.json", dump_json(rep))
    return EXIT_OK


def cmd_weingarten(cfg: dict, out: Path, jobs: int = 1) -> int:
    w = weingarten_profile(WeingartenSpec(cfg["c0"], cfg["d"]), n=int(cfg.get("n", 400)))
    _bundle(out, w.profile, *_mesh_opts(cfg))
    gap = np.abs(w.K_minus_2cH)
    stats = {"max": float(gap.max()), "mean": float(gap.mean()), "rms": float(np.sqrt(np.mean(gap**2)))}
    rep = _report("weingarten", "ok", cfg, weingarten=w.report, K_minus_2c0H=stats,
                  regularity=w.report["regularity"])
    _write(out, "report.json", dump_json(rep))
    return EXIT_OK


def cmd_elastica_circle(cfg: dict, out: Path, jobs: int = 1) -> int:
    Lam = curve_density_from_dict(cfg["boundary_density"])
    args = (Lam, cfg["beta"], cfg.get("sigma", 0.0), cfg.get("sign", 0))
    kw = {"P0": cfg.get("P0", 0.0)}
    if "interval" in cfg:
        kw["interval"] = tuple(cfg["interval"])
    if "n_scan" in cfg:
        kw["n_scan"] = int(cfg["n_scan"])
    try:
        roots = solve_circle_curvature(*args, **kw)
    except NoRoot as exc:
        _write(out, "report.json", dump_json(_report("elastica-circle", "error", cfg, message=str(exc), roots=[])))
        log.error("no root: %s", exc)
        return EXIT_FAILURE
    f = circle_condition(*args, P0=kw["P0"])[0]
    residuals = [f(k) for k in roots]
    rep = _report("elastica-circle", "ok", cfg, roots=list(roots), residuals=residuals)
    _write(out, "report.json", dump_json(rep))
    return EXIT_OK


def _surface(spec: dict, base: Path):
    kind = spec["kind"]
    if kind == "hemisphere":
        return hemisphere_profile(spec.get("R", 1.0))
    if kind == "planar_disk":
        return planar_disk_profile(spec.get("R", 1.0))
    if kind == "sphere_cap":
        return sphere_cap_profile(spec["H0"], spec["L"])
    return profile_from_csv((base / spec["path"]).read_text())


def cmd_energy_report(cfg: dict, out: Path, jobs: int = 1, base: Path = Path(".")) -> int:
    params = EnergyParams(eta=cfg.get("eta", 0.0), varpi=cfg.get("varpi", 0.0), beta=cfg.get("beta", 0.0),
                          density=density_from_dict(cfg["density"]),
                          boundary_density=curve_density_from_dict(cfg["boundary_density"]))
    profile = _surface(cfg["surface"], base)
    e = total_energy(profile, params, tol=cfg.get("tol", 1e-9))
    rep = _report("energy-report", "ok", cfg, energy=e.as_dict(), L=profile.L)
    _write(out, "report.json", dump_json(rep))
    return EXIT_OK


COMMANDS = {
    "axisym-solve": cmd_axisym_solve,
    "cap-check": cmd_cap_check,
    "weingarten": cmd_weingarten,
    "elastica-circle": cmd_elastica_circle,
    "energy-report": cmd_energy_report,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="critical-disks", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version",
                    version=f"critical-disks {__version__} (config schema {SCHEMA_VERSION})")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", type=Path)
        sp.add_argument("--out", type=Path, default=Path("out"))
        sp.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_ColorFormatter("%(levelname)s %(message)s", _use_color(sys.stderr)))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO)
    log.propagate = False
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        _error(f"config error: {exc}")
        return EXIT_CONFIG
    if cfg["command"] != args.command:
        _error(f"config error: {args.config}: command is '{cfg['command']}', expected '{args.command}'")
        return EXIT_CONFIG
    t0 = time.perf_counter()
    fn = COMMANDS[args.command]
    kw = {"base": args.config.parent} if args.command == "energy-report" else {}
    try:
        code = fn(cfg, args.out, args.jobs, **kw)
    except RegimeViolation as exc:
        log.error("regime violation: %s", exc)
        code = EXIT_REGIME
    except (CriticalDisksError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        code = EXIT_FAILURE
    meta = [
        f"command = {args.command}",
        f"config = {args.config}",
        f"config_sha256 = {hashlib.sha256(args.config.read_bytes()).hexdigest()}",
        f"exit_code = {code}",
        f"jobs = {args.jobs}",
        f"package_version = {__version__}",
        f"python = {platform.python_version()}",
        f"numpy = {np.__version__}",
        f"wall_seconds = {time.perf_counter() - t0:.3f}",
    ]
    _write(args.out, "run-metadata.txt", "\n".join(meta) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
