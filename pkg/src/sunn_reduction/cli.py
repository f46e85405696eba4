"""Command-line entry point.

Four subcommands share one JSON configuration document::

    sunn-reduction verify   --config cfg.json [--out report.json]
    sunn-reduction simulate --config cfg.json --out traj.csv [--method projection|darboux]
    sunn-reduction spectrum --config cfg.json [--out spectrum.json] [--trajectory]
    sunn-reduction scan     --config cfg.json [--out scan.json]

Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
verification check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import __version__
from .dynamics import conserved_spectrum, evolve_darboux, evolve_projection, lax
from .errors import ReductionError
from .model import ModelParams, check_chamber
from .phasespace import angles_of_z, sample_section, torus, z_of_angles
from .verify import REGISTRY, run_suite

__all__ = ["RunConfig", "ConfigError", "load_config", "run_command", "main", "trajectory_csv"]

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

_KEYS = {
    "n", "x", "u", "v", "seed", "samples", "tolerances", "time", "method",
    "initial", "hamiltonian_index", "step", "checks", "scan", "workers",
}


class ConfigError(ValueError):
    """The configuration document is malformed or violates a model constraint."""


@dataclass
class RunConfig:
    """Validated run configuration.

    ``n`` may be a list for ``verify``; the other subcommands use its first
    entry. ``time.steps`` counts intervals, so a trajectory has
    ``steps + 1`` samples on ``[0, t_max]``.
    """

    params: list
    seed: int = 42
    samples: int = 50
    tolerances: dict = field(default_factory=dict)
    t_max: float = 10.0
    steps: int = 100
    method: str = "projection"
    initial: dict | None = None
    hamiltonian_index: int = 1
    step: float | None = None
    checks: list | None = None
    scan: dict | None = None
    workers: int = 1
    raw: dict = field(default_factory=dict)

    @property
    def primary(self) -> ModelParams:
        return self.params[0]

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)

    def initial_point(self) -> np.ndarray:
        """Chart point ``z`` from ``initial``, or a seeded random one."""
        p = self.primary
        if self.initial is None:
            return sample_section(p, np.random.default_rng(self.seed))
        if "z" in self.initial:
            return _complex_pairs(self.initial["z"], p.n)
        phat = check_chamber(p, self.initial["phat"])
        qhat = np.asarray(self.initial["qhat"], dtype=float)
        if qhat.shape != (p.n,):
            raise ConfigError(f"initial.qhat must have {p.n} entries")
        return z_of_angles(p, phat, torus(qhat))


def _complex_pairs(pairs, n: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (n, 2):
        raise ConfigError(f"initial.z must be {n} [re, im] pairs, got shape {arr.shape}")
    z = arr[:, 0] + 1j * arr[:, 1]
    if z[-1] == 0:
        raise ConfigError("initial.z: z_n must be nonzero")
    return z


def _params(raw: dict) -> list:
    ns = raw.get("n", [2, 3])
    ns = ns if isinstance(ns, list) else [ns]
    if not ns:
        raise ConfigError("n must not be empty")
    out = []
    for n in ns:
        if isinstance(n, bool) or not isinstance(n, int):
            raise ConfigError(f"n must be an integer, got {n!r}")
        try:
            out.append(ModelParams(n, float(raw.get("x", 1.0)), float(raw.get("u", 0.3)), float(raw.get("v", 0.5))))
        except ReductionError as exc:
            raise ConfigError(f"invalid parameters: {exc} (need n > 1, x > 0, u + v != 0)") from exc
    return out


def load_config(raw: dict) -> RunConfig:
    """Validate a parsed JSON document and build a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(params=_params(raw), raw=raw)
    cfg.seed = int(raw.get("seed", 42))
    cfg.samples = int(raw.get("samples", 50))
    if cfg.samples < 1:
        raise ConfigError("samples must be positive")
    cfg.tolerances = {str(k): float(v) for k, v in raw.get("tolerances", {}).items()}
    bad = [k for k in cfg.tolerances if k not in REGISTRY]
    if bad:
        raise ConfigError(f"tolerances for unknown checks: {bad}")
    time_cfg = raw.get("time", {})
    cfg.t_max = float(time_cfg.get("t_max", 10.0))
    cfg.steps = int(time_cfg.get("steps", 100))
    if cfg.t_max <= 0 or cfg.steps < 1:
        raise ConfigError("time.t_max must be > 0 and time.steps >= 1")
    cfg.method = raw.get("method", "projection")
    if cfg.method not in ("projection", "darboux"):
        raise ConfigError(f"method must be projection or darboux, got {cfg.method!r}")
    cfg.hamiltonian_index = int(raw.get("hamiltonian_index", 1))
    if cfg.hamiltonian_index == 0:
        raise ConfigError("hamiltonian_index must be a nonzero integer")
    if cfg.method == "darboux" and cfg.hamiltonian_index != 1:
        raise ConfigError("the darboux method integrates H_1 only")
    if "step" in raw:
        cfg.step = float(raw["step"])
        if cfg.step <= 0:
            raise ConfigError("step must be positive")
    init = raw.get("initial")
    if init is not None:
        if not isinstance(init, dict) or not ("z" in init or {"phat", "qhat"} <= set(init)):
            raise ConfigError("initial must hold z, or both phat and qhat")
        cfg.initial = init
    checks = raw.get("checks")
    if checks is not None:
        bad = [c for c in checks if c not in REGISTRY]
        if bad:
            raise ConfigError(f"unknown checks: {bad}")
        cfg.checks = list(checks)
    cfg.scan = raw.get("scan")
    cfg.workers = int(raw.get("workers", 1))
    # surface chamber and section errors before any computation
    try:
        cfg.initial_point()
    except (ReductionError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid initial point: {exc}") from exc
    return cfg


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def trajectory_csv(traj) -> str:
    """CSV text with columns ``t, re_z_*, im_z_*, h_*, H_value``."""
    n = traj.points.shape[1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["t"]
        + [f"re_z_{k}" for k in range(1, n + 1)]
        + [f"im_z_{k}" for k in range(1, n + 1)]
        + [f"h_{k}" for k in range(1, n + 1)]
        + ["H_value"]
    )
    for t, z, h, hv in zip(traj.times, traj.points, traj.conserved, traj.hamiltonian_value):
        w.writerow([_fmt(t)] + [_fmt(a) for a in z.real] + [_fmt(a) for a in z.imag] + [_fmt(a) for a in h] + [_fmt(hv)])
    return buf.getvalue()


def _simulate(cfg: RunConfig):
    p = cfg.primary
    z0 = cfg.initial_point()
    times = cfg.times()
    if cfg.method == "projection":
        return evolve_projection(p, z0, cfg.hamiltonian_index, times)
    phat, phases = angles_of_z(p, z0)
    step = cfg.step if cfg.step is not None else (times[1] - times[0]) / 10
    return evolve_darboux(p, phat, phases, times, step)


def _json_floats(obj):
    """Replace non-finite floats so the report stays valid JSON."""
    if isinstance(obj, float) and not np.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _json_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_floats(v) for v in obj]
    return obj


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(_json_floats(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def cmd_verify(cfg: RunConfig, args) -> int:
    report = run_suite(cfg.params, cfg.seed, cfg.samples, cfg.tolerances, cfg.checks, workers=cfg.workers)
    body = {
        "config": cfg.raw,
        "results": [r.as_dict() for r in report.results],
        "seed": cfg.seed,
        "version": __version__,
    }
    _emit(_dump(body), args.out)
    for r in report.failures():
        print(f"FAIL {r.name} n={r.metadata['params']['n']}: {r.residual:.3e} > {r.tolerance:.1e}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_simulate(cfg: RunConfig, args) -> int:
    if args.out is None:
        raise ConfigError("simulate needs --out for the CSV file")
    if args.method is not None:
        if args.method == "darboux" and cfg.hamiltonian_index != 1:
            raise ConfigError("the darboux method integrates H_1 only")
        cfg.method = args.method
    _emit(trajectory_csv(_simulate(cfg)), args.out)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    p = cfg.primary
    z0 = cfg.initial_point()
    h, eig = conserved_spectrum(lax(p, z0))
    body = {
        "config": cfg.raw,
        "initial": {"z": [[float(a.real), float(a.imag)] for a in z0], "h": h.tolist(), "eigenvalues": eig.tolist()},
        "version": __version__,
    }
    if args.trajectory:
        traj = _simulate(cfg)
        body["trajectory"] = {
            "t": traj.times.tolist(),
            "h": traj.conserved.tolist(),
            "eigenvalues": traj.spectrum.tolist(),
            "drift": traj.drift().tolist(),
        }
    _emit(_dump(body), args.out)
    return EXIT_OK


def cmd_scan(cfg: RunConfig, args) -> int:
    grid = cfg.scan or {}
    base = cfg.primary
    axes = {k: [float(a) for a in grid.get(k, [getattr(base, k)])] for k in ("x", "u", "v")}
    checks = cfg.checks or sorted(REGISTRY)
    cells = []
    for x, u, v in product(axes["x"], axes["u"], axes["v"]):
        try:
            cells.append(ModelParams(base.n, x, u, v))
        except ReductionError as exc:
            raise ConfigError(f"scan cell (x={x}, u={u}, v={v}): {exc}") from exc

    def one(p):
        return run_suite([p], cfg.seed, cfg.samples, cfg.tolerances, checks)

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        reports = list(pool.map(one, cells))
    rows = []
    for p, rep in zip(cells, reports):
        rows.append(
            {
                "params": p.as_dict(),
                "passed": rep.passed,
                "results": [{"name": r.name, "residual": r.residual, "passed": r.passed} for r in rep.results],
            }
        )
    body = {"config": cfg.raw, "cells": rows, "seed": cfg.seed, "version": __version__}
    _emit(_dump(body), args.out)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sunn-reduction", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("verify", "run the identity suite and write a JSON report"),
        ("simulate", "integrate a reduced flow and write a CSV trajectory"),
        ("spectrum", "Lax eigenvalues and power traces at the initial point"),
        ("scan", "re-run checks over a grid of (x, u, v)"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True, help="JSON configuration file")
        sp.add_argument("--out", help="output path (stdout if omitted; required for simulate)")
        if name == "simulate":
            sp.add_argument("--method", choices=("projection", "darboux"))
        if name == "spectrum":
            sp.add_argument("--trajectory", action="store_true", help="also report along the trajectory")
    return ap


_COMMANDS = {"verify": cmd_verify, "simulate": cmd_simulate, "spectrum": cmd_spectrum, "scan": cmd_scan}


def run_command(argv=None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        cfg = load_config(raw)
        return _COMMANDS[args.command](cfg, args)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReductionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run_command())
