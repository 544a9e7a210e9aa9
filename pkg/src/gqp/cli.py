"""Batch driver: ``gqp {solve,verify,converge,oracle} --config run.json``.

Exit codes: 0 success, 1 configuration error, 2 integration blow-up,
3 a hard estimate check failed (growth bound, Gronwall, dissipation).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import io
from .assembly import GrowthBoundViolation, growth_bound, verify_growth
from .basis import SineBasis
from .estimates import (
    bv_report,
    dissipation_violation,
    energy_report,
    residual_series,
    time_series,
)
from .integrator import IntegrationError, StepSizeError, integrate, stability_ceiling
from .oracle import OracleError, convergence_study, fd_reference_solve, fd_self_convergence
from .problem import ConfigError, ProblemSpec, RegistryError, validate_hypotheses
from .signum import exotic_limit_check, mvt_decay_probe, sgn_family_sup, sgn_probe

log = logging.getLogger("gqp")

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_CHECK = 0, 1, 2, 3

_SECTIONS = {
    "problem": None,
    "solver": {"m", "dt", "n_outputs"},
    "verify": {
        "energy", "bv", "sgn", "residual", "n_samples", "growth_atol",
        "dissipation_rtol", "alpha_scale",
    },
    "converge": {"m_list", "fd_cells"},
    "output": {"dir", "formats"},
}


@dataclass
class RunConfig:
    problem: ProblemSpec
    m: int = 16
    dt: float | str = "auto"
    n_outputs: int = 200
    verify: dict = field(default_factory=dict)
    m_list: list[int] = field(default_factory=lambda: [4, 8, 16, 32])
    fd_cells: int = 100
    out_dir: Path = Path("gqp_out")
    formats: tuple[str, ...] = ("csv", "json")
    raw: dict = field(default_factory=dict)

    def verify_opt(self, key: str, default):
        return self.verify.get(key, default)

    def resolve_dt(self, m: int | None = None) -> float:
        """Numeric dt, checked against the stability ceiling of the m-mode run."""
        ceiling = stability_ceiling(self.problem, m or self.m)
        if self.dt == "auto":
            return 0.5 * ceiling
        if self.dt > ceiling:
            raise StepSizeError(f"dt={self.dt:.6g} exceeds the stability ceiling {ceiling:.6g}")
        return float(self.dt)


def parse_config(data: Mapping[str, Any]) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    for key in data:
        if key not in _SECTIONS:
            raise ConfigError(f"unknown config key {key!r}")
    if "problem" not in data:
        raise ConfigError("missing config key 'problem'")
    for section, allowed in _SECTIONS.items():
        if allowed is None or section not in data:
            continue
        if not isinstance(data[section], Mapping):
            raise ConfigError(f"config key {section!r} must be an object")
        for key in data[section]:
            if key not in allowed:
                raise ConfigError(f"unknown config key {section}.{key!r}")
    cfg = RunConfig(problem=ProblemSpec.from_dict(data["problem"]), raw=dict(data))
    solver = data.get("solver", {})
    try:
        cfg.m = int(solver.get("m", cfg.m))
        dt = solver.get("dt", "auto")
        cfg.dt = dt if dt == "auto" else float(dt)
        cfg.n_outputs = int(solver.get("n_outputs", cfg.n_outputs))
        conv = data.get("converge", {})
        cfg.m_list = [int(m) for m in conv.get("m_list", cfg.m_list)]
        cfg.fd_cells = int(conv.get("fd_cells", cfg.fd_cells))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver/converge value: {exc}") from None
    if cfg.m < 1:
        raise ConfigError("config key solver.'m' must be >= 1")
    if cfg.n_outputs < 1:
        raise ConfigError("config key solver.'n_outputs' must be >= 1")
    cfg.verify = dict(data.get("verify", {}))
    out = data.get("output", {})
    cfg.out_dir = Path(out.get("dir", cfg.out_dir))
    formats = tuple(out.get("formats", cfg.formats))
    for f in formats:
        if f not in ("csv", "json"):
            raise ConfigError(f"unknown output format {f!r} in output.'formats'")
    cfg.formats = formats
    return cfg


def load_config(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(data)


class _Writer:
    """Collects output paths and refuses to clobber existing files without --force."""

    def __init__(self, out_dir: Path, formats, force: bool):
        self.dir = out_dir
        self.formats = set(formats)
        self.force = force

    def path(self, name: str) -> Path | None:
        suffix = name.rsplit(".", 1)[-1]
        if suffix in ("csv", "json") and suffix not in self.formats:
            return None
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / name
        if p.exists() and not self.force:
            raise ConfigError(f"output file {p} exists; pass --force to overwrite")
        return p

    def check(self, names) -> None:
        for n in names:
            self.path(n)


def _field_grid(dim: int) -> np.ndarray:
    x = np.linspace(0.0, 1.0, 257)
    if dim == 1:
        return x
    X, Y = np.meshgrid(x, x, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def cmd_solve(cfg: RunConfig, writer: _Writer, seed: int = 0) -> int:
    names = ["trajectory.csv", "final_field.csv", "manifest.json"]
    writer.check(names)
    spec = cfg.problem
    report = validate_hypotheses(spec)
    dt = cfg.resolve_dt()
    start = time.perf_counter()
    traj = integrate(spec, cfg.m, dt, cfg.n_outputs, report=report)
    wall = time.perf_counter() - start
    if p := writer.path("trajectory.csv"):
        io.write_trajectory(p, traj)
    if p := writer.path("final_field.csv"):
        pts = _field_grid(spec.dim)
        io.write_field(p, pts, traj.C[-1] @ SineBasis(spec.dim, cfg.m).values(pts), spec.dim)
    if p := writer.path("manifest.json"):
        io.write_json(
            p,
            {
                "config": cfg.raw,
                "m": cfg.m,
                "dt": dt,
                "dt_internal": traj.dt_internal,
                "alpha": growth_bound(cfg.m, spec, report).alpha,
                "ceiling": stability_ceiling(spec, cfg.m, report),
                "hypotheses": report.to_dict(),
            },
        )
    _write_timing(writer, wall)
    log.info("solve: m=%d dt=%.3g wall=%.2fs", cfg.m, traj.dt_internal, wall)
    return EXIT_OK


def _write_timing(writer: _Writer, wall: float) -> None:
    # wall time lives apart from the deterministic outputs
    p = writer.dir / "timing.json"
    writer.dir.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps({"wall_time_s": wall}) + "\n")


def cmd_verify(cfg: RunConfig, writer: _Writer, seed: int = 0) -> int:
    names = ["verify.json", "energy.json", "bv.json", "sgn.json", "timeseries.csv"]
    writer.check(names)
    spec = cfg.problem
    report = validate_hypotheses(spec)
    dt = cfg.resolve_dt()
    start = time.perf_counter()
    traj = integrate(spec, cfg.m, dt, cfg.n_outputs, report=report)

    failures = []
    bound = growth_bound(cfg.m, spec, report)
    scale = float(cfg.verify_opt("alpha_scale", 1.0))
    if scale != 1.0:
        bound = type(bound)(bound.m, bound.M * scale, bound.alpha * scale)
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((int(cfg.verify_opt("n_samples", 100)), cfg.m))
    try:
        growth = verify_growth(samples, spec, bound, atol=float(cfg.verify_opt("growth_atol", 1e-8)))
        growth["ok"] = True
    except GrowthBoundViolation as exc:
        growth = {"ok": False, "message": str(exc), "C": exc.C.tolist(), "alpha": bound.alpha}
        failures.append("growth_bound")

    summary: dict[str, Any] = {"hypotheses": report.to_dict(), "growth": growth}
    if not report.passed:
        failures.append("hypotheses")

    if cfg.verify_opt("energy", True):
        energy = energy_report(traj, report)
        if not energy.gronwall_ok:
            failures.append("gronwall")
        if p := writer.path("energy.json"):
            io.write_json(p, energy.to_dict())
    diss = dissipation_violation(traj)
    summary["dissipation_violation"] = diss
    # norm decay is guaranteed for pure diffusion; with flux it is reported only
    if spec.f.id == "zero" and diss > float(cfg.verify_opt("dissipation_rtol", 1e-10)):
        failures.append("dissipation")

    diagnostics: dict[str, Any] = {}
    if cfg.verify_opt("bv", True):
        bv = bv_report(traj, report)
        diagnostics["monotone_violation"] = bv.monotone_violation
        diagnostics["initial_bound_holds"] = bv.initial_dt_l1 <= bv.initial_bound
        if p := writer.path("bv.json"):
            io.write_json(p, bv.to_dict())
    if cfg.verify_opt("residual", True):
        res = residual_series(traj)
        diagnostics["strong_residual_max"] = float(np.max(res))
        diagnostics["strong_residual_final"] = float(res[-1])
    summary["diagnostics"] = diagnostics

    if cfg.verify_opt("sgn", True):
        probe = sgn_probe(10, np.linspace(-2.0, 2.0, 41))
        ys = [s * 10.0**k for k in range(-2, 3) for s in (1, -1)]
        sgn = {
            "probe": probe.to_dict(),
            "family_sup": sgn_family_sup(),
            "limit_checks": [vars(exotic_limit_check(y, 1e-6)) for y in ys],
            "mvt_decay": mvt_decay_probe([10, 20, 40, 80], [0.0, 0.01, 0.1, 1.0]),
        }
        if p := writer.path("sgn.json"):
            io.write_json(p, sgn)
    if p := writer.path("timeseries.csv"):
        io.write_time_series(p, time_series(traj))

    summary["failures"] = failures
    summary["ok"] = not failures
    if p := writer.path("verify.json"):
        io.write_json(p, summary)
    _write_timing(writer, time.perf_counter() - start)
    if failures:
        log.error("verify: hard checks failed: %s", ", ".join(failures))
        return EXIT_CHECK
    return EXIT_OK


def _converge(cfg: RunConfig, writer: _Writer, with_fd: bool) -> int:
    names = ["convergence.csv", "convergence.json"]
    if with_fd:
        names += ["fd_final.csv", "fd_initial.csv", "oracle.json"]
    writer.check(names)
    spec = cfg.problem
    if with_fd and spec.dim != 1:
        raise ConfigError("fd oracle is 1D-only")
    dt = None if cfg.dt == "auto" else cfg.resolve_dt(max(cfg.m_list))
    start = time.perf_counter()
    table = convergence_study(spec, cfg.m_list, dt, cfg.n_outputs, fd_cells=cfg.fd_cells)
    if p := writer.path("convergence.csv"):
        io.write_convergence(p, table)
    if p := writer.path("convergence.json"):
        io.write_json(p, table.to_dict())
    if with_fd:
        fields = fd_reference_solve(spec, cfg.fd_cells, n_outputs=cfg.n_outputs)
        if p := writer.path("fd_initial.csv"):
            io.write_grid_field(p, fields[0])
        if p := writer.path("fd_final.csv"):
            io.write_grid_field(p, fields[-1])
        cells = [cfg.fd_cells // 2, cfg.fd_cells, 2 * cfg.fd_cells]
        sc = fd_self_convergence(spec, cells, cfg.n_outputs, solutions={cfg.fd_cells: fields})
        if p := writer.path("oracle.json"):
            io.write_json(
                p,
                {
                    "fd_cells": cfg.fd_cells,
                    "fd_distance": table.fd_distance,
                    "fd_self_error": table.fd_self_error,
                    "fd_halving": {"n_cells": sc.n_cells, "errors": sc.errors, "ratios": sc.ratios},
                },
            )
    _write_timing(writer, time.perf_counter() - start)
    return EXIT_OK


def cmd_converge(cfg: RunConfig, writer: _Writer, seed: int = 0) -> int:
    return _converge(cfg, writer, with_fd=False)


def cmd_oracle(cfg: RunConfig, writer: _Writer, seed: int = 0) -> int:
    return _converge(cfg, writer, with_fd=True)


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "converge": cmd_converge, "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gqp", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="output directory (overrides output.dir)")
    parser.add_argument("--force", action="store_true", help="overwrite existing outputs")
    parser.add_argument("--seed", type=int, default=0, help="seed for random coefficient samples")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg.out_dir = Path(args.out)
        writer = _Writer(cfg.out_dir, cfg.formats, args.force)
        return COMMANDS[args.command](cfg, writer, seed=args.seed)
    except (ConfigError, RegistryError, StepSizeError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
