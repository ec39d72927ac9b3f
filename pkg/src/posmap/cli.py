"""Command-line front end.

Every command takes either ``--config job.json`` or inline flags; inline
flags override values from the config file.  Exit codes: 0 success,
2 invalid configuration, 3 numerical failure (an error JSON object is
written to stderr for both).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import moments, scan
from .errors import NumericalFailure, NonHermitianInput, PosMapError
from .serialization import dumps

COMMANDS = ("eval-state", "scan-state", "eval-channel", "scan-channel", "discriminate", "thresholds")
CHANNEL_FAMILIES = ("depolarizing", "dephasing", "kraus")


class ConfigError(PosMapError, ValueError):
    pass


@dataclass
class JobConfig:
    command: str
    target: dict
    map: dict | None = None
    detectors: list | None = None
    grid: dict | None = None
    n_max: int = moments.DEFAULT_NMAX
    m: int = 2
    r: int = 1
    seed: int = 0
    subsystem: str = "B"
    tol: float = 1e-4
    output: dict = field(default_factory=lambda: {"path": None, "format": None})

    def state_map(self) -> dict:
        return self.map or {"map": "reduction", "r": self.r}

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not isinstance(self.target, dict) or not ({"state", "channel"} & self.target.keys()):
            raise ConfigError("target must name a 'state' or a 'channel'")
        channel_cmd = self.command in ("eval-channel", "scan-channel")
        if channel_cmd and "channel" not in self.target:
            raise ConfigError(f"{self.command} needs a channel target")
        if self.command in ("eval-state", "scan-state", "discriminate") and "state" not in self.target:
            raise ConfigError(f"{self.command} needs a state target")
        if self.m < 1 or self.n_max < 2 * self.m + 1:
            raise ConfigError(f"n_max={self.n_max} must be at least 2m+1={2 * self.m + 1}")
        if self.command.startswith("scan") or self.command == "thresholds":
            if not self.grid:
                raise ConfigError(f"{self.command} needs a grid")
            if self.command.startswith("scan") and int(self.grid.get("steps", 0)) < 2:
                raise ConfigError("scan grids need at least 2 steps")
        fmt = self.output.get("format")
        if fmt not in (None, "csv", "json"):
            raise ConfigError(f"unknown output format {fmt!r}")
        if self.subsystem not in ("A", "B"):
            raise ConfigError("subsystem must be A or B")

    @classmethod
    def from_dict(cls, obj: dict) -> "JobConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


def parse_grid(text: str) -> dict:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"grid must be lo:hi or lo:hi:steps, got {text!r}")
    grid = {"start": float(parts[0]), "stop": float(parts[1])}
    if len(parts) == 3:
        grid["steps"] = int(parts[2])
    return grid


def _inline_target(args, command: str) -> dict | None:
    if args.family is None:
        return None
    family = args.family
    if family in CHANNEL_FAMILIES or command in ("eval-channel", "scan-channel"):
        target = {"channel": family, "d": args.d}
        if args.param is not None:
            target[scan.CHANNEL_PARAM.get(family, "param")] = args.param
        return target
    target = {"state": family, "d": args.d}
    if args.param is not None:
        target["param"] = args.param
    if family == "random_schmidt":
        target["rank"] = args.rank
    return target


def _inline_map(args) -> dict | None:
    if args.map is None:
        return None
    desc = {"map": args.map}
    if args.map == "reduction":
        if args.k is not None:
            desc["k"] = args.k
        else:
            desc["r"] = args.r if args.r is not None else 1
    elif args.map in ("gen_choi", "choi"):
        desc["kk"] = args.kk
    return desc


def build_job(args) -> JobConfig:
    base: dict = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
        base.setdefault("command", args.command)
        if base["command"] != args.command:
            raise ConfigError(f"config is for {base['command']!r}, command line says {args.command!r}")
    base["command"] = args.command
    target = _inline_target(args, args.command)
    if target is not None:
        base["target"] = target
    if "target" not in base:
        raise ConfigError("no target given (use --family or --config)")
    map_desc = _inline_map(args)
    if map_desc is not None:
        base["map"] = map_desc
    overrides = {"detectors": args.detectors.split(",") if args.detectors else None,
                 "grid": parse_grid(args.grid) if args.grid else None,
                 "n_max": args.nmax, "m": args.m, "r": args.r, "seed": args.seed,
                 "subsystem": args.subsystem, "tol": args.tol}
    for key, val in overrides.items():
        if val is not None:
            base[key] = val
    out = dict(base.get("output") or {})
    if args.out is not None:
        out["path"] = args.out
    if args.format is not None:
        out["format"] = args.format
    out.setdefault("path", None)
    out.setdefault("format", None)
    base["output"] = out
    job = JobConfig.from_dict(base)
    job.validate()
    return job


# -- command implementations -----------------------------------------------------

def _reports(ev) -> list:
    return [rep.to_dict() for rep in ev.reports.values()]


def _eval_state(job: JobConfig) -> dict:
    rho, dA, dB = scan.build_state(job.target, seed=job.seed)
    map_ = scan.build_map(job.state_map(), dB if job.subsystem == "B" else dA)
    dets = job.detectors or scan.default_detectors(map_, False)
    ev = scan.evaluate_state(rho, dA, dB, map_, dets, job.m, job.n_max, job.subsystem)
    result = {"command": job.command, "target": job.target, "map": map_.to_dict(), "subsystem": job.subsystem,
              "moments": list(ev.moments.values), "min_eig_S": ev.moments.min_eigenvalue,
              "detH1": ev.det_h1, "detH2": ev.det_h2, "reports": _reports(ev)}
    if dA == dB:
        result["schmidt_number_lower_bound"] = moments.schmidt_number_lower_bound(rho, dA, dB, job.m)
    return result


def _eval_channel(job: JobConfig) -> dict:
    ch = scan.build_channel(job.target)
    dets = job.detectors or scan.default_detectors(None, True)
    ev = scan.evaluate_channel(ch, job.r, dets, job.m, job.n_max)
    return {"command": job.command, "target": ch.to_dict(), "r": job.r, "moments": list(ev.moments.values),
            "min_eig_E": ev.moments.min_eigenvalue, "detH1": ev.det_h1, "detH2": ev.det_h2,
            "reports": _reports(ev)}


def _grid(job: JobConfig):
    g = job.grid
    return scan.grid_points(float(g["start"]), float(g["stop"]), int(g.get("steps", 2)))


def _scan(job: JobConfig) -> tuple[list, list]:
    if job.command == "scan-state":
        rows = scan.scan_state(job.target, job.state_map(), _grid(job), job.detectors, job.m, job.n_max, job.seed,
                               job.subsystem)
    else:
        rows = scan.scan_channel(job.target, job.r, _grid(job), job.detectors, job.m, job.n_max)
    columns = list(rows[0].keys())
    return columns, rows


def _thresholds(job: JobConfig) -> dict:
    channel = scan.is_channel_target(job.target)
    detector = (job.detectors or (["T4"] if channel else ["T1"]))[0]
    lo, hi = float(job.grid["start"]), float(job.grid["stop"])
    onset = scan.bisect_threshold(job.target, None if channel else job.state_map(), detector, lo, hi, job.tol, job.r, job.m, job.n_max)
    result = {"command": job.command, "target": job.target, "map": None if channel else job.state_map(), "detector": detector, "r": job.r,
              "m": job.m, "bracket": [lo, hi], "tol": job.tol, "onset": onset}
    family = job.target.get("channel")
    if family in scan.CHANNEL_PARAM:
        from .channels import snbc_threshold
        result["exact_threshold"] = snbc_threshold(family, int(job.target.get("d", 3)), job.r)
    return result


def _discriminate(job: JobConfig) -> dict:
    rho, dA, _ = scan.build_state(job.target, seed=job.seed)
    return {"command": job.command, "target": job.target, "r": job.r, **scan.discriminate(rho, dA, job.r)}


# -- output --------------------------------------------------------------------

def format_csv(columns: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def render(job: JobConfig) -> str:
    fmt = job.output.get("format")
    if job.command in ("scan-state", "scan-channel"):
        columns, rows = _scan(job)
        if fmt == "json":
            return dumps({"command": job.command, "target": job.target, "columns": columns, "rows": rows})
        return format_csv(columns, rows)
    handlers = {"eval-state": _eval_state, "eval-channel": _eval_channel,
                "thresholds": _thresholds, "discriminate": _discriminate}
    result = handlers[job.command](job)
    if fmt == "csv":
        raise ConfigError(f"{job.command} produces JSON only")
    return dumps(result)


def run(job: JobConfig) -> str:
    """Execute ``job``; write to its output path (if any) and return the text."""
    job.validate()
    text = render(job)
    path = job.output.get("path")
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _error(exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON job file")
        p.add_argument("--family", help="state or channel family")
        p.add_argument("--param", type=float, help="family parameter")
        p.add_argument("--d", type=int, default=3, help="local dimension (default 3)")
        p.add_argument("--rank", type=int, default=1, help="Schmidt rank bound for random_schmidt")
        p.add_argument("--map", choices=["reduction", "breuer_hall", "gen_choi", "choi", "transpose", "identity"])
        p.add_argument("--k", type=float, help="Reduction map parameter (overrides --r)")
        p.add_argument("--kk", type=int, default=1, help="generalized Choi shift count")
        p.add_argument("--r", type=int, help="Schmidt number bound under test")
        p.add_argument("--m", type=int, help="Hankel order")
        p.add_argument("--nmax", type=int, help="number of moments")
        p.add_argument("--detectors", help="comma-separated detector list")
        p.add_argument("--grid", help="lo:hi:steps (scans) or lo:hi (thresholds)")
        p.add_argument("--tol", type=float, help="bisection tolerance")
        p.add_argument("--subsystem", choices=["A", "B"])
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = build_job(args)
        text = run(job)
    except (PosMapError, ValueError, KeyError, TypeError, OSError, ArithmeticError) as exc:
        numerical = (NumericalFailure, NonHermitianInput, ArithmeticError, np.linalg.LinAlgError)
        return _error(exc, 3 if isinstance(exc, numerical) else 2)
    if not job.output.get("path"):
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
