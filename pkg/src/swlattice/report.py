"""Run configuration and JSON reports.

Report schema (schema = "swlattice.report/1"):

    {"schema": ..., "command": str, "config": {...}, "results": {...},
     "checks": [{"name": str, "value": float, "limit": float, "passed": bool}, ...],
     "passed": bool}

Floats are written with 17 significant digits. Wall-clock metadata goes to a
sibling <command>.meta.json so that the report itself is byte-deterministic.
"""

from __future__ import annotations

import json
import math
import os
import platform
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

REPORT_SCHEMA = "swlattice.report/1"
OUTPUT_ENV = "SWLATTICE_OUTPUT_DIR"

COMMAND_DEFAULTS: dict[str, dict] = {
    "eval": {"random": False, "amplitude": 0.5},
    "grad-check": {"samples": 20, "step": 1e-5, "tol": 1e-6, "amplitude": 0.5},
    "hessian-check": {"samples": 5, "pairs": 100, "step": 1e-5, "fd_tol": 1e-5, "sym_tol": 1e-11, "amplitude": 0.5},
    "spectrum": {"operator": "LA", "solver": "auto", "count": 10, "tau": None},
    "index": {"solver": "auto", "tau": None},
    "hodge": {"rtol": 1e-12},
    "flow": {
        "start": "random",
        "amplitude": 0.5,
        "step": 0.05,
        "max_iters": 20000,
        "grad_tol": 1e-10,
        "regauge_every": 0,
        "phi_tol": 1e-6,
        "save_terminal": True,
    },
    "identity-check": {"length": 8.0, "sizes": [4, 8, 16], "min_ratio": 1.5},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 2
    h: float = 1.0
    flux: tuple = (0, 0, 0, 0, 0, 0)
    kg: float | str = 0.0  # constant, or path to a little-endian float64 0-cochain payload
    seed: int = 0
    output_dir: str = "swlattice_out"
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flux"] = list(self.flux)
        d.pop("output_dir")
        return d


def _strict(section: dict, allowed: set, where: str):
    for k in section:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r} in {where} (allowed: {', '.join(sorted(allowed))})")


def parse_config(raw: dict, command: str) -> RunConfig:
    _strict(raw, {"lattice", "bundle", "seed", "output_dir", "params"}, "config")
    lat = raw.get("lattice", {})
    _strict(lat, {"n", "h"}, "lattice")
    bun = raw.get("bundle", {})
    _strict(bun, {"flux", "kg"}, "bundle")
    params = dict(COMMAND_DEFAULTS[command])
    user = raw.get("params", {})
    _strict(user, set(params), f"params for {command!r}")
    params.update(user)
    flux = tuple(bun.get("flux", (0,) * 6))
    if len(flux) != 6 or not all(isinstance(m, int) for m in flux):
        raise ConfigError("bundle.flux must be six integers")
    return RunConfig(
        n=int(lat.get("n", 2)),
        h=float(lat.get("h", 1.0)),
        flux=flux,
        kg=bun.get("kg", 0.0),
        seed=int(raw.get("seed", 0)),
        output_dir=str(raw.get("output_dir", "swlattice_out")),
        params=params,
    )


def load_config(path, command: str) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None
    return parse_config(raw, command)


def resolve_output_dir(cfg: RunConfig, cli_value: str | None) -> Path:
    return Path(cli_value or os.environ.get(OUTPUT_ENV) or cfg.output_dir)


# -- deterministic JSON ------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return json.dumps(str(x))
        s = format(x, ".17g")
        if not any(ch in s for ch in ".en"):
            s += ".0"
        return s
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_fmt(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    return _fmt(obj)


def check(name: str, value: float, limit: float, passed: bool | None = None) -> dict:
    if passed is None:
        passed = bool(value <= limit)
    return {"name": name, "value": float(value), "limit": float(limit), "passed": bool(passed)}


def write_report(out_dir: Path, command: str, cfg: RunConfig, results: dict, checks: list[dict]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {
        "schema": REPORT_SCHEMA,
        "command": command,
        "config": cfg.to_dict(),
        "results": results,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    path = out_dir / f"{command}.json"
    path.write_text(dumps(doc) + "\n", encoding="utf-8")
    meta = {
        "timestamp_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    (out_dir / f"{command}.meta.json").write_text(dumps(meta) + "\n", encoding="utf-8")
    return path
