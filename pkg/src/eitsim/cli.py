"""``eitsim`` command line: parameter sweeps, threshold search and validation.

A run is described by an optional JSON config; flags override it::

    {
      "experiment": "fidelity-vs-gamma",
      "memory": "memory.json",            # path (relative to the config) or inline object
      "grid": {"gamma21": {"start": 0, "stop": 1, "num": 100},
               "storage_time": [1, 5, 10]},
      "method": "closed-form",
      "out": "fidelity.csv", "format": "csv", "workers": 4, "seed": 0
    }

Exit status: 0 success, 1 validation or numerical failure, 2 configuration
or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__, sweeps, validate
from .config import ConfigError, default_unit_system, load_memory_config, read_json
from .errors import EitsimError
from .polariton import MemoryParams, rate_from_si, rate_to_si, time_from_si, time_to_si

log = logging.getLogger("eitsim")

EXPERIMENTS = (
    "fidelity-vs-gamma",
    "fidelity-vs-time",
    "bell-fidelity-surface",
    "ch-surface",
    "threshold",
    "validate",
)
FORMATS = ("csv", "json")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

_DEFAULT_MEMORY = {"gamma21": 0.0, "gamma31": 1.0, "coupling_strength_sq": 1e4}
_DEFAULT_GRIDS = {
    "fidelity-vs-gamma": {"gamma21": {"start": 0.0, "stop": 1.0, "num": 100}, "storage_time": [1.0, 5.0, 10.0]},
    "fidelity-vs-time": {"storage_time": {"start": 0.0, "stop": 10.0, "num": 100}, "gamma21": [0.1, 0.5, 1.0]},
    "bell-fidelity-surface": {"eta_a": {"start": 0.0, "stop": 1.0, "num": 11},
                              "eta_b": {"start": 0.0, "stop": 1.0, "num": 11}},
    "ch-surface": {"eta_a": {"start": 0.0, "stop": 1.0, "num": 11},
                   "eta_b": {"start": 0.0, "stop": 1.0, "num": 11}},
}
_UNIT_LABELS = {
    "gamma": {"rate": "Gamma", "time": "1/Gamma"},
    "si": {"rate": "rad/s", "time": "s"},
}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eitsim",
        description="EIT quantum-memory channel simulations: fidelity sweeps, CH surfaces, threshold, validation.",
    )
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--experiment", choices=EXPERIMENTS, help="what to run (overrides the config)")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, help="output format (default csv for grids, json for summaries)")
    p.add_argument("--seed", type=_u64, help="seed for randomized validation cases")
    p.add_argument("--workers", type=_positive_int, help="worker processes for grid sweeps")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def resolve_settings(args) -> dict:
    """Merge the config document and command-line flags (flags win)."""
    doc = {}
    base = Path.cwd()
    if args.config is not None:
        doc = dict(read_json(args.config))
        base = args.config.resolve().parent
    settings = {
        "experiment": doc.get("experiment"),
        "out": doc.get("out"),
        "format": doc.get("format"),
        "seed": doc.get("seed", 0),
        "workers": doc.get("workers", 1),
        "method": doc.get("method", "closed-form"),
        "ramp": float(doc.get("ramp", 0.0)),
        "grid": doc.get("grid", {}),
        "memory": doc.get("memory"),
        "channel_factors": doc.get("channel_factors"),
        "unit_system": doc.get("unit_system"),
        "base": base,
    }
    for key in ("experiment", "out", "format", "seed", "workers"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    if settings["experiment"] is None:
        raise ConfigError("no experiment given (use --experiment or the config key 'experiment')")
    if settings["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {settings['experiment']!r}; choose from {EXPERIMENTS}")
    if settings["format"] is None:
        settings["format"] = "json" if settings["experiment"] in ("threshold", "validate") else "csv"
    if settings["format"] not in FORMATS:
        raise ConfigError(f"unknown format {settings['format']!r}")
    if settings["method"] not in sweeps.METHODS:
        raise ConfigError(f"method must be one of {sweeps.METHODS}")
    if not isinstance(settings["grid"], dict):
        raise ConfigError("'grid' must be an object")
    if settings["out"] is not None and not isinstance(settings["out"], Path):
        out = Path(settings["out"])
        settings["out"] = out if out.is_absolute() else base / out
    settings["unit_system"] = settings["unit_system"] or default_unit_system()
    if settings["unit_system"] not in _UNIT_LABELS:
        raise ConfigError(f"unknown unit_system {settings['unit_system']!r}")
    try:
        settings["seed"] = int(settings["seed"])
        settings["workers"] = int(settings["workers"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"seed and workers must be integers: {exc}") from exc
    if settings["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    return settings


def _grid(settings, name, min_points, lo=None, hi=None):
    grid_spec = settings["grid"].get(name, _DEFAULT_GRIDS[settings["experiment"]].get(name))
    try:
        values = sweeps.linspace(grid_spec, None)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"grid '{name}' is malformed: {exc}") from exc
    if len(values) < min_points:
        raise ConfigError(f"grid '{name}' needs at least {min_points} point(s), got {len(values)}")
    if (lo is not None and min(values) < lo) or (hi is not None and max(values) > hi):
        raise ConfigError(f"grid '{name}' must lie in [{lo}, {hi}]")
    return values


def _memory(settings) -> MemoryParams:
    mem = settings["memory"]
    if mem is None:
        doc = dict(_DEFAULT_MEMORY)
        doc["unit_system"] = "gamma"
    elif isinstance(mem, dict):
        doc = mem
    else:
        path = Path(mem)
        doc = read_json(path if path.is_absolute() else settings["base"] / path)
    try:
        params, _ = load_memory_config(doc, unit_system=doc.get("unit_system") or settings["unit_system"])
    except EitsimError as exc:
        raise ConfigError(f"invalid memory parameters: {exc}") from exc
    return params


def _fidelity_rows(settings, x_axis):
    si = settings["unit_system"] == "si"
    labels = _UNIT_LABELS[settings["unit_system"]]
    params = _memory(settings)
    if x_axis == "gamma21":
        gammas = _grid(settings, "gamma21", 2, lo=0.0)
        times = _grid(settings, "storage_time", 1, lo=0.0)
        outer = "storage_time"
    else:
        times = _grid(settings, "storage_time", 2, lo=0.0)
        gammas = _grid(settings, "gamma21", 1, lo=0.0)
        outer = "gamma21"
    if si:
        gammas = [rate_from_si(g) for g in gammas]
        times = [time_from_si(t) for t in times]
    _, rows = sweeps.fidelity_sweep(
        params, gammas, times, settings["method"], settings["ramp"], settings["workers"], outer=outer
    )
    if si:
        rows = [[rate_to_si(g), time_to_si(t), eta, f] for g, t, eta, f in rows]
    columns = [f"gamma21[{labels['rate']}]", f"storage_time[{labels['time']}]", "efficiency", "fidelity"]
    return columns, rows


def run_experiment(settings):
    """Returns ``(payload, passed)``; payload is ``{"columns", "rows", ...}`` or a summary dict."""
    exp = settings["experiment"]
    if exp == "fidelity-vs-gamma":
        columns, rows = _fidelity_rows(settings, "gamma21")
        return {"columns": columns, "rows": rows}, True
    if exp == "fidelity-vs-time":
        columns, rows = _fidelity_rows(settings, "storage_time")
        return {"columns": columns, "rows": rows}, True
    if exp == "bell-fidelity-surface":
        ea = _grid(settings, "eta_a", 2, 0.0, 1.0)
        eb = _grid(settings, "eta_b", 2, 0.0, 1.0)
        columns, rows = sweeps.bell_fidelity_surface(ea, eb)
        return {"columns": columns, "rows": rows}, True
    if exp == "ch-surface":
        ea = _grid(settings, "eta_a", 2, 0.0, 1.0)
        eb = _grid(settings, "eta_b", 2, 0.0, 1.0)
        columns, rows = sweeps.ch_surface(ea, eb, settings["workers"])
        b_cols, b_rows = sweeps.ch_boundary(ea, settings["workers"])
        return {"columns": columns, "rows": rows, "boundary": {"columns": b_cols, "rows": b_rows}}, True
    if exp == "threshold":
        return sweeps.threshold_summary(), True
    results = validate.run_all(settings["seed"], settings["channel_factors"])
    for r in results:
        log.info("%-28s %s  max_dev=%.3e  tol=%.1e  %.2fs", r.suite, "PASS" if r.passed else "FAIL",
                 r.max_deviation, r.tolerance, r.seconds)
    suites = []
    for r in results:
        d = r.to_dict()
        d.pop("seconds")  # keeps the report byte-identical across runs
        if not math.isfinite(d["max_deviation"]):
            d["max_deviation"] = None
        suites.append(d)
    passed = all(r.passed for r in results)
    return {"passed": passed, "seed": settings["seed"], "suites": suites}, passed


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(float(v)) if isinstance(v, float) else str(v)


def _csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_text(payload):
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def render(payload, fmt):
    """Serialize a payload; returns ``{suffix: text}`` (``""`` is the main file)."""
    if fmt == "json" or "columns" not in payload:
        if fmt == "csv":
            # scalar summary as a two-column table
            flat = {k: v for k, v in payload.items() if not isinstance(v, (list, dict))}
            return {"": _csv_text(["key", "value"], list(flat.items()))}
        return {"": _json_text(payload)}
    out = {"": _csv_text(payload["columns"], payload["rows"])}
    if "boundary" in payload:
        out["_boundary"] = _csv_text(payload["boundary"]["columns"], payload["boundary"]["rows"])
    return out


def write_outputs(texts, out: Path | None, stream=None):
    stream = stream or sys.stdout
    if out is None:
        for suffix, text in texts.items():
            if suffix:
                stream.write(f"# {suffix.lstrip('_')}\n")
            stream.write(text)
        return []
    written = []
    for suffix, text in texts.items():
        path = out if not suffix else out.with_name(f"{out.stem}{suffix}{out.suffix}")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as exc:
            raise CliError(f"cannot write {path}: {exc}", EXIT_CONFIG) from exc
        written.append(path)
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        settings = resolve_settings(args)
        payload, passed = run_experiment(settings)
        texts = render(payload, settings["format"])
        if settings["experiment"] == "validate" and settings["out"] is not None:
            sys.stdout.write(texts[""])
        for path in write_outputs(texts, settings["out"]):
            log.info("wrote %s", path)
    except ConfigError as exc:
        print(f"eitsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CliError as exc:
        print(f"eitsim: {exc}", file=sys.stderr)
        return exc.code
    except EitsimError as exc:
        print(f"eitsim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    if not passed:
        print("eitsim: validation failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
