"""JSON parameter/schedule documents and unit handling.

A memory document looks like::

    {"gamma21": 0.01, "gamma31": 1.0, "delta": 0.0, "delta_p": 0.0,
     "coupling_strength_sq": 1e4,
     "segments": [{"start": 0, "end": 2, "shape": "hold", "omega_start": 1000},
                  {"start": 2, "end": 2.5, "shape": "smooth", "omega_start": 1000,
                   "omega_end": 0, "steepness": 1.0}, ...],
     "t1": 2.0, "t2": 7.0, "unit_system": "gamma"}

``unit_system`` is ``"gamma"`` (rates in GAMMA_780, times in 1/GAMMA_780) or
``"si"`` (rad/s and seconds).  A document without the key falls back to the
``EITSIM_UNITS`` environment variable, then to ``"gamma"``.
"""

import json
import os
from pathlib import Path

from .errors import EitsimError
from .polariton import (
    GAMMA_780,
    CouplingSchedule,
    MemoryParams,
    Segment,
    rate_from_si,
    time_from_si,
)

UNIT_SYSTEMS = ("gamma", "si")
_PARAM_KEYS = ("gamma21", "gamma31", "delta", "delta_p", "coupling_strength_sq")


class ConfigError(EitsimError, ValueError):
    """Malformed or inconsistent configuration document."""


def default_unit_system() -> str:
    units = os.environ.get("EITSIM_UNITS", "gamma").strip().lower()
    if units not in UNIT_SYSTEMS:
        raise ConfigError(f"EITSIM_UNITS must be one of {UNIT_SYSTEMS}, got {units!r}")
    return units


def read_json(source):
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _segment_from_si(seg: dict) -> dict:
    out = dict(seg)
    for key in ("start", "end"):
        out[key] = time_from_si(seg[key])
    for key in ("omega_start", "omega_end"):
        if seg.get(key) is not None:
            out[key] = rate_from_si(seg[key])
    return out


def load_memory_config(source, unit_system=None):
    """Parse a memory document into ``(MemoryParams, CouplingSchedule or None)``.

    Values are converted to GAMMA_780 units when the document is in SI.
    """
    doc = read_json(source)
    units = unit_system or doc.get("unit_system") or default_unit_system()
    if units not in UNIT_SYSTEMS:
        raise ConfigError(f"unknown unit_system {units!r}")
    missing = [k for k in ("gamma21", "gamma31") if k not in doc]
    if missing:
        raise ConfigError(f"memory document lacks {missing}")
    values = {k: float(doc[k]) for k in _PARAM_KEYS if k in doc}
    try:
        if units == "si":
            params = MemoryParams.from_si(**values)
        else:
            params = MemoryParams(**values)
        schedule = None
        if "segments" in doc:
            segs = doc["segments"]
            if units == "si":
                segs = [_segment_from_si(s) for s in segs]
            t1, t2 = float(doc["t1"]), float(doc["t2"])
            if units == "si":
                t1, t2 = time_from_si(t1), time_from_si(t2)
            schedule = CouplingSchedule(tuple(Segment(**s) for s in segs), t1, t2)
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"malformed memory document: {exc}") from exc
    return params, schedule


def memory_to_dict(params: MemoryParams, schedule: CouplingSchedule = None) -> dict:
    doc = params.to_dict()
    if schedule is not None:
        doc.update(schedule.to_dict())
    doc["unit_system"] = "gamma"
    return doc


__all__ = [
    "ConfigError",
    "GAMMA_780",
    "UNIT_SYSTEMS",
    "default_unit_system",
    "load_memory_config",
    "memory_to_dict",
    "read_json",
]
