"""Grid sweeps behind the CLI experiments.

Every sweep returns ``(columns, rows)``; rows are ordered by grid index no
matter how many workers evaluated them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .bell import critical_threshold, minimize_ch, violation_boundary
from .memorychannel import LogicalDensityMatrix, bell_input_ket, bell_state_retrieved, fidelity
from .polariton import (
    CouplingSchedule,
    MemoryParams,
    attenuation_factor,
    closed_form_attenuation,
    storage_efficiency,
)

METHODS = ("closed-form", "quadrature")


def parallel_map(func, items, workers=1):
    """``map`` over a process pool; results keep the input order."""
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


def efficiency(params: MemoryParams, storage_time, method="closed-form", ramp=0.0, omega0=None):
    """Storage efficiency for one storage time.

    ``closed-form`` uses the strong-coupling expression; ``quadrature``
    integrates over a full store/retrieve schedule whose holds sit at
    ``omega0`` (default ``100 * sqrt(coupling_strength_sq)``).
    """
    if method == "closed-form":
        return storage_efficiency(closed_form_attenuation(params, storage_time))
    if method != "quadrature":
        raise ValueError(f"method must be one of {METHODS}")
    if omega0 is None:
        omega0 = 100.0 * math.sqrt(params.coupling_strength_sq)
    t1 = 1.0
    schedule = CouplingSchedule.storage_retrieval(omega0, t1, t1 + storage_time, t1 + storage_time + 1.0, ramp=ramp)
    return storage_efficiency(attenuation_factor(params, schedule))


def _with_gamma21(params: MemoryParams, gamma21: float) -> MemoryParams:
    d = params.to_dict()
    d["gamma21"] = float(gamma21)
    return MemoryParams(**d)


def _fidelity_cell(args):
    params, gamma21, dts, method, ramp = args
    eta = efficiency(_with_gamma21(params, gamma21), dts, method, ramp)
    return [float(gamma21), float(dts), eta, math.sqrt(eta)]


def fidelity_sweep(params, gammas, storage_times, method="closed-form", ramp=0.0, workers=1, outer="storage_time"):
    """Single-photon storage fidelity ``sqrt(eta)`` on a gamma21 x storage-time grid.

    ``outer`` picks which axis varies slowest in the output.
    """
    if outer == "storage_time":
        cells = [(params, g, t, method, ramp) for t in storage_times for g in gammas]
    else:
        cells = [(params, g, t, method, ramp) for g in gammas for t in storage_times]
    columns = ["gamma21", "storage_time", "efficiency", "fidelity"]
    return columns, parallel_map(_fidelity_cell, cells, workers)


def bell_fidelity_surface(etas_a, etas_b):
    target = LogicalDensityMatrix.from_ket(bell_input_ket())
    rows = []
    for ea in etas_a:
        for eb in etas_b:
            f_num = fidelity(bell_state_retrieved(ea, eb), target)
            f_closed = 0.5 * (math.sqrt(ea) + math.sqrt(eb))
            rows.append([float(ea), float(eb), f_num, f_closed])
    return ["eta_a", "eta_b", "fidelity", "fidelity_closed_form"], rows


def _ch_cell(args):
    ea, eb = args
    res = minimize_ch(ea, eb)
    return [float(ea), float(eb), res.j_at_min, res.value, bool(res.violates)]


def ch_surface(etas_a, etas_b, workers=1):
    cells = [(float(a), float(b)) for a in etas_a for b in etas_b]
    rows = parallel_map(_ch_cell, cells, workers)
    return ["eta_a", "eta_b", "j_min", "ch_min", "violates"], rows


def _boundary_cell(eta_a):
    eb = violation_boundary(eta_a)
    return [float(eta_a), None if eb is None else float(eb)]


def ch_boundary(etas_a, workers=1):
    """Points ``(eta_a, eta_b)`` on the ``CH_min = -1`` contour, one per ``eta_a``
    (``None`` where no ``eta_b`` gives a violation)."""
    rows = parallel_map(_boundary_cell, [float(a) for a in etas_a], workers)
    return ["eta_a", "eta_b"], rows


def threshold_summary():
    eta = critical_threshold()
    return {
        "threshold": eta,
        "tolerance": 1e-6,
        "ch_min_above": minimize_ch(min(1.0, eta + 0.01), min(1.0, eta + 0.01)).value,
        "ch_min_below": minimize_ch(eta - 0.01, eta - 0.01).value,
    }


def linspace(grid_spec, default):
    """Grid from ``{"start", "stop", "num"}`` or an explicit list."""
    if grid_spec is None:
        grid_spec = default
    if isinstance(grid_spec, (list, tuple)):
        return [float(x) for x in grid_spec]
    return np.linspace(float(grid_spec["start"]), float(grid_spec["stop"]), int(grid_spec["num"])).tolist()
