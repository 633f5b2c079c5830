"""Dark-state polariton attenuation under a time-dependent coupling field.

All rates are in units of ``GAMMA_780`` and all times in units of
``1 / GAMMA_780`` unless a function says otherwise.  The complex rates
``gamma21' = gamma21 - 2i delta`` and ``gamma31' = gamma31 - 2i delta_p`` are
always derived from the stored real fields.

The adiabatic-limit solution used here assumes the coupling field changes
slowly compared with ``1/(g_p sqrt(N))``; no validity check for that regime is
performed.
"""

from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    IntegrationError,
    QuadratureError,
    ScheduleError,
    SingularityError,
    UnphysicalParameterError,
)

GAMMA_780 = 2.0 * math.pi * 6.063e6  # rad/s, 87Rb D2 natural linewidth

QUAD_TOL = 1e-12
ODE_RTOL = 1e-9
_SIMPSON_MAX_DEPTH = 50
_SIMPSON_MIN_DEPTH = 4
_ODE_MAX_STEPS = 10_000_000
_SINGULAR_RTOL = 1e-13


def rate_from_si(rate_rad_s):
    return rate_rad_s / GAMMA_780


def rate_to_si(rate):
    return rate * GAMMA_780


def time_from_si(seconds):
    return seconds * GAMMA_780


def time_to_si(t):
    return t / GAMMA_780


@dataclass(frozen=True)
class MemoryParams:
    """Rates and detunings of one EIT ensemble.

    ``coupling_strength_sq`` is the collective probe coupling ``4 g_p^2 N``.
    """

    gamma21: float
    gamma31: float
    delta: float = 0.0
    delta_p: float = 0.0
    coupling_strength_sq: float = 1e4

    def __post_init__(self):
        values = (self.gamma21, self.gamma31, self.delta, self.delta_p, self.coupling_strength_sq)
        if not all(math.isfinite(v) for v in values):
            raise UnphysicalParameterError(f"non-finite memory parameter in {values}")
        if self.gamma21 < 0 or self.gamma31 < 0:
            raise UnphysicalParameterError("decoherence rates must be non-negative")
        if self.coupling_strength_sq <= 0:
            raise UnphysicalParameterError("coupling_strength_sq must be positive")

    @property
    def gamma21_c(self) -> complex:
        return complex(self.gamma21, -2.0 * self.delta)

    @property
    def gamma31_c(self) -> complex:
        return complex(self.gamma31, -2.0 * self.delta_p)

    @property
    def gamma_product(self) -> complex:
        return self.gamma21_c * self.gamma31_c

    @classmethod
    def from_si(cls, gamma21, gamma31, delta=0.0, delta_p=0.0, coupling_strength_sq=1e4 * GAMMA_780**2):
        """Build from angular frequencies in rad/s."""
        return cls(
            gamma21=rate_from_si(gamma21),
            gamma31=rate_from_si(gamma31),
            delta=rate_from_si(delta),
            delta_p=rate_from_si(delta_p),
            coupling_strength_sq=coupling_strength_sq / GAMMA_780**2,
        )

    def to_dict(self):
        return {
            "gamma21": self.gamma21,
            "gamma31": self.gamma31,
            "delta": self.delta,
            "delta_p": self.delta_p,
            "coupling_strength_sq": self.coupling_strength_sq,
        }


_SHAPES = {"hold": kernels.HOLD, "linear": kernels.LINEAR, "smooth": kernels.SMOOTH}


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    shape: str = "hold"
    omega_start: float = 0.0
    omega_end: float | None = None
    steepness: float = 1.0

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ScheduleError(f"unknown segment shape {self.shape!r}")
        if self.omega_end is None or self.shape == "hold":
            object.__setattr__(self, "omega_end", self.omega_start)
        if self.end < self.start:
            raise ScheduleError(f"segment ends before it starts: [{self.start}, {self.end}]")
        if self.omega_start < 0 or self.omega_end < 0:
            raise ScheduleError("coupling Rabi frequency must be non-negative")
        if self.steepness <= 0:
            raise ScheduleError("steepness must be positive")

    @property
    def kind(self) -> int:
        return _SHAPES[self.shape]

    def omega(self, t):
        return kernels.omega_at(
            self.kind, self.omega_start, self.omega_end, self.steepness, self.start, self.end, t
        )

    def to_dict(self):
        d = {"start": self.start, "end": self.end, "shape": self.shape, "omega_start": self.omega_start}
        if self.shape != "hold":
            d["omega_end"] = self.omega_end
        if self.shape == "smooth":
            d["steepness"] = self.steepness
        return d


@dataclass(frozen=True)
class CouplingSchedule:
    """Piecewise coupling Rabi frequency covering ``[0, t_end]``.

    ``t1`` is where storage starts and ``t2`` where retrieval starts.  Smooth
    ramps use a raised-cosine profile; ``steepness`` other than 1 sharpens
    (``> 1``) or softens it symmetrically about the ramp midpoint.
    """

    segments: tuple
    t1: float
    t2: float

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(**s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ScheduleError("schedule needs at least one segment")
        if segs[0].start != 0.0:
            raise ScheduleError("schedule must start at t = 0")
        scale = max(1.0, abs(segs[-1].end))
        for prev, nxt in zip(segs, segs[1:]):
            if abs(prev.end - nxt.start) > 1e-12 * scale:
                raise ScheduleError(f"segments not contiguous at t = {prev.end} / {nxt.start}")
        w0 = segs[0].omega_start
        w_end = segs[-1].omega_end
        if abs(w0 - w_end) > 1e-12 * max(1.0, w0):
            raise ScheduleError(
                f"retrieval coupling {w_end} must match input coupling {w0}"
            )
        if self.t2 < self.t1:
            raise ScheduleError("t2 must not precede t1")
        if self.t1 < 0 or self.t2 > self.t_end + 1e-12 * scale:
            raise ScheduleError("t1, t2 must lie inside the schedule")

    @property
    def t_end(self) -> float:
        return self.segments[-1].end

    @property
    def storage_time(self) -> float:
        return self.t2 - self.t1

    def segment_at(self, t) -> Segment:
        ends = [s.end for s in self.segments]
        i = bisect.bisect_left(ends, t)
        return self.segments[min(i, len(self.segments) - 1)]

    def omega(self, t):
        if np.ndim(t):
            return np.array([self.omega(x) for x in np.ravel(t)]).reshape(np.shape(t))
        return self.segment_at(t).omega(t)

    @classmethod
    def storage_retrieval(
        cls, omega0, t1, t2, t_end=None, ramp=0.0, shape="smooth", steepness=1.0
    ) -> "CouplingSchedule":
        """Hold ``omega0``, switch off at ``t1``, hold zero, switch back on to reach
        ``omega0`` at ``t2``, then hold until ``t_end``.

        ``ramp`` is the duration of each switching ramp; ``0`` gives
        instantaneous switching, for which the strong-coupling closed form is
        exact up to the contribution of the hold segments.
        """
        if t_end is None:
            t_end = t2 + max(t1, 1.0)
        if 2 * ramp > t2 - t1:
            raise ScheduleError("ramps longer than the storage window")
        segs = [Segment(0.0, t1, "hold", omega0)]
        if ramp > 0:
            segs.append(Segment(t1, t1 + ramp, shape, omega0, 0.0, steepness))
            segs.append(Segment(t1 + ramp, t2 - ramp, "hold", 0.0))
            segs.append(Segment(t2 - ramp, t2, shape, 0.0, omega0, steepness))
        else:
            segs.append(Segment(t1, t2, "hold", 0.0))
        segs.append(Segment(t2, t_end, "hold", omega0))
        return cls(tuple(segs), t1, t2)

    def to_dict(self):
        return {"segments": [s.to_dict() for s in self.segments], "t1": self.t1, "t2": self.t2}


@dataclass(frozen=True)
class AttenuationFactor:
    value: complex
    error_estimate: float = field(default=0.0, compare=False)

    @property
    def efficiency(self) -> float:
        return storage_efficiency(self)

    def __complex__(self):
        return complex(self.value)


def mixing_angle(omega_c, coupling_strength_sq):
    """Mixing angle with ``tan(theta) = 2 g_p sqrt(N) / omega_c``, in ``[0, pi/2]``."""
    if omega_c < 0 or coupling_strength_sq <= 0:
        raise UnphysicalParameterError("need omega_c >= 0 and coupling_strength_sq > 0")
    return math.atan2(math.sqrt(coupling_strength_sq), omega_c)


def _denominator(params, omega_c):
    G = params.coupling_strength_sq
    P = params.gamma_product
    den = omega_c * omega_c + G + P
    if abs(den) <= _SINGULAR_RTOL * (omega_c * omega_c + G + abs(P)):
        raise SingularityError(f"g1/g2 denominator vanishes at omega_c={omega_c}")
    return den


def g1(params: MemoryParams, omega_c: float) -> complex:
    return params.coupling_strength_sq / _denominator(params, omega_c)


def g2(params: MemoryParams, omega_c: float) -> complex:
    return (omega_c * omega_c + params.gamma_product) / _denominator(params, omega_c)


def _check_schedule_singularities(params, schedule):
    # The denominator can only vanish when gamma21'*gamma31' is real and negative.
    P = params.gamma_product
    if P.real < 0 and abs(P.imag) <= _SINGULAR_RTOL * abs(P):
        w_sq = -P.real - params.coupling_strength_sq
        if w_sq >= 0:
            w = math.sqrt(w_sq)
            lo = min(min(s.omega_start, s.omega_end) for s in schedule.segments)
            hi = max(max(s.omega_start, s.omega_end) for s in schedule.segments)
            if lo <= w <= hi:
                _denominator(params, w)


def _segments_until(schedule, t):
    """Segment pieces clipped to ``[0, t]``, holding the final value past ``t_end``."""
    pieces = []
    for s in schedule.segments:
        if s.start >= t and pieces:
            break
        pieces.append((s, s.start, min(s.end, t)))
    if t > schedule.t_end:
        last = schedule.segments[-1]
        pieces.append((Segment(last.end, t, "hold", last.omega_end), last.end, t))
    return pieces


def integrate_g(params: MemoryParams, schedule: CouplingSchedule, t=None, which=1, tol=QUAD_TOL):
    """Integral of g1 (``which=1``) or g2 (``which=2``) over ``[0, t]``.

    Adaptive Simpson per segment; returns ``(value, error_estimate)``.
    Raises :class:`QuadratureError` if any segment fails to converge.
    """
    if t is None:
        t = schedule.t_end
    _check_schedule_singularities(params, schedule)
    pieces = _segments_until(schedule, t)
    seg_tol = tol / max(1, len(pieces))
    G = float(params.coupling_strength_sq)
    P = complex(params.gamma_product)
    total = 0.0 + 0.0j
    err = 0.0
    for seg, a, b in pieces:
        min_depth = 0 if seg.kind == kernels.HOLD else _SIMPSON_MIN_DEPTH
        re, im, e, status = kernels.simpson_segment(
            which, seg.kind, float(seg.omega_start), float(seg.omega_end), float(seg.steepness),
            float(seg.start), float(seg.end), float(a), float(b), G, P, seg_tol,
            _SIMPSON_MAX_DEPTH, min_depth,
        )
        if status != kernels.STATUS_OK:
            raise QuadratureError(f"adaptive Simpson did not converge on [{a}, {b}]", err + e)
        total += complex(re, im)
        err += e
    if err > tol:
        raise QuadratureError(f"quadrature error estimate {err:.3e} exceeds tolerance {tol:.1e}", err)
    return total, err


def attenuation_factor(params: MemoryParams, schedule: CouplingSchedule, t=None) -> AttenuationFactor:
    """Attenuation factor ``f(t) = exp(-gamma21'/2 * int_0^t g1)`` after retrieval.

    Parameters
    ----------
    params : MemoryParams
    schedule : CouplingSchedule
    t : float, optional
        Evaluation time, at or after retrieval start ``t2``; defaults to the
        end of the schedule.  Times past the end hold the final coupling.

    Returns
    -------
    AttenuationFactor
        With ``error_estimate`` propagated from the quadrature.
    """
    if t is None:
        t = schedule.t_end
    if t < schedule.t2:
        raise ScheduleError(f"attenuation factor is defined after retrieval (t >= {schedule.t2})")
    integral, err = integrate_g(params, schedule, t, which=1)
    g21 = params.gamma21_c
    f = cmath.exp(-0.5 * g21 * integral)
    return AttenuationFactor(f, abs(f) * 0.5 * abs(g21) * err)


def closed_form_attenuation(params: MemoryParams, storage_time: float) -> AttenuationFactor:
    """Strong-coupling approximation: the exponent is integrated over the storage
    window only, where the coupling is off."""
    if storage_time < 0:
        raise ScheduleError("storage time must be non-negative")
    G = params.coupling_strength_sq
    g21 = params.gamma21_c
    den = G + params.gamma_product
    if abs(den) <= _SINGULAR_RTOL * (G + abs(params.gamma_product)):
        raise SingularityError("4 g_p^2 N + gamma21' gamma31' vanishes")
    return AttenuationFactor(cmath.exp(-0.5 * g21 * (G / den) * storage_time))


def storage_efficiency(f) -> float:
    """Storage efficiency ``|f|^2``."""
    value = f.value if isinstance(f, AttenuationFactor) else complex(f)
    return value.real**2 + value.imag**2


def dsp_evolve_numeric(
    params: MemoryParams,
    schedule: CouplingSchedule,
    k: float,
    psi0: complex,
    c: float = 1.0,
    t=None,
    rtol: float = ODE_RTOL,
    atol: float = 1e-15,
) -> complex:
    """Integrate the momentum-space DSP equation of motion numerically.

    The right-hand side is built from the mixing angle directly, so it serves
    as an independent check on the g1/g2 analytic solution.  ``c * k`` must be
    in the same rate units as the memory parameters.  The propagation phase
    ``c k int g2`` is kept.
    """
    if t is None:
        t = schedule.t_end
    ck = float(c * k)
    G = float(params.coupling_strength_sq)
    g21 = complex(params.gamma21_c)
    g31 = complex(params.gamma31_c)
    y = 1.0 + 0.0j
    for seg, a, b in _segments_until(schedule, t):
        y, status, _ = kernels.dopri_segment(
            seg.kind, float(seg.omega_start), float(seg.omega_end), float(seg.steepness),
            float(seg.start), float(seg.end), float(a), float(b), G, g21, g31, ck, y,
            float(rtol), float(atol), _ODE_MAX_STEPS,
        )
        if status == kernels.STATUS_STEP_UNDERFLOW:
            raise IntegrationError(f"step size underflow on [{a}, {b}]")
        if status != kernels.STATUS_OK:
            raise IntegrationError(f"step budget exhausted on [{a}, {b}]")
    return complex(psi0) * y
