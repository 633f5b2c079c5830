"""Clauser-Horne test of the retrieved path-entangled photon.

Each party mixes its mode with a strong local oscillator on a highly
transmissive beam splitter (a displacement ``D(alpha)``) and uses an on/off
detector.  The no-click POVM element is the displaced vacuum projector.
The local-realist bound is ``-1 <= CH <= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidStateError, UnphysicalParameterError
from .fockspace import coherent_ket, coherent_overlap, displacement
from .memorychannel import LogicalDensityMatrix, bell_state_retrieved
from .optimize import bisect, golden_section

J_MAX = 5.0
J_CAP = 40.0
N_SCAN = 10_000
J_XTOL = 1e-10
THRESHOLD_TOL = 1e-6
_PROB_TOL = 1e-12


@dataclass(frozen=True)
class DisplacementSetting:
    """Non-zero displacement of each party; the other setting is always zero."""

    alpha: complex
    beta: complex

    @property
    def J(self) -> float:
        return abs(self.alpha) ** 2

    @classmethod
    def symmetric(cls, J) -> "DisplacementSetting":
        if J < 0:
            raise UnphysicalParameterError("displacement strength J must be >= 0")
        return cls(complex(math.sqrt(J)), complex(-math.sqrt(J)))


@dataclass(frozen=True)
class CHResult:
    value: float
    j_at_min: float
    settings: DisplacementSetting | None = None
    at_boundary: bool = False
    excess: float | None = None  # CH + 1, computed without cancellation

    @property
    def violates(self) -> bool:
        excess = self.value + 1.0 if self.excess is None else self.excess
        return excess < 0.0


def _two_mode(rho) -> np.ndarray:
    if isinstance(rho, LogicalDensityMatrix):
        m = rho.matrix
    else:
        m = np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise InvalidStateError(
            "analytic POVM path needs a two-mode state with at most one photon per mode; "
            "use no_count_probs_fock for general states"
        )
    return m


def _overlaps(alpha) -> np.ndarray:
    """``(<0|alpha>, <1|alpha>)``: the displaced vacuum restricted to n <= 1."""
    return np.array([coherent_overlap(0, alpha), coherent_overlap(1, alpha)])


def no_count_probs(rho, alpha, beta):
    """No-click probabilities ``(Q_a(alpha), Q_b(beta), Q_ab(alpha, beta))``.

    ``Q_ab = tr[rho |alpha><alpha| (x) |beta><beta|]`` and the marginals
    use the identity on the other mode.  Exact for states with at most one
    photon per mode.
    """
    m = _two_mode(rho)
    ca = _overlaps(alpha)
    cb = _overlaps(beta)
    v = np.kron(ca, cb)
    q_ab = np.real(v.conj() @ m @ v)
    q_a = 0.0
    q_b = 0.0
    for e in np.eye(2):
        u = np.kron(ca, e)
        w = np.kron(e, cb)
        q_a += np.real(u.conj() @ m @ u)
        q_b += np.real(w.conj() @ m @ w)
    return float(q_a), float(q_b), float(q_ab)


def _click_probs(q_a, q_b, q_ab):
    p_a = 1.0 - q_a
    p_b = 1.0 - q_b
    p_ab = 1.0 - q_a - q_b + q_ab
    for name, p in (("Q_a", q_a), ("Q_b", q_b), ("Q_ab", q_ab), ("P_a", p_a), ("P_b", p_b), ("P_ab", p_ab)):
        if not (-_PROB_TOL <= p <= 1.0 + _PROB_TOL):
            raise AssertionError(f"{name} = {p} outside [0, 1]")
    if p_ab > min(p_a, p_b) + _PROB_TOL:
        raise AssertionError(f"P_ab = {p_ab} exceeds min(P_a, P_b)")
    return p_a, p_b, p_ab


def _ch_combination(probs, alpha_pair, beta_pair) -> float:
    a0, a1 = alpha_pair
    b0, b1 = beta_pair
    p_ab = {}
    for a in (a0, a1):
        for b in (b0, b1):
            p_ab[a, b] = _click_probs(*probs(a, b))[2]
    p_a0, p_b0, _ = _click_probs(*probs(a0, b0))
    return p_ab[a0, b0] + p_ab[a0, b1] + p_ab[a1, b0] - p_ab[a1, b1] - p_a0 - p_b0


def ch_from_probs(rho, alpha_pair, beta_pair) -> CHResult:
    """CH combination from the POVM probabilities for settings ``alpha in alpha_pair``,
    ``beta in beta_pair`` (conventionally ``(0, alpha')`` and ``(0, -alpha')``)."""
    m = _two_mode(rho)
    value = _ch_combination(lambda a, b: no_count_probs(m, a, b), alpha_pair, beta_pair)
    setting = DisplacementSetting(complex(alpha_pair[1]), complex(beta_pair[1]))
    return CHResult(value, setting.J, setting)


def ch_pipeline(eta_a, eta_b, J) -> float:
    """CH through the POVM route on the retrieved Bell state with ``beta' = -alpha'``."""
    s = DisplacementSetting.symmetric(J)
    return ch_from_probs(bell_state_retrieved(eta_a, eta_b), (0.0, s.alpha), (0.0, s.beta)).value


def _check_eta(eta_a, eta_b):
    for eta in (eta_a, eta_b):
        if not (0.0 <= eta <= 1.0):
            raise UnphysicalParameterError(f"efficiency {eta} outside [0, 1]")


def ch_closed_form(eta_a, eta_b, J):
    """Closed-form CH for the phase-corrected retrieved Bell state (scalar or array ``J``)."""
    _check_eta(eta_a, eta_b)
    J = np.asarray(J, dtype=float)
    if np.any(J < 0):
        raise UnphysicalParameterError("J must be non-negative")
    s = eta_a + eta_b
    q = (math.sqrt(eta_a) + math.sqrt(eta_b)) ** 2
    out = -1.0 + np.exp(-J) * (2.0 - s + 0.5 * J * s) - np.exp(-2.0 * J) * (1.0 - 0.5 * s + 0.5 * J * q)
    return float(out) if out.ndim == 0 else out


def ch_excess(eta_a, eta_b, J) -> float:
    """``CH + 1`` without the leading ``-1``, so its sign is reliable near zero."""
    s = eta_a + eta_b
    q = (math.sqrt(eta_a) + math.sqrt(eta_b)) ** 2
    e1 = math.exp(-J)
    return e1 * (2.0 - s + 0.5 * J * s) - e1 * e1 * (1.0 - 0.5 * s + 0.5 * J * q)


def minimize_ch(eta_a, eta_b, j_max=J_MAX, n_scan=N_SCAN, j_cap=J_CAP, xtol=J_XTOL) -> CHResult:
    """Minimum of the closed-form CH over ``J in (0, j_max]``.

    Dense scan, then golden-section refinement around the best grid point.
    If the best point is the upper end the range is doubled (up to
    ``j_cap``); if it is still at the end, the minimum is the ``J -> inf``
    infimum ``-1`` and the result is flagged ``at_boundary``.

    The closed form tends to ``-1`` from above for every efficiency pair, so
    an interior local minimum with positive excess is not the infimum either;
    that case is reported as the ``J -> inf`` limit as well.
    """
    _check_eta(eta_a, eta_b)
    while True:
        js = j_max * np.arange(1, n_scan + 1) / n_scan
        ex = kernels.ch_excess_scan(float(eta_a), float(eta_b), js)
        best = int(np.argmin(ex))  # first occurrence: ties go to smaller J
        if best == n_scan - 1 and j_max < j_cap:
            j_max = min(2.0 * j_max, j_cap)
            continue
        break
    limit = CHResult(-1.0, float(j_cap), DisplacementSetting.symmetric(j_cap), True, 0.0)
    if best == n_scan - 1:
        return limit
    lo = js[best - 1] if best > 0 else 0.0
    hi = js[best + 1]
    j_opt, ex_opt = golden_section(lambda j: ch_excess(eta_a, eta_b, j), lo, hi, xtol=xtol)
    if float(ex[best]) < ex_opt:
        j_opt, ex_opt = float(js[best]), float(ex[best])
    if ex_opt >= 0.0:
        return limit
    return CHResult(-1.0 + ex_opt, float(j_opt), DisplacementSetting.symmetric(j_opt), False, ex_opt)


def critical_threshold(tol=THRESHOLD_TOL) -> float:
    """Mean efficiency on the diagonal ``eta_a = eta_b`` above which ``CH_min < -1``."""
    return bisect(lambda eta: minimize_ch(eta, eta).violates, 0.5, 1.0, xtol=tol)


def violation_boundary(eta_a, tol=THRESHOLD_TOL):
    """Smallest ``eta_b`` giving a violation at fixed ``eta_a`` (``None`` if none in [0, 1])."""
    if not minimize_ch(eta_a, 1.0).violates:
        return None
    if minimize_ch(eta_a, 0.0).violates:
        return 0.0
    return bisect(lambda eb: minimize_ch(eta_a, eb).violates, 0.0, 1.0, xtol=tol)


# --- truncated-Fock oracle -------------------------------------------------


def _embed_two_mode(m, cutoff) -> np.ndarray:
    d = cutoff + 1
    idx = [0 * d + 0, 0 * d + 1, 1 * d + 0, 1 * d + 1]  # |i_A i_B> -> |n_A n_B>
    big = np.zeros((d * d, d * d), dtype=complex)
    big[np.ix_(idx, idx)] = m
    return big


def no_count_projector(alpha, cutoff) -> np.ndarray:
    """``D(alpha)|0><0|D^dag(alpha)`` with ``D`` from the truncated matrix exponential."""
    col = displacement(alpha, cutoff)[:, 0]
    return np.outer(col, col.conj())


def click_operator(alpha, cutoff) -> np.ndarray:
    """``D(alpha) (sum_{n>=1} |n><n|) D^dag(alpha)`` on the truncated space."""
    D = displacement(alpha, cutoff)
    proj = np.eye(cutoff + 1)
    proj[0, 0] = 0.0
    return D @ proj @ D.conj().T


def no_count_probs_fock(rho, alpha, beta, cutoff=20):
    """Oracle for :func:`no_count_probs` evaluated in a two-mode Fock space."""
    m = rho.matrix if isinstance(rho, LogicalDensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape == (4, 4):
        big = _embed_two_mode(m, cutoff)
    elif m.shape == ((cutoff + 1) ** 2,) * 2:
        big = m
    else:
        raise InvalidStateError(f"state shape {m.shape} incompatible with cutoff {cutoff}")
    qa = no_count_projector(alpha, cutoff)
    qb = no_count_projector(beta, cutoff)
    eye = np.eye(cutoff + 1)
    q_ab = np.real(np.trace(big @ np.kron(qa, qb)))
    q_a = np.real(np.trace(big @ np.kron(qa, eye)))
    q_b = np.real(np.trace(big @ np.kron(eye, qb)))
    return float(q_a), float(q_b), float(q_ab)


def ch_fock(rho, alpha_pair, beta_pair, cutoff=20) -> float:
    return _ch_combination(lambda a, b: no_count_probs_fock(rho, a, b, cutoff), alpha_pair, beta_pair)


def poisson_tail(J, cutoff) -> float:
    """Weight of a coherent state of mean photon number ``J`` above ``cutoff``."""
    c = coherent_ket(math.sqrt(J), cutoff)
    return max(0.0, 1.0 - float(np.sum(np.abs(c) ** 2)))
