"""Truncated multimode Fock space: the brute-force oracle layer.

Continuum momentum modes are mapped onto a uniform grid of spacing ``dk``
with ``delta(k - k') -> delta_kk' / dk`` and ``int dk -> sum dk``.  The
continuum-normalised ladder operator is therefore
``a_k = sqrt(L / (2 pi dk)) b_k`` with ``b_k`` a standard bosonic operator,
and every physical expectation is independent of the quantisation length
``L``.  ``L`` here is a quantisation length, unrelated to the ensemble length.

Basis states are occupation tuples ``(n_0, ..., n_{M-1})`` in lexicographic
order (mode 0 most significant) with ``n_i <= cutoff`` and, optionally,
``sum(n) <= max_total``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, InvalidStateError, UnphysicalParameterError

MAX_DIM = 4096
NORM_TOL = 1e-10


@dataclass(frozen=True)
class SpectralProfile:
    """Single-photon amplitude ``phi'(k)`` sampled on a uniform k grid."""

    k: np.ndarray
    amplitudes: np.ndarray
    dk: float
    L_quant: float = 2.0 * math.pi

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        amp = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "amplitudes", amp)
        if k.shape != amp.shape or k.ndim != 1:
            raise DimensionError("k grid and amplitudes must be 1-D of equal length")
        if k.size > 1 and not np.allclose(np.diff(k), self.dk, rtol=1e-9, atol=0.0):
            raise DimensionError("k grid is not uniform with the declared spacing")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.dk)

    def is_normalized(self, tol=NORM_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    @classmethod
    def gaussian(cls, n_modes, k0=0.0, sigma=1.0, span=None, L_quant=2.0 * math.pi):
        """Gaussian profile over ``n_modes`` grid points, normalised on the grid."""
        if span is None:
            span = 8.0 * sigma
        k = k0 + np.linspace(-span / 2, span / 2, n_modes)
        dk = k[1] - k[0] if n_modes > 1 else 1.0
        amp = np.exp(-((k - k0) ** 2) / (4 * sigma**2)).astype(complex)
        amp /= math.sqrt(np.sum(np.abs(amp) ** 2) * dk)
        return cls(k, amp, dk, L_quant)

    @classmethod
    def single_mode(cls, n_modes=1, index=0, dk=1.0, L_quant=2.0 * math.pi):
        """All weight in grid point ``index`` (a discretised delta function)."""
        amp = np.zeros(n_modes, dtype=complex)
        amp[index] = 1.0 / math.sqrt(dk)
        return cls(np.arange(n_modes) * dk, amp, dk, L_quant)

    @classmethod
    def from_amplitudes(cls, amplitudes, dk=1.0, L_quant=2.0 * math.pi, normalize=True):
        amp = np.asarray(amplitudes, dtype=complex)
        if normalize:
            amp = amp / math.sqrt(np.sum(np.abs(amp) ** 2) * dk)
        return cls(np.arange(amp.size) * dk, amp, dk, L_quant)


def _occupations(modes, cutoff, budget):
    """Occupation tuples with entries <= cutoff and sum <= budget, lexicographic."""
    if modes == 0:
        yield ()
        return
    for n in range(min(cutoff, budget) + 1):
        for rest in _occupations(modes - 1, cutoff, budget - n):
            yield (n,) + rest


class FockSpace:
    """Basis and ladder operators of a truncated multimode register."""

    def __init__(self, modes, cutoff, max_total=None, dk=1.0, L_quant=2.0 * math.pi):
        if modes < 1 or cutoff < 0:
            raise DimensionError("need at least one mode and a non-negative cutoff")
        self.modes = int(modes)
        self.cutoff = int(cutoff)
        self.max_total = None if max_total is None else int(max_total)
        self.dk = float(dk)
        self.L_quant = float(L_quant)
        if self.max_total is None and (self.cutoff + 1) ** self.modes > MAX_DIM:
            raise DimensionError(f"register dimension exceeds {MAX_DIM}")
        basis = []
        budget = self.modes * self.cutoff if self.max_total is None else self.max_total
        for occ in _occupations(self.modes, self.cutoff, budget):
            basis.append(occ)
            if len(basis) > MAX_DIM:
                raise DimensionError(f"register dimension exceeds {MAX_DIM}")
        self.basis = basis
        self.index = {occ: i for i, occ in enumerate(basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ladder_weight(self) -> float:
        """``sqrt(L / (2 pi dk))``: continuum operator = weight * standard operator."""
        return math.sqrt(self.L_quant / (2.0 * math.pi * self.dk))

    def same_grid(self, other) -> bool:
        return (
            self.modes == other.modes
            and self.cutoff == other.cutoff
            and self.max_total == other.max_total
            and self.dk == other.dk
            and self.L_quant == other.L_quant
        )

    def total_photons(self) -> np.ndarray:
        return np.array([sum(occ) for occ in self.basis])

    def lowering(self, mode) -> np.ndarray:
        """Standard bosonic ``b_mode`` (unit commutator) on the truncated basis."""
        b = np.zeros((self.dim, self.dim))
        for j, occ in enumerate(self.basis):
            n = occ[mode]
            if n:
                target = occ[:mode] + (n - 1,) + occ[mode + 1 :]
                b[self.index[target], j] = math.sqrt(n)
        return b

    def annihilation(self, mode) -> np.ndarray:
        """Continuum-normalised ``a_k`` for grid point ``mode``."""
        return self.ladder_weight * self.lowering(mode)

    def creation(self, mode) -> np.ndarray:
        return self.annihilation(mode).T.copy()

    def vacuum_ket(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[(0,) * self.modes]] = 1.0
        return v

    def number_ket(self, occupations, continuum=False) -> np.ndarray:
        """``|n_0 ... n_{M-1}>``; with ``continuum=True`` it is built as
        ``prod (a_k^dag)^n / sqrt(n!) |0>`` and carries the grid delta norm."""
        occ = tuple(int(n) for n in occupations)
        if occ not in self.index:
            raise DimensionError(f"occupation {occ} outside the truncated basis")
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[occ]] = 1.0
        if continuum:
            v *= self.ladder_weight ** sum(occ)
        return v


@dataclass(frozen=True)
class TruncatedFockRegister:
    """A state on a :class:`FockSpace`: a ket (1-D) or a density matrix (2-D)."""

    space: FockSpace
    state: np.ndarray

    def __post_init__(self):
        st = np.asarray(self.state, dtype=complex)
        object.__setattr__(self, "state", st)
        d = self.space.dim
        if st.shape not in ((d,), (d, d)):
            raise DimensionError(f"state shape {st.shape} does not match dimension {d}")

    @property
    def is_pure(self) -> bool:
        return self.state.ndim == 1

    @property
    def ket(self) -> np.ndarray:
        if not self.is_pure:
            raise InvalidStateError("register holds a mixed state")
        return self.state

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.state, self.state.conj())
        return self.state

    def check_valid(self, tol=NORM_TOL):
        rho = self.density()
        if abs(np.trace(rho) - 1.0) > tol:
            raise InvalidStateError(f"trace {np.trace(rho).real} != 1")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
            raise InvalidStateError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -1e-9:
            raise InvalidStateError("density matrix is not positive semidefinite")
        return self

    def to_json(self) -> str:
        sp = self.space
        payload = {
            "modes": sp.modes,
            "cutoff": sp.cutoff,
            "max_total": sp.max_total,
            "dk": sp.dk,
            "L_quant": sp.L_quant,
            "kind": "ket" if self.is_pure else "density",
            "state": np.stack([self.state.real, self.state.imag], axis=-1).tolist(),
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text) -> "TruncatedFockRegister":
        d = json.loads(text)
        space = FockSpace(d["modes"], d["cutoff"], d["max_total"], d["dk"], d["L_quant"])
        arr = np.asarray(d["state"], dtype=float)
        return cls(space, arr[..., 0] + 1j * arr[..., 1])


def make_single_photon(profile: SpectralProfile, cutoff=1, max_total=1) -> TruncatedFockRegister:
    """``|1; phi'> = sqrt(2 pi / L) sum_k phi'(k) dk a_k^dag |0>`` on the grid.

    The default ``max_total=1`` keeps only the zero- and one-photon sectors,
    so wide grids (tens of modes) stay well inside the dimension limit.
    """
    if not profile.is_normalized():
        raise UnphysicalParameterError(f"profile norm {profile.norm} != 1")
    space = FockSpace(profile.k.size, cutoff, max_total, profile.dk, profile.L_quant)
    vac = space.vacuum_ket()
    psi = np.zeros(space.dim, dtype=complex)
    for i, amp in enumerate(profile.amplitudes):
        if amp != 0:
            psi += amp * profile.dk * (space.creation(i) @ vac)
    psi *= math.sqrt(2.0 * math.pi / profile.L_quant)
    return TruncatedFockRegister(space, psi)


def fock_inner(state_a, state_b) -> complex:
    """``<a|b>`` for two kets (registers or raw vectors on the same space)."""
    if isinstance(state_a, TruncatedFockRegister) and isinstance(state_b, TruncatedFockRegister):
        if not state_a.space.same_grid(state_b.space):
            raise DimensionError("registers live on different grids")
        a, b = state_a.ket, state_b.ket
    else:
        a = state_a.ket if isinstance(state_a, TruncatedFockRegister) else np.asarray(state_a)
        b = state_b.ket if isinstance(state_b, TruncatedFockRegister) else np.asarray(state_b)
        if a.shape != b.shape:
            raise DimensionError("kets have different dimensions")
    return complex(np.vdot(a, b))


def coherent_overlap(n, alpha) -> complex:
    """``<n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!)``, evaluated in log space."""
    if n < 0:
        raise ValueError("photon number must be non-negative")
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise OverflowError("non-finite displacement")
    r = abs(alpha)
    if r == 0.0:
        return 1.0 + 0.0j if n == 0 else 0.0j
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * math.lgamma(n + 1)
    phase = n * math.atan2(alpha.imag, alpha.real)
    return math.exp(log_mag) * complex(math.cos(phase), math.sin(phase))


def coherent_ket(alpha, cutoff) -> np.ndarray:
    """Single-mode coherent state truncated at ``cutoff`` (not renormalised)."""
    return np.array([coherent_overlap(n, alpha) for n in range(cutoff + 1)])


def number_expectation(register: TruncatedFockRegister, k_range=None) -> float:
    """``<n_{k1,k2}> = sum over grid points in [k1, k2] of (2 pi / L) a^dag a dk``.

    ``k_range`` is a pair of grid indices (inclusive); ``None`` means all modes.
    """
    sp = register.space
    lo, hi = (0, sp.modes - 1) if k_range is None else k_range
    if not (0 <= lo <= hi < sp.modes):
        raise DimensionError(f"k range {k_range} outside grid of {sp.modes} modes")
    rho = register.density()
    total = 0.0
    for i in range(lo, hi + 1):
        a = sp.annihilation(i)
        op = (2.0 * math.pi / sp.L_quant) * sp.dk * (a.T @ a)
        total += np.real(np.trace(op @ rho))
    return float(total)


def normal_ordered_string(space: FockSpace, l) -> np.ndarray:
    """``sum over (k_1..k_l) dk^l a^dag_{k_l}..a^dag_{k_1} a_{k_1}..a_{k_l}`` by brute force."""
    dim = space.dim
    if l == 0:
        return np.eye(dim)
    ann = [space.annihilation(i) for i in range(space.modes)]
    cre = [a.T for a in ann]
    out = np.zeros((dim, dim))
    for ks in itertools.product(range(space.modes), repeat=l):
        op = np.eye(dim)
        for k in reversed(ks):  # rightmost factor a_{k_l} acts first
            op = ann[k] @ op
        for k in ks:
            op = cre[k] @ op
        out += op
    return out * space.dk**l


def vacuum_projector_expansion_check(M, n_max, l_max=None, dk=1.0, L_quant=2.0 * math.pi) -> float:
    """Max deviation between the truncated ladder-operator series and ``|0><0|``.

    The series ``sum_l (-1)^l / l! (2 pi / L)^l (normal-ordered l-strings)`` is
    compared with the vacuum projector on the subspace of total photon number
    ``<= l_max``; it is exact there, so the result is pure round-off.
    """
    if l_max is None:
        l_max = M * n_max
    if (n_max + 1) ** M > MAX_DIM:
        raise DimensionError(f"({n_max}+1)^{M} exceeds {MAX_DIM}")
    space = FockSpace(M, n_max, dk=dk, L_quant=L_quant)
    series = np.zeros((space.dim, space.dim))
    for l in range(l_max + 1):
        coeff = (-1) ** l / math.factorial(l) * (2.0 * math.pi / L_quant) ** l
        series += coeff * normal_ordered_string(space, l)
    vac = space.vacuum_ket().real
    target = np.outer(vac, vac)
    keep = space.total_photons() <= l_max
    diff = (series - target)[np.ix_(keep, keep)]
    return float(np.max(np.abs(diff), initial=0.0))


def displacement(alpha, cutoff) -> np.ndarray:
    """Truncated ``D(alpha) = exp(alpha b^dag - alpha* b)`` via the matrix exponential."""
    from scipy.linalg import expm

    b = np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)
    return expm(alpha * b.conj().T - np.conj(alpha) * b)


def loss_kraus(f, cutoff) -> list:
    """Kraus operators of ``a -> f a`` (pure loss with vacuum environment) on one mode.

    ``E_n = sqrt((1 - |f|^2)^n / n!) f^N b^n``.
    """
    eta = abs(f) ** 2
    if eta > 1.0 + 1e-12:
        raise UnphysicalParameterError(f"|f| = {abs(f)} > 1")
    b = np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)
    f_num = np.diag(np.asarray([complex(f) ** n for n in range(cutoff + 1)]))
    ops = []
    bn = np.eye(cutoff + 1, dtype=complex)
    for n in range(cutoff + 1):
        ops.append(math.sqrt(max(0.0, 1.0 - eta) ** n / math.factorial(n)) * f_num @ bn)
        bn = b @ bn
    return ops


def embed_single_mode(op, mode, space: FockSpace) -> np.ndarray:
    """Lift a single-mode ``(cutoff+1)^2`` operator onto ``mode`` of ``space``."""
    dim = space.dim
    out = np.zeros((dim, dim), dtype=complex)
    for j, occ in enumerate(space.basis):
        n = occ[mode]
        for m in range(space.cutoff + 1):
            amp = op[m, n]
            if amp == 0:
                continue
            target = occ[:mode] + (m,) + occ[mode + 1 :]
            i = space.index.get(target)
            if i is not None:
                out[i, j] += amp
    return out
