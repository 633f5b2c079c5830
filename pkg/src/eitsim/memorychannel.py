"""Retrieved-state maps on single-rail logical registers.

Basis order is ``|i_1 ... i_N>`` with ``i_1`` the most significant bit;
logical ``|0>`` is the vacuum of memory ``r`` and logical ``|1>`` its
one-photon wavepacket.  The wavepacket profile is carried as metadata only:
it is the same at input and output, so it drops out of the logical matrix.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidStateError, UnphysicalParameterError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-9
ENCODINGS = ("single-rail", "path", "polarization")
_F_TOL = 1e-12


@dataclass(frozen=True)
class LogicalDensityMatrix:
    matrix: np.ndarray
    encoding: str = "single-rail"
    profiles: tuple = field(default=(), compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {m.shape}")
        n = m.shape[0].bit_length() - 1
        if n < 1 or m.shape[0] != 1 << n:
            raise InvalidStateError(f"dimension {m.shape[0]} is not 2^N")
        if self.encoding not in ENCODINGS:
            raise InvalidStateError(f"unknown encoding {self.encoding!r}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace {np.trace(m).real!r} != 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise InvalidStateError("density matrix has a negative eigenvalue")

    @property
    def n_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket, **kw) -> "LogicalDensityMatrix":
        v = np.asarray(ket, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), **kw)

    def to_json(self) -> str:
        """Row-major ``[re, im]`` pairs; basis ``|i_1..i_N>`` with ``i_1`` most significant."""
        return json.dumps(
            {
                "n_qubits": self.n_qubits,
                "encoding": self.encoding,
                "basis_order": "i1_most_significant",
                "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix.tolist()],
            }
        )

    @classmethod
    def from_json(cls, text) -> "LogicalDensityMatrix":
        d = json.loads(text)
        arr = np.asarray(d["matrix"], dtype=float)
        obj = cls(arr[..., 0] + 1j * arr[..., 1], encoding=d.get("encoding", "single-rail"))
        if obj.n_qubits != d["n_qubits"]:
            raise InvalidStateError("n_qubits does not match matrix dimension")
        return obj


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, LogicalDensityMatrix):
        return rho.matrix
    return LogicalDensityMatrix(rho).matrix


def _check_factors(factors, n_qubits) -> np.ndarray:
    f = np.atleast_1d(np.asarray([complex(getattr(x, "value", x)) for x in np.ravel(factors)]))
    if f.size != n_qubits:
        raise InvalidStateError(f"{f.size} attenuation factors for a {n_qubits}-qubit state")
    if not np.all(np.isfinite(f)):
        raise UnphysicalParameterError("non-finite attenuation factor")
    if np.any(np.abs(f) > 1.0 + _F_TOL):
        raise UnphysicalParameterError(f"attenuation factor with |f| > 1: {f}")
    return f


def _hermitize(out) -> np.ndarray:
    sym = 0.5 * (out + out.conj().T)
    drift = np.max(np.abs(sym - out))
    assert drift < 1e-12, f"channel output lost Hermiticity by {drift:.3e}"
    return sym


def store_retrieve_nqubit(rho_in, factors, phase_correct=False) -> LogicalDensityMatrix:
    """Apply the per-memory retrieval map to an N-qubit logical state.

    For every memory ``r`` a coherence between logical 0 and 1 picks up
    ``f_r`` (or ``f_r*``), the 11 population scales by ``|f_r|^2`` and the
    lost part ``1 - |f_r|^2`` of it is folded into the 00 population.

    Parameters
    ----------
    rho_in : LogicalDensityMatrix or array_like
    factors : sequence of complex or AttenuationFactor
        One per memory, ``|f_r| <= 1``.
    phase_correct : bool
        Replace each ``f_r`` by ``|f_r|`` (a phase shifter on each output port).
    """
    rho = _as_matrix(rho_in)
    n = rho.shape[0].bit_length() - 1
    f = _check_factors(factors, n)
    if phase_correct:
        f = np.abs(f).astype(complex)
    out = kernels.channel_map(np.ascontiguousarray(rho), f)
    encoding = rho_in.encoding if isinstance(rho_in, LogicalDensityMatrix) else "single-rail"
    return LogicalDensityMatrix(_hermitize(out), encoding=encoding)


def store_retrieve_qubit(rho_in, f, phase_correct=False) -> LogicalDensityMatrix:
    """Single-rail qubit: ``[[r00 + (1-|f|^2) r11, f* r01], [f r10, |f|^2 r11]]``."""
    rho = _as_matrix(rho_in)
    if rho.shape != (2, 2):
        raise InvalidStateError("store_retrieve_qubit expects a 2x2 state")
    f = _check_factors([f], 1)[0]
    if phase_correct:
        f = complex(abs(f))
    eta = abs(f) ** 2
    out = np.array(
        [
            [rho[0, 0] + (1 - eta) * rho[1, 1], np.conj(f) * rho[0, 1]],
            [f * rho[1, 0], eta * rho[1, 1]],
        ]
    )
    encoding = rho_in.encoding if isinstance(rho_in, LogicalDensityMatrix) else "single-rail"
    return LogicalDensityMatrix(_hermitize(out), encoding=encoding)


def qubit_kraus(f) -> tuple:
    f = complex(f)
    k0 = np.array([[1, 0], [0, f]], dtype=complex)
    k1 = np.array([[0, math.sqrt(max(0.0, 1 - abs(f) ** 2))], [0, 0]], dtype=complex)
    return k0, k1


def kraus_channel(rho_in, factors) -> np.ndarray:
    """Oracle: the N-fold tensor product of per-memory qubit Kraus pairs."""
    rho = _as_matrix(rho_in)
    n = rho.shape[0].bit_length() - 1
    f = _check_factors(factors, n)
    pairs = [qubit_kraus(x) for x in f]
    out = np.zeros_like(rho)
    for choice in itertools.product((0, 1), repeat=n):
        K = np.ones((1, 1), dtype=complex)
        for r, c in enumerate(choice):
            K = np.kron(K, pairs[r][c])
        out += K @ rho @ K.conj().T
    return out


def choi_matrix(f) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) channel(|i><j|)`` of the qubit map (no validation)."""
    f = complex(f)
    eta = abs(f) ** 2
    choi = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            out = np.array([[e[0, 0] + (1 - eta) * e[1, 1], np.conj(f) * e[0, 1]], [f * e[1, 0], eta * e[1, 1]]])
            choi[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = out
    return choi


def bell_input_ket() -> np.ndarray:
    """``(|1_A 0_B> - |0_A 1_B>) / sqrt(2)`` in the ``|i_A i_B>`` basis."""
    return np.array([0.0, -1.0, 1.0, 0.0], dtype=complex) / math.sqrt(2.0)


def bell_state_retrieved(eta_a, eta_b) -> LogicalDensityMatrix:
    """Phase-corrected retrieved state of the path-entangled single photon.

    A five-term mixture: the surviving ``|10>``/``|01>`` block with weights
    ``eta/2`` and coherence ``-sqrt(eta_a eta_b)/2``, plus vacuum with the
    remaining weight.
    """
    for eta in (eta_a, eta_b):
        if not (0.0 <= eta <= 1.0):
            raise UnphysicalParameterError(f"efficiency {eta} outside [0, 1]")
    rho = np.zeros((4, 4), dtype=complex)
    c = -0.5 * math.sqrt(eta_a * eta_b)
    rho[2, 2] = 0.5 * eta_a  # |1_A 0_B>
    rho[1, 1] = 0.5 * eta_b  # |0_A 1_B>
    rho[2, 1] = c
    rho[1, 2] = c
    rho[0, 0] = 1.0 - 0.5 * eta_a - 0.5 * eta_b
    return LogicalDensityMatrix(rho, encoding="path")


def _psd_sqrt(m, tol):
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w.min() < -PSD_TOL:
        raise InvalidStateError(f"matrix is not PSD (eigenvalue {w.min():.3e})")
    w = np.where(w > tol, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T, w, v


def fidelity(rho, sigma) -> float:
    """Uhlmann (root) fidelity ``tr sqrt(sqrt(rho) sigma sqrt(rho))``.

    When either argument is pure the shortcut ``sqrt(<psi|other|psi>)`` is
    used; otherwise the trace norm of ``sqrt(rho) sqrt(sigma)``.  Eigenvalues
    below round-off (``64 eps * dim``) are treated as zero.
    """
    a = _as_matrix(rho)
    b = _as_matrix(sigma)
    if a.shape != b.shape:
        raise InvalidStateError(f"dimension mismatch {a.shape} vs {b.shape}")
    tol = 64 * np.finfo(float).eps * a.shape[0]
    sa, wa, va = _psd_sqrt(a, tol)
    sb, wb, vb = _psd_sqrt(b, tol)
    if np.count_nonzero(wa) == 1:
        psi = va[:, -1]
        return float(min(1.0, math.sqrt(max(0.0, np.real(psi.conj() @ b @ psi) * wa[-1]))))
    if np.count_nonzero(wb) == 1:
        psi = vb[:, -1]
        return float(min(1.0, math.sqrt(max(0.0, np.real(psi.conj() @ a @ psi) * wb[-1]))))
    sv = np.linalg.svd(sa @ sb, compute_uv=False)
    return float(min(1.0, np.sum(sv)))


def relabel_encoding(rho: LogicalDensityMatrix, encoding: str) -> LogicalDensityMatrix:
    """Same matrix under a different physical encoding (single-rail, path, polarization)."""
    if encoding not in ENCODINGS:
        raise InvalidStateError(f"unknown encoding {encoding!r}")
    return LogicalDensityMatrix(rho.matrix, encoding=encoding, profiles=rho.profiles)


def random_density_matrix(n_qubits, rng, rank=None) -> LogicalDensityMatrix:
    """Ginibre-distributed random state of the given rank (full rank by default)."""
    dim = 1 << n_qubits
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return LogicalDensityMatrix(m / np.trace(m).real)


def fock_channel_oracle(rho_in, factors, modes_per_memory=2, profiles=None) -> np.ndarray:
    """Oracle: embed logical state in a multimode Fock register, apply pure loss
    ``a_k -> f_r a_k`` to every k-mode of memory ``r``, project back.

    Each memory gets ``modes_per_memory`` grid points carrying its own
    wavepacket profile (random-ish but fixed if ``profiles`` is ``None``).
    """
    from .fockspace import FockSpace, embed_single_mode, loss_kraus

    rho = _as_matrix(rho_in)
    n = rho.shape[0].bit_length() - 1
    f = _check_factors(factors, n)
    K = modes_per_memory
    if profiles is None:
        profiles = []
        for r in range(n):
            amp = np.exp(1j * (0.7 * r + 0.3 * np.arange(K))) * (1.0 + 0.5 * np.arange(K))
            profiles.append(amp / np.linalg.norm(amp))
    space = FockSpace(n * K, cutoff=1)
    # logical |1> of memory r is sum_k phi_r(k) |1_k> on its own grid points
    V = np.zeros((space.dim, 1 << n), dtype=complex)
    for logical in range(1 << n):
        occ_amps = {(0,) * (n * K): 1.0 + 0j}
        for r in range(n):
            if logical >> (n - 1 - r) & 1:
                new = {}
                for occ, a in occ_amps.items():
                    for kidx, amp in enumerate(profiles[r]):
                        o = list(occ)
                        o[r * K + kidx] = 1
                        new[tuple(o)] = new.get(tuple(o), 0) + a * amp
                occ_amps = new
        for occ, a in occ_amps.items():
            V[space.index[occ], logical] = a
    big = V @ rho @ V.conj().T
    for r in range(n):
        kraus = loss_kraus(f[r], 1)
        for kidx in range(K):
            ops = [embed_single_mode(E, r * K + kidx, space) for E in kraus]
            big = sum(E @ big @ E.conj().T for E in ops)
    return V.conj().T @ big @ V
