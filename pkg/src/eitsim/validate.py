"""Oracle-equivalence suites shared by the CLI ``validate`` experiment and the tests.

Each suite returns a :class:`SuiteResult`; nothing here raises on a failed
comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import bell, fockspace, memorychannel, polariton
from .errors import EitsimError
from .polariton import CouplingSchedule, MemoryParams


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    max_deviation: float
    tolerance: float
    cases: int
    seconds: float = 0.0
    error: str | None = None

    def to_dict(self):
        return asdict(self)


def _finish(name, devs, tol, t0):
    worst = float(max(devs)) if devs else 0.0
    return SuiteResult(name, bool(worst < tol), worst, tol, len(devs), time.perf_counter() - t0)


def random_memory_case(rng, detuned=True):
    """Random parameters and a store/retrieve schedule with assorted ramp shapes."""
    G = float(10 ** rng.uniform(2.0, 4.0))
    params = MemoryParams(
        gamma21=float(rng.uniform(0.0, 2.0)),
        gamma31=float(rng.uniform(0.5, 3.0)),
        delta=float(rng.uniform(-1.0, 1.0)) if detuned else 0.0,
        delta_p=float(rng.uniform(-2.0, 2.0)) if detuned else 0.0,
        coupling_strength_sq=G,
    )
    omega0 = math.sqrt(G) * float(rng.uniform(3.0, 30.0))
    t1 = float(rng.uniform(0.5, 2.0))
    dts = float(rng.uniform(0.5, 5.0))
    t2 = t1 + dts
    t_end = t2 + float(rng.uniform(0.5, 2.0))
    kind = rng.integers(0, 3)
    if kind == 0:
        schedule = CouplingSchedule.storage_retrieval(omega0, t1, t2, t_end, ramp=0.0)
    else:
        shape = "linear" if kind == 1 else "smooth"
        ramp = float(rng.uniform(0.05, 0.4)) * dts
        steep = float(rng.uniform(0.5, 3.0))
        schedule = CouplingSchedule.storage_retrieval(omega0, t1, t2, t_end, ramp=ramp, shape=shape, steepness=steep)
    return params, schedule


def suite_quadrature_vs_ode(n_cases=50, seed=0, tol=1e-6):
    """``|f|`` by quadrature vs the k = 0 ODE amplitude ratio, plus the full
    complex ratio at k != 0 against ``f * exp(i c k int g2)``."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    devs = []
    for i in range(n_cases):
        params, schedule = random_memory_case(rng, detuned=i % 2 == 1)
        f = polariton.attenuation_factor(params, schedule).value
        psi = polariton.dsp_evolve_numeric(params, schedule, 0.0, 1.0)
        devs.append(abs(abs(psi) - abs(f)) / abs(f))
        ck = float(rng.uniform(-2.0, 2.0))
        i2, _ = polariton.integrate_g(params, schedule, which=2)
        expected = f * np.exp(1j * ck * i2)
        got = polariton.dsp_evolve_numeric(params, schedule, ck, 1.0)
        devs.append(abs(got - expected) / abs(expected))
    return _finish("quadrature_vs_ode", devs, tol, t0)


def suite_channel_equivalence(n_states=100, seed=0, tol=1e-12, max_qubits=3):
    """Elementwise map vs Kraus tensor product vs multimode Fock loss simulation."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    devs = []
    for i in range(n_states):
        n = 1 + i % max_qubits
        rho = memorychannel.random_density_matrix(n, rng)
        f = rng.uniform(0.0, 1.0, n) * np.exp(1j * rng.uniform(0, 2 * math.pi, n))
        out = memorychannel.store_retrieve_nqubit(rho, f).matrix
        kraus = memorychannel.kraus_channel(rho, f)
        fock = memorychannel.fock_channel_oracle(rho, f)
        devs.append(np.max(np.abs(out - kraus)))
        devs.append(np.max(np.abs(out - fock)))
    return _finish("channel_vs_kraus_vs_fock", devs, tol, t0)


def suite_ch_closed_vs_povm(n_eta=21, n_j=50, j_max=5.0, tol=1e-10):
    t0 = time.perf_counter()
    etas = np.linspace(0.0, 1.0, n_eta)
    js = np.linspace(j_max / n_j, j_max, n_j)
    devs = []
    for ea in etas:
        for eb in etas:
            closed = bell.ch_closed_form(ea, eb, js)
            for J, c in zip(js, closed):
                devs.append(abs(bell.ch_pipeline(ea, eb, J) - c))
    return _finish("ch_closed_form_vs_povm", devs, tol, t0)


def suite_povm_vs_fock(n_cells=20, seed=0, cutoff=20, tol=1e-8, j_max=2.5):
    """Analytic POVM probabilities vs the truncated-Fock displaced projectors."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    devs = []
    for _ in range(n_cells):
        ea, eb = rng.uniform(0.0, 1.0, 2)
        J = float(rng.uniform(0.05, j_max))
        s = bell.DisplacementSetting.symmetric(J)
        rho = memorychannel.bell_state_retrieved(ea, eb)
        analytic = bell.ch_from_probs(rho, (0.0, s.alpha), (0.0, s.beta)).value
        oracle = bell.ch_fock(rho, (0.0, s.alpha), (0.0, s.beta), cutoff)
        devs.append(abs(analytic - oracle))
        devs.append(abs(bell.ch_closed_form(ea, eb, J) - oracle))
    return _finish("povm_vs_truncated_fock", devs, tol, t0)


def suite_vacuum_projector(configs=((1, 3), (2, 2), (3, 1)), tol=1e-10):
    t0 = time.perf_counter()
    devs = [fockspace.vacuum_projector_expansion_check(M, n) for M, n in configs]
    return _finish("vacuum_projector_expansion", devs, tol, t0)


def suite_threshold(lo=0.894, hi=0.900):
    t0 = time.perf_counter()
    eta = bell.critical_threshold()
    # deviation: distance outside the accepted window (0 when inside)
    dev = max(0.0, lo - eta, eta - hi)
    return _finish("critical_threshold", [dev], 1e-15, t0)


def suite_factor_fixture(factors, seed=0):
    """Run the channel on a random state with user-supplied attenuation factors."""
    t0 = time.perf_counter()
    factors = [complex(*f) if isinstance(f, (list, tuple)) else complex(f) for f in factors]
    rng = np.random.default_rng(seed)
    rho = memorychannel.random_density_matrix(len(factors), rng)
    try:
        out = memorychannel.store_retrieve_nqubit(rho, factors).matrix
    except EitsimError as exc:
        return SuiteResult("channel_factor_fixture", False, math.inf, 1e-12, 1,
                           time.perf_counter() - t0, f"{type(exc).__name__}: {exc}")
    dev = float(np.max(np.abs(out - memorychannel.kraus_channel(rho, factors))))
    return _finish("channel_factor_fixture", [dev], 1e-12, t0)


def run_all(seed=0, channel_factors=None):
    suites = [
        suite_quadrature_vs_ode(seed=seed),
        suite_channel_equivalence(seed=seed),
        suite_ch_closed_vs_povm(),
        suite_povm_vs_fock(seed=seed),
        suite_vacuum_projector(),
        suite_threshold(),
    ]
    if channel_factors is not None:
        suites.append(suite_factor_fixture(channel_factors, seed=seed))
    return suites


__all__ = [
    "SuiteResult",
    "run_all",
    "random_memory_case",
    "suite_ch_closed_vs_povm",
    "suite_channel_equivalence",
    "suite_factor_fixture",
    "suite_povm_vs_fock",
    "suite_quadrature_vs_ode",
    "suite_threshold",
    "suite_vacuum_projector",
]
