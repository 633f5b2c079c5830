"""Acceptance criteria, one test per criterion.

``pytest -v tests/test_acceptance.py`` prints one PASSED/FAILED line each.
Runtime limits are checked on the wall clock of the measured call only.
"""

import math
import time

import numpy as np
import pytest

import oracles
from eitsim import bell, fockspace, memorychannel, polariton, sweeps, validate


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


@pytest.fixture(scope="module", autouse=True)
def _warm_kernels():
    # compile the numba kernels outside the timed regions
    bell.minimize_ch(0.9, 0.9)
    memorychannel.store_retrieve_nqubit(memorychannel.random_density_matrix(2, np.random.default_rng(0)), [0.5, 0.5])
    validate.suite_quadrature_vs_ode(n_cases=2)


def test_criterion_1_threshold_reproduction():
    with Timer() as t:
        eta = bell.critical_threshold()
    assert 0.894 <= eta <= 0.900
    assert abs(eta - 0.897) <= 0.003
    assert t.seconds < 10


def test_criterion_2_single_photon_storage_fidelity():
    ket1 = memorychannel.LogicalDensityMatrix.from_ket(np.array([0.0, 1.0]))
    with Timer() as t:
        worst = 0.0
        for eta in np.linspace(0.0, 1.0, 101):
            out = memorychannel.store_retrieve_qubit(ket1, math.sqrt(eta))
            worst = max(worst, abs(memorychannel.fidelity(out, ket1) - math.sqrt(eta)))
    assert worst < 1e-12
    assert t.seconds < 1


def test_criterion_3_bell_fidelity_surface():
    etas = np.linspace(0.0, 1.0, 11)
    with Timer() as t:
        _, rows = sweeps.bell_fidelity_surface(etas, etas)
    assert len(rows) == 121
    assert max(abs(r[2] - 0.5 * (math.sqrt(r[0]) + math.sqrt(r[1]))) for r in rows) < 1e-10
    assert t.seconds < 1


def test_criterion_4_channel_oracle_equivalence():
    with Timer() as t:
        res = validate.suite_channel_equivalence(n_states=100, seed=2024, tol=1e-12, max_qubits=3)
    assert res.cases == 200
    assert res.passed, res.max_deviation
    assert t.seconds < 30


def test_criterion_5_quadrature_vs_ode():
    with Timer() as t:
        res = validate.suite_quadrature_vs_ode(n_cases=50, seed=2024, tol=1e-6)
    assert res.passed, res.max_deviation
    assert t.seconds < 30


def test_criterion_6_ch_closed_form_vs_povm():
    with Timer() as t:
        grid = validate.suite_ch_closed_vs_povm(n_eta=21, n_j=50, tol=1e-10)
        fock = validate.suite_povm_vs_fock(n_cells=20, seed=2024, cutoff=20, tol=1e-8)
    assert grid.cases == 21 * 21 * 50 and grid.passed, grid.max_deviation
    assert fock.passed, fock.max_deviation
    assert t.seconds < 60


def test_criterion_7_local_hidden_variable_sanity():
    js = 5.0 * np.arange(1, bell.N_SCAN + 1) / bell.N_SCAN
    separable = bell.ch_closed_form(0.0, 0.0, js)
    assert separable.min() >= -1 - 1e-12 and separable.max() <= 0.0
    res = bell.minimize_ch(1.0, 1.0)
    assert res.value < -1
    assert abs(res.value - oracles.FROZEN_CH_MIN_11) < 1e-12
    assert abs(res.j_at_min - oracles.FROZEN_J_STAR_11) < 1e-6


def test_criterion_8_vacuum_projector_identity():
    with Timer() as t:
        devs = [fockspace.vacuum_projector_expansion_check(M, n) for M, n in ((1, 3), (2, 2), (3, 1))]
    assert max(devs) < 1e-10
    assert t.seconds < 10


def test_criterion_9_fidelity_curves():
    params = polariton.MemoryParams(0.0, 1.0, coupling_strength_sq=1e4)
    gammas = np.linspace(0.0, 1.0, 100)
    times = np.linspace(0.0, 10.0, 100)
    with Timer() as t:
        _, vs_gamma = sweeps.fidelity_sweep(params, gammas, [1.0, 5.0, 10.0])
        _, vs_time = sweeps.fidelity_sweep(params, [0.1, 0.5, 1.0], times, outer="gamma21")
    for rows in (vs_gamma, vs_time):
        fids = np.array([r[3] for r in rows]).reshape(3, 100)
        assert np.all(np.diff(fids, axis=1) < 0)
        assert np.all(fids[:, 0] == 1.0)
    assert t.seconds < 1
