import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from eitsim import bell
from eitsim.bell import (
    CHResult,
    DisplacementSetting,
    ch_closed_form,
    ch_excess,
    ch_fock,
    ch_from_probs,
    ch_pipeline,
    click_operator,
    critical_threshold,
    minimize_ch,
    no_count_probs,
    no_count_probs_fock,
    no_count_projector,
    poisson_tail,
    violation_boundary,
)
from eitsim.errors import InvalidStateError, UnphysicalParameterError
from eitsim.fockspace import coherent_ket
from eitsim.memorychannel import bell_state_retrieved, random_density_matrix

VACUUM = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
etas = st.floats(0.0, 1.0)


def small_alpha():
    return st.builds(complex, st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))


# --- no-count probabilities -------------------------------------------------


@given(small_alpha(), small_alpha())
def test_vacuum_no_count_is_coherent_weight(alpha, beta):
    qa, qb, qab = no_count_probs(VACUUM, alpha, beta)
    assert abs(qa - math.exp(-abs(alpha) ** 2)) < 1e-15
    assert abs(qb - math.exp(-abs(beta) ** 2)) < 1e-15
    assert abs(qab - qa * qb) < 1e-15


@given(etas, etas)
def test_zero_displacement_no_count_is_vacuum_weight(ea, eb):
    _, _, qab = no_count_probs(bell_state_retrieved(ea, eb), 0.0, 0.0)
    assert abs(qab - (1 - ea / 2 - eb / 2)) < 1e-15


def test_analytic_probabilities_match_fock_oracle(rng):
    worst = 0.0
    for _ in range(10):
        rho = random_density_matrix(2, rng)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        a, b = a / abs(a) * rng.uniform(0, 1.4), b / abs(b) * rng.uniform(0, 1.4)
        analytic = no_count_probs(rho, a, b)
        oracle = no_count_probs_fock(rho, a, b, cutoff=20)
        worst = max(worst, max(abs(x - y) for x, y in zip(analytic, oracle)))
    assert worst < 1e-8


def test_general_states_need_fock_path():
    with pytest.raises(InvalidStateError):
        no_count_probs(np.eye(9) / 9, 0.5, 0.5)
    # the oracle takes a full two-mode register
    d = 13
    rho = np.zeros((d * d, d * d), dtype=complex)
    rho[0, 0] = 1.0
    qa, qb, _ = no_count_probs_fock(rho, 0.7, 0.0, cutoff=12)
    assert abs(qa - math.exp(-0.49)) < 1e-10
    assert abs(qb - 1.0) < 1e-15
    with pytest.raises(InvalidStateError):
        no_count_probs_fock(rho, 0.7, 0.0, cutoff=5)


@given(st.integers(0, 2**31))
def test_probability_sanity_random_states(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(2, rng)
    a, b = rng.normal(scale=1.5, size=2) + 1j * rng.normal(scale=1.5, size=2)
    qa, qb, qab = no_count_probs(rho, a, b)
    pa, pb, pab = bell._click_probs(qa, qb, qab)
    for p in (qa, qb, qab, pa, pb, pab):
        assert -1e-12 <= p <= 1 + 1e-12
    assert pab <= min(pa, pb) + 1e-12


@pytest.mark.parametrize("alpha", [0.0, 0.6, 1.0 - 0.4j, 1.4j])
def test_povm_completeness_on_truncated_space(alpha):
    cutoff = 20
    total = no_count_projector(alpha, cutoff) + click_operator(alpha, cutoff)
    assert np.max(np.abs(total - np.eye(cutoff + 1))) < 1e-12
    # the truncated displaced vacuum differs from the exact one by the Poisson tail
    q = no_count_projector(alpha, cutoff)
    c = coherent_ket(alpha, cutoff)
    low = slice(0, 10)
    dev = np.max(np.abs(q[low, low] - np.outer(c, c.conj())[low, low]))
    assert dev < 1e-10 + 10 * math.sqrt(poisson_tail(abs(alpha) ** 2, cutoff))


# --- CH combination ---------------------------------------------------------


@given(small_alpha(), small_alpha())
def test_vacuum_ch_is_product_of_click_probs(alpha, beta):
    res = ch_from_probs(VACUUM, (0.0, alpha), (0.0, beta))
    expected = -(1 - math.exp(-abs(alpha) ** 2)) * (1 - math.exp(-abs(beta) ** 2))
    assert abs(res.value - expected) < 1e-15
    assert -1.0 <= res.value <= 0.0


def test_perfect_memories_zero_displacement():
    assert abs(ch_pipeline(1.0, 1.0, 0.0) + 1.0) < 1e-15


@given(etas, etas, st.floats(0.0, 6.0))
def test_closed_form_equals_pipeline(ea, eb, J):
    assert abs(ch_pipeline(ea, eb, J) - ch_closed_form(ea, eb, J)) < 1e-10


@pytest.mark.parametrize("J", [0.1, 0.5, 1.0, 2.0])
def test_pipeline_matches_fock_oracle(J):
    s = DisplacementSetting.symmetric(J)
    rho = bell_state_retrieved(0.7, 0.9)
    assert abs(ch_fock(rho, (0.0, s.alpha), (0.0, s.beta)) - ch_closed_form(0.7, 0.9, J)) < 1e-8


def test_closed_form_examples():
    J = np.linspace(0.0, 10.0, 101)
    assert np.max(np.abs(ch_closed_form(0.0, 0.0, J) + (1 - np.exp(-J)) ** 2)) < 1e-15
    for ea, eb in [(0.3, 0.8), (1.0, 1.0), (0.0, 0.5)]:
        assert abs(ch_closed_form(ea, eb, 0.0) + (ea + eb) / 2) < 1e-15


@given(etas, etas, st.floats(0.0, 30.0))
def test_excess_equals_closed_form_plus_one(ea, eb, J):
    assert abs(ch_excess(ea, eb, J) - (ch_closed_form(ea, eb, J) + 1.0)) < 1e-15


def test_closed_form_matches_mpmath():
    for ea, eb, J in [(0.2, 0.9, 0.4), (1.0, 0.6, 3.0), (0.95, 0.95, 0.27)]:
        assert abs(ch_closed_form(ea, eb, J) - float(oracles.ch_mp(ea, eb, J))) < 1e-15


def test_closed_form_validation():
    with pytest.raises(UnphysicalParameterError):
        ch_closed_form(1.2, 0.5, 1.0)
    with pytest.raises(UnphysicalParameterError):
        ch_closed_form(0.5, 0.5, -0.1)
    with pytest.raises(UnphysicalParameterError):
        DisplacementSetting.symmetric(-1.0)


def test_separable_benchmark_never_below_minus_one():
    J = 5.0 * np.arange(1, 10_001) / 10_000
    vals = ch_closed_form(0.0, 0.0, J)
    assert vals.min() >= -1 - 1e-12
    assert vals.max() <= 0.0


def test_displacement_setting():
    s = DisplacementSetting.symmetric(0.49)
    assert s.alpha == 0.7 and s.beta == -0.7
    assert abs(s.J - 0.49) < 1e-15


# --- minimisation and threshold ---------------------------------------------


def test_minimum_for_perfect_memories():
    res = minimize_ch(1.0, 1.0)
    assert res.violates and not res.at_boundary
    assert abs(res.value - oracles.FROZEN_CH_MIN_11) < 1e-12
    assert abs(res.j_at_min - oracles.FROZEN_J_STAR_11) < 1e-6
    assert res.settings == DisplacementSetting.symmetric(res.j_at_min)


def test_minimum_095_diagonal():
    res = minimize_ch(0.95, 0.95)
    assert abs(res.value - oracles.FROZEN_CH_MIN_095) < 1e-12
    assert res.value < -1


def test_no_violation_at_080():
    res = minimize_ch(0.80, 0.80)
    assert not res.violates
    assert res.value >= -1


def test_separable_minimum_is_the_infimum():
    res = minimize_ch(0.0, 0.0)
    assert res.at_boundary
    assert res.value == -1.0 and res.j_at_min == bell.J_CAP
    assert not res.violates


def test_minimizer_is_deterministic():
    assert minimize_ch(0.91, 0.93) == minimize_ch(0.91, 0.93)


def test_minimum_non_increasing_along_diagonal():
    values = [minimize_ch(e, e).value for e in np.linspace(0.0, 1.0, 101)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_interior_local_minimum_above_limit_reports_limit():
    J = np.linspace(0.05, 1.0, 2001)
    assert ch_closed_form(0.87, 0.87, J).min() > -1  # a dip exists but stays above -1
    res = minimize_ch(0.87, 0.87)
    assert res.at_boundary and res.value == -1.0 and res.excess == 0.0
    assert res.j_at_min == bell.J_CAP


def test_minimum_beats_dense_grid():
    J = np.linspace(1e-4, 5.0, 50_001)
    for ea, eb in [(1.0, 1.0), (0.9, 1.0), (0.97, 0.92)]:
        assert minimize_ch(ea, eb).value <= ch_closed_form(ea, eb, J).min() + 1e-15


def test_critical_threshold():
    eta = critical_threshold()
    assert 0.894 <= eta <= 0.900
    assert abs(eta - oracles.FROZEN_THRESHOLD) < 1e-6
    assert minimize_ch(eta + 0.01, eta + 0.01).value < -1
    below = minimize_ch(eta - 0.01, eta - 0.01)
    # below threshold the interior dip stays above -1; the infimum is the large-J limit
    assert not below.violates and below.value == -1.0 and below.at_boundary
    assert ch_closed_form(eta - 0.01, eta - 0.01, np.linspace(0.01, 5, 501)).min() > -1


def test_violation_boundary():
    eta = critical_threshold()
    assert abs(violation_boundary(eta) - eta) < 1e-5
    assert violation_boundary(0.5) is None
    eb = violation_boundary(1.0)
    assert eb is not None and 0.5 < eb < 0.9
    assert minimize_ch(1.0, eb + 1e-4).violates
    assert not minimize_ch(1.0, eb - 1e-4).violates


def test_chresult_violation_uses_excess():
    assert CHResult(-1.0, 0.3, excess=-1e-18).violates
    assert not CHResult(-1.0, 0.3, excess=0.0).violates
    assert CHResult(-1.2, 0.3).violates
