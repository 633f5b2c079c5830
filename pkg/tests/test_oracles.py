"""Frozen reference values still match their mpmath derivation (to one ulp)."""

import math

import mpmath as mp

import oracles


def test_frozen_ch_minimum_perfect_memories():
    value, j = oracles.ch_min_mp(1, 1)
    assert abs(value - oracles.FROZEN_CH_MIN_11) <= math.ulp(oracles.FROZEN_CH_MIN_11)
    assert abs(j - oracles.FROZEN_J_STAR_11) <= math.ulp(oracles.FROZEN_J_STAR_11)


def test_frozen_ch_minimum_095():
    value, j = oracles.ch_min_mp(0.95, 0.95)
    assert abs(value - oracles.FROZEN_CH_MIN_095) <= math.ulp(oracles.FROZEN_CH_MIN_095)
    assert abs(j - oracles.FROZEN_J_STAR_095) <= math.ulp(oracles.FROZEN_J_STAR_095)


def test_frozen_threshold():
    eta, j = oracles.threshold_mp()
    assert abs(eta - oracles.FROZEN_THRESHOLD) <= math.ulp(oracles.FROZEN_THRESHOLD)
    assert abs(j - oracles.FROZEN_J_AT_THRESHOLD) <= math.ulp(oracles.FROZEN_J_AT_THRESHOLD)
    # it is a tangency: CH = -1 with zero slope
    assert abs(oracles.ch_mp(eta, eta, j) + 1) < mp.mpf(10) ** -30


def test_frozen_g_values():
    g1, g2 = oracles.g_mp(**oracles.G_CASE)
    assert abs(complex(g1) - oracles.FROZEN_G1) < 1e-15
    assert abs(complex(g2) - oracles.FROZEN_G2) < 1e-15
    assert abs(g1 + g2 - 1) < mp.mpf(10) ** -35
