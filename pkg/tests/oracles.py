"""Independent high-precision references (mpmath) and the values frozen from them.

The ``FROZEN_*`` constants were computed once with the functions below at 40
significant digits and are pinned here; ``test_oracles.py`` recomputes them
to guard against drift in either the oracle or the constants.
"""

import mpmath as mp

mp.mp.dps = 40

# Clauser-Horne minimum for perfect memories and its minimising J
FROZEN_CH_MIN_11 = -1.108677278627978423
FROZEN_J_STAR_11 = 0.260074189281400080
# mean efficiency on the diagonal where CH_min crosses -1
FROZEN_THRESHOLD = 0.89676119933171133
FROZEN_J_AT_THRESHOLD = 0.28052538821838897
FROZEN_CH_MIN_095 = -1.055943525827172087
FROZEN_J_STAR_095 = 0.268961001890126010

# generic detuned g-function evaluation
G_CASE = dict(gamma21=0.37, gamma31=1.9, delta=0.21, delta_p=-1.3, coupling_strength_sq=523.0, omega_c=17.5)
FROZEN_G1 = complex(0.62932811055042733131, -1.2419280560050314702e-4)
FROZEN_G2 = complex(0.37067188944957266869, 1.2419280560050314702e-4)


def ch_mp(eta_a, eta_b, J):
    ea, eb, J = mp.mpf(eta_a), mp.mpf(eta_b), mp.mpf(J)
    s = ea + eb
    q = (mp.sqrt(ea) + mp.sqrt(eb)) ** 2
    return -1 + mp.exp(-J) * (2 - s + J * s / 2) - mp.exp(-2 * J) * (1 - s / 2 + J * q / 2)


def ch_min_mp(eta_a, eta_b):
    """Stationary point of the closed form (found from a bracketing start near the minimum)."""
    d = lambda J: mp.diff(lambda x: ch_mp(eta_a, eta_b, x), J)
    j = mp.findroot(d, (mp.mpf("0.05"), mp.mpf("1.5")), solver="anderson")
    return ch_mp(eta_a, eta_b, j), j


def threshold_mp():
    """Diagonal efficiency where min_J CH = -1: solve CH = -1 and dCH/dJ = 0 jointly."""
    f1 = lambda eta, J: ch_mp(eta, eta, J) + 1
    f2 = lambda eta, J: mp.diff(lambda x: ch_mp(eta, eta, x), J)
    eta, J = mp.findroot([f1, f2], (mp.mpf("0.9"), mp.mpf("0.28")))
    return eta, J


def g_mp(gamma21, gamma31, delta, delta_p, coupling_strength_sq, omega_c):
    g21 = mp.mpc(gamma21, -2 * mp.mpf(delta))
    g31 = mp.mpc(gamma31, -2 * mp.mpf(delta_p))
    P = g21 * g31
    w2 = mp.mpf(omega_c) ** 2
    den = w2 + coupling_strength_sq + P
    return coupling_strength_sq / den, (w2 + P) / den
