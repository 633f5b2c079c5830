"""Hot numeric kernels.

Scalar kernels (schedule evaluation, adaptive Simpson, Dormand-Prince) are
written once and compiled by :func:`eitsim._backend.jit` when the numba
backend is active; otherwise they run as plain Python.  The two array kernels
(CH scan, logical channel map) have an explicit numba loop version and a
vectorised numpy twin; the public name points at whichever the backend flag
selects.

Schedule segments are passed as flat scalars: ``kind`` is one of
``HOLD``/``LINEAR``/``SMOOTH``, ``w0``/``w1`` are the start/end Rabi
frequencies, ``steep`` the smooth-ramp steepness and ``s0``/``s1`` the
segment's own time span.
"""

import math

import numpy as np

from ._backend import USE_NUMBA, always_jit, jit

HOLD = 0
LINEAR = 1
SMOOTH = 2

STATUS_OK = 0
STATUS_MAX_DEPTH = 1
STATUS_STEP_UNDERFLOW = 2
STATUS_MAX_STEPS = 3
STATUS_MAX_EVALS = 4

_STACK = 128
_RESOLUTION = 1e-13
_MAX_INTERVALS = 1_000_000  # Simpson refinement budget per segment


@jit
def omega_at(kind, w0, w1, steep, s0, s1, t):
    if kind == HOLD or s1 <= s0:
        return w0
    s = (t - s0) / (s1 - s0)
    if s <= 0.0:
        return w0
    if s >= 1.0:
        return w1
    if kind == LINEAR:
        return w0 + (w1 - w0) * s
    w = 0.5 * (1.0 - math.cos(math.pi * s))
    if steep != 1.0:
        wk = w**steep
        w = wk / (wk + (1.0 - w) ** steep)
    return w0 + (w1 - w0) * w


@jit
def g_value(which, omega, G, P):
    """``which=1`` gives g1, ``which=2`` gives g2 (complex)."""
    w2 = omega * omega
    den = w2 + G + P
    if which == 1:
        return G / den
    return (w2 + P) / den


@jit
def simpson_segment(which, kind, w0, w1, steep, s0, s1, a, b, G, P, tol, max_depth, min_depth):
    """Adaptive Simpson integral of g1 or g2 over ``[a, b]`` inside one segment.

    Returns ``(real, imag, error_estimate, status)``.  The acceptance test is
    applied to real and imaginary parts separately.  Refinement stops with a
    non-OK status at ``max_depth`` or after ``_MAX_INTERVALS`` splits.
    """
    if b <= a:
        return 0.0, 0.0, 0.0, STATUS_OK
    st_a = np.empty(_STACK)
    st_b = np.empty(_STACK)
    st_fa = np.empty(_STACK, dtype=np.complex128)
    st_fm = np.empty(_STACK, dtype=np.complex128)
    st_fb = np.empty(_STACK, dtype=np.complex128)
    st_s = np.empty(_STACK, dtype=np.complex128)
    st_tol = np.empty(_STACK)
    st_d = np.empty(_STACK, dtype=np.int64)

    fa = g_value(which, omega_at(kind, w0, w1, steep, s0, s1, a), G, P)
    fb = g_value(which, omega_at(kind, w0, w1, steep, s0, s1, b), G, P)
    m = 0.5 * (a + b)
    fm = g_value(which, omega_at(kind, w0, w1, steep, s0, s1, m), G, P)
    top = 0
    st_a[0] = a
    st_b[0] = b
    st_fa[0] = fa
    st_fm[0] = fm
    st_fb[0] = fb
    st_s[0] = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    st_tol[0] = tol
    st_d[0] = 0

    total = 0.0 + 0.0j
    err = 0.0
    status = STATUS_OK
    n_split = 0
    while top >= 0:
        xa = st_a[top]
        xb = st_b[top]
        ya = st_fa[top]
        ym = st_fm[top]
        yb = st_fb[top]
        whole = st_s[top]
        tl = st_tol[top]
        depth = st_d[top]
        top -= 1

        xm = 0.5 * (xa + xb)
        xl = 0.5 * (xa + xm)
        xr = 0.5 * (xm + xb)
        yl = g_value(which, omega_at(kind, w0, w1, steep, s0, s1, xl), G, P)
        yr = g_value(which, omega_at(kind, w0, w1, steep, s0, s1, xr), G, P)
        h = xb - xa
        left = h / 12.0 * (ya + 4.0 * yl + ym)
        right = h / 12.0 * (ym + 4.0 * yr + yb)
        delta = left + right - whole
        converged = abs(delta.real) <= 15.0 * tl and abs(delta.imag) <= 15.0 * tl
        # intervals a few ulps wide cannot be split further; their delta is roundoff
        if h <= _RESOLUTION * (abs(xa) + abs(xb)):
            converged = True
        n_split += 1
        exhausted = n_split > _MAX_INTERVALS
        if (converged and depth >= min_depth) or depth >= max_depth or top + 2 >= _STACK or exhausted:
            if not converged:
                status = STATUS_MAX_EVALS if exhausted else STATUS_MAX_DEPTH
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
            continue
        top += 1
        st_a[top] = xm
        st_b[top] = xb
        st_fa[top] = ym
        st_fm[top] = yr
        st_fb[top] = yb
        st_s[top] = right
        st_tol[top] = 0.5 * tl
        st_d[top] = depth + 1
        top += 1
        st_a[top] = xa
        st_b[top] = xm
        st_fa[top] = ya
        st_fm[top] = yl
        st_fb[top] = ym
        st_s[top] = left
        st_tol[top] = 0.5 * tl
        st_d[top] = depth + 1
    return total.real, total.imag, err, status


@jit
def dsp_rate(omega, G, g21p, g31p, ck):
    """Right-hand side coefficient of the momentum-space DSP equation, written
    in terms of the mixing angle (not via g1/g2)."""
    theta = math.atan2(math.sqrt(G), omega)
    s2 = math.sin(theta) ** 2
    c2 = math.cos(theta) ** 2
    P = g21p * g31p
    return (1j * ck * c2 - 0.5 * g21p * s2) + (1j * ck + 0.5 * g21p) * P * s2 * s2 / (G + P * s2)


@jit
def dopri_segment(kind, w0, w1, steep, s0, s1, a, b, G, g21p, g31p, ck, y0, rtol, atol, max_steps):
    """Dormand-Prince 5(4) integration of ``y' = rate(t) y`` from ``a`` to ``b``.

    Returns ``(y(b), status, n_steps)``.
    """
    if b <= a:
        return y0, STATUS_OK, 0
    t = a
    y = y0
    r0 = dsp_rate(omega_at(kind, w0, w1, steep, s0, s1, a), G, g21p, g31p, ck)
    h = b - a
    if abs(r0) > 0.0:
        h = min(h, 0.05 / abs(r0))
    steps = 0
    while t < b:
        if steps >= max_steps:
            return y, STATUS_MAX_STEPS, steps
        if h < 1e-13 * max(1.0, abs(t)):
            return y, STATUS_STEP_UNDERFLOW, steps
        if t + h > b:
            h = b - t
        k1 = dsp_rate(omega_at(kind, w0, w1, steep, s0, s1, t), G, g21p, g31p, ck) * y
        r = dsp_rate(omega_at(kind, w0, w1, steep, s0, s1, t + h / 5.0), G, g21p, g31p, ck)
        k2 = r * (y + h * (k1 / 5.0))
        r = dsp_rate(omega_at(kind, w0, w1, steep, s0, s1, t + 3.0 * h / 10.0), G, g21p, g31p, ck)
        k3 = r * (y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2))
        r = dsp_rate(omega_at(kind, w0, w1, steep, s0, s1, t + 4.0 * h / 5.0), G, g21p, g31p, ck)
        k4 = r * (y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3))
        r = dsp_rate(omega_at(kind, w0, w1, steep, s0, s1, t + 8.0 * h / 9.0), G, g21p, g31p, ck)
        k5 = r * (
            y
            + h
            * (
                19372.0 / 6561.0 * k1
                - 25360.0 / 2187.0 * k2
                + 64448.0 / 6561.0 * k3
                - 212.0 / 729.0 * k4
            )
        )
        r = dsp_rate(omega_at(kind, w0, w1, steep, s0, s1, t + h), G, g21p, g31p, ck)
        k6 = r * (
            y
            + h
            * (
                9017.0 / 3168.0 * k1
                - 355.0 / 33.0 * k2
                + 46732.0 / 5247.0 * k3
                + 49.0 / 176.0 * k4
                - 5103.0 / 18656.0 * k5
            )
        )
        y_new = y + h * (
            35.0 / 384.0 * k1
            + 500.0 / 1113.0 * k3
            + 125.0 / 192.0 * k4
            - 2187.0 / 6784.0 * k5
            + 11.0 / 84.0 * k6
        )
        k7 = r * y_new
        err_vec = h * (
            71.0 / 57600.0 * k1
            - 71.0 / 16695.0 * k3
            + 71.0 / 1920.0 * k4
            - 17253.0 / 339200.0 * k5
            + 22.0 / 525.0 * k6
            - 1.0 / 40.0 * k7
        )
        scale = atol + rtol * max(abs(y), abs(y_new))
        err = abs(err_vec) / scale
        if err <= 1.0:
            t += h
            y = y_new
            steps += 1
        if err == 0.0:
            fac = 5.0
        else:
            fac = min(5.0, max(0.2, 0.9 * err**-0.2))
        h *= fac
    return y, STATUS_OK, steps


@always_jit
def ch_excess_scan_numba(eta_a, eta_b, js):
    s = eta_a + eta_b
    q = (math.sqrt(eta_a) + math.sqrt(eta_b)) ** 2
    out = np.empty(js.shape[0])
    for i in range(js.shape[0]):
        j = js[i]
        e1 = math.exp(-j)
        out[i] = e1 * (2.0 - s + 0.5 * j * s) - e1 * e1 * (1.0 - 0.5 * s + 0.5 * j * q)
    return out


def ch_excess_scan_numpy(eta_a, eta_b, js):
    s = eta_a + eta_b
    q = (np.sqrt(eta_a) + np.sqrt(eta_b)) ** 2
    e1 = np.exp(-js)
    return e1 * (2.0 - s + 0.5 * js * s) - e1 * e1 * (1.0 - 0.5 * s + 0.5 * js * q)


@always_jit
def channel_map_numba(rho, f):
    n = f.shape[0]
    dim = rho.shape[0]
    loss = np.empty(n)
    for r in range(n):
        loss[r] = 1.0 - (f[r].real ** 2 + f[r].imag ** 2)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for m in range(dim):
        for k in range(dim):
            coef = 1.0 + 0.0j
            zmask = 0
            for r in range(n):
                bit = 1 << (n - 1 - r)
                mb = (m & bit) != 0
                kb = (k & bit) != 0
                if mb and kb:
                    coef *= 1.0 - loss[r]
                elif mb:
                    coef *= f[r]
                elif kb:
                    coef *= f[r].conjugate()
                else:
                    zmask |= bit
            acc = coef * rho[m, k]
            sub = zmask
            while sub:
                w = coef
                for r in range(n):
                    if sub & (1 << (n - 1 - r)):
                        w *= loss[r]
                acc += w * rho[m | sub, k | sub]
                sub = (sub - 1) & zmask
            out[m, k] = acc
    return out


def channel_map_numpy(rho, f):
    n = f.shape[0]
    t = rho.reshape((2,) * (2 * n)).astype(np.complex128)
    for r in range(n):
        fr = f[r]
        eta = abs(fr) ** 2
        # transfer[m, k, i, j]: output element (m, k) from input element (i, j)
        transfer = np.zeros((2, 2, 2, 2), dtype=np.complex128)
        transfer[0, 0, 0, 0] = 1.0
        transfer[0, 0, 1, 1] = 1.0 - eta
        transfer[0, 1, 0, 1] = np.conj(fr)
        transfer[1, 0, 1, 0] = fr
        transfer[1, 1, 1, 1] = eta
        t = np.tensordot(transfer, t, axes=([2, 3], [r, n + r]))
        # tensordot puts the new (m, k) axes first; move them back into place
        t = np.moveaxis(t, [0, 1], [r, n + r])
    return t.reshape(rho.shape)


if USE_NUMBA:
    ch_excess_scan = ch_excess_scan_numba
    channel_map = channel_map_numba
else:
    ch_excess_scan = ch_excess_scan_numpy
    channel_map = channel_map_numpy
