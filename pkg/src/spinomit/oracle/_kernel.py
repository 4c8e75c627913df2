"""Compiled Dormand-Prince 5(4) integrator for the scaled mean-field equations.

State ``y = (Re u, Im u, q, dq/dtau)`` with ``u = a / a_ref``,
``q = x / x_ref`` and ``tau = omega_m t``.  Parameter vector ``p``:

    0 kappa/wm          1 (Delta_0 + Delta_s)/wm   2 xi x_ref / wm
    3 nu = Delta_p/wm   4 control drive            5 probe drive
    6 Re g / wm         7 Im g / wm                8 1 if the OPA term beats at nu
    9 Gamma_m / wm     10 static force on q       11 detuning offset
   12 bound on |u|^2

Status codes returned by :func:`advance`: ``>= 0`` accepted steps,
``-1`` step underflow, ``-2`` state bound exceeded or non-finite.
"""
import numpy as np
from numba import njit

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = np.zeros((7, 7))
A[1, 0] = 1 / 5
A[2, :2] = [3 / 40, 9 / 40]
A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = A[6] - B4

MIN_STEP = 1e-14
UNDERFLOW = -1
BLOWUP = -2


@njit(cache=True)
def rhs(t, y, p, out):
    kap = p[0]
    ur = y[0]
    ui = y[1]
    q = y[2]
    v = y[3]
    det = p[1] - p[2] * q + p[11]
    cs = np.cos(p[3] * t)
    sn = -np.sin(p[3] * t)  # e^{-i nu t}
    dr = -kap * ur + det * ui + p[4] + p[5] * cs
    di = -kap * ui - det * ur + p[5] * sn
    if p[8] > 0.5:
        wr = p[6] * cs - p[7] * sn
        wi = p[6] * sn + p[7] * cs
    else:
        wr = p[6]
        wi = p[7]
    # + w * conj(u)
    dr += wr * ur + wi * ui
    di += wi * ur - wr * ui
    out[0] = dr
    out[1] = di
    out[2] = v
    out[3] = -p[9] * v - q + ur * ur + ui * ui + p[10]


@njit(cache=True)
def advance(t, t_end, y, h, p, rtol, atol, C, A, E):
    """Integrate ``y`` in place from ``t`` to ``t_end``; returns (t, h, status)."""
    k = np.zeros((7, 4))
    yt = np.empty(4)
    tmp = np.empty(4)
    nsteps = 0
    rhs(t, y, p, tmp)
    k[0, :] = tmp
    h_keep = h
    while t < t_end:
        last = False
        if t + h >= t_end:
            h_keep = h
            h = t_end - t
            last = True
        for s in range(1, 7):
            for j in range(4):
                acc = y[j]
                for r in range(s):
                    acc += h * A[s, r] * k[r, j]
                yt[j] = acc
            rhs(t + C[s] * h, yt, p, tmp)
            k[s, :] = tmp
        err = 0.0
        for j in range(4):
            e = 0.0
            for r in range(7):
                e += E[r] * k[r, j]
            e *= h
            sc = atol + rtol * max(abs(y[j]), abs(yt[j]))
            err += (e / sc) ** 2
        err = np.sqrt(err / 4)
        if not np.isfinite(err):
            return t, h, BLOWUP
        if err <= 1.0:
            t = t_end if last else t + h
            for j in range(4):
                y[j] = yt[j]
            k[0, :] = k[6, :]
            nsteps += 1
            if y[0] * y[0] + y[1] * y[1] > p[12]:
                return t, h, BLOWUP
            fac = 0.9 * err ** -0.2 if err > 0 else 5.0
            fac = min(5.0, max(0.2, fac))
            if last:
                return t, h_keep, nsteps
            h = h * fac
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)
            if h < MIN_STEP:
                return t, h, UNDERFLOW
    return t, h, nsteps


@njit(cache=True)
def sample(t0, ts, y, h, p, rtol, atol, C, A, E):
    """Advance through the sample times ``ts``; returns (samples, h, steps, status)."""
    out = np.empty((ts.size, 4))
    t = t0
    total = 0
    for i in range(ts.size):
        t, hn, ns = advance(t, ts[i], y, h, p, rtol, atol, C, A, E)
        if ns < 0:
            return out, hn, total, ns
        if ns > 0:
            h = hn
        total += ns
        out[i] = y
    return out, h, total, 0
