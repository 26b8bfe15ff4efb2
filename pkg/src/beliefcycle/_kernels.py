"""Compiled inner loops for orbit, grid and stochastic-path computation.

Parameters travel through these kernels as a flat float64 vector (see
PARAM_FIELDS) so that grid sweeps can vary any subset per cell without
object overhead.  All kernels release the GIL and are cached on disk.

Divergence is data, not an error, at this level: a cell whose orbit exceeds
the cutoff is reported with kind 0 and the wrappers translate.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

PARAM_FIELDS = (
    "A", "c", "gamma", "omega", "h", "sigma", "mu",
    "F_star", "d", "b", "beta", "a1_I", "a2_I", "a1_P", "a2_P",
)

# Attractor kind codes shared with the dynamics layer.
KIND_DIVERGENT = 0
KIND_HIGH_CARDINALITY = 33
MAX_PERIOD = 32

# Early-settle machinery for grid transients: an orbit that revisits its own
# k-step history to within the strict settle tolerance, twice in a row
# _CONFIRM steps apart, is exactly on an attracting cycle and can skip the
# rest of the transient.
_CHECK_EVERY = 64
_CONFIRM = 256


def pack_params(params) -> np.ndarray:
    """Flatten a ModelParams into the kernel parameter vector."""
    return np.array(
        [
            params.A, params.c, params.gamma, params.omega, params.h,
            params.sigma, params.mu, params.F_star, params.d, params.b,
            params.beta, params.sig_I.a1, params.sig_I.a2,
            params.sig_P.a1, params.sig_P.a2,
        ],
        dtype=np.float64,
    )


@njit(cache=True, inline="always")
def _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                 a1i, a2i, a1p, a2p, y, p, z, shock):
    dy = y - z
    ai = a1i if dy >= 0.0 else a2i
    gi = ai * math.tanh(dy / ai)
    y1 = A + c * y + gam * gi + om * h * p
    fbar = (1.0 - om) * F + om * d * y
    x = 4.0 * b * beta * (p - fbar)
    if x >= 0.0:
        alpha = 1.0 / (1.0 + math.exp(-x))
    else:
        t = math.exp(x)
        alpha = t / (1.0 + t)
    ed = mu * (fbar - p + b * (2.0 * alpha - 1.0)) + shock
    ap = a1p if ed >= 0.0 else a2p
    p1 = p + sig * (ap * math.tanh(ed / ap))
    return y1, p1, y


@njit(cache=True, nogil=True)
def iterate_path(pv, y0, p0, z0, n_discard, n_record, shocks, cutoff):
    """Iterate the map, discarding the first n_discard states.

    shocks must have length n_discard + n_record (zeros for the
    deterministic map).  Returns (out, n_valid, diverged): out holds up to
    n_record recorded states (rows Y, P, Z); recording stops at the first
    state with a coordinate beyond the cutoff.
    """
    A, c, gam, om, h, sig, mu, F, d, b, beta, a1i, a2i, a1p, a2p = (
        pv[0], pv[1], pv[2], pv[3], pv[4], pv[5], pv[6], pv[7], pv[8],
        pv[9], pv[10], pv[11], pv[12], pv[13], pv[14],
    )
    out = np.empty((n_record, 3))
    y, p, z = y0, p0, z0
    for t in range(n_discard + n_record):
        y, p, z = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                               a1i, a2i, a1p, a2p, y, p, z, shocks[t])
        if not (abs(y) < cutoff and abs(p) < cutoff and abs(z) < cutoff):
            return out, max(t - n_discard, 0), True
        if t >= n_discard:
            out[t - n_discard, 0] = y
            out[t - n_discard, 1] = p
            out[t - n_discard, 2] = z
    return out, n_record, False


@njit(cache=True, nogil=True)
def minimal_period(buf, n, tol):
    """Smallest k <= MAX_PERIOD with every sampled state matching its k-shifted
    successor within tol (Chebyshev metric); 0 when no such k exists."""
    kmax = min(MAX_PERIOD, n - 1)
    for k in range(1, kmax + 1):
        ok = True
        for t in range(n - k):
            if (abs(buf[t + k, 0] - buf[t, 0]) >= tol
                    or abs(buf[t + k, 1] - buf[t, 1]) >= tol
                    or abs(buf[t + k, 2] - buf[t, 2]) >= tol):
                ok = False
                break
        if ok:
            return k
    return 0


@njit(cache=True, inline="always")
def _cyclic_period(reps, k, tol):
    # Minimal period of an exact k-cycle when re-measured at tolerance tol.
    for kk in range(1, k):
        ok = True
        for j in range(k):
            j2 = (j + kk) % k
            if (abs(reps[j, 0] - reps[j2, 0]) >= tol
                    or abs(reps[j, 1] - reps[j2, 1]) >= tol
                    or abs(reps[j, 2] - reps[j2, 2]) >= tol):
                ok = False
                break
        if ok:
            return kk
    return k


@njit(cache=True, nogil=True)
def classify_grid(pv_cells, inits, transient, sample, cutoff,
                  match_tols, settle_tols,
                  out_kind, out_period, out_reps, out_mean):
    """Classify the long-run orbit of every cell.

    pv_cells: (n, 15) parameter vectors; inits: (n, 3) initial states.
    Outputs per cell: kind code (0 divergent, 1..32 period, 33 more than 32
    points), minimal period, representative states (up to 33 rows, rest
    NaN), and the attractor's mean state.
    """
    n_cells = pv_cells.shape[0]
    buf = np.empty((sample, 3))
    ring = np.empty((MAX_PERIOD + 1, 3))
    reps = np.empty((MAX_PERIOD + 1, 3))

    for i in range(n_cells):
        pv = pv_cells[i]
        A, c, gam, om, h, sig, mu, F, d, b, beta, a1i, a2i, a1p, a2p = (
            pv[0], pv[1], pv[2], pv[3], pv[4], pv[5], pv[6], pv[7], pv[8],
            pv[9], pv[10], pv[11], pv[12], pv[13], pv[14],
        )
        match_tol = match_tols[i]
        settle_tol = settle_tols[i]
        y, p, z = inits[i, 0], inits[i, 1], inits[i, 2]

        out_reps[i, :, :] = np.nan
        diverged = False
        settled_k = 0
        pending_k = 0
        pending_t = -1

        ring_len = MAX_PERIOD + 1
        t = 0
        while t < transient:
            y, p, z = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                   a1i, a2i, a1p, a2p, y, p, z, 0.0)
            if not (abs(y) < cutoff and abs(p) < cutoff and abs(z) < cutoff):
                diverged = True
                break
            ring[t % ring_len, 0] = y
            ring[t % ring_len, 1] = p
            ring[t % ring_len, 2] = z
            t += 1
            if t >= ring_len and t % _CHECK_EVERY == 0:
                k_hit = 0
                for k in range(1, MAX_PERIOD + 1):
                    j = (t - 1 - k) % ring_len
                    if (abs(y - ring[j, 0]) < settle_tol
                            and abs(p - ring[j, 1]) < settle_tol
                            and abs(z - ring[j, 2]) < settle_tol):
                        k_hit = k
                        break
                if k_hit == 0:
                    pending_k = 0
                elif k_hit == pending_k and t - pending_t >= _CONFIRM:
                    settled_k = k_hit
                    break
                elif k_hit != pending_k:
                    pending_k = k_hit
                    pending_t = t

        if diverged:
            out_kind[i] = KIND_DIVERGENT
            out_period[i] = 0
            out_mean[i, 0] = np.nan
            out_mean[i, 1] = np.nan
            out_mean[i, 2] = np.nan
            continue

        if settled_k > 0:
            # Orbit is exactly on a k-cycle: the last k ring states are the
            # cycle, in chronological order.
            k = settled_k
            for j in range(k):
                src = (t - k + j) % ring_len
                reps[j, 0] = ring[src, 0]
                reps[j, 1] = ring[src, 1]
                reps[j, 2] = ring[src, 2]
            kk = _cyclic_period(reps, k, match_tol)
            my = 0.0
            mp = 0.0
            mz = 0.0
            for j in range(k):
                my += reps[j, 0]
                mp += reps[j, 1]
                mz += reps[j, 2]
            out_kind[i] = kk
            out_period[i] = kk
            for j in range(kk):
                out_reps[i, j, 0] = reps[j, 0]
                out_reps[i, j, 1] = reps[j, 1]
                out_reps[i, j, 2] = reps[j, 2]
            out_mean[i, 0] = my / k
            out_mean[i, 1] = mp / k
            out_mean[i, 2] = mz / k
            continue

        # Full transient elapsed without exact settling: sample and match.
        n_valid = 0
        for ts in range(sample):
            y, p, z = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                   a1i, a2i, a1p, a2p, y, p, z, 0.0)
            if not (abs(y) < cutoff and abs(p) < cutoff and abs(z) < cutoff):
                diverged = True
                break
            buf[ts, 0] = y
            buf[ts, 1] = p
            buf[ts, 2] = z
            n_valid += 1

        if diverged:
            out_kind[i] = KIND_DIVERGENT
            out_period[i] = 0
            out_mean[i, 0] = np.nan
            out_mean[i, 1] = np.nan
            out_mean[i, 2] = np.nan
            continue

        k = minimal_period(buf, n_valid, match_tol)
        if k > 0:
            my = 0.0
            mp = 0.0
            mz = 0.0
            for j in range(k):
                row = n_valid - k + j
                out_reps[i, j, 0] = buf[row, 0]
                out_reps[i, j, 1] = buf[row, 1]
                out_reps[i, j, 2] = buf[row, 2]
                my += buf[row, 0]
                mp += buf[row, 1]
                mz += buf[row, 2]
            out_kind[i] = k
            out_period[i] = k
            out_mean[i, 0] = my / k
            out_mean[i, 1] = mp / k
            out_mean[i, 2] = mz / k
        else:
            n_rep = min(MAX_PERIOD + 1, n_valid)
            for j in range(n_rep):
                row = n_valid - n_rep + j
                out_reps[i, j, 0] = buf[row, 0]
                out_reps[i, j, 1] = buf[row, 1]
                out_reps[i, j, 2] = buf[row, 2]
            my = 0.0
            mp = 0.0
            mz = 0.0
            for ts in range(n_valid):
                my += buf[ts, 0]
                mp += buf[ts, 1]
                mz += buf[ts, 2]
            out_kind[i] = KIND_HIGH_CARDINALITY
            out_period[i] = 0
            out_mean[i, 0] = my / n_valid
            out_mean[i, 1] = mp / n_valid
            out_mean[i, 2] = mz / n_valid


@njit(cache=True, inline="always")
def _fd_jacobian(A, c, gam, om, h, sig, mu, F, d, b, beta,
                 a1i, a2i, a1p, a2p, y, p, z, J):
    # Central-difference Jacobian of the map at (y, p, z), written into J.
    hy = 1e-7 * (1.0 + abs(y))
    hp = 1e-7 * (1.0 + abs(p))
    hz = 1e-7 * (1.0 + abs(z))
    y1a, p1a, z1a = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                 a1i, a2i, a1p, a2p, y + hy, p, z, 0.0)
    y1b, p1b, z1b = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                 a1i, a2i, a1p, a2p, y - hy, p, z, 0.0)
    J[0, 0] = (y1a - y1b) / (2.0 * hy)
    J[1, 0] = (p1a - p1b) / (2.0 * hy)
    J[2, 0] = (z1a - z1b) / (2.0 * hy)
    y1a, p1a, z1a = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                 a1i, a2i, a1p, a2p, y, p + hp, z, 0.0)
    y1b, p1b, z1b = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                 a1i, a2i, a1p, a2p, y, p - hp, z, 0.0)
    J[0, 1] = (y1a - y1b) / (2.0 * hp)
    J[1, 1] = (p1a - p1b) / (2.0 * hp)
    J[2, 1] = (z1a - z1b) / (2.0 * hp)
    y1a, p1a, z1a = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                 a1i, a2i, a1p, a2p, y, p, z + hz, 0.0)
    y1b, p1b, z1b = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                                 a1i, a2i, a1p, a2p, y, p, z - hz, 0.0)
    J[0, 2] = (y1a - y1b) / (2.0 * hz)
    J[1, 2] = (p1a - p1b) / (2.0 * hz)
    J[2, 2] = (z1a - z1b) / (2.0 * hz)


@njit(cache=True, nogil=True)
def lyapunov_path(pv, y0, p0, z0, steps, renorm_interval, cutoff):
    """Largest Lyapunov exponent by tangent-vector iteration along the orbit.

    The tangent vector rides the finite-difference Jacobian and is
    renormalized every renorm_interval steps (and whenever its norm leaves a
    safe range).  Returns (exponent, diverged).
    """
    A, c, gam, om, h, sig, mu, F, d, b, beta, a1i, a2i, a1p, a2p = (
        pv[0], pv[1], pv[2], pv[3], pv[4], pv[5], pv[6], pv[7], pv[8],
        pv[9], pv[10], pv[11], pv[12], pv[13], pv[14],
    )
    J = np.empty((3, 3))
    inv_sqrt3 = 1.0 / math.sqrt(3.0)
    vy = inv_sqrt3
    vp = inv_sqrt3
    vz = inv_sqrt3
    y, p, z = y0, p0, z0
    acc = 0.0
    for t in range(steps):
        _fd_jacobian(A, c, gam, om, h, sig, mu, F, d, b, beta,
                     a1i, a2i, a1p, a2p, y, p, z, J)
        wy = J[0, 0] * vy + J[0, 1] * vp + J[0, 2] * vz
        wp = J[1, 0] * vy + J[1, 1] * vp + J[1, 2] * vz
        wz = J[2, 0] * vy + J[2, 1] * vp + J[2, 2] * vz
        vy, vp, vz = wy, wp, wz
        y, p, z = _step_scalar(A, c, gam, om, h, sig, mu, F, d, b, beta,
                               a1i, a2i, a1p, a2p, y, p, z, 0.0)
        if not (abs(y) < cutoff and abs(p) < cutoff and abs(z) < cutoff):
            return 0.0, True
        norm2 = vy * vy + vp * vp + vz * vz
        if (t + 1) % renorm_interval == 0 or norm2 > 1e100 or norm2 < 1e-100:
            norm = math.sqrt(norm2)
            if norm == 0.0:
                # Tangent collapsed to exact zero (superstable direction).
                return -math.inf, False
            acc += math.log(norm)
            vy /= norm
            vp /= norm
            vz /= norm
    norm = math.sqrt(vy * vy + vp * vp + vz * vz)
    if norm > 0.0:
        acc += math.log(norm)
    return acc / steps, False
