"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two must agree to rounding; ``tests/test_kernels.py`` holds them to it.
"""

import numpy as np
from scipy.special import gammainc, gammaln

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_ATTEMPT_MULT = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

_CHUNK = 512


def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def counter_uniform(key, index, slot):
    """Uniform on (0, 1) addressed by (key, draw index, slot).

    Splitmix64 finaliser over a Weyl-style counter; no state is carried, so
    draw ``i`` is the same whether it is generated alone or in a batch.
    """
    with np.errstate(over="ignore"):
        k = np.uint64(key)
        i = np.asarray(index, dtype=np.uint64)
        s = np.asarray(slot, dtype=np.uint64)
        z = _mix64(k + (i + np.uint64(1)) * _GOLDEN + s * _ATTEMPT_MULT)
    return ((z >> _S11).astype(np.float64) + 0.5) * _INV53


def moschopoulos_coefficients(ratios, alphas, n_terms):
    """Scaled series weights ``d_k = delta_k / v**k`` for k < n_terms.

    ``ratios`` holds ``(1 - beta_min/beta_i) / v`` (all in [0, 1]).
    """
    ratios = np.asarray(ratios, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    k = np.arange(1, n_terms, dtype=float)
    # g_k = sum_i alpha_i r_i^k / k, scaled by v^-k
    powers = ratios[None, :] ** k[:, None]
    g = np.zeros(n_terms)
    g[1:] = (powers * alphas[None, :]).sum(axis=1) / k
    ig = np.arange(n_terms) * g
    d = np.zeros(n_terms)
    d[0] = 1.0
    for m in range(1, n_terms):
        d[m] = np.dot(ig[1 : m + 1], d[m - 1 :: -1][:m]) / m
    return d


def moschopoulos_pdf(y, coeffs, rho, beta_min, v, log_c):
    """Series density of a sum of independent gammas at points ``y > 0``."""
    yshape = np.shape(y)
    y = np.ravel(np.asarray(y, dtype=float))
    out = np.zeros_like(y)
    k = np.arange(coeffs.size, dtype=float)
    lg = gammaln(rho + k)
    with np.errstate(divide="ignore"):
        log_d = np.log(coeffs)
    for start in range(0, y.size, _CHUNK):
        yy = y[start : start + _CHUNK]
        pos = yy > 0
        if not pos.any():
            continue
        yp = yy[pos]
        z = v * yp / beta_min
        with np.errstate(divide="ignore"):
            log_z = np.log(z) if v > 0 else np.full_like(z, -np.inf)
        lt = k[None, :] * log_z[:, None] - lg[None, :] + log_d[None, :]
        if v == 0:
            lt[:, 0] = -lg[0] + log_d[0]
        top = lt.max(axis=1)
        s = np.exp(lt - top[:, None]).sum(axis=1)
        logf = (
            log_c + top + np.log(s) + (rho - 1.0) * np.log(yp)
            - yp / beta_min - rho * np.log(beta_min)
        )
        block = np.zeros(yy.size)
        block[pos] = np.exp(logf)
        out[start : start + _CHUNK] = block
    return out.reshape(yshape)


def moschopoulos_cdf(y, coeffs, rho, beta_min, v, log_c):
    """Series CDF ``C * sum_k delta_k P(rho + k, y / beta_min)``.

    ``P(rho + k, u)`` is built downward from the last term with
    ``P(a, u) = P(a + 1, u) + u^a e^-u / Gamma(a + 1)``, which only adds.
    """
    y = np.asarray(y, dtype=float)
    nk = coeffs.size
    k = np.arange(nk, dtype=float)
    with np.errstate(divide="ignore"):
        log_w = np.log(coeffs) + (k * np.log(v) if v > 0 else np.where(k == 0, 0.0, -np.inf))
    wcum = np.cumsum(np.exp(log_c + log_w))
    lg1 = gammaln(rho + k + 1.0)
    flat = np.ravel(y)
    out = np.zeros(flat.size)
    for start in range(0, flat.size, _CHUNK):
        u = flat[start : start + _CHUNK] / beta_min
        pos = u > 0
        if not pos.any():
            continue
        up = u[pos]
        acc = gammainc(rho + nk - 1, up) * wcum[-1]
        if nk > 1:
            lt = (rho + k[None, :-1]) * np.log(up)[:, None] - up[:, None] - lg1[None, :-1]
            acc = acc + np.exp(lt) @ wcum[:-1]
        block = np.zeros(u.size)
        block[pos] = acc
        out[start : start + _CHUNK] = block
    return np.minimum(out, 1.0).reshape(y.shape)


def _gig_logpdf_t(t, lam, a2h, b2h):
    return lam * t - a2h * np.exp(-t) - b2h * np.exp(t)


def gig_log_rejection(key, first_index, n, lam, a, b, env):
    """Draw ``log Z`` for Z ~ GIG(lam, a, b) by rejection, one stream per index.

    ``env`` = (t_left, t_right, slope_left, slope_right, g_mode, g_left,
    g_right, p_mid, p_left) describes the three-piece envelope of the
    log-concave density of ``log Z``.
    """
    tl, tr, sl, sr, gm, gl, gr, p_mid, p_left = env
    a2h = 0.5 * a * a
    b2h = 0.5 * b * b
    out = np.empty(n)
    tries = np.zeros(n, dtype=np.int64)
    pending = np.arange(n)
    attempt = 0
    while pending.size:
        idx = np.uint64(first_index) + pending.astype(np.uint64)
        base = np.uint64(3 * attempt)
        u1 = counter_uniform(key, idx, base)
        u2 = counter_uniform(key, idx, base + np.uint64(1))
        u3 = counter_uniform(key, idx, base + np.uint64(2))
        mid = u1 < p_mid
        left = (~mid) & (u1 < p_mid + p_left)
        e = -np.log(u2)
        t = np.where(mid, tl + u2 * (tr - tl), np.where(left, tl - e / sl, tr - e / sr))
        h = np.where(mid, gm, np.where(left, gl + sl * (t - tl), gr + sr * (t - tr)))
        ok = np.log(u3) <= _gig_logpdf_t(t, lam, a2h, b2h) - h
        tries[pending] += 1
        out[pending[ok]] = t[ok]
        pending = pending[~ok]
        attempt += 1
    return out, tries
