# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``_pykernels``: same signatures, same results to rounding."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, lgamma, INFINITY
from libc.stdint cimport uint64_t, int64_t
from scipy.special.cython_special cimport gammainc

cnp.import_array()

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _ATTEMPT_MULT = 0xD1B54A32D192ED03ULL
cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t index, uint64_t slot) nogil:
    cdef uint64_t z = _mix64(key + (index + 1) * _GOLDEN + slot * _ATTEMPT_MULT)
    return (<double>(z >> 11) + 0.5) * _INV53


def counter_uniform(key, index, slot):
    cdef uint64_t k = <uint64_t>int(key)
    idx = np.asarray(index, dtype=np.uint64)
    sl = np.broadcast_to(np.asarray(slot, dtype=np.uint64), idx.shape)
    flat_i = np.ascontiguousarray(idx.ravel())
    flat_s = np.ascontiguousarray(sl.ravel())
    cdef const uint64_t[::1] iv = flat_i
    cdef const uint64_t[::1] sv = flat_s
    out = np.empty(flat_i.size)
    cdef double[::1] ov = out
    cdef Py_ssize_t j
    for j in range(iv.shape[0]):
        ov[j] = _uniform(k, iv[j], sv[j])
    return out.reshape(idx.shape)


def moschopoulos_coefficients(ratios, alphas, Py_ssize_t n_terms):
    cdef double[::1] r = np.ascontiguousarray(ratios, dtype=float)
    cdef double[::1] al = np.ascontiguousarray(alphas, dtype=float)
    cdef Py_ssize_t p = r.shape[0], i, k, m
    ig = np.zeros(n_terms)
    d = np.zeros(n_terms)
    cdef double[::1] igv = ig
    cdef double[::1] dv = d
    pw = np.ones(p)
    cdef double[::1] pwv = pw
    cdef double acc
    for k in range(1, n_terms):
        acc = 0.0
        for i in range(p):
            pwv[i] *= r[i]
            acc += al[i] * pwv[i]
        # k * g_k with g_k = acc / k
        igv[k] = acc
    dv[0] = 1.0
    for m in range(1, n_terms):
        acc = 0.0
        for i in range(1, m + 1):
            acc += igv[i] * dv[m - i]
        dv[m] = acc / m
    return d


def moschopoulos_pdf(y, coeffs, double rho, double beta_min, double v, double log_c):
    yshape = np.shape(y)
    cdef double[::1] yv = np.ascontiguousarray(np.ravel(y), dtype=float)
    cdef double[::1] cv = np.ascontiguousarray(coeffs, dtype=float)
    cdef Py_ssize_t nk = cv.shape[0], n = yv.shape[0], j, k, kmax
    out = np.zeros(n)
    cdef double[::1] ov = out
    cdef double z, lz, lt, top, s, yy, term, lg0
    cdef double[::1] lg = np.empty(nk)
    cdef double[::1] ld = np.empty(nk)
    for k in range(nk):
        lg[k] = lgamma(rho + k)
        ld[k] = log(cv[k]) if cv[k] > 0 else -INFINITY
    for j in range(n):
        yy = yv[j]
        if yy <= 0:
            continue
        if v > 0:
            z = v * yy / beta_min
            lz = log(z)
        else:
            lz = -INFINITY
        top = -INFINITY
        for k in range(nk):
            if k == 0:
                lt = -lg[0] + ld[0]
            else:
                lt = k * lz - lg[k] + ld[k]
            if lt > top:
                top = lt
        s = 0.0
        for k in range(nk):
            if k == 0:
                lt = -lg[0] + ld[0]
            else:
                lt = k * lz - lg[k] + ld[k]
            s += exp(lt - top)
        ov[j] = exp(log_c + top + log(s) + (rho - 1.0) * log(yy)
                    - yy / beta_min - rho * log(beta_min))
    return out.reshape(yshape)


def moschopoulos_cdf(y, coeffs, double rho, double beta_min, double v, double log_c):
    yshape = np.shape(y)
    cdef double[::1] yv = np.ascontiguousarray(np.ravel(y), dtype=float)
    cdef double[::1] cv = np.ascontiguousarray(coeffs, dtype=float)
    cdef Py_ssize_t nk = cv.shape[0], n = yv.shape[0], j, k
    cdef double[::1] wcum = np.empty(nk)
    cdef double[::1] logk = np.empty(nk)
    cdef double lv = log(v) if v > 0 else -INFINITY
    cdef double acc = 0.0
    for k in range(nk):
        if cv[k] > 0 and (k == 0 or v > 0):
            acc += exp(log_c + log(cv[k]) + k * lv)
        wcum[k] = acc
        logk[k] = log(rho + k + 1.0)
    out = np.zeros(n)
    cdef double[::1] ov = out
    cdef double u, lu, lt
    for j in range(n):
        u = yv[j] / beta_min
        if u <= 0:
            continue
        lu = log(u)
        acc = gammainc(rho + nk - 1, u) * wcum[nk - 1]
        # log of u^(rho+k) e^-u / Gamma(rho+k+1), walked downward from k = nk-2
        if nk > 1:
            lt = (rho + nk - 2) * lu - u - lgamma(rho + nk - 1)
            for k in range(nk - 2, -1, -1):
                if (k & 31) == 0:
                    # resynchronise to stop rounding drift in the walk
                    lt = (rho + k) * lu - u - lgamma(rho + k + 1.0)
                acc += exp(lt) * wcum[k]
                lt += logk[k - 1] - lu if k > 0 else 0.0
        ov[j] = acc if acc < 1.0 else 1.0
    return out.reshape(yshape)


def gig_log_rejection(key, first_index, Py_ssize_t n, double lam, double a, double b, env):
    cdef double tl = env[0], tr = env[1], sl = env[2], sr = env[3]
    cdef double gm = env[4], gl = env[5], gr = env[6], p_mid = env[7], p_left = env[8]
    cdef double a2h = 0.5 * a * a, b2h = 0.5 * b * b
    cdef uint64_t k = <uint64_t>int(key)
    cdef uint64_t first = <uint64_t>int(first_index)
    out = np.empty(n)
    tries = np.zeros(n, dtype=np.int64)
    cdef double[::1] ov = out
    cdef int64_t[::1] tv = tries
    cdef Py_ssize_t i
    cdef uint64_t idx, attempt
    cdef double u1, u2, u3, e, t, h, g
    with nogil:
        for i in range(n):
            idx = first + <uint64_t>i
            attempt = 0
            while True:
                u1 = _uniform(k, idx, 3 * attempt)
                u2 = _uniform(k, idx, 3 * attempt + 1)
                u3 = _uniform(k, idx, 3 * attempt + 2)
                attempt += 1
                if u1 < p_mid:
                    t = tl + u2 * (tr - tl)
                    h = gm
                elif u1 < p_mid + p_left:
                    e = -log(u2)
                    t = tl - e / sl
                    h = gl + sl * (t - tl)
                else:
                    e = -log(u2)
                    t = tr - e / sr
                    h = gr + sr * (t - tr)
                g = lam * t - a2h * exp(-t) - b2h * exp(t)
                if log(u3) <= g - h:
                    ov[i] = t
                    tv[i] = <int64_t>attempt
                    break
    return out, tries
