# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Mirrors ``_pykernels`` exactly."""

import numpy as np

from libc.math cimport exp, fabs, lgamma, log, log1p, INFINITY

NAME = "cython"

cdef double CF_EPS = 1e-15
cdef double CF_TINY = 1e-300
cdef int CF_MAX_ITER = 500


def route(const double[:, ::1] X, const long long[::1] left, const long long[::1] right,
          const long long[::1] feature, const double[::1] threshold, long long root):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t i
    cdef long long node
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for i in range(n):
            node = root
            while left[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            o[i] = node
    return out


def best_split(const double[:, ::1] X, const long long[::1] y, idx_arr,
               Py_ssize_t n_classes, Py_ssize_t min_leaf):
    cdef const long long[::1] idx = idx_arr
    cdef Py_ssize_t n = idx.shape[0]
    cdef Py_ssize_t p = X.shape[1]
    cdef Py_ssize_t f, i, c, k
    cdef long long s_l, s_r
    cdef double score, a, b, thr
    cdef long long best_f = -1
    cdef double best_thr = 0.0
    cdef double best_score = -INFINITY
    cdef double f_score
    cdef Py_ssize_t f_i
    if n < 2 * min_leaf or n < 2:
        return best_f, best_thr, best_score

    total_arr = np.zeros(n_classes, dtype=np.int64)
    left_arr = np.zeros(n_classes, dtype=np.int64)
    xs_arr = np.empty(n, dtype=np.float64)
    ys_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] total = total_arr
    cdef long long[::1] cl = left_arr
    cdef double[::1] xs = xs_arr
    cdef double[::1] sx
    cdef long long[::1] ys = ys_arr
    cdef long long[::1] order

    for i in range(n):
        total[y[idx[i]]] += 1

    for f in range(p):
        for i in range(n):
            xs[i] = X[idx[i], f]
        order = np.argsort(xs_arr, kind="stable").astype(np.int64)
        for i in range(n):
            ys[i] = y[idx[order[i]]]
        sx = xs_arr[np.asarray(order)]
        for c in range(n_classes):
            cl[c] = 0
        s_l = 0
        s_r = 0
        for c in range(n_classes):
            s_r += total[c] * total[c]
        f_score = -INFINITY
        f_i = -1
        for i in range(n - 1):
            k = ys[i]
            # moving one sample of class k from right to left
            s_l += 2 * cl[k] + 1
            s_r -= 2 * (total[k] - cl[k]) - 1
            cl[k] += 1
            if i + 1 < min_leaf or n - i - 1 < min_leaf:
                continue
            if not (sx[i + 1] > sx[i]):
                continue
            score = <double>s_l / <double>(i + 1) + <double>s_r / <double>(n - i - 1)
            if score > f_score:
                f_score = score
                f_i = i
        if f_i >= 0 and f_score > best_score:
            a = sx[f_i]
            b = sx[f_i + 1]
            thr = (a + b) * 0.5
            if thr >= b:
                thr = a
            best_f = f
            best_thr = thr
            best_score = f_score
    return best_f, best_thr, best_score


cdef double _kl(double p, double q) nogil:
    cdef double out = 0.0
    if p > 0.0:
        if q <= 0.0:
            return INFINITY
        out += p * log(p / q)
    if p < 1.0:
        if q >= 1.0:
            return INFINITY
        out += (1.0 - p) * log((1.0 - p) / (1.0 - q))
    return out


def kl_ucb_batch(const double[::1] means, const double[::1] plays, double log_t, double tol):
    cdef Py_ssize_t n = means.shape[0]
    cdef Py_ssize_t i
    cdef double lo, hi, mid, m
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            m = means[i]
            if m >= 1.0:
                o[i] = 1.0
                continue
            lo = m if m > 0.0 else 0.0
            hi = 1.0
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if plays[i] * _kl(m, mid) <= log_t:
                    lo = mid
                else:
                    hi = mid
            o[i] = lo
    return out


cdef double _betacf(double a, double b, double x) nogil:
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if fabs(d) < CF_TINY:
        d = CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < CF_TINY:
            d = CF_TINY
        c = 1.0 + aa / c
        if fabs(c) < CF_TINY:
            c = CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < CF_EPS:
            break
    return h


cdef double _betainc(double a, double b, double x) nogil:
    cdef double front
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def betainc(double a, double b, double x):
    return _betainc(a, b, x)


def beta_quantile_batch(const double[::1] a, const double[::1] b, double level, double tol):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef double lo, hi, mid
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            if level <= 0.0:
                o[i] = 0.0
                continue
            if level >= 1.0:
                o[i] = 1.0
                continue
            lo = 0.0
            hi = 1.0
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _betainc(a[i], b[i], mid) < level:
                    lo = mid
                else:
                    hi = mid
            o[i] = 0.5 * (lo + hi)
    return out
