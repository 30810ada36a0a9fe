# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops for membership evaluation, rule firing and the online adaptation step.

Every routine here has a line-for-line twin in ``_pykernels``; the operation order
is kept identical so both backends produce bitwise-equal floats.
"""
import numpy as np

from libc.math cimport fabs, sqrt


cdef inline double _mu(double x, double l, double c, double u) nogil:
    if x < l or x > u:
        return 0.0
    if x <= c:
        if c == l:
            return 1.0 if x == c else 0.0
        return (x - l) / (c - l)
    if u == c:
        return 0.0
    return (u - x) / (u - c)


cdef inline Py_ssize_t _nearest(double x, const double[::1] c, const double[::1] delta) nogil:
    cdef Py_ssize_t i, best = 0
    cdef double d, bestd = fabs(x - (c[0] + delta[0]))
    for i in range(1, c.shape[0]):
        d = fabs(x - (c[i] + delta[i]))
        if d < bestd:
            bestd = d
            best = i
    return best


cdef inline Py_ssize_t _argmax(double x, const double[::1] l, const double[::1] c,
                               const double[::1] u, const double[::1] zero) nogil:
    cdef Py_ssize_t i, best = 0
    cdef double m, bestm = -1.0
    for i in range(c.shape[0]):
        m = _mu(x, l[i], c[i], u[i])
        if m > bestm:
            bestm = m
            best = i
    if bestm <= 0.0:
        return _nearest(x, c, zero)
    return best


def membership(double x, double l, double c, double u):
    return _mu(x, l, c, u)


def argmax_sequence(const double[::1] y, const double[::1] l, const double[::1] c, const double[::1] u):
    cdef Py_ssize_t t, n = y.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    cdef double[::1] zero = np.zeros(c.shape[0])
    for t in range(n):
        o[t] = _argmax(y[t], l, c, u, zero)
    return out


def fuzzify(double x, const double[::1] l, const double[::1] c, const double[::1] u,
            const double[::1] delta, const double[::1] rho):
    cdef Py_ssize_t i, k = c.shape[0]
    cdef double d, h
    out = [0.0] * k
    for i in range(k):
        d = delta[i]
        h = rho[i] / 2.0
        out[i] = _mu(x, (l[i] + d) - h, c[i] + d, (u[i] + d) + h)
    return out


cdef inline double _forecast(double x, const double[::1] l, const double[::1] c, const double[::1] u,
                             const double[::1] delta, const double[::1] rho,
                             const long long[::1] rhs_ptr, const long long[::1] rhs_idx,
                             bint normalize, bint *matched) nogil:
    cdef Py_ssize_t j, q, k = c.shape[0]
    cdef long long a, b
    cdef double d, h, m, mp, num = 0.0, den = 0.0
    for j in range(k):
        a = rhs_ptr[j]
        b = rhs_ptr[j + 1]
        if a == b:
            continue
        d = delta[j]
        h = rho[j] / 2.0
        m = _mu(x, (l[j] + d) - h, c[j] + d, (u[j] + d) + h)
        if m > 0.0:
            mp = 0.0
            for q in range(a, b):
                mp = mp + (c[rhs_idx[q]] + delta[rhs_idx[q]])
            mp = mp / (b - a)
            num = num + m * mp
            den = den + m
    if den > 0.0:
        matched[0] = True
        if normalize:
            return num / den
        return num
    matched[0] = False
    j = _nearest(x, c, delta)
    return c[j] + delta[j]


def forecast(double x, const double[::1] l, const double[::1] c, const double[::1] u,
             const double[::1] delta, const double[::1] rho,
             const long long[::1] rhs_ptr, const long long[::1] rhs_idx, bint normalize):
    cdef bint matched = False
    cdef double v = _forecast(x, l, c, u, delta, rho, rhs_ptr, rhs_idx, normalize, &matched)
    return v, bool(matched)


cdef inline void _adapt_params(double mean, double sigma, double r,
                               double[::1] delta, double[::1] rho) nogil:
    cdef Py_ssize_t i, k = delta.shape[0]
    cdef double mp = r / 2.0
    for i in range(k):
        delta[i] = mean + (i * r / (k - 1) - mp) + (i * (2.0 * sigma) / (k - 1) - sigma)
    rho[0] = fabs(delta[0] - delta[1])
    for i in range(1, k - 1):
        rho[i] = fabs(delta[i - 1] - delta[i + 1])
    rho[k - 1] = fabs(delta[k - 2] - delta[k - 1])


def adapt_params(double mean, double sigma, double r, double[::1] delta, double[::1] rho):
    _adapt_params(mean, sigma, r, delta, rho)


cdef inline void _stats(const double[::1] buf, Py_ssize_t head, Py_ssize_t count,
                        bint sigma_squared, double *mean, double *sigma) nogil:
    cdef Py_ssize_t j, cap = buf.shape[0]
    cdef double s = 0.0, e, v = 0.0
    for j in range(count):
        s = s + buf[(head + j) % cap]
    s = s / count
    for j in range(count):
        e = buf[(head + j) % cap] - s
        v = v + e * e
    v = v / count
    mean[0] = s
    sigma[0] = v if sigma_squared else sqrt(v)


def window_stats(const double[::1] buf, Py_ssize_t head, Py_ssize_t count, bint sigma_squared):
    cdef double mean, sigma
    _stats(buf, head, count, sigma_squared, &mean, &sigma)
    return mean, sigma


cdef inline void _step(double y, double lb, double ub, double[::1] delta, double[::1] rho,
                       double[::1] buf, Py_ssize_t *head, Py_ssize_t *count,
                       double last, bint has_last, bint sigma_squared) nogil:
    cdef Py_ssize_t cap = buf.shape[0]
    cdef double d_l = 0.0, d_u = 0.0, mean, sigma
    if has_last:
        if count[0] < cap:
            buf[(head[0] + count[0]) % cap] = y - last
            count[0] += 1
        else:
            buf[head[0]] = y - last
            head[0] = (head[0] + 1) % cap
    if y < lb:
        d_l = lb - y
    if y > ub:
        d_u = y - ub
    if count[0] > 0:
        _stats(buf, head[0], count[0], sigma_squared, &mean, &sigma)
    else:
        mean = 0.0
        sigma = 0.0
    _adapt_params(mean, sigma, d_u - d_l, delta, rho)


def adapt_step(double y, double lb, double ub, double[::1] delta, double[::1] rho,
               double[::1] buf, Py_ssize_t head, Py_ssize_t count,
               double last, bint has_last, bint sigma_squared):
    _step(y, lb, ub, delta, rho, buf, &head, &count, last, has_last, sigma_squared)
    return head, count


def run_stream(const double[::1] y, double lb, double ub,
               const double[::1] l, const double[::1] c, const double[::1] u,
               double[::1] delta, double[::1] rho,
               const long long[::1] rhs_ptr, const long long[::1] rhs_idx,
               double[::1] buf, Py_ssize_t head, Py_ssize_t count,
               double last, bint has_last, bint normalize, bint sigma_squared,
               double[::1] out, unsigned char[::1] matched,
               double[::1] dmin, double[::1] dmax, double[::1] rmax):
    cdef Py_ssize_t t, i, n = y.shape[0], k = c.shape[0]
    cdef bint m = False
    cdef double lo, hi, rm
    with nogil:
        for t in range(n):
            _step(y[t], lb, ub, delta, rho, buf, &head, &count, last, has_last, sigma_squared)
            last = _forecast(y[t], l, c, u, delta, rho, rhs_ptr, rhs_idx, normalize, &m)
            has_last = True
            out[t] = last
            matched[t] = m
            lo = delta[0]
            hi = delta[0]
            rm = rho[0]
            for i in range(1, k):
                if delta[i] < lo:
                    lo = delta[i]
                if delta[i] > hi:
                    hi = delta[i]
                if rho[i] > rm:
                    rm = rho[i]
            dmin[t] = lo
            dmax[t] = hi
            rmax[t] = rm
    return head, count, last
