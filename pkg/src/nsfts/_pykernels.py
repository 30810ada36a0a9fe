"""Pure-Python fallback for the compiled kernels.

Mirrors ``_ckernels.pyx`` statement for statement so the two backends agree bitwise.
Arrays are converted to lists once per call; outputs are written back in place.
"""
import math

import numpy as np


def membership(x, l, c, u):
    if x < l or x > u:
        return 0.0
    if x <= c:
        if c == l:
            return 1.0 if x == c else 0.0
        return (x - l) / (c - l)
    if u == c:
        return 0.0
    return (u - x) / (u - c)


def _nearest(x, c, delta):
    best = 0
    bestd = abs(x - (c[0] + delta[0]))
    for i in range(1, len(c)):
        d = abs(x - (c[i] + delta[i]))
        if d < bestd:
            bestd = d
            best = i
    return best


def _argmax(x, l, c, u, zero):
    best = 0
    bestm = -1.0
    for i in range(len(c)):
        m = membership(x, l[i], c[i], u[i])
        if m > bestm:
            bestm = m
            best = i
    if bestm <= 0.0:
        return _nearest(x, c, zero)
    return best


def argmax_sequence(y, l, c, u):
    l, c, u = l.tolist(), c.tolist(), u.tolist()
    zero = [0.0] * len(c)
    return np.array([_argmax(v, l, c, u, zero) for v in np.asarray(y).tolist()], dtype=np.int64)


def _fuzzify(x, l, c, u, delta, rho):
    out = [0.0] * len(c)
    for i in range(len(c)):
        d = delta[i]
        h = rho[i] / 2.0
        out[i] = membership(x, (l[i] + d) - h, c[i] + d, (u[i] + d) + h)
    return out


def fuzzify(x, l, c, u, delta, rho):
    return _fuzzify(x, l.tolist(), c.tolist(), u.tolist(), delta.tolist(), rho.tolist())


def _forecast(x, l, c, u, delta, rho, rhs_ptr, rhs_idx, normalize):
    num = 0.0
    den = 0.0
    for j in range(len(c)):
        a = rhs_ptr[j]
        b = rhs_ptr[j + 1]
        if a == b:
            continue
        d = delta[j]
        h = rho[j] / 2.0
        m = membership(x, (l[j] + d) - h, c[j] + d, (u[j] + d) + h)
        if m > 0.0:
            mp = 0.0
            for q in range(a, b):
                mp = mp + (c[rhs_idx[q]] + delta[rhs_idx[q]])
            mp = mp / (b - a)
            num = num + m * mp
            den = den + m
    if den > 0.0:
        return (num / den if normalize else num), True
    j = _nearest(x, c, delta)
    return c[j] + delta[j], False


def forecast(x, l, c, u, delta, rho, rhs_ptr, rhs_idx, normalize):
    return _forecast(float(x), l.tolist(), c.tolist(), u.tolist(), delta.tolist(), rho.tolist(),
                     rhs_ptr.tolist(), rhs_idx.tolist(), normalize)


def _adapt_params(mean, sigma, r, delta, rho):
    k = len(delta)
    mp = r / 2.0
    for i in range(k):
        delta[i] = mean + (i * r / (k - 1) - mp) + (i * (2.0 * sigma) / (k - 1) - sigma)
    rho[0] = abs(delta[0] - delta[1])
    for i in range(1, k - 1):
        rho[i] = abs(delta[i - 1] - delta[i + 1])
    rho[k - 1] = abs(delta[k - 2] - delta[k - 1])


def adapt_params(mean, sigma, r, delta, rho):
    d = [0.0] * len(delta)
    p = [0.0] * len(rho)
    _adapt_params(mean, sigma, r, d, p)
    delta[:] = d
    rho[:] = p


def _stats(buf, head, count, sigma_squared):
    cap = len(buf)
    s = 0.0
    for j in range(count):
        s = s + buf[(head + j) % cap]
    s = s / count
    v = 0.0
    for j in range(count):
        e = buf[(head + j) % cap] - s
        v = v + e * e
    v = v / count
    return s, (v if sigma_squared else math.sqrt(v))


def window_stats(buf, head, count, sigma_squared):
    return _stats(np.asarray(buf).tolist(), head, count, sigma_squared)


def _step(y, lb, ub, delta, rho, buf, head, count, last, has_last, sigma_squared):
    cap = len(buf)
    if has_last:
        if count < cap:
            buf[(head + count) % cap] = y - last
            count += 1
        else:
            buf[head] = y - last
            head = (head + 1) % cap
    d_l = lb - y if y < lb else 0.0
    d_u = y - ub if y > ub else 0.0
    if count > 0:
        mean, sigma = _stats(buf, head, count, sigma_squared)
    else:
        mean, sigma = 0.0, 0.0
    _adapt_params(mean, sigma, d_u - d_l, delta, rho)
    return head, count


def adapt_step(y, lb, ub, delta, rho, buf, head, count, last, has_last, sigma_squared):
    d, p, b = delta.tolist(), rho.tolist(), buf.tolist()
    head, count = _step(float(y), lb, ub, d, p, b, head, count, last, has_last, sigma_squared)
    delta[:] = d
    rho[:] = p
    buf[:] = b
    return head, count


def run_stream(y, lb, ub, l, c, u, delta, rho, rhs_ptr, rhs_idx, buf, head, count,
               last, has_last, normalize, sigma_squared, out, matched, dmin, dmax, rmax):
    l, c, u = l.tolist(), c.tolist(), u.tolist()
    ptr, idx = rhs_ptr.tolist(), rhs_idx.tolist()
    d, p, b = delta.tolist(), rho.tolist(), buf.tolist()
    for t, v in enumerate(np.asarray(y).tolist()):
        head, count = _step(v, lb, ub, d, p, b, head, count, last, has_last, sigma_squared)
        last, m = _forecast(v, l, c, u, d, p, ptr, idx, normalize)
        has_last = True
        out[t] = last
        matched[t] = m
        dmin[t] = min(d)
        dmax[t] = max(d)
        rmax[t] = max(p)
    delta[:] = d
    rho[:] = p
    buf[:] = b
    return head, count, last
