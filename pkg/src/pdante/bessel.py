"""Integer-order Bessel functions of the first kind by Miller's algorithm.

The recurrence ``J_{n-1}(x) = (2n/x) J_n(x) - J_{n+1}(x)`` is run downward from
an order well above both ``n_max`` and ``|x|``, where it is stable, and the
result is normalised with ``J_0 + 2 sum_k J_{2k} = 1``.
"""

from math import lgamma

import numpy as np

_RESCALE = 1e250
# below this |x| the recurrence ratio 2n/x is too large; use the power series
_SMALL = 1e-8


def _small_series(n_max, xs):
    """Two-term power series ``(x/2)^n / n! (1 - (x/2)^2 / (n+1))``."""
    n = np.arange(n_max + 1)[:, None]
    half = xs[None, :] / 2
    log_fact = np.array([lgamma(k + 1) for k in range(n_max + 1)])[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.exp(n * np.log(half) - log_fact)
    lead[0] = 1.0
    return lead * (1 - half**2 / (n + 1))


def _start_order(n_max, x_abs):
    m = max(n_max, int(np.ceil(x_abs))) + 20 + int(np.sqrt(40 * max(n_max, x_abs, 1.0)))
    return m + (m % 2)


def jn_table(n_max, x):
    """``J_n(x)`` for ``n = 0..n_max``; output shape ``(n_max + 1,) + x.shape``."""
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    x = np.asarray(x, dtype=float)
    flat = np.abs(x).ravel()
    out = np.zeros((n_max + 1, flat.size))
    zero = flat == 0.0
    out[0, zero] = 1.0
    small = ~zero & (flat < _SMALL)
    if small.any():
        out[:, small] = _small_series(n_max, flat[small])
    rest = flat >= _SMALL
    xs = flat[rest]
    if xs.size:
        start = _start_order(n_max, xs.max())
        j_next = np.zeros_like(xs)
        j_cur = np.full_like(xs, 1e-300)
        norm = np.zeros_like(xs)
        body = np.zeros((n_max + 1, xs.size))
        for n in range(start, 0, -1):
            # j_cur holds J_n, produce J_{n-1}
            j_prev = (2 * n / xs) * j_cur - j_next
            j_next, j_cur = j_cur, j_prev
            if n - 1 <= n_max:
                body[n - 1] = j_cur
            if (n - 1) % 2 == 0 and n - 1 > 0:
                norm += 2 * j_cur
            big = np.abs(j_cur) > _RESCALE
            if big.any():
                scale = np.where(big, 1 / _RESCALE, 1.0)
                j_cur *= scale
                j_next *= scale
                norm *= scale
                body *= scale
        norm += j_cur
        out[:, rest] = body / norm
    sign = np.where(x.ravel() < 0, -1.0, 1.0)
    parity = sign[None, :] ** np.arange(n_max + 1)[:, None]
    return (out * parity).reshape((n_max + 1,) + x.shape)


def jn(n, x):
    """``J_n(x)`` for any integer ``n`` (negative orders via ``J_{-n} = (-1)^n J_n``)."""
    m = abs(int(n))
    val = jn_table(m, x)[m]
    if n < 0 and m % 2:
        val = -val
    return float(val) if np.ndim(val) == 0 else val


def jn_symmetric(n_max, x):
    """``J_n(x)`` for ``n = -n_max..n_max``; shape ``(2 n_max + 1,) + x.shape``."""
    pos = jn_table(n_max, x)
    k = np.arange(1, n_max + 1)
    sign = ((-1.0) ** k).reshape((-1,) + (1,) * np.ndim(x))
    neg = (pos[1:] * sign)[::-1]
    return np.concatenate([neg, pos], axis=0)
