"""Backend selection for the hot loops.

The compiled extension ``pdante._kernels`` is used when it imports; otherwise
the numpy twin in ``pdante._kernels_py``. ``PDANTE_BACKEND=python`` forces the
fallback. ``PDANTE_THREADS`` sets how many worker threads split an offset
grid; every offset is computed independently, so the thread count never
changes the numbers.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("PDANTE_BACKEND", "").lower() == "python":
        raise ImportError("python backend forced")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"

_MIN_CHUNK = 256


def thread_count():
    try:
        n = int(os.environ.get("PDANTE_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _chunks(n, threads):
    if threads <= 1 or n < 2 * _MIN_CHUNK:
        return [slice(0, n)]
    size = max(_MIN_CHUNK, -(-n // threads))
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def _run(fn, n, threads):
    parts = _chunks(n, threads)
    if len(parts) == 1:
        fn(parts[0])
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(fn, parts))


def sequence_ck(omega_z, omega_rf, t_p, phases, delays, backend=None):
    """Cayley-Klein pair ``(a, b)`` of the exact pulse-train propagator.

    Parameters
    ----------
    omega_z : array_like
        Resonance offsets, rad/s.
    omega_rf : float
        Pulse amplitude, rad/s.
    t_p : float
        Pulse duration, s.
    phases : array_like, shape (N,)
        Pulse phases, rad.
    delays : array_like, shape (N-1,)
        Free-evolution periods between consecutive pulses, s.
    """
    mod = BACKENDS[backend or BACKEND]
    w = np.ascontiguousarray(np.atleast_1d(omega_z), dtype=float)
    ph = np.ascontiguousarray(phases, dtype=float)
    dl = np.ascontiguousarray(delays, dtype=float)
    if dl.shape[0] != ph.shape[0] - 1:
        raise ValueError("need exactly one delay between each pair of pulses")
    a = np.empty(w.shape[0], dtype=complex)
    b = np.empty(w.shape[0], dtype=complex)

    def work(sl):
        mod.sequence_ck(w[sl], float(omega_rf), float(t_p), ph, dl, a[sl], b[sl])

    _run(work, w.shape[0], thread_count())
    return a, b


def toggling_sums(omega_z, times, phases, t_p, order, backend=None):
    """First- and second-order toggling-frame phase sums, see ``_kernels.pyx``."""
    mod = BACKENDS[backend or BACKEND]
    w = np.ascontiguousarray(np.atleast_1d(omega_z), dtype=float)
    tk = np.ascontiguousarray(times, dtype=float)
    ph = np.ascontiguousarray(phases, dtype=float)
    s1 = np.empty(w.shape[0], dtype=complex)
    s2t = np.empty(w.shape[0], dtype=complex)
    s2z = np.empty(w.shape[0], dtype=float)

    def work(sl):
        mod.toggling_sums(w[sl], tk, ph, float(t_p), int(order), s1[sl], s2t[sl], s2z[sl])

    _run(work, w.shape[0], thread_count())
    return s1, s2t, s2z
