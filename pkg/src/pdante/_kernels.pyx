# cython: language_level=3
"""Compiled inner loops.

Both routines write into caller-owned output buffers and release the GIL, so
``pdante.kernels`` can split an offset grid into chunks and run them on a
thread pool. The numpy twin lives in ``_kernels_py.py`` and must keep the same
signatures.

Propagators are carried in Cayley-Klein form: a spin-1/2 rotation
``[[a, -conj(b)], [b, conj(a)]]`` is stored as the pair ``(a, b)``.
"""

cdef extern from "complex.h" nogil:
    double complex conj(double complex)
    double cimag(double complex)
    double creal(double complex)

from libc.math cimport cos, sin, sqrt

import numpy as np


def sequence_ck(const double[::1] omega_z, double omega_rf, double t_p,
                const double[::1] phases, const double[::1] delays,
                double complex[::1] alpha_out, double complex[::1] beta_out):
    """Exact pulse-train propagator for every offset in ``omega_z``.

    Pulse ``k`` has phase ``phases[k]``; ``delays[k]`` is the free evolution
    between pulse ``k`` and ``k + 1``.
    """
    cdef Py_ssize_t m, k
    cdef Py_ssize_t n_off = omega_z.shape[0]
    cdef Py_ssize_t n_pulses = phases.shape[0]
    cdef double w, big_omega, c, s, half_angle
    cdef double complex pa, pb, fa, a, b, a_new
    cdef double complex I = 1j
    # -i e^{i phi_k}, shared by every offset
    cdef double complex[::1] rot = np.empty(n_pulses, dtype=np.complex128)
    for k in range(n_pulses):
        rot[k] = sin(phases[k]) - I * cos(phases[k])
    with nogil:
        for m in range(n_off):
            w = omega_z[m]
            big_omega = sqrt(w * w + omega_rf * omega_rf)
            c = cos(0.5 * big_omega * t_p)
            if big_omega > 0.0:
                s = sin(0.5 * big_omega * t_p) / big_omega
            else:
                s = 0.5 * t_p
            pa = c - I * s * w
            a = pa
            b = s * omega_rf * rot[0]
            for k in range(1, n_pulses):
                half_angle = 0.5 * w * delays[k - 1]
                fa = cos(half_angle) - I * sin(half_angle)
                a = fa * a
                b = conj(fa) * b
                pb = s * omega_rf * rot[k]
                a_new = pa * a - conj(pb) * b
                b = pb * a + conj(pa) * b
                a = a_new
            alpha_out[m] = a
            beta_out[m] = b


def toggling_sums(const double[::1] omega_z, const double[::1] times,
                  const double[::1] phases, double t_p, int order,
                  double complex[::1] s1, double complex[::1] s2t,
                  double[::1] s2z):
    """Phase sums behind the sequence-level average Hamiltonian.

    With ``x_k = w*T_k - phi_k + w*t_p/2`` and ``E_k = exp(i x_k)``:

    * ``s1  = sum_k E_k``
    * ``s2t = sum_{j<k} sin((x_j - x_k)/2) exp(i (x_j + x_k)/2)
            = (1/2i) sum_k (N - 1 - 2k) E_k``
    * ``s2z = sum_{j<k} sin(x_k - x_j) = Im sum_k E_k conj(E_0 + ... + E_{k-1})``

    Both pair sums are O(N) per offset; skipped when ``order < 2``.
    """
    cdef Py_ssize_t m, k
    cdef Py_ssize_t n_off = omega_z.shape[0]
    cdef Py_ssize_t n = times.shape[0]
    cdef double w, x, accz
    cdef double complex I = 1j
    cdef double complex e, acc1, accw, prefix
    with nogil:
        for m in range(n_off):
            w = omega_z[m]
            acc1 = 0.0
            accw = 0.0
            prefix = 0.0
            accz = 0.0
            for k in range(n):
                x = w * times[k] - phases[k] + 0.5 * w * t_p
                e = cos(x) + I * sin(x)
                acc1 = acc1 + e
                if order >= 2:
                    accw = accw + (n - 1 - 2 * k) * e
                    accz = accz + cimag(e * conj(prefix))
                    prefix = prefix + e
            s1[m] = acc1
            s2t[m] = -0.5 * I * accw
            s2z[m] = accz
