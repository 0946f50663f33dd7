"""Pure-numpy twin of ``_kernels.pyx``.

Same signatures, same output-buffer convention. Vectorised over offsets;
loops run over pulses; the pair sums use the same O(N) forms as the
compiled code.
"""

import numpy as np


def sequence_ck(omega_z, omega_rf, t_p, phases, delays, alpha_out, beta_out):
    w = np.asarray(omega_z, dtype=float)
    big_omega = np.sqrt(w * w + omega_rf * omega_rf)
    c = np.cos(0.5 * big_omega * t_p)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(big_omega > 0.0, np.sin(0.5 * big_omega * t_p) / big_omega, 0.5 * t_p)
    pa = c - 1j * s * w
    a = pa.copy()
    b = -1j * s * omega_rf * np.exp(1j * phases[0])
    for k in range(1, len(phases)):
        fa = np.exp(-0.5j * w * delays[k - 1])
        a = fa * a
        b = np.conj(fa) * b
        pb = -1j * s * omega_rf * np.exp(1j * phases[k])
        a, b = pa * a - np.conj(pb) * b, pb * a + np.conj(pa) * b
    alpha_out[:] = a
    beta_out[:] = b


def toggling_sums(omega_z, times, phases, t_p, order, s1, s2t, s2z):
    w = np.asarray(omega_z, dtype=float)[:, None]
    x = w * np.asarray(times)[None, :] - np.asarray(phases)[None, :] + 0.5 * w * t_p
    e = np.exp(1j * x)
    s1[:] = e.sum(axis=1)
    if order < 2:
        s2t[:] = 0.0
        s2z[:] = 0.0
        return
    n = e.shape[1]
    s2t[:] = -0.5j * (e * (n - 1 - 2 * np.arange(n))).sum(axis=1)
    # exclusive running sum E_0 + ... + E_{k-1}
    prefix = np.cumsum(e, axis=1) - e
    s2z[:] = np.imag(e * np.conj(prefix)).sum(axis=1)
