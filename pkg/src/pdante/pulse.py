"""Single rectangular RF pulses: exact propagator, interaction-frame average
Hamiltonian, the free-rotation-times-AHT approximation, and the split into
short phase-modulated segments.

All frequencies are angular (rad/s), all times in seconds.

``sinc`` here is the *unnormalised* ``sin(x)/x`` with ``sinc(0) = 1``; numpy's
``np.sinc`` is the normalised ``sin(pi x)/(pi x)`` and is only used through
this wrapper.
"""

from dataclasses import dataclass

import numpy as np

from . import su2

#: Largest flip angle for which the small-flip pulse path is accepted.
MAX_SMALL_FLIP = 2 * np.pi / 9

# below this |omega_z t_p| the second-order shift uses its Taylor series;
# direct evaluation of 1 - sinc(x) loses ~1e-16/x^2 relative accuracy
_SHIFT_SERIES_WINDOW = 0.1


def sinc(x):
    """Unnormalised sinc, ``sin(x)/x``; works on scalars and arrays."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@dataclass(frozen=True)
class PulseParams:
    omega_rf: float
    phase: float
    t_p: float
    omega_z: float = 0.0

    @property
    def theta(self):
        """Nominal flip angle ``omega_rf * t_p``."""
        return self.omega_rf * self.t_p


def _check_duration(t_p):
    if not t_p > 0:
        raise ValueError(f"pulse duration must be positive, got {t_p}")


def exact_pulse(p):
    """Propagator of a rectangular pulse applied off resonance by ``omega_z``."""
    _check_duration(p.t_p)
    big_omega = np.hypot(p.omega_z, p.omega_rf)
    c = np.cos(0.5 * big_omega * p.t_p)
    s = 0.5 * p.t_p * sinc(0.5 * big_omega * p.t_p)  # sin(Omega t/2)/Omega
    h = p.omega_z * su2.IZ + p.omega_rf * (np.cos(p.phase) * su2.IX + np.sin(p.phase) * su2.IY)
    return c * su2.IDENTITY - 2j * s * h


def free_propagator(omega_z, tau):
    """``exp(-i omega_z tau Iz)``."""
    if tau < 0:
        raise ValueError(f"free evolution time must be non-negative, got {tau}")
    half = 0.5 * omega_z * tau
    return np.diag([np.exp(-1j * half), np.exp(1j * half)])


def second_order_shift(omega_z, omega_rf, t_p):
    """z-field ``b = (omega_rf^2 / 2 omega_z) (1 - sinc(omega_z t_p))``.

    Vectorised over ``omega_z``. For ``|omega_z t_p| < 0.1`` the Taylor series
    ``omega_rf^2 omega_z t_p^2 / 12 (1 - x^2/20 + x^4/840 - x^6/60480)``,
    ``x = omega_z t_p``, is used instead; its truncation error there is below
    machine precision.
    """
    w = np.asarray(omega_z, dtype=float)
    x = w * t_p
    small = np.abs(x) < _SHIFT_SERIES_WINDOW
    safe = np.where(small, 1.0, w)
    exact = omega_rf**2 / (2 * safe) * (1 - sinc(np.where(small, 1.0, x)))
    x2 = x * x
    series = omega_rf**2 * w * t_p**2 / 12 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72)))
    out = np.where(small, series, exact)
    return float(out) if out.ndim == 0 else out


def transverse_scale(omega_z, omega_rf, t_p):
    """First-order transverse amplitude ``a = omega_rf sinc(omega_z t_p / 2)``."""
    out = omega_rf * sinc(0.5 * np.asarray(omega_z, dtype=float) * t_p)
    return float(out) if np.ndim(out) == 0 else out


def single_pulse_aht(p, order=2):
    """Interaction-frame average Hamiltonian of one pulse.

    Order 1 is the transverse field ``a (Ix cos x - Iy sin x)`` with
    ``x = omega_z t_p/2 - phase``; order 2 adds ``b Iz``.
    """
    _check_duration(p.t_p)
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    a = transverse_scale(p.omega_z, p.omega_rf, p.t_p)
    x = 0.5 * p.omega_z * p.t_p - p.phase
    h = a * (np.cos(x) * su2.IX - np.sin(x) * su2.IY)
    if order == 2:
        h = h + second_order_shift(p.omega_z, p.omega_rf, p.t_p) * su2.IZ
    return h


def approx_pulse(p, order=2):
    """``U_free(omega_z t_p) exp(-i t_p Hbar)`` with Hbar from :func:`single_pulse_aht`."""
    return free_propagator(p.omega_z, p.t_p) @ su2.expm_h(single_pulse_aht(p, order), p.t_p)


def exact_pulse_ck(omega_z, omega_rf, phase, t_p):
    """Cayley-Klein pair of :func:`exact_pulse`, vectorised over ``omega_z``."""
    _check_duration(t_p)
    w = np.asarray(omega_z, dtype=float)
    big_omega = np.hypot(w, omega_rf)
    s = 0.5 * t_p * sinc(0.5 * big_omega * t_p)
    return np.cos(0.5 * big_omega * t_p) - 1j * s * w, -1j * s * omega_rf * np.exp(1j * phase)


def approx_pulse_ck(omega_z, omega_rf, phase, t_p, order=2):
    """Cayley-Klein pair of :func:`approx_pulse`, vectorised over ``omega_z``."""
    _check_duration(t_p)
    w = np.asarray(omega_z, dtype=float)
    a = transverse_scale(w, omega_rf, t_p)
    x = 0.5 * w * t_p - phase
    hz = second_order_shift(w, omega_rf, t_p) if order == 2 else np.zeros_like(w)
    inner = su2.ck_rotation(a * np.cos(x), -a * np.sin(x), hz, t_p)
    free = (np.exp(-0.5j * w * t_p), np.zeros_like(w, dtype=complex))
    return su2.ck_multiply(free, inner)


def approx_error(theta, ratios, phase=0.0, order=2, t_p=1.0):
    """``||P_exact - P_approx||`` over offsets ``omega_z = ratio * omega_rf``."""
    omega_rf = theta / t_p
    w = np.asarray(ratios, dtype=float) * omega_rf
    return su2.ck_distance(
        exact_pulse_ck(w, omega_rf, phase, t_p), approx_pulse_ck(w, omega_rf, phase, t_p, order)
    )


def split_pulse(omega_z, omega_rf, phase, t_p, n):
    """Break one off-resonance pulse into ``n`` on-resonance segments.

    Segment ``j`` (1-based) lasts ``t_p/n``, has amplitude
    ``omega_rf sinc(omega_z t_p / 2n)`` and phase
    ``-(omega_z (j - 1/2) t_p / n - phase)``. Applying the segments in order and
    then rotating about z by ``omega_z t_p`` approximates the exact pulse,
    with an error falling as ``1/n^2``.

    Returns
    -------
    segments : list of PulseParams
    z_angle : float
        Angle of the trailing z-rotation.
    """
    if n < 1:
        raise ValueError(f"need at least one segment, got {n}")
    _check_duration(t_p)
    dt = t_p / n
    amp = omega_rf * float(sinc(0.5 * omega_z * dt))
    segments = [
        PulseParams(omega_rf=amp, phase=-(omega_z * (j - 0.5) * dt - phase), t_p=dt)
        for j in range(1, n + 1)
    ]
    return segments, omega_z * t_p


def compose_split(segments, z_angle):
    """Propagator of the output of :func:`split_pulse`."""
    u = su2.IDENTITY
    for seg in segments:
        u = exact_pulse(seg) @ u
    return su2.rz(z_angle) @ u


def dante_effective_pulse(n, theta, t_p, tau, omega_z, reading="angle"):
    """Off-resonance single pulse that mimics a DANTE train (diagnostic).

    The train of ``n`` pulses with period ``tau_t = tau + t_p`` behaves like one
    pulse of length ``n t_p`` at an effective offset ``omega_z'``, amplitude
    ``omega_rf' = omega_rf sinc(omega_z t_p/2) / sinc(omega_z' t_p/2)`` and phase
    ``(t_p/2)(omega_z' - omega_z)``, followed by a z-rotation.

    ``reading`` chooses how the effective offset is formed from the wrapped
    per-period phase ``m = mod(omega_z tau_t, 2 pi)`` (centred on zero):

    * ``"angle"``: ``omega_z' = m / t_p``
    * ``"scaled"``: ``omega_z' = (2 pi / t_p) m``

    Returns ``(PulseParams, z_angle)``; compose as ``rz(z_angle) @ exact_pulse(p)``.
    """
    omega_rf = theta / t_p
    tau_t = tau + t_p
    wrapped = np.angle(np.exp(1j * omega_z * tau_t))
    if reading == "angle":
        wz_eff = wrapped / t_p
    elif reading == "scaled":
        wz_eff = 2 * np.pi * wrapped / t_p
    else:
        raise ValueError(f"unknown reading {reading!r}")
    rf_eff = omega_rf * float(sinc(0.5 * omega_z * t_p) / sinc(0.5 * wz_eff * t_p))
    phase_eff = 0.5 * t_p * (wz_eff - omega_z)
    total = (n - 1) * tau_t + t_p
    p = PulseParams(omega_rf=rf_eff, phase=phase_eff, t_p=n * t_p, omega_z=wz_eff)
    return p, omega_z * total - wz_eff * n * t_p
