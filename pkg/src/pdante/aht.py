"""Sequence-level average Hamiltonians and resonance predictions.

Conventions
-----------
Pulse ``k`` (0-based) starts at ``T_k`` and in the toggling frame carries the
phase ``x_k = omega_z T_k - phi_k + omega_z t_p / 2``. With
``a = omega_rf sinc(omega_z t_p/2)`` and ``b`` the single-pulse z shift
(see :mod:`pdante.pulse`) the average Hamiltonian is
``c I+ + conj(c) I- + hz Iz`` where::

    c  = a/(2N) sum_k e^{i x_k}
         + (a b t_p / 2N) sum_{j<k} sin((x_j - x_k)/2) e^{i (x_j + x_k)/2}   (order 2)
    hz = b + (a^2 t_p / 2N) sum_{j<k} sin(x_k - x_j)                           (order 2)

Order 1 keeps the ``b Iz`` field, which is already present in the average of
the single-pulse Hamiltonians; order 2 adds the pairwise commutator terms.
The propagator over the whole train is
``U_free(omega_z T_tot) exp(-i N t_p Hbar)``.

All functions named ``*_components`` are vectorised over ``omega_z`` and
return ``(hx, hy, hz)`` with ``Hbar = hx Ix + hy Iy + hz Iz``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, su2
from .bessel import jn_symmetric
from .errors import ConvergenceError
from .pulse import second_order_shift, transverse_scale

#: Bessel scales below this are reported as suppressed resonances.
SUPPRESSION_THRESHOLD = 0.06
#: Default constant ``c`` of the validity window ``c theta / (Theta tau_t)`` (Hz).
WINDOW_CONSTANT = 3 / 5

# |eps| below which the DANTE closed forms hand over to direct sums
_SINGULAR_WINDOW = 0.05
_BESSEL_TAIL = 1e-10
_BESSEL_NMAX_CAP = 4096


@dataclass(frozen=True)
class AhtResult:
    h_avg: np.ndarray
    order: int
    duration: float
    transverse_amplitude: float
    z_amplitude: float


@dataclass(frozen=True)
class ResonancePrediction:
    delta_nu: float
    m: int
    n: int
    bessel_order: int
    bessel_argument: float
    scale: float

    @property
    def suppressed(self):
        return abs(self.scale) < SUPPRESSION_THRESHOLD


def _result(hx, hy, hz, order, duration):
    hx, hy, hz = float(hx), float(hy), float(hz)
    return AhtResult(
        h_avg=su2.hermitian(hx, hy, hz),
        order=order,
        duration=duration,
        transverse_amplitude=float(np.hypot(hx, hy)),
        z_amplitude=hz,
    )


def _check_order(order):
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")


def _split_pi(x):
    """Write ``x = n pi + eps`` with integer ``n`` and ``|eps| <= pi/2``."""
    n = np.round(x / np.pi)
    return n, x - n * np.pi


def dirichlet_ratio(n, x):
    """``sin(n x) / (n sin x)``, finite everywhere (equals ``+-1`` at ``x = k pi``)."""
    k, eps = _split_pi(np.asarray(x, dtype=float))
    sign = np.where((k * (n - 1)) % 2 == 0, 1.0, -1.0)
    return sign * np.sinc(n * eps / np.pi) / np.sinc(eps / np.pi)


def _dante_pair_sums(n, y):
    """``S_z = sum_{j<k} sin((k-j) y)`` and ``G = sum_m m sin(m y)``, m = -(n-1)/2..(n-1)/2."""
    y = np.asarray(y, dtype=float)
    _, eps = _split_pi(y / 2)
    near = np.abs(eps) < _SINGULAR_WINDOW
    s_half = np.sin(y / 2)
    safe = np.where(near, 1.0, s_half)
    with np.errstate(divide="ignore", invalid="ignore"):
        sz = (n * np.sin(y) - np.sin(n * y)) / (4 * safe**2)
        g = -(0.5 * n * np.cos(n * y / 2) * s_half - 0.5 * np.sin(n * y / 2) * np.cos(y / 2)) / safe**2
    if near.any():
        yn = y[near][:, None]
        d = np.arange(1, n)
        sz[near] = ((n - d)[None, :] * np.sin(d[None, :] * yn)).sum(axis=1)
        m = np.arange(n) - (n - 1) / 2
        g[near] = (m[None, :] * np.sin(m[None, :] * yn)).sum(axis=1)
    return sz, g


def dante_components(n, theta, t_p, tau, omega_z, order=2):
    """Closed-form DANTE average Hamiltonian, vectorised over ``omega_z``.

    The transverse field lies along ``I_T = Ix cos(w T_tot/2) - Iy sin(w T_tot/2)``
    with magnitude ``a D_N(w tau_t / 2) - (a b t_p / N) G(w tau_t)`` and the
    z field is ``b + (a^2 t_p / 2N) S_z(w tau_t)``. Removable singularities at
    ``w tau_t = 2 pi k`` are handled through exact direct sums.
    """
    _check_order(order)
    w = np.atleast_1d(np.asarray(omega_z, dtype=float))
    omega_rf = theta / t_p
    tau_t = tau + t_p
    total = (n - 1) * tau_t + t_p
    a = transverse_scale(w, omega_rf, t_p)
    b = second_order_shift(w, omega_rf, t_p)
    y = w * tau_t
    trans = a * dirichlet_ratio(n, y / 2)
    hz = np.array(b, dtype=float, copy=True)
    if order == 2 and n > 1:
        sz, g = _dante_pair_sums(n, y)
        trans = trans - a * b * t_p / n * g
        hz = hz + a * a * t_p / (2 * n) * sz
    beta = 0.5 * w * total
    return trans * np.cos(beta), -trans * np.sin(beta), hz


def dante_avg_hamiltonian(n, theta, t_p, tau, omega_z, order=2):
    hx, hy, hz = dante_components(n, theta, t_p, tau, omega_z, order)
    return _result(hx[0], hy[0], hz[0], order, n * t_p)


def sequence_components(times, phases, theta, t_p, omega_z, order=2, backend=None):
    """Average Hamiltonian of an arbitrary train by direct phase sums."""
    _check_order(order)
    w = np.atleast_1d(np.asarray(omega_z, dtype=float))
    n = len(times)
    omega_rf = theta / t_p
    a = transverse_scale(w, omega_rf, t_p)
    b = second_order_shift(w, omega_rf, t_p)
    s1, s2t, s2z = kernels.toggling_sums(w, times, phases, t_p, order, backend=backend)
    c = a / (2 * n) * s1
    hz = np.array(b, dtype=float, copy=True)
    if order == 2:
        c = c + a * b * t_p / (2 * n) * s2t
        hz = hz + a * a * t_p / (2 * n) * s2z
    return 2 * c.real, -2 * c.imag, hz


def spec_components(spec, omega_z, order=2, backend=None):
    return sequence_components(spec.times, spec.phases, spec.theta, spec.t_p, omega_z, order, backend)


def pdante_avg_hamiltonian(times, theta, t_p, omega_z, nu0, order=2):
    """Average Hamiltonian of a train phase-locked to ``nu0`` (Hz).

    ``times`` are the pulse start times; the phases are ``2 pi nu0 T_k``.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("pulse times must be strictly increasing")
    phases = 2 * np.pi * nu0 * times
    hx, hy, hz = sequence_components(times, phases, theta, t_p, omega_z, order)
    return _result(hx[0], hy[0], hz[0], order, len(times) * t_p)


def bessel_components(tau, delta_tau, f, n, theta, t_p, omega_z, nu0=0.0, n_max=64,
                      include_pulse_width=False, auto=True):
    """First-order average Hamiltonian of the cosine-modulated train as a Bessel series.

    With ``dw = omega_z - 2 pi nu0``, ``z = dw delta_tau csc(pi/f) / 2`` and
    ``w_n = dw tau + 2 n pi / f``::

        c = (a/2) sum_n J_n(z) D_N(w_n / 2) e^{i chi_n}
        chi_n = dw ((N-1) tau - delta_tau)/2 + N n pi / f + omega_z t_p / 2

    Pulse start times are the delay-only sums ``T_k = sum_{j<=k} tau_j``; with
    ``include_pulse_width`` ``tau`` is replaced by ``tau + t_p``, which makes
    the series exact for the stored sequence times.

    ``n_max`` is doubled while ``|J_{n_max}(z)| > 1e-10`` (when ``auto``).

    Returns
    -------
    hx, hy, hz : ndarray
    n_used : int
        Truncation order that met the tail tolerance.

    Raises
    ------
    ConvergenceError
        The tail tolerance is not met.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if tau < delta_tau or delta_tau < 0:
        raise ValueError("need tau >= delta_tau >= 0")
    s = np.sin(np.pi / f)
    if abs(s) < 1e-12:
        raise ValueError("pi/f is a multiple of pi; the cosine law is constant")
    w = np.atleast_1d(np.asarray(omega_z, dtype=float))
    dw = w - 2 * np.pi * nu0
    step = tau + t_p if include_pulse_width else tau
    z = dw * delta_tau / (2 * s)
    while True:
        table = jn_symmetric(n_max, z)
        tail = max(np.abs(table[0]).max(), np.abs(table[-1]).max())
        if tail <= _BESSEL_TAIL:
            break
        if not auto or 2 * n_max > _BESSEL_NMAX_CAP:
            raise ConvergenceError(
                f"Bessel tail {tail:.3g} exceeds {_BESSEL_TAIL:g} at n_max={n_max}"
            )
        n_max *= 2
    orders = np.arange(-n_max, n_max + 1)[:, None]
    wn = dw[None, :] * step + 2 * np.pi * orders / f
    chi = dw[None, :] * ((n - 1) * step - delta_tau) / 2 + n * orders * np.pi / f + w[None, :] * t_p / 2
    a = transverse_scale(w, theta / t_p, t_p)
    c = 0.5 * a * (table * dirichlet_ratio(n, wn / 2) * np.exp(1j * chi)).sum(axis=0)
    hz = np.array(second_order_shift(w, theta / t_p, t_p), dtype=float, copy=True)
    return 2 * c.real, -2 * c.imag, hz, n_max


def pdante_bessel_first_order(tau, delta_tau, f, n, theta, t_p, omega_z, nu0=0.0, n_max=64,
                              include_pulse_width=False):
    hx, hy, hz, _ = bessel_components(tau, delta_tau, f, n, theta, t_p, omega_z, nu0, n_max,
                                      include_pulse_width)
    return _result(hx[0], hy[0], hz[0], 1, n * t_p)


def propagator_ck(components, omega_z, n, t_p, total_time):
    """Cayley-Klein pair of ``U_free(omega_z T_tot) exp(-i N t_p Hbar)``."""
    hx, hy, hz = components
    w = np.atleast_1d(np.asarray(omega_z, dtype=float))
    inner = su2.ck_rotation(hx, hy, hz, n * t_p)
    free = (np.exp(-0.5j * w * total_time), np.zeros_like(w, dtype=complex))
    return su2.ck_multiply(free, inner)


def aht_ck(spec, omega_z, order=2, backend=None):
    comps = spec_components(spec, omega_z, order, backend)
    return propagator_ck(comps, omega_z, spec.n_pulses, spec.t_p, spec.total_time)


def aht_propagator(spec, omega_z, order=2):
    """2x2 AHT propagator of ``spec`` at a single offset (rad/s)."""
    a, b = aht_ck(spec, [omega_z], order)
    return su2.ck_to_matrix(a[0], b[0])


def dante_line_position(theta_total, tau_over_tp, n, omega_ratio):
    """Continuous position ``(w_z/w_rf)(Theta / 2 pi n)(tau/t_p + 1)`` of resonance line ``n``."""
    if n == 0:
        raise ValueError("resonance index n must be non-zero")
    return omega_ratio * theta_total / (2 * np.pi * n) * (tau_over_tp + 1)


def dante_resonance_lines(theta_total, tau_over_tp, n, omega_ratio):
    """Pulse count of DANTE resonance line ``n`` at a given offset ratio (nearest integer)."""
    return int(np.round(dante_line_position(theta_total, tau_over_tp, n, omega_ratio)))


def dante_ridge_lines(theta_total, tau_over_tp, n, omega_ratio, constant=WINDOW_CONSTANT):
    """The two error ridges flanking line ``n``, at ``+-constant / n`` pulses."""
    x = dante_line_position(theta_total, tau_over_tp, n, omega_ratio)
    off = constant / abs(n)
    return int(np.round(x - off)), int(np.round(x + off))


def validity_window(theta, theta_total, tau_t, constant=WINDOW_CONSTANT):
    """Half-width (Hz) of the near-resonance band where AHT is least accurate."""
    return constant * theta / (theta_total * tau_t)


def pdante_resonances(tau, f, delta_ratio, m_range, n_range):
    """Resonance comb ``dnu = (m - n/f)/tau`` with Bessel weights.

    ``m_range`` and ``n_range`` are inclusive ``(lo, hi)`` pairs. Results are
    sorted by ``|dnu|`` and then by ``dnu``.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if f == 0:
        raise ValueError("modulation parameter f must be non-zero")
    csc = 1 / np.sin(np.pi / f)
    ms = np.arange(m_range[0], m_range[1] + 1)
    ns = np.arange(n_range[0], n_range[1] + 1)
    if ms.size == 0 or ns.size == 0:
        return []
    shift = ms[:, None] - ns[None, :] / f
    arg = shift * np.pi * delta_ratio * csc
    n_top = int(np.abs(ns).max())
    table = jn_symmetric(n_top, arg)  # (2 n_top + 1, len(ms), len(ns))
    out = []
    for i, m in enumerate(ms):
        for j, n in enumerate(ns):
            scale = float(table[n_top + n, i, j])
            out.append(ResonancePrediction(float(shift[i, j] / tau), int(m), int(n), int(n),
                                           float(arg[i, j]), scale))
    out.sort(key=lambda r: (abs(r.delta_nu), r.delta_nu, r.m))
    return out
