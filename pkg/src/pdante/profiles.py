"""Excitation profiles, ensemble averages, validity maps and AHT error profiles.

Every profile starts from equilibrium ``(0, 0, 1)`` and records
``(<Ix>, -<Iy>, <Iz>)`` at offsets ``delta_nu`` (Hz) from the target
frequency, i.e. at ``omega_z = 2 pi (nu0 + delta_nu)``.

Engines: ``"exact"`` (ordered product of exact pulse and free propagators),
``"aht-1"`` and ``"aht-2"`` (average Hamiltonian to first or second order).
"""

from dataclasses import dataclass, field

import numpy as np

from . import aht, kernels, su2
from .pulse import MAX_SMALL_FLIP

ENGINES = ("exact", "aht-1", "aht-2")
_ALIASES = {"aht1": "aht-1", "aht2": "aht-2"}

#: Off-resonance exclusion half-width for ensemble statistics (Hz).
DEFAULT_EXCLUSION = 39.0
DEFAULT_CHECKPOINTS = (1, 25, 100)
#: Pulse length used internally by :func:`validity_map`; only tau/t_p matters.
VALIDITY_TP = 1e-6


def normalize_engine(engine):
    engine = _ALIASES.get(engine, engine)
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    return engine


@dataclass(frozen=True)
class Profile:
    offsets: np.ndarray
    ix: np.ndarray
    minus_iy: np.ndarray
    iz: np.ndarray
    engine: str
    specs: tuple = field(default=(), compare=False)

    def as_array(self):
        """Shape ``(3, M)``: ix, minus_iy, iz."""
        return np.stack([self.ix, self.minus_iy, self.iz])


@dataclass(frozen=True)
class EnsembleResult:
    profile: Profile
    n_avg: int
    baseline_mean_excitation: float
    baseline_mean_z: float
    fluctuation_std: float
    exclusion_window: float


@dataclass(frozen=True)
class ValidityMap:
    n_values: np.ndarray
    offset_ratios: np.ndarray
    distances: np.ndarray  # shape (len(n_values), len(offset_ratios))
    theta_total: float
    tau_over_tp: float
    order: int


def exact_ck(spec, omega_z, backend=None):
    return kernels.sequence_ck(
        omega_z, spec.omega_rf, spec.t_p, spec.phases, spec.delays, backend=backend
    )


def exact_sequence_propagator(spec, omega_z):
    """2x2 exact propagator of ``spec`` at one offset (rad/s)."""
    a, b = exact_ck(spec, [omega_z])
    return su2.ck_to_matrix(a[0], b[0])


def engine_ck(spec, omega_z, engine):
    engine = normalize_engine(engine)
    if engine == "exact":
        return exact_ck(spec, omega_z)
    return aht.aht_ck(spec, omega_z, order=int(engine[-1]))


def _bloch_rows(spec, offsets, engine):
    w = 2 * np.pi * (spec.nu0 + np.asarray(offsets, dtype=float))
    x, y, z = su2.ck_bloch_from_z(*engine_ck(spec, w, engine))
    return np.stack([x, -y, z])


def profile(spec, offsets, engine="exact"):
    offsets = np.asarray(offsets, dtype=float)
    if not np.all(np.isfinite(offsets)):
        raise ValueError("offsets must be finite")
    engine = normalize_engine(engine)
    ix, miy, iz = _bloch_rows(spec, offsets, engine)
    return Profile(offsets, ix, miy, iz, engine, (spec,))


def _check_compatible(specs):
    if not specs:
        raise ValueError("need at least one sequence")
    ref = specs[0]
    for s in specs[1:]:
        if (s.n_pulses, s.theta, s.t_p, s.nu0) != (ref.n_pulses, ref.theta, ref.t_p, ref.nu0):
            raise ValueError("ensemble members must share N, theta, t_p and nu0")


def member_profiles(specs, offsets, engine="exact"):
    """Stacked member profiles, shape ``(P, 3, M)``, in list order."""
    _check_compatible(specs)
    engine = normalize_engine(engine)
    offsets = np.asarray(offsets, dtype=float)
    return np.stack([_bloch_rows(s, offsets, engine) for s in specs])


def _window_mask(offsets, exclusion_window):
    mask = np.abs(np.asarray(offsets)) > exclusion_window
    if not mask.any():
        raise ValueError(f"exclusion window {exclusion_window} Hz covers every offset")
    return mask


def resonance_mask(specs, offsets, half_width, min_scale=0.05, span=12):
    """False near member resonances with ``|J_n| > min_scale`` (cosine members only)."""
    offsets = np.asarray(offsets, dtype=float)
    keep = np.ones(offsets.shape, dtype=bool)
    for s in specs:
        p = s.params
        if not {"tau", "delta_tau", "f"} <= set(p):
            continue
        preds = aht.pdante_resonances(p["tau"], p["f"], p["delta_tau"] / p["tau"], (-span, span), (-span, span))
        for r in preds:
            if (r.m, r.n) != (0, 0) and abs(r.scale) > min_scale:
                keep &= np.abs(offsets - r.delta_nu) > half_width
    return keep


def _stats(avg, mask):
    return (
        float(np.mean(np.abs(avg[1][mask]))),
        float(np.mean(avg[2][mask])),
        float(np.std(avg[1][mask])),
    )


def ensemble_average(specs, offsets, engine="exact", exclusion_window=DEFAULT_EXCLUSION,
                     exclude_resonances=False):
    """Pointwise mean profile over ``specs`` with off-resonance baseline statistics.

    The baseline excitation is the mean of ``|avg(-<Iy>)|`` and the baseline z
    the mean of ``avg(<Iz>)``, both over ``|delta_nu| > exclusion_window``;
    ``fluctuation_std`` is the standard deviation of ``avg(-<Iy>)`` there.
    """
    offsets = np.asarray(offsets, dtype=float)
    members = member_profiles(specs, offsets, engine)
    avg = members.mean(axis=0)
    mask = _window_mask(offsets, exclusion_window)
    if exclude_resonances:
        mask &= resonance_mask(specs, offsets, exclusion_window)
    exc, z, std = _stats(avg, mask)
    prof = Profile(offsets, avg[0], avg[1], avg[2], normalize_engine(engine), tuple(specs))
    return EnsembleResult(prof, len(specs), exc, z, std, float(exclusion_window))


def fluctuation_stats(profiles, exclusion_window=DEFAULT_EXCLUSION, prefixes=DEFAULT_CHECKPOINTS,
                      baseline=None):
    """Std of the running-mean excitation away from resonance.

    Parameters
    ----------
    profiles : list of Profile
        Member profiles on a shared offset grid. For raw arrays use
        :func:`fluctuation_stats_array`.
    prefixes : iterable of int or None
        Running-prefix sizes; ``None`` means every prefix ``1..P``.
    baseline : ndarray, optional
        Reference excitation subtracted before taking the std.

    Returns
    -------
    dict mapping prefix size to std
    """
    if len(profiles) < 2:
        raise ValueError("need at least two profiles")
    offsets = profiles[0].offsets
    stack = np.stack([p.minus_iy for p in profiles])
    return fluctuation_stats_array(stack, offsets, exclusion_window, prefixes, baseline)


def fluctuation_stats_array(excitation, offsets, exclusion_window=DEFAULT_EXCLUSION,
                            prefixes=DEFAULT_CHECKPOINTS, baseline=None):
    """As :func:`fluctuation_stats` on a ``(P, M)`` array of ``-<Iy>`` rows."""
    excitation = np.asarray(excitation, dtype=float)
    if excitation.shape[0] < 2:
        raise ValueError("need at least two profiles")
    mask = _window_mask(offsets, exclusion_window)
    count = excitation.shape[0]
    sizes = range(1, count + 1) if prefixes is None else [k for k in prefixes if k <= count]
    running = np.cumsum(excitation, axis=0) / np.arange(1, count + 1)[:, None]
    if baseline is not None:
        running = running - np.asarray(baseline)[None, :]
    return {k: float(np.std(running[k - 1][mask])) for k in sizes}


def validity_map(theta_total, tau_over_tp, n_values, offset_ratios, order=2, t_p=VALIDITY_TP):
    """Frobenius distance between exact and AHT DANTE propagators on an (N, w_z/w_rf) grid.

    Each row uses ``theta = Theta / N`` and ``tau = tau_over_tp * t_p``.
    """
    n_values = np.asarray(n_values, dtype=int)
    ratios = np.asarray(offset_ratios, dtype=float)
    tau = tau_over_tp * t_p
    out = np.empty((n_values.size, ratios.size))
    for i, n in enumerate(n_values):
        if n < 2:
            raise ValueError(f"validity maps need N >= 2, got {n}")
        theta = theta_total / n
        if theta >= MAX_SMALL_FLIP:
            raise ValueError(f"theta = Theta/N = {theta:.4g} is not a small flip")
        omega_rf = theta / t_p
        w = ratios * omega_rf
        exact = kernels.sequence_ck(w, omega_rf, t_p, np.zeros(n), np.full(n - 1, tau))
        comps = aht.dante_components(n, theta, t_p, tau, w, order)
        approx = aht.propagator_ck(comps, w, n, t_p, (n - 1) * (tau + t_p) + t_p)
        out[i] = su2.ck_distance(exact, approx)
    return ValidityMap(n_values, ratios, out, float(theta_total), float(tau_over_tp), order)


@dataclass(frozen=True)
class AhtErrorProfile:
    offsets: np.ndarray
    checkpoints: tuple
    differences: np.ndarray  # (len(checkpoints), 3, M): |exact - aht| of running means
    order: int


def aht_error_profile(specs, offsets, order=2, checkpoints=DEFAULT_CHECKPOINTS):
    """``|avg_exact - avg_aht|`` for the running means at each checkpoint size."""
    offsets = np.asarray(offsets, dtype=float)
    exact = member_profiles(specs, offsets, "exact")
    approx = member_profiles(specs, offsets, f"aht-{order}")
    count = len(specs)
    ks = tuple(k for k in checkpoints if k <= count)
    diffs = np.stack([np.abs(exact[:k].mean(axis=0) - approx[:k].mean(axis=0)) for k in ks])
    return AhtErrorProfile(offsets, ks, diffs, order)


def local_maxima(values):
    """Indices of interior points strictly above one neighbour and not below the other."""
    v = np.asarray(values, dtype=float)
    left = v[1:-1] >= v[:-2]
    right = v[1:-1] >= v[2:]
    strict = (v[1:-1] > v[:-2]) | (v[1:-1] > v[2:])
    return np.nonzero(left & right & strict)[0] + 1
