"""Pulse-train realizations: delay laws, phase locking and sequence families.

A sequence of ``N`` identical rectangular pulses of flip ``theta`` and
length ``t_p`` is separated by ``N - 1`` free-evolution delays. Pulse ``k+1``
starts at ``T_k = k t_p + sum_{j<=k} tau_j`` and carries the phase
``phi_{k+1} = 2 pi nu0 T_k`` so that spins at offset ``nu0`` see every pulse
with the same phase in their own rotating frame. With the propagator
convention of :mod:`pdante.pulse` this sign puts the selective resonance at
``+nu0``.

Times stored in a :class:`SequenceSpec` are rounded to 12 significant digits
at construction so that the JSON form round-trips exactly.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .pulse import MAX_SMALL_FLIP

#: Mean delay of the random and prime ensemble families (s).
MEAN_DELAY_ENSEMBLE = 1.6e-3
#: Total delay of the random family, 29 x 1.6 ms (s).
TOTAL_DELAY_ENSEMBLE = 46.4e-3
#: Numerator of the experimental prime-family normalization (s); mean delay 46.77/29 ms.
TOTAL_DELAY_EXPERIMENT = 46.77e-3
#: Default pulse length for the CLI and ensemble presets (s).
DEFAULT_TP = 720e-9

RANDOM_GENERATOR = "pcg64-uniform-v1"

_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233,
    239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311, 313, 317,
    331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419,
    421, 431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503,
    509, 521, 523, 541,
)


def prime(p):
    """The ``p``-th prime, 1-based (``prime(1) == 2``)."""
    if p < 1:
        raise ValueError(f"prime index must be >= 1, got {p}")
    if p <= len(_PRIMES):
        return _PRIMES[p - 1]
    found = len(_PRIMES)
    candidate = _PRIMES[-1]
    while found < p:
        candidate += 2
        limit = int(candidate**0.5)
        if all(candidate % q for q in range(3, limit + 1, 2)):
            found += 1
    return candidate


def quantize_time(t):
    """Round a time to the 12 significant digits used in serialization."""
    return float(f"{float(t):.12g}")


def _format_time(t):
    return f"{t:.12g}"


def lock_phases(times, nu0):
    """Phases ``2 pi nu0 T_k`` wrapped to ``(-pi, pi]``."""
    raw = 2 * np.pi * nu0 * np.asarray(times, dtype=float)
    wrapped = np.pi - np.mod(np.pi - raw, 2 * np.pi)
    return wrapped


@dataclass(frozen=True)
class SequenceSpec:
    """One realization of a pulse train.

    ``delays`` has ``n_pulses - 1`` entries, ``phases`` has ``n_pulses``.
    ``generator``, ``seed`` and ``params`` record provenance only.
    """

    n_pulses: int
    theta: float
    t_p: float
    delays: tuple
    phases: tuple
    nu0: float = 0.0
    generator: str = "custom"
    seed: Optional[int] = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError(f"need at least one pulse, got {self.n_pulses}")
        if not self.t_p > 0:
            raise ValueError(f"pulse length must be positive, got {self.t_p}")
        delays = tuple(quantize_time(d) for d in self.delays)
        if len(delays) != self.n_pulses - 1:
            raise ValueError(f"expected {self.n_pulses - 1} delays, got {len(delays)}")
        if any(d < 0 for d in delays):
            raise ValueError("delays must be non-negative")
        if len(self.phases) != self.n_pulses:
            raise ValueError(f"expected {self.n_pulses} phases, got {len(self.phases)}")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "t_p", quantize_time(self.t_p))
        object.__setattr__(self, "phases", tuple(float(x) for x in self.phases))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "nu0", float(self.nu0))

    @property
    def omega_rf(self):
        return self.theta / self.t_p

    @property
    def total_flip(self):
        """Nominal total rotation ``N theta``."""
        return self.n_pulses * self.theta

    @property
    def times(self):
        """Pulse start times ``T_0 .. T_{N-1}``, see :func:`cumulative_times`."""
        return cumulative_times(self)

    @property
    def total_time(self):
        return float(self.times[-1] + self.t_p)

    def to_dict(self):
        return {
            "n_pulses": self.n_pulses,
            "theta": self.theta,
            "t_p": _format_time(self.t_p),
            "delays": [_format_time(d) for d in self.delays],
            "phases": list(self.phases),
            "nu0": self.nu0,
            "generator": self.generator,
            "seed": self.seed,
            "params": {k: self.params[k] for k in sorted(self.params)},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        return cls(
            n_pulses=int(d["n_pulses"]),
            theta=float(d["theta"]),
            t_p=float(d["t_p"]),
            delays=tuple(float(x) for x in d["delays"]),
            phases=tuple(float(x) for x in d["phases"]),
            nu0=float(d["nu0"]),
            generator=d["generator"],
            seed=d["seed"],
            params=dict(d.get("params", {})),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def cumulative_times(spec):
    """Start time of every pulse: ``T_0 = 0``, ``T_k = k t_p + sum_{j<=k} tau_j``."""
    steps = np.asarray(spec.delays, dtype=float) + spec.t_p
    return np.concatenate(([0.0], np.cumsum(steps)))


def cosine_closed_form_times(n_pulses, tau, delta_tau, f):
    """Delay-only cumulative times of the cosine law, summed analytically.

    ``sum_{j=1..k} (tau + dtau cos(2 pi j / f))
    = k tau - (dtau/2) (1 - csc(pi/f) sin((2k+1) pi / f))``, for k = 0..N-1.
    """
    k = np.arange(n_pulses)
    return k * tau - 0.5 * delta_tau * (1 - np.sin((2 * k + 1) * np.pi / f) / np.sin(np.pi / f))


# -- delay laws ---------------------------------------------------------------


@dataclass(frozen=True)
class Uniform:
    tau: float

    def delays(self, n_pulses):
        if self.tau < 0:
            raise ValueError(f"delay must be non-negative, got {self.tau}")
        return np.full(n_pulses - 1, float(self.tau))


@dataclass(frozen=True)
class RandomNormalized:
    """i.i.d. uniform(0, 1) draws rescaled to a fixed mean."""

    mean: float
    seed: int

    def delays(self, n_pulses):
        if self.mean < 0:
            raise ValueError(f"total delay must be non-negative, got {self.mean}")
        rng = np.random.default_rng(self.seed)
        raw = rng.uniform(0.0, 1.0, n_pulses - 1)
        return raw * (self.mean * (n_pulses - 1) / raw.sum())


@dataclass(frozen=True)
class CosineModulated:
    """``tau_k = tau + delta_tau cos(2 pi k / f)``, k = 1..N-1."""

    tau: float
    delta_tau: float
    f: float

    def delays(self, n_pulses):
        if self.f == 0:
            raise ValueError("modulation parameter f must be non-zero")
        if self.delta_tau < 0:
            raise ValueError(f"delta_tau must be non-negative, got {self.delta_tau}")
        if self.tau < self.delta_tau:
            raise ValueError(f"tau={self.tau} < delta_tau={self.delta_tau} allows negative delays")
        k = np.arange(1, n_pulses)
        return self.tau + self.delta_tau * np.cos(2 * np.pi * k / self.f)


@dataclass(frozen=True)
class UddLike:
    """``tau_k = scale (1 - cos(k pi / N)) = 2 scale sin^2(k pi / 2N)``, k = 1..N-1."""

    scale: float

    def delays(self, n_pulses):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        k = np.arange(1, n_pulses)
        return 2 * self.scale * np.sin(k * np.pi / (2 * n_pulses)) ** 2


def _check_flip(theta):
    if not 0 <= theta < MAX_SMALL_FLIP:
        raise ValueError(f"flip angle {theta} outside the small-flip range [0, 2pi/9)")


def build(law, n_pulses, theta, t_p, nu0=0.0, generator=None, seed=None, params=None):
    """Realize ``law`` as a phase-locked :class:`SequenceSpec`."""
    if n_pulses < 1:
        raise ValueError(f"need at least one pulse, got {n_pulses}")
    _check_flip(theta)
    delays = law.delays(n_pulses) if n_pulses > 1 else np.empty(0)
    # phases use the quantized times so the lock holds for the stored spec
    draft = SequenceSpec(n_pulses, theta, t_p, tuple(delays), (0.0,) * n_pulses)
    spec = SequenceSpec(
        n_pulses=n_pulses,
        theta=theta,
        t_p=t_p,
        delays=draft.delays,
        phases=tuple(lock_phases(draft.times, nu0)),
        nu0=nu0,
        generator=generator or type(law).__name__.lower(),
        seed=seed,
        params=params if params is not None else dict(vars(law)),
    )
    return spec


def dante(n_pulses, theta, t_p, tau):
    """Equally spaced pulses, all phases zero."""
    return build(Uniform(tau), n_pulses, theta, t_p, 0.0, generator="dante")


def pdante_random(n_pulses, theta, t_p, total_delay, nu0=0.0, seed=0):
    """Random delays summing to ``total_delay``, drawn with ``default_rng(seed)``."""
    if n_pulses < 2:
        raise ValueError("a random schedule needs at least two pulses")
    if total_delay < 0:
        raise ValueError(f"total delay must be non-negative, got {total_delay}")
    law = RandomNormalized(total_delay / (n_pulses - 1), int(seed))
    return build(
        law, n_pulses, theta, t_p, nu0,
        generator=RANDOM_GENERATOR, seed=int(seed),
        params={"total_delay": float(total_delay)},
    )


def pdante_cosine(n_pulses, theta, t_p, tau, delta_tau, f, nu0=0.0):
    return build(CosineModulated(tau, delta_tau, f), n_pulses, theta, t_p, nu0, generator="cosine")


def pdante_udd_like(n_pulses, theta, t_p, scale, nu0=0.0):
    if n_pulses < 2:
        raise ValueError("the UDD-like schedule needs at least two pulses")
    return build(UddLike(scale), n_pulses, theta, t_p, nu0, generator="udd-like")


def cosine_base_delay(n_pulses, mean_delay, delta_ratio, f):
    """``tau`` such that the cosine law with ``delta_tau = delta_ratio tau`` has the given mean."""
    k = np.arange(1, n_pulses)
    return mean_delay * (n_pulses - 1) / np.sum(1 + delta_ratio * np.cos(2 * np.pi * k / f))


def cosine_family(n_pulses, theta, t_p, mean_delay, delta_ratio, count, nu0=0.0):
    """Members ``p = 1..count`` with ``f_p = 1/sqrt(prime(p))`` and a common mean delay."""
    if count < 1:
        raise ValueError(f"family size must be >= 1, got {count}")
    if not 0 <= delta_ratio <= 1:
        raise ValueError(f"delta_ratio must lie in [0, 1], got {delta_ratio}")
    members = []
    for p in range(1, count + 1):
        f = 1 / np.sqrt(prime(p))
        tau = cosine_base_delay(n_pulses, mean_delay, delta_ratio, f)
        law = CosineModulated(tau, delta_ratio * tau, f)
        members.append(build(
            law, n_pulses, theta, t_p, nu0, generator="cosine-prime", seed=p,
            params={"f": f, "tau": tau, "delta_tau": delta_ratio * tau, "prime_index": p},
        ))
    return members


def random_family(n_pulses, theta, t_p, total_delay, count, seed=0, nu0=0.0):
    """Members ``i = 0..count-1`` drawn with seeds ``seed + i``."""
    if count < 1:
        raise ValueError(f"family size must be >= 1, got {count}")
    return [pdante_random(n_pulses, theta, t_p, total_delay, nu0, seed + i) for i in range(count)]
