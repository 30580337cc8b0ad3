"""Rician/Rayleigh fading: amplitudes, power envelopes and multipath taps.

Time-correlated envelopes come from a sum-of-sinusoids generator: each
quadrature component is a sum of ``M`` cosines whose Doppler shifts are
set by uniformly spaced arrival angles in the first quadrant and whose
phases are drawn once per seed. The dominant component is a constant.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

ENVELOPE_HEADER = ("t_s", "power_norm")


@dataclass(frozen=True)
class RicianParameters:
    K: float = 0.5
    sigma: float = 1.0
    max_velocity_m_per_s: float = 1.0
    envelope_table_offset: int = 0
    A: float = field(init=False)

    def __post_init__(self):
        if not self.K >= 0:
            raise DomainError(f"Rician K factor must be >= 0, got {self.K}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not self.max_velocity_m_per_s >= 0:
            raise DomainError(f"max velocity must be >= 0, got {self.max_velocity_m_per_s}")
        if self.envelope_table_offset < 0:
            raise DomainError("envelope table offset must be >= 0")
        object.__setattr__(self, "A", self.sigma * math.sqrt(2.0 * self.K))

    def doppler_hz(self, wavelength_m: float) -> float:
        return self.max_velocity_m_per_s / wavelength_m


class Normalization(enum.Enum):
    TOTAL_POWER = "total"
    DOMINANT_PATH_POWER = "dominant"


def rician_amplitude(x1, x2, params: RicianParameters):
    """Envelope r = sqrt((sigma*x1 + A)^2 + (sigma*x2)^2); accepts scalars or arrays."""
    s = params.sigma
    return np.hypot(s * np.asarray(x1) + params.A, s * np.asarray(x2))


def normalized_power_envelope(x1, x2, K: float, mode: Normalization = Normalization.TOTAL_POWER):
    """Instantaneous power r^2/P for quadrature draws ``x1``, ``x2``.

    ``TOTAL_POWER`` divides by the mean-square envelope 2(K+1) so the mean
    is 1; ``DOMINANT_PATH_POWER`` divides by the dominant power 2K.
    """
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    numerator = (x1 + math.sqrt(2.0 * K)) ** 2 + x2**2
    if mode is Normalization.TOTAL_POWER:
        out = numerator / (2.0 * (K + 1.0))
    else:
        if K == 0:
            raise DomainError("dominant-path normalization is undefined for K = 0")
        out = numerator / (2.0 * K)
    return out[()] if out.ndim == 0 else out


class SumOfSinusoids:
    """Seeded generator of two unit-variance, time-correlated Gaussian-like components."""

    def __init__(self, doppler_hz: float, seed=None, n_oscillators: int = 16):
        if n_oscillators < 1:
            raise DomainError("need at least one oscillator")
        if doppler_hz < 0:
            raise DomainError("Doppler frequency must be >= 0")
        rng = np.random.default_rng(seed)
        M = n_oscillators
        n = np.arange(1, M + 1)
        alpha = (2.0 * np.pi * n - np.pi) / (4.0 * M)
        w = 2.0 * np.pi * doppler_hz
        self.n_oscillators = M
        self._w_i = w * np.cos(alpha)
        self._w_q = w * np.sin(alpha)
        self._phi_i = rng.uniform(-np.pi, np.pi, M)
        self._phi_q = rng.uniform(-np.pi, np.pi, M)
        self._scale = math.sqrt(2.0 / M)

    def components(self, t) -> tuple[np.ndarray, np.ndarray]:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x1 = np.zeros(t.shape)
        x2 = np.zeros(t.shape)
        # loop over oscillators keeps memory at O(len(t))
        for k in range(self.n_oscillators):
            x1 += np.cos(self._w_i[k] * t + self._phi_i[k])
            x2 += np.cos(self._w_q[k] * t + self._phi_q[k])
        return self._scale * x1, self._scale * x2


class FadingProcess:
    """Continuous-time Rician power envelope, normalized to unit mean power.

    ``params.envelope_table_offset`` shifts the start of the sequence by
    that many ``dt_s`` steps.
    """

    def __init__(self, params: RicianParameters, wavelength_m: float, dt_s: float = 1e-3,
                 seed=None, n_oscillators: int = 16):
        if not wavelength_m > 0:
            raise DomainError("wavelength must be positive")
        if not dt_s > 0:
            raise DomainError(f"dt must be positive, got {dt_s}")
        self.params = params
        self.wavelength_m = wavelength_m
        self.dt_s = dt_s
        self._sos = SumOfSinusoids(params.doppler_hz(wavelength_m), seed, n_oscillators)

    def power(self, t):
        shifted = np.asarray(t, dtype=float) + self.params.envelope_table_offset * self.dt_s
        x1, x2 = self._sos.components(shifted)
        out = normalized_power_envelope(x1, x2, self.params.K)
        return float(out[0]) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class EnvelopeTrace:
    t_s: np.ndarray
    power_norm: np.ndarray

    def __post_init__(self):
        t = np.array(self.t_s, dtype=float)
        p = np.array(self.power_norm, dtype=float)
        if t.shape != p.shape or t.ndim != 1:
            raise DomainError("time and power arrays must be 1-D and equal length")
        if np.any(p < 0):
            raise DomainError("power envelope values must be >= 0")
        if np.any(np.diff(t) <= 0):
            raise DomainError("timestamps must be strictly increasing")
        t.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "t_s", t)
        object.__setattr__(self, "power_norm", p)

    def __len__(self):
        return len(self.t_s)

    @property
    def samples(self):
        return list(zip(self.t_s.tolist(), self.power_norm.tolist()))


def envelope_process(params: RicianParameters, wavelength_m: float, dt_s: float, n_samples: int,
                     seed=None, n_oscillators: int = 16) -> EnvelopeTrace:
    """Sample ``n_samples`` points of the fading power envelope at spacing ``dt_s``."""
    if not dt_s > 0:
        raise DomainError(f"dt must be positive, got {dt_s}")
    if n_samples < 1:
        raise DomainError(f"number of samples must be >= 1, got {n_samples}")
    process = FadingProcess(params, wavelength_m, dt_s, seed, n_oscillators)
    t = np.arange(n_samples) * dt_s
    return EnvelopeTrace(t, process.power(t))


def dump_envelope(trace: EnvelopeTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ENVELOPE_HEADER)
    writer.writerows((repr(t), repr(p)) for t, p in trace.samples)
    return buf.getvalue()


def load_envelope(text: str) -> EnvelopeTrace:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != ENVELOPE_HEADER:
        raise DomainError(f"expected header {','.join(ENVELOPE_HEADER)!r}")
    t, p = [], []
    for row in rows:
        if row:
            t.append(float(row[0]))
            p.append(float(row[1]))
    return EnvelopeTrace(np.array(t), np.array(p))


@dataclass(frozen=True)
class MultipathProfile:
    """Static taps (delay s, amplitude, phase rad), sorted by delay."""

    taps: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        taps = tuple((float(tau), float(rho), float(phi)) for tau, rho, phi in self.taps)
        if not taps:
            raise DomainError("multipath profile needs at least one tap")
        for tau, rho, _ in taps:
            if tau < 0 or rho < 0:
                raise DomainError("tap delays and amplitudes must be >= 0")
        if any(b[0] < a[0] for a, b in zip(taps, taps[1:])):
            raise DomainError("tap delays must be sorted non-decreasing")
        object.__setattr__(self, "taps", taps)

    def __add__(self, other: "MultipathProfile") -> "MultipathProfile":
        merged = sorted(self.taps + other.taps, key=lambda tap: tap[0])
        return MultipathProfile(tuple(merged))


def impulse_response(profile: MultipathProfile, t_grid) -> np.ndarray:
    """Place each tap's complex amplitude on the nearest grid sample.

    Ties go to the earlier sample; taps outside the grid land on the nearest
    end sample. Co-located taps add.
    """
    if not isinstance(profile, MultipathProfile) or not profile.taps:
        raise DomainError("empty multipath profile")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("time grid must be a non-empty 1-D sequence")
    if np.any(np.diff(t) < 0):
        raise DomainError("time grid must be sorted")
    y = np.zeros(t.size, dtype=complex)
    for tau, rho, phi in profile.taps:
        hi = int(np.searchsorted(t, tau, side="left"))
        if hi == 0:
            idx = 0
        elif hi == t.size:
            idx = t.size - 1
        else:
            idx = hi - 1 if tau - t[hi - 1] <= t[hi] - tau else hi
        y[idx] += rho * np.exp(1j * phi)
    return y
