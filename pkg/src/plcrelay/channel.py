"""Channel attenuation, log-normal fading and Bernoulli-Gaussian noise.

Every dB <-> linear conversion in the package happens here; the other
modules only ever see linear quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

# 10*log10(x) == ZETA * ln(x)
ZETA = 10.0 / math.log(10.0)
SQRT8 = math.sqrt(8.0)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise ValueError(f"cannot express non-positive value {value!r} in dB")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class AttenuationParams:
    """Exponential cable attenuation ``A(f, d) = exp(-(a0 + a1 f^k) d)``.

    Attributes:
        a0: Constant term (1/m).
        a1: Frequency-dependent term (1/m per unit of ``f^k``).
        k: Exponent applied to the frequency.
        f: Operating frequency in MHz.
        f_unit: Unit in which ``f`` enters ``a1 * f**k``. ``"MHz"`` uses
            the value as given, ``"Hz"`` scales it by 1e6 first.
    """

    a0: float = 9.4e-3
    a1: float = 4.2e-7
    k: float = 0.7
    f: float = 30.0
    f_unit: str = "MHz"

    def __post_init__(self):
        if self.a0 < 0 or self.a1 < 0:
            raise ValueError("attenuation constants a0, a1 must be >= 0")
        if not self.f > 0 or not self.k > 0:
            raise ValueError("frequency f and exponent k must be > 0")
        if self.f_unit not in ("MHz", "Hz"):
            raise ValueError(f"f_unit must be 'MHz' or 'Hz', got {self.f_unit!r}")
        alpha = self.alpha
        if not (math.isfinite(alpha) and alpha > 0):
            raise ValueError(f"attenuation factor must be finite and > 0, got {alpha!r}")

    @property
    def alpha(self) -> float:
        """Attenuation factor per meter."""
        f = self.f if self.f_unit == "MHz" else self.f * 1e6
        return self.a0 + self.a1 * f ** self.k


@dataclass(frozen=True)
class FadingParams:
    """Mean and standard deviation (dB) of ``10*log10(h)``."""

    mu: float = 3.0
    sigma: float = math.sqrt(2.0)

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"fading sigma must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class NoiseParams:
    """Two-term background + impulsive noise.

    Signal power is normalised to 1, so ``sbnr_db = -10 log10(sigma_w^2)`` and
    ``sinr_db = -10 log10(sigma_i^2)``. ``sinr_db = inf`` disables the
    impulsive component.
    """

    p: float = 0.01
    sbnr_db: float = 25.0
    sinr_db: float = -15.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"impulse probability p must lie in [0, 1], got {self.p!r}")
        if not math.isfinite(self.sbnr_db):
            raise ValueError("sbnr_db must be finite")
        if math.isnan(self.sinr_db) or self.sinr_db == -math.inf:
            raise ValueError("sinr_db must be a number or +inf")
        if not self.background_variance > 0:
            raise ValueError("background noise variance underflows to zero")

    @property
    def background_variance(self) -> float:
        return db_to_linear(-self.sbnr_db)

    @property
    def impulsive_variance(self) -> float:
        return db_to_linear(-self.sinr_db)

    @property
    def beta(self) -> float:
        """SNR penalty ``1 + sigma_i^2 / sigma_w^2`` during an impulse."""
        return 1.0 + self.impulsive_variance / self.background_variance


@dataclass(frozen=True)
class LinkSpec:
    distance: float
    fading: FadingParams = FadingParams()

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError(f"link distance must be > 0, got {self.distance!r}")


def attenuation(params: AttenuationParams, d: float) -> float:
    """Power gain of a cable of length ``d`` meters (1 at ``d = 0``)."""
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d!r}")
    return math.exp(-params.alpha * d)


def erf(x):
    return special.erf(x)


def erfinv(y):
    """Inverse error function on (-1, 1)."""
    return special.erfinv(y)


def q_function(x):
    """Gaussian tail probability, accurate far into both tails."""
    return special.ndtr(-np.asarray(x, dtype=float))


def lognormal_sq_cdf(x, fading: FadingParams):
    """CDF of the power gain ``h^2`` at ``x``.

    ``10*log10(h^2)`` is Normal(2 mu, (2 sigma)^2), so the CDF is
    ``Phi((zeta ln x - 2 mu) / (2 sigma))``. The normal CDF is evaluated
    through ``ndtr`` so that values deep in either tail keep full relative
    precision instead of rounding to 0 or 1.

    Accepts scalars or arrays; scalars come back as ``float``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise ValueError("lognormal_sq_cdf requires x > 0")
    z = (ZETA * np.log(xa) - 2.0 * fading.mu) / (2.0 * fading.sigma)
    out = special.ndtr(z)
    return float(out) if out.ndim == 0 else out


def sample_channel_gain_sq(fading: FadingParams, rng: np.random.Generator, size=None):
    """Draw ``h^2`` with ``10*log10(h) ~ Normal(mu, sigma^2)``."""
    x_db = fading.mu + fading.sigma * rng.standard_normal(size)
    return 10.0 ** (x_db / 5.0)


def noise_threshold(noise: NoiseParams, xi: float) -> float:
    """High-SNR outage threshold ``beta^p * 2^xi`` on the SNR."""
    if not xi > 0:
        raise ValueError(f"spectral efficiency xi must be > 0, got {xi!r}")
    return noise.beta ** noise.p * 2.0 ** xi
