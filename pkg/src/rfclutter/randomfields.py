"""Seeded random-field generation.

Everything stochastic in the simulator is driven from here: labeled
reproducible substreams, correlated-lognormal dB fields on a circular
azimuth grid, and temporally correlated complex Gaussian series.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.signal import fftconvolve

from .core import ConfigurationError

LN10_OVER_20 = math.log(10.0) / 20.0


@dataclass(frozen=True)
class RandomStream:
    """A labeled, reproducible random substream.

    The same (master_seed, label) pair always produces the identical sample
    sequence; distinct labels give statistically independent streams.  Labels
    are slash-separated paths, e.g. ``"clutter/azimuth/0"``.
    """

    master_seed: int
    label: str = ""

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def child(self, suffix: str) -> "RandomStream":
        label = f"{self.label}/{suffix}" if self.label else suffix
        return RandomStream(self.master_seed, label)

    def generator(self) -> np.random.Generator:
        digest = hashlib.sha256(self.label.encode("utf-8")).digest()
        words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
        seq = np.random.SeedSequence([self.master_seed, *words])
        return np.random.Generator(np.random.PCG64(seq))


def derive_stream(master_seed: int, label: str) -> RandomStream:
    """Deterministic substream for (seed, label)."""
    return RandomStream(int(master_seed), str(label))


@dataclass(frozen=True)
class AzimuthGrid:
    """Uniform circular azimuth grid covering [0, 360) degrees."""

    n_bins: int

    def __post_init__(self):
        if self.n_bins < 4:
            raise ValueError("azimuth grid needs at least 4 bins")

    @property
    def delta_phi_deg(self) -> float:
        return 360.0 / self.n_bins

    @property
    def delta_phi_rad(self) -> float:
        return 2.0 * math.pi / self.n_bins

    @cached_property
    def centers_deg(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.delta_phi_deg

    @classmethod
    def from_spacing(cls, delta_phi_deg: float) -> "AzimuthGrid":
        n = round(360.0 / delta_phi_deg)
        if n < 4 or abs(n * delta_phi_deg - 360.0) > 1e-9:
            raise ConfigurationError(
                f"bin width {delta_phi_deg} deg does not evenly divide 360 deg"
            )
        return cls(n)

    @classmethod
    def default_for(cls, phi_rms_deg: float) -> "AzimuthGrid":
        """Grid resolving a correlation scale with 5 bins per phi_rms."""
        n = max(4, int(math.ceil(360.0 / (phi_rms_deg / 5.0))))
        return cls(n)


def lognormal_mean_offset(sigma_db: float) -> float:
    """dB mean that gives a unit-mean linear power for a Gaussian dB spread.

    For P ~ Normal(mu, sigma_db^2) in dB, E[10^(P/10)] = 1 requires
    mu = -(ln 10 / 20) * sigma_db^2.
    """
    if sigma_db < 0:
        raise ValueError(f"sigma_db must be nonnegative, got {sigma_db}")
    return -LN10_OVER_20 * sigma_db**2


@dataclass(frozen=True)
class LognormalFieldParams:
    """Spread and azimuth correlation scale of the dB field."""

    sigma_db: float
    phi_rms_deg: float

    def __post_init__(self):
        if self.sigma_db < 0:
            raise ValueError("sigma_db must be nonnegative")
        if self.phi_rms_deg <= 0:
            raise ValueError("phi_rms must be positive")

    @property
    def mu_db(self) -> float:
        return lognormal_mean_offset(self.sigma_db)


def _wrapped_gaussian_kernel(n_bins: int, rms_bins: float) -> np.ndarray:
    j = np.arange(n_bins)
    d = np.minimum(j, n_bins - j).astype(float)
    return np.exp(-0.5 * (d / rms_bins) ** 2)


def gaussian_field_rows(
    rng: np.random.Generator, n_rows: int, n_bins: int, corr_bins: float
) -> np.ndarray:
    """Rows of zero-mean, unit-variance Gaussians with circular Gaussian
    autocorrelation exp(-lag^2 / (2 corr_bins^2)).

    White noise is circularly convolved with a Gaussian kernel of RMS width
    corr_bins/sqrt(2) (filtering doubles the squared width), then scaled by
    the exact discrete factor sqrt(sum k^2) so the ensemble variance is 1 on
    the finite grid.
    """
    kernel = _wrapped_gaussian_kernel(n_bins, corr_bins / math.sqrt(2.0))
    kf = np.fft.rfft(kernel)
    white = rng.standard_normal((n_rows, n_bins))
    rows = np.fft.irfft(np.fft.rfft(white, axis=1) * kf[None, :], n=n_bins, axis=1)
    rows /= math.sqrt(float(np.sum(kernel**2)))
    return rows


def correlated_lognormal_db(
    grid: AzimuthGrid, params: LognormalFieldParams, stream: RandomStream
) -> np.ndarray:
    """One circularly wrapped Gaussian dB field on the azimuth grid.

    Mean ``params.mu_db`` (unit-mean in linear power), standard deviation
    ``params.sigma_db``, normalized autocorrelation
    exp(-dphi^2 / (2 phi_rms^2)).
    """
    if grid.delta_phi_deg > params.phi_rms_deg:
        raise ConfigurationError(
            f"grid spacing {grid.delta_phi_deg:.3g} deg exceeds the correlation "
            f"scale {params.phi_rms_deg:.3g} deg; the field is unresolvable"
        )
    rng = stream.generator()
    corr_bins = params.phi_rms_deg / grid.delta_phi_deg
    z = gaussian_field_rows(rng, 1, grid.n_bins, corr_bins)[0]
    return params.mu_db + params.sigma_db * z


def complex_gaussian_series(
    duration_s: float,
    sample_rate_hz: float,
    coherence_time_s: float,
    stream: RandomStream,
) -> np.ndarray:
    """Zero-mean circularly symmetric complex Gaussian series, unit mean power.

    Normalized autocorrelation exp(-dt^2 / (2 Tc^2)) with Tc the coherence
    time; built by convolving complex white noise with a Gaussian kernel of
    RMS width Tc/sqrt(2), discarding one kernel support of warm-up at each
    end of the padded sequence.
    """
    if duration_s <= 0 or sample_rate_hz <= 0 or coherence_time_s <= 0:
        raise ValueError("duration, sample rate and coherence time must be positive")
    n = int(round(duration_s * sample_rate_hz))
    if n < 2:
        raise ValueError("need duration * sample_rate >= 2")
    if coherence_time_s < 2.0 / sample_rate_hz:
        raise ConfigurationError(
            "coherence time under-resolved: need coherence_time >= 2 / sample_rate"
        )
    dt = 1.0 / sample_rate_hz
    w = (coherence_time_s / math.sqrt(2.0)) / dt  # kernel RMS, samples
    m = int(math.ceil(6.0 * w))
    rng = stream.generator()
    white = (
        rng.standard_normal(n + 2 * m) + 1j * rng.standard_normal(n + 2 * m)
    ) / math.sqrt(2.0)
    j = np.arange(-m, m + 1, dtype=float)
    kernel = np.exp(-0.5 * (j / w) ** 2)
    filtered = fftconvolve(white, kernel, mode="same")[m : m + n]
    return filtered / math.sqrt(float(np.sum(kernel**2)))
