"""Clutter channel synthesis.

Instantiates the stochastic backscatter channel: complex arrival amplitudes
on an azimuth grid (optionally extended over delay with a reverberant decay
envelope), the spun-antenna response obtained by circularly convolving the
channel with the antenna field patterns, and band-limited probing of the
delay-azimuth map.

Discretization normalization
----------------------------
The arrival phases are i.i.d. per bin, so the mean power of the discrete
convolution sum scales with the bin width.  Per-bin amplitudes therefore
carry a calibration factor sqrt(2*pi / dphi_rad) (and sqrt(1 / dtau) in
delay), chosen so that the spun power, averaged over a uniform pointing
sweep and over the phase ensemble, equals the room's average backscatter
ratio p0 * 10^(p_v/10) for unit-total-power patterns.  This anchors the
synthesized spectra to the closed-form room average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .antennas import AntennaPattern
from .core import (
    SPEED_OF_LIGHT,
    CarrierSpec,
    ConfigurationError,
    RoomSpec,
    average_backscatter_ratio,
    to_db,
)
from .randomfields import (
    AzimuthGrid,
    LognormalFieldParams,
    RandomStream,
    gaussian_field_rows,
    lognormal_mean_offset,
)

TWO_PI = 2.0 * math.pi

# sounder-style spin schedule: full rotation every 0.2 s at 740 samples/s
DEFAULT_SPIN_PERIOD_S = 0.2
DEFAULT_SAMPLE_RATE_HZ = 740.0


@dataclass(frozen=True)
class ClutterParams:
    """Statistical parameters of the clutter channel."""

    carrier: CarrierSpec
    sigma_v_db: float = 4.0  # location-level spread of the local average
    sigma_db: float = 7.0  # azimuthal spread about the local average
    phi_rms_deg: float = 1.0  # azimuth correlation scale

    def __post_init__(self):
        if self.sigma_v_db < 0 or self.sigma_db < 0:
            raise ValueError("dB spreads must be nonnegative")
        if self.phi_rms_deg <= 0:
            raise ValueError("phi_rms must be positive")

    @property
    def field_params(self) -> LognormalFieldParams:
        return LognormalFieldParams(self.sigma_db, self.phi_rms_deg)


@dataclass(frozen=True, eq=False)
class AzimuthField:
    """Complex backscatter arrival amplitudes on an azimuth grid.

    ``amplitudes`` include the location phase factor exp(2j k . r); moving
    the transceiver changes only phases, never per-bin magnitudes.
    """

    grid: AzimuthGrid
    amplitudes: np.ndarray
    p_v_db: float
    p0: float
    location_m: tuple[float, float]
    wavelength_m: float

    def relocate(self, location_m: tuple[float, float]) -> "AzimuthField":
        """Same channel draw observed from a nearby transceiver position."""
        dx = location_m[0] - self.location_m[0]
        dy = location_m[1] - self.location_m[1]
        phi = np.deg2rad(self.grid.centers_deg)
        k = TWO_PI / self.wavelength_m
        shift = np.exp(2j * k * (dx * np.cos(phi) + dy * np.sin(phi)))
        return AzimuthField(
            grid=self.grid,
            amplitudes=self.amplitudes * shift,
            p_v_db=self.p_v_db,
            p0=self.p0,
            location_m=(float(location_m[0]), float(location_m[1])),
            wavelength_m=self.wavelength_m,
        )


@dataclass(frozen=True, eq=False)
class SpunSpectrum:
    """Backscattered power ratio versus receive pointing angle."""

    pointings_deg: np.ndarray
    power: np.ndarray
    metadata: dict = dc_field(default_factory=dict)

    @property
    def power_db(self) -> np.ndarray:
        return to_db(self.power)


def gen_azimuth_channel(
    room: RoomSpec,
    params: ClutterParams,
    grid: AzimuthGrid,
    location_m: tuple[float, float] = (0.0, 0.0),
    stream: RandomStream | None = None,
) -> AzimuthField:
    """Draw one azimuth-only clutter channel instantiation.

    One location-level dB offset P_v, one azimuth-correlated dB field, one
    i.i.d. uniform phase per bin.  Per-bin amplitude is
    sqrt(2*pi/dphi) * sqrt(p0 * 10^(P_v/10) * 10^(P(phi)/10)) with the
    location phase applied on top.
    """
    if stream is None:
        raise ValueError("a RandomStream is required for reproducible synthesis")
    fp = params.field_params
    if grid.delta_phi_deg > fp.phi_rms_deg:
        raise ConfigurationError(
            "azimuth grid is coarser than the clutter correlation scale"
        )
    rng = stream.generator()
    mu_v = lognormal_mean_offset(params.sigma_v_db)
    p_v_db = mu_v + params.sigma_v_db * rng.standard_normal()
    corr_bins = fp.phi_rms_deg / grid.delta_phi_deg
    field_db = fp.mu_db + fp.sigma_db * gaussian_field_rows(rng, 1, grid.n_bins, corr_bins)[0]
    phases = rng.uniform(0.0, TWO_PI, grid.n_bins)

    wl = params.carrier.wavelength_m
    p0 = average_backscatter_ratio(
        room.distance_to_wall_m, wl, room.surface.reflectivity()
    )
    phi = np.deg2rad(grid.centers_deg)
    k = TWO_PI / wl
    x, y = float(location_m[0]), float(location_m[1])
    loc_phase = 2.0 * k * (x * np.cos(phi) + y * np.sin(phi))
    scale = math.sqrt(TWO_PI / grid.delta_phi_rad)
    mag = scale * np.sqrt(p0 * 10.0 ** ((p_v_db + field_db) / 10.0))
    return AzimuthField(
        grid=grid,
        amplitudes=mag * np.exp(1j * (phases + loc_phase)),
        p_v_db=float(p_v_db),
        p0=p0,
        location_m=(x, y),
        wavelength_m=wl,
    )


def _spin_weights(
    grid: AzimuthGrid,
    rx: AntennaPattern,
    pointings_deg: np.ndarray,
    chunk: int = 512,
):
    """Yield (slice, weight-matrix) blocks W[k, i] = f_R(phi_i - pointing_k)."""
    centers = grid.centers_deg
    for start in range(0, pointings_deg.size, chunk):
        block = pointings_deg[start : start + chunk]
        yield slice(start, start + block.size), rx.field_at(
            centers[None, :] - block[:, None]
        )


def spin_amplitudes(
    field: AzimuthField,
    rx: AntennaPattern,
    tx: AntennaPattern,
    pointings_deg,
    tx_pointing_deg: float = 0.0,
) -> np.ndarray:
    """Complex spun response Y at each receive pointing.

    Y(p) = dphi * sum_i h_i f_R(phi_i - p) f_T(phi_i - tx_pointing); the
    patterns are evaluated analytically at the field grid, so mismatched
    pattern grids need no resampling.
    """
    pointings = np.atleast_1d(np.asarray(pointings_deg, dtype=float))
    if pointings.size == 0:
        raise ValueError("at least one pointing angle is required")
    weighted = field.amplitudes * tx.field_at(field.grid.centers_deg - tx_pointing_deg)
    out = np.empty(pointings.size, dtype=complex)
    for sl, w in _spin_weights(field.grid, rx, pointings):
        out[sl] = w @ weighted
    return out * field.grid.delta_phi_rad


def spin_response(
    field: AzimuthField,
    rx: AntennaPattern,
    tx: AntennaPattern,
    pointings_deg,
    tx_pointing_deg: float = 0.0,
) -> SpunSpectrum:
    """Spun power spectrum |Y|^2 / P_T over the given pointing angles."""
    pointings = np.atleast_1d(np.asarray(pointings_deg, dtype=float))
    y = spin_amplitudes(field, rx, tx, pointings, tx_pointing_deg)
    return SpunSpectrum(
        pointings_deg=pointings,
        power=np.abs(y) ** 2,
        metadata={"p_v_db": field.p_v_db, "p0": field.p0},
    )


def uniform_pointings(n: int = 148) -> np.ndarray:
    """n uniformly spaced pointing angles covering a full rotation."""
    return np.arange(n) * (360.0 / n)


def pdp_envelope(tau_s, d_s_m: float, t_rev_s: float):
    """Reverberant average delay envelope, peak-normalized.

    exp(-(tau - onset)/t_rev) for tau >= onset = 2 d_s / c, zero before.
    """
    if d_s_m <= 0 or t_rev_s <= 0:
        raise ValueError("d_s and t_rev must be positive")
    tau = np.asarray(tau_s, dtype=float)
    onset = 2.0 * d_s_m / SPEED_OF_LIGHT
    out = np.where(tau >= onset, np.exp(-np.maximum(tau - onset, 0.0) / t_rev_s), 0.0)
    return float(out) if np.ndim(tau_s) == 0 else out


@dataclass(frozen=True)
class DelayGrid:
    """Uniform delay grid from zero to tau_max with the echo onset marked."""

    delta_tau_s: float
    tau_max_s: float
    onset_s: float

    def __post_init__(self):
        if self.delta_tau_s <= 0:
            raise ValueError("delay bin width must be positive")
        if self.tau_max_s <= self.onset_s:
            raise ValueError("tau_max must exceed the onset delay")

    @property
    def n_bins(self) -> int:
        return int(math.ceil(self.tau_max_s / self.delta_tau_s))

    @property
    def taus_s(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.delta_tau_s

    @classmethod
    def for_room(
        cls,
        room: RoomSpec,
        delta_tau_s: float = 0.1e-9,
        span_after_onset_s: float | None = None,
    ) -> "DelayGrid":
        """Grid reaching the -40 dB point of the decay by default."""
        onset = room.onset_s
        span = 9.21 * room.t_rev_s if span_after_onset_s is None else span_after_onset_s
        return cls(delta_tau_s=delta_tau_s, tau_max_s=onset + span, onset_s=onset)


@dataclass(frozen=True, eq=False)
class DelayAzimuthField:
    """Complex clutter map over (delay, azimuth); zero before the onset."""

    dgrid: DelayGrid
    agrid: AzimuthGrid
    amplitudes: np.ndarray  # shape (n_delay, n_azimuth)
    p_v_db: float
    p0: float


def gen_delay_azimuth_channel(
    room: RoomSpec,
    params: ClutterParams,
    dgrid: DelayGrid,
    agrid: AzimuthGrid,
    stream: RandomStream,
) -> DelayAzimuthField:
    """Draw one delay-azimuth clutter map.

    One P_v for the whole map; every delay bin at or beyond the onset gets an
    independent azimuth-correlated dB field and i.i.d. phases, with the bin
    power following the reverberant decay envelope.  Delay bins are
    independent: delay correlation enters physically through the probing
    waveform.
    """
    if abs(dgrid.onset_s - room.onset_s) > 1e-15:
        raise ConfigurationError("delay grid onset is inconsistent with the room")
    fp = params.field_params
    if agrid.delta_phi_deg > fp.phi_rms_deg:
        raise ConfigurationError(
            "azimuth grid is coarser than the clutter correlation scale"
        )
    rng = stream.generator()
    mu_v = lognormal_mean_offset(params.sigma_v_db)
    p_v_db = mu_v + params.sigma_v_db * rng.standard_normal()

    taus = dgrid.taus_s
    live = taus >= dgrid.onset_s
    n_live = int(np.count_nonzero(live))
    corr_bins = fp.phi_rms_deg / agrid.delta_phi_deg
    fields_db = fp.mu_db + fp.sigma_db * gaussian_field_rows(
        rng, n_live, agrid.n_bins, corr_bins
    )
    phases = rng.uniform(0.0, TWO_PI, (n_live, agrid.n_bins))

    wl = params.carrier.wavelength_m
    p0 = average_backscatter_ratio(
        room.distance_to_wall_m, wl, room.surface.reflectivity()
    )
    envelope = pdp_envelope(taus[live], room.distance_to_wall_m, room.t_rev_s)
    scale = math.sqrt(TWO_PI / agrid.delta_phi_rad / dgrid.delta_tau_s)
    mag = scale * np.sqrt(
        p0 * envelope[:, None] * 10.0 ** ((p_v_db + fields_db) / 10.0)
    )
    amplitudes = np.zeros((dgrid.n_bins, agrid.n_bins), dtype=complex)
    amplitudes[live] = mag * np.exp(1j * phases)
    return DelayAzimuthField(
        dgrid=dgrid, agrid=agrid, amplitudes=amplitudes, p_v_db=float(p_v_db), p0=p0
    )


@dataclass(frozen=True, eq=False)
class ProbeWaveform:
    """Unit-energy probing pulse: sum(|x|^2) * dt = 1."""

    samples: np.ndarray
    delta_t_s: float
    bandwidth_hz: float
    shape: str


def make_probe_waveform(
    bandwidth_hz: float,
    sample_rate_hz: float | None = None,
    shape: str = "hamming",
    samples=None,
) -> ProbeWaveform:
    """Probing waveform of duration 1/bandwidth, normalized to unit energy.

    ``shape`` is ``hamming``, ``rect`` or ``tabulated`` (pass ``samples``).
    The sample rate defaults to 20x the bandwidth and must be at least 10x.
    """
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    rate = 20.0 * bandwidth_hz if sample_rate_hz is None else float(sample_rate_hz)
    if rate < 10.0 * bandwidth_hz:
        raise ConfigurationError("waveform under-resolved: need sample_rate >= 10*bandwidth")
    dt = 1.0 / rate
    if shape == "tabulated":
        if samples is None:
            raise ValueError("tabulated waveform needs samples")
        x = np.asarray(samples, dtype=complex)
        if x.size < 2:
            raise ValueError("tabulated waveform needs >= 2 samples")
    elif shape in ("hamming", "rect"):
        n = int(round(rate / bandwidth_hz)) + 1  # (n-1)*dt == 1/bandwidth
        x = np.hamming(n).astype(complex) if shape == "hamming" else np.ones(n, dtype=complex)
    else:
        raise ValueError(f"unknown waveform shape {shape!r}")
    energy = float(np.sum(np.abs(x) ** 2) * dt)
    return ProbeWaveform(
        samples=x / math.sqrt(energy), delta_t_s=dt, bandwidth_hz=bandwidth_hz, shape=shape
    )


@dataclass(frozen=True, eq=False)
class DelayAzimuthResponse:
    """Band-limited backscatter power over (delay, pointing)."""

    delays_s: np.ndarray
    pointings_deg: np.ndarray
    power: np.ndarray  # shape (n_delay, n_pointing)

    @property
    def power_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return to_db(self.power)

    def mean_profile(self) -> np.ndarray:
        """Pointing-averaged delay profile, linear power."""
        return self.power.mean(axis=1)


def _resample_waveform(waveform: ProbeWaveform, delta_tau_s: float) -> np.ndarray:
    """Waveform samples on the delay grid, renormalized to unit energy."""
    if waveform.delta_t_s > delta_tau_s * (1.0 + 1e-9):
        raise ConfigurationError(
            "waveform sample interval must not exceed the delay bin width"
        )
    if abs(waveform.delta_t_s - delta_tau_s) <= 1e-15:
        return waveform.samples.copy()
    t_old = np.arange(waveform.samples.size) * waveform.delta_t_s
    t_new = np.arange(0.0, t_old[-1] + 0.5 * delta_tau_s, delta_tau_s)
    x = np.interp(t_new, t_old, waveform.samples.real) + 1j * np.interp(
        t_new, t_old, waveform.samples.imag
    )
    energy = float(np.sum(np.abs(x) ** 2) * delta_tau_s)
    return x / math.sqrt(energy)


def band_limit(
    field: DelayAzimuthField,
    waveform: ProbeWaveform,
    rx: AntennaPattern,
    tx: AntennaPattern,
    pointings_deg=None,
    tx_pointing_deg: float = 0.0,
) -> DelayAzimuthResponse:
    """Probe the clutter map: convolve in angle with the antenna patterns and
    in delay with the waveform, returning |.|^2 per (delay, pointing).

    The delay convolution is computed directly (not by FFT) so bins before
    the onset stay exactly zero.
    """
    agrid = field.agrid
    centers = agrid.centers_deg
    if pointings_deg is None:
        pointings = centers
    else:
        pointings = np.atleast_1d(np.asarray(pointings_deg, dtype=float))
        if pointings.size == 0:
            raise ValueError("at least one pointing angle is required")

    weighted = field.amplitudes * tx.field_at(centers - tx_pointing_deg)[None, :]
    # angle response on the field grid via circular convolution, then select
    fr = rx.field_at(centers)
    fr_rev = np.roll(fr[::-1], 1)  # fr_rev[j] = f_R(phi_{-j})
    y_grid = np.fft.ifft(
        np.fft.fft(weighted, axis=1) * np.fft.fft(fr_rev)[None, :], axis=1
    ) * agrid.delta_phi_rad

    idx = np.rint(pointings / agrid.delta_phi_deg).astype(int) % agrid.n_bins
    mismatch = (pointings - centers[idx] + 180.0) % 360.0 - 180.0
    if np.all(np.abs(mismatch) < 1e-9):
        y_sel = y_grid[:, idx]
    else:  # off-grid pointings: exact direct evaluation
        y_sel = np.empty((field.dgrid.n_bins, pointings.size), dtype=complex)
        for sl, w in _spin_weights(agrid, rx, pointings):
            y_sel[:, sl] = weighted @ w.T
        y_sel *= agrid.delta_phi_rad

    x = _resample_waveform(waveform, field.dgrid.delta_tau_s)
    n_out = field.dgrid.n_bins + x.size - 1
    y_bl = np.empty((n_out, y_sel.shape[1]), dtype=complex)
    for j in range(y_sel.shape[1]):
        y_bl[:, j] = np.convolve(y_sel[:, j], x)
    y_bl *= field.dgrid.delta_tau_s
    delays = np.arange(n_out) * field.dgrid.delta_tau_s
    return DelayAzimuthResponse(
        delays_s=delays, pointings_deg=pointings, power=np.abs(y_bl) ** 2
    )
