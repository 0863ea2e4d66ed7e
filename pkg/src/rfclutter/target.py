"""Fluctuating moving target and scene composition.

A point target on a waypoint trajectory contributes a radar-equation echo
whose cross-section fluctuates with exponentially distributed power
(Swerling I) at a configurable coherence time.  The scene combines the
static clutter channel with the target echo coherently, as sampled by a
spinning receive antenna.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .antennas import AntennaPattern
from .clutter import (
    DEFAULT_SAMPLE_RATE_HZ,
    DEFAULT_SPIN_PERIOD_S,
    ClutterParams,
    gen_azimuth_channel,
    spin_amplitudes,
)
from .core import CarrierSpec, RoomSpec, to_db
from .randomfields import AzimuthGrid, RandomStream, complex_gaussian_series

FOUR_PI_CUBED = (4.0 * math.pi) ** 3


@dataclass(frozen=True)
class TargetSpec:
    """Mean radar cross-section and fluctuation model of the target."""

    sigma0_dbsm: float = -8.0
    coherence_time_s: float = 0.1
    model: str = "swerling1"  # or "constant"

    def __post_init__(self):
        if self.coherence_time_s <= 0:
            raise ValueError("coherence time must be positive")
        if self.model not in ("swerling1", "constant"):
            raise ValueError(f"unknown fluctuation model {self.model!r}")

    @property
    def sigma0_m2(self) -> float:
        return 10.0 ** (self.sigma0_dbsm / 10.0)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Piecewise-linear waypoint path; the radar sits at the origin."""

    times_s: np.ndarray
    positions_m: np.ndarray  # shape (n, 2)

    def __post_init__(self):
        t = np.asarray(self.times_s, dtype=float)
        p = np.asarray(self.positions_m, dtype=float)
        if t.ndim != 1 or t.size < 1 or p.shape != (t.size, 2):
            raise ValueError("need matching times (n,) and positions (n, 2)")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("waypoint times must be strictly increasing")
        if np.any(np.hypot(p[:, 0], p[:, 1]) == 0.0):
            raise ValueError("waypoints must not sit on the radar (origin)")
        object.__setattr__(self, "times_s", t)
        object.__setattr__(self, "positions_m", p)

    @classmethod
    def from_waypoints(cls, waypoints) -> "Trajectory":
        """Build from [(t, (x, y)), ...] or [(t, x, y), ...] tuples."""
        times, pos = [], []
        for wp in waypoints:
            if len(wp) == 2:
                t, xy = wp
                x, y = xy
            else:
                t, x, y = wp
            times.append(float(t))
            pos.append((float(x), float(y)))
        return cls(np.asarray(times), np.asarray(pos))

    @property
    def span_s(self) -> tuple[float, float]:
        return float(self.times_s[0]), float(self.times_s[-1])

    def positions_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        t0, t1 = self.span_s
        if np.any(t < t0) or np.any(t > t1):
            raise ValueError(f"time outside trajectory span [{t0}, {t1}]")
        x = np.interp(t, self.times_s, self.positions_m[:, 0])
        y = np.interp(t, self.times_s, self.positions_m[:, 1])
        return np.stack([x, y], axis=-1)


def trajectory_state(traj: Trajectory, t: float) -> tuple[float, float]:
    """Range (m) and bearing (degrees) of the target at time t."""
    pos = traj.positions_at(t)
    r = float(np.hypot(pos[..., 0], pos[..., 1]))
    phi = float(np.degrees(np.arctan2(pos[..., 1], pos[..., 0])))
    return r, phi


def target_response(
    r_m: float,
    bearing_deg: float,
    spec: TargetSpec,
    xi: complex,
    carrier: CarrierSpec,
    rx: AntennaPattern,
    tx: AntennaPattern,
    pointing_deg: float,
    tx_pointing_deg: float = 0.0,
) -> float:
    """Instantaneous target echo power ratio P/P_T.

    lambda^2 * sigma0 * |xi|^2 * G_T * G_R / ((4 pi)^3 R^4), with antenna
    gains read from the patterns at the target bearing.  The constant model
    fixes |xi|^2 = 1.
    """
    if r_m <= 0:
        raise ValueError("target range must be positive")
    xi_sq = 1.0 if spec.model == "constant" else abs(xi) ** 2
    g_r = float(rx.gain_at(bearing_deg - pointing_deg))
    g_t = float(tx.gain_at(bearing_deg - tx_pointing_deg))
    wl = carrier.wavelength_m
    return wl**2 * spec.sigma0_m2 * xi_sq * g_t * g_r / (FOUR_PI_CUBED * r_m**4)


@dataclass(frozen=True, eq=False)
class SceneSpec:
    """Everything needed to render a moving target against room clutter."""

    room: RoomSpec
    clutter: ClutterParams
    target: TargetSpec
    trajectory: Trajectory
    rx: AntennaPattern
    tx: AntennaPattern
    spin_period_s: float = DEFAULT_SPIN_PERIOD_S
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    duration_s: float = 4.0
    tx_pointing_deg: float = 0.0
    regenerate_clutter_per_rotation: bool = False

    def __post_init__(self):
        if self.spin_period_s <= 0 or self.sample_rate_hz <= 0 or self.duration_s <= 0:
            raise ValueError("spin period, sample rate and duration must be positive")
        t0, t1 = self.trajectory.span_s
        if t0 > 0.0 or t1 < self.duration_s:
            raise ValueError("trajectory must cover the scene duration")


@dataclass(frozen=True, eq=False)
class TimeAzimuthMap:
    """Power ratio sampled by the spinning receiver over time.

    One pointing per time sample; :meth:`folded` reshapes complete rotations
    into a (rotation, pointing) image.
    """

    times_s: np.ndarray
    pointing_deg: np.ndarray
    power: np.ndarray
    spin_period_s: float
    sample_rate_hz: float
    metadata: dict = dc_field(default_factory=dict)

    @property
    def power_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return to_db(self.power)

    @property
    def samples_per_rotation(self) -> int:
        return int(round(self.spin_period_s * self.sample_rate_hz))

    def folded(self):
        """(rotation start times, pointing bins, power image)."""
        spr = self.samples_per_rotation
        n_rot = self.power.size // spr
        image = self.power[: n_rot * spr].reshape(n_rot, spr)
        return self.times_s[::spr][:n_rot], self.pointing_deg[:spr], image


def compose_scene(spec: SceneSpec, stream: RandomStream) -> TimeAzimuthMap:
    """Render the spinning-antenna power map of clutter plus moving target.

    The clutter channel is drawn once and held static for the scene (the
    background is assumed stationary); the target echo is added coherently
    with the two-way geometric phase -2 (2 pi / lambda) R(t), and the squared
    magnitude is recorded per time sample.
    """
    n = int(round(spec.duration_s * spec.sample_rate_hz))
    if n < 1:
        raise ValueError("scene too short for the sample rate")
    times = np.arange(n) / spec.sample_rate_hz
    pointings = (times / spec.spin_period_s) * 360.0 % 360.0

    grid = AzimuthGrid.default_for(spec.clutter.phi_rms_deg)
    clutter_stream = stream.child("clutter")
    if spec.regenerate_clutter_per_rotation:
        spr = int(round(spec.spin_period_s * spec.sample_rate_hz))
        y_clut = np.empty(n, dtype=complex)
        for rot, start in enumerate(range(0, n, spr)):
            fld = gen_azimuth_channel(
                spec.room, spec.clutter, grid, (0.0, 0.0),
                clutter_stream.child(f"rotation/{rot}"),
            )
            sl = slice(start, min(start + spr, n))
            y_clut[sl] = spin_amplitudes(
                fld, spec.rx, spec.tx, pointings[sl], spec.tx_pointing_deg
            )
    else:
        fld = gen_azimuth_channel(
            spec.room, spec.clutter, grid, (0.0, 0.0), clutter_stream
        )
        y_clut = spin_amplitudes(
            fld, spec.rx, spec.tx, pointings, spec.tx_pointing_deg
        )

    # target fluctuation is always drawn so that stream consumption does not
    # depend on the fluctuation model or the cross-section
    xi = complex_gaussian_series(
        n / spec.sample_rate_hz,
        spec.sample_rate_hz,
        spec.target.coherence_time_s,
        stream.child("target/fluctuation"),
    )
    if spec.target.model == "constant":
        xi = np.ones(n, dtype=complex)

    pos = spec.trajectory.positions_at(times)
    r = np.hypot(pos[:, 0], pos[:, 1])
    if np.any(r == 0.0):
        raise ValueError("target crosses the radar position")
    bearing = np.degrees(np.arctan2(pos[:, 1], pos[:, 0]))

    wl = spec.clutter.carrier.wavelength_m
    g_r = spec.rx.gain_at(bearing - pointings)
    g_t = spec.tx.gain_at(bearing - spec.tx_pointing_deg)
    amp_sq = wl**2 * spec.target.sigma0_m2 * g_t * g_r / (FOUR_PI_CUBED * r**4)
    geom_phase = -2.0 * (2.0 * math.pi / wl) * r
    y_target = np.sqrt(amp_sq) * xi * np.exp(1j * geom_phase)

    power = np.abs(y_clut + y_target) ** 2
    return TimeAzimuthMap(
        times_s=times,
        pointing_deg=pointings,
        power=power,
        spin_period_s=spec.spin_period_s,
        sample_rate_hz=spec.sample_rate_hz,
        metadata={
            "master_seed": stream.master_seed,
            "stream_label": stream.label,
            "target_model": spec.target.model,
        },
    )
