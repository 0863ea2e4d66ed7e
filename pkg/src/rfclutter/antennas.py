"""Azimuth antenna patterns.

Field patterns are kept on the simulator's azimuth grid, normalized so the
discrete power integral sum(|f|^2) * dphi_rad equals 1.  A pattern can also
be evaluated off-grid, which lets the spinning receiver point anywhere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .randomfields import AzimuthGrid

HPBW_TO_RMS = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))  # power-pattern RMS / HPBW


def _wrap_deg(offset_deg):
    """Wrap angles to [-180, 180)."""
    return (np.asarray(offset_deg, dtype=float) + 180.0) % 360.0 - 180.0


def _gaussian_wrapped_power(distance_deg, rms_deg):
    """Wrapped Gaussian power lobe versus circular distance from boresight."""
    d = np.asarray(distance_deg, dtype=float)
    out = np.zeros_like(d)
    for k in range(-4, 5):
        out += np.exp(-0.5 * ((d + 360.0 * k) / rms_deg) ** 2)
    return out


@dataclass(frozen=True, eq=False)
class AntennaPattern:
    """Azimuth field pattern |f(phi)| with unit total power.

    ``kind`` is one of ``gaussian`` (horn main lobe), ``omni``, ``tabulated``
    (from gain samples) or ``custom`` (normalized raw field samples).
    """

    grid: AzimuthGrid
    kind: str
    field: np.ndarray
    hpbw_deg: float | None = None
    _scale: float = 1.0
    _tab_az_deg: np.ndarray | None = dc_field(default=None, repr=False)
    _tab_gain_db: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def power(self) -> np.ndarray:
        return self.field**2

    @property
    def rms_width_deg(self) -> float | None:
        if self.hpbw_deg is None:
            return None
        return self.hpbw_deg * HPBW_TO_RMS

    def _raw_power(self, offset_deg) -> np.ndarray:
        d = _wrap_deg(offset_deg)
        if self.kind == "gaussian":
            return _gaussian_wrapped_power(np.abs(d), self.hpbw_deg * HPBW_TO_RMS)
        if self.kind == "omni":
            return np.ones_like(d)
        if self.kind == "tabulated":
            az = self._tab_az_deg
            gain = self._tab_gain_db
            ext_az = np.concatenate([az, [az[0] + 360.0]])
            ext_gain = np.concatenate([gain, [gain[0]]])
            db = np.interp(np.asarray(offset_deg, dtype=float) % 360.0, ext_az, ext_gain)
            return 10.0 ** (db / 10.0)
        # custom: nearest grid sample (already normalized field)
        idx = np.rint(np.asarray(offset_deg, dtype=float) % 360.0 / self.grid.delta_phi_deg)
        idx = idx.astype(int) % self.grid.n_bins
        return self.power[idx] / self._scale

    def field_at(self, offset_deg) -> np.ndarray:
        """|f| at arbitrary azimuth offsets (degrees) from boresight."""
        return np.sqrt(self._raw_power(offset_deg) * self._scale)

    @property
    def peak_directivity(self) -> float:
        """Peak power gain over isotropic, used for point-target links.

        The Gaussian horn assumes the same beamwidth in elevation, giving
        2 / rms^2; omni is unity; tabulated patterns carry absolute dBi and
        are used verbatim; custom patterns fall back to the azimuthal
        directive gain 2*pi*max|f|^2.
        """
        if self.kind == "gaussian":
            s_rad = math.radians(self.hpbw_deg * HPBW_TO_RMS)
            return 2.0 / s_rad**2
        if self.kind == "omni":
            return 1.0
        if self.kind == "tabulated":
            return float(10.0 ** (np.max(self._tab_gain_db) / 10.0))
        return float(2.0 * math.pi * np.max(self.power))

    def gain_at(self, offset_deg) -> np.ndarray:
        """Power gain at azimuth offsets, scaled so the peak equals
        :attr:`peak_directivity`."""
        raw = self._raw_power(offset_deg)
        if self.kind == "omni":
            return np.ones_like(raw)
        if self.kind == "tabulated":
            return raw  # already absolute gain
        if self.kind == "gaussian":
            peak = float(self._raw_power(0.0))
        else:
            peak = float(np.max(self.power) / self._scale)
        return self.peak_directivity * raw / peak


def _normalize(grid: AzimuthGrid, raw_power_on_grid: np.ndarray) -> float:
    total = float(np.sum(raw_power_on_grid) * grid.delta_phi_rad)
    if total <= 0.0:
        raise ValueError("pattern has no power to normalize")
    return 1.0 / total


def gaussian_horn(hpbw_deg: float, grid: AzimuthGrid) -> AntennaPattern:
    """Gaussian main-lobe horn with the given half-power beamwidth."""
    if not 0.0 < hpbw_deg < 180.0:
        raise ValueError(f"hpbw must be in (0, 180) degrees, got {hpbw_deg}")
    # integer circular bin distances keep mirror bins bit-identical
    j = np.arange(grid.n_bins)
    dist = np.minimum(j, grid.n_bins - j) * grid.delta_phi_deg
    raw = _gaussian_wrapped_power(dist, hpbw_deg * HPBW_TO_RMS)
    scale = _normalize(grid, raw)
    return AntennaPattern(
        grid=grid,
        kind="gaussian",
        field=np.sqrt(raw * scale),
        hpbw_deg=hpbw_deg,
        _scale=scale,
    )


def omni(grid: AzimuthGrid) -> AntennaPattern:
    """Isotropic azimuth pattern, |f|^2 = 1/(2 pi) per radian."""
    raw = np.ones(grid.n_bins)
    scale = _normalize(grid, raw)
    return AntennaPattern(grid=grid, kind="omni", field=np.sqrt(raw * scale), _scale=scale)


def tabulated(azimuth_deg, gain_db, grid: AzimuthGrid) -> AntennaPattern:
    """Pattern from (azimuth, gain) samples, interpolated linearly in dB.

    Azimuth samples must be strictly increasing within [0, 360).
    """
    az = np.asarray(azimuth_deg, dtype=float)
    gain = np.asarray(gain_db, dtype=float)
    if az.ndim != 1 or az.size < 2 or gain.shape != az.shape:
        raise ValueError("need matching 1-D azimuth and gain arrays with >= 2 samples")
    if np.any(np.diff(az) <= 0) or az[0] < 0 or az[-1] >= 360.0:
        raise ValueError("azimuth samples must be strictly increasing in [0, 360)")
    p = AntennaPattern(
        grid=grid,
        kind="tabulated",
        field=np.empty(0),
        _tab_az_deg=az,
        _tab_gain_db=gain,
    )
    raw = p._raw_power(grid.centers_deg)
    scale = _normalize(grid, raw)
    return AntennaPattern(
        grid=grid,
        kind="tabulated",
        field=np.sqrt(raw * scale),
        _scale=scale,
        _tab_az_deg=az,
        _tab_gain_db=gain,
    )


def load_pattern_csv(path, grid: AzimuthGrid) -> AntennaPattern:
    """Read a two-column CSV with header ``azimuth_deg,gain_db``."""
    az, gain = [], []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader)
        if [h.strip() for h in header] != ["azimuth_deg", "gain_db"]:
            raise ValueError(f"{path}: expected header 'azimuth_deg,gain_db'")
        for row in reader:
            if not row:
                continue
            az.append(float(row[0]))
            gain.append(float(row[1]))
    return tabulated(az, gain, grid)


def normalize_pattern(raw_field, grid: AzimuthGrid) -> AntennaPattern:
    """Normalize raw field samples on the grid to unit total power."""
    f = np.asarray(raw_field, dtype=float)
    if f.shape != (grid.n_bins,):
        raise ValueError(f"expected {grid.n_bins} field samples, got shape {f.shape}")
    if np.any(f < 0) or np.any(~np.isfinite(f)):
        raise ValueError("field samples must be finite and nonnegative")
    if not np.any(f > 0):
        raise ValueError("all-zero pattern cannot be normalized")
    scale = _normalize(grid, f**2)
    return AntennaPattern(grid=grid, kind="custom", field=f * math.sqrt(scale), _scale=scale)


def pattern_autocorrelation(pattern: AntennaPattern):
    """Circular autocorrelation of the mean-removed power pattern.

    Returns (lags_deg, rho) with lags in [-180, 180) sorted ascending and
    rho normalized to 1 at zero lag.  Constant patterns (omni) have no
    variance to normalize and raise ValueError.
    """
    power = pattern.power
    x = power - power.mean()
    denom = float(np.sum(x * x))
    if denom <= 1e-15 * float(np.sum(power**2)):
        raise ValueError("constant pattern has degenerate variance")
    corr = np.fft.irfft(np.abs(np.fft.rfft(x)) ** 2, n=x.size) / denom
    lags = _wrap_deg(pattern.grid.centers_deg)
    order = np.argsort(lags, kind="stable")
    return lags[order], corr[order]
