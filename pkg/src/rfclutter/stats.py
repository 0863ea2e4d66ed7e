"""Statistical machinery for validating the synthesized channels.

Empirical CDFs, spatial correlation of spun spectra across nearby
transceiver positions, azimuth autocorrelation of spectra, exponential-decay
fitting of delay profiles, and the room-survey prediction report.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import CarrierSpec, PredictionRecord, Surface, average_backscatter_ratio, to_db

BEST_FIT_REFLECTIVITIES = (1.0, 0.25)  # metal / dielectric surroundings


@dataclass(frozen=True, eq=False)
class EmpiricalCDF:
    """Right-continuous empirical CDF of a sample."""

    support: np.ndarray
    fractions: np.ndarray

    def __call__(self, x):
        idx = np.searchsorted(self.support, np.asarray(x, dtype=float), side="right")
        out = idx / self.support.size
        return float(out) if np.ndim(x) == 0 else out

    def quantile(self, q):
        return np.quantile(self.support, q)


def empirical_cdf(samples) -> EmpiricalCDF:
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("empty sample")
    return EmpiricalCDF(support=x, fractions=np.arange(1, x.size + 1) / x.size)


def _normalize_db_rows(rows_db: np.ndarray) -> np.ndarray:
    """Mean-removed, unit-variance rows (dB spectra)."""
    centered = rows_db - rows_db.mean(axis=-1, keepdims=True)
    scale = np.sqrt((centered**2).mean(axis=-1, keepdims=True))
    if np.any(scale <= 0):
        raise ValueError("constant spectrum has degenerate variance")
    return centered / scale


def spatial_correlation(spectra, positions_m):
    """Correlation of dB spun spectra versus transceiver separation.

    Every spectrum is mean-removed and variance-normalized; pair products
    are averaged over pointing angle and bucketed by |d2 - d1|.  Returns
    (separations_m, rho) sorted by separation.
    """
    if len(spectra) < 2 or len(spectra) != len(positions_m):
        raise ValueError("need >= 2 spectra with matching positions")
    base = np.asarray(spectra[0].pointings_deg)
    rows = []
    for s in spectra:
        if s.pointings_deg.shape != base.shape or np.any(s.pointings_deg != base):
            raise ValueError("spectra must share one pointing grid")
        rows.append(s.power_db)
    p = _normalize_db_rows(np.asarray(rows))
    pos = np.asarray(positions_m, dtype=float)

    buckets: dict[float, list[float]] = {}
    n = len(spectra)
    for i in range(n):
        for j in range(i + 1, n):
            sep = round(abs(pos[j] - pos[i]), 9)
            buckets.setdefault(sep, []).append(float(np.mean(p[i] * p[j])))
    seps = np.array(sorted(buckets))
    rho = np.array([np.mean(buckets[s]) for s in seps])
    return seps, rho


def azimuth_autocorrelation(spectra):
    """Circular autocorrelation of normalized dB spectra versus azimuth lag.

    Accepts one spectrum or a list; with several, the correlation is
    averaged across them.  Returns (lags_deg in [-180, 180), rho).
    """
    if not isinstance(spectra, (list, tuple)):
        spectra = [spectra]
    if len(spectra) == 0:
        raise ValueError("need at least one spectrum")
    base = np.asarray(spectra[0].pointings_deg)
    rows = np.asarray([s.power_db for s in spectra])
    p = _normalize_db_rows(rows)
    n = base.size
    corr = np.fft.irfft(np.abs(np.fft.rfft(p, axis=1)) ** 2, n=n, axis=1).mean(axis=0) / n
    spacing = 360.0 / n
    lags = (np.arange(n) * spacing + 180.0) % 360.0 - 180.0
    order = np.argsort(lags, kind="stable")
    return lags[order], corr[order]


def correlation_half_width(lags_deg, rho) -> float:
    """Lag (degrees) where the main lobe first falls to half of rho(0)."""
    lags = np.asarray(lags_deg, dtype=float)
    r = np.asarray(rho, dtype=float)
    pos = lags >= 0
    lags, r = lags[pos], r[pos]
    order = np.argsort(lags)
    lags, r = lags[order], r[order]
    half = 0.5 * r[0]
    below = np.nonzero(r < half)[0]
    if below.size == 0:
        raise ValueError("correlation never falls below half maximum")
    k = below[0]
    if k == 0:
        return 0.0
    # linear interpolation between the straddling lags
    frac = (r[k - 1] - half) / (r[k - 1] - r[k])
    return float(lags[k - 1] + frac * (lags[k] - lags[k - 1]))


def fit_reverberation(delays_s, power, onset_s: float) -> float:
    """Reverberation time from an exponentially decaying delay profile.

    Least-squares line on dB power versus delay beyond the profile peak,
    down to a -30 dB fit floor; the decay time is -10 log10(e) / slope.
    """
    tau = np.asarray(delays_s, dtype=float)
    p = np.asarray(power, dtype=float)
    if tau.shape != p.shape or tau.ndim != 1:
        raise ValueError("need matching 1-D delay and power arrays")
    after = tau >= onset_s
    if not np.any(after):
        raise ValueError("no samples beyond onset")
    peak_idx = int(np.argmax(p))
    floor = p[peak_idx] * 1e-3
    mask = (tau > tau[peak_idx]) & (p > floor)
    if np.count_nonzero(mask) < 10:
        raise ValueError("too few samples beyond the peak above the fit floor")
    slope, _ = np.polyfit(tau[mask], to_db(p[mask]), 1)
    if slope >= 0:
        raise ValueError("profile does not decay; cannot fit a reverberation time")
    return float(-10.0 * math.log10(math.e) / slope)


@dataclass(frozen=True)
class SurveyRow:
    """One surveyed room with its measured median backscatter ratio."""

    label: str
    n_links: int
    dim_a_m: float
    dim_b_m: float
    d_s_m: float
    measured_median_db: float
    material: str  # "metal", "bestfit", "dielectric:<eps>", or "gamma:<value>"


def _survey_data_path() -> Path:
    return Path(resources.files("rfclutter").joinpath("data/room_survey.csv"))


def load_room_survey(path=None) -> list[SurveyRow]:
    """Read the shipped room-survey CSV (or another file of the same schema)."""
    src = Path(path) if path is not None else _survey_data_path()
    rows = []
    with open(src, newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        expected = [
            "label", "n_links", "dim_a_m", "dim_b_m", "d_s_m",
            "measured_median_db", "material",
        ]
        if reader.fieldnames != expected:
            raise ValueError(f"{src}: expected header {','.join(expected)}")
        for rec in reader:
            rows.append(
                SurveyRow(
                    label=rec["label"],
                    n_links=int(rec["n_links"]),
                    dim_a_m=float(rec["dim_a_m"]),
                    dim_b_m=float(rec["dim_b_m"]),
                    d_s_m=float(rec["d_s_m"]),
                    measured_median_db=float(rec["measured_median_db"]),
                    material=rec["material"],
                )
            )
    if not rows:
        raise ValueError(f"{src}: no survey rows")
    return rows


def _material_gamma_sq(material: str) -> float | None:
    """Reflectivity for a survey material tag; None means best-fit."""
    if material == "bestfit":
        return None
    if material == "metal":
        return 1.0
    if material.startswith("dielectric:"):
        return Surface.dielectric(float(material.split(":", 1)[1])).reflectivity()
    if material.startswith("gamma:"):
        return float(material.split(":", 1)[1])
    raise ValueError(f"unknown material tag {material!r}")


@dataclass(frozen=True, eq=False)
class SurveyReport:
    """Per-room prediction errors and their RMS."""

    records: list[PredictionRecord]
    errors_db: np.ndarray
    rms_db: float


def survey_report(
    rows: list[SurveyRow], carrier: CarrierSpec, force_best_fit: bool = False
) -> SurveyReport:
    """Predict every surveyed room and report prediction - measured errors.

    Rows tagged ``bestfit`` (or all rows, when ``force_best_fit``) pick the
    reflectivity from {1, 0.25} that minimizes the absolute error.
    """
    if not rows:
        raise ValueError("no survey rows")
    records, errors = [], []
    for row in rows:
        gamma_sq = None if force_best_fit else _material_gamma_sq(row.material)
        if gamma_sq is None:
            candidates = BEST_FIT_REFLECTIVITIES
        else:
            candidates = (gamma_sq,)
        best = None
        for g in candidates:
            p0_db = float(
                to_db(average_backscatter_ratio(row.d_s_m, carrier.wavelength_m, g))
            )
            err = p0_db - row.measured_median_db
            if best is None or abs(err) < abs(best[1]):
                best = ((g, p0_db), err)
        (g, p0_db), err = best
        records.append(
            PredictionRecord(
                label=row.label,
                d_s_m=row.d_s_m,
                gamma_sq=g,
                p0_db=p0_db,
                measured_median_db=row.measured_median_db,
            )
        )
        errors.append(err)
    errors = np.asarray(errors)
    return SurveyReport(
        records=records, errors_db=errors, rms_db=float(np.sqrt(np.mean(errors**2)))
    )
