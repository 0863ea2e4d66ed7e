import math

import numpy as np
import pytest

from rfclutter import (
    AzimuthGrid,
    gaussian_horn,
    load_pattern_csv,
    normalize_pattern,
    omni,
    pattern_autocorrelation,
    tabulated,
)
from rfclutter.antennas import HPBW_TO_RMS

GRID = AzimuthGrid(1800)


def _unit_power_sum(pattern):
    return float(np.sum(pattern.power) * pattern.grid.delta_phi_rad)


def test_omni_is_isotropic():
    p = omni(GRID)
    assert np.allclose(p.power, 1.0 / (2.0 * math.pi), rtol=1e-12)
    assert _unit_power_sum(p) == pytest.approx(1.0, abs=1e-9)


def test_gaussian_horn_half_power_at_half_beamwidth():
    p = gaussian_horn(10.0, GRID)
    f0 = p.field_at(0.0) ** 2
    assert p.field_at(5.0) ** 2 == pytest.approx(0.5 * f0, rel=1e-9)
    assert p.field_at(-5.0) ** 2 == pytest.approx(0.5 * f0, rel=1e-9)


def test_gaussian_horn_peak_density():
    p = gaussian_horn(10.0, GRID)
    assert p.rms_width_deg == pytest.approx(4.2466, abs=1e-3)
    # unit-power Gaussian peak: 1 / (sqrt(2 pi) * rms_rad)
    expected = 1.0 / (math.sqrt(2.0 * math.pi) * math.radians(p.rms_width_deg))
    assert float(p.field_at(0.0) ** 2) == pytest.approx(expected, rel=1e-3)
    assert float(p.field_at(0.0) ** 2) == pytest.approx(5.38, abs=0.01)


@pytest.mark.parametrize("make", [lambda: gaussian_horn(10.0, GRID), lambda: omni(GRID)])
def test_unit_total_power(make):
    assert _unit_power_sum(make()) == pytest.approx(1.0, abs=1e-9)


def test_gaussian_symmetry_is_bin_exact():
    p = gaussian_horn(10.0, GRID)
    f = p.field
    assert np.array_equal(f[1:], f[1:][::-1])  # bins i and n-i mirror around boresight


def test_gaussian_horn_rejects_bad_beamwidth():
    with pytest.raises(ValueError):
        gaussian_horn(0.0, GRID)
    with pytest.raises(ValueError):
        gaussian_horn(180.0, GRID)


def test_normalize_pattern_scale_invariance():
    rng = np.random.default_rng(3)
    raw = rng.uniform(0.0, 2.0, GRID.n_bins)
    a = normalize_pattern(raw, GRID)
    b = normalize_pattern(7.0 * raw, GRID)
    assert np.allclose(a.field, b.field, rtol=1e-12)
    assert _unit_power_sum(a) == pytest.approx(1.0, abs=1e-9)


def test_normalize_pattern_idempotent():
    p = gaussian_horn(10.0, GRID)
    again = normalize_pattern(p.field, GRID)
    assert np.allclose(again.field, p.field, rtol=1e-12)


def test_normalize_pattern_rejects_degenerate_input():
    with pytest.raises(ValueError):
        normalize_pattern(np.zeros(GRID.n_bins), GRID)
    bad = np.ones(GRID.n_bins)
    bad[3] = -0.1
    with pytest.raises(ValueError):
        normalize_pattern(bad, GRID)


def test_autocorrelation_matches_brute_force():
    grid = AzimuthGrid(360)
    p = gaussian_horn(10.0, grid)
    lags, rho = pattern_autocorrelation(p)
    # independent O(n^2) oracle
    x = p.power - p.power.mean()
    n = x.size
    brute = np.array([np.sum(x * np.roll(x, -m)) for m in range(n)]) / np.sum(x * x)
    wrapped = (grid.centers_deg + 180.0) % 360.0 - 180.0
    order = np.argsort(wrapped, kind="stable")
    assert np.allclose(rho, brute[order], atol=1e-12)


def test_autocorrelation_normalization_and_width():
    p = gaussian_horn(10.0, GRID)
    lags, rho = pattern_autocorrelation(p)
    assert rho[np.argmin(np.abs(lags))] == pytest.approx(1.0, abs=1e-12)
    # autocorrelation of a Gaussian lobe doubles the squared width
    target = math.sqrt(2.0) * 10.0 * HPBW_TO_RMS
    at_target = rho[np.argmin(np.abs(lags - target))]
    assert at_target == pytest.approx(math.exp(-0.5), abs=0.02)


def test_autocorrelation_rejects_constant_pattern():
    with pytest.raises(ValueError):
        pattern_autocorrelation(omni(GRID))


def test_tabulated_round_trip(tmp_path):
    az = np.arange(0.0, 360.0, 1.0)
    gain_db = -0.05 * ((az + 180.0) % 360.0 - 180.0) ** 2  # smooth lobe
    path = tmp_path / "pattern.csv"
    path.write_text(
        "azimuth_deg,gain_db\n"
        + "\n".join(f"{a},{g}" for a, g in zip(az, gain_db))
        + "\n"
    )
    p = load_pattern_csv(path, GRID)
    assert _unit_power_sum(p) == pytest.approx(1.0, abs=1e-9)
    # dB interpolation hits the tabulated nodes
    ratio = p.field_at(10.0) ** 2 / p.field_at(0.0) ** 2
    assert 10.0 * math.log10(ratio) == pytest.approx(gain_db[10], abs=1e-9)
    assert p.peak_directivity == pytest.approx(1.0, rel=1e-12)  # 0 dBi peak


def test_tabulated_requires_increasing_azimuth():
    with pytest.raises(ValueError):
        tabulated([0.0, 10.0, 5.0], [0.0, 0.0, 0.0], GRID)
    with pytest.raises(ValueError):
        tabulated([0.0, 360.0], [0.0, 0.0], GRID)


def test_gain_at_matches_directivity():
    p = gaussian_horn(10.0, GRID)
    peak = float(p.gain_at(0.0))
    assert peak == pytest.approx(p.peak_directivity, rel=1e-6)
    assert 10 * math.log10(peak) == pytest.approx(25.6, abs=0.1)  # ~10 deg horn
    assert float(p.gain_at(5.0)) == pytest.approx(0.5 * peak, rel=1e-6)
    assert float(omni(GRID).gain_at(123.0)) == 1.0
