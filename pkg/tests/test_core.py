import math

import numpy as np
import pytest

from rfclutter import (
    CarrierSpec,
    RoomSpec,
    Surface,
    average_backscatter_ratio,
    clutter_integral_quadrature,
    fresnel_average_reflectivity,
    predict_room,
    to_db,
    wavelength,
)
from rfclutter.antennas import HPBW_TO_RMS
from rfclutter.core import SPEED_OF_LIGHT

WL28 = wavelength(28e9)


def test_wavelength_values():
    assert wavelength(28e9) == pytest.approx(0.010707, abs=5e-7)
    assert wavelength(SPEED_OF_LIGHT) == 1.0
    assert wavelength(3e9) == pytest.approx(0.099931, abs=5e-7)


def test_wavelength_rejects_nonpositive():
    with pytest.raises(ValueError):
        wavelength(0.0)
    with pytest.raises(ValueError):
        wavelength(-1e9)


def test_average_backscatter_reference_values():
    r = average_backscatter_ratio(1.5, 0.010707, 1.0)
    assert r == pytest.approx(3.23e-7, rel=2e-3)
    assert to_db(r) == pytest.approx(-64.9, abs=0.05)
    # doubling the wall distance quarters the ratio
    assert average_backscatter_ratio(3.0, 0.010707, 1.0) == pytest.approx(8.06e-8, rel=2e-3)
    assert average_backscatter_ratio(5.0, WL28, 0.0) == 0.0


def test_average_backscatter_scaling_law_exact():
    rng = np.random.default_rng(7)
    for _ in range(50):
        d, wl, g = rng.uniform(0.3, 20), rng.uniform(1e-3, 1.0), rng.uniform(0, 1)
        assert average_backscatter_ratio(2 * d, wl, g) == average_backscatter_ratio(d, wl, g) / 4


def test_average_backscatter_linear_in_reflectivity():
    rng = np.random.default_rng(8)
    for _ in range(50):
        d, wl = rng.uniform(0.3, 20), rng.uniform(1e-3, 1.0)
        g, a = rng.uniform(0, 0.5), rng.uniform(0, 2)
        assert average_backscatter_ratio(d, wl, a * g) == pytest.approx(
            a * average_backscatter_ratio(d, wl, g), rel=1e-12
        )


def test_average_backscatter_domain_errors():
    with pytest.raises(ValueError):
        average_backscatter_ratio(0.0, WL28, 1.0)
    with pytest.raises(ValueError):
        average_backscatter_ratio(1.5, -1.0, 1.0)
    with pytest.raises(ValueError):
        average_backscatter_ratio(1.5, WL28, 1.5)


def _fresnel_oracle(eps_r, polarization, n=200_000):
    # independent trapezoid quadrature of the Fresnel power coefficients
    theta = np.linspace(0.0, 0.5 * np.pi, n)
    cos_t, root = np.cos(theta), np.sqrt(eps_r - np.sin(theta) ** 2)
    r_te = ((cos_t - root) / (cos_t + root)) ** 2
    r_tm = ((eps_r * cos_t - root) / (eps_r * cos_t + root)) ** 2
    vals = {"te": r_te, "tm": r_tm, "unpolarized": 0.5 * (r_te + r_tm)}[polarization]
    return np.trapezoid(vals, theta) / (0.5 * np.pi)


@pytest.mark.parametrize("polarization", ["te", "tm", "unpolarized"])
@pytest.mark.parametrize("eps_r", [1.5, 3.0, 10.0])
def test_fresnel_matches_independent_quadrature(eps_r, polarization):
    assert fresnel_average_reflectivity(eps_r, polarization) == pytest.approx(
        _fresnel_oracle(eps_r, polarization), abs=2e-4
    )


def test_fresnel_reference_points():
    assert fresnel_average_reflectivity(1.0) == 0.0
    assert fresnel_average_reflectivity(3.0) == pytest.approx(0.25, abs=0.05)
    assert fresnel_average_reflectivity(1e6) > 0.99


def test_fresnel_monotone_and_bounded():
    grid = [1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1e4]
    vals = [fresnel_average_reflectivity(e) for e in grid]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_fresnel_rejects_sub_unity_permittivity():
    with pytest.raises(ValueError):
        fresnel_average_reflectivity(0.9)


@pytest.mark.parametrize("hpbw_deg", [5.0, 10.0, 20.0])
def test_quadrature_agrees_with_closed_form(hpbw_deg):
    rms = math.radians(hpbw_deg * HPBW_TO_RMS)
    q = clutter_integral_quadrature(1.5, WL28, 1.0, rms, rms)
    closed = average_backscatter_ratio(1.5, WL28, 1.0)
    assert q == pytest.approx(closed, rel=0.02)


def test_quadrature_nearly_independent_of_beamwidth():
    rms10 = math.radians(10.0 * HPBW_TO_RMS)
    q10 = clutter_integral_quadrature(1.5, WL28, 1.0, rms10, rms10)
    q5 = clutter_integral_quadrature(1.5, WL28, 1.0, rms10 / 2, rms10 / 2)
    assert abs(q5 / q10 - 1.0) < 0.02


def test_quadrature_zero_reflectivity():
    rms = math.radians(10.0 * HPBW_TO_RMS)
    assert clutter_integral_quadrature(1.5, WL28, 0.0, rms, rms) == 0.0


def test_quadrature_scales_with_transmit_gain():
    rms = math.radians(10.0 * HPBW_TO_RMS)
    q1 = clutter_integral_quadrature(1.5, WL28, 1.0, rms, rms, g_t=1.0)
    q2 = clutter_integral_quadrature(1.5, WL28, 1.0, rms, rms, g_t=2.0)
    assert q2 == pytest.approx(2.0 * q1, rel=1e-12)


def test_predict_room_defaults_and_values():
    carrier = CarrierSpec(28e9)
    office = predict_room(RoomSpec(3.0, 3.0), carrier, label="office")
    assert office.d_s_m == 1.5
    assert office.p0_db == pytest.approx(-64.9, abs=0.05)

    cafeteria = predict_room(RoomSpec(30.0, 20.0, d_s_m=10.0), carrier)
    assert cafeteria.p0_db == pytest.approx(-81.4, abs=0.05)

    dull = predict_room(RoomSpec(3.0, 3.0, surface=Surface.explicit(0.25)), carrier)
    assert dull.p0_db == pytest.approx(-70.9, abs=0.05)
    assert dull.p0_db == pytest.approx(office.p0_db + 10 * math.log10(0.25), abs=1e-9)


def test_predict_room_default_wall_distance_is_half_min_dimension():
    rng = np.random.default_rng(11)
    for _ in range(20):
        w, l = rng.uniform(2, 40, size=2)
        room = RoomSpec(w, l)
        assert room.distance_to_wall_m == 0.5 * min(w, l)


def test_room_and_surface_validation():
    with pytest.raises(ValueError):
        RoomSpec(0.0, 3.0)
    with pytest.raises(ValueError):
        RoomSpec(3.0, 3.0, d_s_m=-1.0)
    with pytest.raises(ValueError):
        RoomSpec(3.0, 3.0, t_rev_s=0.0)
    with pytest.raises(ValueError):
        Surface.dielectric(0.5)
    with pytest.raises(ValueError):
        Surface.explicit(1.5)
    with pytest.raises(ValueError):
        predict_room(RoomSpec(3.0, 3.0, surface=Surface.explicit(0.0)), CarrierSpec(28e9))
