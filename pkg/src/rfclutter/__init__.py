"""Seeded statistical simulator of monostatic indoor RF backscatter."""

__version__ = "0.1.0"

from .antennas import (
    AntennaPattern,
    gaussian_horn,
    load_pattern_csv,
    normalize_pattern,
    omni,
    pattern_autocorrelation,
    tabulated,
)
from .clutter import (
    AzimuthField,
    ClutterParams,
    DelayAzimuthField,
    DelayAzimuthResponse,
    DelayGrid,
    ProbeWaveform,
    SpunSpectrum,
    band_limit,
    gen_azimuth_channel,
    gen_delay_azimuth_channel,
    make_probe_waveform,
    pdp_envelope,
    spin_response,
    uniform_pointings,
)
from .core import (
    SPEED_OF_LIGHT,
    CarrierSpec,
    ConfigurationError,
    PredictionRecord,
    RoomSpec,
    Surface,
    average_backscatter_ratio,
    clutter_integral_quadrature,
    fresnel_average_reflectivity,
    from_db,
    predict_room,
    to_db,
    wavelength,
)
from .randomfields import (
    AzimuthGrid,
    LognormalFieldParams,
    RandomStream,
    complex_gaussian_series,
    correlated_lognormal_db,
    derive_stream,
    lognormal_mean_offset,
)
from .stats import (
    EmpiricalCDF,
    SurveyReport,
    SurveyRow,
    azimuth_autocorrelation,
    correlation_half_width,
    empirical_cdf,
    fit_reverberation,
    load_room_survey,
    spatial_correlation,
    survey_report,
)
from .target import (
    SceneSpec,
    TargetSpec,
    TimeAzimuthMap,
    Trajectory,
    compose_scene,
    target_response,
    trajectory_state,
)
from .validation import CheckResult, ValidationReport, run_checks
