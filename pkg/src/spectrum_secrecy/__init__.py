"""Secrecy rates and power control under received-power (spectrum-sharing) limits.

A transmitter shares spectrum with a primary receiver (so the power it lands
there is capped on average and optionally per-state) while hiding its messages
from an eavesdropper. This package provides the four transmit-power policies
for that setting, the Lagrange-multiplier calibration that meets the average
received-power budget, Monte Carlo and closed-form ergodic secrecy rates, and
brute-force oracles that validate every closed form.
"""

from .fading import (
    ChannelState,
    FadingParams,
    SampleStream,
    cdf_h,
    pdf_h,
    sample_gains,
    sample_gains_partitioned,
    sample_state,
)
from .specfun import e1, e1_quadrature_oracle, e1_scaled
from .policy import (
    PolicyFamily,
    PolicySpec,
    no_ecsi_residual,
    no_ecsi_residual_integral,
    onoff_power_level,
    peak_active,
    policy_power,
    power_full_csi_avg,
    power_full_csi_avg_peak,
    power_no_ecsi,
    power_onoff,
)
from .rate import (
    RateEstimate,
    ergodic_secrecy_rate_mc,
    instantaneous_secrecy_rate,
    onoff_rate_closed_form,
)
from .calibrate import (
    FLAG_Q_AVG_UNATTAINABLE,
    CalibrationReport,
    ConstraintSet,
    avg_received_power,
    calibrate_lambda,
    optimize_threshold,
)
from .oracle import (
    GridSpec,
    argmax_no_ecsi_grid,
    argmax_power_grid,
    no_ecsi_per_state_objective,
    per_state_lagrangian,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelState",
    "FadingParams",
    "SampleStream",
    "cdf_h",
    "pdf_h",
    "sample_gains",
    "sample_gains_partitioned",
    "sample_state",
    "e1",
    "e1_quadrature_oracle",
    "e1_scaled",
    "PolicyFamily",
    "PolicySpec",
    "no_ecsi_residual",
    "no_ecsi_residual_integral",
    "onoff_power_level",
    "peak_active",
    "policy_power",
    "power_full_csi_avg",
    "power_full_csi_avg_peak",
    "power_no_ecsi",
    "power_onoff",
    "RateEstimate",
    "ergodic_secrecy_rate_mc",
    "instantaneous_secrecy_rate",
    "onoff_rate_closed_form",
    "FLAG_Q_AVG_UNATTAINABLE",
    "CalibrationReport",
    "ConstraintSet",
    "avg_received_power",
    "calibrate_lambda",
    "optimize_threshold",
    "GridSpec",
    "argmax_no_ecsi_grid",
    "argmax_power_grid",
    "no_ecsi_per_state_objective",
    "per_state_lagrangian",
    "__version__",
]
