"""Python interface to the qsdc simulator core."""

from ._qsdc import (
    CapacityError,
    ConfigParseError,
    ConfigValidationError,
    ContractViolation,
    TimingError,
    apply_channel,
    apply_local,
    bell_density,
    bell_state,
    calibrate_noise,
    config_keys,
    encode_unitary,
    fidelity,
    hwp_unitary,
    intercept_resend_qber,
    project_physical,
    reconstruct_exact,
    run_csv,
    run_session,
    tomography,
    validate_physical,
)

__all__ = [
    "CapacityError",
    "ConfigParseError",
    "ConfigValidationError",
    "ContractViolation",
    "TimingError",
    "apply_channel",
    "apply_local",
    "bell_density",
    "bell_state",
    "calibrate_noise",
    "config_keys",
    "encode_unitary",
    "fidelity",
    "hwp_unitary",
    "intercept_resend_qber",
    "project_physical",
    "reconstruct_exact",
    "run_csv",
    "run_session",
    "tomography",
    "validate_physical",
]
