"""fractalmix: multiscale shear fields, diffusivity cascades, and passive
scalar experiments on the 2-torus."""

__version__ = "0.1.0"

from .params import (  # noqa: F401
    ParameterSchedule,
    build_schedule,
    custom_schedule,
    derive_exponents,
    choose_start_scale,
    slot_index,
    validate_schedule,
)
from .cutoffs import CutoffFamily, calibrate_profiles, eval_cutoff, verify_family  # noqa: F401
