"""Volumetric light-field encryption toolkit.

A 3D volume is encrypted into a single 2D sensor image through a microlens
array and a random mask; decryption runs a multiplicative deconvolution
with the point-spread key. See the project README for the file formats and
the command-line front end.
"""

from ._core import (
    AmplitudeLaw,
    AttackEntry,
    AttackReport,
    AttackSettings,
    BinaryPlaneSet,
    ConfigError,
    Correlation,
    DeconvResult,
    DeconvSettings,
    DeconvStatus,
    IoError,
    IterationRecord,
    LightFieldImage,
    MaskKind,
    MaskSpec,
    NumericalError,
    OccludeMode,
    OpticalConfig,
    PsfKey,
    SamplingCheck,
    UsageError,
    Volume,
    VolumeGrid,
    apply_adjoint,
    apply_forward,
    build_psf_key,
    decrypt,
    default_sensor_side,
    demo_scene,
    demo_scene_names,
    digitize,
    encrypt,
    image_to_png,
    load_image,
    load_planes,
    load_psf_key,
    load_volume,
    normalized_correlation,
    occlude,
    offsets_per_period,
    per_plane_correlation,
    perturb_key,
    reassemble,
    run_attack_suite,
    save_image,
    save_planes,
    save_psf_key,
    save_volume,
    validate_sampling,
)

__all__ = [
    "AmplitudeLaw",
    "AttackEntry",
    "AttackReport",
    "AttackSettings",
    "BinaryPlaneSet",
    "ConfigError",
    "Correlation",
    "DeconvResult",
    "DeconvSettings",
    "DeconvStatus",
    "IoError",
    "IterationRecord",
    "LightFieldImage",
    "MaskKind",
    "MaskSpec",
    "NumericalError",
    "OccludeMode",
    "OpticalConfig",
    "PsfKey",
    "SamplingCheck",
    "UsageError",
    "Volume",
    "VolumeGrid",
    "apply_adjoint",
    "apply_forward",
    "build_psf_key",
    "decrypt",
    "default_sensor_side",
    "demo_scene",
    "demo_scene_names",
    "digitize",
    "encrypt",
    "image_to_png",
    "load_image",
    "load_planes",
    "load_psf_key",
    "load_volume",
    "normalized_correlation",
    "occlude",
    "offsets_per_period",
    "per_plane_correlation",
    "perturb_key",
    "reassemble",
    "run_attack_suite",
    "save_image",
    "save_planes",
    "save_psf_key",
    "save_volume",
    "validate_sampling",
]
