"""
Utilities package for the Perturbed Network Identification toolkit.

This package contains all utility modules:
- config_loader: Configuration loading and management
- logger: Global logging configuration and per-run log files
- exceptions: Domain error hierarchy
- utils: Hashing, seed derivation and filesystem helpers
"""
from .config_loader import config, ConfigLoader, PROJECT_ROOT
from .logger import logger, get_logger, run_log
from .exceptions import (
    NetworkIdentificationError,
    InvalidModelError,
    DimensionMismatchError,
    SingularEvaluationError,
    UnstableSystemError,
    NoStationarySolutionError,
    TruncationError,
    SingularSpectrumError,
    EnumerationCapError,
    ConfigValidationError,
)
from .utils import (
    compute_config_hash,
    generate_run_id,
    derive_seed_sequence,
    derive_rng,
    ensure_directory,
    PROCESS_NOISE_STREAM,
    CORRUPTION_STREAM,
    INSTANCE_STREAM,
)

__all__ = [
    # Configuration
    'config',
    'ConfigLoader',
    'PROJECT_ROOT',

    # Logging
    'logger',
    'get_logger',
    'run_log',

    # Errors
    'NetworkIdentificationError',
    'InvalidModelError',
    'DimensionMismatchError',
    'SingularEvaluationError',
    'UnstableSystemError',
    'NoStationarySolutionError',
    'TruncationError',
    'SingularSpectrumError',
    'EnumerationCapError',
    'ConfigValidationError',

    # Utilities
    'compute_config_hash',
    'generate_run_id',
    'derive_seed_sequence',
    'derive_rng',
    'ensure_directory',
    'PROCESS_NOISE_STREAM',
    'CORRUPTION_STREAM',
    'INSTANCE_STREAM',
]
