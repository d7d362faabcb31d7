"""Utility functions for the Perturbed Network Identification toolkit."""
import hashlib
import json
from pathlib import Path
from typing import Any, Dict

import numpy as np


# Stream identifiers for seed derivation
PROCESS_NOISE_STREAM = 0
CORRUPTION_STREAM = 1
INSTANCE_STREAM = 2


def compute_config_hash(document: Dict[str, Any]) -> str:
    """SHA256 of the canonical JSON form of a configuration mapping."""
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def generate_run_id(config_hash: str) -> str:
    """
    Generate a run ID that is a pure function of the configuration.
    Format: RUN_XXXXXXXXXX
    Example: RUN_3FA94C0B21
    """
    return f"RUN_{config_hash[:10].upper()}"


def derive_seed_sequence(master_seed: int, stream: int, trial: int = 0, node: int = 0) -> np.random.SeedSequence:
    """Counter-based sub-seed derivation.

    The child sequence is ``SeedSequence(master_seed, spawn_key=(stream, trial, node))``,
    so every (stream, trial, node) triple gets an independent generator that
    does not depend on how trials are scheduled across workers.
    """
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(stream), int(trial), int(node)))


def derive_rng(master_seed: int, stream: int, trial: int = 0, node: int = 0) -> np.random.Generator:
    """``numpy.random.Generator`` seeded from :func:`derive_seed_sequence`."""
    return np.random.default_rng(derive_seed_sequence(master_seed, stream, trial, node))


def ensure_directory(directory: str) -> Path:
    """Ensure a directory exists."""
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path
