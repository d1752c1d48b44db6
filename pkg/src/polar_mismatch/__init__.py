"""Mismatched capacity of symmetric binary-input channel pairs under polar
transforms, with a mismatched successive-cancellation decoder."""

from ._kernels import BACKEND
from .capacity import (
    balakirsky_capacity,
    bound_profile,
    delta,
    delta_components,
    general_d_capacity,
    id_oracle,
    mismatched_capacity,
    mismatched_info,
    mutual_information,
    symmetric_capacity,
)
from .channels import (
    Channel,
    SymmetricPair,
    bsc,
    bsc_pair,
    canonicalize,
    load_pair,
    merge_outputs,
    metric_from_channel,
    save_pair,
    validate_pair,
)
from .codec import PolarCodeConfig, polar_encode, sc_decode, select_info_set, simulate_fer
from .errors import AlphabetCapError, NonConvergenceError, PairFormatError
from .polar import enumerate_depth, minus_transform, plus_transform, transform_by_sequence

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AlphabetCapError",
    "Channel",
    "NonConvergenceError",
    "PairFormatError",
    "PolarCodeConfig",
    "SymmetricPair",
    "balakirsky_capacity",
    "bound_profile",
    "bsc",
    "bsc_pair",
    "canonicalize",
    "delta",
    "delta_components",
    "enumerate_depth",
    "general_d_capacity",
    "id_oracle",
    "load_pair",
    "merge_outputs",
    "metric_from_channel",
    "minus_transform",
    "mismatched_capacity",
    "mismatched_info",
    "mutual_information",
    "plus_transform",
    "polar_encode",
    "save_pair",
    "sc_decode",
    "select_info_set",
    "simulate_fer",
    "symmetric_capacity",
    "transform_by_sequence",
    "validate_pair",
]
