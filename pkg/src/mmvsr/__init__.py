"""Support recovery of jointly sparse signals from multiple measurement vectors.

Library layout:

* ``model``: signal/measurement generation and file formats
* ``threshold``: the recovery-rate constant c(W) and closed-form bounds
* ``nets``: covering nets used by the quantized decoder
* ``decoders``: exhaustive least-squares, matched, and net decoders
* ``verify``: executable checks of the supporting matrix facts
* ``experiments``: seeded Monte Carlo phase-transition sweeps
* ``cli``: the ``mmvsr`` command-line front door
"""

from .backend import USING_NUMBA, backend_name
from .decoders import (
    DecodeResult,
    decode_matched,
    decode_ml,
    decode_net,
    estimate_amplitudes,
)
from .errors import (
    BudgetError,
    DecodeError,
    InvalidInputError,
    MMVError,
    NetTooLargeError,
    NumericError,
)
from .experiments import PhaseCurve, PhasePoint, Schedule, compare_smv_mmv, run_phase
from .model import (
    ProblemConfig,
    SignalValueMatrix,
    SparseInstance,
    default_epsilon,
    derive_rng,
    generate_instance,
    sample_support,
    validate_values,
)
from .nets import EpsilonNet, build_net
from .threshold import (
    BoundsRow,
    RateTuple,
    ThresholdReport,
    bounds_table,
    c_of_w,
    identical_columns_bound,
    mac_region_check,
    split_sign_matrix,
    split_sign_threshold,
    sufficient_n,
)

__version__ = "0.1.0"
