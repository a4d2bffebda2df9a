# Quantum domain module initialization
from .domain import (
    DensityState,
    KrausChannel,
    MatrixTuple,
    ObservableTuple,
    PredicateTuple,
    Signature,
    Superoperator,
    apply_channel,
    apply_super,
    choi_matrix,
    expectation,
    satisfies,
    validate_channel,
    validate_observable,
    validate_observable_entry,
    validate_predicate,
    validate_predicate_entry,
    validate_state,
    validate_superoperator,
)
from .protocol import DualityReport, ErrorBody, TripleReport, ValidationReport, Verdict, Violation
from .representations import (
    LinearBlocks,
    channel_from_choi,
    choi_distance,
    compress,
    scale_superop,
    superop_equivalent,
    superop_sum,
    transfer_matrix,
)

__all__ = [
    'DensityState',
    'KrausChannel',
    'MatrixTuple',
    'ObservableTuple',
    'PredicateTuple',
    'Signature',
    'Superoperator',
    'apply_channel',
    'apply_super',
    'choi_matrix',
    'expectation',
    'satisfies',
    'validate_channel',
    'validate_observable',
    'validate_observable_entry',
    'validate_predicate',
    'validate_predicate_entry',
    'validate_state',
    'validate_superoperator',
    'DualityReport',
    'ErrorBody',
    'TripleReport',
    'ValidationReport',
    'Verdict',
    'Violation',
    'LinearBlocks',
    'channel_from_choi',
    'choi_distance',
    'compress',
    'scale_superop',
    'superop_equivalent',
    'superop_sum',
    'transfer_matrix',
]
