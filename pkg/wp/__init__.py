# Weakest-precondition engine module initialization
from .engine import (
    PredicateTransformer,
    coproduct,
    duality_check,
    extend_classical_bit,
    extend_quantum_bit,
    is_precondition,
    seq_compose,
    stabilizer_check,
    transformer_leq,
    wp_channel,
    wp_observable,
    wp_super,
)
from .fixpoint import (
    LoopDecomposition,
    RecursiveSpec,
    iterate_fixpoint,
    iterate_monoidal_trace,
    monoidal_trace,
    recursive_fixpoint,
    truncated_monoidal_trace,
    unroll_loop,
)

__all__ = [
    'PredicateTransformer',
    'coproduct',
    'duality_check',
    'extend_classical_bit',
    'extend_quantum_bit',
    'is_precondition',
    'seq_compose',
    'stabilizer_check',
    'transformer_leq',
    'wp_channel',
    'wp_observable',
    'wp_super',
    'LoopDecomposition',
    'RecursiveSpec',
    'iterate_fixpoint',
    'iterate_monoidal_trace',
    'monoidal_trace',
    'recursive_fixpoint',
    'truncated_monoidal_trace',
    'unroll_loop',
]
