# Linear algebra core module initialization
from .matrix import (
    EigenResult,
    adjoint,
    add,
    as_matrix,
    basis_vector,
    direct_sum_embed,
    freeze,
    herm_eigen,
    herm_eigenvalues,
    identity,
    is_hermitian,
    is_psd,
    is_unitary,
    ket_bra,
    loewner_leq,
    max_norm,
    multiply,
    scale,
    tensor,
    trace,
    zeros,
)

__all__ = [
    'EigenResult',
    'adjoint',
    'add',
    'as_matrix',
    'basis_vector',
    'direct_sum_embed',
    'freeze',
    'herm_eigen',
    'herm_eigenvalues',
    'identity',
    'is_hermitian',
    'is_psd',
    'is_unitary',
    'ket_bra',
    'loewner_leq',
    'max_norm',
    'multiply',
    'scale',
    'tensor',
    'trace',
    'zeros',
]
