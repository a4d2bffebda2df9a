# Dense complex matrices: arithmetic, Hermitian eigendecomposition, positivity, Löwner order
#
# Matrices are numpy complex128 arrays marked read-only. Every operation returns
# a fresh array; no function mutates its arguments.

from typing import NamedTuple, Sequence

import numpy as np

from config.settings import HERM_TOL, PSD_TOL
from utils.errors import DimensionMismatch, InvalidMatrix, NotHermitian, NotSquare


class EigenResult(NamedTuple):
    """Ascending eigenvalues and the unitary whose columns are the eigenvectors."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _require_matrix(a: np.ndarray) -> np.ndarray:
    if not isinstance(a, np.ndarray) or a.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got {type(a).__name__} "
                            f"with shape {getattr(a, 'shape', None)}")
    return a


def _require_square(a: np.ndarray) -> np.ndarray:
    _require_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"matrix is {a.shape[0]}x{a.shape[1]}, expected square")
    return a


def as_matrix(data) -> np.ndarray:
    """
    Validate and freeze matrix data.

    Args:
        data: Nested sequence or array of numbers

    Returns:
        Read-only complex128 array with at least one row and column

    Raises:
        InvalidMatrix: Wrong rank, empty, or non-finite entries
    """
    try:
        a = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvalidMatrix(f"not a numeric matrix: {e}") from e
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidMatrix(f"expected a nonempty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has NaN or infinite entries")
    return freeze(a)


def identity(d: int) -> np.ndarray:
    return freeze(np.eye(d, dtype=np.complex128))


def zeros(rows: int, cols: int) -> np.ndarray:
    return freeze(np.zeros((rows, cols), dtype=np.complex128))


def basis_vector(d: int, k: int) -> np.ndarray:
    """Column vector |k> in C^d."""
    v = np.zeros((d, 1), dtype=np.complex128)
    v[k, 0] = 1.0
    return freeze(v)


def ket_bra(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """|u><v| for column vectors (1-D input is treated as a column)."""
    u = np.asarray(u, dtype=np.complex128).reshape(-1, 1)
    v = np.asarray(v, dtype=np.complex128).reshape(-1, 1)
    return freeze(u @ v.conj().T)


def adjoint(a: np.ndarray) -> np.ndarray:
    _require_matrix(a)
    return freeze(np.ascontiguousarray(a.conj().T))


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require_matrix(a)
    _require_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return freeze(a @ b)


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require_matrix(a)
    _require_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return freeze(a + b)


def scale(c: complex, a: np.ndarray) -> np.ndarray:
    _require_matrix(a)
    if not np.isfinite(c):
        raise InvalidMatrix("scale factor must be finite")
    return freeze(complex(c) * a)


def trace(a: np.ndarray) -> complex:
    _require_square(a)
    return complex(np.trace(a))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; a is the more significant factor."""
    _require_matrix(a)
    _require_matrix(b)
    return freeze(np.kron(a, b))


def direct_sum_embed(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """
    Block-diagonal matrix with the given square blocks in order.

    Raises:
        NotSquare: If any block is rectangular
        InvalidMatrix: If no blocks are given
    """
    if len(blocks) == 0:
        raise InvalidMatrix("direct sum of no blocks")
    for block in blocks:
        _require_square(block)
    n = sum(block.shape[0] for block in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    offset = 0
    for block in blocks:
        d = block.shape[0]
        out[offset:offset + d, offset:offset + d] = block
        offset += d
    return freeze(out)


def max_norm(a: np.ndarray) -> float:
    """Largest absolute entry."""
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def is_hermitian(a: np.ndarray, tol: float = HERM_TOL) -> bool:
    _require_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return max_norm(a - a.conj().T) <= tol


def _require_hermitian(a: np.ndarray, herm_tol: float) -> np.ndarray:
    _require_square(a)
    asym = max_norm(a - a.conj().T)
    if asym > herm_tol:
        raise NotHermitian(f"matrix deviates from its adjoint by {asym:.3e} (tolerance {herm_tol:.1e})")
    return a


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    _require_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return max_norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def herm_eigen(a: np.ndarray, herm_tol: float = HERM_TOL) -> EigenResult:
    """
    Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (A + A†)/2 first, so roundoff asymmetry never
    produces complex eigenvalues.

    Args:
        a: Square matrix, Hermitian within herm_tol
        herm_tol: Max-norm tolerance on A - A†

    Returns:
        EigenResult with ascending eigenvalues

    Raises:
        NotSquare: If a is rectangular
        NotHermitian: If a is not Hermitian within herm_tol
    """
    _require_hermitian(a, herm_tol)
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return EigenResult(freeze(w), freeze(v))


def herm_eigenvalues(a: np.ndarray, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Ascending eigenvalues only (same checks as herm_eigen)."""
    _require_hermitian(a, herm_tol)
    return freeze(np.linalg.eigvalsh((a + a.conj().T) / 2))


def is_psd(a: np.ndarray, tol: float = PSD_TOL, herm_tol: float = HERM_TOL) -> bool:
    """True iff the smallest eigenvalue is at least -tol."""
    return bool(herm_eigenvalues(a, herm_tol)[0] >= -tol)


def loewner_leq(m: np.ndarray, n: np.ndarray, tol: float = PSD_TOL,
                herm_tol: float = HERM_TOL) -> bool:
    """
    Löwner order M ≼ N, i.e. N - M is positive semidefinite.

    Raises:
        DimensionMismatch: If the shapes differ
        NotHermitian: If either argument is not Hermitian
    """
    _require_square(m)
    _require_square(n)
    if m.shape != n.shape:
        raise DimensionMismatch(f"cannot compare {m.shape} with {n.shape}")
    _require_hermitian(m, herm_tol)
    _require_hermitian(n, herm_tol)
    diff = n - m
    return bool(np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0] >= -tol)
