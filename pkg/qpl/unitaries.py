# Builtin gates and resolution of unitary references

import math
from typing import Callable, Dict, Tuple

import numpy as np

from linalg.matrix import freeze, is_unitary
from qpl.ast import UnitaryRef
from utils.errors import ElaborationError

# Largest register the parametrized gates accept
MAX_QUBITS = 5

_SQRT_HALF = 1 / math.sqrt(2)

GATES: Dict[str, np.ndarray] = {
    "H": freeze(np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=np.complex128)),
    "X": freeze(np.array([[0, 1], [1, 0]], dtype=np.complex128)),
    "Y": freeze(np.array([[0, -1j], [1j, 0]], dtype=np.complex128)),
    "Z": freeze(np.array([[1, 0], [0, -1]], dtype=np.complex128)),
    "CNOT": freeze(np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                             dtype=np.complex128)),
}

# Parametrized gates and their parameter counts
PARAMETRIZED = {"IAM": 1, "Oracle": 2, "GroverG": 2}

RESERVED = frozenset(GATES) | frozenset(PARAMETRIZED)


def _check_register(n: int) -> int:
    if not 1 <= n <= MAX_QUBITS:
        raise ElaborationError(f"register size must be between 1 and {MAX_QUBITS}, got {n}")
    return 2 ** n


def inversion_about_mean(n: int) -> np.ndarray:
    """2/N sum_ij |i><j| - I on n qubits."""
    size = _check_register(n)
    return freeze(np.full((size, size), 2.0 / size, dtype=np.complex128) - np.eye(size))


def oracle(n: int, s: int) -> np.ndarray:
    """Phase oracle I - 2|s><s| marking basis state s."""
    size = _check_register(n)
    if not 0 <= s < size:
        raise ElaborationError(f"marked state {s} is outside 0..{size - 1}")
    diag = np.ones(size, dtype=np.complex128)
    diag[s] = -1.0
    return freeze(np.diag(diag))


def grover_operator(n: int, s: int) -> np.ndarray:
    """Oracle followed by inversion about the mean."""
    return freeze(inversion_about_mean(n) @ oracle(n, s))


def grover_iterations(n: int) -> int:
    """
    round(arccos(1/sqrt(N)) / θ) with sin θ = 2 sqrt(N-1) / N: the number of
    rotations by θ carrying the uniform superposition closest to the marked state.
    """
    size = 2 ** n
    theta = math.asin(2 * math.sqrt(size - 1) / size)
    return int(round(math.acos(1 / math.sqrt(size)) / theta))


_BUILDERS: Dict[str, Callable[..., np.ndarray]] = {
    "IAM": inversion_about_mean,
    "Oracle": oracle,
    "GroverG": grover_operator,
}


def resolve(ref: UnitaryRef) -> Tuple[np.ndarray, int]:
    """
    Matrix of a unitary reference and the number of qubits it acts on.

    Raises:
        ElaborationError: Unknown gate, wrong parameters, or a literal that is
            not a unitary on whole qubits
    """
    if ref.matrix is not None:
        try:
            u = np.array(ref.matrix, dtype=np.complex128)
        except ValueError as e:
            raise ElaborationError(f"ragged matrix literal: {e}") from e
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ElaborationError(f"matrix literal must be square, got shape {u.shape}")
        qubits = u.shape[0].bit_length() - 1
        if u.shape[0] < 2 or 2 ** qubits != u.shape[0]:
            raise ElaborationError(f"matrix literal size {u.shape[0]} is not a power of two")
        if not is_unitary(u):
            raise ElaborationError("matrix literal is not unitary within 1e-9")
        return freeze(u), qubits
    if ref.name in GATES:
        if ref.params:
            raise ElaborationError(f"gate {ref.name} takes no parameters")
        u = GATES[ref.name]
        return u, u.shape[0].bit_length() - 1
    if ref.name in PARAMETRIZED:
        if len(ref.params) != PARAMETRIZED[ref.name]:
            raise ElaborationError(f"gate {ref.name} takes {PARAMETRIZED[ref.name]} parameters")
        return _BUILDERS[ref.name](*ref.params), ref.params[0]
    raise ElaborationError(f"unknown gate {ref.name!r}")
