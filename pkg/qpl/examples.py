# Canonical example programs with their companion predicates and states

from typing import NamedTuple, Tuple

import numpy as np

from linalg.matrix import basis_vector, ket_bra, tensor
from qpl.ast import Program
from qpl.parser import parse
from qpl.unitaries import GATES, MAX_QUBITS, grover_iterations
from quantum.domain import DensityState, ObservableTuple, PredicateTuple, Signature
from utils.errors import OutOfRange


def _check_grover_params(n: int, s: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise OutOfRange(f"Grover register size must be between 1 and {MAX_QUBITS}, got {n}")
    if not 0 <= s < 2 ** n:
        raise OutOfRange(f"marked state must lie in 0..{2 ** n - 1}, got {s}")


def grover_source(n: int, s: int, prepare: bool = False) -> str:
    """
    Program text for Grover search over n qubits marking s.

    The register q0..q{n-1} (q0 most significant) is an input unless prepare
    is set, in which case it is allocated and put in uniform superposition.
    The final measurements run from q{n-1} up to q0, so the branch index
    equals the measured integer.
    """
    _check_grover_params(n, s)
    names = [f"q{k}" for k in range(n)]
    lines = []
    if prepare:
        lines += [f"new qbit {q} := 0" for q in reversed(names)]
        lines += [f"{q} *= H" for q in names]
    else:
        lines.append(f"input qbit {', '.join(names)}")
    lines.append(f"repeat {grover_iterations(n)} {{")
    lines.append(f"  {', '.join(names)} *= GroverG({n}, {s})")
    lines.append("}")
    lines += [f"measure {q}" for q in reversed(names)]
    return "\n".join(lines) + "\n"


def build_grover(n: int, s: int, prepare: bool = False) -> Program:
    """
    Raises:
        OutOfRange: If n is outside 1..5 or s outside 0..2^n - 1
    """
    return parse(grover_source(n, s, prepare))


def grover_postcondition(n: int, s: int) -> PredicateTuple:
    """|s><s| in every measurement branch: the register holds the marked state."""
    _check_grover_params(n, s)
    size = 2 ** n
    target = ket_bra(basis_vector(size, s), basis_vector(size, s))
    return PredicateTuple(Signature(dims=(size,) * size), (target,) * size)


def uniform_state(n: int) -> DensityState:
    size = 2 ** n
    u = np.full(size, 1 / np.sqrt(size), dtype=np.complex128)
    return DensityState(Signature.of(size), (ket_bra(u, u),))


def coin_source(register_size: int = 1) -> str:
    """A fair coin: a fresh qubit in |+>, measured and discarded, next to an input register."""
    if register_size < 0:
        raise OutOfRange(f"register size must be non-negative, got {register_size}")
    lines = []
    if register_size:
        lines.append("input qbit " + ", ".join(f"r{k}" for k in range(register_size)))
    lines += ["new qbit q := 0", "q *= H", "measure q", "discard q"]
    return "\n".join(lines) + "\n"


def build_coin(register_size: int = 1) -> Program:
    return parse(coin_source(register_size))


def coin_postcondition(register_size: int = 1) -> PredicateTuple:
    """P0 on the first register qubit in the first branch, nothing in the second."""
    d = 2 ** register_size
    p0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    first = np.kron(p0, np.eye(d // 2)) if register_size else np.eye(1)
    return PredicateTuple(Signature.of(d, d), (first, np.zeros((d, d))))


def coin_state(register_size: int = 1) -> DensityState:
    """The register in |0...0>."""
    d = 2 ** register_size
    zero = basis_vector(d, 0)
    return DensityState(Signature.of(d), (ket_bra(zero, zero),))


FLIP_UNTIL_ZERO = """\
new bit b := 1
while b {
  new qbit c := 0
  c *= H
  measure c {
    b := 0
  } else {
    b := 1
  }
  discard c
}
discard b
"""

RECURSIVE_COIN = """\
rec loop {
  new qbit c := 0
  c *= H
  measure c {
    discard c
  } else {
    discard c
    call loop
  }
}
"""

BELL = """\
input qbit a, b
a *= H
a, b *= CNOT
"""


def build_flip_until_zero() -> Program:
    """Flip a fair coin until it shows 0; terminates with probability 1."""
    return parse(FLIP_UNTIL_ZERO)


def build_recursive_coin() -> Program:
    """The same loop written as a recursive block."""
    return parse(RECURSIVE_COIN)


def build_bell() -> Program:
    """Bell-state circuit CNOT·(H ⊗ I), qubit a most significant."""
    return parse(BELL)


class BellStabilizer(NamedTuple):
    unitary: np.ndarray
    generators: Tuple[np.ndarray, np.ndarray]
    expected_wp: Tuple[np.ndarray, np.ndarray]
    bell_state: np.ndarray
    zero_state: np.ndarray


def build_bell_stabilizer() -> BellStabilizer:
    """
    U = CNOT·(H ⊗ I) with stabilizer generators Z⊗Z and X⊗X of the Bell state;
    their weakest preconditions are I⊗Z and Z⊗I, which stabilize |00>.
    """
    h, x, z, cnot = GATES["H"], GATES["X"], GATES["Z"], GATES["CNOT"]
    i2 = np.eye(2, dtype=np.complex128)
    u = cnot @ tensor(h, i2)
    bell = np.array([[1], [0], [0], [1]], dtype=np.complex128) / np.sqrt(2)
    return BellStabilizer(
        unitary=u,
        generators=(tensor(z, z), tensor(x, x)),
        expected_wp=(tensor(i2, z), tensor(z, i2)),
        bell_state=bell,
        zero_state=basis_vector(4, 0),
    )


def bell_observable(generator: np.ndarray) -> ObservableTuple:
    return ObservableTuple(Signature.of(4), (generator,))


def bell_input_state() -> DensityState:
    zero = basis_vector(4, 0)
    return DensityState(Signature.of(4), (ket_bra(zero, zero),))
