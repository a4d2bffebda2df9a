# Loops and recursion: monoidal trace and least fixed points
#
# Both are limits of increasing sequences of superoperators. Partial sums of
# the monoidal trace are kept as transfer matrices; recursion iterates are
# kept in Kraus form because the body is an arbitrary program functional.

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np

from config.settings import MAX_ITER, PSD_TOL, TRUNCATION_TOL
from quantum.domain import Signature, Superoperator, choi_matrix
from quantum.representations import LinearBlocks, choi_distance, superop_sum
from utils.errors import NonConvergent, NonMonotone, SignatureMismatch
from wp.engine import seq_compose

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LoopDecomposition:
    """
    A superoperator on σ⊕τ -> σ'⊕τ whose τ entries are fed back.

    feedback_in and feedback_out list the input and output entries forming τ,
    paired in order; the remaining entries form σ and σ'.
    """
    superop: Superoperator
    feedback_in: Tuple[int, ...]
    feedback_out: Tuple[int, ...]

    def __post_init__(self):
        f = self.superop
        object.__setattr__(self, "feedback_in", tuple(self.feedback_in))
        object.__setattr__(self, "feedback_out", tuple(self.feedback_out))
        if len(self.feedback_in) != len(self.feedback_out):
            raise SignatureMismatch("feedback entries must pair inputs with outputs")
        if len(set(self.feedback_in)) != len(self.feedback_in) or \
                len(set(self.feedback_out)) != len(self.feedback_out):
            raise SignatureMismatch("feedback entries must be distinct")
        if any(not 0 <= i < len(f.in_sig) for i in self.feedback_in) or \
                any(not 0 <= j < len(f.out_sig) for j in self.feedback_out):
            raise SignatureMismatch("feedback entry out of range")
        for i, j in zip(self.feedback_in, self.feedback_out):
            if f.in_sig[i] != f.out_sig[j]:
                raise SignatureMismatch(f"feedback input {i} has dimension {f.in_sig[i]}, "
                                        f"output {j} has {f.out_sig[j]}")
        if len(self.outer_in) == 0 or len(self.outer_out) == 0:
            raise SignatureMismatch("a loop needs at least one outer input and output entry")

    @property
    def outer_in(self) -> Tuple[int, ...]:
        return tuple(i for i in range(len(self.superop.in_sig)) if i not in self.feedback_in)

    @property
    def outer_out(self) -> Tuple[int, ...]:
        return tuple(j for j in range(len(self.superop.out_sig)) if j not in self.feedback_out)

    def part(self, rows: Sequence[int], cols: Sequence[int]) -> Superoperator:
        """Sub-superoperator from the input entries cols to the output entries rows."""
        f = self.superop
        return Superoperator(Signature(dims=tuple(f.in_sig[i] for i in cols)),
                             Signature(dims=tuple(f.out_sig[j] for j in rows)),
                             tuple(tuple(f.blocks[j][i] for i in cols) for j in rows))

    def components(self) -> Tuple[Superoperator, Superoperator, Superoperator, Superoperator]:
        """(E11: σ->σ', E12: σ->τ, E21: τ->σ', E22: τ->τ)"""
        return (self.part(self.outer_out, self.outer_in),
                self.part(self.feedback_out, self.outer_in),
                self.part(self.outer_out, self.feedback_in),
                self.part(self.feedback_out, self.feedback_in))


def _partial_sums(loop: LoopDecomposition) -> Iterator[Tuple[LinearBlocks, LinearBlocks, LinearBlocks]]:
    """Yield (S_k, increment_k, pending_k); S_0 = E11 and S_{k+1} = S_k + E21 E22^k E12."""
    linear = LinearBlocks.of(loop.superop)
    t11 = linear.select(loop.outer_out, loop.outer_in)
    t12 = linear.select(loop.feedback_out, loop.outer_in)
    t21 = linear.select(loop.outer_out, loop.feedback_in)
    t22 = linear.select(loop.feedback_out, loop.feedback_in)
    total = t11
    pending = t12
    yield total, t11, pending
    while True:
        increment = pending.then(t21)
        total = total + increment
        pending = pending.then(t22)
        yield total, increment, pending


def iterate_monoidal_trace(loop: LoopDecomposition) -> Iterator[Superoperator]:
    """Partial sums S_0, S_1, ... of the monoidal trace, in Kraus form."""
    for total, _, _ in _partial_sums(loop):
        yield total.to_superop()


def truncated_monoidal_trace(loop: LoopDecomposition, depth: int) -> Superoperator:
    """E11 + sum_{i < depth} E21 E22^i E12 (depth 0 is E11 alone)."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    for k, (total, _, _) in enumerate(_partial_sums(loop)):
        if k == depth:
            return total.to_superop()
    raise AssertionError("unreachable")


def monoidal_trace(loop: LoopDecomposition, tol: float = TRUNCATION_TOL,
                   max_iter: int = MAX_ITER) -> Superoperator:
    """
    Feedback of the τ entries: Tr(E) = E11 + sum_i E21 E22^i E12.

    The sum stops once an increment is at most tol in Choi max-norm and
    either the pending term E22^i E12 is itself below tol or increments have
    stayed below tol for as many steps as τ has transfer dimensions, after
    which every later increment is a combination of those already seen.

    Args:
        loop: Decomposed superoperator
        tol: Truncation tolerance, positive
        max_iter: Largest number of summed terms

    Returns:
        Superoperator σ -> σ'

    Raises:
        NonConvergent: If max_iter terms are summed without meeting the criterion
    """
    if not tol > 0:
        raise ValueError("truncation tolerance must be positive")
    span = sum(loop.superop.in_sig[i] ** 2 for i in loop.feedback_in)
    quiet = 0
    increment_norm = 0.0
    for k, (total, increment, pending) in enumerate(_partial_sums(loop)):
        if k == 0:
            continue
        increment_norm = increment.max_norm()
        quiet = quiet + 1 if increment_norm <= tol else 0
        logger.debug("monoidal trace step %d: increment %.3e", k, increment_norm)
        if increment_norm <= tol and (pending.max_norm() <= tol or quiet >= span):
            logger.info("monoidal trace converged after %d steps (increment %.3e)", k, increment_norm)
            return total.to_superop()
        if k >= max_iter:
            break
    raise NonConvergent(f"monoidal trace did not converge in {max_iter} steps "
                        f"(last increment {increment_norm:.3e}, tolerance {tol:.1e})")


def unroll_loop(loop: LoopDecomposition, depth: int) -> Superoperator:
    """
    The depth-step unrolling built by Kraus composition: E11 plus every path
    that re-enters the loop body fewer than depth times.
    """
    e11, e12, e21, e22 = loop.components()
    total = e11
    path = e12
    for _ in range(depth):
        total = superop_sum(total, seq_compose(path, e21))
        path = seq_compose(path, e22)
    return total


@dataclass(frozen=True)
class RecursiveSpec:
    """
    A recursive definition: body plugs a superoperator into the hole and
    returns the superoperator of the whole definition.
    """
    body: Callable[[Superoperator], Superoperator]
    hole_in_sig: Signature
    hole_out_sig: Signature


def _check_monotone(previous: Superoperator, current: Superoperator, step: int, tol: float) -> None:
    for j, (row_p, row_c) in enumerate(zip(previous.blocks, current.blocks)):
        for i, (cp, cc) in enumerate(zip(row_p, row_c)):
            diff = choi_matrix(cc) - choi_matrix(cp)
            low = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0])
            if low < -tol:
                raise NonMonotone(f"recursion iterate {step} decreases in block [{j}][{i}] "
                                  f"(Choi eigenvalue {low:.3e})")


def iterate_fixpoint(spec: RecursiveSpec, check_monotone: bool = True,
                     monotone_tol: float = PSD_TOL) -> Iterator[Superoperator]:
    """
    Kleene iterates F_0 = 0, F_{i+1} = body(F_i).

    Raises:
        SignatureMismatch: If the body changes the hole's signature
        NonMonotone: If an iterate drops below its predecessor
    """
    current = Superoperator.zero(spec.hole_in_sig, spec.hole_out_sig)
    yield current
    step = 0
    while True:
        step += 1
        following = spec.body(current)
        if following.in_sig != spec.hole_in_sig or following.out_sig != spec.hole_out_sig:
            raise SignatureMismatch(
                f"recursive body maps {following.in_sig}->{following.out_sig}, "
                f"hole is {spec.hole_in_sig}->{spec.hole_out_sig}")
        if check_monotone:
            _check_monotone(current, following, step, monotone_tol)
        current = following
        yield current


def recursive_fixpoint(spec: RecursiveSpec, tol: float = TRUNCATION_TOL,
                       max_iter: int = MAX_ITER, monotone_tol: float = PSD_TOL) -> Superoperator:
    """
    Least fixed point of the recursive body.

    Returns the first iterate whose blockwise Choi matrices differ from the
    previous iterate by at most tol.

    Raises:
        NonConvergent: If max_iter iterations pass without settling
        NonMonotone: If an iterate decreases in the transformer order beyond monotone_tol
    """
    if not tol > 0:
        raise ValueError("truncation tolerance must be positive")
    previous: Optional[Superoperator] = None
    change = float("inf")
    for step, current in enumerate(iterate_fixpoint(spec, monotone_tol=monotone_tol)):
        if previous is not None:
            change = choi_distance(previous, current)
            logger.debug("fixpoint iteration %d: change %.3e", step, change)
            if change <= tol:
                logger.info("recursion converged after %d iterations (change %.3e)", step, change)
                return current
        if step >= max_iter:
            break
        previous = current
    raise NonConvergent(f"recursion did not converge in {max_iter} iterations "
                        f"(last change {change:.3e}, tolerance {tol:.1e})")
