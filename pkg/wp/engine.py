# Backward semantics: weakest preconditions, composition laws, transformer order, duality
#
# wp of a Kraus channel is N -> sum_m E_m† N E_m. Composite programs are
# handled blockwise; the adjoint of each factor is applied in turn, and long
# Kraus lists are compressed through the Choi matrix.

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from config.settings import DEFAULT_SEED, DUALITY_TRIALS, EQ_TOL, PSD_TOL
from linalg.matrix import freeze, identity, is_unitary, loewner_leq
from quantum.domain import (KrausChannel, MatrixTuple, ObservableTuple, PredicateTuple,
                            Signature, Superoperator, apply_super, choi_matrix, expectation,
                            validate_observable_entry, validate_predicate_entry,
                            validate_superoperator)
from quantum.protocol import DualityReport, ValidationReport, Violation
from quantum.representations import compress
from quantum.sampling import random_predicate_tuple, random_state
from utils.errors import (DimensionMismatch, InvalidPredicate, NotNormalized, NotUnitary,
                          SignatureMismatch)

logger = logging.getLogger(__name__)


def wp_channel(c: KrausChannel, n: np.ndarray, validate: bool = True,
               tol: float = PSD_TOL) -> np.ndarray:
    """
    Weakest precondition of a single channel: sum_m E_m† N E_m.

    Args:
        c: Kraus channel in_dim -> out_dim
        n: Postcondition, out_dim x out_dim
        validate: Reject postconditions that are not predicates
        tol: Eigenvalue tolerance for the predicate check

    Returns:
        in_dim x in_dim precondition

    Raises:
        DimensionMismatch: If n is not out_dim-square
        InvalidPredicate: If validate is set and n is not a predicate
    """
    n = np.asarray(n)
    if n.shape != (c.out_dim, c.out_dim):
        raise DimensionMismatch(f"postcondition is {n.shape}, channel output is {c.out_dim}x{c.out_dim}")
    if validate:
        report = validate_predicate_entry(n, tol=tol)
        if not report.valid:
            raise InvalidPredicate(report.violations[0].message)
    out = np.zeros((c.in_dim, c.in_dim), dtype=np.complex128)
    for e in c.kraus:
        out += e.conj().T @ n @ e
    return freeze(out)


def _wp_entries(f: Superoperator, post: MatrixTuple) -> Tuple[np.ndarray, ...]:
    if post.sig != f.out_sig:
        raise SignatureMismatch(f"postcondition signature {post.sig} does not match program output {f.out_sig}")
    pre = []
    for i, di in enumerate(f.in_sig):
        acc = np.zeros((di, di), dtype=np.complex128)
        for j, channel in enumerate(row[i] for row in f.blocks):
            if not channel.is_zero:
                acc += wp_channel(channel, post.entries[j], validate=False)
        pre.append(acc)
    return tuple(pre)


def wp_super(f: Superoperator, post: MatrixTuple, validate: bool = True,
             tol: float = PSD_TOL) -> PredicateTuple:
    """
    Weakest precondition of a block superoperator: pre[i] = sum_j wp(block[j][i], post[j]).

    Raises:
        SignatureMismatch: If post is not typed by the output signature
        InvalidPredicate: If validate is set and an entry of post is not a predicate
    """
    if validate:
        for k, entry in enumerate(post.entries):
            report = validate_predicate_entry(entry, tol=tol)
            if not report.valid:
                raise InvalidPredicate(f"postcondition entry {k}: {report.violations[0].message}")
    return PredicateTuple(f.in_sig, _wp_entries(f, post))


def wp_observable(f: Superoperator, obs: MatrixTuple, tol: float = PSD_TOL) -> ObservableTuple:
    """
    wp applied to a tuple of observables (Hermitian, spectrum in [-1, 1]).

    wp is linear, so stabilizer generators can be pushed backwards like predicates.
    """
    for k, entry in enumerate(obs.entries):
        report = validate_observable_entry(entry, tol=tol)
        if not report.valid:
            raise InvalidPredicate(f"observable entry {k}: {report.violations[0].message}")
    return ObservableTuple(f.in_sig, _wp_entries(f, obs))


@dataclass(frozen=True, eq=False)
class PredicateTransformer:
    """
    The backward reading of a superoperator.

    in_sig types postconditions (program output), out_sig preconditions
    (program input).
    """
    superop: Superoperator

    @classmethod
    def of(cls, f: Superoperator) -> "PredicateTransformer":
        return cls(f)

    @classmethod
    def zero(cls, post_sig: Signature, pre_sig: Signature) -> "PredicateTransformer":
        return cls(Superoperator.zero(pre_sig, post_sig))

    @property
    def in_sig(self) -> Signature:
        return self.superop.out_sig

    @property
    def out_sig(self) -> Signature:
        return self.superop.in_sig

    @property
    def blocks(self) -> Tuple[Tuple[KrausChannel, ...], ...]:
        """Adjoint Kraus channels, blocks[i][j] taking postcondition entry j to precondition entry i."""
        return tuple(
            tuple(KrausChannel(c.out_dim, c.in_dim, tuple(e.conj().T for e in c.kraus))
                  for c in (row[i] for row in self.superop.blocks))
            for i in range(len(self.superop.in_sig)))

    def healthy(self, tol: float = PSD_TOL) -> ValidationReport:
        """sum A A† over the adjoint operators is at most I, per precondition entry."""
        return validate_superoperator(self.superop, tol=tol)

    def __call__(self, post: MatrixTuple) -> PredicateTuple:
        return wp_super(self.superop, post)


def is_precondition(m: MatrixTuple, f: Superoperator, n: MatrixTuple, tol: float = PSD_TOL) -> bool:
    """M is a precondition of N under F iff M ≼ wp(F)(N) entrywise."""
    if m.sig != f.in_sig:
        raise SignatureMismatch(f"precondition signature {m.sig} does not match program input {f.in_sig}")
    pre = wp_super(f, n, validate=False)
    return all(loewner_leq(a, b, tol=tol) for a, b in zip(m.entries, pre.entries))


def seq_compose(f: Superoperator, g: Superoperator) -> Superoperator:
    """
    Forward composition: run F, then G.

    Block [k][i] collects G_b·F_a over every intermediate entry j and every
    pair of Kraus terms from block G[k][j] and block F[j][i].

    Raises:
        SignatureMismatch: If F's output signature differs from G's input
    """
    if f.out_sig != g.in_sig:
        raise SignatureMismatch(f"cannot compose {f.in_sig}->{f.out_sig} with {g.in_sig}->{g.out_sig}")
    blocks = []
    for k, dk in enumerate(g.out_sig):
        row = []
        for i, di in enumerate(f.in_sig):
            ops: List[np.ndarray] = []
            for j in range(len(f.out_sig)):
                first, second = f.blocks[j][i], g.blocks[k][j]
                ops.extend(b @ a for b in second.kraus for a in first.kraus)
            row.append(compress(KrausChannel(di, dk, tuple(ops))))
        blocks.append(tuple(row))
    return Superoperator(f.in_sig, g.out_sig, tuple(blocks))


def coproduct(f: Superoperator, g: Superoperator) -> Superoperator:
    """F ⊕ G on concatenated signatures; the off-diagonal blocks are zero maps."""
    in_sig = f.in_sig.concat(g.in_sig)
    out_sig = f.out_sig.concat(g.out_sig)
    nf_in, nf_out = len(f.in_sig), len(f.out_sig)
    blocks = []
    for j, dj in enumerate(out_sig):
        row = []
        for i, di in enumerate(in_sig):
            if j < nf_out and i < nf_in:
                row.append(f.blocks[j][i])
            elif j >= nf_out and i >= nf_in:
                row.append(g.blocks[j - nf_out][i - nf_in])
            else:
                row.append(KrausChannel.zero(di, dj))
        blocks.append(tuple(row))
    return Superoperator(in_sig, out_sig, tuple(blocks))


def extend_classical_bit(f: Superoperator) -> Superoperator:
    """Run F unchanged on both values of a fresh classical bit: F ⊕ F."""
    return coproduct(f, f)


def extend_quantum_bit(f: Superoperator) -> Superoperator:
    """Add an idle qubit as the most significant factor: every E becomes I₂ ⊗ E."""
    i2 = identity(2)
    blocks = tuple(
        tuple(KrausChannel(2 * c.in_dim, 2 * c.out_dim, tuple(np.kron(i2, e) for e in c.kraus))
              for c in row)
        for row in f.blocks)
    return Superoperator(Signature(dims=tuple(2 * d for d in f.in_sig)),
                         Signature(dims=tuple(2 * d for d in f.out_sig)), blocks)


def transformer_leq(alpha: PredicateTransformer, beta: PredicateTransformer,
                    tol: float = PSD_TOL) -> bool:
    """
    Order on healthy transformers: beta - alpha must itself be completely positive.

    A map is completely positive iff its adjoint is, so the check runs on the
    blockwise Choi matrices of the forward superoperators.

    Raises:
        SignatureMismatch: If the transformers are typed differently
    """
    a, b = alpha.superop, beta.superop
    if a.in_sig != b.in_sig or a.out_sig != b.out_sig:
        raise SignatureMismatch(
            f"cannot order transformers {alpha.in_sig}->{alpha.out_sig} and {beta.in_sig}->{beta.out_sig}")
    for row_a, row_b in zip(a.blocks, b.blocks):
        for ca, cb in zip(row_a, row_b):
            diff = choi_matrix(cb) - choi_matrix(ca)
            if np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0] < -tol:
                return False
    return True


def duality_check(f: Superoperator, trials: int = DUALITY_TRIALS, seed: Optional[int] = DEFAULT_SEED,
                  tol: float = EQ_TOL) -> DualityReport:
    """
    Sample random (state, predicate) pairs and compare both sides of
    tr(wp(F)(P) s) = tr(P F(s)).

    Args:
        f: Superoperator under test
        trials: Number of sampled pairs, at least 1
        seed: Seed for the sampling generator
        tol: Largest accepted gap

    Returns:
        DualityReport with the largest gap seen
    """
    if trials < 1:
        raise ValueError("duality check needs at least one trial")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        s = random_state(f.in_sig, rng)
        p = random_predicate_tuple(f.out_sig, rng)
        backward = expectation(s, wp_super(f, p, validate=False))
        forward = expectation(apply_super(f, s), p)
        worst = max(worst, abs(backward - forward))
    violations = []
    if worst > tol:
        violations.append(Violation(code="duality_gap",
                                    message=f"wp and forward expectations differ by {worst:.3e}",
                                    witness=worst))
    logger.debug("duality check: %d trials, max residual %.3e", trials, worst)
    return DualityReport(passed=not violations, max_residual=worst, trials=trials, violations=violations)


def stabilizer_check(u: np.ndarray, psi: np.ndarray, tol: float = 1e-9,
                     norm_tol: float = 1e-6) -> bool:
    """
    True iff U stabilizes the pure state |psi>, decided by |tr(U |psi><psi|) - 1| <= tol.

    The norm criterion ||U psi - psi|| <= norm_tol is evaluated as a cross-check;
    a disagreement is logged and the trace criterion wins.

    Raises:
        NotUnitary: If U is not unitary within 1e-9
        NotNormalized: If psi is not a unit vector within 1e-9
    """
    u = np.asarray(u, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1, 1)
    if u.ndim != 2 or not is_unitary(u):
        raise NotUnitary("stabilizer candidate is not unitary")
    if u.shape[1] != psi.shape[0]:
        raise DimensionMismatch(f"unitary is {u.shape}, state has dimension {psi.shape[0]}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-9:
        raise NotNormalized(f"state has norm {norm:.12g}")
    value = complex((psi.conj().T @ u @ psi)[0, 0])
    by_trace = abs(value - 1.0) <= tol
    by_norm = float(np.linalg.norm(u @ psi - psi)) <= norm_tol
    if by_trace != by_norm:
        logger.warning("stabilizer criteria disagree: tr = %s, trace test %s, norm test %s",
                       value, by_trace, by_norm)
    return by_trace
