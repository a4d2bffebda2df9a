# Alternative channel representations: transfer matrices, Choi matrices, canonical Kraus form
#
# Kraus lists are not unique, so channels are compared through their Choi
# matrices. Infinite sums (loops and recursion) are accumulated as transfer
# matrices, which add and compose as plain matrices, and turned back into
# Kraus form at the end.

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from config.settings import PSD_TOL
from linalg.matrix import freeze, max_norm
from quantum.domain import KrausChannel, Signature, Superoperator, choi_matrix
from utils.errors import DimensionMismatch, OutOfRange, SignatureMismatch

logger = logging.getLogger(__name__)

# Choi eigenvalues below this (relative to the largest) are roundoff
_RANK_CUTOFF = 1e-13


def transfer_matrix(c: KrausChannel) -> np.ndarray:
    """
    Matrix of the channel acting on row-major vectorized inputs.

    vec(E rho E†) = (E ⊗ conj(E)) vec(rho), so the result is
    (out_dim² x in_dim²).
    """
    t = np.zeros((c.out_dim ** 2, c.in_dim ** 2), dtype=np.complex128)
    for e in c.kraus:
        t += np.kron(e, e.conj())
    return freeze(t)


def choi_from_transfer(t: np.ndarray, in_dim: int, out_dim: int) -> np.ndarray:
    """Reshuffle a transfer matrix into the Choi layout used by choi_matrix."""
    if t.shape != (out_dim ** 2, in_dim ** 2):
        raise DimensionMismatch(f"transfer matrix {t.shape} does not map {in_dim}->{out_dim}")
    n = in_dim * out_dim
    return freeze(np.ascontiguousarray(
        t.reshape(out_dim, out_dim, in_dim, in_dim).transpose(2, 0, 3, 1).reshape(n, n)))


def channel_from_choi(choi: np.ndarray, in_dim: int, out_dim: int) -> KrausChannel:
    """
    Canonical Kraus form from a Choi matrix.

    Each eigenpair (λ, v) with λ above the rank cutoff contributes
    sqrt(λ)·v reshaped into an operator. Negative eigenvalues are roundoff
    of a positive Choi matrix and are dropped.

    Args:
        choi: (in_dim·out_dim)-square Hermitian matrix
        in_dim: Input dimension of the channel
        out_dim: Output dimension of the channel

    Returns:
        KrausChannel with at most in_dim·out_dim terms
    """
    n = in_dim * out_dim
    if choi.shape != (n, n):
        raise DimensionMismatch(f"Choi matrix {choi.shape} does not match {in_dim}->{out_dim}")
    w, v = np.linalg.eigh((choi + choi.conj().T) / 2)
    if w.size == 0 or w[-1] <= 0:
        return KrausChannel.zero(in_dim, out_dim)
    cutoff = _RANK_CUTOFF * max(1.0, float(w[-1]))
    ops = []
    for lam, vec in zip(w[::-1], v.T[::-1]):
        if lam <= cutoff:
            break
        ops.append(np.sqrt(lam) * vec.reshape(in_dim, out_dim).T)
    return KrausChannel(in_dim, out_dim, tuple(ops))


def compress(c: KrausChannel, force: bool = False) -> KrausChannel:
    """
    Replace a long Kraus list by the canonical one with the same action.

    Channels with at most in_dim·out_dim terms are returned unchanged unless
    force is set.
    """
    if c.is_zero or (not force and len(c) <= c.in_dim * c.out_dim):
        return c
    out = channel_from_choi(choi_matrix(c), c.in_dim, c.out_dim)
    logger.debug("compressed %d Kraus terms to %d (%d->%d)", len(c), len(out), c.in_dim, c.out_dim)
    return out


def superop_sum(f: Superoperator, g: Superoperator) -> Superoperator:
    """Blockwise sum of two superoperators; the caller keeps the result trace-nonincreasing."""
    if f.in_sig != g.in_sig or f.out_sig != g.out_sig:
        raise SignatureMismatch(
            f"cannot add {f.in_sig}->{f.out_sig} and {g.in_sig}->{g.out_sig}")
    blocks = tuple(
        tuple(compress(KrausChannel(a.in_dim, a.out_dim, a.kraus + b.kraus))
              for a, b in zip(row_f, row_g))
        for row_f, row_g in zip(f.blocks, g.blocks))
    return Superoperator(f.in_sig, f.out_sig, blocks)


def scale_superop(p: float, f: Superoperator) -> Superoperator:
    """p·F for p in [0, 1]; every Kraus operator is scaled by sqrt(p)."""
    if not (0.0 <= p <= 1.0):
        raise OutOfRange(f"scale factor must lie in [0, 1], got {p}")
    root = np.sqrt(p)
    blocks = tuple(
        tuple(KrausChannel(c.in_dim, c.out_dim, tuple(root * e for e in c.kraus) if p > 0 else ())
              for c in row)
        for row in f.blocks)
    return Superoperator(f.in_sig, f.out_sig, blocks)


def choi_distance(f: Superoperator, g: Superoperator) -> float:
    """Largest entry of any blockwise Choi difference."""
    if f.in_sig != g.in_sig or f.out_sig != g.out_sig:
        raise SignatureMismatch(
            f"cannot compare {f.in_sig}->{f.out_sig} with {g.in_sig}->{g.out_sig}")
    return max(
        max_norm(choi_matrix(a) - choi_matrix(b))
        for row_f, row_g in zip(f.blocks, g.blocks)
        for a, b in zip(row_f, row_g))


def superop_equivalent(f: Superoperator, g: Superoperator, tol: float = PSD_TOL) -> bool:
    """Extensional equality: same signatures and Choi matrices within tol."""
    if f.in_sig != g.in_sig or f.out_sig != g.out_sig:
        return False
    return choi_distance(f, g) <= tol


@dataclass(frozen=True, eq=False)
class LinearBlocks:
    """
    A superoperator as blocks of transfer matrices, blocks[j][i] acting on
    vectorized entry i and producing vectorized entry j.

    Choi matrices are reshuffles of transfer matrices, so max-norms agree.
    """
    in_sig: Signature
    out_sig: Signature
    blocks: Tuple[Tuple[np.ndarray, ...], ...]

    @classmethod
    def of(cls, f: Superoperator) -> "LinearBlocks":
        return cls(f.in_sig, f.out_sig,
                   tuple(tuple(transfer_matrix(c) for c in row) for row in f.blocks))

    @classmethod
    def zero(cls, in_sig: Signature, out_sig: Signature) -> "LinearBlocks":
        return cls(in_sig, out_sig, tuple(
            tuple(np.zeros((dj * dj, di * di), dtype=np.complex128) for di in in_sig)
            for dj in out_sig))

    def select(self, rows: Sequence[int], cols: Sequence[int]) -> "LinearBlocks":
        """Sub-blocks for the given output (rows) and input (cols) entries."""
        return LinearBlocks(
            Signature(dims=tuple(self.in_sig[i] for i in cols)),
            Signature(dims=tuple(self.out_sig[j] for j in rows)),
            tuple(tuple(self.blocks[j][i] for i in cols) for j in rows))

    def then(self, other: "LinearBlocks") -> "LinearBlocks":
        """Forward composition: apply self, then other."""
        if self.out_sig != other.in_sig:
            raise SignatureMismatch(f"cannot compose {self.out_sig} into {other.in_sig}")
        blocks = []
        for k, dk in enumerate(other.out_sig):
            row = []
            for i, di in enumerate(self.in_sig):
                acc = np.zeros((dk * dk, di * di), dtype=np.complex128)
                for j in range(len(self.out_sig)):
                    acc += other.blocks[k][j] @ self.blocks[j][i]
                row.append(acc)
            blocks.append(tuple(row))
        return LinearBlocks(self.in_sig, other.out_sig, tuple(blocks))

    def __add__(self, other: "LinearBlocks") -> "LinearBlocks":
        if self.in_sig != other.in_sig or self.out_sig != other.out_sig:
            raise SignatureMismatch("cannot add linear blocks of different signatures")
        return LinearBlocks(self.in_sig, self.out_sig, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.blocks, other.blocks)))

    def max_norm(self) -> float:
        return max((max_norm(b) for row in self.blocks for b in row), default=0.0)

    def choi_blocks(self) -> Tuple[Tuple[np.ndarray, ...], ...]:
        return tuple(
            tuple(choi_from_transfer(b, di, dj) for di, b in zip(self.in_sig, row))
            for dj, row in zip(self.out_sig, self.blocks))

    def to_superop(self) -> Superoperator:
        """Back to Kraus form through each block's Choi matrix."""
        blocks = tuple(
            tuple(channel_from_choi(choi_from_transfer(b, di, dj), di, dj)
                  for di, b in zip(self.in_sig, row))
            for dj, row in zip(self.out_sig, self.blocks))
        return Superoperator(self.in_sig, self.out_sig, blocks)
