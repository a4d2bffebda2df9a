# Signatures, state and predicate tuples, Kraus channels and block superoperators
#
# A superoperator between signatures is stored as blocks of Kraus channels,
# blocks[j][i] mapping input entry i to output entry j; its forward action is
# out_j = sum_i blocks[j][i](rho_i).

import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveInt, field_validator

from config.settings import HERM_TOL, PSD_TOL, THRESHOLD_SLACK, TRACE_TOL
from linalg.matrix import freeze, as_matrix, identity, max_norm, zeros
from quantum.protocol import ValidationReport, Violation
from utils.errors import DimensionMismatch, InvalidThreshold, SignatureMismatch

logger = logging.getLogger(__name__)


class Signature(BaseModel):
    """Ordered dimensions of the entries of a tuple-valued program point."""
    model_config = ConfigDict(frozen=True)

    dims: Tuple[PositiveInt, ...]

    @field_validator("dims")
    @classmethod
    def _nonempty(cls, dims: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(dims) == 0:
            raise ValueError("a signature needs at least one entry")
        return dims

    @classmethod
    def of(cls, *dims: int) -> "Signature":
        return cls(dims=tuple(dims))

    def __len__(self) -> int:
        return len(self.dims)

    def __getitem__(self, k: int) -> int:
        return self.dims[k]

    def __iter__(self) -> Iterator[int]:  # type: ignore[override]
        return iter(self.dims)

    def concat(self, other: "Signature") -> "Signature":
        """Coproduct of signatures (concatenation)."""
        return Signature(dims=self.dims + other.dims)

    def __str__(self) -> str:
        return "[" + ", ".join(str(d) for d in self.dims) + "]"


T = TypeVar("T", bound="MatrixTuple")


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """A tuple of square matrices typed by a signature."""
    sig: Signature
    entries: Tuple[np.ndarray, ...]

    def __post_init__(self):
        entries = tuple(as_matrix(e) for e in self.entries)
        if len(entries) != len(self.sig):
            raise SignatureMismatch(f"{len(entries)} entries for signature {self.sig}")
        for k, (d, e) in enumerate(zip(self.sig, entries)):
            if e.shape != (d, d):
                raise DimensionMismatch(f"entry {k} is {e.shape[0]}x{e.shape[1]}, signature wants {d}x{d}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls: Type[T], *entries) -> T:
        """Build a tuple, inferring the signature from the entry sizes."""
        mats = [as_matrix(e) for e in entries]
        return cls(Signature(dims=tuple(m.shape[0] for m in mats)), tuple(mats))

    @classmethod
    def zero(cls: Type[T], sig: Signature) -> T:
        return cls(sig, tuple(zeros(d, d) for d in sig))

    @classmethod
    def identity(cls: Type[T], sig: Signature) -> T:
        return cls(sig, tuple(identity(d) for d in sig))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.entries[k]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.entries)

    def direct_sum(self: T, other: "MatrixTuple") -> T:
        """Tuple concatenation (⊕)."""
        return type(self)(self.sig.concat(other.sig), self.entries + other.entries)

    def distance(self, other: "MatrixTuple") -> float:
        """Largest entrywise deviation; signatures must agree."""
        if self.sig != other.sig:
            raise SignatureMismatch(f"cannot compare {self.sig} with {other.sig}")
        return max(max_norm(a - b) for a, b in zip(self.entries, other.entries))


class DensityState(MatrixTuple):
    """Tuple of positive matrices with total trace at most 1 (unnormalized allowed)."""

    def traces(self) -> List[float]:
        return [float(np.real(np.trace(e))) for e in self.entries]

    def total_trace(self) -> float:
        return float(sum(self.traces()))


class PredicateTuple(MatrixTuple):
    """Tuple of positive matrices with eigenvalues at most 1."""


class ObservableTuple(MatrixTuple):
    """Tuple of Hermitian matrices with spectrum in [-1, 1], e.g. Pauli stabilizers."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive map rho -> sum_k E_k rho E_k†; no terms is the zero map."""
    in_dim: int
    out_dim: int
    kraus: Tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise DimensionMismatch(f"channel dimensions must be positive, got {self.in_dim}->{self.out_dim}")
        ops = tuple(as_matrix(e) for e in self.kraus)
        for k, e in enumerate(ops):
            if e.shape != (self.out_dim, self.in_dim):
                raise DimensionMismatch(
                    f"Kraus operator {k} is {e.shape[0]}x{e.shape[1]}, expected {self.out_dim}x{self.in_dim}")
        object.__setattr__(self, "kraus", ops)

    @classmethod
    def of(cls, *ops) -> "KrausChannel":
        mats = [as_matrix(e) for e in ops]
        if not mats:
            raise DimensionMismatch("cannot infer dimensions of an empty Kraus list")
        rows, cols = mats[0].shape
        return cls(cols, rows, tuple(mats))

    @classmethod
    def zero(cls, in_dim: int, out_dim: int) -> "KrausChannel":
        return cls(in_dim, out_dim, ())

    @classmethod
    def identity(cls, d: int) -> "KrausChannel":
        return cls(d, d, (identity(d),))

    def __len__(self) -> int:
        return len(self.kraus)

    @property
    def is_zero(self) -> bool:
        return len(self.kraus) == 0

    def gram(self) -> np.ndarray:
        """sum_k E_k† E_k, an in_dim x in_dim matrix."""
        total = np.zeros((self.in_dim, self.in_dim), dtype=np.complex128)
        for e in self.kraus:
            total += e.conj().T @ e
        return freeze(total)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Blocks of Kraus channels between two signatures, indexed blocks[j][i]."""
    in_sig: Signature
    out_sig: Signature
    blocks: Tuple[Tuple[KrausChannel, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(row) for row in self.blocks)
        if len(blocks) != len(self.out_sig):
            raise SignatureMismatch(f"{len(blocks)} block rows for output signature {self.out_sig}")
        for j, row in enumerate(blocks):
            if len(row) != len(self.in_sig):
                raise SignatureMismatch(f"block row {j} has {len(row)} columns for input signature {self.in_sig}")
            for i, channel in enumerate(row):
                if (channel.in_dim, channel.out_dim) != (self.in_sig[i], self.out_sig[j]):
                    raise DimensionMismatch(
                        f"block [{j}][{i}] maps {channel.in_dim}->{channel.out_dim}, "
                        f"expected {self.in_sig[i]}->{self.out_sig[j]}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def zero(cls, in_sig: Signature, out_sig: Signature) -> "Superoperator":
        return cls(in_sig, out_sig, tuple(
            tuple(KrausChannel.zero(di, dj) for di in in_sig) for dj in out_sig))

    @classmethod
    def identity(cls, sig: Signature) -> "Superoperator":
        return cls.diagonal([KrausChannel.identity(d) for d in sig])

    @classmethod
    def from_channel(cls, channel: KrausChannel) -> "Superoperator":
        return cls(Signature.of(channel.in_dim), Signature.of(channel.out_dim), ((channel,),))

    @classmethod
    def diagonal(cls, channels: Sequence[KrausChannel]) -> "Superoperator":
        """Coproduct of single-entry channels: channel k acts on entry k only."""
        in_sig = Signature(dims=tuple(c.in_dim for c in channels))
        out_sig = Signature(dims=tuple(c.out_dim for c in channels))
        blocks = tuple(
            tuple(channels[j] if i == j else KrausChannel.zero(in_sig[i], out_sig[j])
                  for i in range(len(channels)))
            for j in range(len(channels)))
        return cls(in_sig, out_sig, blocks)

    def block(self, j: int, i: int) -> KrausChannel:
        return self.blocks[j][i]

    def kraus_count(self) -> int:
        return sum(len(c) for row in self.blocks for c in row)


# Validation (report based, never raises for invalid objects)

def _entry_checks(m: np.ndarray, label: str, lower: float, upper: float,
                  tol: float, herm_tol: float) -> Tuple[List[Violation], float]:
    """Hermiticity and spectrum-in-[lower, upper] checks for one matrix."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return [Violation(code="not_square", message=f"{label} is not square")], 0.0
    asym = max_norm(m - m.conj().T)
    if asym > herm_tol:
        return [Violation(code="not_hermitian",
                          message=f"{label} deviates from its adjoint by {asym:.3e}",
                          witness=asym)], asym
    eig = np.linalg.eigvalsh((m + m.conj().T) / 2)
    violations = []
    residual = 0.0
    if eig[0] < lower - tol:
        code = "not_positive" if lower == 0.0 else "eigenvalue_out_of_range"
        violations.append(Violation(code=code,
                                    message=f"{label} has eigenvalue {eig[0]:.6g} below {lower:g}",
                                    witness=float(eig[0])))
        residual = max(residual, lower - float(eig[0]))
    if eig[-1] > upper + tol:
        code = "eigenvalue_above_one" if lower == 0.0 else "eigenvalue_out_of_range"
        violations.append(Violation(code=code,
                                    message=f"{label} has eigenvalue {eig[-1]:.6g} above {upper:g}",
                                    witness=float(eig[-1])))
        residual = max(residual, float(eig[-1]) - upper)
    return violations, residual


def validate_predicate_entry(m: np.ndarray, tol: float = PSD_TOL,
                             herm_tol: float = HERM_TOL) -> ValidationReport:
    """Valid iff Hermitian, positive, and largest eigenvalue at most 1 + tol."""
    violations, residual = _entry_checks(np.asarray(m), "predicate", 0.0, 1.0, tol, herm_tol)
    return ValidationReport.build(violations, trials=1, max_residual=residual)


def validate_observable_entry(m: np.ndarray, tol: float = PSD_TOL,
                              herm_tol: float = HERM_TOL) -> ValidationReport:
    """Valid iff Hermitian with every eigenvalue in [-1 - tol, 1 + tol]."""
    violations, residual = _entry_checks(np.asarray(m), "observable", -1.0, 1.0, tol, herm_tol)
    return ValidationReport.build(violations, trials=1, max_residual=residual)


def _validate_tuple(t: MatrixTuple, lower: float, upper: float, kind: str,
                    tol: float, herm_tol: float) -> ValidationReport:
    violations: List[Violation] = []
    residual = 0.0
    for k, entry in enumerate(t.entries):
        found, r = _entry_checks(entry, f"{kind} entry {k}", lower, upper, tol, herm_tol)
        violations.extend(found)
        residual = max(residual, r)
    return ValidationReport.build(violations, trials=len(t), max_residual=residual)


def validate_predicate(p: MatrixTuple, tol: float = PSD_TOL,
                       herm_tol: float = HERM_TOL) -> ValidationReport:
    """Entrywise predicate validation; entries are independent."""
    return _validate_tuple(p, 0.0, 1.0, "predicate", tol, herm_tol)


def validate_observable(o: MatrixTuple, tol: float = PSD_TOL,
                        herm_tol: float = HERM_TOL) -> ValidationReport:
    return _validate_tuple(o, -1.0, 1.0, "observable", tol, herm_tol)


def validate_state(s: MatrixTuple, tol: float = PSD_TOL, trace_tol: float = TRACE_TOL,
                   herm_tol: float = HERM_TOL) -> ValidationReport:
    """
    Check every entry is Hermitian and positive, and the total trace is at most 1.

    Args:
        s: Tuple of density matrices
        tol: Eigenvalue tolerance for positivity
        trace_tol: Slack on the total trace bound

    Returns:
        ValidationReport listing each violated invariant
    """
    violations: List[Violation] = []
    residual = 0.0
    for k, entry in enumerate(s.entries):
        found, r = _entry_checks(entry, f"state entry {k}", 0.0, np.inf, tol, herm_tol)
        violations.extend(found)
        residual = max(residual, r)
    total = float(sum(np.real(np.trace(e)) for e in s.entries))
    if total > 1.0 + trace_tol:
        violations.append(Violation(code="trace_exceeds_one",
                                    message=f"total trace {total:.6g} exceeds 1",
                                    witness=total))
        residual = max(residual, total - 1.0)
    return ValidationReport.build(violations, trials=len(s), max_residual=residual)


def _gram_check(gram: np.ndarray, label: str, tol: float) -> Tuple[List[Violation], float]:
    top = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[-1])
    if top > 1.0 + tol:
        return [Violation(code="trace_increasing",
                          message=f"{label}: sum of E†E has eigenvalue {top:.6g} above 1",
                          witness=top)], top - 1.0
    return [], 0.0


def validate_channel(c: KrausChannel, tol: float = PSD_TOL) -> ValidationReport:
    """Kraus condition sum_k E_k† E_k ≼ I."""
    violations, residual = _gram_check(c.gram(), "channel", tol)
    return ValidationReport.build(violations, trials=1, max_residual=residual)


def validate_superoperator(f: Superoperator, tol: float = PSD_TOL) -> ValidationReport:
    """Per input entry i, the Kraus condition summed over every output block."""
    violations: List[Violation] = []
    residual = 0.0
    for i, d in enumerate(f.in_sig):
        gram = np.zeros((d, d), dtype=np.complex128)
        for row in f.blocks:
            gram += row[i].gram()
        found, r = _gram_check(gram, f"input entry {i}", tol)
        violations.extend(found)
        residual = max(residual, r)
    return ValidationReport.build(violations, trials=len(f.in_sig), max_residual=residual)


# Forward semantics

def apply_channel(c: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """sum_k E_k rho E_k†."""
    if rho.shape != (c.in_dim, c.in_dim):
        raise DimensionMismatch(f"channel expects {c.in_dim}x{c.in_dim} input, got {rho.shape}")
    out = np.zeros((c.out_dim, c.out_dim), dtype=np.complex128)
    for e in c.kraus:
        out += e @ rho @ e.conj().T
    return freeze(out)


def apply_super(f: Superoperator, s: DensityState) -> DensityState:
    """
    Forward action of a block superoperator on a state tuple.

    Raises:
        SignatureMismatch: If the state is not typed by the input signature
    """
    if s.sig != f.in_sig:
        raise SignatureMismatch(f"state signature {s.sig} does not match superoperator input {f.in_sig}")
    outs = []
    for j, dj in enumerate(f.out_sig):
        acc = np.zeros((dj, dj), dtype=np.complex128)
        for i, channel in enumerate(f.blocks[j]):
            if not channel.is_zero:
                acc += apply_channel(channel, s.entries[i])
        outs.append(acc)
    return DensityState(f.out_sig, tuple(outs))


def expectation(s: MatrixTuple, p: MatrixTuple) -> float:
    """Trace pairing sum_k Re tr(P_k s_k)."""
    if s.sig != p.sig:
        raise SignatureMismatch(f"state signature {s.sig} does not match predicate signature {p.sig}")
    return float(sum(np.real(np.trace(pk @ sk)) for pk, sk in zip(p.entries, s.entries)))


def satisfies(s: DensityState, p: MatrixTuple, r: float, slack: float = THRESHOLD_SLACK) -> bool:
    """
    Quantitative satisfaction: the expectation of p in s is at least r.

    The comparison uses the raw (unnormalized) trace pairing.

    Raises:
        InvalidThreshold: If r is outside [0, 1]
    """
    if not (0.0 <= r <= 1.0):
        raise InvalidThreshold(f"threshold must lie in [0, 1], got {r}")
    return expectation(s, p) >= r - slack


def choi_matrix(c: KrausChannel) -> np.ndarray:
    """
    Choi matrix sum_{a,b} |a><b| ⊗ E|a><b|E†, summed over Kraus terms.

    Row index is a * out_dim + j for input basis a and output basis j.
    """
    n = c.in_dim * c.out_dim
    out = np.zeros((n, n), dtype=np.complex128)
    for e in c.kraus:
        v = e.T.reshape(-1, 1)
        out += v @ v.conj().T
    return freeze(out)
