# Elaboration of programs into block superoperators
#
# A typing context holds classical slots and qubits, most significant first.
# Its signature has one entry per assignment of the slots, each entry the
# space of all qubits. New variables are prepended, so a fresh slot doubles
# the signature as F ⊕ F and a fresh qubit becomes the leading tensor factor.

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.settings import MAX_ITER, TRUNCATION_TOL
from linalg.matrix import basis_vector, identity
from qpl.ast import (ApplyUnitary, Assign, CallRec, DefRec, Discard, Measure, Merge, NewBit,
                     NewQbit, Position, Program, Repeat, Statement, VarKind, While)
from qpl.unitaries import resolve
from quantum.domain import KrausChannel, Signature, Superoperator
from utils.errors import QplTypeError, ScopeError
from wp.engine import coproduct, seq_compose
from wp.fixpoint import LoopDecomposition, RecursiveSpec, monoidal_trace, recursive_fixpoint

logger = logging.getLogger(__name__)

_PROJECTORS = (np.array([[1, 0], [0, 0]], dtype=np.complex128),
               np.array([[0, 0], [0, 1]], dtype=np.complex128))

# Recursion name -> (current approximation, context the recursion was defined in)
RecEnv = Mapping[str, Tuple[Superoperator, "TypingContext"]]


@dataclass(frozen=True)
class TypingContext:
    """
    Live variables: classical slots and qubits, each most significant first.

    A slot named None is a measurement outcome that has not been merged yet.
    """
    bits: Tuple[Optional[str], ...] = ()
    qbits: Tuple[str, ...] = ()

    @classmethod
    def of(cls, entries: Sequence[Tuple[str, VarKind]]) -> "TypingContext":
        """From an ordered list of (name, kind) pairs."""
        names = [name for name, _ in entries]
        if len(set(names)) != len(names):
            raise ScopeError(f"duplicate variable in context {names}")
        return cls(tuple(n for n, k in entries if k == VarKind.BIT),
                   tuple(n for n, k in entries if k == VarKind.QBIT))

    @classmethod
    def from_program(cls, program: Program) -> "TypingContext":
        return cls(program.input_names(VarKind.BIT), program.input_names(VarKind.QBIT))

    @property
    def entries(self) -> Tuple[Tuple[Optional[str], VarKind], ...]:
        return tuple((b, VarKind.BIT) for b in self.bits) + tuple((q, VarKind.QBIT) for q in self.qbits)

    @property
    def dim(self) -> int:
        return 2 ** len(self.qbits)

    @property
    def signature(self) -> Signature:
        return Signature(dims=(self.dim,) * (2 ** len(self.bits)))

    def kind_of(self, name: str) -> Optional[VarKind]:
        if name in self.qbits:
            return VarKind.QBIT
        if name in self.bits:
            return VarKind.BIT
        return None

    def matches(self, other: "TypingContext") -> bool:
        """Same variables, possibly in another order."""
        return (sorted(self.qbits) == sorted(other.qbits)
                and sorted(b for b in self.bits if b is not None) == sorted(b for b in other.bits if b is not None)
                and self.bits.count(None) == other.bits.count(None))

    def describe(self) -> str:
        parts = [f"bit {b or '_'}" for b in self.bits] + [f"qbit {q}" for q in self.qbits]
        return "(" + ", ".join(parts) + ")"


@dataclass(frozen=True, eq=False)
class Elaboration:
    superop: Superoperator
    input_ctx: TypingContext
    output_ctx: TypingContext


# Superoperator builders over contexts

def _routing(in_sig: Signature, out_sig: Signature,
             routes: Dict[int, Tuple[int, KrausChannel]]) -> Superoperator:
    """Input entry i goes to output entry routes[i][0] through channel routes[i][1]; others vanish."""
    blocks = []
    for j, dj in enumerate(out_sig):
        row = []
        for i, di in enumerate(in_sig):
            target = routes.get(i)
            row.append(target[1] if target is not None and target[0] == j else KrausChannel.zero(di, dj))
        blocks.append(tuple(row))
    return Superoperator(in_sig, out_sig, tuple(blocks))


def _uniform(ctx: TypingContext, channel: KrausChannel) -> Superoperator:
    """The same quantum channel on every classical entry; slots unchanged."""
    return Superoperator.diagonal([channel] * len(ctx.signature))


def lift(u: np.ndarray, positions: Sequence[int], n: int) -> np.ndarray:
    """Operator acting as u on the qubits at positions (first is most significant) of an n-qubit register."""
    k = len(positions)
    full = np.eye(2 ** n, dtype=np.complex128).reshape([2] * n + [2 ** n])
    gate = u.reshape([2] * (2 * k))
    moved = np.tensordot(gate, full, axes=(list(range(k, 2 * k)), list(positions)))
    return np.moveaxis(moved, list(range(k)), list(positions)).reshape(2 ** n, 2 ** n)


def _qubit_factor(op: np.ndarray, p: int, n: int) -> np.ndarray:
    """I ⊗ op ⊗ I with op (one qubit, possibly rectangular) at position p of n."""
    return np.kron(np.kron(np.eye(2 ** p), op), np.eye(2 ** (n - p - 1)))


def _slot_bit(e: int, p: int, slots: int) -> int:
    return (e >> (slots - 1 - p)) & 1


def _drop_slot(e: int, p: int, slots: int) -> int:
    w = slots - 1 - p
    return ((e >> (w + 1)) << w) | (e & ((1 << w) - 1))


def permutation(src: TypingContext, dst: TypingContext) -> Superoperator:
    """
    Reorder src into dst. Anonymous slots are matched in order.

    Raises:
        QplTypeError: If the contexts hold different variables
    """
    if not src.matches(dst):
        raise QplTypeError(f"context {src.describe()} does not match {dst.describe()}")
    if src == dst:
        return Superoperator.identity(src.signature)
    n = len(src.qbits)
    order = [src.qbits.index(q) for q in dst.qbits] + [n]
    shuffle = np.eye(2 ** n, dtype=np.complex128).reshape([2] * n + [2 ** n]).transpose(order)
    channel = KrausChannel(2 ** n, 2 ** n, (shuffle.reshape(2 ** n, 2 ** n),))

    anon_src = [p for p, b in enumerate(src.bits) if b is None]
    anon_dst = [p for p, b in enumerate(dst.bits) if b is None]
    source_of = []
    for p, b in enumerate(dst.bits):
        source_of.append(anon_src[anon_dst.index(p)] if b is None else src.bits.index(b))
    s = len(src.bits)
    routes = {}
    for e in range(2 ** s):
        out = 0
        for q, origin in enumerate(source_of):
            out |= _slot_bit(e, origin, s) << (s - 1 - q)
        routes[e] = (out, channel)
    return _routing(src.signature, dst.signature, routes)


def _two_by_two(top_left: Superoperator, top_right: Superoperator,
                bottom_left: Superoperator, bottom_right: Superoperator) -> Superoperator:
    """[[A, B], [C, D]] on σ⊕τ -> σ'⊕τ with A: σ->σ', B: τ->σ', C: σ->τ', D: τ->τ'."""
    in_sig = top_left.in_sig.concat(top_right.in_sig)
    out_sig = top_left.out_sig.concat(bottom_left.out_sig)
    upper = [a + b for a, b in zip(top_left.blocks, top_right.blocks)]
    lower = [c + d for c, d in zip(bottom_left.blocks, bottom_right.blocks)]
    return Superoperator(in_sig, out_sig, tuple(upper + lower))


@dataclass(frozen=True)
class Elaborator:
    """
    Turns statements into superoperators, threading the typing context.

    tol and max_iter bound the infinite sums of while loops and recursion.
    """
    tol: float = TRUNCATION_TOL
    max_iter: int = MAX_ITER

    def elaborate(self, program: Program, input_ctx: Optional[TypingContext] = None) -> Elaboration:
        """
        Elaborate a whole program.

        The input context comes from the program's input declarations; an
        explicit input_ctx is used for programs without declarations and must
        agree with them otherwise.

        Raises:
            QplTypeError: On kind or context mismatches
            ScopeError: On variables missing from the context
            ElaborationError: On invalid unitaries
        """
        declared = TypingContext.from_program(program)
        if input_ctx is None:
            input_ctx = declared
        elif program.inputs and input_ctx != declared:
            raise QplTypeError(f"input context {input_ctx.describe()} conflicts with the declared "
                               f"inputs {declared.describe()}")
        superop, output_ctx = self._block(program.body, input_ctx, {})
        logger.debug("elaborated %s -> %s", input_ctx.describe(), output_ctx.describe())
        return Elaboration(superop, input_ctx, output_ctx)

    def _block(self, body: Sequence[Statement], ctx: TypingContext,
               recs: RecEnv) -> Tuple[Superoperator, TypingContext]:
        total = Superoperator.identity(ctx.signature)
        for stmt in body:
            step, ctx = self._statement(stmt, ctx, recs)
            total = seq_compose(total, step)
        return total, ctx

    def _closed_block(self, body: Sequence[Statement], ctx: TypingContext, recs: RecEnv,
                      what: str, pos: Position) -> Superoperator:
        """A block that must end in its starting context, reordered if needed."""
        inner, after = self._block(body, ctx, recs)
        if not after.matches(ctx):
            raise QplTypeError(f"{pos[0]}:{pos[1]}: {what} body changes the context from "
                               f"{ctx.describe()} to {after.describe()}")
        return seq_compose(inner, permutation(after, ctx))

    def _statement(self, stmt: Statement, ctx: TypingContext,
                   recs: RecEnv) -> Tuple[Superoperator, TypingContext]:
        handler: Callable = getattr(self, f"_elab_{type(stmt).__name__.lower()}")
        return handler(stmt, ctx, recs)

    def _require(self, ctx: TypingContext, name: str, kind: VarKind, pos: Position, what: str) -> int:
        found = ctx.kind_of(name)
        if found is None:
            raise ScopeError(f"{pos[0]}:{pos[1]}: variable {name!r} is not in context {ctx.describe()}")
        if found != kind:
            raise QplTypeError(f"{pos[0]}:{pos[1]}: {what} needs a {kind.value}, {name!r} is a {found.value}")
        return (ctx.qbits if kind == VarKind.QBIT else ctx.bits).index(name)

    def _fresh(self, ctx: TypingContext, name: str, pos: Position) -> None:
        if ctx.kind_of(name) is not None:
            raise ScopeError(f"{pos[0]}:{pos[1]}: variable {name!r} is already declared")

    # Statements

    def _elab_newqbit(self, stmt: NewQbit, ctx: TypingContext, recs: RecEnv):
        self._fresh(ctx, stmt.name, stmt.pos)
        op = np.kron(basis_vector(2, stmt.value), identity(ctx.dim))
        out = TypingContext(ctx.bits, (stmt.name,) + ctx.qbits)
        return _uniform(ctx, KrausChannel(ctx.dim, 2 * ctx.dim, (op,))), out

    def _elab_newbit(self, stmt: NewBit, ctx: TypingContext, recs: RecEnv):
        self._fresh(ctx, stmt.name, stmt.pos)
        out = TypingContext((stmt.name,) + ctx.bits, ctx.qbits)
        m = len(ctx.signature)
        channel = KrausChannel.identity(ctx.dim)
        return _routing(ctx.signature, out.signature,
                        {e: (stmt.value * m + e, channel) for e in range(m)}), out

    def _elab_assign(self, stmt: Assign, ctx: TypingContext, recs: RecEnv):
        p = self._require(ctx, stmt.name, VarKind.BIT, stmt.pos, "assignment")
        s = len(ctx.bits)
        mask = 1 << (s - 1 - p)
        channel = KrausChannel.identity(ctx.dim)
        routes = {e: ((e | mask) if stmt.value else (e & ~mask), channel) for e in range(2 ** s)}
        return _routing(ctx.signature, ctx.signature, routes), ctx

    def _elab_applyunitary(self, stmt: ApplyUnitary, ctx: TypingContext, recs: RecEnv):
        positions = [self._require(ctx, t, VarKind.QBIT, stmt.pos, "unitary application")
                     for t in stmt.targets]
        if len(set(positions)) != len(positions):
            raise QplTypeError(f"{stmt.pos[0]}:{stmt.pos[1]}: repeated target in {', '.join(stmt.targets)}")
        u, arity = resolve(stmt.unitary)
        if arity != len(positions):
            raise QplTypeError(f"{stmt.pos[0]}:{stmt.pos[1]}: gate acts on {arity} qubits, "
                               f"{len(positions)} targets given")
        op = lift(u, positions, len(ctx.qbits))
        return _uniform(ctx, KrausChannel(ctx.dim, ctx.dim, (op,))), ctx

    def _elab_measure(self, stmt: Measure, ctx: TypingContext, recs: RecEnv):
        p = self._require(ctx, stmt.qbit, VarKind.QBIT, stmt.pos, "measurement")
        n = len(ctx.qbits)
        split_ctx = TypingContext((None,) + ctx.bits, ctx.qbits)
        m = len(ctx.signature)
        outcomes = [KrausChannel(ctx.dim, ctx.dim, (_qubit_factor(proj, p, n),)) for proj in _PROJECTORS]
        split = Superoperator(ctx.signature, split_ctx.signature, tuple(
            tuple(outcomes[j // m] if j % m == i else KrausChannel.zero(ctx.dim, ctx.dim)
                  for i in range(m))
            for j in range(2 * m)))
        if not stmt.branching:
            return split, split_ctx
        then_op, then_ctx = self._block(stmt.then_block, ctx, recs)
        else_op, else_ctx = self._block(stmt.else_block, ctx, recs)
        if not else_ctx.matches(then_ctx):
            raise QplTypeError(f"{stmt.pos[0]}:{stmt.pos[1]}: branches of measure {stmt.qbit} end in "
                               f"different contexts {then_ctx.describe()} and {else_ctx.describe()}")
        else_op = seq_compose(else_op, permutation(else_ctx, then_ctx))
        joined = coproduct(then_op, else_op)
        merged = self._merge_slot(TypingContext((None,) + then_ctx.bits, then_ctx.qbits), 0)
        return seq_compose(seq_compose(split, joined), merged), then_ctx

    def _merge_slot(self, ctx: TypingContext, p: int) -> Superoperator:
        s = len(ctx.bits)
        out = TypingContext(ctx.bits[:p] + ctx.bits[p + 1:], ctx.qbits)
        channel = KrausChannel.identity(ctx.dim)
        return _routing(ctx.signature, out.signature,
                        {e: (_drop_slot(e, p, s), channel) for e in range(2 ** s)})

    def _elab_merge(self, stmt: Merge, ctx: TypingContext, recs: RecEnv):
        if None not in ctx.bits:
            raise QplTypeError(f"{stmt.pos[0]}:{stmt.pos[1]}: merge without an unmerged measurement")
        p = ctx.bits.index(None)
        return self._merge_slot(ctx, p), TypingContext(ctx.bits[:p] + ctx.bits[p + 1:], ctx.qbits)

    def _elab_discard(self, stmt: Discard, ctx: TypingContext, recs: RecEnv):
        kind = ctx.kind_of(stmt.name)
        if kind is None:
            raise ScopeError(f"{stmt.pos[0]}:{stmt.pos[1]}: variable {stmt.name!r} is not in context "
                             f"{ctx.describe()}")
        if kind == VarKind.BIT:
            p = ctx.bits.index(stmt.name)
            return self._merge_slot(ctx, p), TypingContext(ctx.bits[:p] + ctx.bits[p + 1:], ctx.qbits)
        p = ctx.qbits.index(stmt.name)
        n = len(ctx.qbits)
        out = TypingContext(ctx.bits, ctx.qbits[:p] + ctx.qbits[p + 1:])
        ops = tuple(_qubit_factor(basis_vector(2, k).T, p, n) for k in (0, 1))
        return _uniform(ctx, KrausChannel(ctx.dim, out.dim, ops)), out

    def _elab_repeat(self, stmt: Repeat, ctx: TypingContext, recs: RecEnv):
        total = Superoperator.identity(ctx.signature)
        if stmt.count == 0:
            return total, ctx
        body = self._closed_block(stmt.body, ctx, recs, "repeat", stmt.pos)
        for _ in range(stmt.count):
            total = seq_compose(total, body)
        return total, ctx

    def _elab_while(self, stmt: While, ctx: TypingContext, recs: RecEnv):
        p = self._require(ctx, stmt.bit, VarKind.BIT, stmt.pos, "while guard")
        s = len(ctx.bits)
        body = self._closed_block(stmt.body, ctx, recs, "while", stmt.pos)
        sig = ctx.signature
        keep = [KrausChannel.identity(ctx.dim), KrausChannel.zero(ctx.dim, ctx.dim)]
        exits = Superoperator.diagonal([keep[_slot_bit(e, p, s)] for e in range(len(sig))])
        enters = Superoperator.diagonal([keep[1 - _slot_bit(e, p, s)] for e in range(len(sig))])
        step = seq_compose(enters, body)
        loop = _two_by_two(exits, exits, step, step)
        m = len(sig)
        decomposition = LoopDecomposition(loop, tuple(range(m, 2 * m)), tuple(range(m, 2 * m)))
        return monoidal_trace(decomposition, tol=self.tol, max_iter=self.max_iter), ctx

    def _elab_defrec(self, stmt: DefRec, ctx: TypingContext, recs: RecEnv):
        def body(hole: Superoperator) -> Superoperator:
            inner = {**recs, stmt.name: (hole, ctx)}
            return self._closed_block(stmt.body, ctx, inner, f"rec {stmt.name}", stmt.pos)

        spec = RecursiveSpec(body, ctx.signature, ctx.signature)
        return recursive_fixpoint(spec, tol=self.tol, max_iter=self.max_iter), ctx

    def _elab_callrec(self, stmt: CallRec, ctx: TypingContext, recs: RecEnv):
        if stmt.name not in recs:
            raise ScopeError(f"{stmt.pos[0]}:{stmt.pos[1]}: call to {stmt.name!r} outside its recursive block")
        hole, rec_ctx = recs[stmt.name]
        if not ctx.matches(rec_ctx):
            raise QplTypeError(f"{stmt.pos[0]}:{stmt.pos[1]}: call {stmt.name} in context {ctx.describe()}, "
                               f"recursion expects {rec_ctx.describe()}")
        return seq_compose(permutation(ctx, rec_ctx), hole), rec_ctx


def elaborate(program: Program, input_ctx: Optional[TypingContext] = None,
              tol: float = TRUNCATION_TOL, max_iter: int = MAX_ITER) -> Superoperator:
    """Superoperator of a program from its input signature to its output signature."""
    return Elaborator(tol=tol, max_iter=max_iter).elaborate(program, input_ctx).superop
