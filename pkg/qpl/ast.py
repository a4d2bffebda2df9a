# Abstract syntax of the flow-chart language
#
# Nodes are frozen dataclasses; source positions do not take part in equality,
# so a reparsed program compares equal to the original.

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

Position = Tuple[int, int]


class VarKind(str, Enum):
    BIT = "bit"
    QBIT = "qbit"


@dataclass(frozen=True)
class UnitaryRef:
    """A builtin gate (name plus integer parameters) or an inline matrix literal."""
    name: Optional[str] = None
    params: Tuple[int, ...] = ()
    matrix: Optional[Tuple[Tuple[complex, ...], ...]] = None
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class InputDecl:
    kind: VarKind
    names: Tuple[str, ...]
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class NewBit:
    name: str
    value: int
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class NewQbit:
    name: str
    value: int
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Assign:
    name: str
    value: int
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class ApplyUnitary:
    targets: Tuple[str, ...]
    unitary: UnitaryRef
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Measure:
    """Bare when both blocks are None: the outcome stays as an anonymous branch."""
    qbit: str
    then_block: Optional[Tuple["Statement", ...]] = None
    else_block: Optional[Tuple["Statement", ...]] = None
    pos: Position = field(default=(0, 0), compare=False)

    @property
    def branching(self) -> bool:
        return self.then_block is not None


@dataclass(frozen=True)
class Merge:
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Discard:
    name: str
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Repeat:
    count: int
    body: Tuple["Statement", ...]
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class While:
    bit: str
    body: Tuple["Statement", ...]
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class DefRec:
    """Defines a recursive block and runs it in place; `call name` inside is the hole."""
    name: str
    body: Tuple["Statement", ...]
    pos: Position = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class CallRec:
    name: str
    pos: Position = field(default=(0, 0), compare=False)


Statement = Union[NewBit, NewQbit, Assign, ApplyUnitary, Measure, Merge, Discard,
                  Repeat, While, DefRec, CallRec]


@dataclass(frozen=True)
class Program:
    inputs: Tuple[InputDecl, ...] = ()
    body: Tuple[Statement, ...] = ()

    def input_names(self, kind: VarKind) -> Tuple[str, ...]:
        return tuple(n for decl in self.inputs if decl.kind == kind for n in decl.names)
