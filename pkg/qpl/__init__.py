# Flow-chart language front end module initialization
from .ast import Program, UnitaryRef, VarKind
from .elaborator import Elaboration, Elaborator, TypingContext, elaborate
from .examples import (
    build_bell,
    build_bell_stabilizer,
    build_coin,
    build_flip_until_zero,
    build_grover,
    build_recursive_coin,
)
from .parser import format_program, parse

__all__ = [
    'Program',
    'UnitaryRef',
    'VarKind',
    'Elaboration',
    'Elaborator',
    'TypingContext',
    'elaborate',
    'build_bell',
    'build_bell_stabilizer',
    'build_coin',
    'build_flip_until_zero',
    'build_grover',
    'build_recursive_coin',
    'format_program',
    'parse',
]
