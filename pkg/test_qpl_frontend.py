"""Tests for the .qpl parser, printer, scope checker, elaborator and example programs"""
import numpy as np
import pytest

from linalg import max_norm
from qpl.ast import (ApplyUnitary, Assign, CallRec, DefRec, Discard, InputDecl, Measure, NewBit,
                     NewQbit, Program, Repeat, UnitaryRef, VarKind, While)
from qpl.elaborator import Elaborator, TypingContext, elaborate, lift, permutation
from qpl.examples import (BELL, FLIP_UNTIL_ZERO, RECURSIVE_COIN, build_bell, build_bell_stabilizer,
                          build_coin, build_flip_until_zero, build_grover, build_recursive_coin,
                          coin_postcondition, coin_state, grover_postcondition, grover_source,
                          uniform_state)
from qpl.parser import format_program, parse, tokenize
from qpl.unitaries import GATES, grover_iterations, grover_operator, inversion_about_mean, oracle
from quantum.domain import (DensityState, ObservableTuple, PredicateTuple, Signature,
                            Superoperator, apply_super, expectation)
from quantum.representations import superop_equivalent
from quantum.sampling import random_density, random_predicate
from utils.errors import ElaborationError, OutOfRange, QplSyntaxError, QplTypeError, ScopeError
from wp.engine import duality_check, seq_compose, stabilizer_check, wp_observable, wp_super

COIN_PROGRAM = Program(
    inputs=(InputDecl(VarKind.QBIT, ("r0",)),),
    body=(
        NewQbit("q", 0),
        ApplyUnitary(("q",), UnitaryRef(name="H")),
        Measure("q"),
        Discard("q"),
    ),
)


def _grover_program(n, s):
    names = tuple(f"q{k}" for k in range(n))
    return Program(
        inputs=(InputDecl(VarKind.QBIT, names),),
        body=(Repeat(grover_iterations(n), (ApplyUnitary(names, UnitaryRef(name="GroverG", params=(n, s))),)),)
        + tuple(Measure(q) for q in reversed(names)),
    )


# Parsing

def test_tokenize_positions_and_numbers():
    tokens = tokenize("a *= [[0.5, 2i]] # note\n")
    kinds = [t.kind for t in tokens]
    assert kinds[:3] == ["ident", "symbol", "symbol"]
    numbers = [t.value for t in tokens if t.kind == "number"]
    assert numbers == [0.5, 2j]
    assert tokens[-2].kind == "newline"
    assert tokens[-1].kind == "eof"
    assert tokens[1].pos == (1, 3)


def test_golden_coin_ast():
    assert build_coin(1) == COIN_PROGRAM


@pytest.mark.parametrize("n,s", [(2, 0), (2, 3), (3, 5)])
def test_golden_grover_ast(n, s):
    assert build_grover(n, s) == _grover_program(n, s)


def test_golden_bell_ast():
    assert build_bell() == Program(
        inputs=(InputDecl(VarKind.QBIT, ("a", "b")),),
        body=(ApplyUnitary(("a",), UnitaryRef(name="H")),
              ApplyUnitary(("a", "b"), UnitaryRef(name="CNOT"))),
    )


def test_golden_flip_until_zero_ast():
    program = build_flip_until_zero()
    assert program.inputs == ()
    assert program.body[0] == NewBit("b", 1)
    loop = program.body[1]
    assert isinstance(loop, While) and loop.bit == "b"
    measure = loop.body[2]
    assert measure.branching
    assert measure.then_block == (Assign("b", 0),)
    assert measure.else_block == (Assign("b", 1),)
    assert program.body[2] == Discard("b")


@pytest.mark.parametrize("source", [
    "input qbit r0\nnew qbit q := 0\nq *= H\nmeasure q\ndiscard q\n",
    grover_source(2, 1),
    grover_source(3, 6, prepare=True),
    BELL,
    FLIP_UNTIL_ZERO,
    RECURSIVE_COIN,
    "input qbit a\na *= [[0, 1/sqrt(2) + i/sqrt(2)], [1/sqrt(2) - i/sqrt(2), 0]]\n",
    "input qbit a, b; input bit c\nrepeat 2 { a, b *= CNOT }; measure a; merge; c := 1\n",
])
def test_parse_print_round_trip(source):
    program = parse(source)
    text = format_program(program)
    assert parse(text) == program
    assert format_program(parse(text)) == text


def test_printer_is_canonical():
    program = parse("input qbit a   # comment\n\n a *= H ;  measure a {  discard a } else { discard a }")
    assert format_program(program) == (
        "input qbit a\n"
        "a *= H\n"
        "measure a {\n"
        "  discard a\n"
        "} else {\n"
        "  discard a\n"
        "}\n"
    )


def test_matrix_literal_values():
    program = parse("input qbit a\na *= [[1/sqrt(2), 1/sqrt(2)], [1/sqrt(2), -1/sqrt(2)]]\n")
    matrix = np.array(program.body[0].unitary.matrix)
    assert max_norm(matrix - GATES["H"]) <= 1e-15


def test_syntax_error_position():
    with pytest.raises(QplSyntaxError) as info:
        parse("input qbit q\nq *= \n")
    assert (info.value.line, info.value.col) == (2, 6)
    assert "H" in info.value.expected
    body = info.value.to_dict()["error"]
    assert body["line"] == 2 and body["col"] == 6
    assert body["code"] == "syntax_error"


@pytest.mark.parametrize("source,message", [
    ("new qbit q := 2\n", "outside"),
    ("new qbit H := 0\n", "reserved"),
    ("new qbit q := 0\ninput qbit r\n", "precede"),
    ("measure q {\n}\n", "else"),
    ("q *= H H\n", "end of statement"),
    ("a := $\n", "unexpected character"),
    ("input qbit a\na *= [[1, 0], [0, 1/0]]\n", "division by zero"),
])
def test_syntax_errors(source, message):
    with pytest.raises(QplSyntaxError, match=message):
        parse(source)


@pytest.mark.parametrize("source,message", [
    ("discard x\n", "not declared"),
    ("new qbit a := 0\nnew bit a := 1\n", "already declared"),
    ("input qbit a, a\n", "declared twice"),
    ("call f\n", "outside its recursive block"),
    ("new qbit a := 0\ndiscard a\na *= H\n", "not declared"),
])
def test_scope_errors(source, message):
    with pytest.raises(ScopeError, match=message):
        parse(source)


def test_scope_error_reports_position():
    with pytest.raises(ScopeError, match=r"^2:1: "):
        parse("new qbit a := 0\nb *= H\n")


# Elaboration errors

@pytest.mark.parametrize("source,message", [
    ("input bit b\nb *= H\n", "needs a qbit"),
    ("input qbit q\nwhile q { }\n", "needs a bit"),
    ("input qbit a\na *= CNOT\n", "acts on 2 qubits"),
    ("input qbit a, b\na, a *= CNOT\n", "repeated target"),
    ("input qbit a\nmeasure a { new qbit b := 0 } else { }\n", "different contexts"),
    ("input qbit a\nmerge\n", "merge without"),
    ("input qbit a\nrepeat 2 { new qbit c := 0 }\n", "changes the context"),
])
def test_type_errors(source, message):
    with pytest.raises(QplTypeError, match=message):
        elaborate(parse(source))


@pytest.mark.parametrize("source,message", [
    ("input qbit a\na *= [[1, 1], [1, 1]]\n", "not unitary"),
    ("input qbit a\na *= [[1, 0, 0], [0, 1, 0], [0, 0, 1]]\n", "power of two"),
    ("input qbit a, b\na, b *= GroverG(2, 7)\n", "outside"),
    ("input qbit a\na *= IAM(1, 1)\n", "parameters"),
    ("input qbit a\na *= IAM(9)\n", "between 1 and"),
])
def test_elaboration_errors(source, message):
    with pytest.raises(ElaborationError, match=message):
        elaborate(parse(source))


def test_explicit_input_context():
    program = parse("new qbit c := 0\ndiscard c\n")
    ctx = TypingContext.of([("x", VarKind.QBIT), ("y", VarKind.BIT)])
    result = Elaborator().elaborate(program, ctx)
    assert result.superop.in_sig == Signature.of(2, 2)
    assert superop_equivalent(result.superop, Superoperator.identity(Signature.of(2, 2)))
    with pytest.raises(QplTypeError, match="conflicts"):
        Elaborator().elaborate(parse("input qbit a\n"), ctx)


# Elaboration building blocks

def test_typing_context():
    ctx = TypingContext.of([("b", VarKind.BIT), ("q", VarKind.QBIT), ("c", VarKind.BIT)])
    assert ctx.bits == ("b", "c")
    assert ctx.signature == Signature.of(2, 2, 2, 2)
    assert ctx.kind_of("q") == VarKind.QBIT
    assert ctx.kind_of("z") is None
    with pytest.raises(ScopeError):
        TypingContext.of([("a", VarKind.BIT), ("a", VarKind.QBIT)])


def test_lift(X, I2):
    assert np.array_equal(lift(X, [0], 2), np.kron(X, I2))
    assert np.array_equal(lift(X, [1], 2), np.kron(I2, X))
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.array_equal(lift(GATES["CNOT"], [1, 0], 2), swap @ GATES["CNOT"] @ swap)


def test_permutation_swaps_qubits(rng):
    src = TypingContext(("c",), ("a", "b"))
    dst = TypingContext(("c",), ("b", "a"))
    f = permutation(src, dst)
    rho = random_density(4, rng, 0.5)
    out = apply_super(f, DensityState(Signature.of(4, 4), (rho, np.zeros((4, 4)))))
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert max_norm(out[0] - swap @ rho @ swap) <= 1e-12
    with pytest.raises(QplTypeError):
        permutation(src, TypingContext((), ("a", "b")))


def test_branch_contexts_are_reordered():
    branched = parse("input qbit a\nmeasure a { new qbit b := 0; new qbit c := 0 } "
                     "else { new qbit c := 0; new qbit b := 0 }\n")
    merged = parse("input qbit a\nmeasure a; merge; new qbit b := 0; new qbit c := 0\n")
    assert superop_equivalent(elaborate(branched), elaborate(merged), tol=1e-12)


def test_bit_operations():
    f = elaborate(parse("new bit b := 1\nb := 0\n"))
    out = apply_super(f, DensityState.of(np.eye(1)))
    assert out.sig == Signature.of(1, 1)
    assert out.traces() == pytest.approx([1.0, 0.0])


def test_repeat_zero_is_identity():
    f = elaborate(parse("input qbit a\nrepeat 0 { a *= X }\n"))
    assert superop_equivalent(f, Superoperator.identity(Signature.of(2)))


def test_measurement_wp(rng, P0, P1):
    f = elaborate(parse("input qbit q\nmeasure q\n"))
    assert (f.in_sig, f.out_sig) == (Signature.of(2), Signature.of(2, 2))
    for _ in range(50):
        m1, m2 = random_predicate(2, rng), random_predicate(2, rng)
        pre = wp_super(f, PredicateTuple.of(m1, m2))
        assert max_norm(pre[0] - (P0 @ m1 @ P0 + P1 @ m2 @ P1)) <= 1e-12


# Worked examples

@pytest.mark.parametrize("register_size", [1, 2, 3])
def test_coin_wp_and_branch_traces(register_size, rng):
    f = elaborate(build_coin(register_size))
    d = 2 ** register_size
    assert (f.in_sig, f.out_sig) == (Signature.of(d), Signature.of(d, d))
    for _ in range(5):
        m1, m2 = random_predicate(d, rng), random_predicate(d, rng)
        pre = wp_super(f, PredicateTuple.of(m1, m2))
        assert max_norm(pre[0] - (m1 + m2) / 2) <= 1e-12
        alone = wp_super(f, PredicateTuple.of(m1, np.zeros((d, d))))
        assert max_norm(alone[0] - m1 / 2) <= 1e-12
        out = apply_super(f, DensityState.of(random_density(d, rng)))
        assert out.traces() == pytest.approx([0.5, 0.5], abs=1e-12)


def test_coin_companion_files():
    f = elaborate(build_coin(2))
    value = expectation(coin_state(2), wp_super(f, coin_postcondition(2)))
    assert value == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_grover_two_qubits(s):
    f = elaborate(build_grover(2, s))
    assert f.out_sig == Signature.of(4, 4, 4, 4)
    pre = wp_super(f, grover_postcondition(2, s))
    assert expectation(uniform_state(2), pre) == pytest.approx(1.0, abs=1e-9)
    traces = apply_super(f, uniform_state(2)).traces()
    assert traces[s] == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("s", [0, 5, 7])
def test_grover_three_qubits(s):
    assert grover_iterations(3) == 2
    f = elaborate(build_grover(3, s))
    forward = apply_super(f, uniform_state(3)).traces()[s]
    assert forward >= 0.9
    assert forward == pytest.approx(0.9453125, abs=1e-9)
    backward = expectation(uniform_state(3), wp_super(f, grover_postcondition(3, s)))
    assert backward == pytest.approx(forward, abs=1e-9)


def test_grover_with_preparation():
    f = elaborate(build_grover(2, 2, prepare=True))
    assert f.in_sig == Signature.of(1)
    assert apply_super(f, DensityState.of(np.eye(1))).traces()[2] == pytest.approx(1.0, abs=1e-9)


def test_grover_parameters():
    assert [grover_iterations(n) for n in (2, 3, 4)] == [1, 2, 3]
    assert max_norm(grover_operator(2, 1) - inversion_about_mean(2) @ oracle(2, 1)) == 0
    with pytest.raises(OutOfRange):
        build_grover(6, 0)
    with pytest.raises(OutOfRange):
        build_grover(2, 4)


def test_bell_stabilizer_wp(Z, I2):
    f = elaborate(build_bell())
    stabilizer = build_bell_stabilizer()
    for generator, expected in zip(stabilizer.generators, stabilizer.expected_wp):
        pre = wp_observable(f, ObservableTuple.of(generator))
        assert max_norm(pre[0] - expected) <= 1e-12
        assert stabilizer_check(generator, stabilizer.bell_state)
        assert stabilizer_check(expected, stabilizer.zero_state)
    assert stabilizer_check(np.kron(Z, I2), stabilizer.zero_state)
    assert stabilizer_check(np.kron(I2, Z), stabilizer.zero_state)
    assert max_norm(stabilizer.unitary @ stabilizer.zero_state - stabilizer.bell_state) <= 1e-12


def test_flip_until_zero_terminates():
    f = elaborate(build_flip_until_zero())
    assert (f.in_sig, f.out_sig) == (Signature.of(1), Signature.of(1))
    pre = wp_super(f, PredicateTuple.of(np.eye(1)))
    assert pre[0][0, 0].real == pytest.approx(1.0, abs=1e-6)


def test_recursive_coin_matches_loop():
    looped = elaborate(build_flip_until_zero())
    recursive = elaborate(build_recursive_coin())
    assert superop_equivalent(looped, recursive, tol=1e-6)


def test_recursion_without_base_case_is_zero():
    f = elaborate(parse("rec loop {\n  call loop\n}\n"))
    assert f.kraus_count() == 0


def test_nested_recursion_names():
    program = parse("input qbit a\nrec outer {\n  rec inner {\n    a *= H\n  }\n}\n")
    assert isinstance(program.body[0], DefRec)
    assert superop_equivalent(elaborate(program), elaborate(parse("input qbit a\na *= H\n")))


# Stepwise weakest preconditions of the coin program

def test_measure_then_discard_is_block_diagonal(rng, P0, P1):
    f = elaborate(parse("input qbit q, r0\nmeasure q\ndiscard q\n"))
    for _ in range(10):
        m1, m2 = random_predicate(2, rng), random_predicate(2, rng)
        pre = wp_super(f, PredicateTuple.of(m1, m2))
        assert max_norm(pre[0] - (np.kron(P0, m1) + np.kron(P1, m2))) <= 1e-12


def test_new_qubit_takes_top_left_block(rng):
    f = elaborate(parse("input qbit r0\nnew qbit q := 0\n"))
    m = random_predicate(4, rng)
    pre = wp_super(f, PredicateTuple.of(m))
    assert max_norm(pre[0] - m[:2, :2]) <= 1e-12


def test_discard_is_partial_trace(rng, I2):
    f = elaborate(parse("input qbit q, r0\ndiscard q\n"))
    m = random_predicate(2, rng)
    pre = wp_super(f, PredicateTuple.of(m))
    assert max_norm(pre[0] - np.kron(I2, m)) <= 1e-12


# Whole-program properties

@pytest.mark.parametrize("build", [
    lambda: build_coin(1),
    lambda: build_coin(2),
    lambda: build_coin(3),
    lambda: build_grover(2, 2),
    lambda: build_grover(3, 5),
    build_bell,
    build_flip_until_zero,
    build_recursive_coin,
])
def test_duality_holds_for_example_programs(build):
    report = duality_check(elaborate(build()), trials=100, seed=3)
    assert report.passed, report.violations
    assert report.max_residual <= 1e-9


@pytest.mark.parametrize("source,split", [
    ("input qbit r0\nnew qbit q := 0\nq *= H\nmeasure q\ndiscard q\n", 2),
    (grover_source(2, 1), 1),
    (BELL, 1),
    (FLIP_UNTIL_ZERO, 1),
    ("input qbit a, b\na *= H\nmeasure a\nb *= X\nmerge\ndiscard a\n", 3),
])
def test_elaboration_is_compositional(source, split):
    full = parse(source)
    head = Elaborator().elaborate(Program(full.inputs, full.body[:split]))
    tail = Elaborator().elaborate(Program((), full.body[split:]), head.output_ctx)
    whole = Elaborator().elaborate(full)
    assert tail.output_ctx == whole.output_ctx
    assert superop_equivalent(seq_compose(head.superop, tail.superop), whole.superop)


def test_elaborator_is_reusable_across_programs():
    elaborator = Elaborator()
    first = elaborator.elaborate(build_recursive_coin()).superop
    with pytest.raises(ScopeError, match="outside its recursive block"):
        elaborator.elaborate(Program((), (CallRec("loop"),)))
    assert superop_equivalent(elaborator.elaborate(build_recursive_coin()).superop, first)
    with pytest.raises(AttributeError):
        elaborator.tol = 1.0
