"""Tests for weakest preconditions, composition laws, loops, recursion and stabilizers"""
import numpy as np
import pytest

from linalg import loewner_leq, max_norm
from quantum.domain import (KrausChannel, ObservableTuple, PredicateTuple, Signature,
                            Superoperator, apply_super, expectation, validate_predicate)
from quantum.representations import choi_distance, scale_superop, superop_equivalent, superop_sum
from quantum.sampling import (random_channel, random_predicate, random_predicate_tuple,
                              random_state, random_superoperator)
from utils.errors import (DimensionMismatch, InvalidPredicate, NonConvergent, NonMonotone,
                          NotNormalized, NotUnitary, SignatureMismatch)
from wp.engine import (PredicateTransformer, coproduct, duality_check, extend_classical_bit,
                       extend_quantum_bit, is_precondition, seq_compose, stabilizer_check,
                       transformer_leq, wp_channel, wp_observable, wp_super)
from wp.fixpoint import (LoopDecomposition, RecursiveSpec, iterate_fixpoint,
                         iterate_monoidal_trace, monoidal_trace, recursive_fixpoint,
                         truncated_monoidal_trace, unroll_loop)

SQRT_HALF = np.sqrt(0.5)


def _random_sig(rng, max_len=4, max_dim=8):
    return Signature(dims=tuple(int(d) for d in rng.integers(1, max_dim + 1, size=rng.integers(1, max_len + 1))))


def _scalar(value):
    return KrausChannel.of(np.array([[value]], dtype=complex)) if value else KrausChannel.zero(1, 1)


def _geometric_loop():
    """Exits with amplitude sqrt(1/2) per round: partial sums 1 - 2^-k."""
    blocks = ((_scalar(0), _scalar(SQRT_HALF)),
              (_scalar(1), _scalar(SQRT_HALF)))
    f = Superoperator(Signature.of(1, 1), Signature.of(1, 1), blocks)
    return LoopDecomposition(f, (1,), (1,))


def _as_scalar(f):
    c = f.block(0, 0)
    return float(np.real(c.gram()[0, 0]))


# wp of channels and superoperators

def test_wp_channel_known_values(H, X, P0, PLUS, I2):
    assert max_norm(wp_channel(KrausChannel.of(H), P0) - PLUS) <= 1e-12
    assert max_norm(wp_channel(KrausChannel.of(X), P0) - np.diag([0, 1])) == 0
    assert max_norm(wp_channel(KrausChannel.zero(2, 2), I2)) == 0


def test_wp_channel_rejects_bad_postconditions(I2):
    with pytest.raises(DimensionMismatch):
        wp_channel(KrausChannel.identity(2), np.eye(3))
    with pytest.raises(InvalidPredicate):
        wp_channel(KrausChannel.identity(2), 2 * I2)
    assert max_norm(wp_channel(KrausChannel.identity(2), 2 * I2, validate=False) - 2 * I2) == 0


def test_wp_super_signature_checks(rng):
    f = random_superoperator(Signature.of(2), Signature.of(2, 3), rng)
    with pytest.raises(SignatureMismatch):
        wp_super(f, PredicateTuple.of(np.eye(2)))
    with pytest.raises(InvalidPredicate):
        wp_super(f, PredicateTuple.of(np.eye(2), 3 * np.eye(3)))


def test_duality_on_random_superoperators(rng):
    """tr(wp(F)(P) s) = tr(P F(s)) for sampled F, s and P."""
    for k in range(200):
        f = random_superoperator(_random_sig(rng), _random_sig(rng), rng)
        report = duality_check(f, trials=10, seed=k, tol=1e-9)
        assert report.passed, report.violations
        assert report.max_residual <= 1e-9


def test_duality_report_shape(rng):
    f = random_superoperator(Signature.of(2), Signature.of(2), rng)
    report = duality_check(f, trials=3, seed=7)
    data = report.to_json_dict()
    assert data["pass"] is True
    assert data["trials"] == 3
    assert duality_check(f, trials=3, seed=7).max_residual == report.max_residual
    with pytest.raises(ValueError):
        duality_check(f, trials=0)


def test_wp_outputs_are_predicates(rng):
    for _ in range(100):
        f = random_superoperator(_random_sig(rng), _random_sig(rng), rng)
        pre = wp_super(f, random_predicate_tuple(f.out_sig, rng))
        assert validate_predicate(pre, tol=1e-9).valid


def test_wp_of_zero_is_zero(rng):
    for _ in range(20):
        f = random_superoperator(_random_sig(rng), _random_sig(rng), rng)
        pre = wp_super(f, PredicateTuple.zero(f.out_sig))
        assert all(np.count_nonzero(e) == 0 for e in pre)


def test_wp_monotone_and_linear(rng):
    for _ in range(100):
        f = random_superoperator(_random_sig(rng, 3, 4), _random_sig(rng, 3, 4), rng)
        p = random_predicate_tuple(f.out_sig, rng)
        extra = random_predicate_tuple(f.out_sig, rng)
        q = PredicateTuple(f.out_sig, tuple((a + b) / 2 for a, b in zip(p, extra)))
        smaller = PredicateTuple(f.out_sig, tuple(a / 2 for a in p))
        wp_small, wp_q = wp_super(f, smaller), wp_super(f, q)
        assert all(loewner_leq(a, b, tol=1e-9) for a, b in zip(wp_small, wp_super(f, p)))

        a, b = rng.uniform(0, 0.5, size=2)
        mix = PredicateTuple(f.out_sig, tuple(a * x + b * y for x, y in zip(p, extra)))
        lhs = wp_super(f, mix)
        wp_p, wp_e = wp_super(f, p), wp_super(f, extra)
        rhs = PredicateTuple(f.in_sig, tuple(a * x + b * y for x, y in zip(wp_p, wp_e)))
        assert lhs.distance(rhs) <= 1e-9
        assert wp_q.distance(PredicateTuple(f.in_sig, tuple((x + y) / 2 for x, y in zip(wp_p, wp_e)))) <= 1e-9


def test_wp_observable_accepts_negative_spectrum(Z, I2):
    f = Superoperator.identity(Signature.of(2))
    pre = wp_observable(f, ObservableTuple.of(Z))
    assert isinstance(pre, ObservableTuple)
    assert max_norm(pre[0] - Z) == 0
    with pytest.raises(InvalidPredicate):
        wp_observable(f, ObservableTuple.of(2 * I2))


# Composition laws

def test_sequential_law(rng):
    for _ in range(100):
        a, b, c = (_random_sig(rng, 3, 4) for _ in range(3))
        f = random_superoperator(a, b, rng)
        g = random_superoperator(b, c, rng)
        p = random_predicate_tuple(c, rng)
        composite = wp_super(seq_compose(f, g), p)
        stepwise = wp_super(f, wp_super(g, p), validate=False)
        assert composite.distance(stepwise) <= 1e-9


def test_seq_compose_signature_check(rng):
    f = random_superoperator(Signature.of(2), Signature.of(3), rng)
    with pytest.raises(SignatureMismatch):
        seq_compose(f, f)


def test_parallel_law(rng):
    for _ in range(100):
        f = random_superoperator(_random_sig(rng, 2, 4), _random_sig(rng, 2, 4), rng)
        g = random_superoperator(_random_sig(rng, 2, 4), _random_sig(rng, 2, 4), rng)
        p = random_predicate_tuple(f.out_sig, rng)
        q = random_predicate_tuple(g.out_sig, rng)
        joint = wp_super(coproduct(f, g), p.direct_sum(q))
        separate = wp_super(f, p).direct_sum(wp_super(g, q))
        assert joint.distance(separate) <= 1e-9


def test_extensions(rng, I2):
    f = random_superoperator(Signature.of(2, 1), Signature.of(3), rng)
    p = random_predicate_tuple(f.out_sig, rng)
    doubled = extend_classical_bit(f)
    assert doubled.in_sig == Signature.of(2, 1, 2, 1)
    assert wp_super(doubled, p.direct_sum(p)).distance(wp_super(f, p).direct_sum(wp_super(f, p))) <= 1e-12

    wider = extend_quantum_bit(f)
    assert wider.in_sig == Signature.of(4, 2)
    lifted = PredicateTuple(wider.out_sig, tuple(np.kron(I2, e) for e in p))
    expected = tuple(np.kron(I2, e) for e in wp_super(f, p))
    assert all(max_norm(a - b) <= 1e-12 for a, b in zip(wp_super(wider, lifted), expected))


def test_seq_compose_compresses_long_kraus_lists(rng):
    c = random_channel(2, 2, 4, rng)
    f = Superoperator.from_channel(c)
    twice = seq_compose(f, f)
    assert twice.kraus_count() <= 4


# Transformers

def test_predicate_transformer(rng):
    f = random_superoperator(Signature.of(2, 3), Signature.of(4), rng)
    alpha = PredicateTransformer.of(f)
    assert alpha.in_sig == Signature.of(4)
    assert alpha.out_sig == Signature.of(2, 3)
    assert alpha.healthy().valid
    p = random_predicate_tuple(alpha.in_sig, rng)
    assert alpha(p).distance(wp_super(f, p)) == 0.0
    adjoint = alpha.blocks
    assert adjoint[1][0].in_dim == 4 and adjoint[1][0].out_dim == 3


def test_transformer_order(rng):
    f = random_superoperator(Signature.of(2), Signature.of(2, 2), rng)
    while f.kraus_count() == 0:
        f = random_superoperator(Signature.of(2), Signature.of(2, 2), rng)
    alpha = PredicateTransformer.of(f)
    zero = PredicateTransformer.zero(f.out_sig, f.in_sig)
    half = PredicateTransformer.of(scale_superop(0.5, f))
    assert transformer_leq(zero, alpha)
    assert transformer_leq(alpha, alpha)
    assert transformer_leq(half, alpha)
    assert not transformer_leq(alpha, half)
    with pytest.raises(SignatureMismatch):
        transformer_leq(alpha, PredicateTransformer.of(Superoperator.identity(Signature.of(2))))


def test_is_precondition(rng):
    f = random_superoperator(Signature.of(2), Signature.of(2, 2), rng)
    n = random_predicate_tuple(f.out_sig, rng)
    pre = wp_super(f, n)
    assert is_precondition(pre, f, n)
    assert is_precondition(PredicateTuple.zero(f.in_sig), f, n)
    bigger = PredicateTuple(f.in_sig, (pre[0] + 0.01 * np.eye(2),))
    assert not is_precondition(bigger, f, n)


def test_channels_with_equal_choi_have_equal_wp(rng, P0, P1):
    z = np.diag([1, -1]).astype(complex)
    a = KrausChannel.of(P0, P1)
    b = KrausChannel.of(np.eye(2) / np.sqrt(2), z / np.sqrt(2))
    for _ in range(10):
        n = random_predicate(2, rng)
        assert max_norm(wp_channel(a, n) - wp_channel(b, n)) <= 1e-12


# Loops

def test_loop_decomposition_checks(rng):
    f = random_superoperator(Signature.of(2, 3), Signature.of(2, 3), rng)
    with pytest.raises(SignatureMismatch):
        LoopDecomposition(f, (0,), (1,))
    with pytest.raises(SignatureMismatch):
        LoopDecomposition(f, (0, 1), (0, 1))
    with pytest.raises(SignatureMismatch):
        LoopDecomposition(f, (5,), (1,))
    loop = LoopDecomposition(f, (1,), (1,))
    e11, e12, e21, e22 = loop.components()
    assert (e11.in_sig, e11.out_sig) == (Signature.of(2), Signature.of(2))
    assert (e12.in_sig, e12.out_sig) == (Signature.of(2), Signature.of(3))
    assert (e21.in_sig, e21.out_sig) == (Signature.of(3), Signature.of(2))
    assert (e22.in_sig, e22.out_sig) == (Signature.of(3), Signature.of(3))


def test_geometric_loop_partial_sums():
    loop = _geometric_loop()
    sums = iterate_monoidal_trace(loop)
    for k in range(12):
        assert _as_scalar(next(sums)) == pytest.approx(1 - 2.0 ** -k, abs=1e-12)
    assert _as_scalar(truncated_monoidal_trace(loop, 0)) == 0.0
    assert _as_scalar(monoidal_trace(loop, tol=1e-12)) == pytest.approx(1.0, abs=1e-10)


def test_monoidal_trace_non_convergent():
    with pytest.raises(NonConvergent):
        monoidal_trace(_geometric_loop(), tol=1e-12, max_iter=5)


def test_divergent_loop_is_zero():
    """A loop that never exits contributes nothing."""
    blocks = ((_scalar(0), _scalar(0)),
              (_scalar(1), _scalar(1)))
    f = Superoperator(Signature.of(1, 1), Signature.of(1, 1), blocks)
    result = monoidal_trace(LoopDecomposition(f, (1,), (1,)))
    assert result.block(0, 0).is_zero


def test_truncated_trace_matches_unrolling(rng):
    for _ in range(10):
        f = random_superoperator(Signature.of(2, 2), Signature.of(2, 2), rng)
        loop = LoopDecomposition(f, (1,), (1,))
        for depth in (0, 1, 3):
            assert choi_distance(truncated_monoidal_trace(loop, depth), unroll_loop(loop, depth)) <= 1e-10


def test_partial_sums_are_increasing(rng):
    f = random_superoperator(Signature.of(2, 2), Signature.of(2, 2), rng)
    loop = LoopDecomposition(f, (1,), (1,))
    sums = iterate_monoidal_trace(loop)
    previous = next(sums)
    for _ in range(6):
        current = next(sums)
        assert transformer_leq(PredicateTransformer.of(previous), PredicateTransformer.of(current), tol=1e-8)
        previous = current


def test_monoidal_trace_on_random_loop_is_valid(rng):
    f = random_superoperator(Signature.of(2, 2), Signature.of(2, 2), rng)
    f = scale_superop(0.9, f)
    result = monoidal_trace(LoopDecomposition(f, (1,), (1,)), tol=1e-11)
    s = random_state(Signature.of(2), rng)
    assert apply_super(result, s).total_trace() <= s.total_trace() + 1e-9


# Recursion

def _coin_body(hole):
    """Halt with probability 1/2, otherwise recurse."""
    stop = scale_superop(0.5, Superoperator.identity(Signature.of(1)))
    return superop_sum(stop, scale_superop(0.5, hole))


def test_recursive_fixpoint_converges():
    spec = RecursiveSpec(_coin_body, Signature.of(1), Signature.of(1))
    result = recursive_fixpoint(spec, tol=1e-10)
    assert superop_equivalent(result, Superoperator.identity(Signature.of(1)), tol=1e-6)
    assert superop_equivalent(result, monoidal_trace(_geometric_loop()), tol=1e-6)


def test_recursive_fixpoint_identity_body_is_zero():
    spec = RecursiveSpec(lambda hole: hole, Signature.of(2), Signature.of(2))
    result = recursive_fixpoint(spec)
    assert choi_distance(result, Superoperator.zero(Signature.of(2), Signature.of(2))) == 0.0


def test_fixpoint_iterates_start_from_zero():
    spec = RecursiveSpec(_coin_body, Signature.of(1), Signature.of(1))
    iterates = iterate_fixpoint(spec)
    assert next(iterates).kraus_count() == 0
    assert _as_scalar(next(iterates)) == pytest.approx(0.5)
    assert _as_scalar(next(iterates)) == pytest.approx(0.75)


def test_recursive_fixpoint_errors():
    spec = RecursiveSpec(_coin_body, Signature.of(1), Signature.of(1))
    with pytest.raises(NonConvergent):
        recursive_fixpoint(spec, tol=1e-12, max_iter=3)

    def flapping(hole):
        sig = Signature.of(1)
        return Superoperator.zero(sig, sig) if hole.kraus_count() else Superoperator.identity(sig)

    with pytest.raises(NonMonotone):
        recursive_fixpoint(RecursiveSpec(flapping, Signature.of(1), Signature.of(1)))

    with pytest.raises(SignatureMismatch):
        recursive_fixpoint(RecursiveSpec(lambda hole: Superoperator.identity(Signature.of(2)),
                                         Signature.of(1), Signature.of(1)))


# Stabilizers

def test_stabilizer_check(X, Z, I2):
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    zero = np.array([1, 0, 0, 0], dtype=complex)
    assert stabilizer_check(np.kron(Z, Z), bell)
    assert stabilizer_check(np.kron(X, X), bell)
    assert stabilizer_check(np.kron(Z, I2), zero)
    assert stabilizer_check(np.kron(I2, Z), zero)
    assert not stabilizer_check(np.kron(X, I2), zero)
    assert not stabilizer_check(-np.kron(Z, Z), bell)


def test_stabilizer_check_errors(Z):
    with pytest.raises(NotUnitary):
        stabilizer_check(2 * Z, np.array([1, 0]))
    with pytest.raises(NotNormalized):
        stabilizer_check(Z, np.array([1, 1]))
    with pytest.raises(DimensionMismatch):
        stabilizer_check(Z, np.array([1, 0, 0, 0]))


def test_expectation_of_wp_equals_forward_probability(rng):
    f = random_superoperator(Signature.of(3), Signature.of(2, 2), rng)
    s = random_state(f.in_sig, rng)
    p = random_predicate_tuple(f.out_sig, rng)
    assert expectation(s, wp_super(f, p)) == pytest.approx(expectation(apply_super(f, s), p), abs=1e-12)


def test_branch_aware_discard(rng, I2):
    """Discard whose Kraus operator in branch k is <k| ⊗ I."""
    bras = [np.kron(np.eye(2)[[k]], I2) for k in (0, 1)]
    f = Superoperator.diagonal([KrausChannel(4, 2, (bras[0],)), KrausChannel(4, 2, (bras[1],))])
    m1, m2 = random_predicate(2, rng), random_predicate(2, rng)
    pre = wp_super(f, PredicateTuple.of(m1, m2))
    zero = np.zeros((2, 2))
    assert max_norm(pre[0] - np.block([[m1, zero], [zero, zero]])) <= 1e-12
    assert max_norm(pre[1] - np.block([[zero, zero], [zero, m2]])) <= 1e-12
