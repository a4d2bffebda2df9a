# Random valid states, predicates and channels for property checks and duality sampling

from typing import Optional

import numpy as np

from quantum.domain import (DensityState, KrausChannel, PredicateTuple, Signature,
                            Superoperator)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase fix."""
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density(d: int, rng: np.random.Generator, trace: float = 1.0) -> np.ndarray:
    """Random positive matrix of the given trace."""
    g = _ginibre(rng, d, d)
    rho = g @ g.conj().T
    return trace * rho / np.real(np.trace(rho))


def random_predicate(d: int, rng: np.random.Generator) -> np.ndarray:
    """U diag(λ) U† with λ uniform in [0, 1]."""
    u = random_unitary(d, rng)
    return (u * rng.uniform(0.0, 1.0, size=d)) @ u.conj().T


def random_observable(d: int, rng: np.random.Generator) -> np.ndarray:
    u = random_unitary(d, rng)
    return (u * rng.uniform(-1.0, 1.0, size=d)) @ u.conj().T


def random_state(sig: Signature, rng: np.random.Generator,
                 total_trace: Optional[float] = None) -> DensityState:
    """
    Random state tuple; the total trace is split across entries at random.

    Args:
        sig: Signature of the tuple
        rng: Seeded generator
        total_trace: Total trace, drawn from (0.5, 1] when omitted
    """
    total = rng.uniform(0.5, 1.0) if total_trace is None else total_trace
    weights = rng.dirichlet(np.ones(len(sig))) * total
    return DensityState(sig, tuple(random_density(d, rng, w) for d, w in zip(sig, weights)))


def random_predicate_tuple(sig: Signature, rng: np.random.Generator) -> PredicateTuple:
    return PredicateTuple(sig, tuple(random_predicate(d, rng) for d in sig))


def random_channel(in_dim: int, out_dim: int, n_kraus: int, rng: np.random.Generator,
                   trace_preserving: bool = False) -> KrausChannel:
    """
    Random channel with n_kraus terms.

    Trace-preserving channels use E_k = A_k G^{-1/2}; otherwise the operators
    are scaled so the largest eigenvalue of sum E†E is drawn from (0.5, 1].
    """
    ops = [_ginibre(rng, out_dim, in_dim) for _ in range(n_kraus)]
    gram = sum(a.conj().T @ a for a in ops)
    w, v = np.linalg.eigh(gram)
    if trace_preserving:
        inv_root = (v / np.sqrt(w)) @ v.conj().T
        ops = [a @ inv_root for a in ops]
    else:
        factor = np.sqrt(rng.uniform(0.5, 1.0) / w[-1])
        ops = [factor * a for a in ops]
    return KrausChannel(in_dim, out_dim, tuple(ops))


def random_superoperator(in_sig: Signature, out_sig: Signature, rng: np.random.Generator,
                         max_kraus: int = 4) -> Superoperator:
    """
    Random block superoperator with up to max_kraus terms per block.

    Each input column is normalized as a whole so the summed Kraus condition
    over all output blocks holds.
    """
    raw = [[[_ginibre(rng, dj, di) for _ in range(rng.integers(0, max_kraus + 1))]
            for di in in_sig] for dj in out_sig]
    for i, di in enumerate(in_sig):
        gram = np.zeros((di, di), dtype=np.complex128)
        for j in range(len(out_sig)):
            for a in raw[j][i]:
                gram += a.conj().T @ a
        top = np.linalg.eigvalsh(gram)[-1]
        if top <= 0:
            continue
        factor = np.sqrt(rng.uniform(0.5, 1.0) / top)
        for j in range(len(out_sig)):
            raw[j][i] = [factor * a for a in raw[j][i]]
    blocks = tuple(
        tuple(KrausChannel(di, dj, tuple(raw[j][i])) for i, di in enumerate(in_sig))
        for j, dj in enumerate(out_sig))
    return Superoperator(in_sig, out_sig, blocks)
