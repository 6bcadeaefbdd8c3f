"""Deterministic, seedable sampling of Haar-random unitaries and test states.

Every sampler takes an explicit ``numpy.random.Generator``; a generator built
with :func:`stream` is fully determined by ``(master_seed, stream_id)``, and
distinct stream ids give statistically independent sequences. Parallel
Monte Carlo trials derive one stream per trial index, so results do not
depend on scheduling.
"""

from __future__ import annotations

import numpy as np


def stream(master_seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent, reproducible RNG stream keyed by (master_seed, stream_id)."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(stream_id,))
    )


def ginibre_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    """d x d matrix of i.i.d. standard complex Gaussians, E|entry|^2 = 1."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)


def haar_unitaries(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of n independent Haar-random d x d unitaries, shape (n, d, d).

    QR decomposition of a Ginibre matrix, with Q's columns rescaled by the
    phases of R's diagonal so the distribution is exactly Haar (the plain QR
    output is not unique and not Haar without this correction).
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if n < 1:
        raise ValueError(f"sample count must be positive, got {n}")
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2).copy()
    # A zero diagonal entry has probability zero; resample the offending draws.
    bad = np.abs(diag) < 1e-300
    while bad.any():
        rows = np.unique(np.nonzero(bad)[0])
        z2 = (
            rng.standard_normal((rows.size, d, d))
            + 1j * rng.standard_normal((rows.size, d, d))
        ) / np.sqrt(2)
        q2, r2 = np.linalg.qr(z2)
        q[rows] = q2
        diag[rows] = np.diagonal(r2, axis1=1, axis2=2)
        bad = np.abs(diag) < 1e-300
    return q * (diag / np.abs(diag))[:, None, :]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Single Haar-random unitary."""
    return haar_unitaries(d, 1, rng)[0]


def weyl_heisenberg_operators(d: int) -> np.ndarray:
    """The d^2 generalized Pauli operators X^a Z^b, stacked as shape (d^2, d, d).

    X|k> = |k+1 mod d>, Z|k> = w^k |k> with w = exp(2*pi*i/d). Ordered with a
    as the outer index: operator a*d + b is X^a Z^b. Uniform conjugation over
    the full set maps every state exactly to the maximally mixed state.
    """
    if d < 2:
        raise ValueError(f"generalized Pauli set needs d >= 2, got {d}")
    omega = np.exp(2j * np.pi / d)
    x = np.zeros((d, d), dtype=complex)
    x[(np.arange(d) + 1) % d, np.arange(d)] = 1.0
    z = np.diag(omega ** np.arange(d))
    ops = np.empty((d * d, d, d), dtype=complex)
    xa = np.eye(d, dtype=complex)
    for a in range(d):
        zb = np.eye(d, dtype=complex)
        for b in range(d):
            ops[a * d + b] = xa @ zb
            zb = zb @ z
        xa = xa @ x
    return ops


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """|psi><psi| for a Haar-random unit vector (first column of a Haar unitary)."""
    psi = haar_unitary(d, rng)[:, 0]
    return np.outer(psi, psi.conj())


def random_product_pure_state(da: int, db: int, rng: np.random.Generator) -> np.ndarray:
    """Tensor product of two independent Haar-random pure states."""
    return np.kron(random_pure_state(da, rng), random_pure_state(db, rng))


def random_separable_state(
    da: int, db: int, k_terms: int, rng: np.random.Generator
) -> np.ndarray:
    """Convex mixture of k_terms random product pure states.

    Mixture weights are uniform on the simplex (flat Dirichlet); the factors
    of each term are independent Haar-random pure states.
    """
    if k_terms < 1:
        raise ValueError(f"need at least one mixture term, got {k_terms}")
    weights = rng.dirichlet(np.ones(k_terms))
    rho = np.zeros((da * db, da * db), dtype=complex)
    for p in weights:
        rho += p * random_product_pure_state(da, db, rng)
    return rho
