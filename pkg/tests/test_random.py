import math

import numpy as np
import pytest

from aqss import linalg
from aqss.random import (
    ginibre_matrix,
    haar_unitaries,
    haar_unitary,
    random_product_pure_state,
    random_pure_state,
    random_separable_state,
    stream,
    weyl_heisenberg_operators,
)


def test_stream_determinism():
    a = stream(123, 4).standard_normal(8)
    b = stream(123, 4).standard_normal(8)
    assert np.array_equal(a, b)


def test_stream_ids_differ():
    a = stream(123, 0).standard_normal(8)
    b = stream(123, 1).standard_normal(8)
    assert not np.array_equal(a, b)


def test_ginibre_deterministic():
    assert np.array_equal(ginibre_matrix(3, stream(7)), ginibre_matrix(3, stream(7)))


def test_ginibre_moments():
    rng = stream(303)
    z = np.stack([ginibre_matrix(2, rng) for _ in range(10000)])
    for part in (z.real.ravel(), z.imag.ravel()):
        se = part.std(ddof=1) / math.sqrt(part.size)
        assert abs(part.mean()) <= 5 * se
    m2 = (np.abs(z) ** 2).ravel()
    se = m2.std(ddof=1) / math.sqrt(m2.size)
    assert abs(m2.mean() - 1.0) <= 5 * se


def test_ginibre_rejects_bad_dim():
    with pytest.raises(ValueError):
        ginibre_matrix(0, stream(1))


@pytest.mark.parametrize("d", [2, 4, 8])
def test_haar_unitarity(d):
    u = haar_unitaries(d, 100, stream(21, d))
    dev = np.abs(np.einsum("nji,njk->nik", u.conj(), u) - np.eye(d)).max()
    assert dev <= 1e-10


def test_haar_deterministic():
    assert np.array_equal(haar_unitary(4, stream(9)), haar_unitary(4, stream(9)))


def test_haar_first_moment_twirls_to_mixed():
    # E_U U|0><0|U† = 1/d, checked entrywise at five standard errors.
    n, d = 20000, 2
    u = haar_unitaries(d, n, stream(101))
    cols = u[:, :, 0]
    samples = cols[:, :, None] * cols.conj()[:, None, :]
    target = np.eye(d) / d
    for part, tgt in ((samples.real, target.real), (samples.imag, target.imag)):
        se = part.std(axis=0, ddof=1) / math.sqrt(n)
        assert (np.abs(part.mean(axis=0) - tgt) <= 5 * se + 1e-12).all()


def test_haar_mean_overlap():
    # E_U tr(U phi U† psi) = 1/d for fixed pure phi, psi.
    n, d = 20000, 4
    u = haar_unitaries(d, n, stream(202))
    phi = np.zeros(d, dtype=complex)
    phi[0] = 1.0
    psi = np.zeros(d, dtype=complex)
    psi[1] = 1.0
    vals = np.abs(np.einsum("i,nij,j->n", psi.conj(), u, phi)) ** 2
    se = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - 1 / d) <= 5 * se


def test_weyl_heisenberg_qubit_set():
    ops = weyl_heisenberg_operators(2)
    eye = np.eye(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    assert np.abs(ops[0] - eye).max() <= 1e-12
    assert np.abs(ops[1] - z).max() <= 1e-12
    assert np.abs(ops[2] - x).max() <= 1e-12
    assert np.abs(ops[3] - x @ z).max() <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
def test_weyl_heisenberg_unitary(d):
    ops = weyl_heisenberg_operators(d)
    assert ops.shape == (d * d, d, d)
    for op in ops:
        linalg.assert_unitary(op)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_weyl_heisenberg_full_twirl_is_exact(d):
    # Brute-force sum over all d^2 conjugations: the exact-randomizer oracle.
    rng = stream(33, d)
    ops = weyl_heisenberg_operators(d)
    for _ in range(20):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        twirled = sum(op @ rho @ op.conj().T for op in ops) / (d * d)
        assert np.abs(twirled - np.eye(d) / d).max() <= 1e-12


def test_weyl_heisenberg_rejects_small_d():
    with pytest.raises(ValueError):
        weyl_heisenberg_operators(1)


def test_random_pure_state_invariants():
    rng = stream(44)
    for d in (1, 2, 5):
        rho = random_pure_state(d, rng)
        assert linalg.purity(rho) == pytest.approx(1.0, abs=1e-12)
        assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
        assert linalg.von_neumann_entropy(rho) <= 1e-8


def test_random_product_pure_state_invariants():
    rng = stream(45)
    rho = random_product_pure_state(3, 4, rng)
    assert linalg.purity(rho) == pytest.approx(1.0, abs=1e-12)
    assert linalg.mutual_information(rho, (3, 4)) == pytest.approx(0.0, abs=1e-8)
    for keep in (0, 1):
        red = linalg.partial_trace(rho, (3, 4), keep=keep)
        assert linalg.purity(red) == pytest.approx(1.0, abs=1e-10)


def test_random_separable_state_invariants():
    rng = stream(46)
    for _ in range(50):
        rho = random_separable_state(2, 3, 4, rng)
        linalg.assert_density_matrix(rho)


def test_random_separable_single_term_is_product_pure():
    rho = random_separable_state(2, 2, 1, stream(47))
    assert linalg.purity(rho) == pytest.approx(1.0, abs=1e-12)
    assert linalg.mutual_information(rho, (2, 2)) == pytest.approx(0.0, abs=1e-8)


def test_random_separable_rejects_zero_terms():
    with pytest.raises(ValueError):
        random_separable_state(2, 2, 0, stream(48))
