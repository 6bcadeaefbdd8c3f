"""Dense complex-matrix kernel: states, norms, entropies and tensor operations.

Conventions used throughout the package:

- matrices are ``numpy.ndarray`` of dtype complex128, row-major;
- the Kronecker product follows the standard index convention
  ``(A ⊗ B)[i*rb + k, j*cb + l] = A[i, j] * B[k, l]``;
- entropies and all bit accounting use the base-2 logarithm.
"""

from __future__ import annotations

import math

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-10


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M†)/2; bounds floating-point drift after channel maps."""
    return (m + m.conj().T) / 2


def assert_square(x: np.ndarray) -> None:
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {x.shape}")


def assert_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x.real)) or not np.all(np.isfinite(x.imag)):
        raise ValueError("matrix contains non-finite entries")


def assert_unitary(u: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    """Raise ValueError unless max |U†U - 1| <= tol."""
    assert_square(u)
    assert_finite(u)
    d = u.shape[0]
    dev = np.abs(u.conj().T @ u - np.eye(d)).max()
    if dev > tol:
        raise ValueError(f"matrix is not unitary: max |U†U - 1| = {dev:.3e}")


def assert_density_matrix(rho: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and PSD within tol."""
    assert_square(rho)
    assert_finite(rho)
    herm_dev = np.abs(rho - rho.conj().T).max()
    if herm_dev > tol:
        raise ValueError(f"state is not Hermitian: max |M - M†| = {herm_dev:.3e}")
    tr_dev = abs(np.trace(rho) - 1.0)
    if tr_dev > TRACE_TOL:
        raise ValueError(f"state trace differs from 1 by {tr_dev:.3e}")
    min_eig = np.linalg.eigvalsh(hermitize(rho)).min()
    if min_eig < -EIGENVALUE_TOL:
        raise ValueError(f"state has negative eigenvalue {min_eig:.3e}")


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the standard row-major index convention."""
    return np.kron(a, b)


def tensor(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of several factors, left to right."""
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def partial_trace(rho: np.ndarray, dims: tuple[int, ...], keep) -> np.ndarray:
    """Reduced state on the kept subsystem(s).

    Parameters
    ----------
    rho : ndarray
        State on the full tensor-product space, dimension prod(dims).
    dims : tuple of int
        Dimension of each tensor factor, in order.
    keep : int or sequence of int
        Index (or indices, kept in the given order) of the factor(s) to keep.

    Raises
    ------
    ValueError
        If the bipartition does not match the state dimension.
    """
    assert_square(rho)
    dims = tuple(int(d) for d in dims)
    total = math.prod(dims)
    if rho.shape[0] != total:
        raise ValueError(
            f"state dimension {rho.shape[0]} does not match subsystem dims {dims}"
        )
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(int(k) for k in keep)
    n = len(dims)
    if not keep or any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid subsystem selection {keep} for {n} factors")

    t = rho.reshape(dims + dims)
    # Contract the traced-out row/column index pairs, highest index first.
    remaining = list(dims)
    for idx in sorted((i for i in range(n) if i not in keep), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + len(remaining))
        del remaining[idx]
    # Axes of t now follow the kept factors in ascending order; reorder to `keep`.
    ascending = sorted(keep)
    perm = [ascending.index(k) for k in keep]
    t = t.transpose(tuple(perm) + tuple(len(keep) + p for p in perm))
    d_keep = math.prod(dims[k] for k in keep)
    return np.ascontiguousarray(t.reshape(d_keep, d_keep))


def trace_norm(x: np.ndarray) -> float:
    """Schatten-1 norm: sum of singular values. Requires a square matrix."""
    assert_square(x)
    return float(np.linalg.svd(x, compute_uv=False).sum())


def hs_norm(x: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm sqrt(tr X†X)."""
    return float(np.sqrt((np.abs(x) ** 2).sum()))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy -sum(lam * log2 lam) in bits, with 0 log 0 = 0.

    Eigenvalues in [-1e-10, 0) are numerical noise and are clamped to 0;
    anything more negative should already have failed the state invariant.
    """
    eigs = np.linalg.eigvalsh(hermitize(rho))
    eigs = eigs[eigs > 0.0]
    if eigs.size == 0:
        return 0.0
    return float(-(eigs * np.log2(eigs)).sum())


def purity(rho: np.ndarray) -> float:
    """tr(rho^2); 1 for pure states, 1/d for the maximally mixed state."""
    return float(np.real(np.trace(rho @ rho)))


def mutual_information(rho_ab: np.ndarray, dims: tuple[int, int]) -> float:
    """S[A] + S[B] - S[AB] in bits; tiny negative results (>= -1e-8) clamp to 0."""
    da, db = int(dims[0]), int(dims[1])
    if rho_ab.shape[0] != da * db:
        raise ValueError(
            f"state dimension {rho_ab.shape[0]} does not match bipartition ({da}, {db})"
        )
    s_a = von_neumann_entropy(partial_trace(rho_ab, (da, db), keep=0))
    s_b = von_neumann_entropy(partial_trace(rho_ab, (da, db), keep=1))
    s_ab = von_neumann_entropy(rho_ab)
    value = s_a + s_b - s_ab
    if -1e-8 <= value < 0.0:
        return 0.0
    return value


def maximally_entangled_state(d: int) -> np.ndarray:
    """Rank-1 state (1/d) sum_ij |ii><jj| on dimension d^2."""
    if d < 2:
        raise ValueError(f"maximally entangled state needs d >= 2, got {d}")
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * d + np.arange(d)] = 1.0 / math.sqrt(d)
    return np.outer(psi, psi.conj())


def maximally_mixed(d: int) -> np.ndarray:
    """(1/d) * identity."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return np.eye(d, dtype=complex) / d
