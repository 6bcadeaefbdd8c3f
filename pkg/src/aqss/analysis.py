"""Monte Carlo estimators and inequality checkers for the sharing bounds.

Trials are independent: trial i draws everything it needs from its own RNG
stream (master_seed, i), and the aggregate is a deterministic ordered fold
over the trial index, so results are bit-identical for a fixed seed no
matter how trials would be scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .channels import (
    ChannelFamily,
    RandomUnitaryChannel,
    apply,
    apply_product,
    sample_ruc,
)
from .random import (
    haar_unitary,
    random_product_pure_state,
    random_separable_state,
    stream,
)

BOUND_SLACK = 1e-12

INPUT_FAMILIES = ("product_pure", "separable", "max_entangled")

# A sampler (d, n, rng) -> channel; the default draws i.i.d. Haar unitaries.
ChannelFactory = Callable[[int, int, np.random.Generator], RandomUnitaryChannel]


@dataclass(frozen=True)
class McStats:
    """Aggregate of one Monte Carlo run, with the raw per-trial values."""

    mean: float
    stderr: float
    trials: int
    master_seed: int
    per_trial_values: tuple[float, ...]

    @classmethod
    def from_values(cls, values: Sequence[float], master_seed: int) -> "McStats":
        values = tuple(float(v) for v in values)
        n = len(values)
        if n == 0:
            raise ValueError("cannot aggregate an empty trial list")
        mean = float(np.mean(values))
        stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(
            mean=mean,
            stderr=stderr,
            trials=n,
            master_seed=master_seed,
            per_trial_values=values,
        )


@dataclass(frozen=True)
class BoundCheck:
    """One observed-vs-bound comparison; satisfied iff observed <= bound + 1e-12."""

    observed: float
    bound: float
    satisfied: bool
    slack: float

    @classmethod
    def compare(cls, observed: float, bound: float) -> "BoundCheck":
        observed = float(observed)
        bound = float(bound)
        return cls(
            observed=observed,
            bound=bound,
            satisfied=observed <= bound + BOUND_SLACK,
            slack=bound - observed,
        )


def draw_input(family: str, d: int, rng: np.random.Generator) -> np.ndarray:
    if family == "product_pure":
        return random_product_pure_state(d, d, rng)
    if family == "separable":
        return random_separable_state(d, d, 4, rng)
    if family == "max_entangled":
        return linalg.maximally_entangled_state(d)
    raise ValueError(f"unknown input family {family!r}; expected one of {INPUT_FAMILIES}")


def mc_expected_trace_distance(
    d: int,
    n_a: int,
    n_b: int,
    input_family: str,
    trials: int,
    seed: int,
    channel_factory: ChannelFactory = sample_ruc,
) -> tuple[McStats, BoundCheck]:
    """Mean trace distance of fresh product-channel outputs from 1/d^2.

    Every trial draws two fresh channels and a fresh input from the family,
    so the mean estimates the expectation over the unitary ensembles. The
    returned check compares the mean against d/sqrt(n_a*n_b); that target is
    meaningful for product_pure inputs only — for the other families the
    check is informational and callers should not treat it as an assertion.
    """
    if input_family not in INPUT_FAMILIES:
        raise ValueError(
            f"unknown input family {input_family!r}; expected one of {INPUT_FAMILIES}"
        )
    if trials < 10:
        raise ValueError(f"need at least 10 trials, got {trials}")
    target = linalg.maximally_mixed(d * d)
    values = []
    for trial in range(trials):
        rng = stream(seed, trial)
        family = ChannelFamily(
            (channel_factory(d, n_a, rng), channel_factory(d, n_b, rng))
        )
        rho = draw_input(input_family, d, rng)
        out = apply_product(family, rho)
        values.append(linalg.trace_norm(out - target))
    stats = McStats.from_values(values, seed)
    return stats, BoundCheck.compare(stats.mean, d / math.sqrt(n_a * n_b))


def purity_second_moment(d: int, n_a: int, n_b: int) -> float:
    """Large-n value 1/(n_a*n_b) + 1/d^2 for the expected output purity."""
    return 1.0 / (n_a * n_b) + 1.0 / (d * d)


def mc_purity(
    d: int,
    n_a: int,
    n_b: int,
    trials: int,
    seed: int,
    channel_factory: ChannelFactory = sample_ruc,
) -> tuple[McStats, BoundCheck]:
    """Mean purity of product-channel outputs on fresh product pure inputs.

    The check is the five-standard-error identity test
    |mean - (1/(n_a*n_b) + 1/d^2)| <= 5 * stderr.
    """
    if trials < 30:
        raise ValueError(f"need at least 30 trials, got {trials}")
    values = []
    for trial in range(trials):
        rng = stream(seed, trial)
        family = ChannelFamily(
            (channel_factory(d, n_a, rng), channel_factory(d, n_b, rng))
        )
        rho = random_product_pure_state(d, d, rng)
        values.append(linalg.purity(apply_product(family, rho)))
    stats = McStats.from_values(values, seed)
    deviation = abs(stats.mean - purity_second_moment(d, n_a, n_b))
    return stats, BoundCheck.compare(deviation, 5.0 * stats.stderr)


def check_separable_2eps(
    chan_a: RandomUnitaryChannel,
    chan_b: RandomUnitaryChannel,
    decomposition: Sequence[tuple[float, np.ndarray, np.ndarray]],
) -> BoundCheck:
    """Triangle-inequality bound for an explicitly separable input.

    Given the input sum_i p_i rho_A,i (x) rho_B,i, the product-channel
    output must be within eps_A + eps_B of 1/d^2, where eps_A is the worst
    single-factor randomizing distance over the decomposition terms (and
    likewise eps_B). Violation indicates a numerics bug, not physics.
    """
    weights = np.array([p for p, _, _ in decomposition], dtype=float)
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError(f"decomposition weights sum to {weights.sum()!r}, not 1")
    d_a, d_b = chan_a.dim, chan_b.dim
    eps_a = max(
        linalg.trace_norm(apply(chan_a, rho_a) - linalg.maximally_mixed(d_a))
        for _, rho_a, _ in decomposition
    )
    eps_b = max(
        linalg.trace_norm(apply(chan_b, rho_b) - linalg.maximally_mixed(d_b))
        for _, _, rho_b in decomposition
    )
    joint = sum(p * np.kron(rho_a, rho_b) for p, rho_a, rho_b in decomposition)
    out = apply_product(ChannelFamily((chan_a, chan_b)), joint)
    observed = linalg.trace_norm(out - linalg.maximally_mixed(d_a * d_b))
    return BoundCheck.compare(observed, eps_a + eps_b)


def entropy_deficit(state: np.ndarray, d_total_log2: float) -> float:
    """How many bits the state's entropy falls short of the stated maximum."""
    return float(d_total_log2) - linalg.von_neumann_entropy(state)


def product_basis_total_variation(
    state: np.ndarray,
    reference: np.ndarray,
    dims: tuple[int, int],
    basis_a: np.ndarray,
    basis_b: np.ndarray,
) -> float:
    """sum_ab |p_ab - q_ab| for the product projective measurement whose
    outcome vectors are the columns of basis_a (x) basis_b."""
    d_a, d_b = int(dims[0]), int(dims[1])
    if state.shape[0] != d_a * d_b or reference.shape[0] != d_a * d_b:
        raise ValueError(
            f"states of dimension {state.shape[0]}/{reference.shape[0]} do not match dims {dims}"
        )
    v = np.kron(basis_a, basis_b)
    p = np.real(np.diagonal(v.conj().T @ state @ v))
    q = np.real(np.diagonal(v.conj().T @ reference @ v))
    return float(np.abs(p - q).sum())


def locc_distinguishability(
    state: np.ndarray,
    reference: np.ndarray,
    dims: tuple[int, int],
    num_settings: int,
    seed: int,
) -> float:
    """Worst one-round local distinguishing advantage found by sampling.

    Each setting measures both states in an independent pair of Haar-random
    local bases (product projective POVM) and accumulates the total
    variation distance of the outcome distributions; the computational basis
    is always included as a deterministic baseline setting. Returns the
    maximum over settings, a value in [0, 2].
    """
    if num_settings < 0:
        raise ValueError(f"number of settings must be nonnegative, got {num_settings}")
    d_a, d_b = int(dims[0]), int(dims[1])
    worst = product_basis_total_variation(
        state, reference, dims, np.eye(d_a, dtype=complex), np.eye(d_b, dtype=complex)
    )
    rng = stream(seed)
    for _ in range(num_settings):
        basis_a = haar_unitary(d_a, rng)
        basis_b = haar_unitary(d_b, rng)
        worst = max(
            worst,
            product_basis_total_variation(state, reference, dims, basis_a, basis_b),
        )
    return worst


def check_norm_relation(x: np.ndarray, d_sq: int) -> BoundCheck:
    """Rank-bound norm relation ||X - 1/D||_1^2 <= D ||X||_2^2 - 1 for unit-trace
    Hermitian X on dimension D = d_sq."""
    linalg.assert_square(x)
    if x.shape[0] != d_sq:
        raise ValueError(f"matrix dimension {x.shape[0]} does not match d_sq={d_sq}")
    if np.abs(x - x.conj().T).max() > linalg.HERMITIAN_TOL:
        raise ValueError("norm relation requires a Hermitian matrix")
    if abs(np.trace(x) - 1.0) > linalg.TRACE_TOL:
        raise ValueError(f"norm relation requires unit trace, got {np.trace(x)!r}")
    lhs = linalg.trace_norm(x - linalg.maximally_mixed(d_sq)) ** 2
    rhs = d_sq * linalg.hs_norm(x) ** 2 - 1.0
    return BoundCheck.compare(lhs, rhs)


def jensen_chain_check(mc: McStats) -> BoundCheck:
    """First-moment/second-moment consistency: mean(Y) <= sqrt(mean(Y^2))."""
    values = np.array(mc.per_trial_values, dtype=float)
    return BoundCheck.compare(values.mean(), math.sqrt(np.mean(values**2)))
