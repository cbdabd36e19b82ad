"""Iterative approximation of a photon-space unitary by reachable evolutions.

Each step takes the principal logarithm of what remains to be done,
projects it onto the reachable subalgebra, and moves along that geodesic:

    U_{i+1} = U_i exp(v_T),   v = log(U_i† U_target).

The same real projection coefficients applied to the basis preimages update
an m x m scattering matrix alongside, so every iterate carries an exact
witness of membership in the reachable subgroup. Multi-start exploration
draws Haar-random scattering matrices from per-run derived seeds and
clusters the fixed points it finds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalInstabilityError, ShapeError
from .homomorphism import evolution_matrix
from .lie import ImageBasis, distance, matrix_exp, polar_unitary, principal_log, project
from .validate import require_unitary

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
DEFAULT_CLUSTER_TOL = 1e-4

#: Iterates are polar-projected back to the unitary group this often; large
#: enough that short reference runs are bit-for-bit unaffected.
REUNITARIZE_EVERY = 25

#: Exact arithmetic guarantees d_{i+1} <= ||v_N^i|| and the geodesic norm
#: ||v^{i+1}|| <= ||v_N^i|| at every step; excesses beyond this slack are
#: reported as numerical instability rather than absorbed. (The Frobenius
#: distance itself may legitimately rise on early steps; only the geodesic
#: distance is monotone.)
MONOTONICITY_SLACK = 1e-6

#: Bound on ||lift(scattering) - evolution|| for the returned result.
WITNESS_TOL = 1e-8

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class IterationRecord:
    """Distance and projection norms observed at one step of a run."""

    step: int
    distance: float
    tangent_norm: float
    normal_norm: float


@dataclass(eq=False)
class ApproxResult:
    """Outcome of one approximation run.

    ``evolution`` is the closest reachable M x M matrix found and
    ``scattering`` the m x m matrix realizing it, so that
    ``evolution_matrix(scattering) == evolution`` to within the witness
    tolerance. ``trace[i]`` describes the iterate after i updates;
    ``matrix_trace`` additionally holds the (scattering, evolution) pair per
    recorded step when the run was asked to keep them.
    """

    evolution: np.ndarray
    scattering: np.ndarray
    final_distance: float
    iterations: int
    converged: bool
    trace: list[IterationRecord]
    matrix_trace: list[tuple[np.ndarray, np.ndarray]] | None = None


def approximate(U, start, image_basis: ImageBasis,
                tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                *, keep_matrices: bool = False) -> ApproxResult:
    """Run the projection iteration from one scattering-matrix seed.

    Args:
        U: target M x M unitary in the coordinate system of
            ``image_basis.basis``.
        start: m x m unitary seed; the identity reproduces the plain
            iteration, Haar draws explore other local optima.
        image_basis: orthonormal basis of the reachable subalgebra.
        tol: stop once the tangent-component norm falls below this.
        max_iter: maximum number of multiplicative updates.
        keep_matrices: record the (scattering, evolution) pair at every
            step, for invariant checks.

    At every step the new distance and the new geodesic norm are checked
    against the previous normal-component norm, the inequalities exact
    arithmetic guarantees; a violation beyond MONOTONICITY_SLACK raises
    NumericalInstabilityError with the offending step index.
    """
    fb = image_basis.basis
    U = require_unitary(U, "target")
    if U.shape[0] != len(fb):
        raise ShapeError(
            f"target dimension {U.shape[0]} does not match basis dimension {len(fb)}")
    S = require_unitary(start, "start")
    if S.shape[0] != fb.m:
        raise ShapeError(
            f"start dimension {S.shape[0]} does not match mode count {fb.m}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    Ui = evolution_matrix(S, fb)
    trace: list[IterationRecord] = []
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    converged = False
    prev_normal = math.inf
    for step in range(max_iter + 1):
        v = principal_log(Ui.conj().T @ U)
        v_T, v_N, coeffs = project(v, image_basis)
        d = distance(Ui, U)
        if d > prev_normal + MONOTONICITY_SLACK:
            raise NumericalInstabilityError(
                f"distance {d:.12e} exceeds previous normal norm {prev_normal:.12e}",
                step=step)
        tangent_norm = float(np.linalg.norm(v_T))
        normal_norm = float(np.linalg.norm(v_N))
        if math.hypot(tangent_norm, normal_norm) > prev_normal + MONOTONICITY_SLACK:
            raise NumericalInstabilityError(
                f"geodesic norm {math.hypot(tangent_norm, normal_norm):.12e} exceeds "
                f"previous normal norm {prev_normal:.12e}", step=step)
        trace.append(IterationRecord(step, d, tangent_norm, normal_norm))
        if keep_matrices:
            pairs.append((S.copy(), Ui.copy()))
        prev_normal = normal_norm
        if tangent_norm < tol:
            converged = True
            break
        if step == max_iter:
            break
        h = np.einsum("k,kij->ij", coeffs, image_basis.preimages)
        S = S @ matrix_exp(h)
        Ui = Ui @ matrix_exp(v_T)
        if (step + 1) % REUNITARIZE_EVERY == 0:
            S = polar_unitary(S)
            Ui = polar_unitary(Ui)

    witness = distance(evolution_matrix(S, fb), Ui)
    if witness > WITNESS_TOL:
        raise NumericalInstabilityError(
            f"scattering-matrix witness drifted to {witness:.3e}",
            step=trace[-1].step)
    return ApproxResult(
        evolution=Ui,
        scattering=S,
        final_distance=distance(Ui, U),
        iterations=trace[-1].step,
        converged=converged,
        trace=trace,
        matrix_trace=pairs if keep_matrices else None,
    )


def derive_seed(rng_seed: int, index: int) -> int:
    """Per-run seed, stable across platforms and processes.

    Serial and parallel multi-start schedules draw identical matrices
    because run i depends only on (rng_seed, i).
    """
    ss = np.random.SeedSequence(entropy=int(rng_seed) & _MASK64,
                                spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def haar_random(m: int, rng_seed: int) -> np.ndarray:
    """Haar-distributed m x m unitary, deterministic in the seed.

    Draws an m x m standard complex Gaussian, takes its QR factorization and
    rescales each column of Q by the unit phase of the matching diagonal
    entry of R, which corrects the QR gauge to the uniform distribution.
    """
    if m < 1:
        raise ValueError(f"mode count must be >= 1, got {m}")
    rng = np.random.default_rng(int(rng_seed) & _MASK64)
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    mags = np.abs(d)
    safe = np.where(mags == 0, 1.0, mags)
    phase = np.where(mags == 0, 1.0 + 0j, d / safe)
    return Q * phase


def multi_start(U, image_basis: ImageBasis, k: int,
                tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                rng_seed: int = 0,
                cluster_tol: float = DEFAULT_CLUSTER_TOL) -> list[tuple[ApproxResult, int]]:
    """Explore local optima from the identity plus k - 1 Haar-random seeds.

    Results whose evolution matrices lie within ``cluster_tol`` in Frobenius
    distance are grouped; each group is represented by its member with the
    lowest final distance. Returns (representative, hit count) pairs sorted
    by final distance ascending. Deterministic in all arguments.
    """
    if k < 1:
        raise ValueError(f"start count must be >= 1, got {k}")
    if not cluster_tol > 0:
        raise ValueError(f"cluster_tol must be positive, got {cluster_tol}")
    m = image_basis.basis.m
    clusters: list[list] = []  # [representative, hit_count]
    for i in range(k):
        if i == 0:
            start = np.eye(m, dtype=complex)
        else:
            start = haar_random(m, derive_seed(rng_seed, i))
        res = approximate(U, start, image_basis, tol, max_iter)
        for entry in clusters:
            if distance(entry[0].evolution, res.evolution) < cluster_tol:
                entry[1] += 1
                if res.final_distance < entry[0].final_distance:
                    entry[0] = res
                break
        else:
            clusters.append([res, 1])
    clusters.sort(key=lambda entry: entry[0].final_distance)
    return [(entry[0], entry[1]) for entry in clusters]


def fidelity_bound(v_N_norm: float) -> float:
    """State-fidelity lower bound 1 - ||v_N||^2 / 2, clamped to -1.

    The bound is vacuous (negative) once the normal component exceeds
    sqrt(2); the clamp keeps reports finite.
    """
    if v_N_norm < 0:
        raise ValueError(f"norm must be non-negative, got {v_N_norm}")
    return max(-1.0, 1.0 - 0.5 * v_N_norm * v_N_norm)


# -- Eigenphase-spacing statistics for two-mode Haar samples ----------------
#
# For 2 x 2 Haar unitaries the circular distance s between the two
# eigenphases has density (1 - cos s) / pi on [0, pi], hence CDF
# (s - sin s) / pi. The sampler is validated against this law with a
# chi-square test over equal-probability bins.

def u2_spacing(U) -> float:
    """Circular distance in [0, pi] between the eigenphases of a 2 x 2 unitary."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise ShapeError(f"expected a 2 x 2 matrix, got shape {U.shape}")
    a, b = np.angle(np.linalg.eigvals(U))
    delta = abs(a - b) % (2 * np.pi)
    return float(min(delta, 2 * np.pi - delta))


def u2_spacing_cdf(s) -> np.ndarray:
    """Exact CDF (s - sin s) / pi of the two-mode Haar eigenphase spacing."""
    s = np.asarray(s, dtype=float)
    return (s - np.sin(s)) / np.pi


def u2_spacing_ppf(q) -> np.ndarray:
    """Inverse of :func:`u2_spacing_cdf` on [0, 1], by bisection."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any((q < 0) | (q > 1)):
        raise ValueError("quantiles must lie in [0, 1]")
    lo = np.zeros_like(q)
    hi = np.full_like(q, np.pi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = u2_spacing_cdf(mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def haar_spacing_test(samples: int, rng_seed: int, bins: int = 20):
    """Chi-square goodness of fit of sampled 2 x 2 eigenphase spacings.

    Returns (statistic, threshold, passed) where the threshold is the 1%
    critical value of chi-square with bins - 1 degrees of freedom and the
    bins are equal-probability under the exact law.
    """
    from scipy.stats import chi2

    if samples < bins * 20:
        raise ValueError(f"need at least {bins * 20} samples for {bins} bins")
    spacings = np.array([
        u2_spacing(haar_random(2, derive_seed(rng_seed, i)))
        for i in range(samples)
    ])
    edges = u2_spacing_ppf(np.linspace(0.0, 1.0, bins + 1))
    edges[0], edges[-1] = 0.0, np.pi
    counts, _ = np.histogram(spacings, bins=edges)
    expected = samples / bins
    statistic = float(np.sum((counts - expected) ** 2 / expected))
    threshold = float(chi2.ppf(0.99, bins - 1))
    return statistic, threshold, statistic < threshold
