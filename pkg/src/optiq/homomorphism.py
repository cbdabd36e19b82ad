"""Scattering-matrix lifts between the mode space and the photon space.

An m-mode scattering matrix S acts on n indistinguishable photons as an
M x M evolution matrix, M = C(m+n-1, n). The group-level lift is computed
entrywise from matrix permanents,

    <out| U |in> = per(S[out|in]) / sqrt(prod out_j! * prod in_k!),

where S[out|in] repeats row j of S out_j times and column k in_k times.
The algebra-level lift is second quantization, sum_{jk} A[j,k] a†_j a_k.
The two constructions cross-validate each other through :func:`exp_lift`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ShapeError
from .fock import FockBasis


def permanent(A) -> complex:
    """Permanent of a square complex matrix.

    Ryser's formula with Gray-code subset updates, O(2^k k) time. The empty
    matrix has permanent 1.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"permanent requires a square matrix, got shape {A.shape}")
    k = A.shape[0]
    if k == 0:
        return complex(1.0)
    rowsum = np.zeros(k, dtype=complex)
    total = 0.0 + 0.0j
    parity = 1  # (-1)^{|subset|}, flips once per Gray-code step
    gray = 0
    for s in range(1, 1 << k):
        bit = s & -s
        j = bit.bit_length() - 1
        gray ^= bit
        if gray & bit:
            rowsum += A[:, j]
        else:
            rowsum -= A[:, j]
        parity = -parity
        total += parity * rowsum.prod()
    return complex(total if k % 2 == 0 else -total)


def _repeat_indices(basis: FockBasis) -> list[np.ndarray]:
    modes = np.arange(basis.m)
    return [np.repeat(modes, state) for state in basis.states]


def _factorial_products(basis: FockBasis) -> list[int]:
    return [math.prod(math.factorial(x) for x in state) for state in basis.states]


def evolution_matrix(S, basis: FockBasis) -> np.ndarray:
    """Lift an m x m scattering matrix to the M x M evolution matrix.

    Entry (p, q) is the normalized permanent of the submatrix of S whose
    rows repeat per ``basis.states[p]`` and columns per ``basis.states[q]``.
    The lift is a group homomorphism and preserves unitarity.
    """
    S = np.asarray(S, dtype=complex)
    if S.shape != (basis.m, basis.m):
        raise ShapeError(
            f"scattering matrix shape {S.shape} does not match basis with m={basis.m}")
    reps = _repeat_indices(basis)
    facts = _factorial_products(basis)
    M = len(basis)
    U = np.empty((M, M), dtype=complex)
    for q in range(M):
        cols = reps[q]
        for p in range(M):
            # single sqrt of the exact integer product keeps e.g. the
            # identity lift exactly the identity
            U[p, q] = permanent(S[np.ix_(reps[p], cols)]) / math.sqrt(facts[p] * facts[q])
    return U


def second_quantize(A, basis: FockBasis) -> np.ndarray:
    """Lift an m x m generator to the photon space.

    Returns the matrix of sum_{jk} A[j,k] a†_j a_k in the given basis,
    using a†_j a_k |q> = sqrt(q_k (q_j + 1)) |q - e_k + e_j> for j != k and
    q_j |q> for j = k. Anti-Hermitian input yields anti-Hermitian output.
    """
    A = np.asarray(A, dtype=complex)
    if A.shape != (basis.m, basis.m):
        raise ShapeError(
            f"generator shape {A.shape} does not match basis with m={basis.m}")
    M = len(basis)
    out = np.zeros((M, M), dtype=complex)
    for q, occ in enumerate(basis.states):
        for k, nk in enumerate(occ):
            if nk == 0:
                continue
            out[q, q] += A[k, k] * nk
            for j in range(basis.m):
                if j == k or A[j, k] == 0:
                    continue
                shifted = list(occ)
                shifted[k] -= 1
                shifted[j] += 1
                p = basis.index_of(shifted)
                out[p, q] += A[j, k] * math.sqrt(nk * (occ[j] + 1))
    return out


def exp_lift(A, basis: FockBasis) -> np.ndarray:
    """exp(second_quantize(A)); equals evolution_matrix(exp(A)) for A in u(m)."""
    from .lie import matrix_exp  # deferred: lie builds on this module

    return matrix_exp(second_quantize(A, basis))
