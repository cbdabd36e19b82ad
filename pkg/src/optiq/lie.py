"""Metric, logarithm, exponential and projection machinery on u(M).

The inner product is <u, v> = (1/2) tr(u† v + v† u) = Re tr(u† v), whose
norm is the Frobenius norm. The reachable subalgebra (the image of the
generator lift from u(m)) is m^2-dimensional; :func:`build_image_basis`
orthonormalizes a lifted canonical basis while tracking the u(m) preimage of
every element, so projections can be pulled back to mode space exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InternalConsistencyError, RankDeficiencyError, ShapeError
from .fock import FockBasis
from .homomorphism import second_quantize
from .validate import as_complex_matrix, require_same_shape, require_unitary

#: Gram-Schmidt vectors below this norm signal a rank-deficient lift.
GRAM_SCHMIDT_DROP_TOL = 1e-8

#: Projection coefficients are real by construction; larger imaginary parts
#: indicate non-anti-Hermitian input or a corrupted basis.
COEFF_IMAG_TOL = 1e-9


def inner(u, v) -> float:
    """Real inner product (1/2) tr(u† v + v† u); inner(u, u) = ||u||_F^2."""
    u = as_complex_matrix(u, "inner operand")
    v = as_complex_matrix(v, "inner operand")
    require_same_shape(u, v, "inner operands")
    return float(np.real(np.sum(np.conj(u) * v)))


def distance(A, B) -> float:
    """Frobenius distance ||A - B||_F."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    require_same_shape(A, B, "distance operands")
    return float(np.linalg.norm(A - B))


def principal_log(U) -> np.ndarray:
    """Principal logarithm of a unitary matrix.

    Returns the anti-Hermitian v with exp(v) = U whose eigenvalues i*theta
    all have theta in (-pi, pi]. Computed from the Schur form, which is
    diagonal for unitary input with orthonormal eigenvectors even under
    degeneracy; an exact eigenvalue -1 maps to angle +pi. Both signs of pi
    give a minimal-norm logarithm, so for inputs whose -1 eigenvalue carries
    roundoff the branch follows the perturbed angle.
    """
    U = require_unitary(U, "principal_log input")
    T, Q = scipy.linalg.schur(U, output="complex")
    # np.angle lands in [-float(pi), float(pi)]; both endpoints represent
    # reals strictly inside (-pi, pi] because float(pi) < pi, so no folding
    # is needed and an exact -1 eigenvalue (imaginary part +0.0) maps to +pi.
    theta = np.angle(np.diagonal(T))
    v = (Q * (1j * theta)) @ Q.conj().T
    return (v - v.conj().T) / 2.0


def matrix_exp(v) -> np.ndarray:
    """exp(v) for anti-Hermitian v, via eigendecomposition of Hermitian -i v."""
    v = as_complex_matrix(v, "matrix_exp input")
    H = -1j * v
    H = (H + H.conj().T) / 2.0
    w, W = np.linalg.eigh(H)
    return (W * np.exp(1j * w)) @ W.conj().T


def polar_unitary(A) -> np.ndarray:
    """Closest unitary in Frobenius norm: the unitary polar factor, via SVD."""
    A = as_complex_matrix(A, "polar input")
    W, _, Vh = np.linalg.svd(A)
    return W @ Vh


def unitary_algebra_generators(m: int) -> list[np.ndarray]:
    """Canonical basis of u(m): i E_jj, then E_jk - E_kj and i(E_jk + E_kj)
    for j < k. Exactly m^2 anti-Hermitian matrices."""
    if m < 1:
        raise ValueError(f"mode count must be >= 1, got {m}")
    gens = []
    for j in range(m):
        g = np.zeros((m, m), dtype=complex)
        g[j, j] = 1j
        gens.append(g)
    for j in range(m):
        for k in range(j + 1, m):
            g = np.zeros((m, m), dtype=complex)
            g[j, k] = 1.0
            g[k, j] = -1.0
            gens.append(g)
            g = np.zeros((m, m), dtype=complex)
            g[j, k] = 1j
            g[k, j] = 1j
            gens.append(g)
    return gens


@dataclass(frozen=True, eq=False)
class ImageBasis:
    """Orthonormal basis of the reachable subalgebra, with u(m) preimages.

    ``elements[i]`` is M x M, orthonormal under :func:`inner`;
    ``preimages[i]`` is the m x m generator whose lift equals it by the
    linearity of the orthogonalization. Immutable; share freely.
    """

    basis: FockBasis
    elements: np.ndarray   # (m*m, M, M)
    preimages: np.ndarray  # (m*m, m, m)

    def __len__(self) -> int:
        return self.elements.shape[0]


def _orthonormalize(vectors, preimages):
    """Modified Gram-Schmidt with one re-orthogonalization pass, carrying the
    same real linear combinations on the preimages."""
    out_b: list[np.ndarray] = []
    out_g: list[np.ndarray] = []
    for w, p in zip(vectors, preimages):
        w = np.array(w, dtype=complex)
        p = np.array(p, dtype=complex)
        for _ in range(2):
            for b, g in zip(out_b, out_g):
                c = inner(b, w)
                w -= c * b
                p -= c * g
        nrm = np.sqrt(inner(w, w))
        if nrm < GRAM_SCHMIDT_DROP_TOL:
            raise RankDeficiencyError(
                f"vector {len(out_b)} has norm {nrm:.3e} after orthogonalization; "
                "the lifted generators should be linearly independent")
        out_b.append(w / nrm)
        out_g.append(p / nrm)
    return out_b, out_g


def build_image_basis(basis: FockBasis) -> ImageBasis:
    """Orthonormal basis of the image subalgebra for the given Fock basis.

    Lifts the canonical u(m) generators and orthonormalizes them under the
    trace metric, tracking preimages so that
    ``second_quantize(preimages[i]) == elements[i]`` to roundoff.
    """
    gens = unitary_algebra_generators(basis.m)
    lifted = [second_quantize(g, basis) for g in gens]
    out_b, out_g = _orthonormalize(lifted, gens)
    return ImageBasis(basis, np.array(out_b), np.array(out_g))


def project(v, image_basis: ImageBasis):
    """Orthogonal decomposition of v against the image subalgebra.

    Returns ``(v_T, v_N, coeffs)`` with v_T = sum coeffs[i] * elements[i],
    v_N = v - v_T, and coeffs real. The coefficients of an anti-Hermitian v
    against anti-Hermitian basis elements are real in exact arithmetic; a
    noticeable imaginary residue raises InternalConsistencyError.
    """
    v = as_complex_matrix(v, "projection input")
    if v.shape != image_basis.elements.shape[1:]:
        raise ShapeError(
            f"cannot project shape {v.shape} onto a basis of shape "
            f"{image_basis.elements.shape[1:]}")
    t = np.einsum("kij,ij->k", image_basis.elements.conj(), v)
    worst = float(np.max(np.abs(t.imag))) if len(t) else 0.0
    if worst > COEFF_IMAG_TOL:
        raise InternalConsistencyError(
            f"projection coefficients have imaginary residue {worst:.3e}; "
            "input is probably not anti-Hermitian")
    coeffs = np.ascontiguousarray(t.real)
    v_T = np.einsum("k,kij->ij", coeffs, image_basis.elements)
    v_N = v - v_T
    return v_T, v_N, coeffs
