"""Hermitian eigendecomposition, exact propagators and survival curves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import ContractViolation, ConvergenceError
from .model import ModelParams, build_hamiltonian, hermitian

NORM_TOL = 1e-10
# Eigenvalues closer than this (relative to the matrix scale) are one cluster.
CLUSTER_RTOL = 1e-12
# Entries within this relative distance of the largest magnitude count as tied.
PHASE_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending real eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate ``vector`` so its largest-magnitude entry is real and positive.

    Magnitude ties are broken by the lowest index.
    """
    mags = np.abs(vector)
    top = mags.max()
    if top == 0:
        return vector
    k = int(np.flatnonzero(mags >= top * (1 - PHASE_TIE_RTOL))[0])
    out = vector * (np.conj(vector[k]) / mags[k])
    if np.iscomplexobj(out):
        out[k] = mags[k]
    return out


def _clusters(values: np.ndarray, tol: float) -> list[slice]:
    out, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            out.append(slice(start, i))
            start = i
    return out


def _canonical_basis(block: np.ndarray) -> np.ndarray:
    # The projector onto a degenerate eigenspace does not depend on which
    # basis LAPACK returned; a pivoted QR of it gives a reproducible basis.
    k = block.shape[1]
    projector = block @ block.conj().T
    q, _, _ = scipy.linalg.qr(projector, pivoting=True, mode="economic")
    return q[:, :k]


def hermitian_eigendecomposition(matrix) -> SpectralDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned ascending.  Inside a degenerate cluster the
    eigenvectors are replaced by a canonical orthonormal basis of the cluster's
    eigenspace, and every column's global phase is fixed so that its
    largest-magnitude entry is real positive.  Identical input gives
    bit-identical output.
    """
    m = hermitian(matrix)
    try:
        values, vectors = scipy.linalg.eigh(m, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"eigensolver did not converge on a {m.shape[0]}x{m.shape[0]} matrix: {exc}"
        ) from exc

    scale = max(1.0, float(np.max(np.abs(m))))
    vectors = np.array(vectors)
    for sl in _clusters(values, CLUSTER_RTOL * scale):
        if sl.stop - sl.start > 1:
            vectors[:, sl] = _canonical_basis(vectors[:, sl])
    for j in range(vectors.shape[1]):
        vectors[:, j] = fix_phase(vectors[:, j])

    values.flags.writeable = False
    vectors.flags.writeable = False
    return SpectralDecomposition(values, vectors)


def _as_decomposition(h) -> SpectralDecomposition:
    if isinstance(h, SpectralDecomposition):
        return h
    return hermitian_eigendecomposition(h)


def propagator(h, t: float) -> np.ndarray:
    """``U(t) = exp(-i H t)`` (hbar = 1) from a Hermitian matrix or its decomposition.

    ``U(0)`` is returned as the exact identity.
    """
    if not np.isfinite(t):
        raise ContractViolation(f"time must be finite, got {t!r}")
    dec = _as_decomposition(h)
    if t == 0:
        return np.eye(dec.dim, dtype=complex)
    v = dec.eigenvectors
    return (v * np.exp(-1j * dec.eigenvalues * t)) @ v.conj().T


def _check_normalized(psi: np.ndarray, what: str = "state") -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > NORM_TOL:
        raise ContractViolation(f"{what} must be normalized, |psi| = {norm!r}")


def evolve_state(u: np.ndarray, psi) -> np.ndarray:
    """Apply the propagator ``u`` to the normalized state ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or u.shape != (psi.shape[0], psi.shape[0]):
        raise ContractViolation(
            f"dimension mismatch: propagator {u.shape}, state {psi.shape}"
        )
    _check_normalized(psi)
    return u @ psi


def spin_up_state(psi_bath) -> np.ndarray:
    """Embed a bath vector as ``|up> (x) |bath>`` in the full space."""
    psi_bath = np.asarray(psi_bath, dtype=complex)
    return np.concatenate([psi_bath, np.zeros_like(psi_bath)])


@dataclass(frozen=True)
class SurvivalCurve:
    times: np.ndarray
    pr_up: np.ndarray

    def clamped(self) -> np.ndarray:
        return np.clip(self.pr_up, 0.0, 1.0)


def survival_probability(
    params: ModelParams,
    psi_bath,
    times: Sequence[float],
    decomposition: SpectralDecomposition | None = None,
) -> SurvivalCurve:
    """Probability that the spin is entirely up at each time.

    The initial state is ``|up> (x) psi_bath``; ``psi_bath`` must have length
    ``params.cutoff`` and unit norm (it is never renormalized).  Each point is
    the squared norm of the up sector of the evolved state.
    """
    n = params.cutoff
    psi_bath = np.asarray(psi_bath, dtype=complex)
    if psi_bath.shape != (n,):
        raise ContractViolation(f"bath state must have shape ({n},), got {psi_bath.shape}")
    _check_normalized(psi_bath, "bath state")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or not np.all(np.isfinite(times)):
        raise ContractViolation("times must be a finite 1-d sequence")

    dec = decomposition or hermitian_eigendecomposition(build_hamiltonian(params))
    v = dec.eigenvectors
    coeffs = v.conj().T @ spin_up_state(psi_bath)
    pr = np.empty(len(times))
    for i, t in enumerate(times):
        if t == 0:
            pr[i] = np.vdot(psi_bath, psi_bath).real
            continue
        psi_t = v[:n] @ (np.exp(-1j * dec.eigenvalues * t) * coeffs)
        pr[i] = np.vdot(psi_t, psi_t).real
    return SurvivalCurve(times, pr)
