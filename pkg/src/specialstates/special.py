"""Compressed propagator ``B_eff`` and the special bath states it selects.

With ``P`` the projector on spin up, ``A = P U P`` and ``B = A^dag A``.  On the
up sector ``B`` reduces to ``B_eff = U_uu^dag U_uu`` (``U_uu`` the up-up block
of ``U``), and for the initial state ``|up> (x) psi`` the survival probability
is ``<psi|B_eff|psi>``.  Eigenvectors with eigenvalue 1 keep the spin up,
eigenvalue 0 flips it completely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ContractViolation
from .evolve import (
    SpectralDecomposition,
    fix_phase,
    hermitian_eigendecomposition,
    propagator,
    spin_up_state,
)
from .model import ModelParams, _check_cutoff, build_hamiltonian, hermitian

NON_DECAY = "non-decay"
DECAY = "decay"
INTERMEDIATE = "intermediate"
CLASSES = (NON_DECAY, DECAY, INTERMEDIATE)

EVEN, ODD = "even", "odd"

BOUND_TOL = 1e-10


def build_projector_up(cutoff: int) -> np.ndarray:
    """``(|up><up|) (x) 1_bath``: ones on the up sector, zeros on the down sector."""
    n = _check_cutoff(cutoff)
    return hermitian(np.diag(np.concatenate([np.ones(n), np.zeros(n)])))


def parity_indices(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Even and odd Fock-level indices."""
    k = np.arange(cutoff)
    return k[0::2], k[1::2]


@dataclass(frozen=True)
class BEffective:
    matrix: np.ndarray
    time: float
    params: ModelParams

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0]

    def cross_parity_max(self) -> float:
        even, odd = parity_indices(self.cutoff)
        return float(np.max(np.abs(self.matrix[np.ix_(even, odd)]), initial=0.0))


def build_b_effective(
    params: ModelParams, decomposition: SpectralDecomposition | None = None
) -> BEffective:
    """``U_uu^dag U_uu`` at ``params.time``.

    ``decomposition`` lets callers reuse one diagonalization of the Hamiltonian
    across several times; it must belong to ``params`` minus the time.
    """
    n = params.cutoff
    dec = decomposition or hermitian_eigendecomposition(build_hamiltonian(params))
    if dec.dim != 2 * n:
        raise ContractViolation(f"decomposition has dim {dec.dim}, expected {2 * n}")
    u_uu = propagator(dec, params.time)[:n, :n]
    b = BEffective(hermitian(u_uu.conj().T @ u_uu), params.time, params)
    cross = b.cross_parity_max()
    if cross > BOUND_TOL:
        raise ContractViolation(f"B_eff mixes bath parities: cross-block max {cross:.3e}")
    return b


@dataclass(frozen=True)
class BSpectrum:
    """Eigenpairs of ``B_eff`` resolved inside the two bath-parity blocks."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    parities: tuple[str, ...]


def b_spectrum(b: BEffective) -> BSpectrum:
    """Diagonalize ``B_eff`` block by block so every eigenvector has definite parity.

    Eigenpairs are merged in ascending eigenvalue order; equal eigenvalues keep
    even before odd.
    """
    n = b.cutoff
    values, vectors, labels = [], [], []
    for label, idx in zip((EVEN, ODD), parity_indices(n)):
        if idx.size == 0:
            continue
        dec = hermitian_eigendecomposition(b.matrix[np.ix_(idx, idx)])
        full = np.zeros((n, idx.size), dtype=dec.eigenvectors.dtype)
        full[idx] = dec.eigenvectors
        values.append(dec.eigenvalues)
        vectors.append(full)
        labels.extend([label] * idx.size)

    values = np.concatenate(values)
    order = np.argsort(values, kind="stable")
    lo, hi = values[0], values[-1]
    if lo < -BOUND_TOL or hi > 1 + BOUND_TOL:
        raise ContractViolation(
            f"B_eff spectrum [{lo:.3e}, {hi:.3e}] leaves [0, 1] beyond {BOUND_TOL:.0e}"
        )
    return BSpectrum(
        values[order],
        np.concatenate(vectors, axis=1)[:, order],
        tuple(labels[i] for i in order),
    )


def classify(value: float, theta_hi: float, theta_lo: float) -> str:
    if value >= theta_hi:
        return NON_DECAY
    if value <= theta_lo:
        return DECAY
    return INTERMEDIATE


def _thresholds(b: BEffective, theta_hi, theta_lo) -> tuple[float, float]:
    hi = b.params.theta_hi if theta_hi is None else float(theta_hi)
    lo = b.params.theta_lo if theta_lo is None else float(theta_lo)
    if not (0 <= lo <= hi <= 1 and lo < hi):
        raise ContractViolation(f"invalid thresholds theta_lo={lo}, theta_hi={hi}")
    return hi, lo


@dataclass(frozen=True)
class SpectrumReport:
    time: float
    eigenvalues: np.ndarray
    parities: tuple[str, ...]
    classes: tuple[str, ...]
    count_non_decay: int
    count_decay: int
    count_intermediate: int
    theta_hi: float
    theta_lo: float

    def summary(self) -> dict:
        return {
            "time": self.time,
            "count_non_decay": self.count_non_decay,
            "count_decay": self.count_decay,
            "count_intermediate": self.count_intermediate,
            "theta_hi": self.theta_hi,
            "theta_lo": self.theta_lo,
            "lambda_min": float(self.eigenvalues[0]),
            "lambda_max": float(self.eigenvalues[-1]),
        }


def classify_spectrum(b: BEffective, theta_hi=None, theta_lo=None) -> SpectrumReport:
    """Bin the eigenvalues of ``B_eff`` into non-decay / decay / intermediate.

    Thresholds default to those carried by ``b.params``.
    """
    hi, lo = _thresholds(b, theta_hi, theta_lo)
    spec = b_spectrum(b)
    classes = tuple(classify(x, hi, lo) for x in spec.eigenvalues)
    return SpectrumReport(
        time=b.time,
        eigenvalues=spec.eigenvalues,
        parities=spec.parities,
        classes=classes,
        count_non_decay=classes.count(NON_DECAY),
        count_decay=classes.count(DECAY),
        count_intermediate=classes.count(INTERMEDIATE),
        theta_hi=hi,
        theta_lo=lo,
    )


@dataclass(frozen=True)
class SpecialState:
    """One eigenvector of ``B_eff`` as a bath initial condition.

    ``final_phase`` is the phase of the largest-magnitude amplitude of the
    dominant spin sector of ``U(t) (|up> (x) bath)``: the up sector for
    non-decay states, the down sector for decay states, whichever carries
    more weight for intermediate ones.
    """

    eigenvalue: float
    bath_amplitudes: np.ndarray
    fock_probabilities: np.ndarray
    parity: str
    state_class: str
    final_phase: float
    final_up_probability: float

    @property
    def opposite_parity_weight(self) -> float:
        p = self.fock_probabilities
        return float(p[1::2].sum() if self.parity == EVEN else p[0::2].sum())

    @property
    def odd_weight(self) -> float:
        return float(self.fock_probabilities[1::2].sum())


def _dominant_phase(sector: np.ndarray) -> float:
    mags = np.abs(sector)
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-12))[0])
    return float(np.angle(sector[k]))


def extract_special_states(
    b: BEffective,
    classes: Iterable[str] | str = (NON_DECAY, DECAY),
    decomposition: SpectralDecomposition | None = None,
) -> list[SpecialState]:
    """Eigenvectors of ``B_eff`` in the requested classes, ascending by eigenvalue.

    An empty class gives an empty list.
    """
    if isinstance(classes, str):
        classes = (classes,)
    wanted = set(classes)
    unknown = wanted - set(CLASSES)
    if unknown:
        raise ContractViolation(f"unknown state classes: {sorted(unknown)}")

    params = b.params
    n = b.cutoff
    spec = b_spectrum(b)
    labels = [classify(x, params.theta_hi, params.theta_lo) for x in spec.eigenvalues]
    picked = [j for j, c in enumerate(labels) if c in wanted]
    if not picked:
        return []

    dec = decomposition or hermitian_eigendecomposition(build_hamiltonian(params))
    u = propagator(dec, b.time)
    states = []
    for j in picked:
        vec = fix_phase(np.asarray(spec.eigenvectors[:, j], dtype=complex))
        final = u @ spin_up_state(vec)
        up, down = final[:n], final[n:]
        p_up = float(np.vdot(up, up).real)
        if labels[j] == NON_DECAY or (labels[j] == INTERMEDIATE and p_up >= 0.5):
            phase = _dominant_phase(up)
        else:
            phase = _dominant_phase(down)
        probs = np.abs(vec) ** 2
        states.append(
            SpecialState(
                eigenvalue=float(spec.eigenvalues[j]),
                bath_amplitudes=vec,
                fock_probabilities=probs,
                parity=spec.parities[j],
                state_class=labels[j],
                final_phase=phase,
                final_up_probability=p_up,
            )
        )
    return states


def residual(b: BEffective) -> tuple[float, float]:
    """Leakage of the best non-decay state: ``(1 - lambda_max, sqrt(1 - lambda_max))``."""
    lam = float(b_spectrum(b).eigenvalues[-1])
    r_prob = max(0.0, 1.0 - lam)
    return r_prob, float(np.sqrt(r_prob))
