"""Truncation convergence, spectrum statistics over time and figure series."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractViolation, ConvergenceError, InvalidParameterError
from .evolve import hermitian_eigendecomposition
from .model import ModelParams, build_hamiltonian
from .special import (
    DECAY,
    EVEN,
    NON_DECAY,
    SpecialState,
    SpectrumReport,
    b_spectrum,
    build_b_effective,
    classify_spectrum,
    extract_special_states,
)


@dataclass(frozen=True)
class ConvergenceRow:
    cutoff: int
    r_prob: float
    r_amp: float
    lambda_max: float
    lambda_min: float
    count_non_decay: int
    count_decay: int


def convergence_study(params: ModelParams, cutoffs: Sequence[int]) -> list[ConvergenceRow]:
    """Residual and class counts as the Fock truncation grows, physics held fixed."""
    cutoffs = [int(c) for c in cutoffs]
    if not cutoffs:
        raise InvalidParameterError("at least one cutoff is required")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise InvalidParameterError(f"cutoffs must be strictly ascending, got {cutoffs}")

    rows = []
    for cutoff in cutoffs:
        try:
            b = build_b_effective(params.with_(cutoff=cutoff))
            report = classify_spectrum(b)
        except (ContractViolation, ConvergenceError, InvalidParameterError) as exc:
            raise type(exc)(f"convergence study failed at cutoff={cutoff}: {exc}") from exc
        lam_max = float(report.eigenvalues[-1])
        r_prob = max(0.0, 1.0 - lam_max)
        rows.append(
            ConvergenceRow(
                cutoff=cutoff,
                r_prob=r_prob,
                r_amp=float(np.sqrt(r_prob)),
                lambda_max=lam_max,
                lambda_min=float(report.eigenvalues[0]),
                count_non_decay=report.count_non_decay,
                count_decay=report.count_decay,
            )
        )
    return rows


def spectrum_vs_time(params: ModelParams, times: Sequence[float]) -> list[SpectrumReport]:
    """One :class:`SpectrumReport` per time, from a single diagonalization of H."""
    times = [float(t) for t in times]
    if not all(np.isfinite(times)):
        raise InvalidParameterError("times must be finite")
    dec = hermitian_eigendecomposition(build_hamiltonian(params))
    return [
        classify_spectrum(build_b_effective(params.with_(time=t), decomposition=dec))
        for t in times
    ]


@dataclass(frozen=True)
class FigureSeries:
    fock_levels: np.ndarray
    probabilities: np.ndarray
    phases: np.ndarray
    label: str
    eigenvalue: float
    parity: str

    def rows(self):
        for n, p, ph in zip(self.fock_levels, self.probabilities, self.phases):
            yield {"fock_level": int(n), "probability": float(p), "phase": float(ph)}


def _wrap_phase(phi: np.ndarray) -> np.ndarray:
    # np.angle returns [-pi, pi]; map -pi onto pi
    return np.where(phi <= -np.pi, np.pi, phi)


def _series(state: SpecialState, label: str, support_only: bool) -> FigureSeries:
    levels = np.arange(state.bath_amplitudes.size)
    if support_only:
        levels = levels[0::2] if state.parity == EVEN else levels[1::2]
    amps = state.bath_amplitudes[levels]
    phases = _wrap_phase(np.angle(amps))
    phases = np.where(np.abs(amps) == 0, 0.0, phases)
    return FigureSeries(
        fock_levels=levels,
        probabilities=state.fock_probabilities[levels],
        phases=phases,
        label=label,
        eigenvalue=state.eigenvalue,
        parity=state.parity,
    )


def figure_data(
    params: ModelParams, support_only: bool = False
) -> tuple[FigureSeries, FigureSeries]:
    """Initial Fock-level probabilities and phases of the extreme states.

    Returns the maximal-eigenvalue (non-decay) and minimal-eigenvalue (decay)
    eigenvectors of ``B_eff``.  With ``support_only`` each series keeps only
    the Fock levels of its own parity.  When the spectrum is degenerate (for
    instance at t = 0) both come from the canonical eigenvector ordering.
    """
    dec = hermitian_eigendecomposition(build_hamiltonian(params))
    b = build_b_effective(params, decomposition=dec)
    states = extract_special_states(b, (NON_DECAY, DECAY, "intermediate"), decomposition=dec)
    spec = b_spectrum(b)
    if np.all(spec.eigenvalues == spec.eigenvalues[0]):
        top = bottom = states[0]
    else:
        top, bottom = states[-1], states[0]
    return _series(top, NON_DECAY, support_only), _series(bottom, DECAY, support_only)
