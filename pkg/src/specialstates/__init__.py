"""Special bath states of a spin coupled to a single truncated boson mode.

A spin starts pointing up and interacts with one oscillator mode through
``H = eps/2 (1 + sz) + omega a^dag a + beta sx (a^dag + a)``.  For a fixed
evolution time the bath initial conditions that leave the spin entirely up
(or flip it entirely down) are the eigenvectors of
``B_eff = U_uu^dag U_uu`` with eigenvalues at 1 (or 0), where ``U_uu`` is the
up-up block of the propagator.
"""

from .errors import ContractViolation, ConvergenceError, InvalidParameterError
from .model import (
    ModelParams,
    basis_index,
    build_hamiltonian,
    hermitian,
    ladder_operators,
    parity_operator,
    split_index,
)
from .evolve import (
    SpectralDecomposition,
    SurvivalCurve,
    evolve_state,
    hermitian_eigendecomposition,
    propagator,
    survival_probability,
)
from .special import (
    BEffective,
    SpecialState,
    SpectrumReport,
    build_b_effective,
    build_projector_up,
    classify_spectrum,
    extract_special_states,
    residual,
)
from .analysis import (
    ConvergenceRow,
    FigureSeries,
    convergence_study,
    figure_data,
    spectrum_vs_time,
)

__version__ = "0.1.0"

__all__ = [
    "BEffective",
    "ContractViolation",
    "ConvergenceError",
    "ConvergenceRow",
    "FigureSeries",
    "InvalidParameterError",
    "ModelParams",
    "SpecialState",
    "SpectralDecomposition",
    "SpectrumReport",
    "SurvivalCurve",
    "basis_index",
    "build_b_effective",
    "build_hamiltonian",
    "build_projector_up",
    "classify_spectrum",
    "convergence_study",
    "evolve_state",
    "extract_special_states",
    "figure_data",
    "hermitian",
    "hermitian_eigendecomposition",
    "ladder_operators",
    "parity_operator",
    "propagator",
    "residual",
    "spectrum_vs_time",
    "split_index",
    "survival_probability",
]
