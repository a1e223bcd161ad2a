"""Truncated spin x boson Hilbert space and the model Hamiltonian.

Basis convention: composite index ``k = spin * N + n`` with ``spin = 0`` for
up and ``spin = 1`` for down, ``n`` the Fock occupation in ``[0, N)``.  The
up sector is therefore the leading ``N x N`` block of every operator.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import ContractViolation, InvalidParameterError

UP, DOWN = 0, 1

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical constants, evolution time, truncation and class thresholds.

    Defaults are the reference configuration: eps=0.5, omega=0.1, beta=0.6,
    t=0.15 with 250 Fock levels (occupations 0..249).  ``hbar`` is fixed at 1.
    """

    epsilon: float = 0.5
    omega: float = 0.1
    beta: float = 0.6
    time: float = 0.15
    cutoff: int = 250
    theta_hi: float = 0.99
    theta_lo: float = 0.01

    hbar = 1.0

    def __post_init__(self):
        for name in ("epsilon", "omega", "beta", "time", "theta_hi", "theta_lo"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
        if isinstance(self.cutoff, bool) or not isinstance(self.cutoff, (int, np.integer)):
            raise InvalidParameterError(f"cutoff must be an integer, got {self.cutoff!r}")
        if self.cutoff < 2:
            raise InvalidParameterError(f"cutoff must be >= 2, got {self.cutoff}")
        if self.omega < 0:
            raise InvalidParameterError(f"omega must be >= 0, got {self.omega}")
        if not 0.5 < self.theta_hi <= 1.0:
            raise InvalidParameterError(f"theta_hi must lie in (0.5, 1], got {self.theta_hi}")
        if not 0.0 <= self.theta_lo < 0.5:
            raise InvalidParameterError(f"theta_lo must lie in [0, 0.5), got {self.theta_lo}")

    @property
    def dim(self) -> int:
        return 2 * self.cutoff

    @property
    def degenerate(self) -> bool:
        """True when omega == 0 (the boson mode has no energy of its own)."""
        return self.omega == 0

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


def _check_cutoff(cutoff) -> int:
    if isinstance(cutoff, bool) or not isinstance(cutoff, (int, np.integer)):
        raise InvalidParameterError(f"cutoff must be an integer, got {cutoff!r}")
    if cutoff < 2:
        raise InvalidParameterError(f"cutoff must be >= 2, got {cutoff}")
    return int(cutoff)


def hermitian(matrix, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Validate that ``matrix`` is square, finite and Hermitian.

    Returns a read-only view.  The check is
    ``max|M - M^dag| <= rtol * max|M|``.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ContractViolation(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("matrix has non-finite entries")
    scale = np.max(np.abs(m))
    asym = np.max(np.abs(m - m.conj().T))
    if asym > rtol * scale:
        raise ContractViolation(
            f"matrix is not Hermitian: max|M - M^dag| = {asym:.3e} > {rtol:.0e} * {scale:.3e}"
        )
    view = m.view()
    view.flags.writeable = False
    return view


def basis_index(spin: int, fock: int, cutoff: int) -> int:
    """Composite index of ``|spin> (x) |fock>`` in the spin-major basis."""
    cutoff = _check_cutoff(cutoff)
    if spin not in (UP, DOWN):
        raise InvalidParameterError(f"spin must be 0 (up) or 1 (down), got {spin}")
    if not 0 <= fock < cutoff:
        raise InvalidParameterError(f"fock must lie in [0, {cutoff}), got {fock}")
    return spin * cutoff + fock


def split_index(k: int, cutoff: int) -> tuple[int, int]:
    """Inverse of :func:`basis_index`: ``k -> (spin, fock)``."""
    cutoff = _check_cutoff(cutoff)
    if not 0 <= k < 2 * cutoff:
        raise InvalidParameterError(f"index must lie in [0, {2 * cutoff}), got {k}")
    return divmod(k, cutoff)


def ladder_operators(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated annihilation and creation operators on ``cutoff`` Fock levels.

    ``a[n-1, n] = sqrt(n)``; the creation operator is the conjugate transpose,
    so ``a_dag |N-1> = 0`` (hard truncation).
    """
    n = _check_cutoff(cutoff)
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1)
    return a, a.conj().T.copy()


def number_operator(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(_check_cutoff(cutoff), dtype=float))


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Real symmetric ``2N x 2N`` Hamiltonian in the spin-major basis.

    ``eps/2 (1 + sz)`` contributes ``eps`` on the up sector only, the oscillator
    term ``omega n`` sits on both diagonal blocks and ``beta (a + a^dag)`` on
    both off-diagonal spin blocks.
    """
    n = params.cutoff
    a, a_dag = ladder_operators(n)
    number = number_operator(n)
    x = a + a_dag

    h = np.zeros((2 * n, 2 * n))
    h[:n, :n] = params.epsilon * np.eye(n) + params.omega * number
    h[n:, n:] = params.omega * number
    h[:n, n:] = params.beta * x
    h[n:, :n] = params.beta * x
    return hermitian(h)


def parity_operator(cutoff: int) -> np.ndarray:
    """``sz (x) (-1)^n`` as a diagonal ``+-1`` matrix; commutes with the Hamiltonian."""
    n = _check_cutoff(cutoff)
    bath = (-1.0) ** np.arange(n)
    return hermitian(np.diag(np.concatenate([bath, -bath])))


def bath_parity(cutoff: int) -> np.ndarray:
    """Fock-level parity ``(-1)^n`` as a vector of +-1."""
    return (-1.0) ** np.arange(_check_cutoff(cutoff))
