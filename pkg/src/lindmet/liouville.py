"""Liouville-space representation: state vectorization and superoperator
construction for Markovian master equations.

States are column-stacked, rho -> |rho> with element rho_ij at position j*d+i,
so an operator sandwich U rho V maps to (V^T kron U)|rho>. The generator of
the master equation

    drho/dt = -i[H, rho] + sum_v gamma_v (L_v rho L_v^dag - {L_v^dag L_v, rho}/2)

then acts as the d^2 x d^2 matrix returned by :func:`lindbladian`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Construction-time tolerances for a physical density matrix.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a d x d matrix into a length-d^2 vector."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    vec = np.asarray(vec)
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise ValueError(f"vector length {vec.size} is not a perfect square")
    return vec.reshape((d, d), order="F")


def validate_density_matrix(rho: np.ndarray,
                            hermiticity_tol: float = HERMITICITY_TOL,
                            trace_tol: float = TRACE_TOL,
                            positivity_tol: float = POSITIVITY_TOL) -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and PSD within tolerance."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > hermiticity_tol:
        raise ValueError(f"density matrix not Hermitian: max|rho - rho^dag| = {herm:.3e}")
    tr = abs(np.trace(rho) - 1.0)
    if tr > trace_tol:
        raise ValueError(f"density matrix trace deviates from 1 by {tr:.3e}")
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < -positivity_tol:
        raise ValueError(f"density matrix has negative eigenvalue {lam_min:.3e}")


@dataclass(frozen=True)
class NoiseChannel:
    """A set of Lindblad operators with their dissipation rates (1/s)."""

    lindblad_ops: tuple
    rates: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(op, dtype=complex) for op in self.lindblad_ops)
        rates = tuple(float(g) for g in self.rates)
        if len(ops) != len(rates):
            raise ValueError("one rate per Lindblad operator is required")
        for g in rates:
            if g < 0:
                raise ValueError(f"dissipation rates must be non-negative, got {g}")
        dims = {op.shape for op in ops}
        if len(dims) > 1:
            raise ValueError(f"Lindblad operators have mixed shapes: {dims}")
        for op in ops:
            if op.ndim != 2 or op.shape[0] != op.shape[1]:
                raise ValueError("Lindblad operators must be square matrices")
        object.__setattr__(self, "lindblad_ops", ops)
        object.__setattr__(self, "rates", rates)

    @property
    def dim(self) -> int | None:
        return self.lindblad_ops[0].shape[0] if self.lindblad_ops else None


def sandwich_superop(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> U rho V, i.e. V^T kron U."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"U and V must be square with equal shape, got {U.shape}, {V.shape}")
    return np.kron(V.T, U)


def hamiltonian_superop(H: np.ndarray) -> np.ndarray:
    """Commutator superoperator: I kron H - H^* kron I.

    Multiplying by -i gives the generator of -i[H, rho] on vectorized states.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {H.shape}")
    eye = np.eye(H.shape[0])
    return np.kron(eye, H) - np.kron(H.conj(), eye)


def dissipator_superop(channel: NoiseChannel) -> np.ndarray:
    """Dissipator superoperator of the master equation's noise term.

    Consistent with rate gamma_v multiplying the full sandwich-minus-
    anticommutator bracket (an empty channel gives the zero matrix).
    """
    if channel.dim is None:
        raise ValueError("cannot infer dimension from an empty channel; "
                         "use numpy.zeros for an explicit zero superoperator")
    d = channel.dim
    eye = np.eye(d)
    G = np.zeros((d * d, d * d), dtype=complex)
    for L, g in zip(channel.lindblad_ops, channel.rates):
        LdL = L.conj().T @ L
        G += g * (np.kron(L.conj(), L)
                  - 0.5 * np.kron(eye, LdL)
                  - 0.5 * np.kron(LdL.T, eye))
    return G


def lindbladian(H: np.ndarray, channel: NoiseChannel) -> np.ndarray:
    """Full generator -i(I kron H - H^* kron I) + dissipator."""
    H = np.asarray(H, dtype=complex)
    out = -1j * hamiltonian_superop(H)
    if channel.lindblad_ops:
        if channel.dim != H.shape[0]:
            raise ValueError(
                f"channel dimension {channel.dim} does not match Hamiltonian {H.shape[0]}")
        out = out + dissipator_superop(channel)
    return out
