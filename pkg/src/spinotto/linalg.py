"""Dense complex linear algebra for small Hilbert spaces (dim 2 to 16).

Everything the engine touches is a plain complex numpy array. States and
operators live in the product basis |m b> = {|00>, |01>, |10>, |11>} with the
medium as the left tensor factor and |0> the +1 eigenstate of sigma_z (the
excited state, energy +hbar*omega/2). Hermitian eigenproblems are solved with
an in-house cyclic Jacobi iteration so results are reproducible bit-for-bit
across platforms and library versions.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable, NamedTuple

import numpy as np

# Centralized numerical error budget.
VALIDATION_ATOL = 1e-10   # hermiticity / trace / config checks
EQUALITY_ATOL = 1e-12     # exact-identity assertions
PSD_CLAMP = -1e-10        # eigenvalues above this are treated as 0
JACOBI_OFFDIAG_TOL = 1e-13  # off-diagonal Frobenius norm at convergence

MAX_DIM = 16


class LinalgError(ValueError):
    """Base error for the matrix kernel."""


class DimensionError(LinalgError):
    """Operands have incompatible or unsupported dimensions."""


class ValidationError(LinalgError):
    """An input violates a structural invariant (hermiticity, trace, positivity)."""


class EigenDecomposition(NamedTuple):
    """Eigenvalues sorted ascending and the matching unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


_PAULI = {
    "identity": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    # unnormalized ladder convention: sigma^+- = sigma^x +- i sigma^y
    "plus": np.array([[0, 2], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [2, 0]], dtype=complex),
}


def pauli(axis: str) -> np.ndarray:
    """Return a fresh copy of the named single-qubit operator.

    `axis` is one of x, y, z, plus, minus, identity. The ladder operators
    follow the unnormalized convention sigma^+- = sigma^x +- i*sigma^y.
    """
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValidationError(f"unknown Pauli axis {axis!r}") from None


def as_complex(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def hermitize(a: np.ndarray) -> np.ndarray:
    """(A + A^dagger)/2, scrubbing tiny numerical asymmetries."""
    a = as_complex(a)
    return (a + a.conj().T) / 2


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_complex(a), as_complex(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_complex(a), as_complex(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot add {a.shape} and {b.shape}")
    return a + b


def scale(alpha: complex, a: np.ndarray) -> np.ndarray:
    return alpha * as_complex(a)


def trace(a: np.ndarray) -> complex:
    return complex(np.trace(as_complex(a)))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the medium is always the left factor in this package."""
    a, b = as_complex(a), as_complex(b)
    dim = a.shape[0] * b.shape[0]
    if dim > MAX_DIM:
        raise DimensionError(f"kron result dimension {dim} exceeds the {MAX_DIM} limit")
    return np.kron(a, b)


def partial_trace(joint: np.ndarray, keep: str) -> np.ndarray:
    """Reduce a 4x4 medium (x) battery operator to one 2x2 subsystem.

    keep is "medium" (left factor) or "battery" (right factor). The trace of
    the result equals the trace of the input.
    """
    joint = as_complex(joint)
    if joint.shape != (4, 4):
        raise DimensionError(f"partial_trace expects a 4x4 operator, got {joint.shape}")
    t = joint.reshape(2, 2, 2, 2)
    if keep == "medium":
        return np.einsum("mbnb->mn", t)
    if keep == "battery":
        return np.einsum("mbmd->bd", t)
    raise ValidationError(f"keep must be 'medium' or 'battery', got {keep!r}")


def is_hermitian(a: np.ndarray, atol: float = VALIDATION_ATOL) -> bool:
    a = as_complex(a)
    return float(np.max(np.abs(a - a.conj().T))) <= atol


def hermitian_eig(h: np.ndarray, offdiag_tol: float = JACOBI_OFFDIAG_TOL) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each sweep walks the upper triangle and annihilates one off-diagonal
    element at a time with a complex plane rotation; sweeps repeat until the
    off-diagonal Frobenius norm drops below `offdiag_tol`. Convergence is
    quadratic, so a handful of sweeps suffices for the dimensions used here.

    Returns eigenvalues sorted ascending and eigenvectors as the columns of a
    unitary matrix, ordered to match.
    """
    h = as_complex(h)
    if not is_hermitian(h):
        raise ValidationError("hermitian_eig requires a Hermitian input")
    n = h.shape[0]
    a = hermitize(h).copy()
    v = np.eye(n, dtype=complex)
    mask = ~np.eye(n, dtype=bool)

    for _ in range(60):
        off2 = float(np.sum(np.abs(a[mask]) ** 2))
        if off2 <= offdiag_tol * offdiag_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                mag = abs(apq)
                diag_scale = abs(a[p, p].real) + abs(a[q, q].real)
                if mag <= 1e-18 * diag_scale:
                    # below double precision relative to the local diagonal:
                    # the rotation angle would underflow, so just drop it
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                if mag == 0.0:
                    continue
                # Phase out the off-diagonal element, then a real rotation.
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                gpq = s * phase.conjugate()
                gqq = c * phase.conjugate()
                # columns: [:,p], [:,q] <- [:,p]*c - [:,q]*s*conj(phase), [:,p]*s + [:,q]*c*conj(phase)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - gpq * colq
                a[:, q] = s * colp + gqq * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - gpq.conjugate() * rowq
                a[q, :] = s * rowp + gqq.conjugate() * rowq
                colp = v[:, p].copy()
                colq = v[:, q].copy()
                v[:, p] = c * colp - gpq * colq
                v[:, q] = s * colp + gqq * colq
                # the rotation zeroes this pair by construction
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        raise ValidationError("Jacobi iteration failed to converge in 60 sweeps")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def hermitian_function(h: np.ndarray, f: Callable[[float], complex]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Computes V diag(f(lambda)) V^dagger. `f` may return complex values, so the
    same routine yields propagators exp(-i*lambda*t), PSD square roots and
    entropy integrands.
    """
    w, v = hermitian_eig(h)
    fw = np.array([f(float(x)) for x in w], dtype=complex)
    return (v * fw) @ v.conj().T


def clamp_spectrum(w: np.ndarray) -> np.ndarray:
    """Zero out tiny negative eigenvalues; reject ones below the noise floor."""
    w = np.asarray(w, dtype=float)
    if float(np.min(w)) < PSD_CLAMP:
        raise ValidationError(
            f"eigenvalue {float(np.min(w)):.3e} below the PSD tolerance {PSD_CLAMP:.0e}"
        )
    return np.maximum(w, 0.0)


def sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix."""
    w, v = hermitian_eig(rho)
    roots = np.sqrt(clamp_spectrum(w))
    return (v * roots) @ v.conj().T


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H, unitary for real t."""
    return hermitian_function(h, lambda lam: cmath.exp(-1j * lam * t))


def validate_density(rho: np.ndarray, check_spectrum: bool = True) -> np.ndarray:
    """Check that rho is a density operator of dimension 2 or 4.

    Verifies shape, hermiticity and unit trace within VALIDATION_ATOL, and
    (optionally) that no eigenvalue lies below PSD_CLAMP. Returns rho unchanged.
    """
    rho = as_complex(rho)
    if rho.shape[0] not in (2, 4):
        raise DimensionError(f"density operator must be 2x2 or 4x4, got {rho.shape}")
    if not is_hermitian(rho):
        raise ValidationError("density operator is not Hermitian")
    tr = trace(rho)
    if abs(tr - 1.0) > VALIDATION_ATOL:
        raise ValidationError(f"density operator trace {tr:.12g} differs from 1")
    if check_spectrum:
        clamp_spectrum(hermitian_eig(rho).eigenvalues)
    return rho
