"""
Resource states, unknown input states and generalized Pauli operators
"""
from typing import List, Sequence

import numpy as np

from core.models import VALIDATION_TOL, PauliLabel, ResourceState, UnknownQudit
from utils.errors import DimensionMismatchError, NormalizationError


def make_resource(d: int, coeffs: Sequence[complex]) -> ResourceState:
    """
    Build the shared pair D * sum_j d_j |j>|j>

    Args:
        d: Local dimension
        coeffs: Complex coefficients d_j, not all zero

    Returns:
        Resource with normalization and Schmidt spectrum derived
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (d,):
        raise DimensionMismatchError(f"expected {d} Schmidt coefficients, got {coeffs.size}")
    if not np.any(np.abs(coeffs) > 0):
        raise ValueError("resource coefficients are all zero")
    return ResourceState(coeffs=coeffs)


def resource_from_lambdas(lambdas: Sequence[float]) -> ResourceState:
    """Resource with d_j = sqrt(lambda_j) after normalizing the spectrum"""
    spectrum = np.asarray(lambdas, dtype=float)
    if spectrum.ndim != 1 or spectrum.size < 2:
        raise ValueError("a spectrum needs at least two entries")
    if np.any(spectrum < 0) or not np.isfinite(spectrum).all():
        raise ValueError(f"spectrum entries must be finite and non-negative: {spectrum.tolist()}")
    total = float(np.sum(spectrum))
    if total <= 0.0:
        raise ValueError("spectrum sums to zero")
    return make_resource(spectrum.size, np.sqrt(spectrum / total))


def uniform_resource(d: int) -> ResourceState:
    return make_resource(d, np.ones(d))


def qubit_resource(n: complex) -> ResourceState:
    """The qubit pair N(|00> + n|11>)"""
    return make_resource(2, [1.0, n])


def unknown_state(amplitudes: Sequence[complex], tol: float = VALIDATION_TOL) -> UnknownQudit:
    """
    Wrap explicit amplitudes, rejecting vectors that are not normalized

    Amplitudes within `tol` of unit norm are rescaled exactly to unit norm.
    """
    vec = np.asarray(amplitudes, dtype=complex)
    norm_sq = float(np.vdot(vec, vec).real)
    if abs(norm_sq - 1.0) > tol:
        raise NormalizationError(f"input amplitudes have squared norm {norm_sq:.12g}")
    return UnknownQudit(amplitudes=vec / np.sqrt(norm_sq))


def random_unknown_state(d: int, seed: int) -> UnknownQudit:
    """Haar-random pure state from normalized complex Gaussians"""
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return UnknownQudit(amplitudes=vec / np.linalg.norm(vec))


def random_spectrum(d: int, rng: np.random.Generator) -> np.ndarray:
    """Flat-Dirichlet Schmidt spectrum"""
    return rng.dirichlet(np.ones(d))


def generalized_pauli(label: PauliLabel, d: int) -> np.ndarray:
    """U_nm = sum_k exp(2 pi i n k / d) |k><k+m mod d|"""
    if label.n >= d or label.m >= d:
        raise ValueError(f"Pauli label ({label.n}, {label.m}) out of range for d={d}")
    k = np.arange(d)
    op = np.zeros((d, d), dtype=complex)
    op[k, (k + label.m) % d] = np.exp(2j * np.pi * label.n * k / d)
    return op


def all_pauli_labels(d: int) -> List[PauliLabel]:
    return [PauliLabel(n=n, m=m) for n in range(d) for m in range(d)]


def entanglement_entropy(lambdas: Sequence[float]) -> float:
    """
    Von Neumann entropy in bits of a Schmidt spectrum, with 0 log 0 = 0

    Raises:
        ValueError: If the spectrum has negative entries or does not sum to 1
    """
    spectrum = np.asarray(lambdas, dtype=float)
    if np.any(spectrum < -VALIDATION_TOL) or abs(float(np.sum(spectrum)) - 1.0) > VALIDATION_TOL:
        raise ValueError(f"invalid Schmidt spectrum: {spectrum.tolist()}")
    positive = spectrum[spectrum > 0]
    entropy = float(-np.sum(positive * np.log2(positive)))
    return min(max(entropy, 0.0), float(np.log2(spectrum.size)))
