"""
Dense complex linear algebra on multi-qudit registers

State vectors are flat numpy arrays in big-endian mixed-radix layout: the
leftmost site of a RegisterShape is the most significant digit. Operators are
only ever materialized on the sites they act on.
"""
from typing import List, Sequence, Tuple, Union

import numpy as np

from core.models import DEGENERACY_TOL, EQUALITY_TOL, VALIDATION_TOL, RegisterShape
from utils.errors import DimensionMismatchError, NormalizationError

ArrayLike = Union[np.ndarray, Sequence[complex]]


def as_vector(value: ArrayLike) -> np.ndarray:
    vec = np.asarray(value, dtype=complex)
    if vec.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {vec.shape}")
    return vec


def require_normalized(vec: np.ndarray, tol: float = VALIDATION_TOL, what: str = "state") -> None:
    """Raise NormalizationError unless the squared norm of `vec` is 1 within `tol`"""
    norm_sq = float(np.vdot(vec, vec).real)
    if abs(norm_sq - 1.0) > tol:
        raise NormalizationError(f"{what} is not normalized (squared norm {norm_sq:.12g})")


def basis_ket(index: int, dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return vec


def kron(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Kronecker product of two vectors or two matrices; `a` is most significant"""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim:
        raise DimensionMismatchError("kron needs two vectors or two matrices")
    return np.kron(a, b)


def inner(u: ArrayLike, v: ArrayLike) -> complex:
    """<u|v>, conjugate-linear in u"""
    u = as_vector(u)
    v = as_vector(v)
    if u.size != v.size:
        raise DimensionMismatchError(f"inner product of dims {u.size} and {v.size}")
    return complex(np.vdot(u, v))


def _check_targets(targets: Sequence[int], shape: RegisterShape) -> List[int]:
    targets = [int(t) for t in targets]
    if not targets:
        raise DimensionMismatchError("no target sites given")
    if len(set(targets)) != len(targets):
        raise DimensionMismatchError(f"target sites repeat: {targets}")
    if any(t < 0 or t >= shape.num_sites for t in targets):
        raise DimensionMismatchError(f"target sites {targets} out of range for {shape.sites}")
    return targets


def _check_state(state: ArrayLike, shape: RegisterShape) -> np.ndarray:
    state = as_vector(state)
    if state.size != shape.dim:
        raise DimensionMismatchError(f"state of dim {state.size} does not fit register {shape.sites}")
    return state


def apply_to_subsystems(
    op: np.ndarray, targets: Sequence[int], state: ArrayLike, shape: RegisterShape
) -> np.ndarray:
    """
    Apply `op` to the target sites of `state`, identity elsewhere

    Args:
        op: Square operator on the target sites, ordered as `targets`
        targets: Distinct site indices
        state: Flat register state
        shape: Register layout

    Returns:
        New flat state vector
    """
    state = _check_state(state, shape)
    targets = _check_targets(targets, shape)
    target_dims = [shape.sites[t] for t in targets]
    size = int(np.prod(target_dims))
    op = np.asarray(op, dtype=complex)
    if op.shape != (size, size):
        raise DimensionMismatchError(f"operator shape {op.shape} does not match targets of dim {size}")

    n = len(targets)
    tensor = state.reshape(shape.sites)
    op_tensor = op.reshape(target_dims + target_dims)
    out = np.tensordot(op_tensor, tensor, axes=(list(range(n, 2 * n)), targets))
    out = np.moveaxis(out, list(range(n)), targets)
    return out.reshape(-1)


def _split_targets(state: np.ndarray, targets: List[int], shape: RegisterShape) -> np.ndarray:
    """Reshape the state into a (target dim) x (rest dim) matrix"""
    n = len(targets)
    target_dim = int(np.prod([shape.sites[t] for t in targets]))
    tensor = np.moveaxis(state.reshape(shape.sites), targets, list(range(n)))
    return tensor.reshape(target_dim, -1)


def project_many(
    state: ArrayLike, rows: np.ndarray, targets: Sequence[int], shape: RegisterShape
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Project the target sites of `state` onto every row of `rows`

    Returns:
        (probabilities, unnormalized conditional states of the remaining sites,
        one row per projector)
    """
    state = _check_state(state, shape)
    targets = _check_targets(targets, shape)
    matrix = _split_targets(state, targets, shape)
    rows = np.atleast_2d(np.asarray(rows, dtype=complex))
    if rows.shape[1] != matrix.shape[0]:
        raise DimensionMismatchError(f"projector dim {rows.shape[1]} does not match targets dim {matrix.shape[0]}")
    amplitudes = rows.conj() @ matrix
    probabilities = np.sum(np.abs(amplitudes) ** 2, axis=1)
    return probabilities, amplitudes


def project(
    state: ArrayLike, basis_vec: ArrayLike, targets: Sequence[int], shape: RegisterShape
) -> Tuple[float, np.ndarray]:
    """
    Born-rule projection of the target sites onto one basis vector

    Returns:
        (probability, conditional state of the unmeasured sites). The
        conditional state is renormalized, or all zeros when the probability
        is below the degeneracy threshold.
    """
    state = _check_state(state, shape)
    basis_vec = as_vector(basis_vec)
    require_normalized(state)
    require_normalized(basis_vec, what="basis vector")
    probabilities, amplitudes = project_many(state, basis_vec[np.newaxis, :], targets, shape)
    probability = float(probabilities[0])
    residual = amplitudes[0]
    if probability > DEGENERACY_TOL:
        residual = residual / np.sqrt(probability)
    else:
        residual = np.zeros_like(residual)
    return probability, residual


def gram_schmidt(seed_vectors: Sequence[ArrayLike], keep_first: int = 0) -> List[np.ndarray]:
    """
    Orthonormalize vectors in input order

    The first `keep_first` vectors must already be orthonormal and are
    returned untouched. Later vectors whose residual norm falls below the
    equality tolerance are dropped. Each residual is projected twice.

    Args:
        seed_vectors: Vectors of a common dimension
        keep_first: Size of the leading block to keep as is

    Returns:
        Orthonormal list spanning the input span
    """
    vectors = [as_vector(v) for v in seed_vectors]
    if len({v.size for v in vectors}) > 1:
        raise DimensionMismatchError("gram_schmidt needs vectors of a common dimension")

    kept = vectors[:keep_first]
    if kept:
        block = np.stack(kept)
        error = float(np.max(np.abs(block.conj() @ block.T - np.eye(len(kept)))))
        if error > EQUALITY_TOL:
            raise NormalizationError(f"leading block is not orthonormal (error {error:.3e})")

    result = list(kept)
    for vec in vectors[keep_first:]:
        residual = vec.copy()
        for _ in range(2):
            for done in result:
                residual = residual - np.vdot(done, residual) * done
        norm = float(np.linalg.norm(residual))
        if norm < EQUALITY_TOL:
            continue
        result.append(residual / norm)
    return result


def schmidt_decompose(
    state: ArrayLike, shape: RegisterShape
) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """
    Schmidt decomposition of a bipartite pure state via SVD

    Args:
        state: Normalized flat state
        shape: Two-site register layout

    Returns:
        (lambdas in descending order, left vectors, right vectors) such that
        state = sum_j sqrt(lambda_j) |L_j>|R_j>
    """
    if shape.num_sites != 2:
        raise DimensionMismatchError(f"Schmidt decomposition needs two sites, got {shape.sites}")
    state = _check_state(state, shape)
    require_normalized(state)

    left_dim, right_dim = shape.sites
    u, singular, vh = np.linalg.svd(state.reshape(left_dim, right_dim))
    order = np.argsort(-singular, kind="stable")
    lambdas = singular[order] ** 2
    left = [u[:, j] for j in order]
    right = [vh[j, :] for j in order]
    return lambdas, left, right
