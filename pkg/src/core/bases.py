"""
Measurement bases for the joint measurement on Alice's two qudits

Every basis vector lives in one class subspace span{|j>|j+m mod d>} and the
bases are built block by block over these classes.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.models import (
    BasisKind,
    BasisVector,
    MeasurementBasis,
    QubitChoice,
    RegisterShape,
    ResourceState,
)
from core.states import entanglement_entropy
from core.tensor import basis_ket, gram_schmidt, schmidt_decompose
from utils.errors import InvariantViolation, RankDeficientError
from utils.logger import get_logger

logger = get_logger(__name__)

QUBIT_OUTCOMES = ("phi+", "phi-", "psi+", "psi-")


def _omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def class_index(j: int, m: int, d: int) -> int:
    """Flat index of |j>|j+m mod d>"""
    return j * d + (j + m) % d


def ket_entropy(ket: np.ndarray, d: int) -> float:
    """Schmidt entropy in bits of a two-qudit ket"""
    lambdas, _, _ = schmidt_decompose(ket, RegisterShape(sites=(d, d)))
    lambdas = np.clip(lambdas, 0.0, None)
    return entanglement_entropy(lambdas / np.sum(lambdas))


def bell_basis(d: int) -> MeasurementBasis:
    """
    Generalized Bell basis |Psi_lp> = d^(-1/2) sum_k w^(l k) |k+p>|k>

    Vectors are ordered (l, p) row-major and all are designated.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    omega = _omega(d)
    k = np.arange(d)
    vectors = []
    for l in range(d):
        for p in range(d):
            ket = np.zeros(d * d, dtype=complex)
            ket[((k + p) % d) * d + k] = omega ** (l * k) / np.sqrt(d)
            vectors.append(
                BasisVector(
                    ket=ket,
                    class_m=(-p) % d,
                    slot=l,
                    label=(l, p),
                    phase_l=l,
                    designated=True,
                    norm_const=1.0 / np.sqrt(d),
                    name=f"Psi_{l}{p}",
                )
            )
    return MeasurementBasis(d=d, kind=BasisKind.BELL, vectors=tuple(vectors))


def bell_expand(i: int, j: int, d: int) -> np.ndarray:
    """
    Coefficients of |ij> in the Bell basis

    Returns:
        (d, d) array c with |ij> = sum_{l,p} c[l, p] |Psi_lp>; only the column
        p = i - j mod d is nonzero.
    """
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"computational labels ({i}, {j}) out of range for d={d}")
    coeffs = np.zeros((d, d), dtype=complex)
    l = np.arange(d)
    coeffs[:, (i - j) % d] = _omega(d) ** (-l * j) / np.sqrt(d)
    return coeffs


def qubit_nme_basis(
    l: complex, p: complex, designated: Sequence[str] = ("phi-", "psi+")
) -> MeasurementBasis:
    """
    Qubit basis phi+-_l, psi+-_p interpolating between product and Bell vectors

    Args:
        l: Complex parameter of the even-parity pair
        p: Complex parameter of the odd-parity pair
        designated: Names of the outcomes that herald success

    Returns:
        Four-vector basis ordered phi+, phi-, psi+, psi-
    """
    unknown = set(designated) - set(QUBIT_OUTCOMES)
    if unknown:
        raise ValueError(f"unknown qubit outcomes: {sorted(unknown)}")
    l = complex(l)
    p = complex(p)
    big_l = 1.0 / np.sqrt(1.0 + abs(l) ** 2)
    big_p = 1.0 / np.sqrt(1.0 + abs(p) ** 2)
    kets = {
        "phi+": (big_l, 0, 0, np.array([1.0, 0, 0, l])),
        "phi-": (big_l, 0, 1, np.array([l.conjugate(), 0, 0, -1.0])),
        "psi+": (big_p, 1, 0, np.array([0, 1.0, p, 0])),
        "psi-": (big_p, 1, 1, np.array([0, p.conjugate(), -1.0, 0])),
    }
    vectors = []
    for name in QUBIT_OUTCOMES:
        norm, class_m, slot, raw = kets[name]
        vectors.append(
            BasisVector(
                ket=norm * raw.astype(complex),
                class_m=class_m,
                slot=slot,
                label=(class_m, slot),
                designated=name in designated,
                norm_const=float(norm),
                name=name,
            )
        )
    return MeasurementBasis(d=2, kind=BasisKind.QUBIT_NME, vectors=tuple(vectors))


def qubit_parameter_choices(n: complex) -> List[QubitChoice]:
    """
    The four (l, p) choices for a qubit resource N(|00> + n|11>) under which
    two of the four outcomes teleport with unit fidelity
    """
    n = complex(n)
    if n == 0:
        raise ValueError("an unentangled resource admits no successful outcome")
    inv_conj = 1.0 / n.conjugate()
    return [
        QubitChoice(index=1, l=n, p=n.conjugate(), designated=("phi-", "psi+")),
        QubitChoice(index=2, l=n, p=1.0 / n, designated=("phi-", "psi-")),
        QubitChoice(index=3, l=inv_conj, p=1.0 / n, designated=("phi+", "psi-")),
        QubitChoice(index=4, l=inv_conj, p=n.conjugate(), designated=("phi+", "psi+")),
    ]


def qubit_choice_basis(n: complex, choice: int = 1) -> MeasurementBasis:
    """Qubit basis for one of the four parameter choices (numbered 1 to 4)"""
    choices = {c.index: c for c in qubit_parameter_choices(n)}
    if choice not in choices:
        raise ValueError(f"qubit parameter choice must be 1..4, got {choice}")
    selected = choices[choice]
    return qubit_nme_basis(selected.l, selected.p, selected.designated)


def qubit_conditional_states(
    alpha: complex, beta: complex, n: complex, l: complex, p: complex
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Bob's unnormalized states for the outcomes phi+, phi-, psi+, psi-

    The joint state equals N * sum_k |outcome_k> |f_k>, so each f_k still
    lacks the resource normalization N.
    """
    l = complex(l)
    p = complex(p)
    big_l = 1.0 / np.sqrt(1.0 + abs(l) ** 2)
    big_p = 1.0 / np.sqrt(1.0 + abs(p) ** 2)
    f1 = big_l * np.array([alpha, n * beta * l.conjugate()], dtype=complex)
    f2 = big_l * np.array([l * alpha, -n * beta], dtype=complex)
    f3 = big_p * np.array([beta * p.conjugate(), alpha * n], dtype=complex)
    f4 = big_p * np.array([-beta, alpha * n * p], dtype=complex)
    return f1, f2, f3, f4


def _check_full_rank(resource: ResourceState) -> None:
    if not resource.full_rank:
        raise RankDeficientError()


def _designated_ket(resource: ResourceState, l: int, m: int) -> Tuple[np.ndarray, float]:
    d = resource.d
    coeffs = resource.coeffs
    j = np.arange(d)
    shifted = coeffs[(j + m) % d]
    norm = float(1.0 / np.sqrt(np.sum(1.0 / np.abs(coeffs) ** 2)))
    ket = np.zeros(d * d, dtype=complex)
    ket[j * d + (j + m) % d] = norm * _omega(d) ** (l * j) / np.conj(shifted)
    return ket, norm


def qudit_nme_designated(
    resource: ResourceState, l_choice: Optional[Sequence[int]] = None
) -> List[BasisVector]:
    """
    The d vectors, one per class m, whose outcomes leave Bob with a Pauli
    image of the input state

    Vector m has coefficients N w^(l_m j) / conj(d_{j+m}) on |j>|j+m>, where
    N = (sum_p |d_p|^-2)^(-1/2) is the same for every class.

    Args:
        resource: Full-rank shared pair
        l_choice: Phase label per class, default all zero

    Raises:
        RankDeficientError: If some Schmidt coefficient vanishes
    """
    _check_full_rank(resource)
    d = resource.d
    if l_choice is None:
        l_choice = [0] * d
    l_choice = [int(l) for l in l_choice]
    if len(l_choice) != d or any(l < 0 or l >= d for l in l_choice):
        raise ValueError(f"l_choice needs {d} labels in 0..{d - 1}, got {l_choice}")

    vectors = []
    for m, l in enumerate(l_choice):
        ket, norm = _designated_ket(resource, l, m)
        vectors.append(
            BasisVector(
                ket=ket,
                class_m=m,
                slot=0,
                label=(m, 0),
                phase_l=l,
                designated=True,
                norm_const=norm,
            )
        )
    return vectors


def complete_nme_basis(designated: Sequence[BasisVector], d: int) -> MeasurementBasis:
    """
    Complete one designated vector per class into a full orthonormal basis

    Inside each class the designated vector comes first, followed by
    Gram-Schmidt fillers seeded with |j>|j+m>, j ascending.
    """
    by_class = {v.class_m: v for v in designated}
    if sorted(by_class) != list(range(d)) or len(designated) != d:
        raise ValueError("need exactly one designated vector per class")

    vectors = []
    for m in range(d):
        head = by_class[m]
        seeds = [head.ket] + [basis_ket(class_index(j, m, d), d * d) for j in range(d)]
        spanned = gram_schmidt(seeds, keep_first=1)
        if len(spanned) != d:
            raise InvariantViolation(f"class {m} completed to {len(spanned)} vectors instead of {d}")
        vectors.append(head)
        for slot, ket in enumerate(spanned[1:], start=1):
            vectors.append(
                BasisVector(ket=ket, class_m=m, slot=slot, label=(m, slot), designated=False)
            )
    return MeasurementBasis(d=d, kind=BasisKind.QUDIT_NME, vectors=tuple(vectors))


def nme_basis(resource: ResourceState, l_choice: Optional[Sequence[int]] = None) -> MeasurementBasis:
    basis = complete_nme_basis(qudit_nme_designated(resource, l_choice), resource.d)
    logger.debug(f"Built qudit-nme basis for d={resource.d}")
    return basis


def class_overlap_gram(resource: ResourceState, m: int) -> np.ndarray:
    """
    Gram matrix of the d candidate vectors of class m, one per phase label

    Entry (l, k) is N^2 sum_n |d_{n+m}|^-2 w^((k-l) n). The off-diagonal part
    vanishes only for a uniform spectrum, so at most one candidate per class
    fits into an orthonormal basis otherwise.
    """
    _check_full_rank(resource)
    d = resource.d
    if not 0 <= m < d:
        raise ValueError(f"class {m} out of range for d={d}")
    rows = np.stack([_designated_ket(resource, l, m)[0] for l in range(d)])
    return rows.conj() @ rows.T
