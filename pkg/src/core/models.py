"""
Domain models for the qudit teleportation simulator
"""
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Numerical tolerances shared by every module
EQUALITY_TOL = 1e-10
VALIDATION_TOL = 1e-8
DEGENERACY_TOL = 1e-14
RANK_TOL = 1e-12


def frozen_array(value, dtype=complex) -> np.ndarray:
    """Copy `value` into a read-only numpy array"""
    array = np.array(value, dtype=dtype)
    array.setflags(write=False)
    return array


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class RegisterShape(BaseModel):
    """Local dimensions of a multi-qudit register, leftmost site most significant"""
    model_config = ConfigDict(frozen=True)

    sites: Tuple[int, ...]

    @field_validator("sites")
    @classmethod
    def _check_sites(cls, sites: Tuple[int, ...]) -> Tuple[int, ...]:
        if not sites:
            raise ValueError("register needs at least one site")
        if any(dim < 2 for dim in sites):
            raise ValueError(f"local dimensions must be >= 2, got {sites}")
        return sites

    @property
    def dim(self) -> int:
        return int(np.prod(self.sites))

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    def flat_index(self, digits: Tuple[int, ...]) -> int:
        """Big-endian mixed-radix index of a tuple of site digits"""
        return int(np.ravel_multi_index(tuple(digits), self.sites))


class UnknownQudit(_ArrayModel):
    """The state |psi> = sum_k a_k |k> that Alice wants to send"""
    amplitudes: np.ndarray

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _check_amplitudes(cls, value) -> np.ndarray:
        amplitudes = frozen_array(value)
        if amplitudes.ndim != 1 or amplitudes.size < 2:
            raise ValueError("amplitudes must be a vector of length >= 2")
        norm_sq = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm_sq - 1.0) > EQUALITY_TOL:
            raise ValueError(f"amplitudes not normalized: squared norm {norm_sq}")
        return amplitudes

    @property
    def d(self) -> int:
        return int(self.amplitudes.size)


class ResourceState(_ArrayModel):
    """Shared pair D * sum_j d_j |j>|j> in Schmidt form"""
    coeffs: np.ndarray

    @field_validator("coeffs", mode="before")
    @classmethod
    def _check_coeffs(cls, value) -> np.ndarray:
        coeffs = frozen_array(value)
        if coeffs.ndim != 1 or coeffs.size < 2:
            raise ValueError("resource needs at least two Schmidt coefficients")
        if float(np.sum(np.abs(coeffs) ** 2)) == 0.0:
            raise ValueError("resource coefficients are all zero")
        return coeffs

    @property
    def d(self) -> int:
        return int(self.coeffs.size)

    @property
    def norm_const(self) -> float:
        """D = 1 / sqrt(sum |d_j|^2)"""
        return float(1.0 / np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    @property
    def lambdas(self) -> np.ndarray:
        """Schmidt spectrum lambda_j = D^2 |d_j|^2"""
        return self.norm_const ** 2 * np.abs(self.coeffs) ** 2

    @property
    def full_rank(self) -> bool:
        return bool(np.min(self.lambdas) > RANK_TOL)

    def ket(self) -> np.ndarray:
        """Two-qudit state vector, first qudit most significant"""
        d = self.d
        vec = np.zeros(d * d, dtype=complex)
        vec[np.arange(d) * (d + 1)] = self.norm_const * self.coeffs
        return vec


class PauliLabel(BaseModel):
    """Indices of the clock-shift operator U_nm (n phase, m shift)"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    m: int = Field(..., ge=0)


class BasisKind(str, Enum):
    """Measurement basis families"""
    BELL = "bell"
    QUBIT_NME = "qubit-nme"
    QUDIT_NME = "qudit-nme"


class BasisVector(_ArrayModel):
    """
    One two-qudit measurement vector with its bookkeeping

    `label` is the native outcome label: (l, p) for Bell vectors and
    (class_m, slot) otherwise. Every vector also carries (class_m, slot).
    """
    ket: np.ndarray
    class_m: int
    slot: int
    label: Tuple[int, int]
    phase_l: Optional[int] = None
    designated: bool = False
    norm_const: Optional[float] = None
    name: Optional[str] = None

    @field_validator("ket", mode="before")
    @classmethod
    def _check_ket(cls, value) -> np.ndarray:
        ket = frozen_array(value)
        norm_sq = float(np.vdot(ket, ket).real)
        if abs(norm_sq - 1.0) > EQUALITY_TOL:
            raise ValueError(f"basis vector not normalized: squared norm {norm_sq}")
        return ket

    @model_validator(mode="after")
    def _check_class_support(self) -> "BasisVector":
        d = int(round(np.sqrt(self.ket.size)))
        if d * d != self.ket.size:
            raise ValueError("basis vector dimension is not a square")
        support = np.zeros(d * d, dtype=bool)
        j = np.arange(d)
        support[j * d + (j + self.class_m) % d] = True
        if np.max(np.abs(self.ket[~support]), initial=0.0) > EQUALITY_TOL:
            raise ValueError(f"basis vector leaks outside class m={self.class_m}")
        return self


class MeasurementBasis(_ArrayModel):
    """Ordered orthonormal set of d^2 two-qudit vectors"""
    d: int = Field(..., ge=2)
    kind: BasisKind
    vectors: Tuple[BasisVector, ...]

    @model_validator(mode="after")
    def _check_basis(self) -> "MeasurementBasis":
        d = self.d
        if len(self.vectors) != d * d:
            raise ValueError(f"expected {d * d} vectors, got {len(self.vectors)}")
        gram = self.gram()
        error = float(np.max(np.abs(gram - np.eye(d * d))))
        if error > EQUALITY_TOL:
            raise ValueError(f"basis is not orthonormal (max Gram error {error:.3e})")
        if self.kind == BasisKind.QUDIT_NME:
            classes = sorted(v.class_m for v in self.vectors if v.designated)
            if classes != list(range(d)):
                raise ValueError("qudit-nme basis needs one designated vector per class")
        return self

    def matrix(self) -> np.ndarray:
        """Rows are the basis kets"""
        return np.stack([v.ket for v in self.vectors])

    def gram(self) -> np.ndarray:
        rows = self.matrix()
        return rows.conj() @ rows.T

    @property
    def labels(self) -> List[Tuple[int, int]]:
        return [v.label for v in self.vectors]

    def index_of(self, label: Tuple[int, int]) -> int:
        return self.labels.index(tuple(label))


class OutcomeRecord(_ArrayModel):
    """One measurement outcome with its Born probability and Bob's state"""
    index: int
    label: Tuple[int, int]
    class_m: int
    slot: int
    probability: float = Field(..., ge=0.0, le=1.0 + EQUALITY_TOL)
    bob_conditional: np.ndarray
    designated: bool


class CorrectionTable(BaseModel):
    """Map from outcome label to the Pauli correction, None meaning FAIL"""
    model_config = ConfigDict(frozen=True)

    d: int
    entries: Dict[Tuple[int, int], Optional[PauliLabel]]

    def correction_for(self, label: Tuple[int, int]) -> Optional[PauliLabel]:
        return self.entries[tuple(label)]

    @property
    def correctable_labels(self) -> List[Tuple[int, int]]:
        return [label for label, pauli in self.entries.items() if pauli is not None]

    @property
    def fail_labels(self) -> List[Tuple[int, int]]:
        return [label for label, pauli in self.entries.items() if pauli is None]


class ClassicalMessage(BaseModel):
    """Outcome index sent from Alice to Bob"""
    model_config = ConfigDict(frozen=True)

    payload: int = Field(..., ge=0)
    d: int = Field(..., ge=2)

    @model_validator(mode="after")
    def _check_payload(self) -> "ClassicalMessage":
        if self.payload >= self.d * self.d:
            raise ValueError(f"payload {self.payload} does not fit d^2 = {self.d ** 2}")
        return self

    @property
    def width(self) -> int:
        """ceil(2 log2 d) bits"""
        return (self.d * self.d - 1).bit_length()

    @property
    def bits(self) -> str:
        return format(self.payload, f"0{self.width}b")


class Transcript(_ArrayModel):
    """One complete protocol run"""
    input_state: UnknownQudit
    lambdas: Tuple[float, ...]
    basis_kind: BasisKind
    outcome_label: Tuple[int, int]
    class_m: int
    slot: int
    designated: bool
    correction: Optional[PauliLabel]
    message: ClassicalMessage
    bob_final: np.ndarray
    fidelity: float
    success: bool
    seed: int
    generator: str = "PCG64"

    @model_validator(mode="after")
    def _check_success(self) -> "Transcript":
        expected = self.designated and self.correction is not None and self.fidelity >= 1.0 - EQUALITY_TOL
        if self.success != expected:
            raise ValueError(
                "success must hold exactly for a corrected designated outcome with unit fidelity"
            )
        return self


class MonteCarloResult(BaseModel):
    """Aggregated statistics of repeated teleportation"""
    trials: int
    success_count: int
    empirical_p: float
    stderr: float
    mean_fidelity_on_success: Optional[float] = None


class EntanglementComparison(BaseModel):
    """Entropy of the resource versus the designated measurement vectors"""
    resource_bits: float
    designated_bits: List[float]
    matches: bool


class ResourceBudget(BaseModel):
    """Cost of teleporting with certainty by repetition"""
    repetitions: float
    ebits: float
    classical_bits: float


class QubitChoice(_ArrayModel):
    """A qubit basis parameter choice and the outcomes it makes succeed"""

    index: int
    l: complex
    p: complex
    designated: Tuple[str, str]


class SweepRow(BaseModel):
    """One point of a success-probability sweep"""
    d: int
    lambdas: Tuple[float, ...]
    entropy_bits: float
    p_succ_exact: float = Field(..., gt=0.0, le=1.0 + EQUALITY_TOL)
    p_succ_mc: float
    mc_stderr: float
    repetitions_R: float
    basis_entropy_bits: float
