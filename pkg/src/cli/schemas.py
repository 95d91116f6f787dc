"""
Run configuration and output records for the command-line interface
"""
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from core.verification import CheckResult


class Command(str, Enum):
    """Enum for CLI subcommands"""
    TELEPORT = "teleport"
    SWEEP = "sweep"
    VERIFY = "verify"
    BASIS = "basis"


class BasisChoice(str, Enum):
    """Enum for measurement bases selectable on the command line"""
    BELL = "bell"
    NME = "nme"
    QUBIT_NME = "qubit-nme"


class OutputFormat(str, Enum):
    """Enum for output formats"""
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class RunConfig(BaseModel):
    """Fully resolved settings of one CLI invocation"""
    command: Command
    d: Optional[int] = Field(None, ge=2, description="Local dimension")
    lambda_spec: Optional[str] = Field(
        None, description='Comma-separated spectrum, "uniform" or "n=<complex>"'
    )
    basis: BasisChoice = BasisChoice.NME
    qubit_choice: int = Field(1, ge=1, le=4)
    l_choice: Optional[List[int]] = None
    state: str = Field("random", description='"random" or comma-separated amplitudes')
    seed: int = Field(7, ge=0)
    trials: int = Field(1000, ge=1)
    workers: int = Field(1, ge=1)
    probe_count: int = Field(5, ge=3)
    output_format: OutputFormat = OutputFormat.JSON
    out: Optional[str] = None
    family: str = "qubit-n"
    points: int = Field(20, ge=1)
    d_range: Tuple[int, int] = (2, 6)
    samples: int = Field(10, ge=1)
    tolerance: Optional[float] = Field(None, gt=0.0)


class OutcomeField(BaseModel):
    """Class and slot of a measurement outcome"""
    m: int
    slot: int


class TranscriptRecord(BaseModel):
    """One JSON line per teleportation"""
    model_config = ConfigDict(populate_by_name=True)

    d: int
    lambdas: List[float] = Field(..., alias="lambda")
    basis_kind: str
    outcome: OutcomeField
    message_bits: str
    designated: bool
    correction: str = Field(..., description='Applied Pauli as "U_nm", or "FAIL"')
    fidelity: float
    success: bool
    seed: int
    generator: str


class RunSummary(BaseModel):
    """Closing line of a teleport run"""
    trials: int
    success_count: int
    empirical_p: float
    exact_p: float
    stderr: float
    mean_fidelity_on_success: Optional[float] = None
    repetitions_R: Optional[float] = None


class BasisVectorRecord(BaseModel):
    """One basis vector with its metadata and amplitudes as [re, im] pairs"""
    index: int
    label: Tuple[int, int]
    class_m: int
    slot: int
    phase_l: Optional[int] = None
    designated: bool
    name: Optional[str] = None
    entropy_bits: float
    amplitudes: List[Tuple[float, float]]


class BasisDump(BaseModel):
    """Output of the basis command"""
    model_config = ConfigDict(populate_by_name=True)

    d: int
    kind: str
    lambdas: Optional[List[float]] = Field(None, alias="lambda")
    designated_count: int
    vectors: List[BasisVectorRecord]


class VerifyReport(BaseModel):
    """Output of the verify command"""
    d_values: List[int]
    tolerance_override: Optional[float] = None
    passed: bool
    checks: List[CheckResult]
