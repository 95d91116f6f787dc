"""
Teleportation protocol engine

Alice holds the unknown qudit `a` and qudit `1` of the shared pair, Bob holds
qudit `2`. The joint register is ordered (a, 1, 2), Alice measures sites
(0, 1) and Bob's conditional state lives on site 2.
"""
from functools import partial
from typing import Callable, Iterable, Iterator, List, NamedTuple, Tuple, Union

import numpy as np

from core.models import (
    DEGENERACY_TOL,
    EQUALITY_TOL,
    BasisKind,
    ClassicalMessage,
    CorrectionTable,
    MeasurementBasis,
    MonteCarloResult,
    OutcomeRecord,
    RegisterShape,
    ResourceState,
    Transcript,
    UnknownQudit,
)
from core.states import all_pauli_labels, generalized_pauli, random_unknown_state
from core.tensor import as_vector, kron, project_many, require_normalized
from services.trials import GENERATOR_NAME, TrialExecutor, derive_seed, make_rng
from utils.errors import DimensionMismatchError, InvariantViolation
from utils.logger import get_logger

logger = get_logger(__name__)

ALICE_SITES = (0, 1)
CORRECTION_TOL = 1e-9
RANDOM_INPUT = "random"

InputSpec = Union[UnknownQudit, str]


def fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>|^2 for normalized states of equal dimension"""
    psi = as_vector(psi)
    phi = as_vector(phi)
    if psi.size != phi.size:
        raise DimensionMismatchError(f"fidelity of dims {psi.size} and {phi.size}")
    require_normalized(psi)
    require_normalized(phi)
    return float(min(1.0, abs(np.vdot(psi, phi)) ** 2))


def _check_dims(input_d: int, resource: ResourceState, basis: MeasurementBasis) -> int:
    if not input_d == resource.d == basis.d:
        raise DimensionMismatchError(
            f"input d={input_d}, resource d={resource.d} and basis d={basis.d} disagree"
        )
    return basis.d


def _joint_projections(
    amplitudes: np.ndarray, resource: ResourceState, basis: MeasurementBasis
) -> Tuple[np.ndarray, np.ndarray]:
    """Born probabilities and unnormalized Bob states for every basis vector"""
    d = basis.d
    joint = kron(amplitudes, resource.ket())
    shape = RegisterShape(sites=(d, d, d))
    return project_many(joint, basis.matrix(), ALICE_SITES, shape)


def outcome_distribution(
    input_state: UnknownQudit, resource: ResourceState, basis: MeasurementBasis
) -> List[OutcomeRecord]:
    """
    Enumerate every outcome of Alice's measurement exactly

    Args:
        input_state: State to teleport
        resource: Shared pair
        basis: Alice's measurement basis on (a, 1)

    Returns:
        One record per basis vector, in basis order
    """
    _check_dims(input_state.d, resource, basis)
    probabilities, amplitudes = _joint_projections(input_state.amplitudes, resource, basis)
    total = float(np.sum(probabilities))
    if abs(total - 1.0) > EQUALITY_TOL:
        raise InvariantViolation(f"outcome probabilities sum to {total:.12g}")

    records = []
    for index, vector in enumerate(basis.vectors):
        probability = float(probabilities[index])
        if probability > DEGENERACY_TOL:
            bob = amplitudes[index] / np.sqrt(probability)
        else:
            bob = np.zeros(basis.d, dtype=complex)
        records.append(
            OutcomeRecord(
                index=index,
                label=vector.label,
                class_m=vector.class_m,
                slot=vector.slot,
                probability=min(probability, 1.0),
                bob_conditional=bob,
                designated=vector.designated,
            )
        )
    return records


def _probe_states(d: int, probe_count: int, seed: int) -> List[np.ndarray]:
    """|0>, the uniform superposition and Haar-random states"""
    probes = [np.eye(d, dtype=complex)[0], np.ones(d, dtype=complex) / np.sqrt(d)]
    for k in range(probe_count - 2):
        probes.append(random_unknown_state(d, derive_seed(seed, k)).amplitudes)
    return probes


def _search_corrections(
    resource: ResourceState, basis: MeasurementBasis, probes: List[np.ndarray]
) -> np.ndarray:
    """Boolean matrix (outcome, Pauli) of corrections that work for all probes"""
    d = basis.d
    paulis = np.stack([generalized_pauli(label, d) for label in all_pauli_labels(d)])
    accepted = np.ones((d * d, d * d), dtype=bool)
    for probe in probes:
        probabilities, amplitudes = _joint_projections(probe, resource, basis)
        for index in range(d * d):
            if probabilities[index] <= DEGENERACY_TOL:
                accepted[index] = False
                continue
            bob = amplitudes[index] / np.sqrt(probabilities[index])
            overlaps = np.abs((paulis @ bob) @ probe.conj()) ** 2
            accepted[index] &= overlaps >= 1.0 - CORRECTION_TOL
    return accepted


def derive_correction_table(
    resource: ResourceState, basis: MeasurementBasis, probe_count: int = 5, seed: int = 0
) -> CorrectionTable:
    """
    Find, for every outcome, the Pauli U with U |bob> = |psi> up to phase

    Each of the d^2 Paulis is tried against |0>, the uniform superposition and
    probe_count - 2 Haar-random probes; outcomes without a working Pauli FAIL.

    Args:
        resource: Shared pair
        basis: Alice's measurement basis
        probe_count: Total number of probe states (>= 3)
        seed: Seed for the Haar-random probes

    Returns:
        Correction table keyed by outcome label

    Raises:
        InvariantViolation: If two Paulis fit one outcome twice in a row, or a
            designated vector of a qudit-nme basis gets no correction
    """
    if probe_count < 3:
        raise ValueError(f"probe_count must be >= 3, got {probe_count}")
    d = _check_dims(resource.d, resource, basis)
    labels = all_pauli_labels(d)

    for attempt in range(2):
        probes = _probe_states(d, probe_count, derive_seed(seed, attempt))
        accepted = _search_corrections(resource, basis, probes)
        if np.all(accepted.sum(axis=1) <= 1):
            break
        logger.warning(f"Probe set {attempt} is degenerate, retrying with fresh probes")
    else:
        raise InvariantViolation("two distinct Pauli corrections fit one outcome")

    entries = {}
    for index, vector in enumerate(basis.vectors):
        hits = np.flatnonzero(accepted[index])
        correction = labels[int(hits[0])] if hits.size else None
        if correction is None and vector.designated:
            if basis.kind == BasisKind.QUDIT_NME:
                raise InvariantViolation(f"designated outcome {vector.label} has no correction")
            logger.warning(f"Designated outcome {vector.label} has no correction for this resource")
        entries[vector.label] = correction

    table = CorrectionTable(d=d, entries=entries)
    logger.info(
        f"Derived correction table for {basis.kind.value} basis, d={d}: "
        f"{len(table.correctable_labels)} correctable, {len(table.fail_labels)} FAIL"
    )
    return table


def _fidelity_or_zero(psi: np.ndarray, phi: np.ndarray) -> float:
    if abs(float(np.vdot(phi, phi).real) - 1.0) > EQUALITY_TOL:
        return 0.0
    return fidelity(psi, phi)


class TrialOutcome(NamedTuple):
    """Result of one sampled run, before it is turned into a Transcript"""
    index: int
    designated: bool
    bob_final: np.ndarray
    fidelity: float
    success: bool


class TrialKernel:
    """
    Per-run constants for repeated teleportation

    Holds the basis rows, the pair's state vector and one correction operator
    per outcome. A trial projects once and samples a single outcome.
    """

    def __init__(self, resource: ResourceState, basis: MeasurementBasis, table: CorrectionTable):
        """
        Initialize the kernel

        Args:
            resource: Shared pair
            basis: Alice's measurement basis
            table: Corrections derived for (resource, basis)

        Raises:
            DimensionMismatchError: If the table does not belong to the basis
        """
        if table.d != basis.d or set(table.entries) != set(basis.labels):
            raise DimensionMismatchError("correction table does not belong to this basis")
        d = _check_dims(resource.d, resource, basis)
        self.d = d
        self.resource = resource
        self.basis = basis
        self.lambdas = tuple(float(x) for x in resource.lambdas)
        self.rows = basis.matrix()
        self.pair = resource.ket()
        self.shape = RegisterShape(sites=(d, d, d))
        self.corrections = [table.correction_for(v.label) for v in basis.vectors]
        self.operators = [
            None if correction is None else generalized_pauli(correction, d) for correction in self.corrections
        ]

    def project(self, input_state: UnknownQudit) -> Tuple[np.ndarray, np.ndarray]:
        """Born probabilities and unnormalized Bob states for one input"""
        if input_state.d != self.d:
            raise DimensionMismatchError(f"input d={input_state.d} does not match d={self.d}")
        joint = kron(input_state.amplitudes, self.pair)
        probabilities, amplitudes = project_many(joint, self.rows, ALICE_SITES, self.shape)
        total = float(np.sum(probabilities))
        if abs(total - 1.0) > EQUALITY_TOL:
            raise InvariantViolation(f"outcome probabilities sum to {total:.12g}")
        return probabilities, amplitudes

    def draw(
        self, input_state: UnknownQudit, projections: Tuple[np.ndarray, np.ndarray], seed: int
    ) -> TrialOutcome:
        """Sample one outcome and apply its correction"""
        probabilities, amplitudes = projections
        cumulative = np.cumsum(probabilities)
        u = make_rng(seed).random() * cumulative[-1]
        index = min(int(np.searchsorted(cumulative, u, side="right")), probabilities.size - 1)

        probability = float(probabilities[index])
        if probability > DEGENERACY_TOL:
            bob = amplitudes[index] / np.sqrt(probability)
        else:
            bob = np.zeros(self.d, dtype=complex)
        operator = self.operators[index]
        bob_final = bob if operator is None else operator @ bob
        score = _fidelity_or_zero(input_state.amplitudes, bob_final)
        designated = self.basis.vectors[index].designated
        success = designated and operator is not None and score >= 1.0 - EQUALITY_TOL
        return TrialOutcome(index, designated, bob_final, score, success)

    def transcript(self, input_state: UnknownQudit, outcome: TrialOutcome, seed: int) -> Transcript:
        vector = self.basis.vectors[outcome.index]
        return Transcript(
            input_state=input_state,
            lambdas=self.lambdas,
            basis_kind=self.basis.kind,
            outcome_label=vector.label,
            class_m=vector.class_m,
            slot=vector.slot,
            designated=outcome.designated,
            correction=self.corrections[outcome.index],
            message=ClassicalMessage(payload=outcome.index, d=self.d),
            bob_final=outcome.bob_final,
            fidelity=outcome.fidelity,
            success=outcome.success,
            seed=seed,
            generator=GENERATOR_NAME,
        )


def teleport(
    input_state: UnknownQudit,
    resource: ResourceState,
    basis: MeasurementBasis,
    table: CorrectionTable,
    seed: int,
) -> Transcript:
    """
    Run the protocol once: measure, send the outcome index, correct

    Args:
        input_state: State to teleport
        resource: Shared pair
        basis: Alice's measurement basis
        table: Corrections derived for (resource, basis)
        seed: Seed for the Born-rule draw

    Returns:
        Transcript of the run; FAIL outcomes keep Bob's uncorrected state
    """
    kernel = TrialKernel(resource, basis, table)
    outcome = kernel.draw(input_state, kernel.project(input_state), seed)
    return kernel.transcript(input_state, outcome, seed)


def exact_success_probability(
    input_state: UnknownQudit,
    resource: ResourceState,
    basis: MeasurementBasis,
    table: CorrectionTable,
) -> float:
    """Total probability of designated outcomes that have a correction"""
    return float(
        sum(
            record.probability
            for record in outcome_distribution(input_state, resource, basis)
            if record.designated and table.correction_for(record.label) is not None
        )
    )


def _chunk_draws(
    bounds: Tuple[int, int], input_spec: InputSpec, kernel: TrialKernel, seed: int
) -> Iterator[Tuple[UnknownQudit, TrialOutcome, int]]:
    """(input, outcome, outcome seed) for every trial in [start, stop)"""
    start, stop = bounds
    fixed = None
    if isinstance(input_spec, UnknownQudit):
        fixed = kernel.project(input_spec)
    elif input_spec != RANDOM_INPUT:
        raise ValueError(f"unknown input spec: {input_spec!r}")

    for trial in range(start, stop):
        if fixed is None:
            input_state = random_unknown_state(kernel.d, derive_seed(seed, trial, 0))
            projections = kernel.project(input_state)
        else:
            input_state, projections = input_spec, fixed
        outcome_seed = derive_seed(seed, trial, 1)
        yield input_state, kernel.draw(input_state, projections, outcome_seed), outcome_seed


def _transcript_chunk(
    bounds: Tuple[int, int], input_spec: InputSpec, kernel: TrialKernel, seed: int
) -> List[Transcript]:
    return [
        kernel.transcript(input_state, outcome, outcome_seed)
        for input_state, outcome, outcome_seed in _chunk_draws(bounds, input_spec, kernel, seed)
    ]


def _outcome_chunk(
    bounds: Tuple[int, int], input_spec: InputSpec, kernel: TrialKernel, seed: int
) -> List[TrialOutcome]:
    return [outcome for _, outcome, _ in _chunk_draws(bounds, input_spec, kernel, seed)]


def _map_chunks(
    chunk_fn: Callable, input_spec: InputSpec, kernel: TrialKernel, trials: int, seed: int, workers: int
) -> Iterator:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    executor = TrialExecutor(workers=workers)
    worker = partial(chunk_fn, input_spec=input_spec, kernel=kernel, seed=seed)
    for chunk in executor.map(worker, executor.chunks(trials)):
        for item in chunk:
            yield item


def run_trials(
    input_spec: InputSpec,
    resource: ResourceState,
    basis: MeasurementBasis,
    table: CorrectionTable,
    trials: int,
    seed: int,
    workers: int = 1,
) -> Iterator[Transcript]:
    """
    Teleport `trials` times with per-trial seeds derived from `seed`

    Trial i draws its input (for the "random" spec) from derive_seed(seed, i, 0)
    and its outcome from derive_seed(seed, i, 1). Transcripts are yielded in
    trial order whatever the number of workers.
    """
    kernel = TrialKernel(resource, basis, table)
    return _map_chunks(_transcript_chunk, input_spec, kernel, trials, seed, workers)


def summarize(outcomes: Iterable[Union[Transcript, TrialOutcome]]) -> MonteCarloResult:
    """Success count, empirical probability and mean fidelity on designated outcomes"""
    trials = 0
    successes = 0
    designated = 0
    fidelity_sum = 0.0
    for outcome in outcomes:
        trials += 1
        successes += int(outcome.success)
        if outcome.designated:
            designated += 1
            fidelity_sum += outcome.fidelity
    if trials == 0:
        raise ValueError("no transcripts to summarize")
    p_hat = successes / trials
    return MonteCarloResult(
        trials=trials,
        success_count=successes,
        empirical_p=p_hat,
        stderr=float(np.sqrt(p_hat * (1.0 - p_hat) / trials)),
        mean_fidelity_on_success=fidelity_sum / designated if designated else None,
    )


def run_monte_carlo(
    input_spec: InputSpec,
    resource: ResourceState,
    basis: MeasurementBasis,
    table: CorrectionTable,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloResult:
    """
    Estimate the success probability by repeated teleportation

    Draws the same outcomes as run_trials with the same seed, without
    building a Transcript per trial.
    """
    kernel = TrialKernel(resource, basis, table)
    result = summarize(_map_chunks(_outcome_chunk, input_spec, kernel, trials, seed, workers))
    logger.info(
        f"Monte Carlo: {result.success_count}/{result.trials} successes, "
        f"p={result.empirical_p:.6f} +- {result.stderr:.6f}"
    )
    return result
