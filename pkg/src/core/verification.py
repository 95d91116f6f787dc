"""
Invariant suite behind the verify command

Every check is deterministic for a given seed. Equality checks compare a
maximum observed error against a tolerance; margin checks require an observed
gap to exceed a fixed threshold; count checks require zero mismatches.
"""
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from core.analysis import (
    entanglement_comparison,
    repetitions,
    success_probability_exact,
    success_probability_qubit,
)
from core.bases import (
    bell_basis,
    bell_expand,
    class_overlap_gram,
    nme_basis,
    qubit_choice_basis,
    qubit_conditional_states,
    qubit_nme_basis,
)
from core.models import MeasurementBasis, PauliLabel, ResourceState
from core.protocol import derive_correction_table, outcome_distribution
from core.states import (
    all_pauli_labels,
    generalized_pauli,
    qubit_resource,
    random_spectrum,
    random_unknown_state,
    resource_from_lambdas,
    uniform_resource,
)
from services.trials import derive_seed, make_rng
from utils.logger import get_logger

logger = get_logger(__name__)

EQUALITY = "equality"
MARGIN = "margin"
COUNT = "count"


class CheckResult(BaseModel):
    """Outcome of one invariant group"""
    name: str
    kind: str
    observed: float
    threshold: float
    passed: bool


def ramp_spectrum(d: int) -> np.ndarray:
    """Non-uniform spectrum proportional to 1, 2, ..., d"""
    weights = np.arange(1, d + 1, dtype=float)
    return weights / weights.sum()


def _gram_error(basis: MeasurementBasis) -> float:
    size = basis.d * basis.d
    rows = basis.matrix()
    gram_error = np.max(np.abs(rows.conj() @ rows.T - np.eye(size)))
    identity_error = np.max(np.abs(rows.T @ rows.conj() - np.eye(size)))
    return float(max(gram_error, identity_error))


class InvariantSuite:
    """
    Runs the algebraic, probabilistic and entanglement checks over a range of
    dimensions
    """

    EQUALITY_TOLERANCES: Dict[str, float] = {
        "pauli-unitarity": 1e-12,
        "pauli-trace-orthogonality": 1e-12,
        "pauli-action": 1e-12,
        "bell-expansion": 1e-12,
        "basis-orthonormality": 1e-10,
        "class-overlap-uniform": 1e-10,
        "conditional-states": 1e-9,
        "success-probability": 1e-10,
        "unit-fidelity": 1e-10,
        "qubit-entanglement-match": 1e-10,
        "repetition-product": 1e-12,
        "qubit-basis-orthonormality": 1e-10,
        "qubit-success-probability": 1e-12,
        "qubit-conditional-states": 1e-12,
    }
    MARGIN_THRESHOLDS: Dict[str, float] = {
        "class-overlap-nonuniform": 1e-3,
        "qudit-entanglement-mismatch": 1e-3,
        "repetition-monotonicity": 0.0,
    }

    def __init__(
        self,
        d_values: Sequence[int],
        samples: int = 10,
        seed: int = 0,
        tolerance: Optional[float] = None,
    ):
        """
        Initialize the suite

        Args:
            d_values: Dimensions to check
            samples: Random states or resources per dimension and check
            seed: Master seed
            tolerance: Overrides every equality tolerance when given
        """
        if not d_values or min(d_values) < 2:
            raise ValueError(f"dimensions must be >= 2, got {list(d_values)}")
        self.d_values = sorted(set(int(d) for d in d_values))
        self.samples = samples
        self.seed = seed
        self.tolerance = tolerance
        self.logger = logger

    def run(self) -> List[CheckResult]:
        """Run every check group in a fixed order"""
        groups: List[Callable[[], CheckResult]] = [
            self._pauli_unitarity,
            self._pauli_trace_orthogonality,
            self._pauli_action,
            self._bell_expansion,
            self._basis_orthonormality,
            self._class_overlap_uniform,
            self._class_overlap_nonuniform,
            self._conditional_states,
            self._success_probability,
            self._correction_structure,
            self._unit_fidelity,
            self._repetition_product,
            self._repetition_monotonicity,
        ]
        if 2 in self.d_values:
            groups += [
                self._qubit_basis_orthonormality,
                self._qubit_success_probability,
                self._qubit_conditional_states,
                self._qubit_correction_patterns,
                self._qubit_entanglement_match,
            ]
        if any(d >= 3 for d in self.d_values):
            groups.append(self._qudit_entanglement_mismatch)

        results = []
        for group in groups:
            result = group()
            self.logger.info(f"{result.name}: observed={result.observed:.3e} passed={result.passed}")
            results.append(result)
        return results

    # result builders

    def _equality(self, name: str, error: float) -> CheckResult:
        tol = self.tolerance if self.tolerance is not None else self.EQUALITY_TOLERANCES[name]
        return CheckResult(name=name, kind=EQUALITY, observed=error, threshold=tol, passed=bool(error <= tol))

    def _margin(self, name: str, gap: float) -> CheckResult:
        threshold = self.MARGIN_THRESHOLDS[name]
        return CheckResult(name=name, kind=MARGIN, observed=gap, threshold=threshold, passed=bool(gap > threshold))

    def _count(self, name: str, mismatches: int) -> CheckResult:
        return CheckResult(
            name=name, kind=COUNT, observed=float(mismatches), threshold=0.0, passed=bool(mismatches == 0)
        )

    # sampling helpers

    def _rng(self, *counters: int) -> np.random.Generator:
        return make_rng(derive_seed(self.seed, *counters))

    def _random_resources(self, d: int, group: int) -> List[ResourceState]:
        rng = self._rng(group, d)
        return [resource_from_lambdas(random_spectrum(d, rng)) for _ in range(self.samples)]

    def _random_inputs(self, d: int, group: int):
        return [random_unknown_state(d, derive_seed(self.seed, group, d, k)) for k in range(self.samples)]

    # operator algebra

    def _pauli_unitarity(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            for label in all_pauli_labels(d):
                op = generalized_pauli(label, d)
                error = max(error, float(np.max(np.abs(op.conj().T @ op - np.eye(d)))))
        return self._equality("pauli-unitarity", error)

    def _pauli_trace_orthogonality(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            ops = np.stack([generalized_pauli(label, d) for label in all_pauli_labels(d)])
            traces = np.einsum("aij,bij->ab", ops.conj(), ops)
            error = max(error, float(np.max(np.abs(traces - d * np.eye(d * d)))))
        return self._equality("pauli-trace-orthogonality", error)

    def _pauli_action(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            omega = np.exp(2j * np.pi / d)
            k = np.arange(d)
            for state in self._random_inputs(d, 1):
                a = state.amplitudes
                for label in all_pauli_labels(d):
                    acted = generalized_pauli(label, d).conj().T @ a
                    expected = np.zeros(d, dtype=complex)
                    expected[(k + label.m) % d] = a * omega ** (-label.n * k)
                    error = max(error, float(np.max(np.abs(acted - expected))))
        return self._equality("pauli-action", error)

    def _bell_expansion(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            rows = bell_basis(d).matrix()
            for i in range(d):
                for j in range(d):
                    coeffs = bell_expand(i, j, d).reshape(-1)
                    target = np.zeros(d * d, dtype=complex)
                    target[i * d + j] = 1.0
                    error = max(error, float(np.linalg.norm(coeffs @ rows - target)))
        return self._equality("bell-expansion", error)

    # bases

    def _basis_orthonormality(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            error = max(error, _gram_error(bell_basis(d)))
            for resource in self._random_resources(d, 2):
                error = max(error, _gram_error(nme_basis(resource)))
        return self._equality("basis-orthonormality", error)

    def _class_overlap_uniform(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            resource = uniform_resource(d)
            for m in range(d):
                gram = class_overlap_gram(resource, m)
                error = max(error, float(np.max(np.abs(gram - np.eye(d)))))
        return self._equality("class-overlap-uniform", error)

    def _class_overlap_nonuniform(self) -> CheckResult:
        gap = np.inf
        for d in self.d_values:
            resource = resource_from_lambdas(ramp_spectrum(d))
            for m in range(d):
                gram = class_overlap_gram(resource, m)
                off_diagonal = np.abs(gram - np.diag(np.diag(gram)))
                gap = min(gap, float(np.max(off_diagonal)))
        return self._margin("class-overlap-nonuniform", gap)

    # protocol

    def _conditional_states(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            resources = self._random_resources(d, 3)
            inputs = self._random_inputs(d, 3)
            for resource, state in zip(resources, inputs):
                basis = nme_basis(resource)
                for record in outcome_distribution(state, resource, basis):
                    if not record.designated:
                        continue
                    vector = basis.vectors[record.index]
                    expected = generalized_pauli(
                        PauliLabel(n=vector.phase_l, m=vector.class_m), d
                    ).conj().T @ state.amplitudes
                    overlap = abs(np.vdot(expected, record.bob_conditional)) ** 2
                    error = max(error, 1.0 - float(overlap))
        return self._equality("conditional-states", error)

    def _success_probability(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            resources = self._random_resources(d, 4)
            inputs = self._random_inputs(d, 4)
            for resource, state in zip(resources, inputs):
                basis = nme_basis(resource)
                enumerated = sum(
                    r.probability for r in outcome_distribution(state, resource, basis) if r.designated
                )
                error = max(error, abs(enumerated - success_probability_exact(resource)))
        if 3 in self.d_values:
            error = max(error, abs(success_probability_exact(resource_from_lambdas([0.5, 0.25, 0.25])) - 0.3))
        return self._equality("success-probability", error)

    def _correction_structure(self) -> CheckResult:
        mismatches = 0
        for d in self.d_values:
            if d > 5:
                continue
            resource = resource_from_lambdas(ramp_spectrum(d))
            basis = nme_basis(resource)
            table = derive_correction_table(resource, basis, seed=derive_seed(self.seed, 5, d))
            correctable = set(table.correctable_labels)
            designated = {v.label for v in basis.vectors if v.designated}
            mismatches += len(correctable ^ designated)
        return self._count("correction-structure", mismatches)

    def _unit_fidelity(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            if d > 5:
                continue
            resource = resource_from_lambdas(ramp_spectrum(d))
            basis = nme_basis(resource)
            table = derive_correction_table(resource, basis, seed=derive_seed(self.seed, 6, d))
            for state in self._random_inputs(d, 6):
                for record in outcome_distribution(state, resource, basis):
                    correction = table.correction_for(record.label)
                    if not record.designated or correction is None:
                        continue
                    corrected = generalized_pauli(correction, d) @ record.bob_conditional
                    error = max(error, 1.0 - float(abs(np.vdot(state.amplitudes, corrected)) ** 2))
        return self._equality("unit-fidelity", error)

    # analysis

    def _repetition_product(self) -> CheckResult:
        error = 0.0
        for d in self.d_values:
            for resource in self._random_resources(d, 7):
                error = max(error, abs(repetitions(resource) * success_probability_exact(resource) - 1.0))
        return self._equality("repetition-product", error)

    def _repetition_monotonicity(self) -> CheckResult:
        grid = np.geomspace(0.05, 1.0, 50)
        counts = np.array([repetitions(qubit_resource(float(n))) for n in grid])
        return self._margin("repetition-monotonicity", float(np.min(-np.diff(counts))))

    def _qudit_entanglement_mismatch(self) -> CheckResult:
        gap = np.inf
        for d in self.d_values:
            if d < 3:
                continue
            spectrum = [0.5, 0.25, 0.25] if d == 3 else ramp_spectrum(d)
            comparison = entanglement_comparison(resource_from_lambdas(spectrum))
            gap = min(gap, min(abs(b - comparison.resource_bits) for b in comparison.designated_bits))
        return self._margin("qudit-entanglement-mismatch", gap)

    # qubit specifics

    def _random_qubit_parameters(self, group: int) -> np.ndarray:
        rng = self._rng(group, 2)
        count = 10 * self.samples
        magnitudes = rng.uniform(0.05, 3.0, count)
        phases = rng.uniform(0.0, 2 * np.pi, count)
        return magnitudes * np.exp(1j * phases)

    def _qubit_basis_orthonormality(self) -> CheckResult:
        ls = self._random_qubit_parameters(8)
        ps = self._random_qubit_parameters(9)
        error = max(_gram_error(qubit_nme_basis(l, p)) for l, p in zip(ls, ps))
        error = max(error, _gram_error(qubit_nme_basis(0, 0)))
        return self._equality("qubit-basis-orthonormality", error)

    def _qubit_success_probability(self) -> CheckResult:
        error = 0.0
        for n in self._random_qubit_parameters(10):
            error = max(error, abs(success_probability_qubit(n) - success_probability_exact(qubit_resource(n))))
        error = max(error, abs(success_probability_qubit(np.sqrt(0.5)) - 4.0 / 9.0))
        return self._equality("qubit-success-probability", error)

    def _qubit_conditional_states(self) -> CheckResult:
        error = 0.0
        ns = self._random_qubit_parameters(11)
        ls = self._random_qubit_parameters(12)
        ps = self._random_qubit_parameters(13)
        states = self._random_inputs(2, 11)
        for k, state in enumerate(states):
            n, l, p = ns[k], ls[k], ps[k]
            resource = qubit_resource(n)
            basis = qubit_nme_basis(l, p)
            alpha, beta = state.amplitudes
            closed = qubit_conditional_states(alpha, beta, n, l, p)
            for record, f in zip(outcome_distribution(state, resource, basis), closed):
                unnormalized = np.sqrt(record.probability) * record.bob_conditional
                expected = resource.norm_const * f
                error = max(error, float(np.max(np.abs(unnormalized - expected))))
        return self._equality("qubit-conditional-states", error)

    def _qubit_correction_patterns(self) -> CheckResult:
        mismatches = 0
        n = 0.7 * np.exp(0.3j)
        resource = qubit_resource(n)

        basis = nme_basis(resource, l_choice=[1, 0])
        table = derive_correction_table(resource, basis, seed=derive_seed(self.seed, 14))
        mismatches += int(table.correction_for((0, 0)) != PauliLabel(n=1, m=0))
        mismatches += int(table.correction_for((1, 0)) != PauliLabel(n=0, m=1))

        for choice in range(1, 5):
            choice_basis = qubit_choice_basis(n, choice)
            choice_table = derive_correction_table(
                resource, choice_basis, seed=derive_seed(self.seed, 15, choice)
            )
            designated = {v.label for v in choice_basis.vectors if v.designated}
            mismatches += len(set(choice_table.correctable_labels) ^ designated)
        return self._count("qubit-correction-patterns", mismatches)

    def _qubit_entanglement_match(self) -> CheckResult:
        error = 0.0
        for n in self._random_qubit_parameters(16):
            comparison = entanglement_comparison(qubit_resource(n))
            error = max(error, max(abs(b - comparison.resource_bits) for b in comparison.designated_bits))
        return self._equality("qubit-entanglement-match", error)
