"""
Closed-form success probabilities, entanglement accounting and sweeps
"""
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.bases import ket_entropy, nme_basis, qudit_nme_designated
from core.models import (
    EQUALITY_TOL,
    EntanglementComparison,
    ResourceBudget,
    ResourceState,
    SweepRow,
)
from core.protocol import RANDOM_INPUT, derive_correction_table, run_monte_carlo
from core.states import entanglement_entropy, make_resource, qubit_resource, random_spectrum, resource_from_lambdas
from services.trials import TrialExecutor, derive_seed, make_rng
from utils.errors import RankDeficientError
from utils.logger import get_logger

logger = get_logger(__name__)

SWEEP_FAMILIES = ("qubit-n", "dirichlet-random", "two-level-qudit")
QUBIT_N_RANGE = (0.05, 1.0)


def _check_full_rank(resource: ResourceState) -> None:
    if not resource.full_rank:
        raise RankDeficientError()


def success_probability_exact(resource: ResourceState) -> float:
    """P_succ = d / sum_k (1 / lambda_k)"""
    _check_full_rank(resource)
    return float(resource.d / np.sum(1.0 / resource.lambdas))


def per_outcome_probability(resource: ResourceState) -> float:
    """|D N|^2, the probability of each designated outcome"""
    _check_full_rank(resource)
    inverse_sum = float(np.sum(1.0 / np.abs(resource.coeffs) ** 2))
    return resource.norm_const ** 2 / inverse_sum


def success_probability_qubit(n: complex) -> float:
    """P_succ = 2|n|^2 / (1 + |n|^2)^2 for the pair N(|00> + n|11>)"""
    if n == 0:
        raise RankDeficientError("an unentangled resource cannot teleport with unit fidelity")
    weight = abs(n) ** 2
    return 2.0 * weight / (1.0 + weight) ** 2


def repetitions(resource: ResourceState) -> float:
    """Expected number of attempts R = 1 / P_succ"""
    return 1.0 / success_probability_exact(resource)


def resource_budget(resource: ResourceState) -> ResourceBudget:
    """
    Shared entanglement and classical bits needed to succeed by repetition

    R attempts consume R pairs, i.e. R * E(resource) ebits, and 2 log2 d
    classical bits each.
    """
    count = repetitions(resource)
    return ResourceBudget(
        repetitions=count,
        ebits=count * entanglement_entropy(resource.lambdas),
        classical_bits=2.0 * count * float(np.log2(resource.d)),
    )


def entanglement_comparison(
    resource: ResourceState, l_choice: Optional[Sequence[int]] = None
) -> EntanglementComparison:
    """
    Compare the entropy of the resource with that of each designated vector

    The designated vector of class m has Schmidt spectrum proportional to
    1 / |d_{j+m}|^2, so the two entropies agree for qubits and generally
    differ for d >= 3.
    """
    designated = qudit_nme_designated(resource, l_choice)
    resource_bits = entanglement_entropy(resource.lambdas)
    designated_bits = [ket_entropy(vector.ket, resource.d) for vector in designated]
    matches = all(abs(bits - resource_bits) <= EQUALITY_TOL for bits in designated_bits)
    return EntanglementComparison(
        resource_bits=resource_bits, designated_bits=designated_bits, matches=matches
    )


def _sweep_row(
    task: Tuple[int, Tuple[complex, ...]], trials: int, seed: int, probe_count: int
) -> SweepRow:
    index, coeffs = task
    resource = make_resource(len(coeffs), coeffs)
    basis = nme_basis(resource)
    table = derive_correction_table(resource, basis, probe_count, derive_seed(seed, index, 0))
    p_exact = success_probability_exact(resource)
    mc = run_monte_carlo(RANDOM_INPUT, resource, basis, table, trials, derive_seed(seed, index, 1))
    return SweepRow(
        d=resource.d,
        lambdas=tuple(float(x) for x in resource.lambdas),
        entropy_bits=entanglement_entropy(resource.lambdas),
        p_succ_exact=p_exact,
        p_succ_mc=mc.empirical_p,
        mc_stderr=mc.stderr,
        repetitions_R=1.0 / p_exact,
        basis_entropy_bits=ket_entropy(basis.vectors[0].ket, resource.d),
    )


class SweepRunner:
    """
    Tabulates exact and sampled success probabilities over a family of
    resources
    """

    def __init__(self, workers: int = 1, probe_count: int = 5):
        """
        Initialize the sweep runner

        Args:
            workers: Number of processes used to evaluate rows
            probe_count: Probe states per correction table
        """
        self.logger = logger
        self.executor = TrialExecutor(workers=workers, chunk_size=1)
        self.probe_count = probe_count

    def sweep(self, family: str, d: int, points: int, trials: int, seed: int) -> List[SweepRow]:
        """
        Evaluate every grid point of a resource family

        Args:
            family: One of qubit-n, dirichlet-random, two-level-qudit
            d: Local dimension (must be 2 for qubit-n)
            points: Number of grid points
            trials: Monte Carlo trials per row
            seed: Master seed

        Returns:
            Rows in grid order
        """
        if points < 1:
            raise ValueError(f"points must be >= 1, got {points}")
        self.logger.info(f"Sweeping {family} family, d={d}, {points} points, {trials} trials per row")

        resources = self._family_resources(family, d, points, seed)
        tasks = [(index, tuple(complex(c) for c in resource.coeffs)) for index, resource in enumerate(resources)]
        worker = partial(_sweep_row, trials=trials, seed=seed, probe_count=self.probe_count)
        rows = []
        for row in self.executor.map(worker, tasks):
            self.logger.debug(f"Row {len(rows)}: p_exact={row.p_succ_exact:.6f} p_mc={row.p_succ_mc:.6f}")
            rows.append(row)
        return rows

    def _family_resources(self, family: str, d: int, points: int, seed: int) -> List[ResourceState]:
        """Deterministic resource grid for a family"""
        if family == "qubit-n":
            if d != 2:
                raise ValueError(f"the qubit-n family needs d=2, got d={d}")
            # a single point sits on the maximally entangled end
            if points == 1:
                magnitudes = np.array([QUBIT_N_RANGE[1]])
            else:
                magnitudes = np.geomspace(QUBIT_N_RANGE[0], QUBIT_N_RANGE[1], points)
            return [qubit_resource(float(n)) for n in magnitudes]

        if family == "two-level-qudit":
            # epsilon runs up to 1/d, where the spectrum becomes uniform
            epsilons = (np.arange(points) + 1) / (points * d)
            return [
                resource_from_lambdas([1.0 - (d - 1) * eps] + [eps] * (d - 1))
                for eps in epsilons
            ]

        if family == "dirichlet-random":
            rng = make_rng(seed)
            return [resource_from_lambdas(random_spectrum(d, rng)) for _ in range(points)]

        raise ValueError(f"unknown sweep family: {family}")


def sweep(
    family: str, d: int, points: int, trials: int, seed: int, workers: int = 1, probe_count: int = 5
) -> List[SweepRow]:
    return SweepRunner(workers=workers, probe_count=probe_count).sweep(family, d, points, trials, seed)
