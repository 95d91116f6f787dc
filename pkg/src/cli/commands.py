"""
Command handlers for the qudit teleportation CLI
"""
import argparse
from typing import Callable, Dict, Optional, TextIO

import numpy as np
from pydantic import ValidationError

from cli.formatting import amplitude_pairs, render_verify_text, to_json, write_json_lines, write_sweep_csv
from cli.schemas import (
    BasisChoice,
    BasisDump,
    BasisVectorRecord,
    Command,
    OutcomeField,
    OutputFormat,
    RunConfig,
    RunSummary,
    TranscriptRecord,
    VerifyReport,
)
from core.analysis import sweep
from core.bases import bell_basis, ket_entropy, nme_basis, qubit_choice_basis
from core.models import MeasurementBasis, ResourceState, Transcript, UnknownQudit
from core.protocol import (
    RANDOM_INPUT,
    derive_correction_table,
    exact_success_probability,
    run_trials,
    summarize,
)
from core.states import qubit_resource, resource_from_lambdas, uniform_resource, unknown_state
from core.tensor import basis_ket
from core.verification import InvariantSuite
from utils.config import AppConfig
from utils.errors import ConfigError, RankDeficientError, TeleportationError
from utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RANK = 3
EXIT_INVARIANT = 4

DEFAULT_FORMATS = {
    Command.TELEPORT: OutputFormat.JSON,
    Command.SWEEP: OutputFormat.CSV,
    Command.VERIFY: OutputFormat.TEXT,
    Command.BASIS: OutputFormat.JSON,
}


def _pick(*values):
    """First value that is not None"""
    for value in values:
        if value is not None:
            return value
    return None


def build_run_config(args: argparse.Namespace, config: AppConfig) -> RunConfig:
    """
    Merge command-line flags over configuration file values

    Args:
        args: Parsed command line
        config: Loaded configuration

    Returns:
        Validated run configuration

    Raises:
        ConfigError: If flags conflict or a value is out of range
    """
    command = Command(args.command)
    options = vars(args)

    lambda_spec = options.get("lambda_spec")
    lambda_from_n = options.get("lambda_from_n")
    if lambda_from_n is not None:
        if lambda_spec is not None:
            raise ConfigError("--lambda and --lambda-from-n are mutually exclusive")
        lambda_spec = f"n={lambda_from_n}"

    if command == Command.SWEEP:
        trials = _pick(options.get("trials"), config.sweep.trials)
    else:
        trials = _pick(options.get("trials"), config.simulation.trials)

    values = {
        "command": command,
        "d": options.get("d"),
        "lambda_spec": lambda_spec,
        "basis": _pick(options.get("basis"), BasisChoice.NME),
        "qubit_choice": _pick(options.get("qubit_choice"), 1),
        "l_choice": _pick(options.get("l_choice"), config.simulation.l_choice),
        "state": _pick(options.get("state"), RANDOM_INPUT),
        "seed": _pick(options.get("seed"), config.simulation.seed),
        "trials": trials,
        "workers": _pick(options.get("workers"), config.simulation.workers),
        "probe_count": config.simulation.probe_count,
        "output_format": _pick(options.get("output_format"), DEFAULT_FORMATS[command]),
        "out": options.get("out"),
        "family": _pick(options.get("family"), config.sweep.family),
        "points": _pick(options.get("points"), config.sweep.points),
        "d_range": _pick(options.get("d_range"), (config.verify.d_min, config.verify.d_max)),
        "samples": _pick(options.get("samples"), config.verify.samples),
        "tolerance": options.get("tolerance"),
    }
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid options: {e}") from e


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}")


def resolve_resource(run: RunConfig) -> ResourceState:
    """
    Build the shared pair from --lambda / --lambda-from-n and --d

    No spectrum means the maximally entangled pair of dimension --d.
    """
    spec = (run.lambda_spec or "uniform").strip()
    try:
        if spec == "uniform":
            if run.d is None:
                raise ConfigError("--d is required with a uniform spectrum")
            return uniform_resource(run.d)

        if spec.startswith("n="):
            if run.d not in (None, 2):
                raise ConfigError(f"an n= spectrum describes a qubit pair, got --d {run.d}")
            return qubit_resource(parse_complex(spec[2:]))

        weights = [float(item) for item in spec.split(",") if item.strip()]
        resource = resource_from_lambdas(weights)
    except TeleportationError:
        raise
    except ValueError as e:
        raise ConfigError(f"invalid spectrum {spec!r}: {e}") from e

    if run.d is not None and run.d != resource.d:
        raise ConfigError(f"spectrum has {resource.d} entries but --d is {run.d}")
    return resource


def resolve_state(run: RunConfig, d: int) -> Optional[UnknownQudit]:
    """Explicit input state, or None for Haar-random inputs"""
    if run.state.strip() == RANDOM_INPUT:
        return None
    amplitudes = [parse_complex(item) for item in run.state.split(",") if item.strip()]
    if len(amplitudes) != d:
        raise ConfigError(f"state has {len(amplitudes)} amplitudes but d={d}")
    try:
        return unknown_state(amplitudes)
    except ValueError as e:
        raise ConfigError(f"invalid state: {e}") from e


def build_basis(run: RunConfig, resource: ResourceState) -> MeasurementBasis:
    """Measurement basis selected by --basis for the given resource"""
    if run.basis == BasisChoice.BELL:
        return bell_basis(resource.d)

    if run.basis == BasisChoice.QUBIT_NME:
        if resource.d != 2:
            raise ConfigError(f"the qubit-nme basis needs d=2, got d={resource.d}")
        if not resource.full_rank:
            raise RankDeficientError()
        n = complex(resource.coeffs[1] / resource.coeffs[0])
        return qubit_choice_basis(n, run.qubit_choice)

    try:
        return nme_basis(resource, run.l_choice)
    except TeleportationError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e


def transcript_record(transcript: Transcript) -> TranscriptRecord:
    correction = transcript.correction
    return TranscriptRecord(
        d=transcript.input_state.d,
        lambdas=list(transcript.lambdas),
        basis_kind=transcript.basis_kind.value,
        outcome=OutcomeField(m=transcript.class_m, slot=transcript.slot),
        message_bits=transcript.message.bits,
        designated=transcript.designated,
        correction="FAIL" if correction is None else f"U_{correction.n},{correction.m}",
        fidelity=transcript.fidelity,
        success=transcript.success,
        seed=transcript.seed,
        generator=transcript.generator,
    )


def cmd_teleport(run: RunConfig, stream: TextIO) -> int:
    """
    Teleport `trials` times, one JSON transcript per line, then a summary line
    """
    resource = resolve_resource(run)
    input_state = resolve_state(run, resource.d)
    basis = build_basis(run, resource)
    table = derive_correction_table(resource, basis, run.probe_count, run.seed)
    logger.info(f"Teleporting {run.trials} times through a {basis.kind.value} basis, d={basis.d}")

    def emitted(transcripts):
        for transcript in transcripts:
            write_json_lines([transcript_record(transcript)], stream)
            yield transcript

    input_spec = input_state if input_state is not None else RANDOM_INPUT
    result = summarize(
        emitted(run_trials(input_spec, resource, basis, table, run.trials, run.seed, run.workers))
    )

    reference = input_state if input_state is not None else unknown_state(basis_ket(0, resource.d))
    exact_p = exact_success_probability(reference, resource, basis, table)
    summary = RunSummary(
        trials=result.trials,
        success_count=result.success_count,
        empirical_p=result.empirical_p,
        exact_p=exact_p,
        stderr=result.stderr,
        mean_fidelity_on_success=result.mean_fidelity_on_success,
        repetitions_R=1.0 / exact_p if exact_p > 0 else None,
    )
    stream.write(to_json({"summary": summary}) + "\n")
    return EXIT_OK


def cmd_sweep(run: RunConfig, stream: TextIO) -> int:
    """Write one row per grid point of the chosen resource family"""
    d = run.d if run.d is not None else 2
    try:
        rows = sweep(
            run.family, d, run.points, run.trials, run.seed,
            workers=run.workers, probe_count=run.probe_count,
        )
    except TeleportationError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e

    if run.output_format == OutputFormat.CSV:
        write_sweep_csv(rows, stream)
    else:
        write_json_lines(rows, stream)
    return EXIT_OK


def cmd_verify(run: RunConfig, stream: TextIO) -> int:
    """Run the invariant suite; exit status 4 when any group fails"""
    d_values = list(range(run.d_range[0], run.d_range[1] + 1))
    suite = InvariantSuite(d_values, samples=run.samples, seed=run.seed, tolerance=run.tolerance)
    checks = suite.run()
    report = VerifyReport(
        d_values=d_values,
        tolerance_override=run.tolerance,
        passed=all(check.passed for check in checks),
        checks=checks,
    )

    if run.output_format == OutputFormat.JSON:
        stream.write(to_json(report, indent=2) + "\n")
    else:
        stream.write(render_verify_text(report))

    if not report.passed:
        failed = [check.name for check in checks if not check.passed]
        logger.error(f"Invariant groups failed: {', '.join(failed)}")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_basis(run: RunConfig, stream: TextIO) -> int:
    """Dump every basis vector with its class, phase label and Schmidt entropy"""
    resource = resolve_resource(run)
    basis = build_basis(run, resource)
    vectors = [
        BasisVectorRecord(
            index=index,
            label=vector.label,
            class_m=vector.class_m,
            slot=vector.slot,
            phase_l=vector.phase_l,
            designated=vector.designated,
            name=vector.name,
            entropy_bits=ket_entropy(vector.ket, basis.d),
            amplitudes=amplitude_pairs(vector.ket),
        )
        for index, vector in enumerate(basis.vectors)
    ]
    dump = BasisDump(
        d=basis.d,
        kind=basis.kind.value,
        lambdas=[float(x) for x in np.asarray(resource.lambdas)],
        designated_count=sum(1 for vector in basis.vectors if vector.designated),
        vectors=vectors,
    )
    stream.write(to_json(dump, indent=2) + "\n")
    return EXIT_OK


COMMANDS: Dict[Command, Callable[[RunConfig, TextIO], int]] = {
    Command.TELEPORT: cmd_teleport,
    Command.SWEEP: cmd_sweep,
    Command.VERIFY: cmd_verify,
    Command.BASIS: cmd_basis,
}
