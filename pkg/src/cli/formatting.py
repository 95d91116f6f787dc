"""
JSON and CSV emitters with fixed numeric precision
"""
import csv
import json
import sys
from contextlib import contextmanager
from enum import Enum
from typing import Any, Iterable, Iterator, Optional, Sequence, TextIO

import numpy as np
from pydantic import BaseModel

from cli.schemas import VerifyReport
from core.models import SweepRow

SIGNIFICANT_DIGITS = 12

CSV_COLUMNS = (
    "d",
    "lambda_spec",
    "entropy_bits",
    "p_succ_exact",
    "p_succ_mc",
    "mc_stderr",
    "repetitions_R",
    "basis_entropy_bits",
)


def format_number(value: float) -> str:
    return f"{float(value):.{SIGNIFICANT_DIGITS}g}"


def round_number(value: float) -> float:
    return float(format_number(value))


def normalize(value: Any) -> Any:
    """Round floats to 12 significant digits and turn complex numbers into [re, im]"""
    if isinstance(value, BaseModel):
        return normalize(value.model_dump(mode="python", by_alias=True))
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return round_number(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [round_number(value.real), round_number(value.imag)]
    if isinstance(value, np.ndarray):
        return normalize(value.tolist())
    if isinstance(value, dict):
        return {str(key): normalize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(item) for item in value]
    if isinstance(value, Enum):
        return value.value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(value: Any, indent: Optional[int] = None) -> str:
    return json.dumps(normalize(value), indent=indent)


def amplitude_pairs(ket: np.ndarray) -> list:
    return [(float(a.real), float(a.imag)) for a in np.asarray(ket, dtype=complex)]


def lambda_spec_field(lambdas: Sequence[float]) -> str:
    return ";".join(format_number(x) for x in lambdas)


def sweep_csv_row(row: SweepRow) -> dict:
    return {
        "d": str(row.d),
        "lambda_spec": lambda_spec_field(row.lambdas),
        "entropy_bits": format_number(row.entropy_bits),
        "p_succ_exact": format_number(row.p_succ_exact),
        "p_succ_mc": format_number(row.p_succ_mc),
        "mc_stderr": format_number(row.mc_stderr),
        "repetitions_R": format_number(row.repetitions_R),
        "basis_entropy_bits": format_number(row.basis_entropy_bits),
    }


def write_sweep_csv(rows: Iterable[SweepRow], stream: TextIO) -> None:
    writer = csv.DictWriter(stream, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(sweep_csv_row(row))


def write_json_lines(records: Iterable[Any], stream: TextIO) -> None:
    for record in records:
        stream.write(to_json(record) + "\n")


def render_verify_text(report: VerifyReport) -> str:
    """One line per invariant group, then an overall verdict"""
    lines = []
    width = max(len(check.name) for check in report.checks)
    for check in report.checks:
        verdict = "PASS" if check.passed else "FAIL"
        lines.append(
            f"{verdict}  {check.name:<{width}}  {check.kind:<8}  "
            f"observed={check.observed:.3e}  threshold={check.threshold:.3e}"
        )
    failed = sum(1 for check in report.checks if not check.passed)
    lines.append(f"{len(report.checks) - failed}/{len(report.checks)} invariant groups passed")
    return "\n".join(lines) + "\n"


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Yield the file at `path`, or stdout when no path is given"""
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="") as handle:
        yield handle
