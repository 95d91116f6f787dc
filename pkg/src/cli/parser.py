"""
Argument parser for the qudit teleportation CLI

Options left unset on the command line stay None so that values from the
configuration file can fill them in.
"""
import argparse
from typing import List, Tuple

from core.analysis import SWEEP_FAMILIES


def parse_int_list(text: str) -> List[int]:
    """Parse "0,1,0" into [0, 1, 0]"""
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse_d_range(text: str) -> Tuple[int, int]:
    """Parse "4", "2..6" or "2-6" into an inclusive range"""
    for separator in ("..", "-"):
        if separator in text:
            low, high = text.split(separator, 1)
            break
    else:
        low = high = text
    try:
        bounds = (int(low), int(high))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a dimension or range like 2..6, got {text!r}")
    if bounds[0] < 2 or bounds[1] < bounds[0]:
        raise argparse.ArgumentTypeError(f"invalid dimension range {text!r}")
    return bounds


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="YAML configuration file (default: $CONFIG_PATH)")
    parent.add_argument("--log-level", help="debug, info, warning or error")
    parent.add_argument("--seed", type=int, help="Master seed")
    parent.add_argument("--out", help="Output file (default: stdout)")
    parent.add_argument("--workers", type=int, help="Worker processes")
    return parent


def _resource_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--d", type=int, help="Local dimension")
    parent.add_argument(
        "--lambda",
        dest="lambda_spec",
        help='Schmidt spectrum: comma-separated weights, "uniform" or "n=<complex>"',
    )
    parent.add_argument("--lambda-from-n", help="Qubit resource N(|00> + n|11>), n complex")
    parent.add_argument(
        "--basis",
        "--kind",
        dest="basis",
        choices=["bell", "nme", "qubit-nme"],
        help="Measurement basis (default: nme)",
    )
    parent.add_argument("--l-choice", type=parse_int_list, help="Phase label per class, e.g. 0,1,0")
    parent.add_argument("--qubit-choice", type=int, choices=[1, 2, 3, 4], help="Qubit parameter choice")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common_parent()
    resource = _resource_parent()

    parser = argparse.ArgumentParser(
        prog="qudit-teleport",
        description="Exact simulation of qudit teleportation through entangled resources",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    teleport = commands.add_parser(
        "teleport", parents=[common, resource], help="Run the protocol and emit JSON transcripts"
    )
    teleport.add_argument("--state", help='"random" or comma-separated complex amplitudes')
    teleport.add_argument("--trials", type=int, help="Number of teleportations")
    teleport.add_argument("--format", dest="output_format", choices=["json"], help="Output format")

    sweep = commands.add_parser(
        "sweep", parents=[common], help="Tabulate success probability over a resource family"
    )
    sweep.add_argument("--family", choices=list(SWEEP_FAMILIES), help="Resource family")
    sweep.add_argument("--d", type=int, help="Local dimension")
    sweep.add_argument("--points", type=int, help="Grid points")
    sweep.add_argument("--trials", type=int, help="Monte Carlo trials per row")
    sweep.add_argument("--format", dest="output_format", choices=["csv", "json"], help="Output format")

    verify = commands.add_parser("verify", parents=[common], help="Run the invariant suite")
    verify.add_argument("--d", dest="d_range", type=parse_d_range, help="Dimension or range, e.g. 2..6")
    verify.add_argument("--samples", type=int, help="Random samples per dimension")
    verify.add_argument("--tolerance", type=float, help="Override every equality tolerance")
    verify.add_argument("--format", dest="output_format", choices=["text", "json"], help="Output format")

    basis = commands.add_parser("basis", parents=[common, resource], help="Dump a measurement basis")
    basis.add_argument("--format", dest="output_format", choices=["json"], help="Output format")

    return parser
