"""Command-line surface: document parsing, distance/mixing commands, and the
cluster benchmark with CSV emission.

Exit codes: 0 success, 2 parse or validation failure, 3 numerical failure or
unsupported spectrum, 4 usage error. Diagnostics go to stderr with an
``error:`` prefix.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Union

import numpy as np

from .cluster import SimulationConfig, SimulationResult, run_simulation
from .core import (
    MarkovChain,
    StochasticMatrix,
    make_probability_vector,
    make_stochastic_matrix,
)
from .errors import (
    NumericalError,
    ParseError,
    ValidationError,
)
from .matdist import (
    METRICS,
    ergodic_distance,
    l1_matrix_distance,
    l2_matrix_distance,
    stochastic_matrix_distance,
    sym_kl_rate,
)
from .mixing import mixing_bounds, mixing_time_exact
from .seqdist import bhattacharyya_rate, sequence_distance

__all__ = ["main", "parse_chain_document", "serialize_chain_document"]

_FMT = ".17g"


def _num(x: float) -> str:
    return format(float(x), _FMT)


# ---------------------------------------------------------------------------
# chain documents
# ---------------------------------------------------------------------------

def parse_chain_document(text: Union[str, bytes], format: str = "json"):
    """Parse a chain document into a MarkovChain or bare StochasticMatrix.

    JSON documents carry {"matrix": [[...]], "initial": [...], "states": [...]}
    with "initial" and "states" optional; CSV documents are a bare numeric
    n x n grid (never an initial distribution).
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if format == "json":
        return _parse_json_document(text)
    if format == "csv":
        return _parse_csv_document(text)
    raise ParseError(f"unknown document format {format!r}")


def _parse_json_document(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ParseError('document must be a JSON object with a "matrix" key')
    try:
        matrix = make_stochastic_matrix(doc["matrix"], labels=doc.get("states"))
    except ValidationError as exc:
        raise type(exc)(f"matrix: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix: {exc}") from None
    if doc.get("initial") is None:
        return matrix
    try:
        initial = make_probability_vector(doc["initial"])
    except ValidationError as exc:
        raise type(exc)(f"initial: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"initial: {exc}") from None
    return MarkovChain(initial, matrix)


def _parse_csv_document(text: str) -> StochasticMatrix:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ParseError("empty CSV document")
    return make_stochastic_matrix(rows)


def serialize_chain_document(obj, format: str = "json") -> str:
    """Inverse of parse_chain_document at full precision."""
    if format == "csv":
        matrix = obj.matrix if isinstance(obj, MarkovChain) else obj
        return "\n".join(",".join(_num(x) for x in row) for row in matrix.rows) + "\n"
    if isinstance(obj, MarkovChain):
        doc = {"matrix": _grid(obj.matrix.rows), "initial": [float(x) for x in obj.initial.values]}
        if obj.matrix.labels is not None:
            doc["states"] = list(obj.matrix.labels)
    else:
        doc = {"matrix": _grid(obj.rows)}
        if obj.labels is not None:
            doc["states"] = list(obj.labels)
    return json.dumps(doc)


def _grid(rows: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in rows]


def _load(path: str):
    fmt = "csv" if path.lower().endswith(".csv") else "json"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        return parse_chain_document(text, fmt)
    except (ValidationError, ParseError) as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _as_chain(obj, path: str) -> MarkovChain:
    if isinstance(obj, MarkovChain):
        return obj
    raise ValidationError(f'{path}: an "initial" distribution is required for this command')


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we want code 4
        raise _UsageError(message)


def _build_parser() -> _Parser:
    top = _Parser(prog="mcdist", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a chain document")
    p.add_argument("file")

    dist = sub.add_parser("dist", help="distances between chains or matrices")
    dsub = dist.add_subparsers(dest="dist_command", required=True)

    p = dsub.add_parser("seq", help="Bhattacharyya angle on length-n sequences")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("file_a")
    p.add_argument("file_b")

    p = dsub.add_parser("rate", help="infinite-run Bhattacharyya distance")
    p.add_argument("file_a")
    p.add_argument("file_b")

    p = dsub.add_parser("matrix", help="distance between stochastic matrices")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--metric", choices=METRICS, default="smd")

    p = dsub.add_parser("ergodic", help="angle between stationary distributions")
    p.add_argument("file_a")
    p.add_argument("file_b")

    mix = sub.add_parser("mix", help="mixing times and bounds")
    msub = mix.add_subparsers(dest="mix_command", required=True)

    p = msub.add_parser("exact", help="exact mixing time by upward scan")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("file")

    p = msub.add_parser("bounds", help="analytic mixing-time bounds")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("file")

    p = sub.add_parser("simulate", help="Dirichlet-cluster benchmark")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--emit-samples", default=None, metavar="FILE")

    return top


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_validate(args) -> int:
    _load(args.file)
    print("ok")
    return 0


def _cmd_dist(args) -> int:
    if args.dist_command == "seq":
        a = _as_chain(_load(args.file_a), args.file_a)
        b = _as_chain(_load(args.file_b), args.file_b)
        print(_num(sequence_distance(a, b, args.n)))
    elif args.dist_command == "rate":
        a = _as_chain(_load(args.file_a), args.file_a)
        b = _as_chain(_load(args.file_b), args.file_b)
        res = bhattacharyya_rate(a, b)
        print(_num(res.value))
    elif args.dist_command == "matrix":
        a = _load(args.file_a)
        b = _load(args.file_b)
        fn = {
            "smd": stochastic_matrix_distance,
            "skl": sym_kl_rate,
            "l1": l1_matrix_distance,
            "l2": l2_matrix_distance,
        }[args.metric]
        print(_num(fn(a, b)))
    else:  # ergodic
        print(_num(ergodic_distance(_load(args.file_a), _load(args.file_b))))
    return 0


def _cmd_mix(args) -> int:
    if args.mix_command == "exact":
        print(mixing_time_exact(_load(args.file), args.start, args.epsilon))
    else:
        b = mixing_bounds(_load(args.file), args.epsilon)
        print(f"tau_minus={b.tau_minus}")
        print(f"tau_plus={b.tau_plus}")
        print(f"lambda_max={_num(b.lambda_max)}")
        print(f"pi_min={_num(b.pi_min)}")
        print(f"gamma={_num(b.gamma)}")
    return 0


def _read_sim_config(path: str, seed_override: Optional[int]) -> SimulationConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "alphas" not in doc:
        raise ParseError(f'{path}: config must be a JSON object with an "alphas" key')
    try:
        return SimulationConfig(
            alphas=tuple(tuple(float(x) for x in a) for a in doc["alphas"]),
            steps=int(doc.get("steps", 20)),
            repetitions=int(doc.get("repetitions", 50)),
            cluster_size=int(doc.get("cluster_size", 20)),
            metrics=tuple(doc.get("metrics", METRICS)),
            seed=int(doc["seed"]) if seed_override is None and "seed" in doc else (seed_override or 0),
            smoothing=float(doc.get("smoothing", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def _write_results_csv(path: str, result: SimulationResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,metric,mean_ari,std_ari,reps\n")
        for row in result.rows:
            fh.write(
                f"{_num(row.t)},{row.metric},{_num(row.mean_ari)},{_num(row.std_ari)},{row.reps}\n"
            )


def _cmd_simulate(args) -> int:
    # MCDIST_THREADS is accepted for interface compatibility; execution is
    # sequential and per-task seeding makes output independent of it anyway.
    threads = os.environ.get("MCDIST_THREADS")
    if threads is not None:
        try:
            int(threads)
        except ValueError:
            raise ValidationError(f"MCDIST_THREADS must be an integer, got {threads!r}") from None
    config = _read_sim_config(args.config, args.seed)
    if args.emit_samples:
        result, samples = run_simulation(config, collect_samples=True)
        n = config.state_count
        with open(args.emit_samples, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,cluster," + ",".join(f"p{j}" for j in range(n)) + "\n")
            for t, k, rows in samples:
                for row in rows:
                    fh.write(f"{_num(t)},{k}," + ",".join(_num(x) for x in row) + "\n")
    else:
        result = run_simulation(config)
    _write_results_csv(args.out, result)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "dist":
            return _cmd_dist(args)
        if args.command == "mix":
            return _cmd_mix(args)
        return _cmd_simulate(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
