"""
Command-line entry point for tribase

    python tribase_cli.py simulate --dim 8 --shots 100000 --seed 3
    python tribase_cli.py simulate --state slit8 --shots 100000 --counts-output counts.json
    python tribase_cli.py reconstruct --input counts.json --output report.json
    python tribase_cli.py sweep --input sweep.json --output sweep.csv
    python tribase_cli.py oracle-check --dim 8 --trials 1000

Exit codes: 0 ok, 2 schema/config, 3 ambiguous support, 4 retries exhausted,
5 oracle failure.
"""
import argparse
import json
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from tribase_bases import PairBasisParams, params_from
from tribase_bench import oracle_check, run_sweep, write_csv
from tribase_config import RunConfig, SweepConfig
from tribase_errors import (
    EXIT_OK,
    EXIT_SCHEMA,
    DimensionMismatch,
    RetriesExhausted,
    SchemaError,
    TribaseError,
)
from tribase_estimate import (
    EstimationReport,
    attempt_seeds,
    estimate_3bb,
    estimate_3bb_with_retry,
    estimate_5bb_report,
    report_to_dict,
)
from tribase_measure import (
    CountRecord,
    load_counts_file,
    simulate_five_bases,
    simulate_three_bases,
    write_counts_file,
)
from tribase_state import NAMED_STATES, PureState, haar_random, infidelity, make_state, require_even_dimension


def log(message: str) -> None:
    print(message, file=sys.stderr)


# ============================================
# Argument parsing
# ============================================

def _phases(text: str) -> List[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"phases must be comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", dest="dimension", type=int, help="Even dimension d >= 4")
    common.add_argument("--shots", type=int, help="Ensemble size N per basis")
    common.add_argument("--seed", type=int, default=0, help="Master seed (default 0)")
    common.add_argument("--method", choices=["3bb", "5bb"], default="3bb")
    common.add_argument("--a", type=float, help="Pair amplitude a (needs --b)")
    common.add_argument("--b", type=float, help="Pair amplitude b (needs --a)")
    common.add_argument("--phases", type=_phases, help="d/2 comma-separated completion phases in radians")
    common.add_argument(
        "--state",
        default="haar",
        help="'haar', 'uniform', a named state (" + ", ".join(NAMED_STATES) + ") or amplitudes like '1,0+1i,-1,0'",
    )
    common.add_argument("--input", help="Counts JSON (reconstruct) or sweep config JSON (sweep)")
    common.add_argument("--output", help="Report JSON or sweep CSV; stdout when omitted")
    common.add_argument("--counts-output", dest="counts_output", help="Write simulated counts to this file")
    common.add_argument("--trials", type=int, default=100, help="Oracle-check trials")
    common.add_argument("--retries", type=int, default=None, help="Maximum re-randomizations")
    common.add_argument("--literal-scaling", dest="literal_scaling", action="store_true",
                        help="Oracle negative control with the uncorrected (p+ - p-)/(ab) scaling")

    parser = argparse.ArgumentParser(description="Three-basis pure-state estimation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "Simulate measurements of a state and estimate it"),
        ("reconstruct", "Estimate a state from a counts file"),
        ("sweep", "Run an accuracy sweep and write CSV"),
        ("oracle-check", "Check correlator formulas and exact recovery"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def parse_state(choice: str, dimension: Optional[int], seed: int) -> PureState:
    """
    Resolve the --state argument

    Amplitudes use Python complex syntax with 'i' allowed for the imaginary
    unit, e.g. "0.5,0.5i,-0.5,0.5-0i".
    """
    if choice == "haar":
        # spawn key 2 keeps the state stream apart from attempt seeds (0, 1)
        return haar_random(dimension, np.random.SeedSequence([seed, 0]).spawn(3)[2])
    if choice == "uniform":
        require_even_dimension(dimension or 0)
        return make_state(np.ones(dimension))
    if choice in NAMED_STATES:
        state = NAMED_STATES[choice]()
    else:
        try:
            amps = [complex(token.strip().replace("i", "j")) for token in choice.split(",")]
        except ValueError:
            raise SchemaError(f"cannot parse amplitudes {choice!r}", "--state")
        state = make_state(amps)
    require_even_dimension(state.dimension)
    if dimension is not None and dimension != state.dimension:
        raise DimensionMismatch(f"--dim {dimension} but --state has {state.dimension} amplitudes")
    return state


# ============================================
# Commands
# ============================================

def _emit(doc: dict, path: Optional[str]) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    truth: PureState
    params: PairBasisParams
    records: List[CountRecord]
    report: EstimationReport

    def to_dict(self) -> dict:
        doc = report_to_dict(self.report)
        doc["infidelity"] = infidelity(self.truth, self.report.estimate)
        return doc


def simulate_run(cfg: RunConfig) -> SimulationResult:
    """
    Prepare the state, measure it and estimate it

    Three-basis runs go through the retry driver; the returned records are
    the counts of the attempt that produced the estimate.
    """
    truth = parse_state(cfg.state, cfg.dimension, cfg.seed)
    params = params_from(cfg.a, cfg.b, cfg.phases, truth.dimension)

    if cfg.method == "5bb":
        records = simulate_five_bases(truth, params, cfg.shots, attempt_seeds(cfg.seed, 0)[1])
        return SimulationResult(truth, params, records, estimate_5bb_report(records, params))

    report = estimate_3bb_with_retry(truth, seed=cfg.seed, shots=cfg.shots, params=params, max_retries=cfg.retries)
    records = simulate_three_bases(truth, report.bases, cfg.shots, attempt_seeds(cfg.seed, report.attempt)[1])
    return SimulationResult(truth, params, records, report)


def cmd_simulate(cfg: RunConfig) -> int:
    try:
        result = simulate_run(cfg)
    except RetriesExhausted as e:
        _emit(report_to_dict(e.report), cfg.output)
        raise

    report = result.report
    if cfg.counts_output:
        write_counts_file(cfg.counts_output, result.truth.dimension, result.params, result.records, report.bases)
    doc = result.to_dict()
    _emit(doc, cfg.output)

    flags = [name for name in ("equal_pairs_detected", "likelihood_tie") if getattr(report.flags, name)]
    log(f"✓ {cfg.method} d={result.truth.dimension} N={cfg.shots} infidelity={doc['infidelity']:.3e} "
        f"retries={report.retries}" + (f" flags={flags}" if flags else ""))
    return EXIT_OK


def cmd_reconstruct(cfg: RunConfig) -> int:
    doc = load_counts_file(cfg.input)
    if doc.method == "5bb":
        report = estimate_5bb_report(doc.records, doc.params)
    else:
        report = estimate_3bb(doc.records, doc.three_basis_set())
    _emit(report_to_dict(report), cfg.output)

    if report.flags.likelihood_tie:
        log(f"⚠ likelihood tie (gap {report.tie_gap:.3e}); re-measure in randomized bases")
    log(f"✓ reconstructed d={doc.dimension} from {cfg.input}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    try:
        with open(cfg.input, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, f"line {e.lineno}")
    try:
        sweep = SweepConfig.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        raise SchemaError(err["msg"], ".".join(str(p) for p in err["loc"]) or "config")

    log(f"Running sweep: d={sweep.dimensions} N={sweep.shots_grid} m={sweep.states} n={sweep.trials} {sweep.method}")
    rows = run_sweep(sweep, progress=lambda line: log(f"  {line}"))
    write_csv(rows, cfg.output)
    log(f"✓ wrote {len(rows)} rows to {cfg.output}")
    return EXIT_OK


def cmd_oracle_check(cfg: RunConfig) -> int:
    summary = oracle_check(cfg.dimension, cfg.trials, cfg.seed, literal_scaling=cfg.literal_scaling)
    print(
        f"PASS d={summary.dimension} trials={summary.trials} "
        f"max_lambda_error={summary.max_lambda_error:.3e} "
        f"max_infidelity_3bb={summary.max_infidelity_3bb:.3e} "
        f"max_infidelity_5bb={summary.max_infidelity_5bb:.3e} "
        f"degenerate={summary.degenerate}"
    )
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "sweep": cmd_sweep,
    "oracle-check": cmd_oracle_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    if args["retries"] is None:
        del args["retries"]
    try:
        cfg = RunConfig(**args)
        return COMMANDS[cfg.command](cfg)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"])
        log(f"✗ invalid options{' (' + where + ')' if where else ''}: {err['msg']}")
        return EXIT_SCHEMA
    except TribaseError as e:
        log(f"✗ {type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        log(f"✗ {e}")
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
