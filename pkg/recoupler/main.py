"""
Command-line entry point: hadamard, compile, verify and analysis subcommands.
Artifacts go to files or stdout; diagnostics and logs go to stderr.
"""

import argparse
import json
import sys
from typing import List, Optional, Sequence, Tuple

from recoupler import __version__
from recoupler.core.exceptions import UsageError
from recoupler.exception_handlers import (
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    handle_exception,
)
from recoupler.schemas.compile import CompileRequest
from recoupler.services import analysis, hadamard, pulsegen, verify
from recoupler.utils.documents import (
    format_matrix,
    format_program,
    read_matrix_file,
    read_program_file,
    read_system_file,
    render_timeline,
    write_matrix_file,
    write_sign_matrix_file,
)
from recoupler.utils.logger import cli_logger as logger


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting with status 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _pair(text: str) -> Tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I,J, got '{text}'") from None
    return a, b


def _range(text: str) -> Tuple[int, int]:
    try:
        start, stop = (int(float(x)) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got '{text}'") from None
    if stop <= start:
        raise argparse.ArgumentTypeError(f"empty range '{text}'")
    return start, stop


def _target(text: str) -> verify.Target:
    try:
        return verify.Target.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _json(model) -> str:
    return model.model_dump_json(indent=2) + "\n"


# hadamard

def cmd_hadamard_gen(args: argparse.Namespace) -> int:
    matrix = hadamard.generate(args.order, args.recipe)
    if args.output:
        write_matrix_file(args.output, matrix.entries)
    else:
        sys.stdout.write(format_matrix(matrix.entries))
    logger.info("Generated Hadamard matrix", order=matrix.order, recipe=matrix.provenance.describe())
    return EXIT_OK


def cmd_hadamard_check(args: argparse.Namespace) -> int:
    signs = read_matrix_file(args.file)
    ok = hadamard.is_hadamard(signs)
    print(f"{args.file}: order {signs.shape[0]} {'is' if ok else 'is NOT'} Hadamard")
    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_hadamard_nbar(args: argparse.Namespace) -> int:
    registry = hadamard.get_registry()
    payload = {
        "n": args.n,
        "n_bar": registry.n_bar(args.n),
        "n_under": registry.n_under(args.n),
        "gap": registry.gap(args.n),
        "c": float(registry.c(args.n)),
        "recipe": registry.recipe(registry.n_bar(args.n)).describe(),
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


# compile / verify

def cmd_compile(args: argparse.Namespace) -> int:
    document = read_system_file(args.system)
    system = document.to_spin_system()
    request = CompileRequest(
        op=args.op,
        i=args.i,
        j=args.j,
        extra_pairs=args.pair or [],
        t=args.t,
        knn=args.knn,
        zeeman_free=args.zeeman_free,
    )
    declared = document.declared_topology()
    if declared is not None and request.knn is None and declared.label.startswith("chain-"):
        logger.warning("System declares a chain; pass --knn to use the shorter chain scheme", topology=declared.label)

    program = pulsegen.compile(system, request)
    _emit(format_program(program), args.output)
    if args.sign_matrix:
        write_sign_matrix_file(args.sign_matrix, program.sign_matrix)
    if args.timeline:
        sys.stderr.write(render_timeline(program))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    system = read_system_file(args.system).to_spin_system()
    program = read_program_file(args.program)

    report = verify.verify_program(system, program, target=args.target, oracle=args.oracle)
    if args.trials:
        matrix = program.recover_sign_matrix()
        report.trials = verify.run_trials(matrix, args.trials, args.seed)
        report.verdicts["trials"] = report.trials.passed
    _emit(_json(report), args.output)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


# analysis

def cmd_c_table(args: argparse.Namespace) -> int:
    stats = analysis.c_table(args.max)
    analysis.write_c_table_csv(stats, args.output)
    if args.plot:
        analysis.plot_c_table(stats, args.plot)
    sys.stdout.write(_json(analysis.gap_summary(stats)))
    return EXIT_OK


def cmd_primes(args: argparse.Namespace) -> int:
    start, stop = args.range
    if args.check == "rosser":
        result = analysis.rosser_scan(start, stop)
    elif args.check == "interval":
        result = analysis.interval_scan(start, stop, args.margin)
    else:
        result = analysis.paley_scan(start, stop, args.r)
    sys.stdout.write(_json(result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recoupler", description="Hadamard pulse-sequence compiler and verifier")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    had = commands.add_parser("hadamard", help="Hadamard matrix tools")
    had_commands = had.add_subparsers(dest="action", required=True, parser_class=_Parser)
    gen = had_commands.add_parser("gen", help="generate H(N)")
    gen.add_argument("--order", type=int, required=True)
    gen.add_argument("--recipe", choices=["auto", "sylvester", "paley1", "paley2"], default="auto")
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_hadamard_gen)
    check = had_commands.add_parser("check", help="check a +/- matrix file")
    check.add_argument("file")
    check.set_defaults(func=cmd_hadamard_check)
    nbar = had_commands.add_parser("nbar", help="smallest constructible order >= N")
    nbar.add_argument("--n", type=int, required=True)
    nbar.set_defaults(func=cmd_hadamard_nbar)

    comp = commands.add_parser("compile", help="compile a pulse program")
    comp.add_argument("--system", required=True)
    comp.add_argument("--op", choices=["decouple", "recouple"], required=True)
    comp.add_argument("--i", type=int)
    comp.add_argument("--j", type=int)
    comp.add_argument("--pair", type=_pair, action="append", help="extra disjoint pair I,J recoupled in parallel")
    comp.add_argument("--t", type=float, help="interval duration in seconds (decoupling)")
    comp.add_argument("--knn", type=int, help="neighbour range of a chain scheme")
    comp.add_argument("--zeeman-free", action="store_true")
    comp.add_argument("--sign-matrix", help="also write the sign matrix")
    comp.add_argument("--timeline", action="store_true", help="draw the pulse timeline on stderr")
    comp.add_argument("-o", "--output")
    comp.set_defaults(func=cmd_compile)

    ver = commands.add_parser("verify", help="verify a pulse program")
    ver.add_argument("--system", required=True)
    ver.add_argument("--program", required=True)
    ver.add_argument("--target", type=_target, help="identity, zz:I,J[;K,L]")
    ver.add_argument("--oracle", action="store_true", help="run the simulation oracle")
    ver.add_argument("--trials", type=int, default=0)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("-o", "--output")
    ver.set_defaults(func=cmd_verify)

    ana = commands.add_parser("analysis", help="order statistics and prime checks")
    ana_commands = ana.add_subparsers(dest="action", required=True, parser_class=_Parser)
    table = ana_commands.add_parser("c-table", help="c and gap for n = 1..N")
    table.add_argument("--max", type=int, required=True)
    table.add_argument("-o", "--output", required=True)
    table.add_argument("--plot")
    table.set_defaults(func=cmd_c_table)
    primes = ana_commands.add_parser("primes", help="prime-counting checks")
    primes.add_argument("--check", choices=["rosser", "interval", "paley"], required=True)
    primes.add_argument("--range", type=_range, required=True)
    primes.add_argument("--r", type=int, default=1)
    primes.add_argument("--margin", type=float, default=0.0)
    primes.set_defaults(func=cmd_primes)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        return args.func(args)
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)
    except Exception as exc:
        return handle_exception(exc)


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
