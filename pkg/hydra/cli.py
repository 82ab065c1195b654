"""
Command line entry point: `hydra <command> ...`

Exit codes: 0 success, 1 evaluation error or failed axiom check, 2 parse
error, 3 resource bound exceeded.
"""

# Standard
from typing import IO, Iterable, List, Optional, Sequence
import argparse
import json
import os
import random
import sys
import time

# First Party
import alog

# Local
from .axioms import GenConfig, Report, run_all, supported_axioms
from .bisimulation import canonical_encoding, minimize
from .config import Limits
from .documents import graph_to_document, load_graph, load_mtype_document, read_json
from .errors import HydraError, HydraParseError, ResourceBoundError
from .expr import Session, format_result, parse
from .graph import build
from .hset import Universe
from .mtype import MUniverse, format_truncation, truncate, unfold

log = alog.use_channel("CLI")

EXIT_OK = 0
EXIT_EVALUATION = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3

## Interface ###################################################################


class Repl:
    """Line-oriented read-eval-print loop over one session"""

    prompt = "hydra> "

    def __init__(self, session: Session, output: IO[str], *, interactive: bool = False):
        self.session = session
        self.output = output
        self.interactive = interactive

    def run(self, lines: Iterable[str]) -> int:
        """Evaluate lines until they run out or :quit

        Args:
            lines:  Iterable[str]
                Input lines, one program each

        Returns:
            exit_code:  int
                Exit code of the last failing line, 0 if none failed
        """
        exit_code = EXIT_OK
        self._prompt()
        for line in lines:
            command = line.strip()
            if command == ":quit":
                break
            if command == ":reset":
                self.session.reset()
                log.info("Session reset")
            elif command:
                exit_code = self.handle(command) or exit_code
            self._prompt()
        return exit_code

    def handle(self, text: str) -> int:
        """Evaluate one line, printing results or the error"""
        code, results = _guarded(lambda: self.session.run(parse(text)), self.output)
        for result in results or []:
            self._write(format_result(result))
        return code

    def _prompt(self):
        if self.interactive:
            self.output.write(self.prompt)
            self.output.flush()

    def _write(self, text: str):
        if text:
            self.output.write(text + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hydra",
        description="Hypersets as canonical graphs: evaluate, solve and check axioms",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        help="alog level (default: $LOG_LEVEL or warning)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("repl", help="Interactive session")

    run = commands.add_parser("run", help="Evaluate a .hset program")
    run.add_argument("file")

    solve = commands.add_parser("solve", help="Solve the definitions of a .hset file")
    solve.add_argument("file")

    check = commands.add_parser("check", help="Randomized axiom checks")
    check.add_argument(
        "--axiom",
        action="append",
        choices=supported_axioms(),
        help="Axiom to check; repeatable (default: all)",
    )
    check.add_argument("--samples", type=int, default=100)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--max-nodes", type=int, default=6)
    check.add_argument("--workers", type=int, default=1)

    bench = commands.add_parser("bench", help="Time minimization of a random graph")
    bench.add_argument("--nodes", type=int, default=10**5)
    bench.add_argument("--edges", type=int, default=None, help="default: 3 * nodes")
    bench.add_argument("--seed", type=int, default=0)

    minimize_cmd = commands.add_parser(
        "minimize", help="Canonical minimal form of a JSON graph document"
    )
    minimize_cmd.add_argument("file")

    unfold_cmd = commands.add_parser(
        "unfold", help="Truncated unfolding of a JSON M-type document"
    )
    unfold_cmd.add_argument("file")
    unfold_cmd.add_argument("--depth", type=int, default=4)
    return parser


def main(
    argv: Optional[Sequence[str]] = None,
    *,
    stdin: Optional[IO[str]] = None,
    stdout: Optional[IO[str]] = None,
) -> int:
    """Run the CLI and return its exit code"""
    args = build_parser().parse_args(argv)
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    alog.configure(
        default_level=args.log_level or os.environ.get("LOG_LEVEL", "warning"),
        filters=os.environ.get("LOG_FILTERS", ""),
        formatter="json" if os.environ.get("LOG_JSON", "").lower() == "true" else "pretty",
        thread_id=os.environ.get("LOG_THREAD_ID", "").lower() == "true",
    )
    log.debug("Running command %s", args.command)
    handler = _HANDLERS[args.command]
    code, result = _guarded(lambda: handler(args, stdin, stdout), stdout)
    return code if result is None else result


## Impl ########################################################################


def _guarded(action, output: IO[str]):
    """Run action, mapping hydra errors and I/O failures onto exit codes"""
    try:
        return EXIT_OK, action()
    except HydraParseError as err:
        output.write(f"parse error: {err}\n")
        return EXIT_PARSE, None
    except ResourceBoundError as err:
        output.write(f"resource bound: {err}\n")
        return EXIT_RESOURCE, None
    except (HydraError, OSError) as err:
        output.write(f"error: {err}\n")
        return EXIT_EVALUATION, None


def _read_program(path: str):
    with open(path, "rb") as handle:
        return parse(handle.read())


def _repl(args, stdin: IO[str], stdout: IO[str]) -> int:
    interactive = hasattr(stdin, "isatty") and stdin.isatty()
    return Repl(Session(), stdout, interactive=interactive).run(stdin)


def _run(args, stdin: IO[str], stdout: IO[str]) -> int:
    results = Session().run(_read_program(args.file))
    failed = False
    for result in results:
        text = format_result(result)
        if text:
            stdout.write(text + "\n")
        if isinstance(result, list) and not all(report.passed for report in result):
            failed = True
    return EXIT_EVALUATION if failed else EXIT_OK


def _solve(args, stdin: IO[str], stdout: IO[str]) -> int:
    session = Session()
    session.define(_read_program(args.file).definitions)
    text = format_result({name: session.values[name] for name in session.definitions})
    if text:
        stdout.write(text + "\n")
    return EXIT_OK


def _check(args, stdin: IO[str], stdout: IO[str]) -> int:
    cfg = GenConfig(seed=args.seed, max_nodes=args.max_nodes, samples=args.samples)
    reports: List[Report] = run_all(
        Universe(limits=Limits.from_env()), cfg, args.axiom, workers=args.workers
    )
    for report in reports:
        stdout.write(report.to_line() + "\n")
        for failure in report.failures:
            log.warning("%s failed for seed %d: %s", report.axiom, failure.seed, failure.message)
    return EXIT_OK if all(report.passed for report in reports) else EXIT_EVALUATION


def _bench(args, stdin: IO[str], stdout: IO[str]) -> int:
    edge_count = 3 * args.nodes if args.edges is None else args.edges
    rng = random.Random(args.seed)
    edges = [
        (rng.randrange(args.nodes), rng.randrange(args.nodes)) for _ in range(edge_count)
    ]
    graph = build(args.nodes, edges, 0)
    start = time.perf_counter()
    with alog.ContextTimer(log.info, "Minimized %d nodes in: ", graph.node_count):
        canonical, _ = minimize(graph)
    elapsed = time.perf_counter() - start
    stdout.write(
        f"nodes={graph.node_count} edges={graph.edge_count} "
        f"blocks={canonical.graph.node_count} seconds={elapsed:.3f}\n"
    )
    return EXIT_OK


def _minimize(args, stdin: IO[str], stdout: IO[str]) -> int:
    canonical, _ = minimize(load_graph(read_json(args.file)))
    stdout.write(json.dumps(graph_to_document(canonical.graph)) + "\n")
    stdout.write(canonical_encoding(canonical).hex() + "\n")
    return EXIT_OK


def _unfold(args, stdin: IO[str], stdout: IO[str]) -> int:
    signature, coalgebra = load_mtype_document(read_json(args.file))
    tree = unfold(MUniverse(signature), coalgebra)
    stdout.write(format_truncation(truncate(tree, args.depth)) + "\n")
    return EXIT_OK


_HANDLERS = {
    "repl": _repl,
    "run": _run,
    "solve": _solve,
    "check": _check,
    "bench": _bench,
    "minimize": _minimize,
    "unfold": _unfold,
}
