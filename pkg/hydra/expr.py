"""
The hyperset expression language: parsing, evaluation and printing.

    # comments run to the end of the line
    x = {y, {}};            # definitions may be mutually recursive
    y = {x};
    μz.{z} :eq μw.{w}       # true, both are the Quine atom
    :print depth=3 x
    :check pairing samples=50

A program is a sequence of definitions, expressions and commands, each
optionally terminated by ';'. Definitions are solved as systems of set
equations, so any guarded recursion has exactly one solution. Numerals stand
for von Neumann numerals and `mu` is an ASCII spelling of the binder μ.
"""

# Standard
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple, Union
import dataclasses
import re

# First Party
import alog

# Local
from .afa import FlatSystem, solve
from .axioms import GenConfig, Report, run_all
from .bisimulation import canonical_encoding
from .errors import EvaluationError, HydraError, HydraParseError
from .hset import (
    HSet,
    Universe,
    equals,
    exponential,
    intersect,
    kuratowski_pair,
    numeral,
    pair,
    powerset,
    succ,
    union_of,
)

log = alog.use_channel("EXPR")

## Types #######################################################################

MAX_NESTING = 256

BUILTINS = {
    "pair": (2, pair),
    "union": (1, union_of),
    "inter": (2, intersect),
    "pow": (1, powerset),
    "exp": (2, exponential),
    "kpair": (2, kuratowski_pair),
    "succ": (1, succ),
}

COMMANDS = ("eq", "min", "pow", "exp", "solve", "check", "print", "reset", "quit")


@dataclasses.dataclass(frozen=True)
class SetLit:
    items: Tuple["Expr", ...]
    position: int = 0


@dataclasses.dataclass(frozen=True)
class Name:
    name: str
    position: int = 0


@dataclasses.dataclass(frozen=True)
class Num:
    value: int
    position: int = 0


@dataclasses.dataclass(frozen=True)
class Call:
    builtin: str
    args: Tuple["Expr", ...]
    position: int = 0


@dataclasses.dataclass(frozen=True)
class Mu:
    var: str
    body: "Expr"
    position: int = 0


Expr = Union[SetLit, Name, Num, Call, Mu]


@dataclasses.dataclass(frozen=True)
class Definition:
    name: str
    expr: Expr
    position: int = 0


@dataclasses.dataclass(frozen=True)
class ExprStatement:
    expr: Expr
    position: int = 0


@dataclasses.dataclass(frozen=True)
class Command:
    name: str
    args: Tuple[Expr, ...] = ()
    options: Tuple[Tuple[str, int], ...] = ()
    target: Optional[str] = None
    position: int = 0

    def option(self, key: str, default: Optional[int] = None) -> Optional[int]:
        return dict(self.options).get(key, default)


Statement = Union[Definition, ExprStatement, Command]


@dataclasses.dataclass(frozen=True)
class Program:
    statements: Tuple[Statement, ...]

    @property
    def definitions(self) -> List[Definition]:
        return [s for s in self.statements if isinstance(s, Definition)]


# What a statement evaluates to
Result = Union[HSet, bool, str, List[Report], Dict[str, HSet], None]

# A flattened term: the name of a system var or a constant set
Term = Union[str, HSet]

## Interface ###################################################################


def parse(text: Union[str, bytes]) -> Program:
    """Parse a program

    Args:
        text:  Union[str, bytes]
            Program text; bytes are decoded as UTF-8

    Returns:
        program:  Program
            The syntax tree; names are not resolved yet
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as err:
            raise HydraParseError("Input is not valid UTF-8", err.start) from err
    return _Parser(text).program()


def parse_expression(text: str) -> Expr:
    """Parse text consisting of exactly one expression"""
    program = parse(text)
    if len(program.statements) != 1 or not isinstance(
        program.statements[0], ExprStatement
    ):
        raise HydraParseError("Expected a single expression", 0, text)
    return program.statements[0].expr


class Session:
    """Evaluation state shared by the statements of a program or REPL session"""

    def __init__(
        self,
        universe: Optional[Universe] = None,
        *,
        gen_config: Optional[GenConfig] = None,
    ):
        self.universe = universe if universe is not None else Universe()
        self.gen_config = gen_config or GenConfig()
        self.definitions: Dict[str, Definition] = {}
        self.values: Dict[str, HSet] = {}

    def reset(self):
        """Discard every definition along with the universe"""
        self.universe = Universe(limits=self.universe.limits)
        self.definitions.clear()
        self.values.clear()

    def run(self, program: Program) -> List[Result]:
        """Add the program's definitions, then evaluate its other statements

        Args:
            program:  Program
                Parsed program

        Returns:
            results:  List[Result]
                One result per expression or command, in order
        """
        self.define(program.definitions)
        results = []
        for statement in program.statements:
            if isinstance(statement, ExprStatement):
                results.append(self.evaluate(statement.expr))
            elif isinstance(statement, Command):
                results.append(self._command(statement))
        return results

    def define(self, definitions: Sequence[Definition]):
        """Add definitions and solve every group that can now be solved"""
        added = []
        try:
            for definition in definitions:
                if definition.name in self.definitions:
                    raise EvaluationError(f"'{definition.name}' is already defined")
                self.definitions[definition.name] = definition
                added.append(definition.name)
            for group in self._pending_groups():
                self._solve_group(group)
        except HydraError:
            for name in added:
                self.definitions.pop(name, None)
                self.values.pop(name, None)
            raise

    def evaluate(self, expr: Expr, forbidden: FrozenSet[str] = frozenset()) -> HSet:
        """Evaluate a closed expression to a set

        Args:
            expr:  Expr
                The expression; free names must be solved definitions
            forbidden:  FrozenSet[str]
                Names whose use here would be recursion through a builtin

        Returns:
            value:  HSet
                The interned value
        """
        flattener = _Flattener(self, group=(), forbidden=forbidden)
        term = flattener.flatten(expr, {})
        return flattener.value(term, flattener.solve())

    ## Impl ##

    def _pending_groups(self) -> List[List[str]]:
        """Unsolved definitions grouped into strongly connected components,
        dependencies first"""
        pending = [name for name in self.definitions if name not in self.values]
        deps = {
            name: [
                ref
                for ref in sorted(free_names(self.definitions[name].expr))
                if ref in self.definitions and ref not in self.values
            ]
            for name in pending
        }
        index: Dict[str, int] = {}
        low: Dict[str, int] = {}
        stack: List[str] = []
        on_stack = set()
        groups = []

        def connect(name: str):
            index[name] = low[name] = len(index)
            stack.append(name)
            on_stack.add(name)
            for ref in deps[name]:
                if ref not in index:
                    connect(ref)
                    low[name] = min(low[name], low[ref])
                elif ref in on_stack:
                    low[name] = min(low[name], index[ref])
            if low[name] == index[name]:
                group = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    group.append(member)
                    if member == name:
                        break
                groups.append(sorted(group, key=pending.index))

        for name in pending:
            if name not in index:
                connect(name)
        return groups

    def _solve_group(self, names: List[str]):
        log.debug2("Solving definitions %s", names)
        flattener = _Flattener(self, group=names, forbidden=frozenset())
        for name in names:
            flattener.flatten(self.definitions[name].expr, {}, target=name)
        solution = flattener.solve()
        for name in names:
            self.values[name] = flattener.value(name, solution)

    def _command(self, command: Command) -> Result:
        log.debug("Running :%s", command.name)
        if command.name == "eq":
            left, right = (self.evaluate(arg) for arg in command.args)
            return equals(left, right)
        if command.name == "min":
            return describe_canonical(self.evaluate(command.args[0]))
        if command.name == "pow":
            return powerset(self.evaluate(command.args[0]))
        if command.name == "exp":
            domain, codomain = (self.evaluate(arg) for arg in command.args)
            return exponential(domain, codomain)
        if command.name == "solve":
            return {name: self.values[name] for name in self.definitions}
        if command.name == "print":
            return print_canonical(
                self.evaluate(command.args[0]), command.option("depth")
            )
        if command.name == "check":
            cfg = dataclasses.replace(
                self.gen_config,
                samples=command.option("samples", self.gen_config.samples),
                seed=command.option("seed", self.gen_config.seed),
            )
            axioms = [command.target] if command.target else None
            return run_all(self.universe, cfg, axioms)
        raise EvaluationError(f":{command.name} is only available in the REPL")


def eval_program(u: Universe, ast: Program) -> Result:
    """Evaluate a program in a fresh session over u

    Args:
        u:  Universe
            The universe to evaluate in
        ast:  Program
            Parsed program

    Returns:
        result:  Result
            The result of the last expression or command, None if there is none
    """
    results = Session(u).run(ast)
    return results[-1] if results else None


def desugar(u: Universe, definitions: Sequence[Definition]) -> FlatSystem:
    """The flat system for a group of definitions; nested set terms become
    fresh vars named %0, %1, ...

    Args:
        u:  Universe
            Universe for constants (numerals, builtin results)
        definitions:  Sequence[Definition]
            Definitions that may refer to each other

    Returns:
        system:  FlatSystem
            Equations over the definition names and the fresh vars
    """
    session = Session(u)
    names = [d.name for d in definitions]
    session.definitions.update((d.name, d) for d in definitions)
    flattener = _Flattener(session, group=names, forbidden=frozenset())
    for definition in definitions:
        flattener.flatten(definition.expr, {}, target=definition.name)
    return flattener.system()


def free_names(expr: Expr, bound: FrozenSet[str] = frozenset()) -> FrozenSet[str]:
    """Names used in expr that are not bound by an enclosing μ"""
    if isinstance(expr, Name):
        return frozenset() if expr.name in bound else frozenset([expr.name])
    if isinstance(expr, (SetLit, Call)):
        parts = expr.items if isinstance(expr, SetLit) else expr.args
        return frozenset().union(*(free_names(part, bound) for part in parts))
    if isinstance(expr, Mu):
        return free_names(expr.body, bound | {expr.var})
    return frozenset()


def print_canonical(x: HSet, depth: Optional[int] = None) -> str:
    """Render a set as nested braces with μ-binders for cycles

    Members are printed in canonical node order. A node gets a binder only if
    it is referenced from inside its own braces; binders are named x0, x1, ...
    in the order they appear.

    Args:
        x:  HSet
            The set to print
        depth:  Optional[int]
            Number of brace levels to print; deeper parts become "..."

    Returns:
        text:  str
            Text that parses and evaluates back to x when depth is unlimited
    """
    if depth is not None and depth < 0:
        raise EvaluationError(f"Print depth must be non-negative, got {depth}")
    graph = x.universe.canonical(x).graph
    parts: List[object] = []
    path: Dict[int, _Binder] = {}
    stack: List[list] = []

    def enter(node: int, remaining: Optional[int]):
        if node in path:
            path[node].used = True
            parts.append(path[node])
        elif remaining == 0:
            parts.append("...")
        else:
            binder = _Binder()
            path[node] = binder
            stack.append([node, 0, binder, len(parts), remaining])
            parts.append(None)
            parts.append("{")

    enter(graph.point, depth)
    while stack:
        frame = stack[-1]
        node, child, binder, slot, remaining = frame
        targets = graph.succ[node]
        if child < len(targets):
            if child:
                parts.append(", ")
            frame[1] += 1
            enter(targets[child], None if remaining is None else remaining - 1)
        else:
            parts.append("}")
            del path[node]
            stack.pop()
            if binder.used:
                parts[slot] = (binder,)

    names: Dict[int, str] = {}
    out = []
    for part in parts:
        if isinstance(part, tuple):
            names[id(part[0])] = f"x{len(names)}"
            out.append(f"μ{names[id(part[0])]}.")
        elif isinstance(part, _Binder):
            out.append(names[id(part)])
        elif part is not None:
            out.append(part)
    return "".join(out)


def describe_canonical(x: HSet) -> str:
    """Multi-line description of the canonical graph of x"""
    canonical = x.universe.canonical(x)
    graph = canonical.graph
    edge_text = " ".join(
        f"{source}->{target}"
        for source, targets in enumerate(graph.succ)
        for target in targets
    )
    return "\n".join(
        [
            f"nodes: {graph.node_count}",
            f"point: {graph.point}",
            f"edges: {edge_text}",
            f"encoding: {canonical_encoding(canonical).hex()}",
        ]
    )


def format_result(result: Result) -> str:
    """Text shown for a statement result"""
    if isinstance(result, HSet):
        return print_canonical(result)
    if isinstance(result, bool):
        return "true" if result else "false"
    if isinstance(result, dict):
        return "\n".join(
            f"{name} = {print_canonical(value)}" for name, value in result.items()
        )
    if isinstance(result, list):
        return "\n".join(
            line for report in result for line in (report.summary(), report.to_line())
        )
    return "" if result is None else str(result)


## Impl ########################################################################


class _Binder:
    __slots__ = ("used",)

    def __init__(self):
        self.used = False


class _Flattener:
    """Turns expressions into flat equations; aliases (x = y) are kept aside
    and resolved before solving"""

    def __init__(self, session: Session, group: Sequence[str], forbidden: FrozenSet[str]):
        self.session = session
        self.group = frozenset(group)
        self.forbidden = forbidden
        self.equations: Dict[str, List[Term]] = {}
        self.aliases: Dict[str, Term] = {}
        self._fresh = 0

    def fresh(self) -> str:
        var = f"%{self._fresh}"
        self._fresh += 1
        return var

    def flatten(
        self,
        expr: Expr,
        scope: Dict[str, str],
        target: Optional[str] = None,
    ) -> Term:
        if isinstance(expr, SetLit):
            var = target or self.fresh()
            self.equations[var] = [self.flatten(item, scope) for item in expr.items]
            return var
        if isinstance(expr, Mu):
            var = target or self.fresh()
            return self.flatten(expr.body, {**scope, expr.var: var}, target=var)
        if isinstance(expr, Name):
            return self._bind(target, self._lookup(expr, scope))
        if isinstance(expr, Num):
            return self._bind(target, numeral(self.session.universe, expr.value))
        if isinstance(expr, Call):
            _, builtin = BUILTINS[expr.builtin]
            blocked = self.forbidden | self.group | frozenset(scope)
            args = [self.session.evaluate(arg, blocked) for arg in expr.args]
            return self._bind(target, builtin(*args))
        assert False, f"PROGRAMMING ERROR: unknown expression {expr!r}"

    def resolve(self, term: Term) -> Term:
        seen = set()
        while isinstance(term, str) and term in self.aliases:
            if term in seen:
                raise EvaluationError(
                    f"Unguarded recursion through '{term}': a name is defined as itself"
                )
            seen.add(term)
            term = self.aliases[term]
        return term

    def system(self) -> FlatSystem:
        return FlatSystem.from_equations(
            {
                var: [self.resolve(term) for term in terms]
                for var, terms in self.equations.items()
            }
        )

    def solve(self) -> Dict[str, HSet]:
        return solve(self.session.universe, self.system())

    def value(self, term: Term, solution: Dict[str, HSet]) -> HSet:
        term = self.resolve(term)
        return term if isinstance(term, HSet) else solution[term]

    def _bind(self, target: Optional[str], term: Term) -> Term:
        if target is None:
            return term
        self.aliases[target] = term
        return target

    def _lookup(self, expr: Name, scope: Dict[str, str]) -> Term:
        name = expr.name
        if name in scope:
            return scope[name]
        if name in self.group:
            return name
        if name in self.forbidden:
            raise EvaluationError(
                f"'{name}' is used recursively inside a builtin argument"
            )
        if name in self.session.values:
            return self.session.values[name]
        raise EvaluationError(f"Unbound name '{name}'")


class _Token(NamedTuple):
    kind: str
    text: str
    position: int


_TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+|\#[^\n]*)
    |(?P<nat>[0-9]+)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_'-]*)
    |(?P<command>:[A-Za-z]+)
    |(?P<punct>[{}(),;=.])
    |(?P<mu>μ)
    """,
    re.VERBOSE,
)

# Longest numeral literal accepted by the parser
_MAX_DIGITS = 64


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise HydraParseError(
                f"Unexpected character {text[position]!r}", position, text
            )
        kind = match.lastgroup
        if kind == "punct":
            kind = match.group()
        if kind != "space":
            tokens.append(_Token(kind, match.group(), position))
        position = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        token = self.peek()
        self.pos = min(self.pos + 1, len(self.tokens) - 1)
        return token

    def error(self, message: str, token: Optional[_Token] = None):
        token = token or self.peek()
        return HydraParseError(message, token.position, self.text)

    def expect(self, kind: str) -> _Token:
        token = self.peek()
        if token.kind != kind:
            raise self.error(f"Expected '{kind}', found {_describe(token)}")
        return self.advance()

    def program(self) -> Program:
        statements = []
        defined = set()
        while self.peek().kind != "end":
            if self.peek().kind == ";":
                self.advance()
                continue
            statement = self.statement()
            if isinstance(statement, Definition):
                if statement.name in defined:
                    raise HydraParseError(
                        f"Duplicate definition of '{statement.name}'",
                        statement.position,
                        self.text,
                    )
                defined.add(statement.name)
            statements.append(statement)
        log.debug3("Parsed %d statements", len(statements))
        return Program(statements=tuple(statements))

    def statement(self) -> Statement:
        token = self.peek()
        if token.kind == "command":
            return self.command()
        if token.kind == "ident" and self.peek(1).kind == "=":
            self.advance()
            self.advance()
            return Definition(token.text, self.expression(0), token.position)
        expr = self.expression(0)
        if self.peek().kind == "command" and self.peek().text == ":eq":
            self.advance()
            return Command("eq", (expr, self.expression(0)), position=token.position)
        return ExprStatement(expr, token.position)

    def command(self) -> Command:
        token = self.advance()
        name = token.text[1:]
        if name not in COMMANDS:
            raise self.error(f"Unknown command '{token.text}'", token)
        if name == "eq":
            raise self.error("':eq' goes between two expressions", token)
        if name in ("min", "pow"):
            return Command(name, (self.expression(0),), position=token.position)
        if name == "exp":
            args = (self.expression(0), self.expression(0))
            return Command(name, args, position=token.position)
        if name == "print":
            options = self.options({"depth"})
            return Command(name, (self.expression(0),), options, position=token.position)
        if name == "check":
            target = None
            if self.peek().kind == "ident" and self.peek(1).kind != "=":
                target = self.advance().text
            options = self.options({"samples", "seed"})
            return Command(name, (), options, target, token.position)
        return Command(name, position=token.position)

    def options(self, allowed: set) -> Tuple[Tuple[str, int], ...]:
        options = []
        while self.peek().kind == "ident" and self.peek(1).kind == "=":
            key = self.advance()
            if key.text not in allowed:
                raise self.error(f"Unknown option '{key.text}'", key)
            self.advance()
            options.append((key.text, self.natural()))
        return tuple(options)

    def natural(self) -> int:
        token = self.expect("nat")
        if len(token.text) > _MAX_DIGITS:
            raise self.error("Numeral literal is too long", token)
        return int(token.text)

    def expression(self, depth: int) -> Expr:
        token = self.peek()
        if depth > MAX_NESTING:
            raise self.error(f"Expression nested deeper than {MAX_NESTING} levels")
        if token.kind == "{":
            self.advance()
            items = []
            if self.peek().kind != "}":
                items.append(self.expression(depth + 1))
                while self.peek().kind == ",":
                    self.advance()
                    items.append(self.expression(depth + 1))
            self.expect("}")
            return SetLit(tuple(items), token.position)
        if token.kind == "nat":
            return Num(self.natural(), token.position)
        if token.kind == "mu" or (
            token.kind == "ident"
            and token.text == "mu"
            and self.peek(1).kind == "ident"
            and self.peek(2).kind == "."
        ):
            self.advance()
            var = self.expect("ident").text
            self.expect(".")
            return Mu(var, self.expression(depth + 1), token.position)
        if token.kind == "ident":
            self.advance()
            if self.peek().kind != "(":
                return Name(token.text, token.position)
            if token.text not in BUILTINS:
                raise self.error(f"Unknown builtin '{token.text}'", token)
            self.advance()
            args = []
            if self.peek().kind != ")":
                args.append(self.expression(depth + 1))
                while self.peek().kind == ",":
                    self.advance()
                    args.append(self.expression(depth + 1))
            self.expect(")")
            arity = BUILTINS[token.text][0]
            if len(args) != arity:
                raise self.error(
                    f"'{token.text}' takes {arity} argument(s), got {len(args)}", token
                )
            return Call(token.text, tuple(args), token.position)
        raise self.error(f"Expected an expression, found {_describe(token)}")


def _describe(token: _Token) -> str:
    return "end of input" if token.kind == "end" else f"'{token.text}'"
