"""Problem files and built-in presets.

A problem file is line oriented::

    dim 5
    def b = x1*x3 - x2^2 + x4*x5
    map H = [x5^5, b*x5^3, b^2*x5, -b^2*x1 + 2*b*x2*x5^2 - x3*x5^4, 0]
    task qt-check H

Expressions over x1..xn and over y1..yn are kept in separate contexts; a
declaration may mention earlier declarations of the same kind.  ``#`` starts
a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .parse import parse_list, parse_poly, tokenize
from .poly import Poly, PolyMap, VarContext


@dataclass(frozen=True)
class Task:
    command: str
    args: tuple[str, ...]
    options: tuple[tuple[str, str], ...]
    line: int = 0

    @property
    def kwargs(self) -> dict[str, str]:
        return dict(self.options)

    def echo(self) -> str:
        parts = [self.command, *self.args, *(f"{k}={v}" for k, v in self.options)]
        return " ".join(parts)


@dataclass
class ProblemFile:
    dimension: int
    declarations: dict = field(default_factory=dict)  # name -> Poly | PolyMap
    tasks: list[Task] = field(default_factory=list)

    @property
    def xctx(self) -> VarContext:
        return VarContext.x(self.dimension)

    @property
    def yctx(self) -> VarContext:
        return VarContext.y(self.dimension)


_DECL = re.compile(r"(def|map)\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


def _context_for(text: str, problem: ProblemFile, line: int, col: int) -> VarContext:
    """Pick the x- or y-context from the variables (and declarations) used."""
    kinds = set()
    for tok in tokenize(text, line, col):
        if tok.kind != "name" or tok.text == "i":
            continue
        m = re.fullmatch(r"([xy])\d+", tok.text)
        if m:
            kinds.add(m.group(1))
        elif tok.text in problem.declarations:
            val = problem.declarations[tok.text]
            kinds.add("y" if val.ctx.names and val.ctx.names[0].startswith("y") else "x")
    if len(kinds) > 1:
        raise ParseError("expression mixes x- and y-variables", line, col)
    return problem.yctx if kinds == {"y"} else problem.xctx


def _names_for(problem: ProblemFile, ctx: VarContext) -> dict:
    return {k: v for k, v in problem.declarations.items() if isinstance(v, Poly) and v.ctx == ctx}


def parse_expression(text: str, problem: ProblemFile, line: int = 1, col: int = 1) -> Poly:
    ctx = _context_for(text, problem, line, col)
    return parse_poly(text, ctx, _names_for(problem, ctx), line, col)


def parse_problem(text: str) -> ProblemFile:
    problem = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        indent = len(body) - len(body.lstrip()) + 1
        head = stripped.split(None, 1)[0]
        if head == "dim":
            if problem is not None:
                raise ParseError("duplicate 'dim' line", lineno, indent)
            parts = stripped.split()
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError("expected 'dim <positive integer>'", lineno, indent)
            problem = ProblemFile(int(parts[1]))
            continue
        if problem is None:
            raise ParseError("the first statement must be 'dim <n>'", lineno, indent)
        if head in ("def", "map"):
            m = _DECL.match(stripped)
            if not m:
                raise ParseError(f"malformed '{head}' declaration", lineno, indent)
            kind, name, expr = m.groups()
            if name in problem.declarations:
                raise ParseError(f"duplicate declaration {name!r}", lineno, indent)
            if name == "i" or re.fullmatch(r"[xy]\d+", name):
                raise ParseError(f"{name!r} is reserved", lineno, indent)
            col = indent + m.start(3)
            if kind == "def":
                problem.declarations[name] = parse_expression(expr, problem, lineno, col)
            else:
                ctx = _context_for(expr, problem, lineno, col)
                comps = parse_list(expr, ctx, _names_for(problem, ctx), lineno, col)
                if not comps:
                    raise ParseError("a map needs at least one component", lineno, col)
                problem.declarations[name] = PolyMap(comps, ctx=ctx)
            continue
        if head == "task":
            words = stripped.split()[1:]
            if not words:
                raise ParseError("task without a subcommand", lineno, indent)
            problem.tasks.append(make_task(words, lineno))
            continue
        raise ParseError(f"unknown statement {head!r}", lineno, indent)
    if problem is None:
        raise ParseError("missing 'dim' line", 1, 1)
    return problem


def make_task(words, line: int = 0) -> Task:
    args, opts = [], []
    for w in words[1:]:
        if "=" in w:
            k, v = w.split("=", 1)
            opts.append((k, v))
        else:
            args.append(w)
    return Task(words[0], tuple(args), tuple(opts), line)


PRESETS = {
    "a1": """\
dim 5
map H = [x4^2, x4*x5, x1*x5 - x2*x4, 0, 0]
task qt-check H
task homogeneous-checks H
task linear-invariants H
task degree-report H
""",
    "a2": """\
dim 5
def a = x1*x4 - x2*x3
map H = [x5^2*(a*x1 - x5^2*x2), a*(a*x1 - x5^2*x2), x5^2*(a*x3 - x5^2*x4), a*(a*x3 - x5^2*x4), 0]
task qt-check H
task homogeneous-checks H
task linear-invariants H
task degree-report H
""",
    "b": """\
dim 5
def b = x1*x3 - x2^2 + x4*x5
map H = [x5^5, b*x5^3, b^2*x5, -b^2*x1 + 2*b*x2*x5^2 - x3*x5^4, 0]
def g = 1
def p = x5
def q = b
map hvec = [y1^5, y2*y1^3, y2^2*y1, 0]
task qt-check H
task homogeneous-checks H
task invariants H b x5
task fallb-verify H dist=4 g=g p=p q=q h=hvec
task degree-report H
""",
    "perazzo": """\
dim 5
def h = x1*x4^2 + x2*x4*x5 + x3*x5^2
map H = [x5^2, -2*x4*x5, x4^2, 0, 0]
def f = y3
def a1 = x1^2
def a2 = x1*x2
def a3 = x2^2
task hessian-pipeline h dmax=2
task gn-plane H u=1,0,0,0,0 v=0,1,0,0,0
task gn-form-verify h T=0,0,1,0,0;0,0,0,1,0;0,0,0,0,1;1,0,0,0,0;0,1,0,0,0 f=f a1=a1 a2=a2 a3=a3
""",
}


def preset(name: str) -> ProblemFile:
    try:
        return parse_problem(PRESETS[name])
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
