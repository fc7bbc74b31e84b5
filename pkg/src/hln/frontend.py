"""Parser and printer for the high-level notation.

A program is a ``;``-separated sequence of actions, optionally terminated by
``()``::

    bind(Gd, Gbg, G, 1.0); bind(R, L, RL, 3.32e-6);
    activateAnddissociate(G, RL, Ga, Gbg, 1.0e-5);
    dissociate(RL, R, L, 0.01); hydrolyze(Ga, Gd, 0.11);
    degrade(R, 4e-4); degrade(RL, 4e-3)

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum


class ActionKind(Enum):
    BIND = "bind"
    DIMERIZE = "dimerize"
    ACTIVATE = "activate"
    ACTIVATE_AND_DISSOCIATE = "activateAnddissociate"
    PHOSPHORYLATE = "phosphorylate"
    DISSOCIATE = "dissociate"
    DEGRADE = "degrade"
    HYDROLYZE = "hydrolyze"

    @property
    def arity(self) -> int:
        """Number of species operands (the rate is not counted)."""
        return _ARITY[self]


_ARITY = {
    ActionKind.BIND: 3,
    ActionKind.DIMERIZE: 3,
    ActionKind.ACTIVATE: 3,
    ActionKind.ACTIVATE_AND_DISSOCIATE: 4,
    ActionKind.PHOSPHORYLATE: 3,
    ActionKind.DISSOCIATE: 3,
    ActionKind.DEGRADE: 1,
    ActionKind.HYDROLYZE: 2,
}

KEYWORDS = frozenset(k.value for k in ActionKind)

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class HlnSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    operands: tuple[str, ...]
    rate: float

    def __post_init__(self):
        if len(self.operands) != self.kind.arity:
            raise ValueError(
                f"{self.kind.value} takes {self.kind.arity} species, got {len(self.operands)}"
            )
        for name in self.operands:
            if not IDENTIFIER.match(name) or name in KEYWORDS:
                raise ValueError(f"invalid species name {name!r}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive and finite, got {self.rate!r}")

    def __str__(self) -> str:
        args = ", ".join([*self.operands, format_rate(self.rate)])
        return f"{self.kind.value}({args})"


@dataclass(frozen=True)
class Process:
    actions: tuple[Action, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def species(self) -> list[str]:
        """Species names in order of first mention."""
        seen: dict[str, None] = {}
        for action in self.actions:
            for name in action.operands:
                seen.setdefault(name)
        return list(seen)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),;])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise HlnSyntaxError(
                f"unexpected character {source[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        text = m.group()
        if kind == "punct":
            kind = text
        if kind != "ws":
            tokens.append(_Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def argument(self) -> _Token:
        tok = self.tok
        if tok.kind not in ("ident", "number"):
            raise self.error(f"expected an argument, found {tok.text or 'end of input'!r}")
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None) -> HlnSyntaxError:
        tok = tok or self.tok
        return HlnSyntaxError(message, tok.line, tok.column)

    def expect(self, kind: str) -> _Token:
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}")
        self.pos += 1
        return tok

    def program(self) -> Process:
        actions = []
        while True:
            if self.tok.kind == "eof":
                break
            if self.tok.kind == "(":
                self.expect("(")
                self.expect(")")
                if self.tok.kind == ";":
                    self.pos += 1
                if self.tok.kind != "eof":
                    raise self.error("nothing may follow the '()' terminator")
                break
            actions.append(self.action())
            if self.tok.kind == ";":
                self.pos += 1
            elif self.tok.kind != "eof":
                raise self.error(f"expected ';' between actions, found {self.tok.text!r}")
        return Process(tuple(actions))

    def action(self) -> Action:
        head = self.tok
        if head.kind != "ident":
            raise self.error(f"expected an action, found {head.text or 'end of input'!r}")
        try:
            kind = ActionKind(head.text)
        except ValueError:
            raise self.error(f"unknown action {head.text!r}") from None
        self.pos += 1
        self.expect("(")
        args = []
        if self.tok.kind != ")":
            args.append(self.argument())
            while self.tok.kind == ",":
                self.pos += 1
                args.append(self.argument())
        self.expect(")")

        if len(args) != kind.arity + 1:
            raise self.error(
                f"{kind.value} takes {kind.arity} species and a rate, "
                f"got {len(args)} argument(s)",
                head,
            )
        names = []
        for tok in args[:-1]:
            if tok.kind != "ident":
                raise self.error(f"expected a species name, found {tok.text!r}", tok)
            if not IDENTIFIER.match(tok.text):
                raise self.error(f"malformed species name {tok.text!r}", tok)
            if tok.text in KEYWORDS:
                raise self.error(f"species name {tok.text!r} collides with an action keyword", tok)
            names.append(tok.text)
        rate_tok = args[-1]
        if rate_tok.kind != "number":
            raise self.error(f"expected a numeric rate, found {rate_tok.text!r}", rate_tok)
        rate = float(rate_tok.text)
        if not (math.isfinite(rate) and rate > 0):
            raise self.error(f"rate must be positive, got {rate_tok.text}", rate_tok)
        return Action(kind, tuple(names), rate)


def parse_program(source: str) -> Process:
    """Parse high-level notation into a :class:`Process`.

    Raises :class:`HlnSyntaxError` carrying the 1-based line and column of
    the offending token.
    """
    return _Parser(source).program()


def format_rate(rate: float) -> str:
    """Shortest round-tripping text for ``rate``; scientific below 0.01."""
    if 1e-2 <= rate < 1e4:
        return repr(rate)
    sign, digits, exponent = Decimal(repr(rate)).normalize().as_tuple()
    mantissa = str(digits[0])
    if len(digits) > 1:
        mantissa += "." + "".join(map(str, digits[1:]))
    return f"{'-' if sign else ''}{mantissa}e{exponent + len(digits) - 1}"


def format_program(process: Process) -> str:
    if not process.actions:
        return "()"
    return "; ".join(str(a) for a in process.actions)
