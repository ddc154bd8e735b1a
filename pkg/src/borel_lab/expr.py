"""Growth-function expressions T(r).

A tiny expression language for user-supplied growth functions::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'r' | 'e' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := 'exp' | 'log' | 'sqrt'

``^`` is right-associative and binds tighter than unary minus, so ``-r^2``
means ``-(r^2)`` and ``2^-r`` is accepted.  ``log`` is the natural logarithm.
Implicit multiplication (``2r``) is rejected.

Two evaluation tiers are offered: ``GrowthExpr.__call__`` is a compiled
machine-float path used by the scanners, ``GrowthExpr.evaluate`` is an
arbitrary-precision path on a per-thread mpmath context.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from typing import Callable, Union

import mpmath

__all__ = [
    "Num",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Node",
    "GrowthExpr",
    "MonotoneReport",
    "ExprError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "FreeVariableError",
    "EvaluationError",
    "parse_growth",
    "evaluate",
    "validate_monotone",
    "mp_context",
]

FUNCTIONS = ("exp", "log", "sqrt")
CONSTANTS = ("e", "pi")
VARIABLE = "r"

# exp() arguments above this are reported as +inf on the precise path
_MP_EXP_LIMIT = 2**60


# --------------------------------------------------------------------------
# errors
# --------------------------------------------------------------------------


class ExprError(ValueError):
    """Base class for expression parsing and evaluation failures."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at byte offset {offset}{detail}")


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(
            f"unknown identifier {name!r} at byte offset {offset}; "
            f"functions are {', '.join(FUNCTIONS)}, constants are {', '.join(CONSTANTS)}"
        )


class FreeVariableError(UnknownIdentifierError):
    """A second free variable appeared; only ``r`` is allowed."""

    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        ExprError.__init__(
            self,
            f"free variable {name!r} at byte offset {offset}; "
            f"growth functions have exactly one variable, {VARIABLE!r}",
        )


class EvaluationError(ExprError):
    """Domain error during evaluation; ``r`` is the offending argument."""

    def __init__(self, message: str, r=None):
        self.r = r
        self.reason = message
        where = f" at r={r}" if r is not None else ""
        super().__init__(f"{message}{where}")


class _Domain(Exception):
    pass


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    text: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str = VARIABLE


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Const, Var, Neg, BinOp, Call]

_BINARY_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _BINARY_PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def to_text(node: Node) -> str:
    """Print with the minimal parentheses that re-parse to the same tree."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if _prec(node.operand) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    p = _BINARY_PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "^":
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _NEG_PREC:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


# --------------------------------------------------------------------------
# tokenizer / parser
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, ident, op, end
    text: str
    pos: int  # character index


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(
                f"unexpected character {text[pos]!r}",
                _byte_offset(text, pos),
                ("number", "identifier", "operator", "'('", "')'"),
            )
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, message: str, expected: tuple[str, ...]):
        tok = self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"{message}: found {found}", _byte_offset(self.text, tok.pos), expected)

    def accept(self, *ops: str) -> str | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            self.i += 1
            return self.tokens[self.i - 1].text
        return None

    def expect(self, op: str):
        if self.accept(op) is None:
            self.fail("syntax error", (repr(op),))

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected token", ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while (op := self.accept("+", "-")) is not None:
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while (op := self.accept("*", "/")) is not None:
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-") is not None:
            return Neg(self.unary())
        if self.accept("+") is not None:
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.accept("^") is not None:
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(tok.text)
        if tok.kind == "ident":
            self.i += 1
            offset = _byte_offset(self.text, tok.pos)
            is_call = self.tok.kind == "op" and self.tok.text == "("
            if is_call:
                if tok.text not in FUNCTIONS:
                    raise UnknownIdentifierError(tok.text, offset)
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text == VARIABLE:
                return Var()
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                self.fail("function name without argument list", ("'('",))
            if len(tok.text) == 1 and tok.text.isalpha():
                raise FreeVariableError(tok.text, offset)
            raise UnknownIdentifierError(tok.text, offset)
        if self.accept("(") is not None:
            node = self.expr()
            self.expect(")")
            return node
        self.fail("expected an operand", ("number", "'r'", "'e'", "'pi'", "function", "'('"))


# --------------------------------------------------------------------------
# machine-float evaluation
# --------------------------------------------------------------------------


def _f_div(a: float, b: float) -> float:
    if b == 0.0:
        raise _Domain("division by zero")
    return a / b


def _f_pow(a: float, b: float) -> float:
    if a < 0.0 and not float(b).is_integer():
        raise _Domain("negative base with non-integer exponent")
    if a == 0.0 and b < 0.0:
        raise _Domain("division by zero (0 to a negative power)")
    try:
        return math.pow(a, b)
    except OverflowError:
        return math.inf if a > 0.0 or float(b) % 2 == 0 else -math.inf


def _f_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _f_log(x: float) -> float:
    if x <= 0.0:
        raise _Domain("log of nonpositive value")
    return math.log(x)


def _f_sqrt(x: float) -> float:
    if x < 0.0:
        raise _Domain("sqrt of negative value")
    return math.sqrt(x)


_F_FUNCS = {"exp": _f_exp, "log": _f_log, "sqrt": _f_sqrt}
_F_CONSTS = {"e": math.e, "pi": math.pi}
_F_BINOPS: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _f_div,
    "^": _f_pow,
}


def _compile(node: Node) -> Callable[[float], float]:
    if isinstance(node, Num):
        value = float(node.text)
        return lambda r: value
    if isinstance(node, Const):
        value = _F_CONSTS[node.name]
        return lambda r: value
    if isinstance(node, Var):
        return lambda r: r
    if isinstance(node, Neg):
        f = _compile(node.operand)
        return lambda r: -f(r)
    if isinstance(node, Call):
        fn, arg = _F_FUNCS[node.func], _compile(node.arg)
        return lambda r: fn(arg(r))
    op, left, right = _F_BINOPS[node.op], _compile(node.left), _compile(node.right)
    return lambda r: op(left(r), right(r))


# --------------------------------------------------------------------------
# arbitrary-precision evaluation
# --------------------------------------------------------------------------

_local = threading.local()


def mp_context() -> mpmath.ctx_mp.MPContext:
    """Per-thread mpmath context; callers set ``dps`` and restore it."""
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = mpmath.MPContext()
    return ctx


def _mp_eval(node: Node, ctx, r):
    if isinstance(node, Num):
        return ctx.mpf(node.text)
    if isinstance(node, Var):
        return r
    if isinstance(node, Const):
        return +ctx.e if node.name == "e" else +ctx.pi
    if isinstance(node, Neg):
        return -_mp_eval(node.operand, ctx, r)
    if isinstance(node, Call):
        x = _mp_eval(node.arg, ctx, r)
        if node.func == "exp":
            if x > _MP_EXP_LIMIT:
                return ctx.inf
            return ctx.exp(x)
        if node.func == "log":
            if x <= 0:
                raise _Domain("log of nonpositive value")
            return ctx.log(x)
        if x < 0:
            raise _Domain("sqrt of negative value")
        return ctx.sqrt(x)
    a = _mp_eval(node.left, ctx, r)
    b = _mp_eval(node.right, ctx, r)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if b == 0:
            raise _Domain("division by zero")
        return a / b
    if a < 0 and not ctx.isint(b):
        raise _Domain("negative base with non-integer exponent")
    if a == 0 and b < 0:
        raise _Domain("division by zero (0 to a negative power)")
    if a != 0 and ctx.isfinite(a) and ctx.isfinite(b):
        if abs(b) * abs(ctx.log(abs(a), 2)) > _MP_EXP_LIMIT:
            if b * ctx.log(abs(a)) < 0:
                return ctx.zero
            return ctx.inf if a > 0 or ctx.isint(b / 2) else -ctx.inf
    return ctx.power(a, b)


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GrowthExpr:
    """A parsed growth function T(r).

    Equality and hashing are structural on ``root``.  Calling the object
    evaluates in machine floats; overflow yields ``math.inf`` explicitly.
    """

    root: Node

    def __post_init__(self):
        object.__setattr__(self, "_fn", _compile(self.root))

    def __eq__(self, other):
        return isinstance(other, GrowthExpr) and self.root == other.root

    def __hash__(self):
        return hash(self.root)

    def __str__(self):
        return to_text(self.root)

    def __repr__(self):
        return f"GrowthExpr({to_text(self.root)!r})"

    @property
    def text(self) -> str:
        return to_text(self.root)

    def __call__(self, r: float) -> float:
        try:
            value = self._fn(float(r))
        except _Domain as exc:
            raise EvaluationError(str(exc), r=r) from None
        if math.isnan(value):
            raise EvaluationError("indeterminate form (inf - inf or 0 * inf)", r=r)
        return value

    def evaluate(self, r, digits: int = 30):
        """Value at ``r`` rounded to ``digits`` significant digits.

        Evaluated with 10 guard digits.  Returns an mpmath ``mpf``; ``+inf``
        when an exponential overflows the representable range.
        """
        if digits < 15:
            raise ValueError("digits must be >= 15")
        ctx = mp_context()
        saved = ctx.prec
        try:
            ctx.dps = digits + 10
            x = ctx.convert(r)
            if not ctx.isfinite(x):
                raise EvaluationError("non-finite argument", r=r)
            try:
                value = _mp_eval(self.root, ctx, x)
            except _Domain as exc:
                raise EvaluationError(str(exc), r=r) from None
            if ctx.isnan(value):
                raise EvaluationError("indeterminate form (inf - inf or 0 * inf)", r=r)
            ctx.dps = digits
            return +value
        finally:
            ctx.prec = saved

    def __pow__(self, exponent: float) -> "GrowthExpr":
        return GrowthExpr(BinOp("^", self.root, Num(repr(float(exponent)))))

    @property
    def has_variable(self) -> bool:
        return _contains_var(self.root)


def _contains_var(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Neg):
        return _contains_var(node.operand)
    if isinstance(node, Call):
        return _contains_var(node.arg)
    if isinstance(node, BinOp):
        return _contains_var(node.left) or _contains_var(node.right)
    return False


def parse_growth(text: str) -> GrowthExpr:
    """Parse a growth-function expression.

    >>> parse_growth("exp(1.556*(r-1))").text
    'exp(1.556 * (r - 1))'
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, ("expression",))
    return GrowthExpr(_Parser(text).parse())


def evaluate(expr: GrowthExpr | str, r, digits: int = 30):
    if isinstance(expr, str):
        expr = parse_growth(expr)
    return expr.evaluate(r, digits)


@dataclass(frozen=True)
class MonotoneReport:
    is_increasing: bool
    min_value: float
    first_violation: float | None
    grid_points: int
    strictly_increasing: bool
    tolerance: float

    def __post_init__(self):
        if not self.is_increasing and self.first_violation is None:
            raise ValueError("a failed monotonicity report must name the first violation")


def validate_monotone(T, r_lo: float, r_hi: float, grid: int, digits: int = 15) -> MonotoneReport:
    """Sample ``T`` on ``grid`` uniform points of [r_lo, r_hi].

    Nondecreasing within relative tolerance ``10**(-digits/2)`` counts as
    increasing; ``strictly_increasing`` additionally records whether every
    consecutive pair strictly increased.  Works for any callable growth
    function; ``digits > 15`` switches GrowthExpr inputs to the precise path.
    """
    if not r_lo < r_hi:
        raise ValueError("need r_lo < r_hi")
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    tol = 10.0 ** (-digits / 2)
    h = (r_hi - r_lo) / (grid - 1)
    precise = digits > 15 and hasattr(T, "evaluate")

    def sample(x):
        try:
            return T.evaluate(x, digits) if precise else T(x)
        except EvaluationError as exc:
            if exc.r is None:
                exc.r = x
            raise

    prev = sample(r_lo)
    lowest = prev
    first_violation = None
    strict = True
    for i in range(1, grid):
        x = r_hi if i == grid - 1 else r_lo + i * h
        cur = sample(x)
        if cur < lowest:
            lowest = cur
        if not cur > prev:
            strict = False
            if first_violation is None and cur < prev - tol * max(1.0, abs(float(prev))):
                first_violation = x
        prev = cur
    return MonotoneReport(
        is_increasing=first_violation is None,
        min_value=float(lowest),
        first_violation=first_violation,
        grid_points=grid,
        strictly_increasing=strict,
        tolerance=tol,
    )
