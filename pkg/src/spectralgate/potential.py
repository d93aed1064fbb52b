"""Textual potential expressions V: R^n -> R.

A small recursive-descent parser turns strings such as ``"x0^2*x1^2"`` into an
immutable AST which evaluates vectorised over arrays of points.  Non-finite
intermediate values are never propagated: every domain problem raises
:class:`PotentialDomainError` naming the offending sub-expression.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

DEFAULT_CLAMP = 1e12

FUNCTIONS = {
    "abs": 1, "exp": 1, "log": 1, "sqrt": 1, "step": 1, "sin": 1, "cos": 1,
    "min": -2, "max": -2,  # negative arity: at least |arity| arguments
}


class PotentialError(ValueError):
    """Base class for parse and evaluation failures."""


class PotentialSyntaxError(PotentialError):
    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class PotentialDomainError(PotentialError):
    def __init__(self, message: str, node: "Node" = None, point=None):
        self.node = node
        self.point = None if point is None else np.asarray(point, dtype=float)
        where = f" in '{to_text(node)}'" if node is not None else ""
        at = f" at x={self.point.tolist()}" if self.point is not None else ""
        super().__init__(f"{message}{where}{at}")


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Node = Union[Num, Var, Unary, Binary, Call]


@dataclass(frozen=True)
class PotentialExpr:
    root: Node
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise PotentialError("dim must be >= 1")
        top = max_var_index(self.root)
        if top >= self.dim:
            raise PotentialError(f"variable x{top} out of range for dim {self.dim}")

    def __str__(self):
        return to_text(self.root)

    def __call__(self, points):
        return evaluate(self, points)


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise PotentialSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, off = self.take()
        if val != value or kind == "end":
            got = "end of input" if kind == "end" else repr(val)
            raise PotentialSyntaxError(f"expected {value!r}, got {got}", off, self.text)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise PotentialSyntaxError(f"unexpected token {val!r}", off, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            return Unary(val, self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^", self.peek()[2]):
            self.take()
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            m = re.fullmatch(r"x(\d)", val)
            if m:
                idx = int(m.group(1))
                if idx >= self.dim:
                    raise PotentialSyntaxError(
                        f"variable {val} out of range for dim {self.dim}", off, self.text)
                return Var(idx)
            if val not in FUNCTIONS:
                raise PotentialSyntaxError(f"unknown identifier {val!r}", off, self.text)
            self.expect("(")
            args = [self.expr()]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
            self.expect(")")
            arity = FUNCTIONS[val]
            if (arity > 0 and len(args) != arity) or (arity < 0 and len(args) < -arity):
                raise PotentialSyntaxError(f"wrong number of arguments to {val}", off, self.text)
            return Call(val, tuple(args))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        got = "end of input" if kind == "end" else repr(val)
        raise PotentialSyntaxError(f"unexpected {got}", off, self.text)


def parse_potential(text: str, dim: int) -> PotentialExpr:
    """Parse ``text`` into a :class:`PotentialExpr` over R^dim."""
    if dim < 1:
        raise PotentialError("dim must be >= 1")
    return PotentialExpr(_Parser(text, dim).parse(), dim)


# --- printing ----------------------------------------------------------------

def _num_text(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(node: Node) -> str:
    """Fully parenthesised text that re-parses to a structurally equal AST."""
    if node is None:
        return "?"
    if isinstance(node, PotentialExpr):
        node = node.root
    if isinstance(node, Num):
        s = _num_text(node.value)
        return s if node.value >= 0 else f"({s})"
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Unary):
        return f"({node.op}{to_text(node.operand)})"
    if isinstance(node, Binary):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def max_var_index(node: Node) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Unary):
        return max_var_index(node.operand)
    if isinstance(node, Binary):
        return max(max_var_index(node.left), max_var_index(node.right))
    if isinstance(node, Call):
        return max(max_var_index(a) for a in node.args)
    return -1


# --- evaluation ----------------------------------------------------------------

def _first_bad(mask, pts):
    i = int(np.flatnonzero(mask)[0])
    return pts[i]


def _check(values, node, pts):
    bad = ~np.isfinite(values)
    if bad.any():
        raise PotentialDomainError("non-finite value", node, _first_bad(bad, pts))
    return values


def _eval(node, pts):
    m = pts.shape[0]
    if isinstance(node, Num):
        return np.full(m, node.value)
    if isinstance(node, Var):
        return pts[:, node.index].astype(float, copy=True)
    if isinstance(node, Unary):
        v = _eval(node.operand, pts)
        return -v if node.op == "-" else v
    if isinstance(node, Binary):
        a = _eval(node.left, pts)
        b = _eval(node.right, pts)
        op = node.op
        if op == "+":
            out = a + b
        elif op == "-":
            out = a - b
        elif op == "*":
            out = a * b
        elif op == "/":
            zero = b == 0
            if zero.any():
                raise PotentialDomainError("division by zero", node, _first_bad(zero, pts))
            out = a / b
        else:
            frac = b != np.round(b)
            bad = (a < 0) & frac
            if bad.any():
                raise PotentialDomainError(
                    "non-integer power of a negative base", node, _first_bad(bad, pts))
            bad = (a == 0) & (b < 0)
            if bad.any():
                raise PotentialDomainError("zero to a negative power", node, _first_bad(bad, pts))
            out = np.power(a, b)
        return _check(out, node, pts)
    if isinstance(node, Call):
        args = [_eval(a, pts) for a in node.args]
        name = node.name
        if name == "abs":
            out = np.abs(args[0])
        elif name == "min":
            out = np.minimum.reduce(args)
        elif name == "max":
            out = np.maximum.reduce(args)
        elif name == "exp":
            out = np.exp(args[0])
        elif name == "log":
            bad = args[0] <= 0
            if bad.any():
                raise PotentialDomainError("log of non-positive value", node, _first_bad(bad, pts))
            out = np.log(args[0])
        elif name == "sqrt":
            bad = args[0] < 0
            if bad.any():
                raise PotentialDomainError("sqrt of negative value", node, _first_bad(bad, pts))
            out = np.sqrt(args[0])
        elif name == "step":
            out = (args[0] > 0).astype(float)
        elif name == "sin":
            out = np.sin(args[0])
        else:
            out = np.cos(args[0])
        return _check(out, node, pts)
    raise TypeError(f"not an expression node: {node!r}")


def as_points(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts.reshape(1, -1) if pts.shape[0] == dim else pts.reshape(-1, 1)
    if pts.shape[-1] != dim:
        raise PotentialError(f"points have dimension {pts.shape[-1]}, expected {dim}")
    return pts


def evaluate(expr: PotentialExpr, points) -> np.ndarray:
    """Evaluate on an ``(m, dim)`` array of points; returns shape ``(m,)``."""
    pts = as_points(points, expr.dim)
    with np.errstate(all="ignore"):
        return _eval(expr.root, pts)


def eval_point(expr: PotentialExpr, point) -> float:
    point = np.atleast_1d(np.asarray(point, dtype=float))
    if point.shape != (expr.dim,):
        raise PotentialError(f"point has length {point.size}, expected {expr.dim}")
    return float(evaluate(expr, point.reshape(1, -1))[0])


def positive_part(expr: PotentialExpr) -> PotentialExpr:
    return PotentialExpr(Call("max", (expr.root, Num(0.0))), expr.dim)


def negative_part(expr: PotentialExpr) -> PotentialExpr:
    return PotentialExpr(Call("max", (Unary("-", expr.root), Num(0.0))), expr.dim)


# --- specs and built-ins -----------------------------------------------------

@dataclass(frozen=True)
class PotentialSpec:
    expr: PotentialExpr
    clamp_max: float | None = DEFAULT_CLAMP
    name: str = ""
    notes: str = field(default="", compare=False)

    def __post_init__(self):
        if self.clamp_max is not None and not self.clamp_max > 0:
            raise PotentialError("clamp_max must be > 0")

    @property
    def dim(self) -> int:
        return self.expr.dim

    def __call__(self, points) -> np.ndarray:
        """Exact values (no clamp)."""
        return evaluate(self.expr, points)

    def sample(self, points) -> np.ndarray:
        """Values with V+ capped at ``clamp_max``; negative values untouched."""
        v = evaluate(self.expr, points)
        if self.clamp_max is not None:
            v = np.minimum(v, self.clamp_max)
        return v

    def to_dict(self) -> dict:
        return {"name": self.name, "dim": self.dim, "expr": str(self.expr),
                "clamp_max": self.clamp_max}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialSpec":
        return cls(parse_potential(d["expr"], int(d["dim"])),
                   d.get("clamp_max", DEFAULT_CLAMP), d.get("name", ""))

    @classmethod
    def from_json(cls, text: str) -> "PotentialSpec":
        return cls.from_dict(json.loads(text))


BUMP_K = 100.0
BUMP_HOLES = tuple(range(1, 6))  # c_k = 4^k, r_k = 2^-k


def bump_holes_terms(dim: int = 1):
    """(center, radius) of the low-V balls; centers on the x0 axis."""
    out = []
    for k in BUMP_HOLES:
        c = np.zeros(dim)
        c[0] = 4.0 ** k
        out.append((c, 2.0 ** -k))
    return out


def _bump_holes_text(dim: int) -> str:
    parts = []
    for c, r in bump_holes_terms(dim):
        sq = [f"(x0-{_num_text(c[0])})^2"] + [f"x{i}^2" for i in range(1, dim)]
        dist = f"abs(x0-{_num_text(c[0])})" if dim == 1 else f"sqrt({'+'.join(sq)})"
        parts.append(f"step({r!r}-{dist})")
    return f"{_num_text(BUMP_K)}*(1-({'+'.join(parts)}))"


def builtin(name: str, dim: int | None = None) -> PotentialSpec:
    """Named potential families.

    ``zero``, ``harmonic_n`` and ``half_space_flat`` take any ``dim`` (default 1);
    ``cross_xy`` is 2-D; ``bump_holes`` defaults to 1-D with its holes on the x0 axis.
    """
    if name == "zero":
        n = dim or 1
        return PotentialSpec(parse_potential("0", n), name="zero")
    if name in ("harmonic_n", "harmonic"):
        n = dim or 1
        text = "+".join(f"x{i}^2" for i in range(n))
        return PotentialSpec(parse_potential(text, n), name="harmonic_n")
    if name == "cross_xy":
        if dim not in (None, 2):
            raise PotentialError("cross_xy is two-dimensional")
        return PotentialSpec(parse_potential("x0^2*x1^2", 2), name="cross_xy")
    if name == "bump_holes":
        n = dim or 1
        return PotentialSpec(parse_potential(_bump_holes_text(n), n), name="bump_holes",
                             notes="K(1 - sum 1[|x-c_k|<r_k]), c_k=4^k, r_k=2^-k, k=1..5")
    if name == "half_space_flat":
        n = dim or 1
        return PotentialSpec(parse_potential("x0^2*step(x0)", n), name="half_space_flat",
                             notes="V=0 on the half-space x0<=0, quadratic on x0>0")
    raise PotentialError(f"unknown built-in potential {name!r}")


BUILTIN_NAMES = ("zero", "harmonic_n", "cross_xy", "bump_holes", "half_space_flat")


def resolve(text_or_name: str, dim: int | None = None) -> PotentialSpec:
    """A built-in name or an expression string."""
    if text_or_name in BUILTIN_NAMES or text_or_name == "harmonic":
        return builtin(text_or_name, dim)
    if dim is None:
        found = [int(m) for m in re.findall(r"x(\d+)", text_or_name)]
        dim = max(found) + 1 if found else 1
    return PotentialSpec(parse_potential(text_or_name, dim), name=text_or_name)
