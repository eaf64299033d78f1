"""Multiplier expressions in the complex variable ``z``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := base ('^' expo)?
    expo   := '-' expo | base
    base   := number | 'i' | 'z' | ident '(' expr (',' expr)* ')' | ident | '(' expr ')'

Unary minus binds looser than ``^`` so ``-z^2`` is ``neg(pow(z, 2))``. Bare
identifiers other than ``i`` and ``z`` must be named parameters. Built-in
families: ``heat(tau) = exp(-tau z^2)`` and ``impow(tau, c) = (z^2 + c)^(i tau)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..jets import Jet, variable

__all__ = [
    "Node",
    "MultiplierExpr",
    "ComplexJet",
    "MultiplierSyntaxError",
    "UnknownIdentifierError",
    "SingularityError",
    "parse_multiplier",
    "eval_jet",
]

FUNCTIONS = {"exp": 1, "log": 1, "sqrt": 1, "heat": 1, "impow": 2}
BINARY = {"+": "add", "-": "sub", "*": "mul", "/": "div"}


class MultiplierSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(MultiplierSyntaxError):
    pass


class SingularityError(ArithmeticError):
    def __init__(self, message: str, node: "Node"):
        super().__init__(f"{message} in {node.kind} node at offset {node.offset}")
        self.node = node


@dataclass(frozen=True)
class Node:
    kind: str
    args: tuple = ()
    value: object = None
    offset: int = field(default=-1, compare=False)

    def sexpr(self) -> str:
        """Compact structural form, e.g. ``exp(neg(pow(z,2)))``."""
        if self.kind == "num":
            v = self.value
            return repr(int(v)) if float(v).is_integer() else repr(v)
        if self.kind in ("z", "i"):
            return self.kind
        if self.kind == "param":
            return str(self.value)
        head = self.value if self.kind == "call" else self.kind
        return f"{head}({','.join(a.sexpr() for a in self.args)})"

    def depends_on_z(self) -> bool:
        if self.kind == "z" or (self.kind == "call" and self.value in ("heat", "impow")):
            return True
        return any(a.depends_on_z() for a in self.args)


# tokenizer

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),−]))"
)


def _tokenize(src: str):
    pos, out = 0, []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            start = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise MultiplierSyntaxError(f"unexpected character {src[start]!r}", _byte(src, start))
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        if text == "−":
            text = "-"
        out.append((kind, text, _byte(src, start)))
        pos = m.end()
    out.append(("eof", "", _byte(src, len(src))))
    return out


def _byte(src, index):
    return len(src[:index].encode("utf-8"))


class _Parser:
    def __init__(self, src: str, params: Mapping[str, float]):
        self.toks = _tokenize(src)
        self.i = 0
        self.params = params

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, tx, off = self.take()
        if tx != text:
            raise MultiplierSyntaxError(f"expected {text!r}, found {tx or 'end of input'!r}", off)

    def parse(self):
        node = self.expr()
        kind, tx, off = self.peek()
        if kind != "eof":
            raise MultiplierSyntaxError(f"unexpected {tx!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            _, tx, off = self.take()
            node = Node(BINARY[tx], (node, self.term()), offset=off)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/"):
            _, tx, off = self.take()
            node = Node(BINARY[tx], (node, self.factor()), offset=off)
        return node

    def factor(self):
        if self.peek()[1] == "-":
            off = self.take()[2]
            return Node("neg", (self.factor(),), offset=off)
        return self.power()

    def power(self):
        node = self.base()
        if self.peek()[1] == "^":
            off = self.take()[2]
            node = Node("pow", (node, self.expo()), offset=off)
        return node

    def expo(self):
        if self.peek()[1] == "-":
            off = self.take()[2]
            return Node("neg", (self.expo(),), offset=off)
        return self.base()

    def base(self):
        kind, tx, off = self.take()
        if kind == "num":
            return Node("num", value=float(tx), offset=off)
        if tx == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if tx in ("z", "i"):
                return Node(tx, offset=off)
            if tx in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[tx]:
                    raise MultiplierSyntaxError(
                        f"{tx} takes {FUNCTIONS[tx]} argument(s), got {len(args)}", off
                    )
                return Node("call", tuple(args), tx, offset=off)
            if tx in self.params:
                return Node("param", value=tx, offset=off)
            raise UnknownIdentifierError(f"unknown identifier {tx!r}", off)
        raise MultiplierSyntaxError(f"unexpected {tx or 'end of input'!r}", off)


# printing

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def to_source(node: Node) -> str:
    def p(n, need):
        s = emit(n)
        return f"({s})" if _PREC.get(n.kind, 5) < need else s

    def expo(n):
        if n.kind == "neg":
            return "-" + expo(n.args[0])
        return p(n, 5)

    def emit(n):
        k = n.kind
        if k == "num":
            return repr(float(n.value))
        if k in ("z", "i"):
            return k
        if k == "param":
            return str(n.value)
        if k == "call":
            return f"{n.value}({', '.join(emit(a) for a in n.args)})"
        if k == "neg":
            return "-" + p(n.args[0], 3)
        if k == "pow":
            return f"{p(n.args[0], 5)}^{expo(n.args[1])}"
        a, b = n.args
        return f"{p(a, _PREC[k])} {_SYMBOL[k]} {p(b, _PREC[k] + 1)}"

    return emit(node)


# evaluation


def _is_int(x) -> bool:
    x = complex(x)
    return x.imag == 0 and float(x.real).is_integer() and abs(x.real) < 2**31


def _evaluate(node: Node, z: Jet, params, strict: bool):
    k = node.kind
    if k == "num":
        return complex(node.value)
    if k == "i":
        return 1j
    if k == "z":
        return z
    if k == "param":
        return complex(params[node.value])

    args = [_evaluate(a, z, params, strict) for a in node.args]
    with np.errstate(all="ignore"):
        if k == "neg":
            out = -args[0]
        elif k == "add":
            out = args[0] + args[1]
        elif k == "sub":
            out = args[0] - args[1]
        elif k == "mul":
            out = args[0] * args[1]
        elif k == "div":
            a, b = args
            if not isinstance(b, Jet) and b == 0:
                raise SingularityError("division by zero", node)
            out = a / b
        elif k == "pow":
            out = _power(node, *args)
        else:
            out = _call(node, args, z)

    if strict and isinstance(out, Jet) and not np.all(np.isfinite(out.c)):
        raise SingularityError("non-finite jet (pole or branch point)", node)
    if strict and not isinstance(out, Jet) and not np.isfinite(out):
        raise SingularityError("non-finite constant", node)
    return out


def _power(node, a, b):
    if isinstance(b, Jet):
        if not isinstance(a, Jet):
            if a == 0:
                raise SingularityError("zero base with variable exponent", node)
            return (b * complex(np.log(a))).exp()
        return a**b
    if not isinstance(a, Jet):
        if a == 0 and b.real <= 0:
            raise SingularityError("zero to a nonpositive power", node)
        return a**b
    if _is_int(b):
        return a.ipow(int(b.real))
    return a.cpow(b)


def _call(node, args, z):
    name = node.value
    if name == "exp":
        a = args[0]
        return a.exp() if isinstance(a, Jet) else np.exp(a)
    if name == "log":
        a = args[0]
        if not isinstance(a, Jet):
            if a == 0:
                raise SingularityError("log of zero", node)
            return complex(np.log(a))
        return a.log()
    if name == "sqrt":
        a = args[0]
        return a.cpow(0.5) if isinstance(a, Jet) else complex(np.sqrt(a))
    if name == "heat":
        tau = args[0]
        return (-(z * z) * tau).exp()
    if name == "impow":
        tau, c = args
        base = z * z + c
        if isinstance(tau, Jet) or isinstance(c, Jet):
            return base ** (tau * 1j)
        return base.cpow(1j * tau)
    raise AssertionError(name)


@dataclass(frozen=True)
class ComplexJet:
    """Value and derivatives ``coeffs[j] = d^j m(center)``."""

    center: complex
    coeffs: tuple


@dataclass(frozen=True)
class MultiplierExpr:
    ast: Node
    params: tuple = ()
    source: str = ""

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def to_source(self) -> str:
        return to_source(self.ast)

    def jet(self, z: Jet, strict: bool = False) -> Jet:
        """Propagate a jet in ``z`` through the expression tree."""
        out = _evaluate(self.ast, z, self.param_dict, strict)
        if not isinstance(out, Jet):
            out = z * 0 + out
        return out

    def __call__(self, zeta):
        """Plain values on an array of points; singular points give non-finite values."""
        zeta = np.asarray(zeta, dtype=complex)
        return self.jet(variable(zeta, 0)).c[0]

    def to_config(self) -> dict:
        return {"expr": self.source or self.to_source(), "params": self.param_dict}

    @classmethod
    def from_config(cls, obj) -> "MultiplierExpr":
        if isinstance(obj, str):
            return parse_multiplier(obj)
        return parse_multiplier(obj["expr"], obj.get("params") or {})


def parse_multiplier(src: str, params: Mapping[str, float] | None = None) -> MultiplierExpr:
    if not src or not src.strip():
        raise MultiplierSyntaxError("empty expression", 0)
    params = {str(k): float(v) for k, v in (params or {}).items()}
    for name in params:
        if name in FUNCTIONS or name in ("z", "i"):
            raise MultiplierSyntaxError(f"parameter name {name!r} is reserved", 0)
    ast = _Parser(src, params).parse()
    return MultiplierExpr(ast, tuple(sorted(params.items())), src)


def eval_jet(m: MultiplierExpr, zeta: complex, order: int) -> ComplexJet:
    """Derivatives ``d^j m(zeta)``, ``j <= order``, by jet propagation.

    Raises :class:`SingularityError` naming the offending node.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    jet = m.jet(variable(complex(zeta), order), strict=True)
    return ComplexJet(complex(zeta), tuple(complex(c) for c in jet.derivatives()))
