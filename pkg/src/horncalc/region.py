"""Region-of-convergence expressions over ``(r, s, t) = (|x|, |y|, |z|)``.

Arithmetic evaluates to floats; comparisons and connectives evaluate to a
three-valued status.  Anything that cannot be decided (a comparison within
``BOUNDARY_TOL`` of equality, a domain error inside an auxiliary function, a
root bracket without a sign change) yields ``UNKNOWN``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .exprparse import ParseError, TokenStream, parse_number, tokenize

INSIDE = "inside"
OUTSIDE = "outside"
UNKNOWN = "unknown"

BOUNDARY_TOL = 1e-12
ROOT_TOL = 1e-12
ROOT_GRID = 400


class RegionDomainError(ArithmeticError):
    """Raised when an arithmetic node is undefined at the point."""


# --------------------------------------------------------------------------
# auxiliary functions


def _sqrt(v: float, what: str) -> float:
    if v < 0:
        raise RegionDomainError(f"negative radicand in {what}")
    return math.sqrt(v)


def _div(a: float, b: float, what: str) -> float:
    if b == 0:
        raise RegionDomainError(f"division by zero in {what}")
    return a / b


def phi1(xi: float) -> float:
    A = _sqrt(1 + 3 * xi, "phi1")
    return _div(2 * A + 1, 3 * (A + 1) ** 2, "phi1")


def phi2(xi: float) -> float:
    B = _sqrt(1 - 3 * xi, "phi2")
    return _div(2 * B - 1, 3 * (B - 1) ** 2, "phi2")


def psi1(xi: float) -> float:
    a = _sqrt(1 + 12 * xi, "psi1")
    return _div(2 * (2 - a) ** 2, 9 * (a - 1), "psi1")


def psi2(xi: float) -> float:
    b = _sqrt(1 - 12 * xi, "psi2")
    return _div(2 * (2 + b) ** 2, 9 * (b + 1), "psi2")


def theta1(xi: float) -> float:
    al = _sqrt(1 + _div(8, 9 * xi, "theta1"), "theta1")
    return _div((1 + 3 * al) * (al - 1), 12 * (al + 1) ** 2, "theta1")


def theta2(xi: float) -> float:
    be = _sqrt(1 - _div(8, 9 * xi, "theta2"), "theta2")
    return _div((1 - 3 * be) * (be + 1), 12 * (be - 1) ** 2, "theta2")


AUX_FUNCTIONS = {
    "phi1": phi1,
    "phi2": phi2,
    "psi1": psi1,
    "psi2": psi2,
    "theta1": theta1,
    "theta2": theta2,
}


def aux_function(kind: str, xi: float) -> float:
    """Evaluate one of the six auxiliary convergence functions."""
    try:
        fn = AUX_FUNCTIONS[kind]
    except KeyError:
        raise ValueError(f"unknown auxiliary function {kind!r}") from None
    return fn(xi)


# --------------------------------------------------------------------------
# expression tree


class Node:
    def value(self, env: dict, diag: list) -> float:
        raise TypeError(f"{type(self).__name__} is not arithmetic")

    def status(self, env: dict, diag: list) -> str:
        raise TypeError(f"{type(self).__name__} is not a condition")

    is_condition = False


@dataclass
class Const(Node):
    v: float

    def value(self, env, diag):
        return self.v


@dataclass
class Var(Node):
    name: str

    def value(self, env, diag):
        return env[self.name]


@dataclass
class BinOp(Node):
    op: str
    a: Node
    b: Node

    def value(self, env, diag):
        x, y = self.a.value(env, diag), self.b.value(env, diag)
        if self.op == "+":
            return x + y
        if self.op == "-":
            return x - y
        if self.op == "*":
            return x * y
        if self.op == "/":
            return _div(x, y, "region expression")
        if self.op == "^":
            if x < 0 and y != int(y):
                raise RegionDomainError("fractional power of a negative number")
            if x == 0 and y < 0:
                raise RegionDomainError("negative power of zero")
            return x ** y
        raise AssertionError(self.op)


@dataclass
class Neg(Node):
    a: Node

    def value(self, env, diag):
        return -self.a.value(env, diag)


@dataclass
class Call(Node):
    fn: str
    args: list

    def value(self, env, diag):
        vals = [a.value(env, diag) for a in self.args]
        if self.fn == "sqrt":
            return _sqrt(vals[0], "sqrt")
        if self.fn == "min":
            return min(vals)
        if self.fn == "max":
            return max(vals)
        return AUX_FUNCTIONS[self.fn](vals[0])


@dataclass
class RootOf(Node):
    coeffs: list
    lo: Node
    hi: Node
    selector: str

    def value(self, env, diag):
        cs = [c.value(env, diag) for c in self.coeffs]
        lo = self.lo.value(env, diag)
        hi = self.hi.value(env, diag)
        if math.isinf(hi):
            hi = cauchy_bound(cs)
        roots = bracket_roots(cs, lo, hi)
        if not roots:
            diag.append(f"root: no sign change of the polynomial in [{lo:g}, {hi:g}]")
            raise RegionDomainError("root bracket without sign change")
        if self.selector == "only":
            if len(roots) != 1:
                diag.append(f"root: expected one root in [{lo:g}, {hi:g}], found {len(roots)}")
                raise RegionDomainError("ambiguous root")
            return roots[0]
        return roots[0] if self.selector == "smaller" else roots[-1]


@dataclass
class Compare(Node):
    op: str
    a: Node
    b: Node
    is_condition = True

    def status(self, env, diag):
        try:
            x, y = self.a.value(env, diag), self.b.value(env, diag)
        except (RegionDomainError, OverflowError) as exc:
            diag.append(f"undecidable: {exc}")
            return UNKNOWN
        if self.op in (">", ">="):
            x, y = y, x
        if math.isinf(x) or math.isinf(y):
            return INSIDE if x < y else OUTSIDE
        scale = max(1.0, abs(x), abs(y))
        if abs(x - y) <= BOUNDARY_TOL * scale:
            diag.append("point within tolerance of the region boundary")
            return UNKNOWN
        return INSIDE if x < y else OUTSIDE


@dataclass
class BoolOp(Node):
    op: str
    parts: list
    is_condition = True

    def status(self, env, diag):
        st = [p.status(env, diag) for p in self.parts]
        if self.op == "&":
            if OUTSIDE in st:
                return OUTSIDE
            return INSIDE if all(v == INSIDE for v in st) else UNKNOWN
        if INSIDE in st:
            return INSIDE
        return OUTSIDE if all(v == OUTSIDE for v in st) else UNKNOWN


# --------------------------------------------------------------------------
# roots


def poly_value(cs: Sequence[float], w: float) -> float:
    out = 0.0
    for c in reversed(cs):
        out = out * w + c
    return out


def cauchy_bound(cs: Sequence[float]) -> float:
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) < 2:
        return 1.0
    lead = abs(cs[-1])
    return 1.0 + max(abs(c) / lead for c in cs[:-1])


def bracket_roots(cs: Sequence[float], lo: float, hi: float) -> list:
    """Roots of ``sum cs[i] w^i`` in ``(lo, hi)`` located by sign changes.

    A uniform grid finds sign changes; each is refined by bisection to
    ``ROOT_TOL``.  Roots of even multiplicity are invisible to this search.
    """
    if not lo < hi:
        return []
    grid = [lo + (hi - lo) * k / ROOT_GRID for k in range(ROOT_GRID + 1)]
    vals = [poly_value(cs, w) for w in grid]
    roots = []
    for k in range(ROOT_GRID):
        a, b = grid[k], grid[k + 1]
        fa, fb = vals[k], vals[k + 1]
        if fa == 0:
            if k > 0:
                roots.append(a)
            continue
        if fa * fb < 0:
            while b - a > ROOT_TOL * max(1.0, abs(a)):
                mid = 0.5 * (a + b)
                fm = poly_value(cs, mid)
                if fm == 0:
                    a = b = mid
                    break
                if (fm < 0) == (fa < 0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    return roots


# --------------------------------------------------------------------------
# parser

_FUNCS = {"sqrt": 1, "min": None, "max": None, **{k: 1 for k in AUX_FUNCTIONS}}
_VARS = ("r", "s", "t")


class _RegionParser:
    def __init__(self, text):
        self.ts = TokenStream(tokenize(text))

    def parse(self) -> Node:
        node = self.disjunction()
        if not self.ts.at_end():
            raise ParseError(f"unexpected {self.ts.peek()[1]!r} in region")
        if not node.is_condition:
            raise ParseError("region must be a comparison or a boolean combination")
        return node

    def disjunction(self):
        parts = [self.conjunction()]
        while self.ts.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else BoolOp("|", parts)

    def conjunction(self):
        parts = [self.comparison()]
        while self.ts.accept("&"):
            parts.append(self.comparison())
        return parts[0] if len(parts) == 1 else BoolOp("&", parts)

    def comparison(self):
        ts = self.ts
        # a parenthesised condition
        if ts.peek() == ("op", "(") and self._paren_is_condition():
            ts.next()
            node = self.disjunction()
            ts.expect(")")
            return node
        left = self.additive()
        ops = []
        while ts.peek()[0] == "op" and ts.peek()[1] in ("<", "<=", ">", ">="):
            op = ts.next()[1]
            right = self.additive()
            ops.append(Compare(op, left, right))
            left = right
        if not ops:
            return left
        return ops[0] if len(ops) == 1 else BoolOp("&", ops)

    def _paren_is_condition(self) -> bool:
        depth = 0
        for kind, val in self.ts.tokens[self.ts.i:]:
            if kind != "op":
                continue
            if val == "(":
                depth += 1
            elif val == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif depth == 1 and val in ("<", "<=", ">", ">=", "&", "|"):
                return True
        return False

    def additive(self):
        ts = self.ts
        node = self.multiplicative()
        while True:
            if ts.accept("+"):
                node = BinOp("+", node, self.multiplicative())
            elif ts.accept("-"):
                node = BinOp("-", node, self.multiplicative())
            else:
                return node

    def multiplicative(self):
        ts = self.ts
        node = self.unary()
        while True:
            if ts.accept("*"):
                node = BinOp("*", node, self.unary())
            elif ts.accept("/"):
                node = BinOp("/", node, self.unary())
            elif ts.peek()[0] in ("num", "ident") or ts.peek() == ("op", "("):
                node = BinOp("*", node, self.unary())
            else:
                return node

    def unary(self):
        if self.ts.accept("-"):
            return Neg(self.unary())
        self.ts.accept("+")
        return self.power()

    def power(self):
        base = self.atom()
        if self.ts.accept("^"):
            base = BinOp("^", base, self.unary())
        return base

    def atom(self):
        ts = self.ts
        kind, val = ts.next()
        if kind == "num":
            return Const(float(parse_number(val)))
        if kind == "ident":
            if val in _VARS:
                return Var(val)
            if val == "inf":
                return Const(math.inf)
            if val == "root":
                return self.root()
            if val in _FUNCS:
                ts.expect("(")
                args = [self.additive()]
                while ts.accept(","):
                    args.append(self.additive())
                ts.expect(")")
                want = _FUNCS[val]
                if want is not None and len(args) != want:
                    raise ParseError(f"{val} takes {want} argument")
                return Call(val, args)
            raise ParseError(f"unknown name {val!r} in region")
        if val == "(":
            node = self.additive()
            ts.expect(")")
            return node
        raise ParseError(f"unexpected {val!r} in region")

    def root(self):
        ts = self.ts
        ts.expect("(")
        coeffs = [self.additive()]
        while ts.accept(","):
            coeffs.append(self.additive())
        ts.expect(";")
        lo = self.additive()
        ts.expect(",")
        hi = self.additive()
        ts.expect(";")
        kind, sel = ts.next()
        if sel not in ("only", "smaller", "greater"):
            raise ParseError(f"root selector must be only, smaller or greater, not {sel!r}")
        ts.expect(")")
        if len(coeffs) < 2:
            raise ParseError("root needs a polynomial of degree at least 1")
        return RootOf(coeffs, lo, hi, sel)


def parse_region(text: str) -> Node:
    return _RegionParser(text).parse()


def evaluate_region(expr: Node, point: Sequence[float]) -> tuple:
    """``(status, diagnostics)`` of a region expression at a coordinate point."""
    env = {"r": 0.0, "s": 0.0, "t": 0.0}
    for name, v in zip(_VARS, point):
        env[name] = abs(v)
    diag: list = []
    return expr.status(env, diag), diag


def region_check(s, point: Sequence[float]) -> str:
    """inside / outside / unknown for a series at a point."""
    if s.region is None:
        return UNKNOWN
    if len(point) != s.dimension:
        raise ValueError(f"{s.name} needs a point with {s.dimension} coordinates")
    return evaluate_region(s.region, point)[0]
