"""Second-order PDE systems derived from the axis ratios.

For axis ``a`` with ratio ``N/D`` the series satisfies

    D(delta - e_a) u - x_a N(delta) u = 0,

where ``delta_j = x_j d/dx_j``.  Expanding the Euler monomials into ordinary
derivatives and dividing by ``x_a`` gives the usual form of the equation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exprparse import ParseError, parse_poly
from .series import COORDINATES, SeriesDefinition, ratio_factors
from .symbolic import Poly, format_poly, stirling2

EULER = ("@0", "@1", "@2")
DERIV_ORDER = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2),
               (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)]


class ConsistencyError(RuntimeError):
    """A derived equation was not divisible by its axis coordinate."""


@dataclass
class DiffOperator:
    """``sum_beta C_beta(x, y, z; params) d^beta``, derivative orders padded to 3."""

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {tuple(k): v for k, v in self.terms.items() if v}

    def __eq__(self, other):
        return isinstance(other, DiffOperator) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def order(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def scale(self, c) -> "DiffOperator":
        return DiffOperator({k: v * c for k, v in self.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Poly()) + v
        return DiffOperator(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def bind(self, binding: dict) -> "DiffOperator":
        """Substitute numbers for the parameters, leaving coordinates."""
        return DiffOperator({k: v.partial_evaluate(binding) for k, v in self.terms.items()})

    def content(self) -> Fraction:
        from math import gcd

        num, den = 0, 1
        for v in self.terms.values():
            c = v.content()
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(1)


@dataclass
class PdeSystem:
    name: str
    dimension: int
    equations: list
    provenance: str = "derived"
    notes: list = field(default_factory=list)


# --------------------------------------------------------------------------
# derivation


def euler_to_diff(euler: Poly, dim: int) -> DiffOperator:
    """Expand a polynomial in the Euler operators into x^a d^b form."""
    out: dict = {}
    by_mono = euler.coefficients(EULER[:dim])
    for exps, coeff in by_mono.items():
        # product over axes of sum_i S(k, i) x^i d^i
        pieces = [((0, 0, 0), coeff)]
        for axis, k in enumerate(exps):
            if k == 0:
                continue
            nxt = []
            for beta, c in pieces:
                for i in range(1, k + 1):
                    s = stirling2(k, i)
                    b = list(beta)
                    b[axis] += i
                    nxt.append((tuple(b), c * Poly.var(COORDINATES[axis], i) * s))
            pieces = nxt
        for beta, c in pieces:
            out[beta] = out.get(beta, Poly()) + c
    return DiffOperator(out)


def _divide_by(p: Poly, var: str) -> Optional[Poly]:
    raw = {}
    for m, c in p.terms.items():
        d = dict(m)
        if d.get(var, 0) < 1:
            return None
        d[var] -= 1
        raw[tuple(sorted((v, e) for v, e in d.items() if e))] = c
    return Poly(raw)


def axis_equation(s: SeriesDefinition, axis: int, normalize: bool = True) -> DiffOperator:
    dim = s.dimension
    n_list, d_list = ratio_factors(s, axis)
    deltas = [Poly.var(EULER[j]) for j in range(dim)]
    shifted = [deltas[j] - (1 if j == axis else 0) for j in range(dim)]
    d_poly = d_list.substitute(shifted)
    n_poly = n_list.substitute(deltas)
    xa = Poly.var(COORDINATES[axis])
    op = euler_to_diff(d_poly, dim) - euler_to_diff(n_poly, dim).scale(xa)
    divided = {}
    for beta, c in op.terms.items():
        q = _divide_by(c, COORDINATES[axis])
        if q is None:
            raise ConsistencyError(
                f"{s.name}: equation {axis + 1} is not divisible by {COORDINATES[axis]} (term {beta})"
            )
        divided[beta] = q
    out = DiffOperator(divided)
    return normalize_operator(out, axis)[1] if normalize else out


def derive_system(s: SeriesDefinition) -> PdeSystem:
    return PdeSystem(s.name, s.dimension, [axis_equation(s, a) for a in range(s.dimension)])


# --------------------------------------------------------------------------
# normalization


def _coord_key(p: Poly):
    """Ordering key for sign orientation: lowest coordinate degree first."""

    def key(item):
        m, _ = item
        d = dict(m)
        ce = tuple(d.get(v, 0) for v in COORDINATES)
        rest = tuple(sorted((v, e) for v, e in m if v not in COORDINATES))
        return (sum(ce), tuple(-e for e in ce), sum(e for _, e in rest), rest)

    return sorted(p.terms.items(), key=key)


def print_order(axis: int) -> list:
    own2 = tuple(2 if j == axis else 0 for j in range(3))
    own1 = tuple(1 if j == axis else 0 for j in range(3))
    seconds = [b for b in DERIV_ORDER if sum(b) == 2 and b != own2]
    firsts = [b for b in DERIV_ORDER if sum(b) == 1 and b != own1]
    return [own2] + seconds + [own1] + firsts + [(0, 0, 0)]


def normalize_operator(op: DiffOperator, axis: int) -> tuple:
    """``(scalar, op / scalar)`` with rational content cleared and sign fixed.

    The sign makes the lowest-degree monomial of the pure second-derivative
    coefficient on the own axis positive; if that coefficient vanishes, the
    first nonzero coefficient in print order decides.
    """
    if not op:
        return Fraction(1), op
    g = op.content()
    lead = None
    for beta in print_order(axis):
        if beta in op.terms:
            lead = op.terms[beta]
            break
    first = _coord_key(lead)[0][1]
    if first < 0:
        g = -g
    return g, op.scale(1 / g)


# --------------------------------------------------------------------------
# human formatting

_DNAMES = {}
for _b in DERIV_ORDER:
    _DNAMES[_b] = "u" + ("_" + "".join(COORDINATES[j] * e for j, e in enumerate(_b)) if sum(_b) else "")


def _param_text(p: Poly) -> str:
    """Parameter polynomial, highest degree first, compact: ``a+b+1``."""
    items = sorted(p.terms.items(), key=lambda it: (-sum(e for _, e in it[0]), it[0]))
    lead = next((k for k, it in enumerate(items) if it[1] > 0), 0)
    items.insert(0, items.pop(lead))
    out = ""
    for k, (m, c) in enumerate(items):
        a = abs(c)
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
        num = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        if not m:
            body = num
        elif a == 1:
            body = mono
        else:
            body = f"{num}*{mono}"
        if k == 0:
            out = ("-" if c < 0 else "") + body
        else:
            out += ("-" if c < 0 else "+") + body
    return out


def _coord_text(exps) -> str:
    return "".join(
        (COORDINATES[j] if e == 1 else f"{COORDINATES[j]}^{e}") for j, e in enumerate(exps) if e
    )


def _coeff_groups(c: Poly) -> list:
    groups = c.coefficients(COORDINATES)
    return sorted(groups.items(), key=lambda it: (sum(it[0]), tuple(-e for e in it[0])))


def _first_sign(p: Poly) -> int:
    """-1 only when every term is negative, so ``1-a`` stays as written."""
    return 1 if any(c > 0 for c in p.terms.values()) else -1


def format_coefficient(c: Poly) -> tuple:
    """``(sign, text)`` for a coefficient, e.g. ``(1, "x(1-x)")``."""
    groups = _coeff_groups(c)
    # common coordinate monomial
    common = [min(exps[j] for exps, _ in groups) for j in range(3)]
    groups = [(tuple(e - g for e, g in zip(exps, common)), p) for exps, p in groups]
    sign = _first_sign(groups[0][1])
    parts = []
    for exps, p in groups:
        p = p * sign
        s = _first_sign(p)
        q = p * s
        mono = _coord_text(exps)
        if not mono and len(p.terms) > 1:
            parts.append(("+", _param_text(p)))
            continue
        if q == 1:
            body = mono or "1"
        elif len(q.terms) == 1:
            ptxt = _param_text(q)
            body = ptxt + ("*" + mono if mono and not q.is_constant() else mono)
        else:
            body = f"({_param_text(q)})" + mono
        parts.append(("-" if s < 0 else "+", body))
    inner = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sg, body in parts[1:]:
        inner += sg + body
    prefix = _coord_text(common)
    if prefix:
        if len(parts) > 1:
            text = f"{prefix}({inner})"
        elif inner == "1":
            text = prefix
        elif groups[0][1].is_constant() or len(groups[0][1].terms) == 1:
            q = groups[0][1] * sign
            text = (_param_text(q) + ("*" if not q.is_constant() else "") + prefix) if q != 1 else prefix
        else:
            text = f"({_param_text(groups[0][1] * sign)}){prefix}"
    else:
        multi = len(parts) > 1 or len(groups[0][1].terms) > 1
        text = f"({inner})" if multi else inner
    return sign, text


def format_equation(op: DiffOperator, axis: int) -> str:
    if not op:
        return "0 = 0"
    out = ""
    for beta in print_order(axis):
        c = op.terms.get(beta)
        if c is None:
            continue
        sign, text = format_coefficient(c)
        name = _DNAMES[beta]
        body = name if text == "1" else f"{text} {name}"
        if not out:
            out = ("-" if sign < 0 else "") + body
        else:
            out += (" - " if sign < 0 else " + ") + body
    return out + " = 0"


def format_system(p: PdeSystem, style: str = "human") -> str:
    if style == "human":
        return "\n".join(format_equation(op, a) for a, op in enumerate(p.equations))
    if style == "structured":
        return format_structured(p)
    raise ValueError(f"unknown style {style!r}")


# --------------------------------------------------------------------------
# structured format


def format_structured(p: PdeSystem) -> str:
    lines = [f"system {p.name}", f"dimension {p.dimension}", f"provenance {p.provenance}"]
    for n in p.notes:
        lines.append(f"note {n}")
    for a, op in enumerate(p.equations):
        lines.append("equation")
        for beta in print_order(a):
            if beta in op.terms:
                lines.append(f"  term {beta[0]} {beta[1]} {beta[2]} {format_poly(op.terms[beta])}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def parse_structured(text: str) -> list:
    """Parse one or more systems written by :func:`format_structured`."""
    systems = []
    cur = None
    eq = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "system":
            cur = PdeSystem(rest, 0, [], "transcribed")
            systems.append(cur)
            continue
        if cur is None:
            raise ParseError("content before 'system'", lineno)
        if head == "dimension":
            cur.dimension = int(rest)
        elif head == "provenance":
            cur.provenance = rest
        elif head == "note":
            cur.notes.append(rest)
        elif head == "equation":
            eq = {}
        elif head == "end":
            if eq is None:
                raise ParseError("'end' without 'equation'", lineno)
            cur.equations.append(DiffOperator(eq))
            eq = None
        elif head == "term":
            if eq is None:
                raise ParseError("'term' outside an equation", lineno)
            parts = rest.split(None, 3)
            if len(parts) != 4:
                raise ParseError("term needs three derivative orders and a coefficient", lineno)
            try:
                beta = tuple(int(v) for v in parts[:3])
                coeff = parse_poly(parts[3])
            except (ValueError, ParseError) as exc:
                raise ParseError(str(exc), lineno) from None
            eq[beta] = eq.get(beta, Poly()) + coeff
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    for s in systems:
        if not s.dimension:
            s.dimension = len(s.equations)
    return systems
