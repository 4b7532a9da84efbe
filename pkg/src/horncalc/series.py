"""Declarative Horn series: Pochhammer factors, catalog format, axis ratios."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .exprparse import IDENT, ParseError, parse_linear_form, parse_poly
from .symbolic import LinearFactor, Poly, make_linear_factor

import re

COORDINATES = ("x", "y", "z")
_IDENT_RE = re.compile(rf"^{IDENT}$")


@dataclass(frozen=True)
class PochFactor:
    """``(param)_{form . idx}``; ``slot`` is the declared parameter it carries."""

    param: Poly
    form: tuple
    slot: Optional[int] = None

    def shifted(self, e: Sequence[Poly]) -> "PochFactor":
        delta = Poly()
        for c, v in zip(self.form, e):
            if c:
                delta = delta + Poly._coerce(v) * c
        return replace(self, param=self.param + delta)

    def is_factorial(self) -> bool:
        return self.param == 1 and sorted(self.form) == [0] * (len(self.form) - 1) + [1]


@dataclass
class FactorList:
    """Product ``scalar * prod(factors)`` of linear polynomials in the indices."""

    factors: list
    scalar: Fraction = Fraction(1)

    def degree(self) -> int:
        return len(self.factors)

    def expand(self, index_names: Sequence[str]) -> Poly:
        out = Poly.const(self.scalar)
        for f in self.factors:
            out = out * f.expand(index_names)
        return out

    def substitute(self, values: Sequence[Poly]) -> Poly:
        out = Poly.const(self.scalar)
        for f in self.factors:
            out = out * f.substitute(values)
        return out

    def evaluate(self, binding: dict, idx: Sequence) -> object:
        out = self.scalar
        for f in self.factors:
            v = f.const.evaluate(binding)
            for c, i in zip(f.form, idx):
                v = v + c * i
            out = out * v
        return out

    def __str__(self) -> str:
        return format_factor_list(self, None)


@dataclass
class SeriesDefinition:
    name: str
    indices: tuple
    params: tuple
    num: tuple
    den: tuple
    region: object = None
    region_text: Optional[str] = None
    param_groups: tuple = ()
    notes: tuple = ()
    family: Optional[str] = None

    @property
    def dimension(self) -> int:
        return len(self.indices)

    def factors(self):
        return list(self.num) + list(self.den)

    def param_poly_symbols(self) -> set:
        out = set()
        for f in self.factors():
            out |= f.param.variables()
        return out

    def display_args(self) -> list:
        """Current values of the declared parameters, in declaration order.

        After a shift the value is read off the factor that carries each
        parameter.  A lower parameter whose factor collapsed to ``(1)_m`` has
        traded places with the factorial, so the factorial's value is shown.
        """
        out = []
        for k, name in enumerate(self.params):
            val = None
            for f in self.num:
                if f.slot == k:
                    val = f.param
                    break
            if val is None:
                for f in self.den:
                    if f.slot == k:
                        val = f.param
                        if val == 1 and sum(map(abs, f.form)) == 1:
                            fac = self._factorial_for(f.form)
                            if fac is not None:
                                val = fac.param
                        break
            out.append(Poly.var(name) if val is None else val)
        return out

    def _factorial_for(self, form):
        for f in self.den:
            if f.slot is None and f.form == form:
                return f
        return None

    def format_args(self) -> str:
        from .symbolic import format_poly

        args = [format_poly(v) for v in self.display_args()]
        groups = self.param_groups or (len(args),)
        parts = []
        i = 0
        for g in groups:
            parts.append(", ".join(args[i:i + g]))
            i += g
        return "; ".join(parts)


# --------------------------------------------------------------------------
# catalog parsing


def _check_ident(name: str, line: int) -> None:
    if not _IDENT_RE.match(name):
        raise ParseError(f"bad identifier {name!r}", line)


def _parse_factor_line(body: str, indices, params, line: int) -> list:
    out = []
    body = body.strip()
    if not body:
        return out
    allowed = set(params)
    for chunk in body.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "|" not in chunk:
            raise ParseError(f"factor {chunk!r} needs 'param | form'", line)
        ptxt, ftxt = (t.strip() for t in chunk.split("|", 1))
        try:
            param = parse_poly(ptxt, allowed)
            form = parse_linear_form(ftxt, indices)
        except ParseError as exc:
            raise ParseError(exc.message, line) from None
        if param.degree() > 1:
            raise ParseError(f"parameter expression {ptxt!r} is not affine", line)
        if not any(form):
            continue
        slot = None
        if len(param.terms) == 1 and param.degree() == 1 and next(iter(param.terms.values())) == 1:
            (v,) = param.variables()
            slot = params.index(v)
        out.append(PochFactor(param, form, slot))
    return out


def _finish(block: dict, seen: set) -> SeriesDefinition:
    from .region import parse_region

    name = block["name"]
    line = block["line"]
    if name in seen:
        raise ParseError(f"duplicate series name {name!r}", line)
    for key in ("indices", "params", "num", "den"):
        if key not in block:
            raise ParseError(f"series {name!r} is missing '{key}:'", line)
    indices, params = block["indices"], block["params"]
    num = _parse_factor_line(block["num"][0], indices, params, block["num"][1])
    den = _parse_factor_line(block["den"][0], indices, params, block["den"][1])
    for i in range(len(indices)):
        form = tuple(1 if j == i else 0 for j in range(len(indices)))
        den.append(PochFactor(Poly.const(1), form, None))
    region = None
    region_text = None
    if "region" in block:
        region_text, rline = block["region"]
        try:
            region = parse_region(region_text)
        except ParseError as exc:
            raise ParseError(exc.message, rline) from None
    seen.add(name)
    return SeriesDefinition(
        name=name,
        indices=tuple(indices),
        params=tuple(params),
        num=tuple(num),
        den=tuple(den),
        region=region,
        region_text=region_text,
        param_groups=block.get("groups", ()),
        notes=tuple(block.get("notes", ())),
        family=block.get("family"),
    )


def parse_catalog(text: str, family: Optional[str] = None) -> list:
    """Parse catalog text into a list of :class:`SeriesDefinition`."""
    out = []
    seen: set = set()
    block = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("series ") or stripped == "series":
            if block is not None:
                out.append(_finish(block, seen))
            name = stripped[len("series"):].strip()
            if not name or len(name.split()) != 1:
                raise ParseError("series needs a single name", lineno)
            block = {"name": name, "line": lineno, "family": family}
            continue
        if block is None:
            raise ParseError(f"content outside a series block: {stripped!r}", lineno)
        if ":" not in stripped:
            raise ParseError(f"expected 'key: value', got {stripped!r}", lineno)
        key, value = (t.strip() for t in stripped.split(":", 1))
        if key == "indices":
            names = value.split()
            if not 1 <= len(names) <= 3:
                raise ParseError("between 1 and 3 indices required", lineno)
            for n in names:
                _check_ident(n, lineno)
            if len(set(names)) != len(names):
                raise ParseError("repeated index name", lineno)
            block["indices"] = names
        elif key == "params":
            groups = [g.split() for g in value.split(";")]
            names = [n for g in groups for n in g]
            for n in names:
                _check_ident(n, lineno)
                if n in COORDINATES:
                    raise ParseError(f"parameter name {n!r} is reserved for coordinates", lineno)
            if len(set(names)) != len(names):
                raise ParseError("repeated parameter name", lineno)
            block["params"] = names
            block["groups"] = tuple(len(g) for g in groups if g)
        elif key in ("num", "den", "region"):
            if key in block:
                raise ParseError(f"repeated '{key}:' line", lineno)
            block[key] = (value, lineno)
        elif key == "note":
            block.setdefault("notes", []).append(value)
        else:
            raise ParseError(f"unknown key {key!r}", lineno)
        if "indices" in block and "params" in block:
            clash = set(block["indices"]) & set(block["params"])
            if clash:
                raise ParseError(f"index name clashes with parameter: {sorted(clash)}", lineno)
    if block is not None:
        out.append(_finish(block, seen))
    return out


def format_definition(s: SeriesDefinition) -> str:
    """Render a definition back into catalog syntax (factorials omitted)."""
    from .symbolic import format_poly

    def form_text(form):
        p = Poly()
        for c, name in zip(form, s.indices):
            p = p + Poly.var(name) * c
        return format_poly(p, list(s.indices), mul="")

    def facs(fs):
        return "; ".join(f"{format_poly(f.param)} | {form_text(f.form)}" for f in fs)

    groups = []
    i = 0
    for g in s.param_groups or (len(s.params),):
        groups.append(" ".join(s.params[i:i + g]))
        i += g
    den = [f for f in s.den if not (f.slot is None and f.is_factorial())]
    lines = [
        f"series {s.name}",
        f"  indices: {' '.join(s.indices)}",
        f"  params: {' ; '.join(groups)}",
        f"  num: {facs(s.num)}",
        f"  den: {facs(den)}",
    ]
    if s.region_text:
        lines.append(f"  region: {s.region_text}")
    for n in s.notes:
        lines.append(f"  note: {n}")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# ratios


def _unit(i: int, d: int) -> tuple:
    return tuple(1 if j == i else 0 for j in range(d))


def ratio_factors(s: SeriesDefinition, axis: int) -> tuple:
    """Factored ``(N, D)`` with ``N/D = A(idx + e_axis) / A(idx)``.

    The factorials are part of ``A``, so ``D`` always contains the factor
    ``idx_axis + 1``.  Common factors are cancelled, except that one copy of
    ``idx_axis + 1`` is always kept in ``D``.
    """
    if not 0 <= axis < s.dimension:
        raise ValueError(f"axis {axis} out of range for {s.name}")
    top: list = []
    bottom: list = []
    scalar = Fraction(1)

    def push(target, const, form):
        nonlocal scalar
        g, lf = make_linear_factor(const, form)
        scalar = scalar * g if target is top else scalar / g
        target.append(lf)

    for f, upper in [(f, True) for f in s.num] + [(f, False) for f in s.den]:
        c = f.form[axis]
        if c > 0:
            for j in range(c):
                push(top if upper else bottom, f.param + j, f.form)
        elif c < 0:
            for j in range(1, -c + 1):
                push(bottom if upper else top, f.param - j, f.form)

    fact = LinearFactor(Poly.const(1), _unit(axis, s.dimension))
    ct, cb = Counter(top), Counter(bottom)
    common = ct & cb
    if common[fact] and cb[fact] == common[fact]:
        common[fact] -= 1
    return (
        FactorList(_remove(top, common), scalar),
        FactorList(_remove(bottom, common), Fraction(1)),
    )


def _remove(factors: list, drop: Counter) -> list:
    """``factors`` minus the multiset ``drop``, preserving order."""
    left = Counter(drop)
    out = []
    for f in factors:
        if left[f] > 0:
            left[f] -= 1
        else:
            out.append(f)
    return out


def horn_order(s: SeriesDefinition) -> int:
    out = 0
    for axis in range(s.dimension):
        n, d = ratio_factors(s, axis)
        out = max(out, n.degree(), d.degree())
    return out


def ratio_degrees(s: SeriesDefinition) -> list:
    return [tuple(fl.degree() for fl in ratio_factors(s, a)) for a in range(s.dimension)]


def format_factor_list(fl: FactorList, index_names) -> str:
    from .symbolic import format_poly

    names = index_names or ["m", "n", "p"]
    parts = []
    if fl.scalar != 1 or not fl.factors:
        parts.append(format_poly(Poly.const(fl.scalar)))
    for f in fl.factors:
        parts.append("(" + format_poly(f.expand(names)) + ")")
    return "*".join(parts)


# --------------------------------------------------------------------------
# shifting


def shift_series(s: SeriesDefinition, e: Sequence, name: Optional[str] = None) -> SeriesDefinition:
    """Replace every factor ``(lam)_L`` by ``(lam + L(e))_L``.

    ``e`` holds one affine parameter expression per index.  The returned
    series has ``A'(idx) = A(idx + e)`` up to a constant, so its coefficient
    ratios are the original ratios shifted by ``e``.
    """
    if len(e) != s.dimension:
        raise ValueError("shift needs one entry per index")
    e = [Poly._coerce(v) for v in e]
    return replace(
        s,
        name=name or s.name,
        num=tuple(f.shifted(e) for f in s.num),
        den=tuple(f.shifted(e) for f in s.den),
    )


def structurally_equal(a: SeriesDefinition, b: SeriesDefinition) -> bool:
    return (
        a.indices == b.indices
        and a.params == b.params
        and a.num == b.num
        and a.den == b.den
    )


def with_args(s: SeriesDefinition, args: Sequence, name: Optional[str] = None) -> SeriesDefinition:
    """The same series with its declared parameters replaced by ``args``.

    ``args`` lists one expression per declared parameter, in declaration
    order, so ``with_args(F, args)`` is the series written ``F(args)``.
    """
    if len(args) != len(s.params):
        raise ValueError(f"{s.name} takes {len(s.params)} arguments, got {len(args)}")
    mapping = {p: Poly._coerce(a) for p, a in zip(s.params, args)}
    return replace(
        s,
        name=name or s.name,
        num=tuple(replace(f, param=f.param.subs(mapping)) for f in s.num),
        den=tuple(replace(f, param=f.param.subs(mapping)) for f in s.den),
    )
