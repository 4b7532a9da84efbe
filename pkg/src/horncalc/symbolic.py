"""Exact arithmetic foundations.

Everything symbolic in the package is a :class:`Poly`: a sparse polynomial
with :class:`fractions.Fraction` coefficients over string-named variables.
Parameter polynomials, index polynomials, Euler-operator polynomials and the
coordinate coefficients of differential operators are all ``Poly`` values
that differ only in which variable names they use.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by variable name


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not allowed in exact polynomials")
    return Fraction(value)


class Poly:
    """Immutable sparse polynomial with rational coefficients.

    Canonical form: no zero coefficients, monomials are sorted tuples of
    ``(variable, exponent)`` pairs.  Two polynomials are equal iff their term
    maps are equal, so structural equality is mathematical equality.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms = dict(terms) if terms else {}
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        c = as_fraction(c)
        return cls({(): c}) if c else cls()

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        if power == 0:
            return cls.const(1)
        return cls({((name, power),): Fraction(1)})

    @staticmethod
    def _from_raw(raw: dict) -> "Poly":
        p = Poly()
        p.terms = {k: v for k, v in raw.items() if v}
        return p

    # basic protocol -----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return format_poly(self)

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Poly":
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        raw = dict(self.terms)
        for m, c in other.terms.items():
            raw[m] = raw.get(m, 0) + c
        return Poly._from_raw(raw)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._from_raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = as_fraction(other)
            return Poly._from_raw({m: v * c for m, v in self.terms.items()})
        raw: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                raw[m] = raw.get(m, 0) + c1 * c2
        return Poly._from_raw(raw)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        c = as_fraction(other)
        return Poly._from_raw({m: v / c for m, v in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # inspection ---------------------------------------------------------
    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial; raises if not constant."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def degree(self, variables: Iterable[str] | None = None) -> int:
        if not self.terms:
            return -1
        if variables is None:
            return max(_mono_degree(m) for m in self.terms)
        vs = set(variables)
        return max(sum(e for v, e in m if v in vs) for m in self.terms)

    def degree_in(self, var: str) -> int:
        if not self.terms:
            return -1
        return max(dict(m).get(var, 0) for m in self.terms)

    def coefficients(self, variables: Sequence[str]) -> dict:
        """View as a polynomial in ``variables`` with Poly coefficients.

        Returns ``{exponent tuple: coefficient Poly}``.
        """
        vs = list(variables)
        idx = {v: i for i, v in enumerate(vs)}
        out: dict = {}
        for m, c in self.terms.items():
            exps = [0] * len(vs)
            rest = []
            for v, e in m:
                if v in idx:
                    exps[idx[v]] = e
                else:
                    rest.append((v, e))
            key = tuple(exps)
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: Poly._from_raw(v) for k, v in out.items()}

    @classmethod
    def from_coefficients(cls, variables: Sequence[str], coeffs: Mapping) -> "Poly":
        out = cls()
        for exps, c in coeffs.items():
            mono = cls.const(1)
            for v, e in zip(variables, exps):
                if e:
                    mono = mono * cls.var(v, e)
            out = out + mono * c
        return out

    # substitution / evaluation -------------------------------------------
    def subs(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        """Substitute polynomials for variables (simultaneously)."""
        if not mapping:
            return self
        cache: dict = {}
        result = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            keep = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = Poly._coerce(mapping[v]) ** e
                    term = term * cache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * Poly({tuple(keep): Fraction(1)})
            result = result + term
        return result

    def evaluate(self, values: Mapping[str, object]):
        """Evaluate at numeric values (Fraction, int, float or complex)."""
        total = 0
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t = t * values[v] ** e
            total = total + t
        return total

    def partial_evaluate(self, values: Mapping[str, object]) -> "Poly":
        """Substitute exact numbers for some variables."""
        raw: dict = {}
        for m, c in self.terms.items():
            keep = []
            t = c
            for v, e in m:
                if v in values:
                    t = t * as_fraction(values[v]) ** e
                else:
                    keep.append((v, e))
            k = tuple(keep)
            raw[k] = raw.get(k, 0) + t
        return Poly._from_raw(raw)

    def content(self) -> Fraction:
        """Positive rational g with self/g having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def sorted_terms(self, order: Sequence[str] | None = None):
        """Terms in total-degree-then-lex order (lowest degree first)."""
        if order is None:
            order = sorted(self.variables())
        rank = {v: i for i, v in enumerate(order)}

        def key(item):
            m, _ = item
            d = _mono_degree(m)
            exps = [0] * len(rank)
            for v, e in m:
                exps[rank.get(v, 0)] = e
            return (d, [-e for e in exps])

        return sorted(self.terms.items(), key=key)


# --------------------------------------------------------------------------
# formatting


def _format_number(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial, mul: str = "*") -> str:
    parts = []
    for v, e in m:
        parts.append(v if e == 1 else f"{v}^{e}")
    return mul.join(parts)


def format_poly(p: Poly, order: Sequence[str] | None = None, mul: str = "*") -> str:
    """Render in canonical order, e.g. ``c1 - a1*x - x^2``.

    Highest total degree is printed last so that the output reads like
    hand-written formulas (constant part first).
    """
    if not p.terms:
        return "0"
    out = []
    for m, c in p.sorted_terms(order):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not m:
            body = _format_number(a)
        elif a == 1:
            body = format_monomial(m, mul)
        else:
            body = _format_number(a) + mul + format_monomial(m, mul)
        out.append((sign, body))
    first_sign, first_body = out[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


# --------------------------------------------------------------------------
# Stirling numbers

STIRLING_MAX = 4


@lru_cache(maxsize=None)
def _stirling2(k: int, i: int) -> int:
    if k == 0 and i == 0:
        return 1
    if k == 0 or i == 0:
        return 0
    return i * _stirling2(k - 1, i) + _stirling2(k - 1, i - 1)


def stirling2(k: int, i: int) -> int:
    """Stirling number of the second kind S(k, i) for 0 <= i <= k <= 4.

    Used to expand powers of the Euler operator:
    ``(x d/dx)^k = sum_i S(k, i) x^i (d/dx)^i``.
    """
    if not (0 <= i <= k <= STIRLING_MAX):
        raise ValueError(f"stirling2 defined for 0 <= i <= k <= {STIRLING_MAX}, got ({k}, {i})")
    return _stirling2(k, i)


STIRLING_TABLE = tuple(tuple(_stirling2(k, i) for i in range(k + 1)) for k in range(STIRLING_MAX + 1))


# --------------------------------------------------------------------------
# linear factors in the summation indices


class LinearFactor:
    """``const + sum_j form[j] * index_j`` with a parameter-polynomial constant.

    Stored primitive: the integer form has gcd 1 and its first nonzero entry is
    positive.  :func:`make_linear_factor` returns the scalar pulled out.
    """

    __slots__ = ("const", "form")

    def __init__(self, const: Poly, form: tuple):
        self.const = const
        self.form = tuple(form)

    def key(self):
        return (self.form, self.const)

    def __eq__(self, other):
        return isinstance(other, LinearFactor) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"LinearFactor({self.const}, {self.form})"

    def is_constant(self) -> bool:
        return not any(self.form)

    def expand(self, index_names: Sequence[str]) -> Poly:
        out = self.const
        for name, c in zip(index_names, self.form):
            if c:
                out = out + Poly.var(name) * c
        return out

    def substitute(self, values: Sequence[Poly]) -> Poly:
        """Replace each index by the given polynomial."""
        out = self.const
        for v, c in zip(values, self.form):
            if c:
                out = out + v * c
        return out


def make_linear_factor(const: Poly, form: Sequence[int]) -> tuple:
    """Normalize ``const + form.idx`` into ``(scalar, LinearFactor)``."""
    form = tuple(int(c) for c in form)
    g = 0
    for c in form:
        g = gcd(g, abs(c))
    if g == 0:
        raise ValueError("linear factor without index dependence")
    lead = next(c for c in form if c)
    if lead < 0:
        g = -g
    return Fraction(g), LinearFactor(const / g, tuple(c // g for c in form))


def falling(k: int, i: int) -> int:
    """k (k-1) ... (k-i+1)."""
    out = 1
    for j in range(i):
        out *= k - j
    return out
