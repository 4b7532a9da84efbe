"""Frobenius exponents at the origin and the matching particular solutions.

Substituting ``u = x^tau y^nu z^lam w`` into the axis-i equation leaves, at
the lowest order in ``x_i``, the ratio denominator ``D_i`` evaluated at the
exponents with the i-th entry decremented.  Its factors give the candidate
exponents.  A factor is usable only if it involves axis i alone: a factor
such as ``(c + m + n)`` couples the axes and its root does not make the whole
face ``idx_i = 0`` of the shifted series vanish, so the shifted series is not
a power series solution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .pde import EULER, PdeSystem, euler_to_diff
from .evaluation import PoleError
from .series import SeriesDefinition, ratio_factors, shift_series
from .symbolic import Poly, format_poly
from .verification import nondegenerate_bindings, residual_exact

EXPONENT_NAMES = ("τ", "ν", "λ")
COORD = ("x", "y", "z")


@dataclass
class IndicialFactor:
    poly: Poly  # affine in exponent symbols and parameters
    form: tuple  # index form of the ratio factor it came from

    def axes(self) -> list:
        return [j for j, c in enumerate(self.form) if c]


@dataclass
class IndicialSystem:
    dimension: int
    factors: list  # per axis: list of IndicialFactor
    scalars: list

    def polynomial(self, axis: int) -> Poly:
        out = Poly.const(self.scalars[axis])
        for f in self.factors[axis]:
            out = out * f.poly
        return out

    def format(self) -> list:
        out = []
        for axis in range(self.dimension):
            parts = ["(" + format_poly(f.poly) + ")" for f in self.factors[axis]]
            out.append("*".join(parts) + " = 0")
        return out


def indicial_system(s: SeriesDefinition) -> IndicialSystem:
    d = s.dimension
    sym = [Poly.var(EXPONENT_NAMES[j]) for j in range(d)]
    factors, scalars = [], []
    for axis in range(d):
        _, den = ratio_factors(s, axis)
        vals = [sym[j] - (1 if j == axis else 0) for j in range(d)]
        factors.append([IndicialFactor(f.substitute(vals), f.form) for f in den.factors])
        scalars.append(den.scalar)
    return IndicialSystem(d, factors, scalars)


@dataclass
class ExponentTuple:
    values: tuple  # Poly per axis

    def key(self):
        return tuple(self.values)

    def is_zero(self) -> bool:
        return all(not v for v in self.values)

    def __str__(self) -> str:
        return "(" + ", ".join(format_poly(v) for v in self.values) + ")"


def _solve(rows: list, d: int) -> Optional[list]:
    """Solve sum_j A[i][j] E_j = -b_i with rational A and Poly b; None if singular."""
    A = [[Fraction(r[0][j]) for j in range(d)] for r in rows]
    b = [-r[1] for r in rows]
    for col in range(d):
        piv = next((i for i in range(col, d) if A[i][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        for i in range(d):
            if i != col and A[i][col] != 0:
                f = A[i][col] / A[col][col]
                A[i] = [a - f * c for a, c in zip(A[i], A[col])]
                b[i] = b[i] - b[col] * f
    return [b[i] / A[i][i] for i in range(d)]


def _split_affine(p: Poly, d: int) -> tuple:
    coeffs = p.coefficients(EXPONENT_NAMES[:d])
    lin = []
    for j in range(d):
        key = tuple(1 if k == j else 0 for k in range(d))
        c = coeffs.get(key, Poly())
        if not c.is_constant():
            raise ValueError(f"indicial factor {p} is not affine with rational exponent coefficients")
        lin.append(c.constant_term())
    const = coeffs.get((0,) * d, Poly())
    return lin, const


@dataclass
class Enumeration:
    tuples: list
    diagnostics: list = field(default_factory=list)


def enumerate_exponents(isys: IndicialSystem, include_coupled: bool = False) -> Enumeration:
    """All exponent tuples from one indicial factor per axis.

    Factors that mix several axes are skipped unless ``include_coupled``.
    """
    d = isys.dimension
    choices = []
    diag = []
    for axis in range(d):
        ok = []
        for f in isys.factors[axis]:
            if not include_coupled and f.axes() != [axis]:
                diag.append(
                    f"axis {axis + 1}: factor {format_poly(f.poly)} couples axes; its root is not a Frobenius exponent"
                )
                continue
            ok.append(f)
        choices.append(ok)
    seen = {}
    for combo in product(*choices):
        rows = [_split_affine(f.poly, d) for f in combo]
        sol = _solve(rows, d)
        if sol is None:
            diag.append("singular choice: " + ", ".join(format_poly(f.poly) for f in combo))
            continue
        t = ExponentTuple(tuple(sol))
        seen.setdefault(t.key(), t)
    tuples = sorted(
        seen.values(), key=lambda t: (sum(bool(v) for v in t.values), [not v for v in t.values])
    )
    return Enumeration(tuples, diag)


def prefactor(e: ExponentTuple) -> str:
    parts = []
    for j, v in enumerate(e.values):
        if not v:
            continue
        txt = format_poly(v, mul="")
        parts.append(f"{COORD[j]}^{txt}" if v.is_constant() and v.constant_value() >= 0 else f"{COORD[j]}^({txt})")
    return " ".join(parts) if parts else "1"


@dataclass
class ParticularSolution:
    exponents: ExponentTuple
    series: SeriesDefinition
    prefactor: str
    verified: bool = False
    diagnostics: list = field(default_factory=list)

    def args(self) -> str:
        return self.series.format_args()

    def display(self, base_name: str) -> str:
        pre = "" if self.prefactor == "1" else self.prefactor + " "
        return f"{pre}{base_name}({self.args()})"


def conjugated_system(s: SeriesDefinition, exponents: Sequence) -> PdeSystem:
    """The original system conjugated by ``x^E``, acting on the shifted series.

    Axis ``a`` gives ``D_a(delta + E - e_a) - x_a N_a(delta + E)`` with no
    division by ``x_a``.  It kills ``x^-E L (x^E w)`` exactly when ``w`` has the
    coefficients ``A(E + idx)`` and the face ``idx_a = 0`` is consistent,
    which is the Frobenius condition for ``E``.
    """
    d = s.dimension
    e = [Poly._coerce(v) for v in exponents]
    deltas = [Poly.var(EULER[j]) for j in range(d)]
    eqs = []
    for axis in range(d):
        n_list, d_list = ratio_factors(s, axis)
        lower = d_list.substitute([deltas[j] + e[j] - (1 if j == axis else 0) for j in range(d)])
        upper = n_list.substitute([deltas[j] + e[j] for j in range(d)])
        xa = Poly.var(COORD[axis])
        eqs.append(euler_to_diff(lower, d) - euler_to_diff(upper, d).scale(xa))
    return PdeSystem(s.name, d, eqs)


def verify_solution(
    s: SeriesDefinition,
    exponents: Sequence,
    candidate: SeriesDefinition,
    degree: int = 8,
    bindings: int = 3,
    seed: int = 0,
) -> tuple:
    """Check that ``x^E * candidate`` is annihilated by the system of ``s``.

    Runs :func:`residual_exact` with the conjugated system on random
    non-degenerate rational bindings.  Returns ``(ok, diagnostics)``.
    """
    system = conjugated_system(s, exponents)
    try:
        bs = nondegenerate_bindings(candidate, bindings, degree, seed=seed)
    except RuntimeError as exc:
        return False, [str(exc)]
    for b in bs:
        try:
            rep = residual_exact(system, candidate, b, degree)
        except PoleError as exc:
            return False, [str(exc)]
        if not rep.ok:
            eq, idx, _ = rep.violations[0]
            return False, [f"equation {eq + 1} has a nonzero residual at index {idx}"]
    return True, []


def particular_solutions(
    s: SeriesDefinition, degree: int = 8, bindings: int = 3, include_coupled: bool = False
) -> list:
    enum = enumerate_exponents(indicial_system(s), include_coupled)
    out = []
    for t in enum.tuples:
        shifted = shift_series(s, t.values)
        ok, diag = verify_solution(s, t.values, shifted, degree, bindings)
        out.append(ParticularSolution(t, shifted, prefactor(t), ok, diag))
    return out
