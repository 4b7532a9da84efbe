"""Annihilation checks and comparison against transcribed systems."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .evaluation import EvalConfig, PoleError, coefficient_direct, coefficient_table, eval_series, indices_of_degree
from .pde import DiffOperator, PdeSystem, normalize_operator
from .region import INSIDE, region_check
from .series import COORDINATES, SeriesDefinition
from .symbolic import Poly, falling


class RegionRefusal(ValueError):
    """Numeric residual requested at a point not known to be inside the region."""


@dataclass
class ResidualReport:
    mode: str
    violations: list = field(default_factory=list)  # exact: (equation, index, value)
    point: Optional[tuple] = None
    step: Optional[float] = None
    relative: list = field(default_factory=list)  # numeric: per equation

    @property
    def ok(self) -> bool:
        return not self.violations

    def first_violation_degree(self) -> Optional[int]:
        if not self.violations:
            return None
        return min(sum(idx) for _, idx, _ in self.violations)


# --------------------------------------------------------------------------
# bindings


def random_binding(s: SeriesDefinition, rng: random.Random, max_den: int = 16) -> dict:
    """Non-integer rationals with denominators in 2..max_den for every parameter."""
    out = {}
    for name in s.params:
        while True:
            den = rng.randint(2, max_den)
            num = rng.randint(-3 * den, 3 * den)
            v = Fraction(num, den)
            if v.denominator != 1:
                out[name] = v
                break
    return out


def is_degenerate(s: SeriesDefinition, binding: dict, degree: int) -> bool:
    """True if some Pochhammer factor can vanish or have a pole in the window.

    ``(lam)_k`` with ``|k| <= K`` involves only ``lam + j`` for
    ``-K <= j < K``, so a factor is harmless unless ``lam`` is an integer in
    that range.  This is conservative: it also rejects integers that would
    only matter outside the window.
    """
    for f in s.factors():
        lam = f.param.evaluate(binding)
        if Fraction(lam).denominator != 1:
            continue
        hi = degree * max(0, max(f.form))
        lo = degree * min(0, min(f.form))
        if -hi < lam <= -lo:
            return True
    try:
        coefficient_table(s, binding, degree)
    except (PoleError, ZeroDivisionError):
        return True
    return False


def nondegenerate_bindings(s: SeriesDefinition, count: int, degree: int, seed: int = 0) -> list:
    rng = random.Random(f"{s.name}:{seed}")
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 200:
            raise RuntimeError(f"{s.name}: no non-degenerate binding found")
        b = random_binding(s, rng)
        if not is_degenerate(s, b, degree):
            out.append(b)
    return out


# --------------------------------------------------------------------------
# exact residual


def apply_exact(op: DiffOperator, coeffs: dict, dim: int, degree: int) -> dict:
    """Coefficients of ``op u`` for all indices of total degree <= ``degree``.

    ``op`` must have numeric (bound) coefficients; ``coeffs`` maps index
    tuples of length ``dim`` to rationals.
    """
    names = COORDINATES[:dim]
    pieces = []
    for beta, c in op.terms.items():
        b = beta[:dim]
        if any(beta[dim:]):
            raise ValueError("operator differentiates along a missing axis")
        for alpha, val in c.coefficients(names).items():
            pieces.append((alpha, b, val.constant_value()))
    out = {}
    for k in range(degree + 1):
        for gamma in indices_of_degree(dim, k):
            total = Fraction(0)
            for alpha, b, val in pieces:
                src = tuple(g - a + bb for g, a, bb in zip(gamma, alpha, b))
                if any(v < 0 for v in src) or any(g - a < 0 for g, a in zip(gamma, alpha)):
                    continue
                u = coeffs.get(src)
                if u is None:
                    raise ValueError(f"truncated series too short for index {src}")
                if not u:
                    continue
                mult = 1
                for v, bb in zip(src, b):
                    mult *= falling(v, bb)
                total += val * mult * u
            out[gamma] = total
    return out


def residual_exact(p: PdeSystem, s: SeriesDefinition, binding: dict, N: int = 10) -> ResidualReport:
    """Apply every equation to the degree-N truncation; residual must vanish to degree N-2."""
    try:
        coeffs = coefficient_table(s, binding, N)
    except (PoleError, ZeroDivisionError) as exc:
        raise PoleError(f"{s.name}: degenerate binding ({exc})") from None
    report = ResidualReport("exact")
    for e, op in enumerate(p.equations):
        bound = op.bind(binding)
        res = apply_exact(bound, coeffs, s.dimension, N - 2)
        for gamma in sorted(res, key=lambda g: (sum(g), tuple(-v for v in g))):
            if res[gamma] != 0:
                report.violations.append((e, gamma, res[gamma]))
    return report


# --------------------------------------------------------------------------
# numeric residual

_D1 = {-2: 1.0, -1: -8.0, 1: 8.0, 2: -1.0}  # / (12 h)
_D2 = {-2: -1.0, -1: 16.0, 0: -30.0, 1: 16.0, 2: -1.0}  # / (12 h^2)


class _PolyEvaluator:
    def __init__(self, coeffs: dict, dim: int):
        keys = list(coeffs)
        self.exps = np.array(keys, dtype=float).reshape(len(keys), dim)
        self.vals = np.array([float(coeffs[k]) for k in keys])

    def __call__(self, pt) -> float:
        pt = np.asarray(pt, dtype=float)
        with np.errstate(invalid="ignore"):
            pw = np.prod(np.where(self.exps == 0, 1.0, pt ** self.exps), axis=1)
        return float(np.dot(self.vals, pw))


def _derivative(f, point, beta, h) -> float:
    dim = len(point)
    axes = [(j, e) for j, e in enumerate(beta[:dim]) if e]
    if not axes:
        return f(point)
    if len(axes) == 1 and axes[0][1] == 2:
        j = axes[0][0]
        tot = 0.0
        for k, w in _D2.items():
            q = list(point)
            q[j] += k * h
            tot += w * f(q)
        return tot / (12 * h * h)
    if len(axes) == 1:
        j = axes[0][0]
        tot = 0.0
        for k, w in _D1.items():
            q = list(point)
            q[j] += k * h
            tot += w * f(q)
        return tot / (12 * h)
    (i, _), (j, _) = axes
    tot = 0.0
    for ki, wi in _D1.items():
        for kj, wj in _D1.items():
            q = list(point)
            q[i] += ki * h
            q[j] += kj * h
            tot += wi * wj * f(q)
    return tot / (144 * h * h)


def residual_numeric(
    p: PdeSystem,
    s: SeriesDefinition,
    binding: dict,
    point: Sequence[float],
    h: float = 1e-3,
    cfg: Optional[EvalConfig] = None,
) -> ResidualReport:
    """Finite-difference residual ``|Lu| / sum |terms|`` per equation.

    The series is truncated at one fixed degree for every stencil point, so
    the differences see a single smooth polynomial.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    status = region_check(s, point)
    if status != INSIDE:
        raise RegionRefusal(f"{s.name}: point {tuple(point)} is {status} the region of convergence")
    cfg = cfg or EvalConfig()
    far = [abs(v) + 2 * h for v in point]
    probe = eval_series(s, binding, far, cfg)
    if not probe.converged:
        raise RegionRefusal(f"{s.name}: series did not converge at {tuple(far)}")
    degree = probe.shells_used + 2
    fbind = {k: float(v) for k, v in binding.items()}
    f = _PolyEvaluator(coefficient_table(s, fbind, degree), s.dimension)
    report = ResidualReport("numeric", point=tuple(point), step=h)
    env = {**fbind, **{COORDINATES[j]: float(v) for j, v in enumerate(point)}}
    for op in p.equations:
        lu = 0.0
        scale = 0.0
        for beta, c in op.terms.items():
            term = float(c.evaluate(env)) * _derivative(f, point, beta, h)
            lu += term
            scale += abs(term)
        report.relative.append(abs(lu) / scale if scale else 0.0)
    return report


# --------------------------------------------------------------------------
# comparison


@dataclass
class EquationComparison:
    status: str  # match | scaled-match | discrepancy
    scalar: Optional[Fraction] = None
    diff: list = field(default_factory=list)  # (beta, derived, transcribed)


@dataclass
class ComparisonReport:
    name: str
    equations: list

    @property
    def ok(self) -> bool:
        return all(e.status in ("match", "scaled-match") for e in self.equations)

    def statuses(self) -> list:
        return [e.status for e in self.equations]


def _compare_eq(a: DiffOperator, b: DiffOperator, axis: int) -> EquationComparison:
    if a == b:
        return EquationComparison("match")
    ga, na = normalize_operator(a, axis)
    gb, nb = normalize_operator(b, axis)
    if na == nb and b:
        return EquationComparison("scaled-match", scalar=ga / gb)
    diff = []
    for beta in sorted(set(na.terms) | set(nb.terms), key=lambda t: (-sum(t), tuple(-v for v in t))):
        x, y = na.terms.get(beta, Poly()), nb.terms.get(beta, Poly())
        if x != y:
            diff.append((beta, x, y))
    return EquationComparison("discrepancy", diff=diff)


def compare_systems(derived: PdeSystem, transcribed: PdeSystem) -> ComparisonReport:
    if derived.dimension != transcribed.dimension:
        raise ValueError("systems of different dimension")
    eqs = []
    for axis in range(max(len(derived.equations), len(transcribed.equations))):
        if axis >= len(derived.equations) or axis >= len(transcribed.equations):
            eqs.append(EquationComparison("discrepancy"))
            continue
        eqs.append(_compare_eq(derived.equations[axis], transcribed.equations[axis], axis))
    return ComparisonReport(derived.name, eqs)


def describe_comparison(rep: ComparisonReport) -> list:
    from .pde import _DNAMES

    lines = []
    for i, e in enumerate(rep.equations, 1):
        if e.status == "match":
            lines.append(f"{rep.name} eq{i}: match")
        elif e.status == "scaled-match":
            lines.append(f"{rep.name} eq{i}: scaled-match (factor {e.scalar})")
        else:
            lines.append(f"{rep.name} eq{i}: discrepancy")
            for beta, x, y in e.diff:
                lines.append(f"    {_DNAMES.get(beta, beta)}: derived {x} | transcribed {y}")
    return lines
