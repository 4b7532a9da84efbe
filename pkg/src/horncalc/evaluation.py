"""Pochhammer values, series coefficients and truncated shell summation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .region import OUTSIDE, UNKNOWN, region_check
from .series import SeriesDefinition, ratio_factors


class PoleError(ArithmeticError):
    """A Pochhammer factor or ratio denominator vanished."""

    def __init__(self, message: str, factor=None):
        super().__init__(message)
        self.factor = factor


def pochhammer_num(a, k: int):
    """Rising factorial extended to negative ``k``.

    ``(a)_k = a (a+1) ... (a+k-1)`` for ``k > 0`` and
    ``(a)_{-k} = 1 / [(a-1)(a-2)...(a-k)]``.  Exact for ints and Fractions.
    """
    if isinstance(a, int):
        a = Fraction(a)
    out = a - a + 1
    if k >= 0:
        for j in range(k):
            out = out * (a + j)
        return out
    for j in range(1, -k + 1):
        f = a - j
        if f == 0:
            raise PoleError(f"pole of ({a})_{k}: factor a-{j} vanishes", factor=(a, -j))
        out = out * f
    return 1 / out


def _bind_params(s: SeriesDefinition, binding: dict) -> dict:
    missing = [p for p in s.params if p not in binding]
    extra = s.param_poly_symbols() - set(binding)
    if missing or extra:
        raise KeyError(f"{s.name}: unbound parameters {sorted(set(missing) | extra)}")
    return binding


def coefficient_direct(s: SeriesDefinition, binding: dict, idx: Sequence[int]):
    """``A(idx)`` from explicit Pochhammer products (factorials included)."""
    _bind_params(s, binding)
    out = 1
    for f in s.num:
        out = out * pochhammer_num(f.param.evaluate(binding), _dot(f.form, idx))
    for f in s.den:
        lam = f.param.evaluate(binding)
        k = _dot(f.form, idx)
        val = pochhammer_num(lam, k)
        if val == 0:
            raise PoleError(f"{s.name}: lower factor ({lam})_{k} vanishes at {tuple(idx)}", factor=(lam, k))
        out = out / val
    return out


def _dot(form, idx) -> int:
    return sum(c * i for c, i in zip(form, idx))


@dataclass
class BoundRatios:
    """Axis ratios with parameters replaced by numbers, ready for recurrences."""

    num: list  # per axis: (scalar, [(const, form), ...])
    den: list

    @classmethod
    def build(cls, s: SeriesDefinition, binding: dict) -> "BoundRatios":
        _bind_params(s, binding)
        num, den = [], []
        for axis in range(s.dimension):
            n, d = ratio_factors(s, axis)
            conv = (lambda v: v) if _is_exact(binding) else float
            num.append((conv(n.scalar), [(conv(f.const.evaluate(binding)), f.form) for f in n.factors]))
            den.append((conv(d.scalar), [(conv(f.const.evaluate(binding)), f.form) for f in d.factors]))
        return cls(num, den)

    def ratio(self, axis: int, idx: Sequence[int]):
        sc, fs = self.den[axis]
        d = sc
        for c, form in fs:
            d = d * (c + _dot(form, idx))
        if d == 0:
            raise PoleError(f"ratio denominator vanishes on axis {axis} at {tuple(idx)}")
        sc, fs = self.num[axis]
        n = sc
        for c, form in fs:
            n = n * (c + _dot(form, idx))
        return n / d


def _is_exact(binding: dict) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in binding.values())


def coefficient_at(s: SeriesDefinition, binding: dict, idx: Sequence[int]):
    """Coefficient of ``x^idx`` via axis-ratio recurrences from the origin.

    The path runs along axis 0, then axis 1, then axis 2.  Exact when the
    binding is rational.
    """
    br = BoundRatios.build(s, binding)
    cur = [0] * s.dimension
    val = Fraction(1) if _is_exact(binding) else 1.0
    for axis, target in enumerate(idx):
        for _ in range(target):
            val = val * br.ratio(axis, cur)
            cur[axis] += 1
    return val


def indices_of_degree(d: int, k: int):
    """All index vectors of length ``d`` with total ``k`` (lex order)."""
    if d == 1:
        yield (k,)
        return
    for i in range(k, -1, -1):
        for rest in indices_of_degree(d - 1, k - i):
            yield (i,) + rest


def coefficient_table(s: SeriesDefinition, binding: dict, degree: int) -> dict:
    """``{idx: coefficient}`` for all indices of total degree <= ``degree``."""
    br = BoundRatios.build(s, binding)
    one = Fraction(1) if _is_exact(binding) else 1.0
    table = {(0,) * s.dimension: one}
    for k in range(1, degree + 1):
        for idx in indices_of_degree(s.dimension, k):
            axis = next(a for a, v in enumerate(idx) if v > 0)
            prev = list(idx)
            prev[axis] -= 1
            prev = tuple(prev)
            table[idx] = table[prev] * br.ratio(axis, prev)
    return table


@dataclass
class EvalConfig:
    tol: float = 1e-12
    max_shells: int = 400
    consecutive_small_shells: int = 3

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_shells < 1:
            raise ValueError("max_shells must be at least 1")
        if self.consecutive_small_shells < 1:
            raise ValueError("consecutive_small_shells must be at least 1")


@dataclass
class EvalResult:
    value: float
    shells_used: int
    tail_estimate: float
    region_status: str
    converged: bool = True
    message: str = ""


def eval_series(
    s: SeriesDefinition,
    binding: dict,
    point: Sequence[float],
    cfg: Optional[EvalConfig] = None,
    fixed_shells: Optional[int] = None,
) -> EvalResult:
    """Sum the series by total-degree shells.

    Each term is obtained from a neighbour in the previous shell by one axis
    ratio.  Summation stops after ``cfg.consecutive_small_shells`` shells whose
    absolute mass is below ``tol * |S|``, or at ``cfg.max_shells``.  With
    ``fixed_shells`` exactly that many shells (degrees 0..fixed_shells-1) are
    summed, which is what finite-difference stencils need.
    """
    cfg = cfg or EvalConfig()
    if len(point) != s.dimension:
        raise ValueError(f"{s.name} needs {s.dimension} coordinates, got {len(point)}")
    status = region_check(s, point) if s.region is not None else UNKNOWN
    if status == OUTSIDE and fixed_shells is None:
        return EvalResult(math.nan, 0, math.inf, status, False, "point outside the region of convergence")
    fbind = {k: float(v) for k, v in binding.items()}
    br = BoundRatios.build(s, fbind)
    xs = [float(v) for v in point]
    d = s.dimension
    shell = {(0,) * d: 1.0}
    total = 1.0
    mags = [1.0]
    small = 0
    limit = fixed_shells if fixed_shells is not None else cfg.max_shells
    shells = 1
    while shells < limit:
        k = shells
        new = {}
        mag = 0.0
        for idx in indices_of_degree(d, k):
            axis = next(a for a, v in enumerate(idx) if v > 0)
            prev = list(idx)
            prev[axis] -= 1
            prev = tuple(prev)
            t = shell[prev]
            if t != 0.0 and xs[axis] != 0.0:
                t = t * xs[axis] * br.ratio(axis, prev)
            else:
                t = 0.0
            new[idx] = t
            mag += abs(t)
        shell = new
        ssum = math.fsum(new.values())
        total += ssum
        mags.append(mag)
        shells += 1
        if not math.isfinite(total):
            return EvalResult(total, shells, math.inf, status, False, "overflow during summation")
        if fixed_shells is None:
            if mag <= cfg.tol * abs(total):
                small += 1
                if small >= cfg.consecutive_small_shells:
                    break
            else:
                small = 0
    converged = fixed_shells is not None or small >= cfg.consecutive_small_shells
    tail, q_ok = _tail(mags)
    msg = ""
    if not converged:
        msg = "max_shells exhausted"
        if not q_ok:
            tail = math.inf
    return EvalResult(total, shells, tail, status, converged, msg)


def _tail(mags: list) -> tuple:
    last = mags[-1]
    if last == 0.0:
        return 0.0, True
    if len(mags) < 2 or mags[-2] == 0.0:
        return last, False
    q = last / mags[-2]
    if q >= 1.0:
        return last, False
    return last * q / (1.0 - q), True


def gauss_summation(a: float, b: float, c: float) -> float:
    """Closed form of the Gauss series at x=1, valid for c-a-b > 0."""
    return math.gamma(c) * math.gamma(c - a - b) / (math.gamma(c - a) * math.gamma(c - b))
