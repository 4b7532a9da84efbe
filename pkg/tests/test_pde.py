import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from horncalc.catalog import load_catalog
from horncalc.evaluation import indices_of_degree
from horncalc.exprparse import ParseError
from horncalc.pde import (
    ConsistencyError,
    DiffOperator,
    PdeSystem,
    axis_equation,
    derive_system,
    euler_to_diff,
    format_equation,
    format_structured,
    format_system,
    normalize_operator,
    parse_structured,
)
from horncalc.series import horn_order, parse_catalog
from horncalc.symbolic import Poly
from horncalc.verification import apply_exact, compare_systems

from conftest import P

CATALOG = load_catalog(use_env=False)
NAMES = CATALOG.names()


def op(**terms):
    """Build an operator from keyword names such as xx, x, u."""
    table = {"xx": (2, 0, 0), "xy": (1, 1, 0), "xz": (1, 0, 1), "yy": (0, 2, 0), "yz": (0, 1, 1),
             "zz": (0, 0, 2), "x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1), "u": (0, 0, 0)}
    return DiffOperator({table[k]: P(v) for k, v in terms.items()})


def test_gauss_equation(catalog):
    eq = axis_equation(catalog.get("Gauss"), 0)
    assert eq == op(xx="x - x^2", x="c - (a+b+1)*x", u="-a*b")


def test_e1_first_equation(catalog):
    eq = axis_equation(catalog.get("E_1"), 0)
    assert eq == op(xx="x - x^2", xy="y", xz="z", x="c - (a1+a2+1)*x", u="-a1*a2")


def test_exp_series_equation():
    (s,) = parse_catalog("series Exp\n  indices: m\n  params:\n  num:\n  den:\n")
    assert axis_equation(s, 0) == op(x="1", u="-1")


def test_euler_expansion():
    # delta^2 = x d + x^2 d^2
    assert euler_to_diff(Poly.var("@0", 2), 1) == op(x="x", xx="x^2")
    # delta_x delta_y = x y d_x d_y
    assert euler_to_diff(Poly.var("@0") * Poly.var("@1"), 2) == op(xy="x*y")


def test_inconsistent_definition_is_reported():
    # dropping every lower factor, the factorial included, leaves nothing
    # for the division by x to consume
    s = CATALOG.get("Gauss")
    bad = type(s)(**{**s.__dict__, "den": ()})
    with pytest.raises(ConsistencyError):
        axis_equation(bad, 0)


def test_human_format_examples(catalog):
    assert format_system(derive_system(catalog.get("Gauss"))) == "x(1-x) u_xx + (c-(a+b+1)x) u_x - a*b u = 0"
    e1 = format_system(derive_system(catalog.get("E_1"))).splitlines()
    assert e1[2] == "z u_zz + x u_xz + y u_yz + (c-z) u_z - a5 u = 0"
    assert format_equation(DiffOperator({}), 0) == "0 = 0"


def test_normalisation_makes_own_second_derivative_positive():
    scalar, normed = normalize_operator(op(xx="-2*x + 2*x^2", u="4*a"), 0)
    assert scalar == -2
    assert normed == op(xx="x - x^2", u="-2*a")


def test_structured_parse_errors():
    with pytest.raises(ParseError):
        parse_structured("term 1 0 0 x\n")
    with pytest.raises(ParseError):
        parse_structured("system A\nequation\n  term 1 0 x\nend\n")
    with pytest.raises(ParseError):
        parse_structured("system A\nbogus\n")


@pytest.mark.parametrize("name", NAMES)
def test_structured_round_trip(name):
    system = derive_system(CATALOG.get(name))
    (back,) = parse_structured(format_structured(system))
    assert back.name == system.name
    assert back.dimension == system.dimension
    assert back.equations == system.equations


@pytest.mark.parametrize("name", NAMES)
def test_derived_operators_are_polynomial_and_low_order(name):
    s = CATALOG.get(name)
    for eq in derive_system(s).equations:
        assert eq.order() <= horn_order(s)
        for beta, c in eq.terms.items():
            assert all(e >= 0 for m in c.terms for _, e in m)
            assert not any(beta[s.dimension:])


@pytest.mark.parametrize("name", NAMES)
def test_compare_is_reflexive(name):
    system = derive_system(CATALOG.get(name))
    assert compare_systems(system, system).statuses() == ["match"] * system.dimension


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(NAMES), st.integers(0, 10**6))
def test_operator_is_linear_on_truncated_series(name, seed):
    s = CATALOG.get(name)
    d = s.dimension
    rng = random.Random(seed)
    idxs = [i for k in range(7) for i in indices_of_degree(d, k)]
    u = {i: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for i in idxs}
    v = {i: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for i in idxs}
    binding = {p: Fraction(rng.randint(-20, 20), rng.randint(2, 7)) for p in s.params}
    for eq in derive_system(s).equations:
        bound = eq.bind(binding)
        lu = apply_exact(bound, u, d, 4)
        lv = apply_exact(bound, v, d, 4)
        luv = apply_exact(bound, {i: u[i] + v[i] for i in idxs}, d, 4)
        assert all(luv[k] == lu[k] + lv[k] for k in luv)


def test_system_dataclass_defaults():
    p = PdeSystem("A", 1, [])
    assert p.provenance == "derived"
    assert p.notes == []
