import pytest

from horncalc.catalog import load_catalog
from horncalc.frobenius import (
    EXPONENT_NAMES,
    conjugated_system,
    enumerate_exponents,
    indicial_system,
    particular_solutions,
    prefactor,
    verify_solution,
)
from horncalc.pde import axis_equation, normalize_operator
from horncalc.series import parse_catalog, shift_series, structurally_equal, with_args
from horncalc.symbolic import Poly

from conftest import P

CATALOG = load_catalog(use_env=False)
NAMES = CATALOG.names()

EXP = parse_catalog("series Exp\n  indices: m\n  params:\n  num:\n  den:\n")[0]


def E(text):
    """Parse with ascii stand-ins for the exponent symbols."""
    names = dict(zip(("tau", "nu", "lam"), EXPONENT_NAMES))
    return P(text).subs({k: Poly.var(v) for k, v in names.items()})


def tau(*vals):
    return tuple(P(v) if isinstance(v, str) else Poly.const(v) for v in vals)


def test_indicial_f10a(catalog):
    isys = indicial_system(catalog.get("F_10a"))
    assert isys.polynomial(0) == E("tau*(tau - 1 + c1)")
    assert isys.polynomial(1) == E("nu*(nu - 1 + c2)")
    assert isys.polynomial(2) == E("lam*(lam - 1 + c3)")


def test_indicial_f1_is_coupled(catalog):
    isys = indicial_system(catalog.get("F1"))
    assert isys.polynomial(0) == E("tau*(gamma - 1 + tau + nu)")
    assert isys.polynomial(1) == E("nu*(gamma - 1 + tau + nu)")


def test_indicial_exp():
    assert indicial_system(EXP).polynomial(0) == E("tau")


def test_f10a_tuples(catalog):
    got = {t.key() for t in enumerate_exponents(indicial_system(catalog.get("F_10a"))).tuples}
    expected = {
        tau(0, 0, 0), tau("1-c1", 0, 0), tau(0, "1-c2", 0), tau(0, 0, "1-c3"),
        tau("1-c1", "1-c2", 0), tau(0, "1-c2", "1-c3"), tau("1-c1", 0, "1-c3"),
        tau("1-c1", "1-c2", "1-c3"),
    }
    assert got == expected


def test_h1_tuples(catalog):
    enum = enumerate_exponents(indicial_system(catalog.get("H1")))
    assert {t.key() for t in enum.tuples} == {tau(0, 0), tau("1-delta", 0)}
    assert any("couples axes" in d for d in enum.diagnostics)


def test_f2_tuples(catalog):
    enum = enumerate_exponents(indicial_system(catalog.get("F2")))
    assert {t.key() for t in enum.tuples} == {
        tau(0, 0), tau("1-gamma", 0), tau(0, "1-gamma'"), tau("1-gamma", "1-gamma'")
    }


def test_coupled_roots_are_found_but_fail_verification(catalog):
    s = catalog.get("F1")
    sols = particular_solutions(s, include_coupled=True)
    verified = [sol.exponents.key() for sol in sols if sol.verified]
    assert verified == [tau(0, 0)]
    assert all(sol.diagnostics for sol in sols if not sol.verified)


def test_exp_single_solution():
    (sol,) = particular_solutions(EXP)
    assert sol.verified
    assert sol.prefactor == "1"


def test_prefactor_text(catalog):
    t = enumerate_exponents(indicial_system(catalog.get("F_10a"))).tuples[-1]
    assert prefactor(t) == "x^(1 - c1) y^(1 - c2) z^(1 - c3)"


def test_wrong_arguments_fail_verification(catalog):
    s = catalog.get("F4")
    e = tau("1-gamma", 0)
    good = shift_series(s, e)
    bad = with_args(s, [P("1-gamma+alpha"), P("beta"), P("2-gamma"), P("gamma'")])
    assert verify_solution(s, e, good)[0]
    ok, diag = verify_solution(s, e, bad)
    assert not ok and "residual" in diag[0]


def test_conjugation_by_one_is_the_undivided_system(catalog):
    s = catalog.get("F_17a")
    conj = conjugated_system(s, tau(0, 0, 0))
    for axis in range(3):
        x = P("xyz"[axis])
        undivided = axis_equation(s, axis, normalize=False)
        expected = type(undivided)({k: v * x for k, v in undivided.terms.items()})
        assert normalize_operator(conj.equations[axis], axis)[1] == normalize_operator(expected, axis)[1]


@pytest.mark.parametrize("name", NAMES)
def test_tuples_solve_indicial_system(name):
    s = CATALOG.get(name)
    isys = indicial_system(s)
    enum = enumerate_exponents(isys)
    assert len(enum.tuples) <= 2 ** s.dimension
    assert enum.tuples[0].is_zero()
    for t in enum.tuples:
        subs = {EXPONENT_NAMES[j]: v for j, v in enumerate(t.values)}
        for axis in range(s.dimension):
            assert not isys.polynomial(axis).subs(subs)


@pytest.mark.parametrize("name", [n for n in NAMES if CATALOG.get(n).dimension == 2])
def test_two_variable_solutions_verify(name):
    s = CATALOG.get(name)
    sols = particular_solutions(s)
    assert structurally_equal(sols[0].series, s)
    assert all(sol.verified for sol in sols), [(sol.prefactor, sol.diagnostics) for sol in sols]
