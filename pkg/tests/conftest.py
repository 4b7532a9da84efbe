from pathlib import Path

import pytest

from horncalc.catalog import load_catalog, load_references
from horncalc.exprparse import parse_poly

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(use_env=False)


@pytest.fixture(scope="session")
def references():
    return load_references()


@pytest.fixture(scope="session")
def user_catalog():
    return load_catalog([str(FIXTURES / "user.hcat")], use_env=False)


def P(text):
    """Shorthand for building a polynomial from text in tests."""
    return parse_poly(text)
