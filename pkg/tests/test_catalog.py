from collections import Counter

import pytest

from horncalc.catalog import ENV_VAR, CatalogError, load_catalog, load_references, shipped_text

from conftest import FIXTURES


def test_shipped_counts(catalog):
    fams = Counter(catalog.get(n).family for n in catalog.names())
    assert fams["two-variable"] == 34
    assert fams["complete"] >= 20
    assert fams["confluent"] >= 20
    assert fams["classical"] == 2


def test_every_entry_has_a_reference(catalog, references):
    assert set(catalog.names()) == set(references)
    for name, ref in references.items():
        assert ref.dimension == catalog.get(name).dimension
        assert ref.provenance == "transcribed"


def test_unknown_series(catalog):
    with pytest.raises(CatalogError, match="unknown series"):
        catalog.get("F_999z")


def test_user_catalog_file_and_directory():
    cat = load_catalog([str(FIXTURES / "user.hcat")], use_env=False)
    assert "Exp" in cat and cat.get("Exp").family == "user"
    cat = load_catalog([str(FIXTURES)], use_env=False, shipped=False)
    assert sorted(cat.names()) == ["Bm", "Exp"]


def test_environment_path(monkeypatch):
    monkeypatch.setenv(ENV_VAR, str(FIXTURES / "user.hcat"))
    assert "Bm" in load_catalog()
    assert "Bm" not in load_catalog(use_env=False)


def test_duplicate_across_files(tmp_path):
    f = tmp_path / "dup.hcat"
    f.write_text("series Gauss\n  indices: n\n  params: a\n  num: a|n\n  den:\n")
    with pytest.raises(CatalogError, match="already defined"):
        load_catalog([str(f)], use_env=False)


def test_missing_file(tmp_path):
    with pytest.raises(CatalogError):
        load_catalog([str(tmp_path / "nope.hcat")], use_env=False, shipped=False)


def test_reference_directory_override():
    refs = load_references(FIXTURES / "corrupted")
    assert list(refs) == ["F_17b"]


def test_shipped_text_is_readable():
    assert "series Gauss" in shipped_text("classical.hcat")


def test_catalog_names_are_unique_and_ordered(catalog):
    names = catalog.names()
    assert len(names) == len(set(names))
    assert names[:2] == ["Gauss", "Kummer"]
