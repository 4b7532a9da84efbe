"""Loading shipped and user catalogs, plus the transcribed reference systems."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .pde import PdeSystem, parse_structured
from .series import SeriesDefinition, parse_catalog

SHIPPED = (
    ("classical.hcat", "classical"),
    ("two_var.hcat", "two-variable"),
    ("complete_3var.hcat", "complete"),
    ("confluent_3var.hcat", "confluent"),
)
ENV_VAR = "HORNCALC_CATALOG_PATH"


class CatalogError(ValueError):
    pass


@dataclass
class Catalog:
    entries: dict = field(default_factory=dict)  # name -> SeriesDefinition
    sources: dict = field(default_factory=dict)  # name -> file label

    def add(self, defs: Iterable[SeriesDefinition], source: str) -> None:
        for s in defs:
            if s.name in self.entries:
                raise CatalogError(
                    f"series {s.name!r} from {source} already defined in {self.sources[s.name]}"
                )
            self.entries[s.name] = s
            self.sources[s.name] = source

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, name: str) -> SeriesDefinition:
        try:
            return self.entries[name]
        except KeyError:
            raise CatalogError(f"unknown series {name!r}") from None

    def names(self) -> list:
        return list(self.entries)


def shipped_text(filename: str) -> str:
    return resources.files("horncalc").joinpath("catalog", filename).read_text(encoding="utf-8")


def env_paths() -> list:
    raw = os.environ.get(ENV_VAR, "")
    return [p for p in raw.split(":") if p]


def load_catalog(
    paths: Optional[Iterable[str]] = None, use_env: bool = True, shipped: bool = True
) -> Catalog:
    """Shipped catalogs first, then ``$HORNCALC_CATALOG_PATH``, then ``paths``.

    A path may be a file or a directory (every ``*.hcat`` inside is read).
    """
    cat = Catalog()
    if shipped:
        for fname, family in SHIPPED:
            cat.add(parse_catalog(shipped_text(fname), family=family), fname)
    extra = (env_paths() if use_env else []) + list(paths or [])
    for p in extra:
        path = Path(p)
        files = sorted(path.glob("*.hcat")) if path.is_dir() else [path]
        for f in files:
            try:
                text = f.read_text(encoding="utf-8")
            except OSError as exc:
                raise CatalogError(f"cannot read catalog {f}: {exc}") from None
            cat.add(parse_catalog(text, family="user"), str(f))
    return cat


def shipped_reference_dir():
    return resources.files("horncalc").joinpath("reference")


def load_references(directory=None) -> dict:
    """name -> transcribed PdeSystem for every ``*.pde`` file in the directory."""
    root = shipped_reference_dir() if directory is None else Path(directory)
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".pde"):
            continue
        for p in parse_structured(entry.read_text(encoding="utf-8")):
            out[p.name] = p
    return out
