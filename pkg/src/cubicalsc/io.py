"""Loading input files. Paths inside a file are resolved relative to that file."""

from __future__ import annotations

import json
from pathlib import Path

from .artin import LabeledGraph
from .complex_core import CubeComplex, MalformedInput, validate
from .morphisms import CombinatorialMap, validate_map
from .presentation import CubicalPresentation, cycle_relator


class InputFileNotFound(FileNotFoundError):
    pass


def read_json(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise InputFileNotFound(f"no such file: {path}")
    try:
        with path.open(encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None


def _near(origin: Path, ref: str) -> Path:
    return origin.parent / ref


class Loader:
    """Caches complexes by resolved path so shared files become one object."""

    def __init__(self):
        self._complexes: dict[Path, CubeComplex] = {}

    def complex(self, path: str | Path) -> CubeComplex:
        key = Path(path).resolve()
        if key not in self._complexes:
            self._complexes[key] = validate(read_json(path))
        return self._complexes[key]

    def map(self, path: str | Path, domain: CubeComplex | None = None,
            codomain: CubeComplex | None = None) -> CombinatorialMap:
        path = Path(path)
        raw = read_json(path)
        if domain is None:
            domain = self.complex(_near(path, _field(raw, "domain", path)))
        if codomain is None:
            codomain = self.complex(_near(path, _field(raw, "codomain", path)))
        return validate_map(raw, domain, codomain)

    def presentation(self, path: str | Path) -> CubicalPresentation:
        path = Path(path)
        raw = read_json(path)
        base = self.complex(_near(path, _field(raw, "base", path)))
        rels = []
        for k, r in enumerate(raw.get("relators", [])):
            if not isinstance(r, dict):
                raise MalformedInput(f"{path}: relator {k} must be an object", str(k))
            if "word" in r:
                # shorthand for a cycle reading a word in a one-vertex base
                rels.append(cycle_relator(base, r["word"], prefix=f"r{k}_"))
                continue
            Y = self.complex(_near(path, _field(r, "complex", path)))
            rels.append(self.map(_near(path, _field(r, "map", path)), Y, base))
        return CubicalPresentation(base, tuple(rels))

    def diagram_source(self, path: str | Path, presentation: str | Path | None = None):
        """Raw diagram description and the presentation it lives over."""
        path = Path(path)
        raw = read_json(path)
        if presentation is None:
            presentation = _near(path, _field(raw, "presentation", path))
        return raw, self.presentation(presentation)

    def graph(self, path: str | Path) -> LabeledGraph:
        return LabeledGraph.from_dict(read_json(path))


def _field(raw, key: str, path: Path):
    if not isinstance(raw, dict) or key not in raw:
        raise MalformedInput(f"{path}: missing field {key!r}")
    return raw[key]
