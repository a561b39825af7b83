"""Presentation files.

Line-oriented text (``.grp`` or anything not ``.json``)::

    # Hopf link
    generators: x1 x2
    relator: [x1,x2]
    gamma: x1
    target: 0 0 1 0
    eta: 1
    seed: 3
    budget: 50

The same fields as a JSON object (``.json``): ``generators`` (list or
whitespace-separated string), ``relators``, ``gammas``, ``targets`` (lists of
four reals), ``eta``, ``seed``, ``budget``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .homology import Presentation
from .words import Word, WordParseError, parse_word

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class PresentationFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class PresentationFile:
    generators: list[str]
    relators: list[str] = field(default_factory=list)
    gammas: list[str] = field(default_factory=list)
    targets: list[list[float]] = field(default_factory=list)
    eta: list[int] | None = None
    seed: int | None = None
    budget: int | None = None
    max_letters: int | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.generators:
            raise PresentationFileError("no generators declared")
        if len(set(self.generators)) != len(self.generators):
            raise PresentationFileError("generator names must be unique")
        for g in self.generators:
            if not _NAME.match(g):
                raise PresentationFileError(f"bad generator name {g!r}")
        for t in self.targets:
            if len(t) != 4:
                raise PresentationFileError("a target is a quaternion: four reals")

    @property
    def n(self) -> int:
        return len(self.generators)

    def _word(self, text: str) -> Word:
        return parse_word(text, self.n, self.generators, self.max_letters)

    def presentation(self) -> Presentation:
        return Presentation(self.n, tuple(self._word(r) for r in self.relators), tuple(self.generators))

    def gamma_words(self) -> list[Word]:
        return [self._word(g) for g in self.gammas]


def _ints(text: str, line: int, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split()]
    except ValueError:
        raise PresentationFileError(f"{what} must be integers", line) from None


def parse_text(text: str, max_letters: int | None = None) -> PresentationFile:
    fields: dict = {"generators": None, "relators": [], "gammas": [], "targets": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip().lower(), value.strip()
        if not sep:
            raise PresentationFileError(f"expected 'key: value', got {line!r}", lineno)
        if key == "generators":
            if fields["generators"] is not None:
                raise PresentationFileError("generators declared twice", lineno)
            fields["generators"] = value.split()
        elif key in ("relator", "gamma"):
            fields[key + "s"].append((value, lineno))
        elif key == "target":
            try:
                fields["targets"].append([float(x) for x in value.split()])
            except ValueError:
                raise PresentationFileError("target must be four reals", lineno) from None
        elif key == "eta":
            fields["eta"] = _ints(value, lineno, "eta")
        elif key in ("seed", "budget"):
            vals = _ints(value, lineno, key)
            if len(vals) != 1 or vals[0] < 0:
                raise PresentationFileError(f"{key} must be one non-negative integer", lineno)
            fields[key] = vals[0]
        else:
            raise PresentationFileError(f"unknown key {key!r}", lineno)
    if fields["generators"] is None:
        raise PresentationFileError("missing 'generators:' line")
    pf = PresentationFile(
        fields["generators"],
        [v for v, _ in fields["relators"]],
        [v for v, _ in fields["gammas"]],
        fields["targets"],
        fields.get("eta"),
        fields.get("seed"),
        fields.get("budget"),
        max_letters,
    )
    # surface word syntax errors with their line numbers
    for v, lineno in fields["relators"] + fields["gammas"]:
        try:
            pf._word(v)
        except WordParseError as exc:
            raise PresentationFileError(str(exc), lineno) from None
    return pf


def parse_json(text: str, max_letters: int | None = None) -> PresentationFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationFileError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise PresentationFileError("top level must be an object")
    gens = data.get("generators")
    if isinstance(gens, str):
        gens = gens.split()
    pf = PresentationFile(
        list(gens or []),
        list(data.get("relators", [])),
        list(data.get("gammas", [])),
        [list(map(float, t)) for t in data.get("targets", [])],
        data.get("eta"),
        data.get("seed"),
        data.get("budget"),
        max_letters,
    )
    for v in pf.relators + pf.gammas:
        try:
            pf._word(v)
        except WordParseError as exc:
            raise PresentationFileError(str(exc)) from None
    return pf


def load(path: str | Path, max_letters: int | None = None) -> PresentationFile:
    """Read a presentation file; OSError propagates for I/O problems."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    parse = parse_json if path.suffix.lower() == ".json" else parse_text
    return parse(text, max_letters)
