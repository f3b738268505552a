"""Reading, writing, and naming set families.

File format: ``{"n": 4, "sets": [[1, 2], [3]]}`` with 1-based elements.
Specifiers: ``all``, ``level:j``, ``middle:j`` (``middle:j,upper`` for the
mirror block), ``random:p,seed``, ``file:PATH``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import UsageError
from .lattice import SetFamily, _check_n, full_lattice, level, mask_of, random_family


def family_to_dict(fam: SetFamily) -> dict:
    return {"n": fam.n, "sets": fam.sets()}


def family_from_dict(data) -> SetFamily:
    if not isinstance(data, dict) or "n" not in data or "sets" not in data:
        raise UsageError('family JSON must be an object with keys "n" and "sets"')
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise UsageError(f'"n" must be an integer, got {n!r}')
    _check_n(n)
    if not isinstance(data["sets"], list):
        raise UsageError('"sets" must be a list of element lists')
    masks = []
    for s in data["sets"]:
        if not isinstance(s, list):
            raise UsageError(f"each set must be a list of elements, got {s!r}")
        masks.append(mask_of(s, n))
    return SetFamily(n, masks)


def dumps(fam: SetFamily) -> str:
    return json.dumps(family_to_dict(fam))


def loads(text: str) -> SetFamily:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed family JSON: {exc}") from None
    return family_from_dict(data)


def read_family(path) -> SetFamily:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read family file {path}: {exc}") from None
    return loads(text)


def write_family(fam: SetFamily, path) -> None:
    Path(path).write_text(dumps(fam) + "\n")


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{what} must be an integer, got {text!r}") from None


def parse_family(spec: str, n: int | None) -> SetFamily:
    """Build a family from a specifier string; ``n`` is required except for ``file:``."""
    kind, _, arg = spec.partition(":")
    if kind == "file":
        fam = read_family(arg)
        if n is not None and fam.n != n:
            raise UsageError(f"family file has n={fam.n} but --n {n} was given")
        return fam
    if n is None:
        raise UsageError(f"family specifier {spec!r} needs a ground size n")
    _check_n(n)
    if kind == "all" and not arg:
        return full_lattice(n)
    if kind == "level":
        return level(n, _int(arg, "level"))
    if kind == "middle":
        from .constructions import middle_levels

        count, _, side = arg.partition(",")
        if side not in ("", "lower", "upper"):
            raise UsageError(f"middle-level side must be 'lower' or 'upper', got {side!r}")
        return middle_levels(n, _int(count, "number of levels"), upper=side == "upper")
    if kind == "random":
        p_text, _, seed_text = arg.partition(",")
        try:
            p = float(p_text)
        except ValueError:
            raise UsageError(f"random inclusion probability must be a number, got {p_text!r}") from None
        return random_family(n, p, _int(seed_text or "0", "seed"))
    raise UsageError(f"unknown family specifier {spec!r}")
