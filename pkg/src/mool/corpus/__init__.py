"""Bundled example programs and rejected mutants."""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

# programs that must check cleanly and run to completion
PROGRAMS = ("auction.mool", "selling_fragment.mool", "sync_counter.mool", "racy_counter.mool")

_EXPECT = re.compile(r"//\s*expect:\s*(\S+)")


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def mutants() -> list[tuple[str, str, str]]:
    """``(file name, expected error code, source)`` for every mutant."""
    out = []
    for p in sorted(path("mutants").glob("*.mool")):
        src = p.read_text(encoding="utf-8")
        out.append((p.name, _EXPECT.search(src).group(1), src))
    return out
