"""Time-tagged node names, rendered ``base@slice``."""

from __future__ import annotations

from typing import NamedTuple

from .core import ModelError


class TimedName(NamedTuple):
    base: str
    slice: int

    def __str__(self) -> str:
        return f"{self.base}@{self.slice}"

    @classmethod
    def parse(cls, text: str) -> TimedName:
        base, sep, idx = text.rpartition("@")
        if not sep or not base or "@" in base or not idx.isdigit():
            raise ModelError(f"{text!r} is not of the form base@slice")
        return cls(base, int(idx))


def timed(base: str, slice_: int) -> str:
    if "@" in base:
        raise ModelError(f"base name {base!r} may not contain '@'")
    if slice_ < 0:
        raise ModelError("slice index must be non-negative")
    return f"{base}@{slice_}"


def base_of(name: str) -> str:
    return TimedName.parse(name).base


def slice_of(name: str) -> int:
    return TimedName.parse(name).slice
