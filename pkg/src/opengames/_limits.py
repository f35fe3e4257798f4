"""Enumeration caps shared by the exhaustive kernels."""

from __future__ import annotations

import os

DEFAULT_CAP = 10**7
CAP_ENV = "OMEGA_GAMES_CAP"


class SearchCapExceeded(RuntimeError):
    """Raised instead of starting a search whose size exceeds the cap."""

    def __init__(self, size: int, cap: int, what: str = "search space") -> None:
        super().__init__(f"{what} has {size} candidates, cap is {cap}")
        self.size = size
        self.cap = cap
        self.what = what


def default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_CAP
    return int(raw)


def enforce(size: int, cap: int | None, what: str = "search space") -> None:
    limit = default_cap() if cap is None else cap
    if size > limit:
        raise SearchCapExceeded(size, limit, what)
