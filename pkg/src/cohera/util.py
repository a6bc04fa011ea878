"""Small shared helpers: union-find, the enumeration cap, seeded RNG streams."""

from __future__ import annotations

import hashlib
import os
import random

from .errors import CapacityError

DEFAULT_MAX_CELLS = 10 ** 6


def max_cells() -> int:
    raw = os.environ.get("COHERA_MAX_CELLS")
    if not raw:
        return DEFAULT_MAX_CELLS
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_MAX_CELLS
    return value if value > 0 else DEFAULT_MAX_CELLS


def check_capacity(count: int, what: str) -> None:
    cap = max_cells()
    if count > cap:
        raise CapacityError(f"{what} needs {count} cells, above the cap of {cap} (COHERA_MAX_CELLS)")


class UnionFind:
    def __init__(self, n=0):
        self.parent = list(range(n))

    def add(self):
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a):
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra
        return ra


def rng(seed: int, label: str) -> random.Random:
    """An independent ``random.Random`` stream for ``(seed, label)``."""
    digest = hashlib.blake2b(f"{int(seed)}:{label}".encode(), digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "big"))
