"""Hodge types and the jump pairing.

Jumps are stored in the effective convention: a filtered space of type lam has
``Fil^n`` spanned by the basis vectors whose jump r satisfies ``-r >= n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def d_multiset(lam: Iterable[int], lam2: Iterable[int]) -> int:
    """sum over r in lam of #{r' in lam2 : r' > r}."""
    lam2 = list(lam2)
    return sum(1 for r in lam for r2 in lam2 if r2 > r)


@dataclass(frozen=True)
class HodgeType:
    """An f x e array of multisets, entries[i][j] sorted ascending."""

    entries: tuple

    def __post_init__(self):
        ents = tuple(tuple(tuple(sorted(int(x) for x in ms)) for ms in row) for row in self.entries)
        if ents and len({len(r) for r in ents}) != 1:
            raise ValueError("ragged Hodge type")
        object.__setattr__(self, "entries", ents)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def union(self, other: "HodgeType") -> "HodgeType":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return HodgeType([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def to_json(self) -> list:
        return [[list(ms) for ms in row] for row in self.entries]

    @classmethod
    def from_json(cls, data: Sequence) -> "HodgeType":
        return cls(data)

    def __str__(self) -> str:
        return "; ".join(" ".join("{" + ",".join(map(str, ms)) + "}" for ms in row) for row in self.entries)


def d_pair(mu: HodgeType, mu2: HodgeType) -> int:
    if mu.shape != mu2.shape:
        raise ValueError(f"shape mismatch {mu.shape} vs {mu2.shape}")
    return sum(
        d_multiset(a, b) for r1, r2 in zip(mu.entries, mu2.entries) for a, b in zip(r1, r2)
    )
