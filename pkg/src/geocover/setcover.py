"""Set cover over the canonical translates: greedy and exact."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import CapExceeded, UncoveredPoint

EXACT_CAP = 25


@dataclass(frozen=True)
class CoverInstance:
    n: int
    sets: tuple          # frozensets over range(n)
    source: tuple        # translate index per set

    @property
    def masks(self) -> list[int]:
        return [sum(1 << i for i in s) for s in self.sets]


@dataclass(frozen=True)
class CoverSolution:
    chosen: tuple
    solver: str

    @property
    def cardinality(self) -> int:
        return len(self.chosen)

    def as_dict(self) -> dict:
        return {"chosen": list(self.chosen), "cardinality": self.cardinality, "solver": self.solver}


def to_cover_instance(translates: Iterable, n: int) -> CoverInstance:
    """Accepts CanonicalTranslate objects or plain index sets."""
    sets = [frozenset(getattr(t, "covered", t)) for t in translates]
    union = frozenset().union(*sets)
    missing = sorted(set(range(n)) - union)
    if missing:
        raise UncoveredPoint(f"points {missing[:10]} are not covered by any translate")
    return CoverInstance(n, tuple(sets), tuple(range(len(sets))))


def _popcount(x: int) -> int:
    return bin(x).count("1")


def greedy_cover(inst: CoverInstance) -> CoverSolution:
    masks = inst.masks
    left = (1 << inst.n) - 1
    chosen = []
    while left:
        gains = [_popcount(m & left) for m in masks]
        best = max(range(len(masks)), key=lambda k: (gains[k], -k))
        if gains[best] == 0:
            raise UncoveredPoint("instance has uncoverable elements")
        chosen.append(best)
        left &= ~masks[best]
    return CoverSolution(tuple(chosen), "greedy")


def exact_cover(inst: CoverInstance, cap: int = EXACT_CAP) -> CoverSolution:
    """Minimum cover by branch and bound on the lowest uncovered element."""
    if len(inst.sets) > cap:
        raise CapExceeded(f"exact cover limited to {cap} sets, got {len(inst.sets)}")
    masks = inst.masks
    full = (1 << inst.n) - 1
    containing = [[k for k, m in enumerate(masks) if m >> e & 1] for e in range(inst.n)]
    best = list(greedy_cover(inst).chosen)
    biggest = max((_popcount(m) for m in masks), default=1)

    def search(covered: int, picked: list):
        nonlocal best
        if covered == full:
            if len(picked) < len(best):
                best = picked[:]
            return
        rest = _popcount(full & ~covered)
        if len(picked) + -(-rest // biggest) >= len(best):
            return
        e = (~covered & full & -(~covered & full)).bit_length() - 1
        for k in sorted(containing[e], key=lambda k: (-_popcount(masks[k] & ~covered), k)):
            picked.append(k)
            search(covered | masks[k], picked)
            picked.pop()

    search(0, [])
    return CoverSolution(tuple(sorted(best)), "exact")
