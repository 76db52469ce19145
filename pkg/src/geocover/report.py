"""Common result record of the discretization algorithms."""

from __future__ import annotations

from dataclasses import dataclass, field

from .inverses import IntersectionStats


@dataclass
class Report:
    translates: list          # CanonicalTranslate, sorted by covered set
    stats: IntersectionStats
    event_count: int          # sweep events, or half-edge steps for the traversal
    face_count: int           # bounded faces of the arrangement
    extra: dict = field(default_factory=dict)

    def families(self) -> set:
        return {t.covered for t in self.translates}
