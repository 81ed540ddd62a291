"""Persistence diagrams: representation, validation, and CSV round-trip.

A diagram is a finite multiset of proper points (birth, death) with
birth < death, each carrying a positive integer multiplicity.  Points
whose class never dies are not stored; parsing records how many such
rows were dropped in ``essential_count``.

File format: CSV rows ``birth,death,multiplicity`` (multiplicity
optional, default 1), ``#`` comment lines allowed, UTF-8, LF endings.
An infinite death is written as the literal ``inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True, order=True)
class PersistencePoint:
    """A proper diagram point: born at ``birth``, dead at ``death``."""

    birth: float
    death: float
    multiplicity: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.birth) and math.isfinite(self.death)):
            raise ValueError(f"non-finite point ({self.birth}, {self.death})")
        if not self.birth < self.death:
            raise ValueError(
                f"point ({self.birth}, {self.death}) is not strictly above the diagonal"
            )
        if not isinstance(self.multiplicity, int) or self.multiplicity < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {self.multiplicity}")

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """Immutable multiset of proper points.

    Coincident (birth, death) pairs are merged on construction by summing
    multiplicities, so no two stored points share coordinates.  Equality
    of coordinates is exact floating equality: inputs at different float
    values stay distinct, no tolerance is involved.
    """

    points: tuple[PersistencePoint, ...] = ()
    essential_count: int = 0

    def __post_init__(self) -> None:
        if self.essential_count < 0:
            raise ValueError("essential_count must be non-negative")
        merged: dict[tuple[float, float], int] = {}
        for p in self.points:
            key = (p.birth, p.death)
            merged[key] = merged.get(key, 0) + p.multiplicity
        pts = tuple(
            PersistencePoint(b, d, m) for (b, d), m in sorted(merged.items())
        )
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple],
        essential_count: int = 0,
    ) -> "PersistenceDiagram":
        """Build from (birth, death) or (birth, death, multiplicity) tuples."""
        pts = []
        for pair in pairs:
            if len(pair) == 2:
                b, d = pair
                pts.append(PersistencePoint(float(b), float(d)))
            else:
                b, d, m = pair
                pts.append(PersistencePoint(float(b), float(d), int(m)))
        return cls(tuple(pts), essential_count)

    def total_multiplicity(self) -> int:
        """Number of proper points counted with multiplicity."""
        return sum(p.multiplicity for p in self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[PersistencePoint]:
        return iter(self.points)


def parse_diagram(text: str) -> PersistenceDiagram:
    """Parse diagram CSV.

    Rows with an ``inf`` death are counted into ``essential_count`` and
    dropped; rows with equal (birth, death) are merged by summing
    multiplicities.  Raises ValueError on malformed rows, diagonal or
    below-diagonal points, non-positive multiplicities, and any other
    non-finite value.
    """
    points: list[PersistencePoint] = []
    essential = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 2 or 3 fields, got {len(fields)}")
        try:
            birth = float(fields[0])
            death = float(fields[1])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed number in {line!r}") from None
        if len(fields) == 3:
            try:
                mult = int(fields[2])
            except ValueError:
                raise ValueError(f"line {lineno}: malformed multiplicity {fields[2]!r}") from None
        else:
            mult = 1
        if mult < 1:
            raise ValueError(f"line {lineno}: multiplicity must be >= 1, got {mult}")
        if math.isinf(death) and death > 0:
            if not math.isfinite(birth):
                raise ValueError(f"line {lineno}: non-finite birth {birth}")
            essential += mult
            continue
        if not (math.isfinite(birth) and math.isfinite(death)):
            raise ValueError(f"line {lineno}: non-finite point ({birth}, {death})")
        if not birth < death:
            raise ValueError(
                f"line {lineno}: point ({birth}, {death}) not strictly above the diagonal"
            )
        points.append(PersistencePoint(birth, death, mult))
    return PersistenceDiagram(tuple(points), essential)


def serialize_diagram(diagram: PersistenceDiagram) -> str:
    """Serialize to CSV, sorted by (birth, death).

    Uses shortest round-trip float formatting, so
    ``parse_diagram(serialize_diagram(d)) == d`` exactly.
    """
    lines = ["# birth,death,multiplicity"]
    for p in diagram.points:
        lines.append(f"{p.birth!r},{p.death!r},{p.multiplicity}")
    if diagram.essential_count:
        # Individual birth levels of never-dying classes are not retained,
        # only their count; 0 is written as a placeholder birth.
        lines.append(f"0,inf,{diagram.essential_count}")
    return "\n".join(lines) + "\n"
