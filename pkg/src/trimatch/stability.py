"""Matchings, families, and blocking-triple detection.

A family is a directed 3-cycle (man -> woman -> dog -> man); a matching is a
set of pairwise disjoint families.  A triple blocks a matching when each of
its members strictly prefers the triple to their current situation; a
matching with no blocking triple is stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InvalidMatchingError, ParseError
from .model import AgentId, Gender, Instance

INFINITE_RANK = math.inf


@dataclass(frozen=True, order=True)
class Family:
    """A (man, woman, dog) cycle; equality is up to cyclic shift because the
    stored form is canonicalized to start at the man."""

    man: AgentId
    woman: AgentId
    dog: AgentId

    def __post_init__(self):
        if (self.man.gender, self.woman.gender, self.dog.gender) != (Gender.M, Gender.F, Gender.D):
            raise ValueError(f"not a man/woman/dog triple: {self}")

    @classmethod
    def from_cycle(cls, a: AgentId, b: AgentId, c: AgentId) -> "Family":
        """Canonicalize any rotation of a gender-cyclic triple."""
        by_gender = {v.gender: v for v in (a, b, c)}
        if len(by_gender) != 3:
            raise ValueError(f"triple {a},{b},{c} does not cover all genders")
        return cls(by_gender[Gender.M], by_gender[Gender.F], by_gender[Gender.D])

    @property
    def members(self) -> tuple[AgentId, AgentId, AgentId]:
        return (self.man, self.woman, self.dog)

    def partner(self, v: AgentId) -> AgentId:
        """Successor of v along the cycle."""
        if v == self.man:
            return self.woman
        if v == self.woman:
            return self.dog
        if v == self.dog:
            return self.man
        raise ValueError(f"{v} not in {self}")

    def __str__(self) -> str:
        return f"{self.man} {self.woman} {self.dog}"


class Matching:
    """A set of pairwise disjoint families; agents in none of them are single."""

    __slots__ = ("_families", "_partner")

    def __init__(self, families: Iterable[Family] = ()):
        fams = frozenset(families)
        partner: dict[AgentId, AgentId] = {}
        for fam in fams:
            for v in fam.members:
                if v in partner:
                    raise InvalidMatchingError(f"{v} appears in two families")
                partner[v] = fam.partner(v)
        self._families = fams
        self._partner = partner

    @property
    def families(self) -> frozenset[Family]:
        return self._families

    def mu(self, v: AgentId) -> AgentId:
        """v's partner along its family cycle; v itself when single."""
        return self._partner.get(v, v)

    def is_matched(self, v: AgentId) -> bool:
        return v in self._partner

    def agents(self) -> Iterator[AgentId]:
        return iter(self._partner)

    def __len__(self) -> int:
        return len(self._families)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self._families == other._families

    def __hash__(self):
        return hash(self._families)

    def __repr__(self) -> str:
        fams = ", ".join(str(f) for f in sorted(self._families))
        return f"Matching({{{fams}}})"


@dataclass(frozen=True)
class BlockingTriple:
    """A 3-cycle witnessing instability, with the rank comparisons that
    prove it: each member's rank into the cycle beats its current rank."""

    man: AgentId
    woman: AgentId
    dog: AgentId
    cycle_ranks: tuple[int, int, int]
    current_ranks: tuple[float, float, float]

    @property
    def family(self) -> Family:
        return Family(self.man, self.woman, self.dog)

    def __str__(self) -> str:
        return f"{self.man} {self.woman} {self.dog}"


def mu(matching: Matching, v: AgentId) -> AgentId:
    return matching.mu(v)


def rank_of(inst: Instance, matching: Matching, v: AgentId) -> int | float:
    """Rank of v's current partner; INFINITE_RANK when v is single."""
    w = matching.mu(v)
    if w == v:
        return INFINITE_RANK
    r = inst.rank(v, w)
    if r is None:
        raise InvalidMatchingError(f"matched pair ({v},{w}) is not an edge")
    return r


def validate_matching(inst: Instance, matching: Matching) -> None:
    """Raise InvalidMatchingError unless every family edge exists in inst."""
    for fam in matching.families:
        for v in fam.members:
            if not inst.has_agent(v):
                raise InvalidMatchingError(f"{v} is not an agent of the instance")
            if inst.rank(v, fam.partner(v)) is None:
                raise InvalidMatchingError(
                    f"family {fam}: edge ({v},{fam.partner(v)}) missing")


def enumerate_families(inst: Instance) -> tuple[Family, ...]:
    """All directed 3-cycles of the instance, in canonical sorted order.

    Cached on the instance (instances are immutable).
    """
    if inst._families is None:
        out = []
        for m in inst.agents_of(Gender.M):
            for f in inst.prefs(m):
                for d in inst.prefs(f):
                    if inst.rank(d, m) is not None:
                        out.append(Family(m, f, d))
        inst._families = tuple(sorted(out))
    return inst._families


def _iter_blocking(inst: Instance, matching: Matching) -> Iterator[BlockingTriple]:
    validate_matching(inst, matching)
    current: dict[AgentId, int | float] = {}
    for v in inst.agents():
        current[v] = rank_of(inst, matching, v)
    in_matching = matching.families
    for fam in enumerate_families(inst):
        if fam in in_matching:
            continue
        r1 = inst.rank(fam.man, fam.woman)
        if r1 >= current[fam.man]:
            continue
        r2 = inst.rank(fam.woman, fam.dog)
        if r2 >= current[fam.woman]:
            continue
        r3 = inst.rank(fam.dog, fam.man)
        if r3 >= current[fam.dog]:
            continue
        yield BlockingTriple(
            fam.man, fam.woman, fam.dog,
            (r1, r2, r3),
            (current[fam.man], current[fam.woman], current[fam.dog]),
        )


def blocking_triples(inst: Instance, matching: Matching) -> list[BlockingTriple]:
    """All blocking triples, in canonical family order."""
    return list(_iter_blocking(inst, matching))


def is_stable(inst: Instance, matching: Matching) -> bool:
    return next(_iter_blocking(inst, matching), None) is None


def is_complementable(inst: Instance, matching: Matching) -> Family | None:
    """A family whose three members are all single, if one exists."""
    for fam in enumerate_families(inst):
        if all(not matching.is_matched(v) for v in fam.members):
            return fam
    return None


# -- matching text format -----------------------------------------------------


def serialize_matching(matching: Matching) -> str:
    """One family per line, man first, sorted by man index."""
    lines = [str(fam) for fam in sorted(matching.families)]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_matching(text: str, inst: Instance | None = None) -> Matching:
    """Parse the matching text format; checks against inst when given."""
    families = []
    for no, raw in enumerate(text.splitlines(), start=1):
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        toks = ln.split()
        if len(toks) != 3:
            raise ParseError(f"expected 'M<i> F<j> D<k>', got {ln!r}", no)
        try:
            a, b, c = (AgentId.parse(t) for t in toks)
            fam = Family.from_cycle(a, b, c)
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
        families.append(fam)
    try:
        matching = Matching(families)
    except InvalidMatchingError as exc:
        raise ParseError(str(exc)) from None
    if inst is not None:
        validate_matching(inst, matching)
    return matching
