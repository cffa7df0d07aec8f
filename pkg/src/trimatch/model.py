"""Tripartite ranked-preference instances (complete 3DSM or incomplete 3DSMI).

An instance is a directed graph on three gender classes M, F, D whose edges
run cyclically M -> F -> D -> M.  Every edge carries a rank; for a valid
instance the ranks out of each agent with out-degree k are exactly 1..k
(rank 1 is the most preferred target).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    InvalidInstanceError,
    IsolatedAgentError,
    ParseError,
    UnknownAgentError,
)


class Gender(Enum):
    M = "M"
    F = "F"
    D = "D"

    @property
    def successor(self) -> "Gender":
        return _SUCCESSOR[self]

    @property
    def order(self) -> int:
        return _ORDER[self]

    def __str__(self) -> str:
        return self.value


_SUCCESSOR = {Gender.M: Gender.F, Gender.F: Gender.D, Gender.D: Gender.M}
_ORDER = {Gender.M: 0, Gender.F: 1, Gender.D: 2}
GENDERS = (Gender.M, Gender.F, Gender.D)


@dataclass(frozen=True, order=True)
class AgentId:
    """A vertex: gender class plus a 1-based index within the class."""

    sort_key: tuple[int, int]

    def __init__(self, gender: Gender, index: int):
        if index < 1:
            raise ValueError(f"agent index must be >= 1, got {index}")
        object.__setattr__(self, "sort_key", (gender.order, index))

    @property
    def gender(self) -> Gender:
        return GENDERS[self.sort_key[0]]

    @property
    def index(self) -> int:
        return self.sort_key[1]

    @classmethod
    def parse(cls, token: str) -> "AgentId":
        if len(token) < 2 or token[0] not in "MFD" or not token[1:].isdigit():
            raise ValueError(f"bad agent token {token!r}")
        return cls(Gender(token[0]), int(token[1:]))

    def __str__(self) -> str:
        return f"{self.gender.value}{self.index}"

    def __repr__(self) -> str:
        return f"AgentId({self})"


def agent(token: str) -> AgentId:
    """Shorthand: ``agent("M1")`` -> AgentId(Gender.M, 1)."""
    return AgentId.parse(token)


@dataclass(frozen=True)
class Violation:
    agent: AgentId
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"{v.agent}: {v.kind}: {v.detail}" for v in self.violations)


class Instance:
    """Immutable preference digraph.

    ``counts`` gives the number of agents per gender class; classes may be
    unequal mid-construction, in which case ``n`` is the size after virtual
    padding with isolated agents.  Edges are stored as (target, rank) pairs
    so that malformed rank assignments remain representable for validate().
    """

    __slots__ = ("_counts", "_adj", "_rank", "_families")

    def __init__(self, counts: tuple[int, int, int],
                 adj: dict[AgentId, tuple[tuple[AgentId, int], ...]]):
        self._counts = counts
        self._adj = adj
        self._rank: dict[AgentId, dict[AgentId, int]] = {
            v: {w: r for w, r in edges} for v, edges in adj.items()
        }
        self._families = None  # cache used by stability.enumerate_families

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_prefs(cls, counts: int | tuple[int, int, int],
                   prefs: Mapping[AgentId, Sequence[AgentId]]) -> "Instance":
        """Build from rank-ordered preference lists (position k = rank k+1)."""
        counts = _normalize_counts(counts)
        edges = []
        for v, targets in prefs.items():
            for pos, w in enumerate(targets):
                edges.append((v, w, pos + 1))
        return cls.from_ranked_edges(counts, edges)

    @classmethod
    def from_ranked_edges(cls, counts: int | tuple[int, int, int],
                          edges: Iterable[tuple[AgentId, AgentId, int]]) -> "Instance":
        """Build from explicit (source, target, rank) triples.

        Rank assignments are taken verbatim, valid or not; out-of-range
        agents are rejected outright.
        """
        counts = _normalize_counts(counts)
        adj: dict[AgentId, list[tuple[AgentId, int]]] = {}
        for v, w, r in edges:
            _check_member(counts, v)
            _check_member(counts, w)
            if r < 1:
                raise ValueError(f"rank must be positive, got {r} on ({v},{w})")
            adj.setdefault(v, []).append((w, r))
        full = {}
        for g in GENDERS:
            for i in range(1, counts[g.order] + 1):
                v = AgentId(g, i)
                pairs = adj.get(v, [])
                pairs.sort(key=lambda p: (p[1], p[0]))
                full[v] = tuple(pairs)
        return cls(counts, full)

    # -- basic accessors ---------------------------------------------------

    @property
    def counts(self) -> tuple[int, int, int]:
        return self._counts

    @property
    def n(self) -> int:
        """Problem size: agents per gender after virtual padding."""
        return max(self._counts)

    def agents(self) -> Iterator[AgentId]:
        for g in GENDERS:
            for i in range(1, self._counts[g.order] + 1):
                yield AgentId(g, i)

    def agents_of(self, gender: Gender) -> list[AgentId]:
        return [AgentId(gender, i) for i in range(1, self._counts[gender.order] + 1)]

    def has_agent(self, v: AgentId) -> bool:
        return 1 <= v.index <= self._counts[v.gender.order]

    def prefs(self, v: AgentId) -> tuple[AgentId, ...]:
        """Targets of v in rank order."""
        self._require(v)
        return tuple(w for w, _ in self._adj[v])

    def ranked_edges(self, v: AgentId) -> tuple[tuple[AgentId, int], ...]:
        self._require(v)
        return self._adj[v]

    def all_edges(self) -> Iterator[tuple[AgentId, AgentId, int]]:
        for v in self.agents():
            for w, r in self._adj[v]:
                yield v, w, r

    def num_edges(self) -> int:
        return sum(len(e) for e in self._adj.values())

    def out_degree(self, v: AgentId) -> int:
        self._require(v)
        return len(self._adj[v])

    def rank(self, v: AgentId, w: AgentId) -> int | None:
        """r(v, w), or None when the edge is absent."""
        self._require(v)
        self._require(w)
        return self._rank[v].get(w)

    def rho(self, v: AgentId) -> int:
        """Largest rank among v's outgoing edges."""
        self._require(v)
        if not self._adj[v]:
            raise IsolatedAgentError(f"{v} has no outgoing edges")
        return max(r for _, r in self._adj[v])

    def is_complete(self) -> bool:
        n = self.n
        if any(c != n for c in self._counts):
            return False
        return all(len(self._adj[v]) == n for v in self.agents())

    def padded(self) -> "Instance":
        """Equal-size version of this instance (isolated agents appended)."""
        n = self.n
        if self._counts == (n, n, n):
            return self
        return Instance.from_ranked_edges((n, n, n), self.all_edges())

    def _require(self, v: AgentId) -> None:
        if not self.has_agent(v):
            raise UnknownAgentError(f"{v} is not an agent of this instance")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self._counts == other._counts and self._adj == other._adj

    def __hash__(self):
        return hash((self._counts, tuple(sorted(self._adj.items()))))

    def __repr__(self) -> str:
        kind = "complete" if self.is_complete() else "incomplete"
        return f"Instance(n={self.n}, counts={self._counts}, edges={self.num_edges()}, {kind})"


def _normalize_counts(counts: int | tuple[int, int, int]) -> tuple[int, int, int]:
    if isinstance(counts, int):
        counts = (counts, counts, counts)
    nm, nf, nd = counts
    if min(nm, nf, nd) < 0:
        raise ValueError(f"negative class size in {counts}")
    return (nm, nf, nd)


def _check_member(counts: tuple[int, int, int], v: AgentId) -> None:
    if not (1 <= v.index <= counts[v.gender.order]):
        raise UnknownAgentError(f"{v} out of range for counts {counts}")


# -- validation -------------------------------------------------------------


def validate(inst: Instance) -> ValidationReport:
    """Check edge orientation, duplicate targets, and rank bijectivity."""
    violations = []
    for v in inst.agents():
        edges = inst.ranked_edges(v)
        succ = v.gender.successor
        seen: set[AgentId] = set()
        for w, _ in edges:
            if w.gender is not succ:
                violations.append(Violation(
                    v, "orientation", f"edge to {w} is not {v.gender}->{succ}"))
            if w in seen:
                violations.append(Violation(v, "duplicate-target", f"{w} listed twice"))
            seen.add(w)
        ranks = sorted(r for _, r in edges)
        if ranks != list(range(1, len(edges) + 1)):
            violations.append(Violation(
                v, "rank-set", f"ranks {ranks} are not {{1..{len(edges)}}}"))
    return ValidationReport(tuple(violations))


# -- rank completion ---------------------------------------------------------

COMPLETION_POLICIES = ("lexicographic", "shuffle")


def complete_instance(inst: Instance, policy: str = "lexicographic",
                      seed: int | None = None) -> Instance:
    """Extend every preference list to all n targets, preserving existing ranks.

    Missing targets are appended at ranks k+1..n: in ascending index order
    under the "lexicographic" policy, or in seeded random order under
    "shuffle".  Classes are padded to equal size first.  Deterministic for a
    given (instance, policy, seed).
    """
    if policy not in COMPLETION_POLICIES:
        raise ValueError(f"unknown completion policy {policy!r}")
    if policy == "shuffle" and seed is None:
        raise ValueError("shuffle policy requires a seed")
    report = validate(inst)
    if not report.ok:
        raise InvalidInstanceError(f"cannot complete invalid instance:\n{report}")

    inst = inst.padded()
    n = inst.n
    rng = random.Random(seed)
    prefs: dict[AgentId, list[AgentId]] = {}
    for v in inst.agents():
        existing = list(inst.prefs(v))
        have = set(existing)
        missing = [w for w in inst.agents_of(v.gender.successor) if w not in have]
        if policy == "shuffle":
            rng.shuffle(missing)
        prefs[v] = existing + missing
    return Instance.from_prefs((n, n, n), prefs)


# -- text format --------------------------------------------------------------

_HEADER_MAGIC = "3dsm"


def serialize_instance(inst: Instance) -> str:
    """Canonical text form: header, then one line per agent in M/F/D order.

    Classes are padded to equal size; padded agents serialize with empty
    lists and occupy the highest indices.
    """
    inst = inst.padded()
    kind = "complete" if inst.is_complete() else "incomplete"
    lines = [f"{_HEADER_MAGIC} {inst.n} {kind}"]
    for v in inst.agents():
        targets = " ".join(str(w) for w in inst.prefs(v))
        lines.append(f"{v}:" + (f" {targets}" if targets else ""))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    """Parse the instance text format; raises ParseError with a line number."""
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty input")

    no, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != _HEADER_MAGIC:
        raise ParseError(f"malformed header {header!r}", no)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"bad size {parts[1]!r}", no) from None
    if n < 1:
        raise ParseError(f"size must be >= 1, got {n}", no)
    if parts[2] not in ("complete", "incomplete"):
        raise ParseError(f"expected 'complete' or 'incomplete', got {parts[2]!r}", no)
    want_complete = parts[2] == "complete"

    expected = [AgentId(g, i) for g in GENDERS for i in range(1, n + 1)]
    body = lines[1:]
    if len(body) < len(expected):
        raise ParseError(f"missing agent line for {expected[len(body)]}",
                         body[-1][0] if body else no)
    if len(body) > len(expected):
        raise ParseError(f"unexpected extra line {body[len(expected)][1]!r}",
                         body[len(expected)][0])

    prefs: dict[AgentId, list[AgentId]] = {}
    for (no, ln), want in zip(body, expected):
        head, sep, rest = ln.partition(":")
        if not sep:
            raise ParseError(f"expected '<agent>: ...', got {ln!r}", no)
        try:
            got = AgentId.parse(head.strip())
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
        if got != want:
            raise ParseError(f"expected line for {want}, got {got}", no)
        targets = []
        for tok in rest.split():
            try:
                w = AgentId.parse(tok)
            except ValueError as exc:
                raise ParseError(str(exc), no) from None
            if w.gender is not want.gender.successor:
                raise ParseError(f"target {w} has wrong gender for {want}", no)
            if w.index > n:
                raise ParseError(f"target {w} out of range (n={n})", no)
            if w in targets:
                raise ParseError(f"duplicate target {w}", no)
            targets.append(w)
        if want_complete and len(targets) != n:
            raise ParseError(f"incomplete list for {want} in a complete instance", no)
        prefs[want] = targets
    return Instance.from_prefs(n, prefs)


# -- dense views ---------------------------------------------------------------


def rank_matrices(inst: Instance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(r_mf, r_fd, r_dm) as int32 arrays for a complete instance.

    r_mf[i, j] is the rank of F(j+1) in M(i+1)'s list, and cyclically for
    the other two.
    """
    if not inst.is_complete():
        raise InvalidInstanceError("rank matrices require a complete instance")
    n = inst.n
    out = []
    for g in GENDERS:
        mat = np.empty((n, n), dtype=np.int32)
        for i in range(1, n + 1):
            for pos, w in enumerate(inst.prefs(AgentId(g, i))):
                mat[i - 1, w.index - 1] = pos + 1
        out.append(mat)
    return out[0], out[1], out[2]
