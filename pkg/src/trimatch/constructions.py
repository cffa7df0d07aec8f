"""Builders for the package's concrete instances and gadgets.

Two gadgets are provided.  The single-anchor gadget (``lemma1``) adds 7
fresh vertices around one anchor x and forces any stable matching to either
absorb x into the gadget or match x strictly better than rank r'_x.  The
two-anchor gadget (``lemma2``) serves two anchors x, z of the same gender
with 8 fresh vertices and the analogous alternatives.

On top of these:

* ``appendix_instance`` is the built-in size-3 incomplete instance with no
  stable matching (the smallest known);
* ``theorem1_compose`` expands any unsolvable incomplete instance of size n
  into a complete instance of size 8n that is again unsolvable;
* ``theorem2_instance`` is the hand-tuned complete instance of size 18 with
  no stable matching, built from the size-3 instance with three single-anchor
  and three two-anchor gadgets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConstructionError, ProjectionError
from .model import (
    AgentId,
    GENDERS,
    Gender,
    Instance,
    complete_instance,
    parse_instance,
    serialize_instance,
    validate,
)
from .stability import Family, Matching

# Role tables.  Ranks are absolute except for anchor edges, whose rank is
# r' + offset.  Role genders are offsets from the anchor gender: the anchor
# x (and z, s, e) keep it, c and d take the successor, a/b/t/f the one after.

ROLE_GENDER_OFFSET = {"x": 0, "z": 0, "e": 0, "s": 0,
                      "c": 1, "d": 1,
                      "a": 2, "b": 2, "t": 2, "f": 2}

LEMMA1_ROLES = ("a", "b", "c", "d", "e", "s", "t")
LEMMA2_ROLES = ("a", "b", "c", "d", "e", "f", "s", "t")

LEMMA1_VARIANTS = ("standard", "sparse-t")
LEMMA2_VARIANTS = ("caption", "figure")


def lemma1_edges(variant: str = "standard") -> tuple[tuple[str, str, int], ...]:
    """Fixed-rank role edges of the single-anchor gadget."""
    if variant not in LEMMA1_VARIANTS:
        raise ValueError(f"unknown single-anchor gadget variant {variant!r}")
    edges = [
        ("e", "c", 1), ("c", "a", 1), ("d", "a", 1), ("a", "x", 1),
        ("b", "x", 1), ("t", "e", 1), ("s", "d", 1),
        ("t", "s", 2), ("e", "d", 2), ("c", "b", 2), ("d", "b", 2),
        ("a", "e", 2), ("b", "e", 2),
        ("b", "s", 3), ("d", "t", 3),
    ]
    if variant == "sparse-t":
        # Lighter flavor: drop (t,e) and promote (t,s) to rank 1.
        edges.remove(("t", "e", 1))
        edges.remove(("t", "s", 2))
        edges.append(("t", "s", 1))
    return tuple(edges)


def lemma2_edges(variant: str = "caption") -> tuple[tuple[str, str, int], ...]:
    """Fixed-rank role edges of the two-anchor gadget.

    The "figure" variant swaps the relative order of s and e in b's list
    ((b,s)=3, (b,e)=4); "caption" is the default and the proven one.
    """
    if variant not in LEMMA2_VARIANTS:
        raise ValueError(f"unknown two-anchor gadget variant {variant!r}")
    edges = [
        ("e", "c", 1), ("c", "a", 1), ("d", "a", 1), ("a", "x", 1),
        ("b", "x", 1), ("t", "e", 1), ("s", "d", 1), ("f", "e", 1),
        ("t", "s", 2), ("e", "d", 2), ("c", "b", 2), ("d", "b", 2),
        ("a", "z", 2), ("b", "z", 2),
        ("a", "e", 3), ("d", "t", 3), ("c", "f", 3),
    ]
    if variant == "caption":
        edges += [("b", "e", 3), ("b", "s", 4)]
    else:
        edges += [("b", "s", 3), ("b", "e", 4)]
    return tuple(edges)


# Anchor edges: (role, rank offset from the anchor's r').
ANCHOR_EDGE_OFFSETS = (("c", 0), ("d", 1))


@dataclass(frozen=True)
class GadgetAttachment:
    """Record of one gadget attachment: fresh vertices and all added edges."""

    kind: str  # "lemma1" | "lemma2"
    anchor_x: AgentId
    r_prime_x: int
    fresh: dict[str, AgentId]
    edges: tuple[tuple[AgentId, AgentId, int], ...]
    variant: str
    anchor_z: AgentId | None = None
    r_prime_z: int | None = None

    def absorb_pair(self) -> tuple[AgentId, AgentId]:
        """(c, d): the gadget vertices an absorbed anchor is matched to."""
        return (self.fresh["c"], self.fresh["d"])

    def second_tier(self) -> frozenset[AgentId]:
        """Partners of c/d that witness absorption of the anchor."""
        roles = ("a", "b", "t") if self.kind == "lemma1" else ("a", "b", "f", "t")
        return frozenset(self.fresh[r] for r in roles)

    def anchors(self) -> tuple[tuple[AgentId, int], ...]:
        out = [(self.anchor_x, self.r_prime_x)]
        if self.anchor_z is not None:
            out.append((self.anchor_z, self.r_prime_z))
        return tuple(out)


@dataclass(frozen=True)
class ConstructionTrace:
    """Everything needed to reproduce a composed instance byte-for-byte."""

    host_label: str
    host_text: str
    attachments: tuple[GadgetAttachment, ...]
    policy: str
    seed: int | None

    def comment_block(self) -> str:
        lines = [f"# construction: {self.host_label}",
                 f"# completion: policy={self.policy} seed={self.seed}"]
        for att in self.attachments:
            anchors = " ".join(f"{'xz'[i]}={v}:r'={r}"
                               for i, (v, r) in enumerate(att.anchors()))
            fresh = " ".join(f"{role}={v}" for role, v in sorted(att.fresh.items()))
            lines.append(f"# attach {att.kind}[{att.variant}] {anchors} {fresh}")
        return "\n".join(lines) + "\n"


def _check_anchor(inst: Instance, x: AgentId, r_prime: int) -> None:
    if not inst.has_agent(x):
        raise ConstructionError(f"anchor {x} is not an agent of the instance")
    if r_prime < 1:
        raise ConstructionError(f"r' must be >= 1, got {r_prime}")
    if inst.out_degree(x) and inst.rho(x) >= r_prime:
        raise ConstructionError(
            f"rank collision at {x}: existing rank {inst.rho(x)} >= r'={r_prime}")


def _attach(inst: Instance, kind: str, anchors: tuple[tuple[AgentId, int], ...],
            roles: tuple[str, ...], role_edges: tuple[tuple[str, str, int], ...],
            variant: str) -> tuple[Instance, GadgetAttachment]:
    for x, rp in anchors:
        _check_anchor(inst, x, rp)
    gamma = anchors[0][0].gender

    counts = list(inst.counts)
    fresh: dict[str, AgentId] = {}
    for role in roles:
        g = GENDERS[(gamma.order + ROLE_GENDER_OFFSET[role]) % 3]
        counts[g.order] += 1
        fresh[role] = AgentId(g, counts[g.order])

    def resolve(role: str) -> AgentId:
        if role == "x":
            return anchors[0][0]
        if role == "z":
            return anchors[1][0]
        return fresh[role]

    new_edges = [(resolve(a), resolve(b), r) for a, b, r in role_edges]
    for x, rp in anchors:
        for target_role, off in ANCHOR_EDGE_OFFSETS:
            new_edges.append((x, fresh[target_role], rp + off))

    att = GadgetAttachment(
        kind=kind,
        anchor_x=anchors[0][0], r_prime_x=anchors[0][1],
        anchor_z=anchors[1][0] if len(anchors) > 1 else None,
        r_prime_z=anchors[1][1] if len(anchors) > 1 else None,
        fresh=fresh, edges=tuple(new_edges), variant=variant,
    )
    enlarged = Instance.from_ranked_edges(
        tuple(counts), list(inst.all_edges()) + new_edges)
    return enlarged, att


def attach_lemma1_gadget(inst: Instance, x: AgentId, r_prime: int,
                         variant: str = "standard") -> tuple[Instance, GadgetAttachment]:
    """Attach the single-anchor gadget at x with anchor ranks r', r'+1."""
    return _attach(inst, "lemma1", ((x, r_prime),),
                   LEMMA1_ROLES, lemma1_edges(variant), variant)


def attach_lemma2_gadget(inst: Instance, x: AgentId, z: AgentId,
                         r_prime_x: int, r_prime_z: int,
                         variant: str = "caption") -> tuple[Instance, GadgetAttachment]:
    """Attach the two-anchor gadget at same-gender anchors x and z."""
    if x.gender is not z.gender:
        raise ConstructionError(f"anchors {x} and {z} differ in gender")
    if x == z:
        raise ConstructionError(f"anchors must be distinct, got {x} twice")
    return _attach(inst, "lemma2", ((x, r_prime_x), (z, r_prime_z)),
                   LEMMA2_ROLES, lemma2_edges(variant), variant)


# -- the built-in size-3 unsolvable incomplete instance ------------------------

# Vertices are numbered 0..8; v mod 3 picks the gender (0 -> M, 1 -> F,
# 2 -> D) and v // 3 + 1 the index.
_APPENDIX_EDGES = (
    (0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 0, 1),
    (6, 4, 1), (7, 8, 1), (8, 0, 1),
    (4, 8, 2), (8, 6, 2), (0, 7, 2), (1, 5, 2), (5, 3, 2), (3, 1, 2),
    (4, 2, 3),
)


def appendix_agent(v: int) -> AgentId:
    """Map a 0..8 vertex number of the built-in instance to an AgentId."""
    if not 0 <= v <= 8:
        raise ValueError(f"vertex number must be 0..8, got {v}")
    return AgentId(GENDERS[v % 3], v // 3 + 1)


def appendix_vertex(a: AgentId) -> int:
    """Inverse of appendix_agent."""
    v = (a.index - 1) * 3 + a.gender.order
    if not 0 <= v <= 8:
        raise ValueError(f"{a} is not a vertex of the size-3 instance")
    return v


def appendix_family(u: int, v: int, w: int) -> Family:
    """Family from a 3-cycle given in vertex numbers (any rotation)."""
    return Family.from_cycle(appendix_agent(u), appendix_agent(v), appendix_agent(w))


def appendix_instance() -> Instance:
    """The size-3 incomplete instance with no stable matching."""
    edges = [(appendix_agent(u), appendix_agent(v), r) for u, v, r in _APPENDIX_EDGES]
    return Instance.from_ranked_edges(3, edges)


# -- composed counterexamples ---------------------------------------------------


def theorem1_compose(host: Instance, policy: str = "lexicographic",
                     seed: int | None = None, host_label: str = "host",
                     ) -> tuple[Instance, ConstructionTrace]:
    """Expand host (size n) to a complete instance of size 8n that has a
    stable matching only if the host does.

    One single-anchor gadget is attached to every host vertex with
    r' = rho(x) + 1; remaining ranks are filled by the completion policy.
    """
    report = validate(host)
    if not report.ok:
        raise ConstructionError(f"host does not validate:\n{report}")
    host_agents = list(host.agents())
    for v in host_agents:
        if host.out_degree(v) == 0:
            raise ConstructionError(f"host vertex {v} is isolated (rho undefined)")

    current = host
    attachments = []
    for x in host_agents:
        current, att = attach_lemma1_gadget(current, x, host.rho(x) + 1)
        attachments.append(att)
    full = complete_instance(current, policy, seed)
    trace = ConstructionTrace(host_label, serialize_instance(host),
                              tuple(attachments), policy, seed)
    return full, trace


# (anchor kind, vertices, in attachment order)
THEOREM2_SINGLE_ANCHORS = (0, 2, 7)
THEOREM2_DOUBLE_ANCHORS = ((1, 4), (3, 6), (5, 8))


def theorem2_instance(policy: str = "lexicographic", seed: int | None = None,
                      variant: str = "caption") -> tuple[Instance, ConstructionTrace]:
    """The complete size-18 instance with no stable matching.

    Single-anchor gadgets go on vertices 0, 2, 7 of the built-in size-3
    instance and two-anchor gadgets on the pairs (1,4), (3,6), (5,8), all
    with r' = rho + 1; the completion policy fills the remaining ranks.
    """
    host = appendix_instance()
    current = host
    attachments = []
    for v in THEOREM2_SINGLE_ANCHORS:
        x = appendix_agent(v)
        current, att = attach_lemma1_gadget(current, x, host.rho(x) + 1)
        attachments.append(att)
    for vx, vz in THEOREM2_DOUBLE_ANCHORS:
        x, z = appendix_agent(vx), appendix_agent(vz)
        current, att = attach_lemma2_gadget(
            current, x, z, host.rho(x) + 1, host.rho(z) + 1, variant=variant)
        attachments.append(att)
    full = complete_instance(current, policy, seed)
    trace = ConstructionTrace("appendix", serialize_instance(host),
                              tuple(attachments), policy, seed)
    return full, trace


def replay_trace(trace: ConstructionTrace) -> Instance:
    """Rebuild the composed instance recorded by a trace."""
    current = parse_instance(trace.host_text)
    for att in trace.attachments:
        if att.kind == "lemma1":
            current, new_att = attach_lemma1_gadget(
                current, att.anchor_x, att.r_prime_x, variant=att.variant)
        else:
            current, new_att = attach_lemma2_gadget(
                current, att.anchor_x, att.anchor_z,
                att.r_prime_x, att.r_prime_z, variant=att.variant)
        if new_att.fresh != att.fresh:
            raise ConstructionError(
                f"replay diverged at {att.kind} gadget on {att.anchor_x}")
    return complete_instance(current, trace.policy, trace.seed)


# -- projection back to the host -------------------------------------------------


def project_matching(composed: Instance, matching: Matching,
                     trace: ConstructionTrace) -> Matching:
    """Restrict a matching of the composed instance to the host.

    Anchors absorbed by their gadget (matched to c or d, whose own partner
    is one of the gadget's second-tier vertices) become single; every other
    anchor must be matched strictly better than its r', which lands inside
    the host.  Anything else raises ProjectionError, which signals either an
    unstable input matching or a construction bug.
    """
    host = parse_instance(trace.host_text)
    decisions: dict[AgentId, AgentId | None] = {}
    for att in trace.attachments:
        c, d = att.absorb_pair()
        second = att.second_tier()
        for v, r_prime in att.anchors():
            y = matching.mu(v)
            if y in (c, d):
                if matching.mu(y) in second:
                    decisions[v] = None
                    continue
                raise ProjectionError(
                    f"anchor {v} matched into its gadget but {y}'s partner "
                    f"{matching.mu(y)} is not second-tier", anchor=v)
            if y == v:
                raise ProjectionError(f"anchor {v} is single", anchor=v)
            r = composed.rank(v, y)
            if r is None or r >= r_prime:
                raise ProjectionError(
                    f"anchor {v} matched to {y} at rank {r}, not below r'={r_prime}",
                    anchor=v)
            decisions[v] = y

    for v in host.agents():
        if v not in decisions:
            raise ProjectionError(f"host vertex {v} has no gadget anchor", anchor=v)

    families = []
    for m in host.agents_of(Gender.M):
        f = decisions.get(m)
        if f is None:
            continue
        d = decisions.get(f)
        if d is None or decisions.get(d) != m:
            raise ProjectionError(
                f"family through {m} does not close inside the host", anchor=m)
        families.append(Family(m, f, d))
    return Matching(families)
