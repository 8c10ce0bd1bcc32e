"""Network topologies and the visibility (canSee) function.

Honest agents are graph vertices; attackers and guardians are interceptor
stations placed in order along edges.  A message in transit is visible to
every station on the relevant stretch of its edge before anything erases
it; an injected message enters at the injector's own station and travels
toward the receiver, so stations on the far side never see it.  That
ordering is what makes placements like "E between A and G" decisive.

Base cases A-F are the standard two- and three-agent layouts; custom
graphs are supported for ad-hoc scenarios.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple


class ConfigError(Exception):
    """Invalid scenario / topology configuration."""


def _edge(a: str, b: str) -> Tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass
class Topology:
    """Vertices are honest agents; `stations[edge]` is the ordered list of
    interceptor groups sitting on that edge, listed from edge[0]'s side.
    Interceptors sharing a group are co-located and see each other's
    injections on that edge."""

    kind: str                                    # "A".."F" or "custom"
    vertices: Set[str]
    stations: Dict[Tuple[str, str], List[FrozenSet[str]]]
    resilient_links: Set[Tuple[str, str]] = field(default_factory=set)

    def __post_init__(self):
        self._home: Dict[str, List[Tuple[Tuple[str, str], int]]] = {}
        for edge, groups in self.stations.items():
            for idx, group in enumerate(groups):
                for who in group:
                    self._home.setdefault(who, []).append((edge, idx))

    @property
    def interceptors(self) -> Set[str]:
        return set(self._home)

    def edge_between(self, a: str, b: str) -> Optional[Tuple[str, str]]:
        e = _edge(a, b)
        return e if e in self.stations else None

    def observers_for_send(self, sender: str, receiver: str) -> List[str]:
        """Interceptors able to spy an honest send sender->receiver,
        in transit order from the sender's side."""
        e = self.edge_between(sender, receiver)
        if e is None:
            raise ConfigError(f"no channel between {sender} and {receiver}")
        groups = self.stations[e]
        if e[0] != sender:
            groups = list(reversed(groups))
        out: List[str] = []
        for group in groups:
            out.extend(sorted(group))
        return out

    def station_of(self, interceptor: str, receiver: str) -> Optional[Tuple[Tuple[str, str], int]]:
        """The station from which `interceptor` can reach `receiver`
        (an edge incident to receiver that the interceptor sits on)."""
        for edge, idx in self._home.get(interceptor, ()):
            if receiver in edge:
                return edge, idx
        return None

    def observers_for_injection(self, injector: str, receiver: str) -> List[str]:
        """Interceptors (other than the injector) that see an injected
        message travelling from the injector's station to `receiver`.
        Co-located interceptors see it; stations beyond the injector,
        away from the receiver, do not."""
        spot = self.station_of(injector, receiver)
        if spot is None:
            raise ConfigError(f"{injector} cannot reach {receiver}")
        edge, idx = spot
        groups = self.stations[edge]
        if edge[0] == receiver:
            stretch = list(reversed(groups[:idx + 1]))
        else:
            stretch = groups[idx:]
        out: List[str] = []
        for group in stretch:
            out.extend(sorted(w for w in group if w != injector))
        return out

    def can_reach(self, interceptor: str, receiver: str) -> bool:
        return self.station_of(interceptor, receiver) is not None

    def guards_path(self, guardian: str, a: str, b: str) -> bool:
        """True iff the guardian sits on the a<->b channel."""
        e = self.edge_between(a, b)
        if e is None:
            return False
        return any(guardian in g for g in self.stations[e])

    def sees_first(self, who: str, src: str, dst: str) -> bool:
        """True iff `who` holds the station nearest `src` on the src->dst
        channel: nobody can take src's traffic before `who` records it."""
        e = self.edge_between(src, dst)
        if e is None:
            return False
        groups = self.stations[e]
        if e[0] != src:
            groups = list(reversed(groups))
        return bool(groups) and who in groups[0]

    def guards_injection(self, guardian: str, injector: str, receiver: str) -> bool:
        """True iff every injection by `injector` toward `receiver`
        crosses (or shares a station with) the guardian."""
        spot = self.station_of(injector, receiver)
        if spot is None:
            return False
        edge, idx = spot
        groups = self.stations[edge]
        if edge[0] == receiver:
            stretch = groups[:idx + 1]
        else:
            stretch = groups[idx:]
        return any(guardian in g for g in stretch)


def base_topology(kind: str, honest: Sequence[str] = ("A", "B", "S"),
                  attackers: Sequence[str] = ("E",),
                  guardian: Optional[str] = "G",
                  resilient: Sequence[Tuple[str, str]] = ()) -> Topology:
    """The six base layouts.

    A: A-[G]-[E]-B          B: A-[E]-[G]-B
    C: like A plus S behind G    D: like B plus S behind G
    E: like A plus S behind E    F: like B plus S behind E

    With guardian=None the guardian station is omitted (undefended runs);
    with several attackers they share E's station (co-located rivals).
    """
    kind = kind.upper()
    a, b = honest[0], honest[1]
    s = honest[2] if len(honest) > 2 else "S"
    e_grp = frozenset(attackers)
    g_grp = frozenset([guardian]) if guardian else None

    def line(groups):
        return [g for g in groups if g]

    stations: Dict[Tuple[str, str], List[FrozenSet[str]]] = {}

    def put(x, y, groups):
        ordered = line(groups)
        edge = _edge(x, y)
        if edge[0] != x:
            ordered = list(reversed(ordered))
        stations[edge] = ordered

    if kind == "A":
        put(a, b, [g_grp, e_grp])
        verts = {a, b}
    elif kind == "B":
        put(a, b, [e_grp, g_grp])
        verts = {a, b}
    elif kind == "C":
        put(a, b, [g_grp, e_grp])
        put(a, s, [g_grp])
        put(b, s, [e_grp, g_grp])
        verts = {a, b, s}
    elif kind == "D":
        put(a, b, [e_grp, g_grp])
        put(a, s, [e_grp, g_grp])
        put(b, s, [g_grp])
        verts = {a, b, s}
    elif kind == "E":
        put(a, b, [g_grp, e_grp])
        put(a, s, [g_grp, e_grp])
        put(b, s, [e_grp])
        verts = {a, b, s}
    elif kind == "F":
        put(a, b, [e_grp, g_grp])
        put(a, s, [e_grp])
        put(b, s, [g_grp, e_grp])
        verts = {a, b, s}
    else:
        raise ConfigError(f"unknown base topology kind {kind!r}")

    links = set(resilient)
    if guardian and not links:
        links = {(guardian, a)} if kind in ("A", "B") else {(guardian, a), (guardian, b)}
    return Topology(kind=kind, vertices=verts, stations=stations,
                    resilient_links=links if guardian else set())


def shared_channel_topology(honest: Sequence[str],
                            attackers: Sequence[str],
                            guardian: Optional[str] = None) -> Topology:
    """All attackers co-located on the single a<->b channel: the layout of
    the two-rival interaction studies."""
    a, b = honest[0], honest[1]
    groups: List[FrozenSet[str]] = []
    if guardian:
        groups.append(frozenset([guardian]))
    groups.append(frozenset(attackers))
    stations = {_edge(a, b): groups if _edge(a, b)[0] == a else list(reversed(groups))}
    links = {(guardian, a)} if guardian else set()
    return Topology(kind="custom", vertices={a, b}, stations=stations,
                    resilient_links=links)
