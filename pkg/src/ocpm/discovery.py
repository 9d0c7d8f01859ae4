"""Directly-follows discovery per object type, object-centric DFG merge,
Petri net assembly and DOT export."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Union

from . import activities as act
from .ocel import FlattenedLog, OCEventLog

__all__ = [
    "DFG",
    "ProfileEntry",
    "CardinalityProfile",
    "OCDFG",
    "Place",
    "Arc",
    "OCPN",
    "discover_dfg",
    "cardinality_profile",
    "discover_ocdfg",
    "assemble_ocpn",
    "export_dot",
    "type_color",
    "ocdfg_to_dict",
    "ocpn_to_dict",
]


@dataclass(frozen=True)
class DFG:
    otype: str
    nodes: frozenset = frozenset()
    edges: Mapping[tuple, int] = field(default_factory=dict)
    start_activities: Mapping[str, int] = field(default_factory=dict)
    end_activities: Mapping[str, int] = field(default_factory=dict)

    @property
    def case_count(self) -> int:
        return sum(self.start_activities.values())


class ProfileEntry(NamedTuple):
    min_refs: int
    max_refs: int

    @property
    def may_be_absent(self) -> bool:
        return self.min_refs == 0


@dataclass(frozen=True)
class CardinalityProfile:
    """Min/max number of referenced objects per (activity, object type)."""

    entries: Mapping[tuple, ProfileEntry] = field(default_factory=dict)

    def __getitem__(self, key) -> ProfileEntry:
        return self.entries[key]

    def max_refs(self, activity: str, otype: str) -> int:
        entry = self.entries.get((activity, otype))
        return entry.max_refs if entry else 0

    def is_variable(self, activity: str, otype: str) -> bool:
        return self.max_refs(activity, otype) > 1


@dataclass(frozen=True)
class OCDFG:
    per_type: Mapping[str, DFG]
    profile: CardinalityProfile
    shared_activities: Mapping[str, frozenset]

    @property
    def activities(self) -> frozenset:
        return frozenset(a for dfg in self.per_type.values() for a in dfg.nodes)


def discover_dfg(flat: FlattenedLog, otype: str | None = None) -> DFG:
    """Count directly-follows pairs, trace heads and trace tails."""
    return _dfg_from_sequences(
        otype if otype is not None else flat.case_notion,
        ([te.activity for te in trace] for trace in flat.cases.values()),
    )


def _dfg_from_sequences(otype: str, sequences) -> DFG:
    edges = Counter()
    starts = Counter()
    ends = Counter()
    nodes = set()
    for acts in sequences:
        if not acts:
            continue
        nodes.update(acts)
        starts[acts[0]] += 1
        ends[acts[-1]] += 1
        edges.update(zip(acts, acts[1:]))
    return DFG(
        otype,
        frozenset(nodes),
        dict(sorted(edges.items())),
        dict(sorted(starts.items())),
        dict(sorted(ends.items())),
    )


def cardinality_profile(log: OCEventLog) -> CardinalityProfile:
    """Exact min/max reference counts for every observed activity and
    every declared object type."""
    stats = {}
    types = sorted(log.object_types)
    for ev in log.events:
        for otype in types:
            n = len(ev.omap.get(otype, ()))
            key = (ev.activity, otype)
            cur = stats.get(key)
            if cur is None:
                stats[key] = [n, n]
            elif n < cur[0]:
                cur[0] = n
            elif n > cur[1]:
                cur[1] = n
    return CardinalityProfile(
        {k: ProfileEntry(lo, hi) for k, (lo, hi) in sorted(stats.items())}
    )


def discover_ocdfg(log: OCEventLog) -> OCDFG:
    # same traces as discover_dfg(flatten(log, t)), without materializing them
    events = log.events
    per_type = {
        t: _dfg_from_sequences(
            t, ([events[p].activity for p in log.positions(o.oid)] for o in log.objects_of(t))
        )
        for t in sorted(log.object_types)
    }
    profile = cardinality_profile(log)
    shared = {}
    for (activity, otype), entry in profile.entries.items():
        if entry.max_refs >= 1:
            shared.setdefault(activity, set()).add(otype)
    return OCDFG(
        per_type,
        profile,
        {a: frozenset(ts) for a, ts in sorted(shared.items())},
    )


# ---------------------------------------------------------------------------
# Object-centric Petri net


class Place(NamedTuple):
    pid: str
    otype: str


class Arc(NamedTuple):
    """``direction`` is ``"in"`` for place->transition, ``"out"`` for
    transition->place."""

    place: str
    transition: str
    direction: str
    otype: str
    variable: bool


@dataclass(frozen=True)
class OCPN:
    places: frozenset
    transitions: frozenset
    arcs: frozenset
    sources: Mapping[str, str]
    sinks: Mapping[str, str]

    def place_type(self, pid: str) -> str:
        for p in self.places:
            if p.pid == pid:
                return p.otype
        raise KeyError(pid)


def _edge_place(otype, a, b):
    return f"p[{otype}]{a}->{b}"


def assemble_ocpn(ocdfg: OCDFG) -> OCPN:
    """One transition per activity, one place per DFG edge, a source and a
    sink place per type; arcs are variable where the profile allows more
    than one object of the place's type."""
    places, arcs = set(), set()
    sources, sinks = {}, {}
    transitions = set()
    var = ocdfg.profile.is_variable
    for otype, dfg in ocdfg.per_type.items():
        if not dfg.nodes:
            continue
        transitions.update(dfg.nodes)
        src, snk = f"source[{otype}]", f"sink[{otype}]"
        sources[otype], sinks[otype] = src, snk
        places.add(Place(src, otype))
        places.add(Place(snk, otype))
        for a in dfg.start_activities:
            arcs.add(Arc(src, a, "in", otype, var(a, otype)))
        for a in dfg.end_activities:
            arcs.add(Arc(snk, a, "out", otype, var(a, otype)))
        for a, b in dfg.edges:
            pid = _edge_place(otype, a, b)
            places.add(Place(pid, otype))
            arcs.add(Arc(pid, a, "out", otype, var(a, otype)))
            arcs.add(Arc(pid, b, "in", otype, var(b, otype)))
    return OCPN(frozenset(places), frozenset(transitions), frozenset(arcs), sources, sinks)


# ---------------------------------------------------------------------------
# Serialization

_FIXED_COLORS = {act.SCHEDULE: "#8e44ad", act.TECHNICIAN: "#e84393"}
_PALETTE = ("#2980b9", "#27ae60", "#d35400", "#7f8c8d", "#c0392b", "#16a085", "#f1c40f")


def type_color(otype: str, all_types) -> str:
    if otype in _FIXED_COLORS:
        return _FIXED_COLORS[otype]
    others = sorted(t for t in all_types if t not in _FIXED_COLORS)
    return _PALETTE[others.index(otype) % len(_PALETTE)]


def _q(text) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _ocdfg_dot(model: OCDFG, min_edge_freq: int) -> str:
    lines = ["digraph ocdfg {"]
    nodes = sorted(model.activities)
    if nodes:
        lines += ["  rankdir=LR;", "  node [shape=box, fontname=Helvetica];"]
    types = sorted(model.per_type)
    for a in nodes:
        marks = []
        for t in types:
            dfg = model.per_type[t]
            if a in dfg.start_activities:
                marks.append(f"start {t}:{dfg.start_activities[a]}")
            if a in dfg.end_activities:
                marks.append(f"end {t}:{dfg.end_activities[a]}")
        attrs = f"label={_q(a)}"
        if marks:
            attrs += f", xlabel={_q('; '.join(marks))}"
        lines.append(f"  {_q(a)} [{attrs}];")
    for t in types:
        color = type_color(t, types)
        for (a, b), freq in sorted(model.per_type[t].edges.items()):
            if freq < min_edge_freq:
                continue
            lines.append(
                f"  {_q(a)} -> {_q(b)} [color={_q(color)}, label={_q(freq)}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _ocpn_dot(net: OCPN) -> str:
    lines = ["digraph ocpn {"]
    types = sorted({p.otype for p in net.places})
    if net.places or net.transitions:
        lines.append("  rankdir=LR;")
    for p in sorted(net.places):
        color = type_color(p.otype, types)
        lines.append(
            f"  {_q(p.pid)} [shape=circle, label=\"\", color={_q(color)}, "
            f"tooltip={_q(p.pid)}];"
        )
    for t in sorted(net.transitions):
        lines.append(f"  {_q('t:' + t)} [shape=box, label={_q(t)}];")
    for arc in sorted(net.arcs):
        color = type_color(arc.otype, types)
        if arc.variable:
            color = f"{color}:invis:{color}"
        src, dst = (arc.place, "t:" + arc.transition)
        if arc.direction == "out":
            src, dst = dst, src
        lines.append(f"  {_q(src)} -> {_q(dst)} [color={_q(color)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(model: Union[OCDFG, OCPN, DFG], min_edge_freq: int = 1) -> str:
    """Render a model as a DOT digraph.

    Edge colors are per object type (schedule purple, technician pink);
    variable arcs are drawn as double lines. ``min_edge_freq`` prunes
    low-frequency DFG edges for display only.
    """
    if isinstance(model, DFG):
        model = OCDFG({model.otype: model}, CardinalityProfile(), {})
    if isinstance(model, OCDFG):
        return _ocdfg_dot(model, min_edge_freq)
    if isinstance(model, OCPN):
        return _ocpn_dot(model)
    raise TypeError(f"cannot export {type(model).__name__} to DOT")


def ocdfg_to_dict(model: OCDFG) -> dict:
    return {
        "object_types": sorted(model.per_type),
        "per_type": {
            t: {
                "nodes": sorted(dfg.nodes),
                "edges": [
                    {"source": a, "target": b, "frequency": n}
                    for (a, b), n in sorted(dfg.edges.items())
                ],
                "start_activities": dict(sorted(dfg.start_activities.items())),
                "end_activities": dict(sorted(dfg.end_activities.items())),
            }
            for t, dfg in sorted(model.per_type.items())
        },
        "profile": [
            {"activity": a, "object_type": t, "min_refs": e.min_refs,
             "max_refs": e.max_refs, "may_be_absent": e.may_be_absent}
            for (a, t), e in sorted(model.profile.entries.items())
        ],
        "shared_activities": {a: sorted(ts) for a, ts in sorted(model.shared_activities.items())},
    }


def ocpn_to_dict(net: OCPN) -> dict:
    return {
        "places": [{"id": p.pid, "object_type": p.otype} for p in sorted(net.places)],
        "transitions": sorted(net.transitions),
        "arcs": [
            {"place": a.place, "transition": a.transition, "direction": a.direction,
             "object_type": a.otype, "variable": a.variable}
            for a in sorted(net.arcs)
        ],
        "sources": dict(sorted(net.sources.items())),
        "sinks": dict(sorted(net.sinks.items())),
    }
