"""Data-cleaning filters and the technician-day case notion.

Every filter removes whole objects. An event that still references a
retained object survives with the removed references stripped; an event
left without references is dropped. Objects whose every event was dropped
fall out transitively and are reported alongside the directly removed ones.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import activities as act
from .exceptions import InvalidConfig
from .ocel import Event, FlattenedLog, OCEventLog, TraceEvent, utc_date

logger = logging.getLogger(__name__)

__all__ = [
    "CompletionSpec",
    "PrecedencePair",
    "CardinalityConstraint",
    "FilterResult",
    "PreprocessConfig",
    "filter_incomplete",
    "filter_order_anomalies",
    "filter_cardinality",
    "derive_daily_cases",
    "preprocess",
    "remove_objects",
]


@dataclass(frozen=True)
class CompletionSpec:
    """Terminal activities per object type. An object of a covered type is
    complete iff its trace contains at least one terminal activity."""

    per_type: Mapping[str, frozenset] = field(default_factory=dict)

    @classmethod
    def default(cls):
        return cls({act.SCHEDULE: frozenset({act.JOB_CLOSED, act.REJECT})})


@dataclass(frozen=True)
class PrecedencePair:
    """``before`` must precede ``after`` within each ``scope`` object.

    With ``segment_by`` set, an object's trace is cut before every
    occurrence of that activity and each piece is checked on its own
    (e.g. one piece per accepted schedule of a technician).
    """

    before: str
    after: str
    scope: str
    segment_by: str | None = None

    def __post_init__(self):
        if self.before == self.after:
            raise InvalidConfig(f"precedence pair with identical activities {self.before!r}")


DEFAULT_PRECEDENCE = (
    PrecedencePair(act.ENROUTE, act.ONSITE, act.TECHNICIAN, segment_by=act.ACCEPT),
    PrecedencePair(act.SCHEDULER_START, act.SCHEDULER_END, act.SCHEDULE),
)


@dataclass(frozen=True)
class CardinalityConstraint:
    subject: str = act.SCHEDULE
    related: str = act.TECHNICIAN
    max_related: int = 1


@dataclass(frozen=True)
class FilterResult:
    log: OCEventLog
    removed_objects: Mapping[str, frozenset]
    removed_event_count: int
    fallout: Mapping[str, frozenset] = field(default_factory=dict)

    def removed_count(self, otype: str) -> int:
        return len(self.removed_objects.get(otype, ()))


def remove_objects(log: OCEventLog, oids: Iterable[str]) -> FilterResult:
    """Drop ``oids`` from ``log`` with reference stripping and fallout."""
    removed = set(oids) & set(log.objects)
    if not removed:
        return FilterResult(log, {}, 0)
    touched = sorted({p for oid in removed for p in log.positions(oid)})
    events = list(log.events)
    dropped = set()
    neighbours = set()
    for pos in touched:
        ev = events[pos]
        omap = {}
        for otype, refs in ev.omap.items():
            kept = tuple(o for o in refs if o not in removed)
            if kept:
                omap[otype] = kept
                neighbours.update(kept)
        if omap:
            events[pos] = Event(ev.eid, ev.activity, ev.timestamp, omap, ev.vmap)
        else:
            dropped.add(pos)
    # only objects sharing an event with a removed one can lose all events
    fallout = {
        oid for oid in neighbours - removed
        if all(p in dropped for p in log.positions(oid))
    }
    if dropped:
        events = [ev for pos, ev in enumerate(events) if pos not in dropped]
    gone = removed | fallout
    objects = {oid: o for oid, o in log.objects.items() if oid not in gone}
    by_type = defaultdict(set)
    for oid in gone:
        by_type[log.objects[oid].otype].add(oid)
    fallout_by_type = defaultdict(set)
    for oid in fallout:
        fallout_by_type[log.objects[oid].otype].add(oid)
    return FilterResult(
        OCEventLog._trusted(events, objects, log.object_types),
        {t: frozenset(v) for t, v in by_type.items()},
        len(dropped),
        {t: frozenset(v) for t, v in fallout_by_type.items()},
    )


def filter_incomplete(log: OCEventLog, spec: CompletionSpec) -> FilterResult:
    """Remove objects of covered types that never reach a terminal activity."""
    doomed = []
    for otype, terminals in spec.per_type.items():
        if otype not in log.object_types:
            continue
        missing = set(terminals) - log.activities
        if missing and log.events:
            logger.warning("terminal activities %s not observed in log", sorted(missing))
        events = log.events
        for obj in log.objects_of(otype):
            if not any(events[p].activity in terminals for p in log.positions(obj.oid)):
                doomed.append(obj.oid)
    return remove_objects(log, doomed)


def _segments(activities: Sequence[str], cut: str | None):
    if cut is None:
        yield activities
        return
    start = 0
    for i, a in enumerate(activities):
        if a == cut and i > start:
            yield activities[start:i]
            start = i
    yield activities[start:]


def _out_of_order(activities: Sequence[str], before: str, after: str) -> bool:
    first_before = first_after = None
    for i, a in enumerate(activities):
        if a == before:
            if first_before is None:
                first_before = i
        elif a == after and first_after is None:
            first_after = i
    if first_after is None:
        return False
    return first_before is None or first_after < first_before


def filter_order_anomalies(
    log: OCEventLog, pairs: Sequence[PrecedencePair] = DEFAULT_PRECEDENCE
) -> FilterResult:
    """Remove objects in which the first ``after`` precedes the first
    ``before`` (or ``after`` occurs without any ``before``)."""
    doomed = set()
    for pair in pairs:
        if pair.scope not in log.object_types:
            continue
        events = log.events
        for obj in log.objects_of(pair.scope):
            acts = [events[p].activity for p in log.positions(obj.oid)]
            if any(
                _out_of_order(seg, pair.before, pair.after)
                for seg in _segments(acts, pair.segment_by)
            ):
                doomed.add(obj.oid)
    return remove_objects(log, doomed)


def filter_cardinality(
    log: OCEventLog, subject: str, related: str, max_related: int = 1
) -> FilterResult:
    """Remove ``subject`` objects co-appearing with more than
    ``max_related`` distinct ``related`` objects."""
    log.require_type(subject)
    log.require_type(related)
    if max_related < 1:
        raise InvalidConfig("max_related must be >= 1")
    doomed = []
    events = log.events
    for obj in log.objects_of(subject):
        partners = set()
        for p in log.positions(obj.oid):
            partners.update(events[p].omap.get(related, ()))
        if len(partners) > max_related:
            doomed.append(obj.oid)
    return remove_objects(log, doomed)


def derive_daily_cases(log: OCEventLog, otype: str) -> FlattenedLog:
    """One case per (object, UTC calendar date), keyed ``"<oid>@<date>"``."""
    log.require_type(otype)
    return log.memo(("daily_cases", otype), lambda lg: _daily_cases(lg, otype))


def _daily_cases(log: OCEventLog, otype: str) -> FlattenedLog:
    cases = {}
    for obj in log.objects_of(otype):
        by_day = {}
        for ev in log.trace(obj.oid):
            day = utc_date(ev.timestamp)
            by_day.setdefault(day, []).append(TraceEvent(ev.eid, ev.activity, ev.timestamp))
        for day in sorted(by_day):
            cases[f"{obj.oid}@{day.isoformat()}"] = tuple(by_day[day])
    return FlattenedLog(f"{otype}-day", cases)


# ---------------------------------------------------------------------------
# Configured pipeline


@dataclass(frozen=True)
class PreprocessConfig:
    completion: CompletionSpec = field(default_factory=CompletionSpec.default)
    precedence: tuple = DEFAULT_PRECEDENCE
    cardinality: tuple = (CardinalityConstraint(),)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PreprocessConfig":
        """Read a config document; absent sections keep their defaults."""
        if not isinstance(doc, Mapping):
            raise InvalidConfig("preprocessing config must be a JSON object")
        unknown = set(doc) - {"completion", "precedence", "cardinality"}
        if unknown:
            raise InvalidConfig(f"unknown config section(s): {sorted(unknown)}")
        kwargs = {}
        try:
            if "completion" in doc:
                kwargs["completion"] = CompletionSpec(
                    {t: frozenset(v) for t, v in doc["completion"].items()}
                )
            if "precedence" in doc:
                kwargs["precedence"] = tuple(PrecedencePair(**p) for p in doc["precedence"])
            if "cardinality" in doc:
                kwargs["cardinality"] = tuple(
                    CardinalityConstraint(**c) for c in doc["cardinality"]
                )
        except (TypeError, AttributeError) as exc:
            raise InvalidConfig(f"malformed preprocessing config: {exc}") from exc
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "PreprocessConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"invalid JSON config: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "completion": {t: sorted(v) for t, v in sorted(self.completion.per_type.items())},
            "precedence": [
                {"before": p.before, "after": p.after, "scope": p.scope,
                 "segment_by": p.segment_by}
                for p in self.precedence
            ],
            "cardinality": [
                {"subject": c.subject, "related": c.related, "max_related": c.max_related}
                for c in self.cardinality
            ],
        }


def _counts(log: OCEventLog) -> dict:
    per_type = defaultdict(int)
    for obj in log.objects.values():
        per_type[obj.otype] += 1
    return {"events": len(log.events),
            "objects": {t: per_type.get(t, 0) for t in sorted(log.object_types)}}


def _step_summary(name: str, before: OCEventLog, result: FilterResult) -> dict:
    return {
        "step": name,
        "before": _counts(before),
        "after": _counts(result.log),
        "removed_events": result.removed_event_count,
        "removed_objects": {t: len(v) for t, v in sorted(result.removed_objects.items())},
        "fallout_objects": {t: len(v) for t, v in sorted(result.fallout.items())},
    }


def preprocess(log: OCEventLog, config: PreprocessConfig | None = None):
    """Run incomplete -> order-anomaly -> cardinality filters in that order.

    Returns ``(log, steps, results)``: the cleaned log, one JSON-ready
    summary per step and the raw :class:`FilterResult` per step.
    """
    config = config or PreprocessConfig()
    steps, results = [], []
    current = log
    res = filter_incomplete(current, config.completion)
    steps.append(_step_summary("incomplete", current, res))
    results.append(res)
    current = res.log
    res = filter_order_anomalies(current, config.precedence)
    steps.append(_step_summary("order_anomalies", current, res))
    results.append(res)
    current = res.log
    for constraint in config.cardinality:
        res = filter_cardinality(
            current, constraint.subject, constraint.related, constraint.max_related
        )
        steps.append(_step_summary(
            f"cardinality:{constraint.subject}/{constraint.related}", current, res))
        results.append(res)
        current = res.log
    return current, steps, results
