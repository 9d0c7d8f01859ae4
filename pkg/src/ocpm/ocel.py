"""Object-centric event log model, OCEL 1.0 JSON I/O, tabular import,
projection and flattening."""

from __future__ import annotations

import csv
import io
import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from functools import cached_property, lru_cache
from typing import Any, Iterable, Mapping, NamedTuple, Sequence, Union

from .exceptions import IntegrityError, MalformedInput, UnknownType

__all__ = [
    "ObjectInstance",
    "Event",
    "OCEventLog",
    "TraceEvent",
    "FlattenedLog",
    "parse_timestamp",
    "format_timestamp",
    "parse_ocel_json",
    "serialize_ocel_json",
    "import_table",
    "read_table_csv",
    "project",
    "flatten",
]

Scalar = Union[str, int, float, bool, datetime]

_TIMESTAMP_RE = re.compile(
    r"^\d{4}-\d{2}-\d{2}(?:[T ]\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?)?"
    r"(?:Z|[+-]\d{2}:?\d{2})?$"
)
# Attribute strings of this shape are read back as timestamps.
_ATTR_TIMESTAMP_RE = re.compile(
    r"^\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?(?:Z|[+-]\d{2}:\d{2})?$"
)


def parse_timestamp(text: str) -> datetime:
    """Parse ISO-8601 or ``YYYY-MM-DD HH:MM[:SS]`` into a UTC datetime.

    Naive values are taken as UTC; sub-second digits are dropped.
    """
    if not isinstance(text, str):
        raise MalformedInput(f"unparseable timestamp: {text!r}")
    return _parse_timestamp(text)


# logs sit on a coarse time grid, so the same strings recur a lot
@lru_cache(maxsize=1 << 16)
def _parse_timestamp(text: str) -> datetime:
    if not _TIMESTAMP_RE.match(text.strip()):
        raise MalformedInput(f"unparseable timestamp: {text!r}")
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    # fromisoformat (3.10) only takes 3 or 6 fractional digits
    m = re.search(r"\.(\d+)", text)
    if m:
        text = text[: m.start()] + text[m.end():]
    try:
        ts = datetime.fromisoformat(text)
    except ValueError as exc:
        raise MalformedInput(f"unparseable timestamp: {text!r}") from exc
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@lru_cache(maxsize=1 << 16)
def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S+00:00")


def _check_scalar(name: str, value: Any, owner: str) -> Scalar:
    if isinstance(value, datetime):
        return value.astimezone(timezone.utc).replace(microsecond=0)
    if isinstance(value, str):
        if _ATTR_TIMESTAMP_RE.match(value):
            return parse_timestamp(value)
        return value
    if isinstance(value, (bool, int, float)):
        return value
    raise MalformedInput(
        f"attribute {name!r} of {owner} has unsupported type {type(value).__name__}"
    )


def _encode_scalar(value: Scalar) -> Any:
    if isinstance(value, datetime):
        return format_timestamp(value)
    return value


@dataclass(frozen=True)
class ObjectInstance:
    oid: str
    otype: str
    attributes: Mapping[str, Scalar] = field(default_factory=dict)


@dataclass(frozen=True)
class Event:
    """A single event referencing one or more typed objects.

    ``omap`` maps an object type to the ordered, duplicate-free tuple of
    referenced oids; types without references are absent from the map.
    """

    eid: str
    activity: str
    timestamp: datetime
    omap: Mapping[str, tuple] = field(default_factory=dict)
    vmap: Mapping[str, Scalar] = field(default_factory=dict)

    def refs(self, otype: str) -> tuple:
        return self.omap.get(otype, ())

    def object_ids(self):
        for oids in self.omap.values():
            yield from oids


class TraceEvent(NamedTuple):
    eid: str
    activity: str
    timestamp: datetime


@dataclass(frozen=True)
class FlattenedLog:
    """Case-based view of a log. Traces are ordered by (timestamp, eid)."""

    case_notion: str
    cases: Mapping[str, tuple]

    def __len__(self):
        return len(self.cases)


def _sort_key(ev: Event):
    return (ev.timestamp, ev.eid)


@dataclass(frozen=True)
class OCEventLog:
    """Immutable object-centric event log.

    Construction validates every invariant and sorts events by
    ``(timestamp, eid)``. ``object_types`` defaults to the types of the
    given objects.
    """

    events: tuple
    objects: Mapping[str, ObjectInstance]
    object_types: frozenset = None

    def __post_init__(self):
        events = tuple(sorted(self.events, key=_sort_key))
        objects = self.objects
        if not isinstance(objects, Mapping):
            objects = {}
            for obj in self.objects:
                if obj.oid in objects:
                    raise IntegrityError(f"duplicate oid {obj.oid!r}", obj.oid)
                objects[obj.oid] = obj
        else:
            objects = dict(objects)
        types = self.object_types
        if types is None:
            types = frozenset(o.otype for o in objects.values())
        else:
            types = frozenset(types)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "object_types", types)
        _validate(self)

    @classmethod
    def _trusted(cls, events, objects, object_types):
        """Build without re-validation; callers guarantee the invariants
        and pass events already in log order."""
        log = object.__new__(cls)
        object.__setattr__(log, "events", tuple(events))
        object.__setattr__(log, "objects", dict(objects))
        object.__setattr__(log, "object_types", frozenset(object_types))
        return log

    @classmethod
    def empty(cls, object_types=()):
        return cls._trusted((), {}, object_types)

    @cached_property
    def activities(self) -> frozenset:
        return frozenset(ev.activity for ev in self.events)

    @cached_property
    def _positions(self) -> dict:
        index = defaultdict(list)
        for pos, ev in enumerate(self.events):
            for oids in ev.omap.values():
                for oid in oids:
                    index[oid].append(pos)
        return dict(index)

    def trace(self, oid: str) -> tuple:
        """Events referencing ``oid`` in log order."""
        events = self.events
        return tuple(events[p] for p in self._positions.get(oid, ()))

    def positions(self, oid: str) -> Sequence[int]:
        return self._positions.get(oid, ())

    def objects_of(self, otype: str) -> list:
        """Objects of ``otype`` sorted by oid."""
        return sorted(
            (o for o in self.objects.values() if o.otype == otype), key=lambda o: o.oid
        )

    def require_type(self, otype: str) -> None:
        if otype not in self.object_types:
            raise UnknownType(f"object type {otype!r} not declared in log")

    def memo(self, key, factory):
        """Compute ``factory(self)`` once per log and cache it; used for
        derived indexes shared by several analyses."""
        cache = self.__dict__.setdefault("_memo", {})
        if key not in cache:
            cache[key] = factory(self)
        return cache[key]

    def __len__(self):
        return len(self.events)


def _validate(log: OCEventLog) -> None:
    for oid, obj in log.objects.items():
        if oid != obj.oid:
            raise IntegrityError(f"object key {oid!r} differs from oid {obj.oid!r}", oid)
        if not obj.otype:
            raise IntegrityError(f"object {oid!r} has empty type", oid)
        if obj.otype not in log.object_types:
            raise IntegrityError(
                f"object {oid!r} has undeclared type {obj.otype!r}", oid
            )
    seen = set()
    objects = log.objects
    for ev in log.events:
        if ev.eid in seen:
            raise IntegrityError(f"duplicate eid {ev.eid!r}", ev.eid)
        seen.add(ev.eid)
        if ev.timestamp.tzinfo is None:
            raise IntegrityError(f"event {ev.eid!r} has naive timestamp", ev.eid)
        n_refs = 0
        for otype, oids in ev.omap.items():
            if len(set(oids)) != len(oids):
                raise IntegrityError(
                    f"event {ev.eid!r} lists an oid twice under {otype!r}", ev.eid
                )
            for oid in oids:
                obj = objects.get(oid)
                if obj is None:
                    raise IntegrityError(
                        f"event {ev.eid!r} references unknown object {oid!r}", oid
                    )
                if obj.otype != otype:
                    raise IntegrityError(
                        f"event {ev.eid!r} lists {oid!r} under {otype!r} "
                        f"but its type is {obj.otype!r}",
                        oid,
                    )
            n_refs += len(oids)
        if n_refs == 0:
            raise IntegrityError(f"event {ev.eid!r} references no object", ev.eid)


# ---------------------------------------------------------------------------
# OCEL 1.0 JSON


def _reject_duplicate_keys(pairs):
    d = dict(pairs)
    if len(d) != len(pairs):
        seen = set()
        for k, _ in pairs:
            if k in seen:
                raise IntegrityError(f"duplicate identifier {k!r}", k)
            seen.add(k)
    return d


def parse_ocel_json(data: Union[bytes, str]) -> OCEventLog:
    """Parse an OCEL 1.0 JSON document into a validated log.

    ``ocel:omap`` may be the standard flat oid list or a mapping from
    type to oid list. Within one type the input order of oids is kept.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput("input is not UTF-8") from exc
    try:
        doc = json.loads(data, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("top level must be a JSON object")
    raw_events = doc.get("ocel:events")
    raw_objects = doc.get("ocel:objects")
    if not isinstance(raw_events, dict) or not isinstance(raw_objects, dict):
        raise MalformedInput("missing 'ocel:events' or 'ocel:objects' map")
    glob = doc.get("ocel:global-log", {})
    if not isinstance(glob, dict):
        raise MalformedInput("'ocel:global-log' must be an object")

    objects = {}
    for oid, raw in raw_objects.items():
        if not isinstance(raw, dict) or not isinstance(raw.get("ocel:type"), str):
            raise MalformedInput(f"object {oid!r} lacks 'ocel:type'")
        ovmap = raw.get("ocel:ovmap", {})
        if not isinstance(ovmap, dict):
            raise MalformedInput(f"object {oid!r} has non-map 'ocel:ovmap'")
        attrs = {k: _check_scalar(k, v, f"object {oid!r}") for k, v in ovmap.items()}
        objects[oid] = ObjectInstance(oid, raw["ocel:type"], attrs)

    declared = glob.get("ocel:object-types")
    if declared is None:
        types = frozenset(o.otype for o in objects.values())
    elif isinstance(declared, list) and all(isinstance(t, str) for t in declared):
        types = frozenset(declared)
    else:
        raise MalformedInput("'ocel:object-types' must be a list of strings")

    events = []
    otype_of = {oid: o.otype for oid, o in objects.items()}
    for eid, raw in raw_events.items():
        if not isinstance(raw, dict):
            raise MalformedInput(f"event {eid!r} is not an object")
        activity = raw.get("ocel:activity")
        if not isinstance(activity, str) or not activity:
            raise MalformedInput(f"event {eid!r} lacks 'ocel:activity'")
        ts = parse_timestamp(raw.get("ocel:timestamp"))
        omap = _parse_omap(eid, raw.get("ocel:omap"), otype_of)
        vmap = raw.get("ocel:vmap")
        if vmap:
            if not isinstance(vmap, dict):
                raise MalformedInput(f"event {eid!r} has non-map 'ocel:vmap'")
            vmap = {k: _check_scalar(k, v, f"event {eid!r}") for k, v in vmap.items()}
        elif vmap is None or vmap == {}:
            vmap = {}
        else:
            raise MalformedInput(f"event {eid!r} has non-map 'ocel:vmap'")
        events.append(Event(eid, activity, ts, omap, vmap))
    return OCEventLog(tuple(events), objects, types)


def _parse_omap(eid, raw, otype_of) -> dict:
    if type(raw) is list and len(raw) == 1 and type(raw[0]) is str and raw[0] in otype_of:
        return {otype_of[raw[0]]: (raw[0],)}
    if isinstance(raw, list):
        grouped = {}
        for oid in raw:
            try:
                otype = otype_of[oid]
            except (KeyError, TypeError):
                if not isinstance(oid, str):
                    raise MalformedInput(f"event {eid!r} has non-string oid {oid!r}") from None
                raise IntegrityError(
                    f"event {eid!r} references unknown object {oid!r}", oid
                ) from None
            if otype in grouped:
                grouped[otype].append(oid)
            else:
                grouped[otype] = [oid]
        return {t: tuple(v) for t, v in grouped.items()}
    if isinstance(raw, dict):
        omap = {}
        for otype, oids in raw.items():
            if not isinstance(oids, list) or not all(isinstance(o, str) for o in oids):
                raise MalformedInput(f"event {eid!r} has malformed omap entry {otype!r}")
            if oids:
                omap[otype] = tuple(oids)
        return omap
    raise MalformedInput(f"event {eid!r} lacks 'ocel:omap'")


def _flat_omap(omap) -> list:
    if len(omap) == 1:
        for oids in omap.values():
            return list(oids)
    return [oid for t in sorted(omap) for oid in omap[t]]


def serialize_ocel_json(log: OCEventLog) -> bytes:
    """Emit OCEL 1.0 JSON. Equal logs serialize to identical bytes."""
    attr_names = set()
    events = {}
    for ev in log.events:
        vmap = ev.vmap
        if vmap:
            attr_names.update(vmap)
            vmap = {k: _encode_scalar(vmap[k]) for k in sorted(vmap)}
        else:
            vmap = {}
        events[ev.eid] = {
            "ocel:activity": ev.activity,
            "ocel:timestamp": format_timestamp(ev.timestamp),
            "ocel:omap": _flat_omap(ev.omap),
            "ocel:vmap": vmap,
        }
    objects = {}
    for oid in sorted(log.objects):
        obj = log.objects[oid]
        attr_names.update(obj.attributes)
        objects[oid] = {
            "ocel:type": obj.otype,
            "ocel:ovmap": {
                k: _encode_scalar(obj.attributes[k]) for k in sorted(obj.attributes)
            },
        }
    doc = {
        "ocel:global-event": {"ocel:activity": "__INVALID__"},
        "ocel:global-object": {"ocel:type": "__INVALID__"},
        "ocel:global-log": {
            "ocel:attribute-names": sorted(attr_names),
            "ocel:object-types": sorted(log.object_types),
            "ocel:ordering": "timestamp",
            "ocel:version": "1.0",
        },
        "ocel:events": events,
        "ocel:objects": objects,
    }
    return (json.dumps(doc, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


# ---------------------------------------------------------------------------
# Tabular form


def import_table(rows: Iterable[Mapping[str, Any]], object_types: Sequence[str]) -> OCEventLog:
    """Build a log from table rows.

    Each row maps ``id``, ``activity``, ``timestamp`` and every name in
    ``object_types`` to its cell. Object cells hold a (possibly empty)
    list of oids; ``None`` counts as empty. Objects are materialized from
    the union of oids per type column, without attributes.
    """
    object_types = tuple(object_types)
    allowed = {"id", "activity", "timestamp", *object_types}
    objects = {}
    events = []
    for row in rows:
        unknown = set(row) - allowed
        if unknown:
            raise MalformedInput(f"unknown column(s): {sorted(unknown)}")
        eid = row.get("id")
        if not isinstance(eid, str) or not eid:
            raise MalformedInput(f"row without id: {row!r}")
        activity = row.get("activity")
        if not isinstance(activity, str) or not activity:
            raise MalformedInput(f"row {eid!r} without activity")
        ts = row.get("timestamp")
        ts = ts if isinstance(ts, datetime) else parse_timestamp(ts)
        omap = {}
        for otype in object_types:
            cell = list(row.get(otype) or ())
            if len(set(cell)) != len(cell):
                raise IntegrityError(
                    f"event {eid!r} lists an oid twice under {otype!r}", eid
                )
            for oid in cell:
                prev = objects.get(oid)
                if prev is not None and prev.otype != otype:
                    raise IntegrityError(
                        f"oid {oid!r} appears under {prev.otype!r} and {otype!r}", oid
                    )
                objects.setdefault(oid, ObjectInstance(oid, otype))
            if cell:
                omap[otype] = tuple(cell)
        if not omap:
            raise IntegrityError(f"event {eid!r} references no object", eid)
        events.append(Event(eid, activity, ts, omap))
    return OCEventLog(tuple(events), objects, frozenset(object_types))


def _parse_cell(cell: str) -> list:
    cell = cell.strip()
    if cell.startswith("[") and cell.endswith("]"):
        cell = cell[1:-1]
    return [part.strip() for part in cell.split(";") if part.strip()]


def read_table_csv(text: str) -> OCEventLog:
    """Read the CSV tabular form ``Id,Activity,Timestamp,<Type>...``.

    Type columns are lower-cased (``Technician`` becomes ``technician``);
    cells are ``[a;b]`` or empty.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedInput("empty table") from None
    fixed = [h.strip().lower() for h in header[:3]]
    if fixed != ["id", "activity", "timestamp"]:
        raise MalformedInput(f"header must start with Id,Activity,Timestamp: {header!r}")
    types = [h.strip().lower() for h in header[3:]]
    if any(not t for t in types) or len(set(types)) != len(types):
        raise MalformedInput(f"bad object-type columns: {header[3:]!r}")
    rows = []
    for line_no, cells in enumerate(reader, start=2):
        if not any(c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise MalformedInput(f"line {line_no}: expected {len(header)} cells")
        row = {"id": cells[0].strip(), "activity": cells[1].strip(), "timestamp": cells[2]}
        for otype, cell in zip(types, cells[3:]):
            row[otype] = _parse_cell(cell)
        rows.append(row)
    return import_table(rows, types)


# ---------------------------------------------------------------------------
# Projection and flattening


def project(log: OCEventLog, keep_types: Iterable[str]) -> OCEventLog:
    """Restrict a log to ``keep_types``; events left without references
    are dropped."""
    keep = frozenset(keep_types)
    unknown = keep - log.object_types
    if unknown:
        raise UnknownType(f"unknown object type(s): {sorted(unknown)}")
    if keep == log.object_types:
        return log
    events = []
    for ev in log.events:
        omap = {t: oids for t, oids in ev.omap.items() if t in keep}
        if omap:
            events.append(ev if len(omap) == len(ev.omap) else
                          Event(ev.eid, ev.activity, ev.timestamp, omap, ev.vmap))
    objects = {oid: o for oid, o in log.objects.items() if o.otype in keep}
    return OCEventLog._trusted(events, objects, keep)


def flatten(log: OCEventLog, otype: str) -> FlattenedLog:
    """One case per object of ``otype``; an event joins the trace of every
    object it references. Objects without events yield no case."""
    log.require_type(otype)
    cases = {}
    for obj in log.objects_of(otype):
        trace = tuple(
            TraceEvent(ev.eid, ev.activity, ev.timestamp) for ev in log.trace(obj.oid)
        )
        if trace:
            cases[obj.oid] = trace
    return FlattenedLog(otype, cases)


def utc_date(ts: datetime) -> date:
    if ts.tzinfo is not timezone.utc:
        ts = ts.astimezone(timezone.utc)
    return ts.date()
