"""Hand-log builders and hypothesis strategies shared by the test modules."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from hypothesis import strategies as st

from ocpm import activities as act
from ocpm.ocel import Event, ObjectInstance, OCEventLog

BASE = datetime(2023, 1, 2, tzinfo=timezone.utc)

SAMPLE_ROWS = [
    {"id": "e1", "activity": "ACCEPT", "timestamp": "2023-01-02 08:54",
     "technician": ["4006975"], "schedule": ["3948148"]},
    {"id": "e2", "activity": "ENROUTE", "timestamp": "2023-01-02 08:54",
     "technician": ["4006975"], "schedule": []},
    {"id": "e3", "activity": "ONSITE", "timestamp": "2023-01-02 12:51",
     "technician": ["4006975"], "schedule": []},
    {"id": "e4", "activity": "INPROCESS", "timestamp": "2023-01-02 12:51",
     "technician": ["4006975"], "schedule": ["3948148"]},
]

SAMPLE_CSV = """Id,Activity,Timestamp,Technician,Schedule
e1,ACCEPT,2023-01-02 08:54,[4006975],[3948148]
e2,ENROUTE,2023-01-02 08:54,[4006975],
e3,ONSITE,2023-01-02 12:51,[4006975],
e4,INPROCESS,2023-01-02 12:51,[4006975],[3948148]
"""


def at(hhmm: str, day: int = 0) -> datetime:
    h, m = hhmm.split(":")
    return BASE + timedelta(days=day, hours=int(h), minutes=int(m))


def ev(eid, activity, when, schedule=(), technician=(), day=0, **other):
    """Event shorthand; ``when`` is ``"HH:MM"`` or a datetime."""
    ts = at(when, day) if isinstance(when, str) else when
    omap = {}
    if schedule:
        omap[act.SCHEDULE] = tuple([schedule] if isinstance(schedule, str) else schedule)
    if technician:
        omap[act.TECHNICIAN] = tuple([technician] if isinstance(technician, str) else technician)
    for otype, oids in other.items():
        omap[otype] = tuple([oids] if isinstance(oids, str) else oids)
    return Event(eid, activity, ts, omap)


def build(events, attributes=None, types=(act.SCHEDULE, act.TECHNICIAN), extra_objects=()):
    """Log from events; objects are inferred from the references."""
    attributes = attributes or {}
    objects = {}
    for e in events:
        for otype, oids in e.omap.items():
            for oid in oids:
                objects[oid] = ObjectInstance(oid, otype, attributes.get(oid, {}))
    for obj in extra_objects:
        objects[obj.oid] = obj
    declared = set(types) | {o.otype for o in objects.values()}
    return OCEventLog(tuple(events), objects, frozenset(declared))


# ---------------------------------------------------------------------------
# hypothesis strategies

SCHEDULES = ("S1", "S2", "S3")
TECHNICIANS = ("T1", "T2")


@st.composite
def small_logs(draw, max_events=20, activities=act.ACTIVITIES, minute_step=30):
    """Random valid logs over two object types.

    Timestamps come from a coarse grid so equal timestamps (and thus the
    eid tie-break) are common.
    """
    n = draw(st.integers(0, max_events))
    events = []
    for i in range(n):
        activity = draw(st.sampled_from(activities))
        minute = draw(st.integers(0, 24)) * minute_step
        scheds = draw(st.lists(st.sampled_from(SCHEDULES), unique=True, max_size=2))
        techs = draw(st.lists(st.sampled_from(TECHNICIANS), unique=True, max_size=2))
        if not scheds and not techs:
            techs = [draw(st.sampled_from(TECHNICIANS))]
        events.append(Event(f"e{i:02d}", activity, BASE + timedelta(minutes=minute),
                            {k: tuple(v) for k, v in
                             ((act.SCHEDULE, scheds), (act.TECHNICIAN, techs)) if v}))
    regions = draw(st.lists(st.sampled_from(["North", "South"]), min_size=5, max_size=5))
    attrs = {oid: {"region": r} for oid, r in zip(SCHEDULES + TECHNICIANS, regions)}
    return build(events, attrs)


AFTER_SALES_SHAPED = (
    act.SCHEDULER_START, act.ACCEPT, act.ENROUTE, act.ONSITE, act.INPROCESS,
    act.HOLD, act.JOB_DONE, act.HEAD_OFFICE, act.ARRIVE_OFFICE, act.JOB_CLOSED,
    act.SURVEY_SENT, act.SCHEDULER_END, act.REJECT,
)


@st.composite
def convention_logs(draw, max_events=30):
    """Random logs whose events follow the usual omap convention (one
    technician and/or one schedule per event), so trips, bindings and
    anchors all occur frequently."""
    n = draw(st.integers(0, max_events))
    events = []
    for i in range(n):
        activity = draw(st.sampled_from(AFTER_SALES_SHAPED))
        minute = draw(st.integers(0, 40)) * 15 + draw(st.sampled_from([0, 0, 1440]))
        types = act.OMAP_CONVENTION[activity]
        omap = {}
        if act.SCHEDULE in types:
            omap[act.SCHEDULE] = (draw(st.sampled_from(SCHEDULES)),)
        if act.TECHNICIAN in types:
            omap[act.TECHNICIAN] = (draw(st.sampled_from(TECHNICIANS)),)
        events.append(Event(f"e{i:02d}", activity, BASE + timedelta(minutes=minute), omap))
    return build(events)


_SERVICE_PATH = (act.ACCEPT, act.ENROUTE, act.ONSITE, act.INPROCESS, act.HOLD,
                 act.HEAD_OFFICE, act.ARRIVE_OFFICE, act.ENROUTE, act.ONSITE,
                 act.JOB_DONE, act.JOB_CLOSED, act.SURVEY_SENT)


@st.composite
def timeline_logs(draw, max_events=30):
    """Service-shaped timelines: up to three schedules handled by one or
    two technicians, each following the happy path with random drops,
    adjacent swaps, ties and day breaks."""
    events = []
    n_sched = draw(st.integers(1, 3))
    clock = draw(st.integers(6 * 60, 9 * 60))
    for i in range(n_sched):
        sid = SCHEDULES[i]
        tech = draw(st.sampled_from(TECHNICIANS))
        start = clock + draw(st.integers(-60, 120))
        end = start + draw(st.integers(0, 300))
        stamps = [(act.SCHEDULER_START, start, True, False),
                  (act.SCHEDULER_END, end, True, False)]
        t = start + draw(st.integers(-30, 90))
        for a in _SERVICE_PATH:
            if not draw(st.integers(0, 9)):
                continue
            t += draw(st.sampled_from([0, 0, 10, 25, 60, 150]))
            types = act.OMAP_CONVENTION[a]
            stamps.append((a, t, act.SCHEDULE in types, True))
        if draw(st.booleans()) and len(stamps) > 3:
            k = draw(st.integers(2, len(stamps) - 2))
            (a1, t1, s1, r1), (a2, t2, s2, r2) = stamps[k], stamps[k + 1]
            stamps[k], stamps[k + 1] = (a2, t1, s2, r2), (a1, t2, s1, r1)
        for a, minute, with_s, with_t in stamps:
            if len(events) >= max_events:
                break
            omap = {}
            if with_s:
                omap[act.SCHEDULE] = (sid,)
            if with_t:
                omap[act.TECHNICIAN] = (tech,)
            events.append(Event(f"e{len(events):02d}", a, BASE + timedelta(minutes=minute), omap))
        clock = t
    return build(events)
