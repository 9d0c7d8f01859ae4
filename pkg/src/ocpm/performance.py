"""Object-centric performance metrics for schedules and technicians.

All durations are exact :class:`fractions.Fraction` hours derived from
whole-second timestamp differences, so summaries can be recomputed from
records without rounding error.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from operator import itemgetter
from datetime import datetime
from fractions import Fraction
from typing import Mapping, Sequence

from . import activities as act
from .association import Binder
from .ocel import OCEventLog, utc_date
from .preprocessing import derive_daily_cases

__all__ = [
    "Trip",
    "OfficeLeg",
    "TripAssociation",
    "ScheduleHours",
    "ScheduleHoursReport",
    "HoldImpact",
    "PerfStat",
    "hours_between",
    "associate_trips",
    "trip_association",
    "transit_times",
    "lagging_times",
    "schedule_hours",
    "daily_labor_hours",
    "hold_impact",
    "transit_share",
    "accumulated_transit",
    "cascade_delays",
    "mean_by_index",
    "all_metrics",
]


def hours_between(start: datetime, end: datetime) -> Fraction:
    delta = end - start
    return Fraction(delta.days * 86400 + delta.seconds, 3600)


def exact_sum(values) -> Fraction:
    """Sum of Fractions; numerators are added per denominator with plain
    integers, which is much faster than chained Fraction additions."""
    by_den = defaultdict(int)
    for v in values:
        by_den[v.denominator] += v.numerator
    return sum((Fraction(n, d) for d, n in by_den.items()), Fraction(0))


def exact_sorted(values) -> list:
    """Sort Fractions exactly; a float pre-sort does the bulk of the work
    and runs of equal floats are re-sorted by exact value."""
    keyed = sorted(((float(v), v) for v in values), key=itemgetter(0))
    out, i, n = [], 0, len(keyed)
    while i < n:
        j = i + 1
        while j < n and keyed[j][0] == keyed[i][0]:
            j += 1
        if j - i == 1:
            out.append(keyed[i][1])
        else:
            out.extend(sorted(v for _, v in keyed[i:j]))
        i = j
    return out


def _percentile(sorted_values: Sequence, q: int):
    # nearest-rank: always a member of the sample
    rank = max(1, math.ceil(q * len(sorted_values) / 100))
    return sorted_values[rank - 1]


@dataclass(frozen=True)
class PerfStat:
    """A named metric: keyed records plus summary statistics.

    ``counters`` carries side counts (skipped owners, early acceptances).
    Percentiles use the nearest-rank method.
    """

    name: str
    records: tuple = ()
    unit: str = "hours"
    counters: Mapping[str, int] = field(default_factory=dict)

    @property
    def values(self) -> list:
        return [v for _, v in self.records]

    @property
    def count(self) -> int:
        return len(self.records)

    @cached_property
    def _sorted(self) -> list:
        return exact_sorted(self.values)

    @property
    def min(self):
        return self._sorted[0] if self.records else None

    @property
    def max(self):
        return self._sorted[-1] if self.records else None

    @property
    def mean(self):
        if not self.records:
            return None
        return exact_sum(self.values) / len(self.records)

    @property
    def p50(self):
        return _percentile(self._sorted, 50) if self.records else None

    @property
    def p95(self):
        return _percentile(self._sorted, 95) if self.records else None

    def summary(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        return {
            "count": self.count,
            "min": f(self.min),
            "mean": f(self.mean),
            "max": f(self.max),
            "p50": f(self.p50),
            "p95": f(self.p95),
        }

    def to_dict(self, with_records: bool = False) -> dict:
        doc = {"metric": self.name, "unit": self.unit, "summary": self.summary()}
        if self.counters:
            doc["counters"] = dict(sorted(self.counters.items()))
        if with_records:
            doc["records"] = [{"key": k, "value": float(v), "exact": str(Fraction(v))}
                              for k, v in self.records]
        return doc

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        # the exact column keeps summaries recomputable from the file
        writer.writerow(["key", f"value_{self.unit}", "value_exact"])
        for key, value in self.records:
            writer.writerow([key, f"{float(value):.4f}", str(Fraction(value))])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# Trips


@dataclass(frozen=True)
class Trip:
    technician: str
    bound_schedule: str | None
    enroute_at: datetime
    onsite_at: datetime
    enroute_eid: str = ""
    onsite_eid: str = ""

    @property
    def transit(self) -> Fraction:
        return hours_between(self.enroute_at, self.onsite_at)


@dataclass(frozen=True)
class OfficeLeg:
    """A HEAD OFFICE -> ARRIVE OFFICE leg taken while ``schedule`` was open
    and followed by a new trip to that same schedule."""

    technician: str
    schedule: str
    head_at: datetime
    arrive_at: datetime

    @property
    def duration(self) -> Fraction:
        return hours_between(self.head_at, self.arrive_at)


@dataclass(frozen=True)
class TripAssociation:
    trips: tuple
    unmatched_enroutes: tuple
    orphan_onsites: tuple
    office_legs: tuple


def _associate(log: OCEventLog) -> TripAssociation:
    binder = Binder()
    open_enroute = {}
    open_office = {}
    pending_leg = {}
    trips, unmatched, orphans, legs = [], [], [], []
    for pos, ev in enumerate(log.events):
        binder.observe(pos, ev)
        a = ev.activity
        if a not in (act.ENROUTE, act.ONSITE, act.HEAD_OFFICE, act.ARRIVE_OFFICE):
            continue
        for tech in ev.refs(act.TECHNICIAN):
            if a == act.ENROUTE:
                prev = open_enroute.get(tech)
                if prev is not None:
                    unmatched.append(prev.eid)
                open_enroute[tech] = ev
            elif a == act.ONSITE:
                start = open_enroute.pop(tech, None)
                if start is None:
                    orphans.append(ev.eid)
                    continue
                bound = binder.bound(tech)
                trips.append(Trip(tech, bound, start.timestamp, ev.timestamp,
                                  start.eid, ev.eid))
                leg = pending_leg.pop(tech, None)
                if leg is not None and bound is not None and leg[0] == bound:
                    legs.append(OfficeLeg(tech, bound, leg[1], leg[2]))
            elif a == act.HEAD_OFFICE:
                open_office[tech] = (binder.bound(tech), ev.timestamp)
            else:
                head = open_office.pop(tech, None)
                if head is not None and head[0] is not None:
                    pending_leg[tech] = (head[0], head[1], ev.timestamp)
                else:
                    pending_leg.pop(tech, None)
    unmatched.extend(ev.eid for ev in open_enroute.values())
    return TripAssociation(tuple(trips), tuple(unmatched), tuple(orphans), tuple(legs))


def trip_association(log: OCEventLog) -> TripAssociation:
    """Trips, unmatched ENROUTEs and counted office legs (cached per log)."""
    return log.memo("trip_association", _associate)


def associate_trips(log: OCEventLog) -> list:
    """Pair each technician's ENROUTE with its next ONSITE.

    A trip is bound to the schedule the technician most recently ACCEPTed
    without a later JOB DONE, evaluated at the ONSITE event. A second
    ENROUTE before any ONSITE leaves the first one unmatched.
    """
    return list(trip_association(log).trips)


def transit_times(log: OCEventLog) -> PerfStat:
    assoc = trip_association(log)
    return PerfStat(
        "transit_time",
        tuple((f"{t.technician}/{t.onsite_eid}", t.transit) for t in assoc.trips),
        counters={"unmatched_enroute": len(assoc.unmatched_enroutes)},
    )


# ---------------------------------------------------------------------------
# Schedule anchors


def _anchors(log: OCEventLog) -> dict:
    def build(log):
        out = {}
        for obj in log.objects_of(act.SCHEDULE):
            first, last = {}, {}
            for ev in log.trace(obj.oid):
                first.setdefault(ev.activity, ev.timestamp)
                last[ev.activity] = ev.timestamp
            out[obj.oid] = (first, last)
        return out

    return log.memo("schedule_anchors", build)


def lagging_times(log: OCEventLog) -> PerfStat:
    """ACCEPT minus SCHEDULER START per schedule, positive values only.

    Non-positive lags are excluded from the records and tallied in
    ``counters['early']``.
    """
    records, early, skipped = [], 0, 0
    for oid, (first, _) in _anchors(log).items():
        start, accept = first.get(act.SCHEDULER_START), first.get(act.ACCEPT)
        if start is None or accept is None:
            skipped += 1
            continue
        lag = hours_between(start, accept)
        if lag > 0:
            records.append((oid, lag))
        else:
            early += 1
    return PerfStat("lagging_time", tuple(records),
                    counters={"early": early, "skipped": skipped})


@dataclass(frozen=True)
class ScheduleHours:
    schedule: str
    scheduled_hours: Fraction
    actual_hours: Fraction

    @property
    def overwork(self) -> bool:
        return self.actual_hours > self.scheduled_hours


@dataclass(frozen=True)
class ScheduleHoursReport:
    records: tuple
    overwork: PerfStat
    skipped: int

    @property
    def overwork_count(self) -> int:
        return self.overwork.count


def schedule_hours(log: OCEventLog) -> ScheduleHoursReport:
    """Scheduled (SCHEDULER START -> END) and actual (ACCEPT -> JOB CLOSED)
    hours. The overwork stat holds the excess hours of overwork schedules."""
    def build(log):
        records, skipped = [], 0
        for oid, (first, last) in _anchors(log).items():
            start, end = first.get(act.SCHEDULER_START), last.get(act.SCHEDULER_END)
            accept, closed = first.get(act.ACCEPT), last.get(act.JOB_CLOSED)
            if None in (start, end, accept, closed):
                skipped += 1
                continue
            records.append(ScheduleHours(oid, hours_between(start, end),
                                         hours_between(accept, closed)))
        over = PerfStat(
            "overwork",
            tuple((r.schedule, r.actual_hours - r.scheduled_hours)
                  for r in records if r.overwork),
            counters={"schedules": len(records), "skipped": skipped},
        )
        return ScheduleHoursReport(tuple(records), over, skipped)

    return log.memo("schedule_hours", build)


# ---------------------------------------------------------------------------
# Technician days


def daily_labor_hours(log: OCEventLog, otype: str = act.TECHNICIAN) -> PerfStat:
    """Span from first to last event of each technician-day."""
    days = derive_daily_cases(log, otype)
    return PerfStat(
        "daily_labor_hours",
        tuple((cid, hours_between(tr[0].timestamp, tr[-1].timestamp))
              for cid, tr in days.cases.items()),
    )


@dataclass(frozen=True)
class HoldImpact:
    mean_with_hold: Fraction | None
    mean_without_hold: Fraction | None
    days_with_hold: int
    days_without_hold: int

    @property
    def ratio(self):
        if not self.mean_with_hold or not self.mean_without_hold:
            return None
        return self.mean_with_hold / self.mean_without_hold

    def to_dict(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        return {
            "mean_with_hold": f(self.mean_with_hold),
            "mean_without_hold": f(self.mean_without_hold),
            "days_with_hold": self.days_with_hold,
            "days_without_hold": self.days_without_hold,
            "ratio": f(self.ratio),
        }


def hold_impact(log: OCEventLog, otype: str = act.TECHNICIAN) -> HoldImpact:
    """Compare mean daily span of days with and without a HOLD event."""
    days = derive_daily_cases(log, otype)
    with_hold, without = [], []
    for trace in days.cases.values():
        span = hours_between(trace[0].timestamp, trace[-1].timestamp)
        if any(te.activity == act.HOLD for te in trace):
            with_hold.append(span)
        else:
            without.append(span)

    def mean(xs):
        return exact_sum(xs) / len(xs) if xs else None

    return HoldImpact(mean(with_hold), mean(without), len(with_hold), len(without))


# ---------------------------------------------------------------------------
# Transit in relation to scheduled time


def _bound_trips(log: OCEventLog) -> dict:
    out = defaultdict(list)
    for trip in trip_association(log).trips:
        if trip.bound_schedule is not None:
            out[trip.bound_schedule].append(trip)
    return out


def transit_share(log: OCEventLog) -> PerfStat:
    """First bound trip's transit divided by the schedule's scheduled hours."""
    scheduled = {r.schedule: r.scheduled_hours for r in schedule_hours(log).records}
    anchors = _anchors(log)
    records, zero, skipped = [], 0, 0
    for oid, trips in sorted(_bound_trips(log).items()):
        hours = scheduled.get(oid)
        if hours is None and oid in anchors:
            first, last = anchors[oid]
            s, e = first.get(act.SCHEDULER_START), last.get(act.SCHEDULER_END)
            hours = hours_between(s, e) if s and e else None
        if hours is None:
            skipped += 1
        elif hours == 0:
            zero += 1
        else:
            records.append((oid, trips[0].transit / hours))
    return PerfStat("transit_share", tuple(records), unit="ratio",
                    counters={"zero_scheduled": zero, "skipped": skipped})


def accumulated_transit(log: OCEventLog) -> PerfStat:
    """All bound trips plus office-return legs, summed per schedule."""
    totals = defaultdict(Fraction)
    for oid, trips in _bound_trips(log).items():
        for trip in trips:
            totals[oid] += trip.transit
    for leg in trip_association(log).office_legs:
        totals[leg.schedule] += leg.duration
    return PerfStat("accumulated_transit", tuple(sorted(totals.items())))


def cascade_delays(log: OCEventLog, otype: str = act.TECHNICIAN) -> PerfStat:
    """Processing delay of the 2nd, 3rd, ... schedule of each technician-day.

    Schedules of a day are those referenced by the technician's events on
    that date, ranked by SCHEDULER START. Delay is first INPROCESS minus
    SCHEDULER START, floored at zero. Keys are ``<tech>@<date>#<index>``.
    """
    log.require_type(otype)
    anchors = _anchors(log)
    records, skipped = [], 0
    for obj in log.objects_of(otype):
        per_day = defaultdict(set)
        for ev in log.trace(obj.oid):
            per_day[utc_date(ev.timestamp)].update(ev.refs(act.SCHEDULE))
        for day in sorted(per_day):
            ranked = []
            for sid in per_day[day]:
                first = anchors[sid][0] if sid in anchors else {}
                start = first.get(act.SCHEDULER_START)
                if start is None:
                    skipped += 1
                else:
                    ranked.append((start, sid))
            ranked.sort()
            for index, (start, sid) in enumerate(ranked, start=1):
                if index < 2:
                    continue
                inproc = anchors[sid][0].get(act.INPROCESS)
                if inproc is None:
                    skipped += 1
                    continue
                delay = max(Fraction(0), hours_between(start, inproc))
                records.append((f"{obj.oid}@{day.isoformat()}#{index}", delay))
    return PerfStat("cascade_delay", tuple(records), counters={"skipped": skipped})


def mean_by_index(stat: PerfStat) -> dict:
    """Mean cascade delay per schedule index."""
    groups = defaultdict(list)
    for key, value in stat.records:
        groups[int(key.rsplit("#", 1)[1])].append(value)
    return {i: exact_sum(v) / len(v) for i, v in sorted(groups.items())}


METRICS = (
    "transit", "lagging", "overwork", "daily_hours", "transit_share",
    "accumulated_transit", "cascade",
)


def all_metrics(log: OCEventLog, selection: Sequence[str] = METRICS) -> dict:
    """Evaluate the selected metrics; returns name -> PerfStat plus
    ``hold_impact``."""
    table = {
        "transit": transit_times,
        "lagging": lagging_times,
        "overwork": lambda lg: schedule_hours(lg).overwork,
        "daily_hours": daily_labor_hours,
        "transit_share": transit_share,
        "accumulated_transit": accumulated_transit,
        "cascade": cascade_delays,
    }
    out = {}
    for name in selection:
        if name not in table:
            raise KeyError(f"unknown metric {name!r}")
        out[name] = table[name](log)
    if "daily_hours" in selection:
        out["hold_impact"] = hold_impact(log)
    return out
