"""Deterministic generator of synthetic after-sales service logs.

Each technician works ``day_count`` days. A day's schedules are planned
back to back from ``day_start_hour``; the technician handles them one after
another, so an overrunning schedule pushes the following ones back. A
schedule follows the reference path

    SCHEDULER START, ACCEPT, ENROUTE, ONSITE, INPROCESS, [HOLD, INPROCESS],
    JOB DONE, HEAD OFFICE, ARRIVE OFFICE, JOB CLOSED, SURVEY SENT,
    SCHEDULER END (at the planned end)

or SCHEDULER START, REJECT, SCHEDULER END when rejected. Per schedule at
most one data anomaly (incomplete, order anomaly, multi-technician) or,
failing that, at most one process deviation (D1 survey omitted, D2 HOLD
before ONSITE, D3 survey before JOB DONE) is injected, so every injected
case is counted exactly once by the matching detector.

Randomness comes from a single :class:`random.Random` (Mersenne Twister,
seeded with the integer seed) and only ``random()`` is called, in a fixed
order: technician regions, then per technician-day three day-level draws
followed by ``_DRAWS`` draws per planned schedule. All times are whole
minutes.

Hold days: a technician-day containing a HOLD event works longer. After
all days are simulated, the mean span of days without HOLD is measured and
every HOLD day is extended by the same number of minutes (inserted at the
last JOB DONE of the day) so that the mean HOLD-day span equals
``hold_day_factor`` times the mean span of the other days.
"""

from __future__ import annotations

import json
import logging
import random
import re
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields
from datetime import date, datetime, time, timedelta, timezone
from fractions import Fraction
from typing import Mapping

from . import activities as act
from .discovery import DFG, OCDFG, CardinalityProfile, ProfileEntry
from .exceptions import InvalidConfig
from .ocel import Event, ObjectInstance, OCEventLog

logger = logging.getLogger(__name__)

__all__ = [
    "Dist",
    "GenConfig",
    "GroundTruth",
    "generate",
    "reference_model",
    "reference_closure",
]


@dataclass(frozen=True)
class Dist:
    """``uniform`` over ``[lo, hi]`` or ``fixed`` at ``lo`` (hours)."""

    kind: str = "fixed"
    lo: float = 0.0
    hi: float = 0.0

    @classmethod
    def uniform(cls, lo, hi):
        return cls("uniform", float(lo), float(hi))

    @classmethod
    def fixed(cls, value):
        return cls("fixed", float(value), float(value))

    @classmethod
    def parse(cls, doc) -> "Dist":
        if isinstance(doc, Dist):
            return doc
        if isinstance(doc, (int, float)) and not isinstance(doc, bool):
            return cls.fixed(doc)
        if isinstance(doc, Mapping) and len(doc) == 1:
            if "fixed" in doc:
                return cls.fixed(doc["fixed"])
            if "uniform" in doc and len(doc["uniform"]) == 2:
                return cls.uniform(*doc["uniform"])
        raise InvalidConfig(f"bad distribution {doc!r}")

    def to_json(self):
        return {"fixed": self.lo} if self.kind == "fixed" else {"uniform": [self.lo, self.hi]}

    @property
    def mean(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def std(self) -> float:
        return (self.hi - self.lo) / 12 ** 0.5

    def minutes(self, u: float) -> int:
        return int(round((self.lo + (self.hi - self.lo) * u) * 60))

    def validate(self, name):
        if self.kind not in ("fixed", "uniform"):
            raise InvalidConfig(f"{name}: unknown distribution kind {self.kind!r}")
        if self.lo < 0 or self.hi < self.lo:
            raise InvalidConfig(f"{name}: bounds must satisfy 0 <= lo <= hi")


_PROBABILITIES = (
    "p_reject", "p_hold", "p_survey_omit", "p_hold_before_onsite",
    "p_survey_before_job_done", "p_incomplete", "p_order_anomaly",
    "p_multi_technician", "p_office_return", "p_overrun",
)
_DISTS = ("scheduled_hours", "transit_hours", "processing_hours", "lag_hours",
          "hold_hours", "overrun_hours")


@dataclass(frozen=True)
class GenConfig:
    seed: int = 42
    technician_count: int = 10
    schedules_per_technician_per_day: tuple = (1, 3)
    day_count: int = 5
    start_date: str = "2023-01-02"
    day_start_hour: float = 7.0
    regions: tuple = (("Tuzla EP", 3.0), ("Istanbul Avrupa", 2.0), ("Ankara", 1.0))
    scheduled_hours: Dist = Dist.uniform(2.0, 4.0)
    transit_hours: Dist = Dist.uniform(0.25, 1.25)
    processing_hours: Dist = Dist.uniform(1.0, 2.5)
    lag_hours: Dist = Dist.uniform(0.1, 0.75)
    hold_hours: Dist = Dist.uniform(0.1, 0.5)
    overrun_hours: Dist = Dist.uniform(1.0, 2.0)
    p_reject: float = 0.03
    p_hold: float = 0.3
    p_survey_omit: float = 0.0
    p_hold_before_onsite: float = 0.0
    p_survey_before_job_done: float = 0.0
    p_incomplete: float = 0.0
    p_order_anomaly: float = 0.0
    p_multi_technician: float = 0.0
    p_office_return: float = 0.1
    p_overrun: float = 0.0
    hold_day_factor: float = 1.03

    def validate(self) -> "GenConfig":
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")
        if self.technician_count < 0 or self.day_count < 0:
            raise InvalidConfig("counts must be >= 0")
        lo, hi = self.schedules_per_technician_per_day
        if lo < 0 or hi < lo:
            raise InvalidConfig("schedules_per_technician_per_day must be 0 <= lo <= hi")
        if not 0 <= self.day_start_hour < 24:
            raise InvalidConfig("day_start_hour must lie in [0, 24)")
        for name in _PROBABILITIES:
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1]")
        for name in _DISTS:
            getattr(self, name).validate(name)
        if self.technician_count and (
            not self.regions or any(w <= 0 for _, w in self.regions)
        ):
            raise InvalidConfig("regions need positive weights")
        if self.hold_day_factor < 1.0:
            raise InvalidConfig("hold_day_factor must be >= 1")
        try:
            date.fromisoformat(self.start_date)
        except ValueError as exc:
            raise InvalidConfig(f"bad start_date {self.start_date!r}") from exc
        return self

    @classmethod
    def from_dict(cls, doc: Mapping) -> "GenConfig":
        """Build from JSON-style keys; camelCase aliases are accepted."""
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in doc.items():
            name = re.sub(r"(?<!^)(?=[A-Z])", "_", key).lower()
            if name not in known:
                raise InvalidConfig(f"unknown GenConfig field {key!r}")
            if name in _DISTS:
                value = Dist.parse(value)
            elif name == "schedules_per_technician_per_day":
                value = tuple(value) if not isinstance(value, int) else (value, value)
            elif name == "regions":
                value = tuple(
                    (r, 1.0) if isinstance(r, str) else (r[0], float(r[1]))
                    for r in (value.items() if isinstance(value, Mapping) else value)
                )
            kwargs[name] = value
        try:
            return cls(**kwargs).validate()
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "GenConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"invalid JSON config: {exc}") from exc

    def to_dict(self) -> dict:
        doc = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Dist):
                value = value.to_json()
            elif f.name == "regions":
                value = [[r, w] for r, w in value]
            elif isinstance(value, tuple):
                value = list(value)
            doc[f.name] = value
        return doc


@dataclass
class GroundTruth:
    """What the generator injected, measured back from the emitted events.

    ``injected`` counts D1/D2/D3 deviations and data anomalies. ``params``
    holds configured and realized parameters. Realized means and the
    overwork count are taken over *retained* schedules, i.e. those that
    survive preprocessing (not rejected, incomplete, order-anomalous or
    multi-technician). ``hold_days`` maps ``"<tech>@<date>"`` to whether the
    day holds a HOLD event.
    """

    injected: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    hold_days: dict = field(default_factory=dict)
    schedules: list = field(default_factory=list)
    removed: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


# draw slots per planned schedule
(_U_SCHEDULED, _U_LAG, _U_TRANSIT, _U_PROCESSING, _U_RETURN, _U_REJECT,
 _U_INCOMPLETE, _U_ORDER, _U_MULTI, _U_PARTNER, _U_D1, _U_D2, _U_D3,
 _U_OFFICE, _U_OFFICE_SPLIT, _U_LEG1, _U_LEG2, _U_OVERRUN, _U_OVERRUN_H,
 _U_HOLD_SPLIT, _U_HOLD_H, _DRAWS) = range(22)

_CUTOFF_MINUTES = 22 * 60


class _Proto:
    __slots__ = ("minute", "seq", "activity", "schedule", "techs", "tech_day")

    def __init__(self, minute, seq, activity, schedule, techs, tech_day):
        self.minute = minute
        self.seq = seq
        self.activity = activity
        self.schedule = schedule
        self.techs = techs
        self.tech_day = tech_day


@dataclass
class _Sched:
    sid: str
    tech: str
    day: str
    index: int
    kind: str = "normal"
    deviation: str | None = None
    partner: str | None = None
    office_return: bool = False
    hold_cycle: bool = False
    overrun: bool = False
    events: list = field(default_factory=list)


def generate(config: GenConfig):
    """Generate ``(log, truth)``; identical configs give identical logs."""
    config.validate()
    rng = random.Random(config.seed)
    base_day = datetime.combine(date.fromisoformat(config.start_date), time(),
                                tzinfo=timezone.utc)
    techs = [str(4_000_001 + i) for i in range(config.technician_count)]
    cum, total = [], 0.0
    for _, w in config.regions:
        total += w
        cum.append(total)
    tech_region = {}
    for t in techs:
        u = rng.random() * total
        idx = next((i for i, c in enumerate(cum) if u < c), len(cum) - 1)
        tech_region[t] = config.regions[idx][0]

    protos = []
    scheds = []
    day_events = defaultdict(list)  # tech_day -> protos emitted while simulating it
    seq = 0
    sched_no = 0
    lo_n, hi_n = config.schedules_per_technician_per_day
    start_minute = int(round(config.day_start_hour * 60))

    for d in range(config.day_count):
        day0 = d * 1440
        day_iso = (base_day + timedelta(days=d)).date().isoformat()
        for tech in techs:
            u_n, u_hold, u_pick = rng.random(), rng.random(), rng.random()
            n = lo_n + min(int(u_n * (hi_n - lo_n + 1)), hi_n - lo_n)
            draws = [[rng.random() for _ in range(_DRAWS)] for _ in range(n)]
            if not n:
                continue
            tech_day = f"{tech}@{day_iso}"
            day_sched = []
            for k, u in enumerate(draws):
                s = _Sched(str(3_000_001 + sched_no), tech, day_iso, k + 1)
                sched_no += 1
                if u[_U_REJECT] < config.p_reject:
                    s.kind = "reject"
                elif u[_U_INCOMPLETE] < config.p_incomplete:
                    s.kind = "incomplete"
                elif u[_U_ORDER] < config.p_order_anomaly:
                    s.kind = "order_anomaly"
                elif u[_U_MULTI] < config.p_multi_technician and len(techs) > 1:
                    s.kind = "multi_technician"
                    others = [t for t in techs if t != tech]
                    s.partner = others[min(int(u[_U_PARTNER] * len(others)), len(others) - 1)]
                elif u[_U_D1] < config.p_survey_omit:
                    s.deviation = "D1"
                elif u[_U_D2] < config.p_hold_before_onsite:
                    s.deviation = "D2"
                elif u[_U_D3] < config.p_survey_before_job_done:
                    s.deviation = "D3"
                if s.kind != "reject":
                    s.office_return = u[_U_OFFICE] < config.p_office_return
                    s.overrun = k == 0 and u[_U_OVERRUN] < config.p_overrun
                day_sched.append(s)
            if u_hold < config.p_hold:
                eligible = [s for s in day_sched if s.kind not in ("reject", "incomplete")]
                if eligible:
                    eligible[min(int(u_pick * len(eligible)), len(eligible) - 1)].hold_cycle = True

            planned = day0 + start_minute
            free = planned
            emitted = []
            for s, u in zip(day_sched, draws):
                length = max(1, config.scheduled_hours.minutes(u[_U_SCHEDULED]))
                p_start, p_end = planned, planned + length
                planned = p_end
                local = []

                def emit(minute, activity, techs_=(), sched=True):
                    local.append((minute, activity, s.sid if sched else None, techs_))

                sim_free = _simulate(s, u, config, p_start, p_end, free, emit)
                if sim_free - day0 > _CUTOFF_MINUTES or p_end - day0 > 1439:
                    # later schedules of an overlong day are not planned
                    break
                free = sim_free
                for minute, activity, sid, techs_ in local:
                    pr = _Proto(minute, seq, activity, sid, techs_, tech_day)
                    seq += 1
                    protos.append(pr)
                    s.events.append(pr)
                    if techs_:
                        day_events[tech_day].append(pr)
                emitted.append(s)
            scheds.extend(emitted)

    hold_extension = _calibrate_hold_days(day_events, config.hold_day_factor)
    log = _build_log(protos, scheds, techs, tech_region, base_day)
    truth = _truth(config, scheds, protos, hold_extension)
    return log, truth


def _simulate(s: _Sched, u, config: GenConfig, p_start, p_end, free, emit):
    """Emit one schedule's events; returns when the technician is free."""
    tech = (s.tech,)
    lag = config.lag_hours.minutes(u[_U_LAG])
    start_at, end_at = (p_end, p_start) if s.kind == "order_anomaly" else (p_start, p_end)
    emit(start_at, act.SCHEDULER_START)
    if s.kind == "reject":
        t = max(p_start + lag, free)
        emit(t, act.REJECT, tech)
        emit(end_at, act.SCHEDULER_END)
        return t
    accept = max(p_start + lag, free)
    emit(accept, act.ACCEPT, tech)
    if s.deviation == "D2":
        emit(accept, act.HOLD, tech)
    emit(accept, act.ENROUTE, tech, sched=False)
    t = accept + config.transit_hours.minutes(u[_U_TRANSIT])
    emit(t, act.ONSITE, tech, sched=False)
    emit(t, act.INPROCESS, tech)
    work = config.processing_hours.minutes(u[_U_PROCESSING])
    if s.overrun:
        work += config.overrun_hours.minutes(u[_U_OVERRUN_H])
    if s.kind == "incomplete":
        return t + work
    if s.office_return:
        before = int(work * u[_U_OFFICE_SPLIT])
        t += before
        work -= before
        emit(t, act.HEAD_OFFICE, tech, sched=False)
        t += config.transit_hours.minutes(u[_U_LEG1])
        emit(t, act.ARRIVE_OFFICE, tech, sched=False)
        emit(t, act.ENROUTE, tech, sched=False)
        t += config.transit_hours.minutes(u[_U_LEG2])
        emit(t, act.ONSITE, tech, sched=False)
        emit(t, act.INPROCESS, tech)
    if s.hold_cycle:
        # the pause is taken out of the processing time
        x = int(work * u[_U_HOLD_SPLIT])
        pause = min(config.hold_hours.minutes(u[_U_HOLD_H]), work - x)
        emit(t + x, act.HOLD, tech)
        emit(t + x + pause, act.INPROCESS, tech)
    done = t + work
    if s.deviation == "D3":
        emit(done, act.SURVEY_SENT, tech)
    emit(done, act.JOB_DONE, tech)
    emit(done, act.HEAD_OFFICE, tech, sched=False)
    back = done + config.transit_hours.minutes(u[_U_RETURN])
    emit(back, act.ARRIVE_OFFICE, tech, sched=False)
    emit(back, act.JOB_CLOSED, tech)
    if s.deviation not in ("D1", "D3"):
        survey_techs = tech + ((s.partner,) if s.partner else ())
        emit(back, act.SURVEY_SENT, survey_techs)
    emit(end_at, act.SCHEDULER_END)
    return back


def _own_span(events):
    minutes = [e.minute for e in events]
    return max(minutes) - min(minutes)


def _calibrate_hold_days(day_events, factor) -> int:
    """Extend every HOLD day by one common number of minutes so the mean
    HOLD-day span is ``factor`` times the mean span of other days."""
    hold, plain = [], []
    for key, evs in day_events.items():
        (hold if any(e.activity == act.HOLD for e in evs) else plain).append(key)
    if not hold or not plain:
        return 0
    m0 = Fraction(sum(_own_span(day_events[k]) for k in plain), len(plain))
    m1 = Fraction(sum(_own_span(day_events[k]) for k in hold), len(hold))
    extension = round(factor * m0 - m1)
    if extension < 0:
        logger.warning("HOLD days already %.1f%% longer; not extended", float(m1 / m0 - 1) * 100)
        return 0
    for key in hold:
        evs = day_events[key]
        done = max((e for e in evs if e.activity == act.JOB_DONE),
                   key=lambda e: (e.minute, e.seq), default=None)
        if done is None:
            continue
        pivot = (done.minute, done.seq)
        for e in evs:
            if (e.minute, e.seq) >= pivot:
                e.minute += extension
    return extension


def _build_log(protos, scheds, techs, tech_region, base_day) -> OCEventLog:
    protos = sorted(protos, key=lambda p: (p.minute, p.seq))
    width = max(6, len(str(len(protos))))
    events = []
    for i, p in enumerate(protos, start=1):
        omap = {}
        if p.schedule is not None:
            omap[act.SCHEDULE] = (p.schedule,)
        if p.techs:
            omap[act.TECHNICIAN] = tuple(p.techs)
        events.append(Event(f"e{i:0{width}d}", p.activity,
                            base_day + timedelta(minutes=p.minute), omap))
    objects = {t: ObjectInstance(t, act.TECHNICIAN, {"region": tech_region[t]}) for t in techs}
    for s in scheds:
        objects[s.sid] = ObjectInstance(s.sid, act.SCHEDULE, {"region": tech_region[s.tech]})
    return OCEventLog(tuple(events), objects, frozenset({act.SCHEDULE, act.TECHNICIAN}))


def _truth(config, scheds, protos, hold_extension) -> GroundTruth:
    injected = {"D1": 0, "D2": 0, "D3": 0, "incomplete": 0, "order_anomaly": 0,
                "multi_technician": 0, "reject": 0}
    records = []
    lags, transits, retained_transits = [], [], []
    overwork = 0
    removed = {"incomplete": [], "order_anomaly": [], "multi_technician": []}
    for s in scheds:
        if s.kind in injected:
            injected[s.kind] += 1
            if s.kind in removed:
                removed[s.kind].append(s.sid)
        if s.deviation:
            injected[s.deviation] += 1
        first, last = {}, {}
        trip_open = None
        trip_minutes = []
        for e in sorted(s.events, key=lambda e: (e.minute, e.seq)):
            first.setdefault(e.activity, e.minute)
            last[e.activity] = e.minute
            if e.activity == act.ENROUTE:
                trip_open = e.minute
            elif e.activity == act.ONSITE and trip_open is not None:
                trip_minutes.append(e.minute - trip_open)
                trip_open = None
        office = [b - a for a, b in _office_legs(s)]
        retained = s.kind in ("normal",)
        rec = {
            "schedule": s.sid, "technician": s.tech, "day": s.day, "index": s.index,
            "kind": s.kind, "deviation": s.deviation, "partner": s.partner,
            "office_return": s.office_return, "hold_cycle": s.hold_cycle,
            "overrun": s.overrun, "retained": retained,
        }
        transits.extend(trip_minutes)
        if retained:
            retained_transits.extend(trip_minutes)
            lag = first[act.ACCEPT] - first[act.SCHEDULER_START]
            scheduled = last[act.SCHEDULER_END] - first[act.SCHEDULER_START]
            actual = last[act.JOB_CLOSED] - first[act.ACCEPT]
            lags.append(lag)
            is_over = actual > scheduled
            overwork += is_over
            rec.update({
                "lag_minutes": lag, "scheduled_minutes": scheduled,
                "actual_minutes": actual, "overwork": is_over,
                "transit_minutes": trip_minutes,
                "accumulated_transit_minutes": sum(trip_minutes) + sum(office),
            })
        records.append(rec)

    hold_days, spans = _realized_days(protos)
    with_hold = [spans[k] for k, h in hold_days.items() if h]
    without = [spans[k] for k, h in hold_days.items() if not h]

    def mean_h(xs):
        return float(Fraction(sum(xs), len(xs)) / 60) if xs else None

    ratio = (Fraction(sum(with_hold), len(with_hold)) / Fraction(sum(without), len(without))
             if with_hold and without and sum(without) else None)
    params = {
        "configured": {
            "mean_transit_hours": config.transit_hours.mean,
            "std_transit_hours": config.transit_hours.std,
            "mean_lag_hours": config.lag_hours.mean,
            "std_lag_hours": config.lag_hours.std,
            "hold_day_factor": config.hold_day_factor,
        },
        "realized": {
            "mean_transit_hours": mean_h(transits),
            "mean_transit_hours_retained": mean_h(retained_transits),
            "mean_lag_hours": mean_h(lags),
            "overwork_count": overwork,
            "retained_schedules": sum(1 for r in records if r["retained"]),
            "hold_ratio": None if ratio is None else float(ratio),
            "hold_extension_minutes": hold_extension,
            "mean_hold_day_hours": mean_h(with_hold),
            "mean_plain_day_hours": mean_h(without),
        },
    }
    start = date.fromisoformat(config.start_date)
    labels = {f"{t}@{(start + timedelta(days=d)).isoformat()}": h
              for (t, d), h in sorted(hold_days.items())}
    return GroundTruth(injected, params, labels, records,
                       {k: sorted(v) for k, v in removed.items()})


def _office_legs(s: _Sched):
    """Office legs taken mid-schedule (before JOB DONE)."""
    legs = []
    head = None
    for e in sorted(s.events, key=lambda e: (e.minute, e.seq)):
        if e.activity == act.JOB_DONE:
            break
        if e.activity == act.HEAD_OFFICE:
            head = e.minute
        elif e.activity == act.ARRIVE_OFFICE and head is not None:
            legs.append((head, e.minute))
            head = None
    return legs


def _realized_days(protos):
    days = defaultdict(list)
    for p in protos:
        for t in p.techs:
            days[(t, p.minute // 1440)].append(p)
    hold, spans = {}, {}
    for key, evs in days.items():
        hold[key] = any(e.activity == act.HOLD for e in evs)
        spans[key] = _own_span(evs)
    return hold, spans


# ---------------------------------------------------------------------------
# Reference model

_SCHEDULE_EDGES = (
    (act.SCHEDULER_START, act.ACCEPT), (act.SCHEDULER_START, act.REJECT),
    (act.REJECT, act.SCHEDULER_END), (act.ACCEPT, act.INPROCESS),
    (act.INPROCESS, act.INPROCESS), (act.INPROCESS, act.HOLD), (act.HOLD, act.INPROCESS),
    (act.INPROCESS, act.JOB_DONE), (act.JOB_DONE, act.JOB_CLOSED),
    (act.JOB_CLOSED, act.SURVEY_SENT), (act.SURVEY_SENT, act.SCHEDULER_END),
)
_TECHNICIAN_EDGES = (
    (act.ACCEPT, act.ENROUTE), (act.ENROUTE, act.ONSITE), (act.ONSITE, act.INPROCESS),
    (act.INPROCESS, act.HOLD), (act.HOLD, act.INPROCESS),
    (act.INPROCESS, act.HEAD_OFFICE), (act.ARRIVE_OFFICE, act.ENROUTE),
    (act.INPROCESS, act.JOB_DONE), (act.JOB_DONE, act.HEAD_OFFICE),
    (act.HEAD_OFFICE, act.ARRIVE_OFFICE), (act.ARRIVE_OFFICE, act.JOB_CLOSED),
    (act.JOB_CLOSED, act.SURVEY_SENT), (act.SURVEY_SENT, act.ACCEPT),
    (act.SURVEY_SENT, act.REJECT), (act.REJECT, act.ACCEPT), (act.REJECT, act.REJECT),
)


def _dfg(otype, edges, starts, ends):
    nodes = frozenset(a for e in edges for a in e)
    return DFG(otype, nodes, {e: 1 for e in sorted(edges)},
               {a: 1 for a in sorted(starts)}, {a: 1 for a in sorted(ends)})


def reference_model() -> OCDFG:
    """Hand-encoded OCDFG of the reference after-sales process, including
    rejection, HOLD cycles and mid-schedule office returns."""
    per_type = {
        act.SCHEDULE: _dfg(act.SCHEDULE, _SCHEDULE_EDGES, {act.SCHEDULER_START},
                           {act.SCHEDULER_END}),
        act.TECHNICIAN: _dfg(act.TECHNICIAN, _TECHNICIAN_EDGES, {act.ACCEPT, act.REJECT},
                             {act.SURVEY_SENT, act.REJECT}),
    }
    entries = {}
    for activity, types in act.OMAP_CONVENTION.items():
        for otype in (act.SCHEDULE, act.TECHNICIAN):
            n = 1 if otype in types else 0
            entries[(activity, otype)] = ProfileEntry(n, n)
    shared = {a: frozenset(ts) for a, ts in sorted(act.OMAP_CONVENTION.items())}
    return OCDFG(per_type, CardinalityProfile(dict(sorted(entries.items()))), shared)


def reference_closure(model: OCDFG, timers=(act.SCHEDULER_END,)) -> dict:
    """Directly-follows edges the reference can produce per type once
    time-triggered activities are allowed to fire anywhere.

    A timer activity ``T`` is cut out of its place (its predecessors may
    then end the trace) and may be inserted into any edge ``(a, b)``,
    producing ``(a, T)`` and ``(T, b)``; it may also directly follow the
    trace head.
    """
    out = {}
    for otype, dfg in model.per_type.items():
        edges = set(dfg.edges)
        for timer in timers:
            if timer not in dfg.nodes:
                continue
            preds = {a for a, b in edges if b == timer}
            succs = {b for a, b in edges if a == timer}
            base = {(a, b) for a, b in edges if timer not in (a, b)}
            base |= {(a, b) for a in preds for b in succs}
            inserted = set()
            for a, b in base:
                inserted |= {(a, timer), (timer, b)}
            inserted |= {(a, timer) for a in preds}
            inserted |= {(a, timer) for a in dfg.start_activities}
            edges = base | inserted
        out[otype] = frozenset(edges)
    return out
