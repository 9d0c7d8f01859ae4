"""Declarative compliance rules over object-centric logs.

Three templates cover the after-sales rules:

* :class:`ExistenceCount` - per object, the number of occurrences of an
  activity must lie in ``[min_count, max_count]``; one violation per object.
* :class:`IntraObjectPrecedence` - within an object's trace every
  ``then_activity`` needs an earlier ``first_activity``; one violation per
  offending event.
* :class:`CrossObjectPrecedence` - a subject object's activity must not
  happen before the guard activity of its associated guard object; one
  violation per offending (subject, event) pair.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import ClassVar, Iterable, Mapping, Sequence, Union

from . import activities as act
from .association import Binder
from .exceptions import InvalidConfig, OCPMError, UnknownActivity
from .ocel import OCEventLog

__all__ = [
    "ExistenceCount",
    "IntraObjectPrecedence",
    "CrossObjectPrecedence",
    "ComplianceRule",
    "ViolationReport",
    "check_rule",
    "check_all",
    "default_rules",
    "rules_from_json",
    "rules_to_json",
]


@dataclass(frozen=True)
class ExistenceCount:
    rule_id: str
    otype: str
    activity: str
    min_count: int | None = None
    max_count: int | None = None
    # objects whose trace holds any of these are exempt (e.g. rejected schedules)
    exempt_activities: frozenset = frozenset()

    template: ClassVar[str] = "ExistenceCount"

    def __post_init__(self):
        if not self.activity:
            raise InvalidConfig(f"{self.rule_id}: empty activity")
        if (self.min_count is not None and self.max_count is not None
                and self.min_count > self.max_count):
            raise InvalidConfig(f"{self.rule_id}: min_count > max_count")
        object.__setattr__(self, "exempt_activities", frozenset(self.exempt_activities))

    def activities(self):
        return {self.activity}

    def types(self):
        return {self.otype}


@dataclass(frozen=True)
class IntraObjectPrecedence:
    rule_id: str
    otype: str
    first_activity: str
    then_activity: str

    template: ClassVar[str] = "IntraObjectPrecedence"

    def __post_init__(self):
        if not self.first_activity or not self.then_activity:
            raise InvalidConfig(f"{self.rule_id}: empty activity")

    def activities(self):
        return {self.first_activity, self.then_activity}

    def types(self):
        return {self.otype}


@dataclass(frozen=True)
class CrossObjectPrecedence:
    """``association`` is ``"trip"`` (a guard event is attributed to the
    subject its guard object most recently opened and has not closed, see
    :class:`ocpm.association.Binder`) or ``"cooccurrence"`` (the guard event
    itself references the subject)."""

    rule_id: str
    subject_type: str
    subject_activity: str
    guard_type: str
    guard_activity: str
    association: str = "trip"
    open_activity: str = act.ACCEPT
    close_activity: str = act.JOB_DONE

    template: ClassVar[str] = "CrossObjectPrecedence"

    def __post_init__(self):
        if not self.subject_activity or not self.guard_activity:
            raise InvalidConfig(f"{self.rule_id}: empty activity")
        if self.association not in ("trip", "cooccurrence"):
            raise InvalidConfig(f"{self.rule_id}: unknown association {self.association!r}")

    def activities(self):
        return {self.subject_activity, self.guard_activity}

    def types(self):
        return {self.subject_type, self.guard_type}


ComplianceRule = Union[ExistenceCount, IntraObjectPrecedence, CrossObjectPrecedence]
_TEMPLATES = {cls.template: cls for cls in
              (ExistenceCount, IntraObjectPrecedence, CrossObjectPrecedence)}


@dataclass(frozen=True)
class ViolationReport:
    """``offenders`` holds oids (existence) or ``(oid, eid)`` pairs."""

    rule_id: str
    offenders: tuple = ()
    error: str | None = None

    @property
    def violation_count(self) -> int:
        return len(self.offenders)

    def to_dict(self) -> dict:
        doc = {"rule_id": self.rule_id, "violation_count": self.violation_count,
               "offenders": [list(o) if isinstance(o, tuple) else o for o in self.offenders]}
        if self.error is not None:
            doc["error"] = self.error
        return doc


def default_rules() -> list:
    return [
        ExistenceCount("R1", act.SCHEDULE, act.SURVEY_SENT, min_count=1,
                       exempt_activities=frozenset({act.REJECT})),
        CrossObjectPrecedence("R2", act.SCHEDULE, act.HOLD, act.TECHNICIAN, act.ONSITE),
        IntraObjectPrecedence("R3", act.SCHEDULE, act.JOB_DONE, act.SURVEY_SENT),
    ]


def _resolve(log: OCEventLog, rule, vocabulary) -> None:
    for otype in sorted(rule.types()):
        log.require_type(otype)
    known = log.activities | set(vocabulary)
    missing = rule.activities() - known
    if missing:
        raise UnknownActivity(f"rule {rule.rule_id}: unknown activity {sorted(missing)}")


def _check_existence(log, rule: ExistenceCount):
    offenders = []
    for obj in log.objects_of(rule.otype):
        acts = [ev.activity for ev in log.trace(obj.oid)]
        if rule.exempt_activities.intersection(acts):
            continue
        n = acts.count(rule.activity)
        if ((rule.min_count is not None and n < rule.min_count)
                or (rule.max_count is not None and n > rule.max_count)):
            offenders.append(obj.oid)
    return offenders


def _check_intra(log, rule: IntraObjectPrecedence):
    offenders = []
    for obj in log.objects_of(rule.otype):
        seen_first = False
        for ev in log.trace(obj.oid):
            if ev.activity == rule.first_activity:
                seen_first = True
            elif ev.activity == rule.then_activity and not seen_first:
                offenders.append((obj.oid, ev.eid))
    return offenders


def _check_cross(log, rule: CrossObjectPrecedence):
    guarded = set()  # subjects whose guard activity has happened
    binder = Binder(rule.guard_type, rule.subject_type,
                    rule.open_activity, rule.close_activity)
    offenders = []
    for pos, ev in enumerate(log.events):
        binder.observe(pos, ev)
        if ev.activity == rule.guard_activity:
            guards = ev.refs(rule.guard_type)
            if rule.association == "cooccurrence":
                if guards:
                    guarded.update(ev.refs(rule.subject_type))
            else:
                for g in guards:
                    s = binder.bound(g)
                    if s is not None:
                        guarded.add(s)
        if ev.activity == rule.subject_activity:
            for s in ev.refs(rule.subject_type):
                if s not in guarded:
                    offenders.append((s, ev.eid))
    return offenders


_CHECKERS = {
    ExistenceCount: _check_existence,
    IntraObjectPrecedence: _check_intra,
    CrossObjectPrecedence: _check_cross,
}


def check_rule(log: OCEventLog, rule, vocabulary: Iterable[str] = act.ACTIVITIES) -> ViolationReport:
    """Evaluate one rule.

    Activities are resolved against the log's vocabulary plus
    ``vocabulary`` (the after-sales labels by default), so a rule about a
    known but unobserved activity reports zero violations instead of
    failing.

    Raises
    ------
    UnknownType, UnknownActivity
        The rule cannot be resolved against the log.
    """
    _resolve(log, rule, vocabulary)
    return ViolationReport(rule.rule_id, tuple(_CHECKERS[type(rule)](log, rule)))


def check_all(log: OCEventLog, rules: Sequence, vocabulary=act.ACTIVITIES) -> list:
    """Evaluate every rule; a failing rule yields a report carrying
    ``error`` and does not stop the others. Reports are sorted by rule id
    (stable for duplicates)."""
    reports = []
    for rule in rules:
        try:
            reports.append(check_rule(log, rule, vocabulary))
        except OCPMError as exc:
            reports.append(ViolationReport(rule.rule_id, (), f"{type(exc).__name__}: {exc}"))
    return sorted(reports, key=lambda r: r.rule_id)


def rule_from_dict(doc: Mapping):
    doc = dict(doc)
    template = doc.pop("template", None)
    cls = _TEMPLATES.get(template)
    if cls is None:
        raise InvalidConfig(f"unknown rule template {template!r}")
    if "exempt_activities" in doc:
        doc["exempt_activities"] = frozenset(doc["exempt_activities"])
    try:
        return cls(**doc)
    except TypeError as exc:
        raise InvalidConfig(f"malformed {template} rule: {exc}") from exc


def rule_to_dict(rule) -> dict:
    doc = {"template": rule.template, **asdict(rule)}
    if "exempt_activities" in doc:
        doc["exempt_activities"] = sorted(doc["exempt_activities"])
    return doc


def rules_from_json(text: str) -> list:
    """Parse a JSON rule file: a list of rule objects, or ``{"rules": [...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"invalid rule file: {exc}") from exc
    if isinstance(doc, dict):
        doc = doc.get("rules")
    if not isinstance(doc, list):
        raise InvalidConfig("rule file must hold a list of rules")
    return [rule_from_dict(d) for d in doc]


def rules_to_json(rules: Sequence) -> str:
    return json.dumps({"rules": [rule_to_dict(r) for r in rules]}, indent=2) + "\n"
