"""Binding of resource-only events to the subject object they serve.

Events such as ONSITE reference only the technician. They are attributed
to the schedule most recently opened (ACCEPTed) by that technician and not
yet closed (JOB DONE) at the time of the event.
"""

from __future__ import annotations

from collections import defaultdict

from . import activities as act
from .ocel import Event


class Binder:
    """Tracks, per resource, the open subjects in acceptance order.

    Feed every event in log order to :meth:`observe`; :meth:`bound`
    answers for the state reached so far. An opening event with no subject
    reference still counts as the most recent opening and binds to None.
    """

    def __init__(
        self,
        resource_type: str = act.TECHNICIAN,
        subject_type: str = act.SCHEDULE,
        open_activity: str = act.ACCEPT,
        close_activity: str = act.JOB_DONE,
    ):
        self.resource_type = resource_type
        self.subject_type = subject_type
        self.open_activity = open_activity
        self.close_activity = close_activity
        self._openings = defaultdict(list)  # resource -> [(pos, subject|None)]
        self._last_close = {}  # subject -> pos of latest closing event

    def observe(self, pos: int, ev: Event) -> None:
        if ev.activity == self.open_activity:
            subjects = ev.refs(self.subject_type) or (None,)
            for res in ev.refs(self.resource_type):
                self._openings[res].extend((pos, s) for s in subjects)
        elif ev.activity == self.close_activity:
            for s in ev.refs(self.subject_type):
                self._last_close[s] = pos

    def _active(self, pos, subject) -> bool:
        return subject is None or self._last_close.get(subject, -1) < pos

    def bound(self, resource: str):
        stack = self._openings.get(resource)
        if not stack:
            return None
        while stack and not self._active(*stack[-1]):
            stack.pop()
        for pos, subject in reversed(stack):
            if self._active(pos, subject):
                return subject
        return None


def bind_events(log, activity, resource_type=act.TECHNICIAN, subject_type=act.SCHEDULE,
                open_activity=act.ACCEPT, close_activity=act.JOB_DONE) -> dict:
    """Map ``(eid, resource)`` of every ``activity`` event to its bound
    subject oid (or None)."""
    binder = Binder(resource_type, subject_type, open_activity, close_activity)
    out = {}
    for pos, ev in enumerate(log.events):
        binder.observe(pos, ev)
        if ev.activity == activity:
            for res in ev.refs(resource_type):
                out[(ev.eid, res)] = binder.bound(res)
    return out
