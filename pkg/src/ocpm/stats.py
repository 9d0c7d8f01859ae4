"""Explorative statistics: region distribution and log summary counts."""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction

from . import activities as act
from .exceptions import MissingAttribute
from .ocel import OCEventLog

UNKNOWN_REGION = "(unknown)"


@dataclass(frozen=True)
class RegionRow:
    region: str
    schedule_count: int
    technician_count: int

    @property
    def schedules_per_technician(self):
        """None when the region has no technicians (flagged as undefined)."""
        if self.technician_count == 0:
            return None
        return Fraction(self.schedule_count, self.technician_count)


def region_distribution(log: OCEventLog, attr: str = "region", strict: bool = False,
                        subject_type: str = act.SCHEDULE,
                        resource_type: str = act.TECHNICIAN) -> list:
    """Count schedules and technicians per value of ``attr``.

    Objects lacking the attribute go to the ``"(unknown)"`` bucket, or raise
    :class:`MissingAttribute` when ``strict``. Rows are sorted by region.
    """
    counts = defaultdict(lambda: [0, 0])
    missing = []
    for obj in log.objects.values():
        if obj.otype == subject_type:
            slot = 0
        elif obj.otype == resource_type:
            slot = 1
        else:
            continue
        value = obj.attributes.get(attr)
        if value is None:
            missing.append(obj.oid)
            value = UNKNOWN_REGION
        counts[str(value)][slot] += 1
    if strict and missing:
        raise MissingAttribute(f"{len(missing)} object(s) lack {attr!r}", sorted(missing))
    return [RegionRow(r, s, t) for r, (s, t) in sorted(counts.items())]


def regions_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["region", "schedules", "technicians", "ratio"])
    for row in rows:
        ratio = row.schedules_per_technician
        writer.writerow([row.region, row.schedule_count, row.technician_count,
                         "" if ratio is None else f"{float(ratio):.2f}"])
    return buf.getvalue()


def regions_to_dict(rows) -> list:
    return [
        {"region": r.region, "schedules": r.schedule_count,
         "technicians": r.technician_count,
         "ratio": None if r.schedules_per_technician is None
         else float(r.schedules_per_technician)}
        for r in rows
    ]


def log_summary(log: OCEventLog) -> dict:
    object_counts = Counter(o.otype for o in log.objects.values())
    refs = Counter()
    for ev in log.events:
        for otype, oids in ev.omap.items():
            refs[otype] += len(oids)
    types = sorted(log.object_types)
    return {
        "event_count": len(log.events),
        "object_counts": {t: object_counts.get(t, 0) for t in types},
        "activity_frequencies": dict(sorted(Counter(ev.activity for ev in log.events).items())),
        "avg_events_per_object": {
            t: (refs[t] / object_counts[t]) if object_counts.get(t) else 0.0 for t in types
        },
    }
