from collections import defaultdict

import pytest
from hypothesis import given

from helpers import build, ev, small_logs
from ocpm import activities as act
from ocpm.exceptions import InvalidConfig, UnknownType
from ocpm.loggen import GenConfig, generate
from ocpm.ocel import OCEventLog, flatten
from ocpm.preprocessing import (
    CompletionSpec,
    PrecedencePair,
    PreprocessConfig,
    derive_daily_cases,
    filter_cardinality,
    filter_incomplete,
    filter_order_anomalies,
    preprocess,
    remove_objects,
)

SPEC = CompletionSpec.default()


def _two_schedules():
    return build([
        ev("e1", act.SCHEDULER_START, "08:00", schedule="S1"),
        ev("e2", act.ACCEPT, "08:10", schedule="S1", technician="T1"),
        ev("e3", act.JOB_CLOSED, "10:00", schedule="S1", technician="T1"),
        ev("e4", act.SCHEDULER_START, "11:00", schedule="S2"),
        ev("e5", act.ACCEPT, "11:05", schedule="S2", technician="T1"),
        ev("e6", act.INPROCESS, "12:00", schedule="S2", technician="T1"),
    ])


class TestIncomplete:
    def test_complete_schedule_retained_incomplete_removed(self):
        res = filter_incomplete(_two_schedules(), SPEC)
        assert res.removed_objects == {act.SCHEDULE: frozenset({"S2"})}
        assert "S1" in res.log.objects and "S2" not in res.log.objects

    def test_shared_events_are_stripped_not_dropped(self):
        res = filter_incomplete(_two_schedules(), SPEC)
        kept = {e.eid: e for e in res.log.events}
        assert "e4" not in kept  # referenced only S2
        assert kept["e5"].omap == {act.TECHNICIAN: ("T1",)}
        assert res.removed_event_count == 1

    def test_reject_is_terminal(self):
        log = build([ev("e1", act.REJECT, "08:00", schedule="S1", technician="T1")])
        assert filter_incomplete(log, SPEC).removed_objects == {}

    def test_empty_spec_is_identity(self):
        log = _two_schedules()
        assert filter_incomplete(log, CompletionSpec()).log == log

    def test_brute_force(self):
        log = _two_schedules()
        expected = {o for o, obj in log.objects.items() if obj.otype == act.SCHEDULE
                    and not any(e.activity in SPEC.per_type[act.SCHEDULE]
                                for e in log.events if o in e.omap.get(act.SCHEDULE, ()))}
        assert filter_incomplete(log, SPEC).removed_objects[act.SCHEDULE] == expected


class TestOrderAnomalies:
    def test_ordered_retained(self):
        log = build([ev("e1", act.SCHEDULER_START, "08:00", schedule="S1"),
                     ev("e2", act.SCHEDULER_END, "17:00", schedule="S1")])
        assert filter_order_anomalies(log).removed_objects == {}

    def test_end_before_start_removed(self):
        log = build([ev("e1", act.SCHEDULER_END, "08:00", schedule="S1"),
                     ev("e2", act.SCHEDULER_START, "17:00", schedule="S1")])
        assert filter_order_anomalies(log).removed_objects == {act.SCHEDULE: {"S1"}}

    def test_after_without_before_removed(self):
        log = build([ev("e1", act.SCHEDULER_END, "08:00", schedule="S1")])
        assert filter_order_anomalies(log).removed_count(act.SCHEDULE) == 1

    def test_first_occurrence_rule(self):
        # a second ONSITE without a fresh ENROUTE is not an anomaly
        pair = PrecedencePair(act.ENROUTE, act.ONSITE, act.TECHNICIAN)
        log = build([ev("e1", act.ENROUTE, "08:00", technician="T1"),
                     ev("e2", act.ONSITE, "09:00", technician="T1"),
                     ev("e3", act.ONSITE, "10:00", technician="T1")])
        assert filter_order_anomalies(log, [pair]).removed_objects == {}

    def test_trip_segments(self):
        # ONSITE before ENROUTE inside the second accepted schedule
        log = build([
            ev("e1", act.ACCEPT, "08:00", schedule="S1", technician="T1"),
            ev("e2", act.ENROUTE, "08:05", technician="T1"),
            ev("e3", act.ONSITE, "09:00", technician="T1"),
            ev("e4", act.ACCEPT, "11:00", schedule="S2", technician="T1"),
            ev("e5", act.ONSITE, "11:30", technician="T1"),
            ev("e6", act.ENROUTE, "11:40", technician="T1"),
        ])
        assert filter_order_anomalies(log).removed_objects == {act.TECHNICIAN: {"T1"}}
        unsegmented = PrecedencePair(act.ENROUTE, act.ONSITE, act.TECHNICIAN)
        assert filter_order_anomalies(log, [unsegmented]).removed_objects == {}

    def test_identical_pair_rejected(self):
        with pytest.raises(InvalidConfig):
            PrecedencePair("A", "A", act.SCHEDULE)


class TestCardinality:
    def test_single_technician_retained(self):
        log = _two_schedules()
        assert filter_cardinality(log, act.SCHEDULE, act.TECHNICIAN).removed_objects == {}

    def test_split_technicians_removed(self):
        log = build([ev("e1", act.ACCEPT, "08:00", schedule="S2", technician="T1"),
                     ev("e2", act.JOB_CLOSED, "09:00", schedule="S2", technician="T2")])
        res = filter_cardinality(log, act.SCHEDULE, act.TECHNICIAN, 1)
        assert res.removed_objects == {act.SCHEDULE: {"S2"}}
        assert set(res.log.objects) == {"T1", "T2"}

    def test_unknown_type(self):
        with pytest.raises(UnknownType):
            filter_cardinality(_two_schedules(), "invoice", act.TECHNICIAN)

    def test_bad_bound(self):
        with pytest.raises(InvalidConfig):
            filter_cardinality(_two_schedules(), act.SCHEDULE, act.TECHNICIAN, 0)

    @given(small_logs())
    def test_brute_force(self, log):
        partners = defaultdict(set)
        for e in log.events:
            for s in e.omap.get(act.SCHEDULE, ()):
                partners[s].update(e.omap.get(act.TECHNICIAN, ()))
        expected = {s for s, ts in partners.items() if len(ts) > 1}
        res = filter_cardinality(log, act.SCHEDULE, act.TECHNICIAN, 1)
        assert set(res.removed_objects.get(act.SCHEDULE, ())) == expected


class TestRemoval:
    @given(small_logs())
    def test_removal_semantics(self, log):
        doomed = {o for o in log.objects if o.endswith("1")}
        res = remove_objects(log, doomed)
        OCEventLog(res.log.events, res.log.objects, res.log.object_types)  # re-validates
        assert not doomed & set(res.log.objects)
        survivors = {e.eid for e in res.log.events}
        for e in log.events:
            assert (e.eid in survivors) == bool(set(e.object_ids()) - doomed)
        # stripping never leaves a retained object without events
        assert res.fallout == {}

    @given(small_logs())
    def test_filters_monotone_and_idempotent(self, log):
        for f in (lambda lg: filter_incomplete(lg, SPEC), filter_order_anomalies,
                  lambda lg: filter_cardinality(lg, act.SCHEDULE, act.TECHNICIAN)):
            once = f(log).log
            assert len(once.events) <= len(log.events)
            again = f(once)
            assert again.log == once and again.removed_objects == {}


class TestDailyCases:
    def test_two_dates(self):
        log = build([ev("e1", act.ACCEPT, "08:00", technician="T1"),
                     ev("e2", act.ONSITE, "09:00", technician="T1", day=1)])
        assert set(derive_daily_cases(log, act.TECHNICIAN).cases) == {
            "T1@2023-01-02", "T1@2023-01-03"}

    def test_one_date_is_full_trace(self, sample):
        days = derive_daily_cases(sample, act.TECHNICIAN)
        assert list(days.cases) == ["4006975@2023-01-02"]
        assert days.cases["4006975@2023-01-02"] == flatten(sample, act.TECHNICIAN).cases["4006975"]
        assert len(days.cases["4006975@2023-01-02"]) == 4

    def test_unknown_type(self, sample):
        with pytest.raises(UnknownType):
            derive_daily_cases(sample, "invoice")

    @given(small_logs())
    def test_partition(self, log):
        flat = flatten(log, act.TECHNICIAN)
        days = derive_daily_cases(log, act.TECHNICIAN)
        for oid, trace in flat.cases.items():
            pieces = [tr for k, tr in sorted(days.cases.items()) if k.split("@")[0] == oid]
            assert tuple(te for tr in pieces for te in tr) == trace


class TestPipeline:
    def test_generated_pipeline_matches_truth(self):
        cfg = GenConfig(seed=11, technician_count=6, day_count=4, p_incomplete=0.05,
                        p_order_anomaly=0.05, p_multi_technician=0.05)
        log, truth = generate(cfg)
        clean, steps, results = preprocess(log)
        got = [set(r.removed_objects.get(act.SCHEDULE, ())) for r in results]
        assert got == [set(truth.removed["incomplete"]), set(truth.removed["order_anomaly"]),
                       set(truth.removed["multi_technician"])]
        assert [s["step"] for s in steps] == [
            "incomplete", "order_anomalies", "cardinality:schedule/technician"]
        assert steps[-1]["after"]["events"] == len(clean.events)

    def test_zero_anomalies_removes_nothing(self):
        log, _ = generate(GenConfig(seed=5, technician_count=4, day_count=3))
        clean, _, _ = preprocess(log)
        assert clean == log

    def test_config_round_trip(self):
        cfg = PreprocessConfig()
        assert PreprocessConfig.from_dict(cfg.to_dict()) == cfg

    @pytest.mark.parametrize("doc", ['{"bogus": 1}', '[]', '{"precedence": [{"x": 1}]}',
                                     "not json"])
    def test_bad_config(self, doc):
        with pytest.raises(InvalidConfig):
            PreprocessConfig.from_json(doc)
