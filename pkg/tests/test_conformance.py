import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import build, convention_logs, ev, small_logs, timeline_logs
from oracles import bound_subject, cross_oracle, existence_oracle, intra_oracle
from ocpm import activities as act
from ocpm.association import bind_events
from ocpm.conformance import (
    CrossObjectPrecedence,
    ExistenceCount,
    IntraObjectPrecedence,
    check_all,
    check_rule,
    default_rules,
    rule_from_dict,
    rules_from_json,
    rules_to_json,
)
from ocpm.exceptions import InvalidConfig, UnknownActivity, UnknownType
from ocpm.loggen import GenConfig, generate

R1, R2, R3 = default_rules()


def _service(survey=True, survey_at="11:30", hold_at=None):
    events = [
        ev("e1", act.SCHEDULER_START, "08:00", schedule="S1"),
        ev("e2", act.ACCEPT, "08:10", schedule="S1", technician="T1"),
        ev("e3", act.ENROUTE, "08:15", technician="T1"),
        ev("e4", act.ONSITE, "09:00", technician="T1"),
        ev("e5", act.INPROCESS, "09:00", schedule="S1", technician="T1"),
        ev("e6", act.JOB_DONE, "11:00", schedule="S1", technician="T1"),
    ]
    if survey:
        events.append(ev("e7", act.SURVEY_SENT, survey_at, schedule="S1", technician="T1"))
    if hold_at:
        events.append(ev("e8", act.HOLD, hold_at, schedule="S1", technician="T1"))
    return build(events)


class TestDefaultRules:
    def test_shape(self):
        assert [r.rule_id for r in default_rules()] == ["R1", "R2", "R3"]
        assert R1 == ExistenceCount("R1", act.SCHEDULE, act.SURVEY_SENT, min_count=1,
                                    exempt_activities={act.REJECT})
        assert isinstance(R2, CrossObjectPrecedence) and R2.guard_activity == act.ONSITE
        assert R3 == IntraObjectPrecedence("R3", act.SCHEDULE, act.JOB_DONE, act.SURVEY_SENT)

    def test_clean_service(self):
        assert [r.violation_count for r in check_all(_service(), default_rules())] == [0, 0, 0]

    def test_r1_missing_survey(self):
        assert check_rule(_service(survey=False), R1).offenders == ("S1",)

    def test_r1_rejected_exempt(self):
        log = build([ev("e1", act.REJECT, "08:00", schedule="S1", technician="T1")])
        assert check_rule(log, R1).violation_count == 0

    def test_r3_survey_before_job_done(self):
        report = check_rule(_service(survey_at="10:00"), R3)
        assert report.offenders == (("S1", "e7"),)

    def test_r2_hold_before_onsite(self):
        report = check_rule(_service(hold_at="08:30"), R2)
        assert report.offenders == (("S1", "e8"),)

    def test_r2_hold_after_onsite(self):
        assert check_rule(_service(hold_at="10:00"), R2).violation_count == 0

    def test_r2_onsite_for_other_schedule_does_not_guard(self):
        log = build([
            ev("e1", act.ACCEPT, "08:00", schedule="S1", technician="T1"),
            ev("e2", act.ENROUTE, "08:05", technician="T1"),
            ev("e3", act.ONSITE, "08:30", technician="T1"),
            ev("e4", act.ACCEPT, "08:40", schedule="S2", technician="T1"),
            ev("e5", act.HOLD, "08:50", schedule="S2", technician="T1"),
        ])
        assert check_rule(log, R2).offenders == (("S2", "e5"),)


class TestTemplates:
    def test_existence_bounds(self):
        rule = ExistenceCount("X", act.SCHEDULE, act.SURVEY_SENT, max_count=0)
        assert check_rule(_service(), rule).offenders == ("S1",)

    def test_cooccurrence_association(self):
        rule = CrossObjectPrecedence("X", act.SCHEDULE, act.HOLD, act.TECHNICIAN,
                                     act.INPROCESS, association="cooccurrence")
        assert check_rule(_service(hold_at="08:30"), rule).violation_count == 1
        assert check_rule(_service(hold_at="10:00"), rule).violation_count == 0

    def test_invariants(self):
        with pytest.raises(InvalidConfig):
            ExistenceCount("X", act.SCHEDULE, act.HOLD, min_count=2, max_count=1)
        with pytest.raises(InvalidConfig):
            IntraObjectPrecedence("X", act.SCHEDULE, "", act.HOLD)
        with pytest.raises(InvalidConfig):
            CrossObjectPrecedence("X", act.SCHEDULE, act.HOLD, act.TECHNICIAN, act.ONSITE,
                                  association="nearby")

    def test_unknown_type_and_activity(self):
        with pytest.raises(UnknownType):
            check_rule(_service(), ExistenceCount("X", "invoice", act.HOLD))
        with pytest.raises(UnknownActivity):
            check_rule(_service(), ExistenceCount("X", act.SCHEDULE, "PAYMENT"))

    def test_known_but_unobserved_activity_is_zero(self):
        rule = ExistenceCount("X", act.SCHEDULE, act.HEAD_OFFICE, max_count=0)
        assert check_rule(_service(), rule).violation_count == 0

    @given(small_logs(max_events=30),
           st.sampled_from(act.ACTIVITIES), st.sampled_from(act.ACTIVITIES),
           st.sampled_from([act.SCHEDULE, act.TECHNICIAN]),
           st.one_of(st.none(), st.integers(0, 2)), st.one_of(st.none(), st.integers(2, 3)))
    def test_match_exhaustive_checker(self, log, a, b, otype, lo, hi):
        ex = ExistenceCount("E", otype, a, lo, hi, frozenset({act.REJECT}))
        assert sorted(check_rule(log, ex).offenders) == existence_oracle(log, ex)
        if a != b:
            intra = IntraObjectPrecedence("I", otype, a, b)
            assert sorted(check_rule(log, intra).offenders) == sorted(intra_oracle(log, intra))
        other = act.TECHNICIAN if otype == act.SCHEDULE else act.SCHEDULE
        for assoc in ("trip", "cooccurrence"):
            cross = CrossObjectPrecedence("C", otype, a, other, b, assoc)
            assert sorted(check_rule(log, cross).offenders) == sorted(cross_oracle(log, cross))

    @given(st.one_of(timeline_logs(), convention_logs()))
    def test_default_rules_match_exhaustive_checker(self, log):
        if not log.events:
            return
        oracles = {"R1": existence_oracle, "R2": cross_oracle, "R3": intra_oracle}
        for rule in default_rules():
            assert sorted(check_rule(log, rule).offenders) == sorted(
                oracles[rule.rule_id](log, rule))

    @given(st.one_of(timeline_logs(), convention_logs()))
    def test_binding_matches_definition(self, log):
        pos = {e.eid: i for i, e in enumerate(log.events)}
        for (eid, tech), s in bind_events(log, act.ONSITE).items():
            assert s == bound_subject(log, tech, pos[eid])


class TestReports:
    def test_check_all_empty(self):
        assert check_all(_service(), []) == []

    def test_duplicate_ids_reported_independently(self):
        rules = [R1, ExistenceCount("R1", act.SCHEDULE, act.SURVEY_SENT, max_count=0)]
        reports = check_all(_service(), rules)
        assert [r.violation_count for r in reports] == [0, 1]

    def test_failing_rule_does_not_abort_others(self):
        reports = check_all(_service(), [ExistenceCount("A", "invoice", act.HOLD), R1])
        assert reports[0].error.startswith("UnknownType") and reports[1].error is None

    def test_to_dict(self):
        doc = check_rule(_service(survey_at="10:00"), R3).to_dict()
        assert doc == {"rule_id": "R3", "violation_count": 1, "offenders": [["S1", "e7"]]}

    @given(convention_logs())
    def test_deterministic_and_evidence_in_log(self, log):
        if not log.events:
            return
        a, b = check_all(log, default_rules()), check_all(log, default_rules())
        assert a == b
        eids = {e.eid for e in log.events}
        for r in a:
            for o in r.offenders:
                oid, eid = (o, None) if isinstance(o, str) else o
                assert oid in log.objects and (eid is None or eid in eids)


class TestRuleFiles:
    def test_round_trip(self):
        assert rules_from_json(rules_to_json(default_rules())) == default_rules()

    def test_bare_list(self):
        doc = json.dumps([{"template": "ExistenceCount", "rule_id": "X", "otype": "schedule",
                           "activity": "HOLD", "max_count": 0}])
        assert rules_from_json(doc)[0].max_count == 0

    @pytest.mark.parametrize("doc", ['{"rules": 3}', "nope",
                                     '[{"template": "Foo"}]',
                                     '[{"template": "ExistenceCount", "bogus": 1}]'])
    def test_bad_files(self, doc):
        with pytest.raises(InvalidConfig):
            rules_from_json(doc)

    def test_rule_from_dict_exempt(self):
        rule = rule_from_dict({"template": "ExistenceCount", "rule_id": "R", "otype": "schedule",
                               "activity": "SURVEY SENT", "exempt_activities": ["REJECT"]})
        assert rule.exempt_activities == {"REJECT"}


class TestGenerated:
    def test_zero_deviation_all_zero(self):
        log, _ = generate(GenConfig(seed=4, technician_count=5, day_count=3))
        assert [r.violation_count for r in check_all(log, default_rules())] == [0, 0, 0]

    def test_injected_counts(self):
        cfg = GenConfig(seed=9, technician_count=6, day_count=5, p_survey_omit=0.1,
                        p_hold_before_onsite=0.1, p_survey_before_job_done=0.1, p_hold=0.0)
        log, truth = generate(cfg)
        counts = [r.violation_count for r in check_all(log, default_rules())]
        assert counts == [truth.injected["D1"], truth.injected["D2"], truth.injected["D3"]]
        assert min(counts) > 0
