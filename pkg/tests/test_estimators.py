import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from ocpm import activities as act
from ocpm.conformance import check_all, default_rules
from ocpm.discovery import discover_ocdfg
from ocpm.estimators import (
    CardinalityFilter,
    ComplianceChecker,
    IncompleteObjectFilter,
    LogPreprocessor,
    OCPNMiner,
    OrderAnomalyFilter,
    PerformanceAnalyzer,
)
from ocpm.exceptions import InvalidConfig
from ocpm.loggen import GenConfig, generate
from ocpm.ocel import serialize_ocel_json
from ocpm.preprocessing import preprocess
from ocpm.validation import check_log


@pytest.fixture(scope="module")
def generated():
    return generate(GenConfig(seed=12, technician_count=5, day_count=4, p_incomplete=0.05,
                              p_order_anomaly=0.05, p_multi_technician=0.05,
                              p_survey_omit=0.05))


def test_pipeline_equals_functional_core(generated):
    log, truth = generated
    pipe = Pipeline([("incomplete", IncompleteObjectFilter()), ("order", OrderAnomalyFilter()),
                     ("multi", CardinalityFilter()), ("check", ComplianceChecker())])
    pipe.fit(log)
    clean, _, _ = preprocess(log)
    assert pipe[-1].reports_ == check_all(clean, default_rules())
    assert pipe[-1].violation_counts_["R1"] == truth.injected["D1"]
    for name, key in (("incomplete", "incomplete"), ("order", "order_anomaly"),
                      ("multi", "multi_technician")):
        removed = pipe.named_steps[name].removed_objects_.get(act.SCHEDULE, ())
        assert set(removed) == set(truth.removed[key])


def test_preprocessor(generated):
    log, _ = generated
    est = LogPreprocessor()
    assert est.fit_transform(log) == preprocess(log)[0]
    assert est.transform(log) == est.log_
    assert len(est.steps_) == 3
    assert LogPreprocessor({"cardinality": []}).fit(log).steps_[-1]["step"] == "order_anomalies"


def test_miner(generated):
    log, _ = generated
    miner = OCPNMiner(min_edge_freq=2).fit(log)
    assert miner.ocdfg_ == discover_ocdfg(log)
    assert miner.to_dot().startswith("digraph ocdfg")
    assert miner.to_dot(net=True).startswith("digraph ocpn")
    with pytest.raises(InvalidConfig):
        OCPNMiner(min_edge_freq=0).fit(log)


def test_analyzer(generated):
    log, _ = generated
    stats = PerformanceAnalyzer(metrics=["transit", "daily_hours"]).fit(log).stats_
    assert set(stats) == {"transit", "daily_hours", "hold_impact"}


def test_accepts_json_and_paths(generated, tmp_path):
    log, _ = generated
    data = serialize_ocel_json(log)
    path = tmp_path / "log.json"
    path.write_bytes(data)
    assert check_log(data) == check_log(str(path)) == check_log(data.decode()) == log
    with pytest.raises(FileNotFoundError):
        check_log(str(tmp_path / "missing.json"))
    with pytest.raises(TypeError):
        check_log(42)


def test_clone_and_params():
    est = CardinalityFilter(max_related=2)
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    assert ComplianceChecker().get_params() == {"rules": None}


def test_not_fitted(generated):
    with pytest.raises(NotFittedError):
        ComplianceChecker().transform(generated[0])
    with pytest.raises(NotFittedError):
        OCPNMiner().to_dot()
