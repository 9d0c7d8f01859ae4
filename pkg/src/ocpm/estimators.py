"""scikit-learn style wrappers around the functional core.

Filters are transformers mapping a log to a cleaned log, so they compose
in a :class:`sklearn.pipeline.Pipeline`; the analysis estimators keep
their results in fitted attributes::

    pipe = Pipeline([
        ("incomplete", IncompleteObjectFilter()),
        ("order", OrderAnomalyFilter()),
        ("multi", CardinalityFilter()),
        ("check", ComplianceChecker()),
    ])
    pipe.fit(log)
    pipe[-1].reports_

``X`` may be an :class:`~ocpm.ocel.OCEventLog`, OCEL JSON or a file path;
``y`` is ignored throughout.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import activities as act
from . import conformance, discovery, performance, preprocessing
from .validation import check_log, check_positive_int

__all__ = [
    "IncompleteObjectFilter",
    "OrderAnomalyFilter",
    "CardinalityFilter",
    "LogPreprocessor",
    "OCPNMiner",
    "ComplianceChecker",
    "PerformanceAnalyzer",
]


class _LogFilter(TransformerMixin, BaseEstimator):
    """Filter base: ``fit`` records what the filter removes from the fit
    log, ``transform`` re-applies the rule to any log (it is stateless)."""

    def _filter(self, log):
        raise NotImplementedError

    def fit(self, X, y=None):
        self.result_ = self._filter(check_log(X))
        self.removed_objects_ = self.result_.removed_objects
        return self

    def transform(self, X):
        check_is_fitted(self, "result_")
        return self._filter(check_log(X)).log

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X).result_.log


class IncompleteObjectFilter(_LogFilter):
    """Drop objects that never reach a terminal activity.

    Parameters
    ----------
    completion : dict of str to iterable of str, optional
        Terminal activities per object type. Defaults to
        ``{"schedule": {"JOB CLOSED", "REJECT"}}``.
    """

    def __init__(self, completion=None):
        self.completion = completion

    def _filter(self, log):
        if self.completion is None:
            spec = preprocessing.CompletionSpec.default()
        else:
            spec = preprocessing.CompletionSpec(
                {t: frozenset(v) for t, v in self.completion.items()})
        return preprocessing.filter_incomplete(log, spec)


class OrderAnomalyFilter(_LogFilter):
    """Drop objects whose first ``after`` precedes their first ``before``.

    Parameters
    ----------
    pairs : sequence of PrecedencePair, optional
        Defaults to ENROUTE before ONSITE per technician trip and
        SCHEDULER START before SCHEDULER END per schedule.
    """

    def __init__(self, pairs=None):
        self.pairs = pairs

    def _filter(self, log):
        pairs = preprocessing.DEFAULT_PRECEDENCE if self.pairs is None else tuple(self.pairs)
        return preprocessing.filter_order_anomalies(log, pairs)


class CardinalityFilter(_LogFilter):
    """Drop ``subject`` objects related to more than ``max_related``
    ``related`` objects."""

    def __init__(self, subject=act.SCHEDULE, related=act.TECHNICIAN, max_related=1):
        self.subject = subject
        self.related = related
        self.max_related = max_related

    def _filter(self, log):
        check_positive_int(self.max_related, "max_related")
        return preprocessing.filter_cardinality(log, self.subject, self.related,
                                                self.max_related)


class LogPreprocessor(TransformerMixin, BaseEstimator):
    """All three cleaning steps in their fixed order.

    Parameters
    ----------
    config : PreprocessConfig or dict, optional
    """

    def __init__(self, config=None):
        self.config = config

    def _config(self):
        if self.config is None:
            return preprocessing.PreprocessConfig()
        if isinstance(self.config, preprocessing.PreprocessConfig):
            return self.config
        return preprocessing.PreprocessConfig.from_dict(self.config)

    def fit(self, X, y=None):
        self.log_, self.steps_, self.results_ = preprocessing.preprocess(
            check_log(X), self._config())
        return self

    def transform(self, X):
        check_is_fitted(self, "steps_")
        return preprocessing.preprocess(check_log(X), self._config())[0]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X).log_


class OCPNMiner(BaseEstimator):
    """Discover the OCDFG and the object-centric Petri net.

    Parameters
    ----------
    min_edge_freq : int, default=1
        Display threshold used by :meth:`to_dot` only.

    Attributes
    ----------
    ocdfg_ : OCDFG
    ocpn_ : OCPN
    profile_ : CardinalityProfile
    """

    def __init__(self, min_edge_freq=1):
        self.min_edge_freq = min_edge_freq

    def fit(self, X, y=None):
        check_positive_int(self.min_edge_freq, "min_edge_freq")
        self.ocdfg_ = discovery.discover_ocdfg(check_log(X))
        self.ocpn_ = discovery.assemble_ocpn(self.ocdfg_)
        self.profile_ = self.ocdfg_.profile
        return self

    def to_dot(self, net=False) -> str:
        check_is_fitted(self, "ocdfg_")
        if net:
            return discovery.export_dot(self.ocpn_)
        return discovery.export_dot(self.ocdfg_, self.min_edge_freq)


class ComplianceChecker(TransformerMixin, BaseEstimator):
    """Evaluate compliance rules; ``transform`` returns the reports.

    Parameters
    ----------
    rules : sequence of rules, optional
        Defaults to R1-R3.
    """

    def __init__(self, rules=None):
        self.rules = rules

    def _rules(self):
        return conformance.default_rules() if self.rules is None else list(self.rules)

    def fit(self, X, y=None):
        self.reports_ = conformance.check_all(check_log(X), self._rules())
        self.violation_counts_ = {r.rule_id: r.violation_count for r in self.reports_}
        return self

    def transform(self, X):
        check_is_fitted(self, "reports_")
        return conformance.check_all(check_log(X), self._rules())


class PerformanceAnalyzer(BaseEstimator):
    """Compute performance metrics into ``stats_`` (name to PerfStat,
    plus ``hold_impact`` when daily hours are selected).

    Parameters
    ----------
    metrics : sequence of str, optional
        Subset of :data:`ocpm.performance.METRICS`; all by default.
    """

    def __init__(self, metrics=None):
        self.metrics = metrics

    def fit(self, X, y=None):
        selection = performance.METRICS if self.metrics is None else tuple(self.metrics)
        self.stats_ = performance.all_metrics(check_log(X), selection)
        return self
