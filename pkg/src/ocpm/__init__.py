"""Object-centric process mining for after-sales service logs.

The functional core lives in the submodules; :mod:`ocpm.estimators` wraps
it in scikit-learn style estimators.
"""

from .activities import ACTIVITIES, SCHEDULE, TECHNICIAN
from .conformance import (
    CrossObjectPrecedence,
    ExistenceCount,
    IntraObjectPrecedence,
    ViolationReport,
    check_all,
    check_rule,
    default_rules,
)
from .discovery import (
    DFG,
    OCDFG,
    OCPN,
    assemble_ocpn,
    cardinality_profile,
    discover_dfg,
    discover_ocdfg,
    export_dot,
)
from .exceptions import (
    IntegrityError,
    InvalidConfig,
    MalformedInput,
    MissingAttribute,
    OCPMError,
    UnknownActivity,
    UnknownType,
)
from .loggen import GenConfig, GroundTruth, generate, reference_model
from .ocel import (
    Event,
    FlattenedLog,
    ObjectInstance,
    OCEventLog,
    flatten,
    import_table,
    parse_ocel_json,
    project,
    read_table_csv,
    serialize_ocel_json,
)
from .performance import PerfStat
from .preprocessing import (
    filter_cardinality,
    filter_incomplete,
    filter_order_anomalies,
    derive_daily_cases,
    preprocess,
)
from .stats import log_summary, region_distribution

__version__ = "0.1.0"
