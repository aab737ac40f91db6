"""Agricultural operational design domains: model, DSL, semantics,
scenario verification and condition-dependent process simulation."""

from pathlib import Path as _FsPath

from .model import (
    AgOdd,
    AgOddError,
    AttributeNode,
    AutomationBand,
    CategoryKind,
    CategoryNode,
    CdvTag,
    Constraint,
    Diagnostic,
    DimensionDecl,
    FramingLimitations,
    Mode,
    ProcessDef,
    Quantity,
    Range,
    Relation,
    SourceSpan,
    TagRole,
    Trigger,
    TriggerKind,
    classify_automation,
    resolve_tag,
    validate_model,
)
from .dsl import ParseError, parse_events, parse_odd, parse_scenarios, serialize_events, serialize_odd, serialize_scenarios
from .semantics import BoundaryKind, Facet, Membership, WorldSample, boundary_kind, contains, effective_domain
from .scenario import Binding, ProcessRef, Scenario, ScenarioRegion, scenario_region, validate_scenario
from .verify import (
    CoverageReport,
    GapRegion,
    IterationReport,
    Verdict,
    Violation,
    coverage,
    detect_violations,
    find_gaps,
    verify_iteration,
)
from .process import NoFire, ProcessEvent, Trace, WorldState, check_processes, fire_trigger, simulate

__version__ = "0.1.0"

CORPUS_DIR = _FsPath(__file__).parent / "corpus"
REPORT_SCHEMA_FILE = _FsPath(__file__).parent / "schema" / "agodd-report-1.json"
