"""antmon: streaming in-control/out-of-control monitoring for a cyclic frying line.

Each 2-minute frying cycle leaves a digital pheromone trace: a base score from
temperature band counts, tuned into a modified score by neighbouring cycles,
plus threat and environmental components summing to a total score. A threshold
policy over those scores drives an alarm state machine; a simulator, an
evaluation harness, and a JSON-lines gateway round out the toolkit.
"""

from .annotate import Annotation, Color, annotate, color_code, extreme_flags
from .changepoint import (
    Segmentation,
    binary_segmentation,
    brute_force_segmentation,
    pelt_segmentation,
    segment_cost,
)
from .domain import (
    DEFAULT_CALENDAR,
    AntCycle,
    InControlModel,
    ProductionCalendar,
    validate_cycle,
)
from .metrics import (
    ConfusionMatrix,
    EpisodeLabel,
    MetricSet,
    Truth,
    compute_metrics,
    match_episodes,
)
from .monitor import (
    AlarmEvent,
    AlarmKind,
    AlarmPolicy,
    Monitor,
    ProcessState,
    SystemState,
    tune_thresholds,
)
from .scoring import (
    RecordStatus,
    ScoredCycle,
    ScoreRecord,
    ScoringConfig,
    ScoringPipeline,
    base_score,
    environmental_score,
    lookahead_factor,
    modified_score,
    score_day,
    score_stream,
    threat_score,
    total_score,
    trend_factor,
)
from .simulate import SimConfig, SimDay, simulate_day, simulate_days

__version__ = "0.1.0"

__all__ = [
    "Annotation", "Color", "annotate", "color_code", "extreme_flags",
    "Segmentation", "binary_segmentation", "brute_force_segmentation",
    "pelt_segmentation", "segment_cost",
    "DEFAULT_CALENDAR", "AntCycle", "InControlModel", "ProductionCalendar", "validate_cycle",
    "ConfusionMatrix", "EpisodeLabel", "MetricSet", "Truth", "compute_metrics", "match_episodes",
    "AlarmEvent", "AlarmKind", "AlarmPolicy", "Monitor", "ProcessState", "SystemState",
    "tune_thresholds",
    "RecordStatus", "ScoredCycle", "ScoreRecord", "ScoringConfig", "ScoringPipeline",
    "base_score", "environmental_score", "lookahead_factor", "modified_score",
    "score_day", "score_stream", "threat_score", "total_score", "trend_factor",
    "SimConfig", "SimDay", "simulate_day", "simulate_days",
    "__version__",
]
