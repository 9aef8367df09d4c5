"""Guided exploratory data analysis: mine insights from tables, recommend
follow-up questions, and track the branching analysis as a notebook tree."""

from .charts import ChartSpec, chart_for_insight, charts_for_answer, validate_spec
from .config import DEFAULT_CONFIG, EngineConfig
from .dataset import Column, Role, Table, infer_schema, load_table
from .errors import EngineError
from .insights import Insight, InsightSpace, InsightType
from .miner import mine_all
from .recommend import attribute_related, logically_related, recommend_for_insight
from .session import Session, create_session, import_session, replay

__version__ = "0.1.0"

__all__ = [
    "ChartSpec",
    "Column",
    "DEFAULT_CONFIG",
    "EngineConfig",
    "EngineError",
    "Insight",
    "InsightSpace",
    "InsightType",
    "Role",
    "Session",
    "Table",
    "attribute_related",
    "chart_for_insight",
    "charts_for_answer",
    "create_session",
    "import_session",
    "infer_schema",
    "load_table",
    "logically_related",
    "mine_all",
    "recommend_for_insight",
    "replay",
    "validate_spec",
    "__version__",
]
