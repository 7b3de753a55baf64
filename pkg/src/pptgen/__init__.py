"""Priority-driven path-based test case generation for workflow models."""

from .baselines import generate_bf, generate_pct, generate_pg, generate_sc, reduce_dct, run_requirement_baseline
from .errors import CorpusError, InfeasibleError, MetricsError, ModelError, ModelFormatError, PathError, PPTError
from .metrics import efficiency_metrics, test_set_metrics, verify_consistency
from .model import (
    PTL,
    Edge,
    Priority,
    RequirementSet,
    SutModel,
    TestSet,
    parse_model,
    serialize_model,
    split_parallel_edges,
    translate_paths,
    validate_model,
)
from .ppt import generate_ppt
from .requirements import enumerate_tdl_paths, make_requirements, select_relevant

__version__ = "0.1.0"


def load_fig2() -> SutModel:
    """The 17-node worked example shipped with the package."""
    from importlib.resources import files

    return parse_model(files(__package__).joinpath("data/fig2.json").read_text(encoding="utf-8"))
