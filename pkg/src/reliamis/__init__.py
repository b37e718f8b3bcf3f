"""Reliability constraints that can be refined step by step and evaluated as Markov chains."""

from .errors import ReliaMisError
from .props import (
    BOTTOM,
    SYS,
    Dependency,
    PropertySet,
    WfReport,
    check_well_formed,
    normalize,
    props_equal,
)
from .ops import (
    AddDep,
    Merge,
    RelaxRel,
    RemoveDep,
    Split,
    TightenRel,
    add_dep,
    apply_script,
    format_op,
    make_op,
    merge,
    parse_op,
    relax_rel,
    remove_dep,
    split,
    tighten_rel,
)
from .order import OrderVerdict, Relation, bottom, covers_check, generalizes, top
from .mis import (
    FAILED,
    Method,
    MisModel,
    ReliabilityResult,
    evaluate_at,
    evaluate_reliability,
    validate_model,
)
from .galois import (
    RoundTripReport,
    abstract_model,
    check_roundtrip_model,
    check_roundtrip_props,
    concretize_props,
    equivalent,
)


from .oracle import TrialConfig, monte_carlo_reliability, path_enum_reliability

__version__ = "0.1.0"
