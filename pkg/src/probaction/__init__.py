"""Belief-network state models, conditional belief nets for actions, and temporal projection."""

from .actions import (
    ActionModel,
    CompatibilityReport,
    ConsistencyReport,
    EnvironmentModel,
    IncompatibleActionError,
    OntologyError,
    check_compatibility,
    check_consistency,
)
from .cbn import ConditionalBeliefNet, bind, validate_cbn
from .core import (
    BeliefNetwork,
    Cpt,
    CycleError,
    Distinction,
    ModelError,
    UnknownNodeError,
    ValidationReport,
    d_separated,
    descendants,
    topological_order,
    validate_network,
)
from .inference import (
    Dist,
    FactorTable,
    OracleLimitExceeded,
    ZeroProbabilityEvidence,
    enumerate_marginal,
    forward_sample,
    joint_probability,
    marginal,
)
from .model_io import (
    DotOptions,
    ModelParseError,
    ModelValidationError,
    export_dot,
    load_model,
    parse_model,
    save_model,
    serialize_model,
)
from .projection import (
    ProjectionError,
    ProjectionResult,
    TimedName,
    extract_successor,
    project_modified,
    project_original,
    project_sequence,
)
from .robot import load_fixture
from .surgery import remove_node, remove_nodes, reverse_arc

__version__ = "0.1.0"

__all__ = [
    "ActionModel",
    "BeliefNetwork",
    "bind",
    "check_compatibility",
    "check_consistency",
    "CompatibilityReport",
    "ConditionalBeliefNet",
    "ConsistencyReport",
    "Cpt",
    "CycleError",
    "d_separated",
    "descendants",
    "Dist",
    "Distinction",
    "DotOptions",
    "enumerate_marginal",
    "EnvironmentModel",
    "export_dot",
    "extract_successor",
    "FactorTable",
    "forward_sample",
    "IncompatibleActionError",
    "joint_probability",
    "load_fixture",
    "load_model",
    "marginal",
    "ModelError",
    "ModelParseError",
    "ModelValidationError",
    "OntologyError",
    "OracleLimitExceeded",
    "parse_model",
    "project_modified",
    "project_original",
    "project_sequence",
    "ProjectionError",
    "ProjectionResult",
    "remove_node",
    "remove_nodes",
    "reverse_arc",
    "save_model",
    "serialize_model",
    "TimedName",
    "topological_order",
    "UnknownNodeError",
    "validate_cbn",
    "validate_network",
    "ValidationReport",
    "ZeroProbabilityEvidence",
]
