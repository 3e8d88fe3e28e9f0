"""Fuzzy data-flow analysis over [0,1]-valued properties.

Transfer functions are fuzzy-logic formulas, control-flow joins are
weighted averages, and analyses iterate to an epsilon-bounded fixed point.
On top of the core framework: lazy code motion in crisp, fuzzy and interval
(type-2) modes, and a Takagi-Sugeno ANFIS classifier that refines analysis
verdicts online.
"""

from .truth import LogicFamily, TruthInterval, TruthValueError, quantize, truth_value
from .formula import (
    And,
    Const,
    Formula,
    FormulaSyntaxError,
    Not,
    Or,
    UnboundVariableError,
    Var,
    and_all,
    evaluate,
    evaluate_interval,
    format_formula,
    free_vars,
    or_all,
    parse_formula,
)
from .flowgraph import (
    Edge,
    FlowGraph,
    InvalidStartError,
    ValidationReport,
    graph_from_json_dict,
    graph_to_json_dict,
    load_graph_file,
    reverse,
    validate,
)
from .solver import SolveReport, SolverConfig, solve, solve_interval, step, step_interval
from .lcm import (
    LcmEdge,
    LcmProblem,
    LcmResult,
    WidthMismatchError,
    availability,
    anticipatability,
    earliest,
    insert_delete,
    join_targets,
    later,
    lcm_pipeline,
    load_problem_file,
    validate_problem,
)
from .anfis import (
    AnfisModel,
    NoRuleFiresError,
    Rule,
    TrainConfig,
    TriangularMf,
    lms_update,
    ls_fit,
    predict,
    run_harness,
    uniform_model,
)

__version__ = "0.1.0"
