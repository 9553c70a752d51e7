"""dialogweave: parse, canonicalize, stage, enumerate, and mine
task-based mixed-initiative dialog specifications."""

from .episodes import (
    DEFAULT_CAP,
    EnumerationCapExceeded,
    difference_witness,
    enumerate_episodes,
    equivalent,
)
from .expr import (
    EMPTY,
    Atom,
    DialogExpr,
    Empty,
    Mnemonic,
    Node,
    Union,
    ValidationReport,
    Violation,
    normalize_mnemonics,
    solicitation_set,
    union_all,
    validate,
)
from .machine import (
    Frontier,
    ReductionState,
    candidates,
    init_state,
    is_complete,
    is_prefix,
    membership,
    reduce_one,
    stage_response,
    trace_path,
)
from .miner import ExperimentReport, GenConfig, generate_random, mine, run_experiment, verbosity
from .simplify import RewriteStep, RewriteTrace, all_steps, canon, canonicalize, simplify_step
from .staging import Advanced, Rejected, StagingOutcome, run_episode, stage
from .syntax import (
    DialogSyntaxError,
    EnumeratedSpec,
    Episode,
    Utterance,
    ValidationFailure,
    parse_episode,
    parse_expr,
    parse_spec_file,
    parse_utterance,
    print_episode,
    print_expr,
    print_spec_file,
    print_utterance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
