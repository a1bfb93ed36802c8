"""Screen algorithm configurations by racing them against learned cutoff lines."""
from .envelope import (
    CutoffLine,
    MarginPolicy,
    exact_cutoff_line,
    top_fraction,
    violates,
    worst_case_envelope,
)
from .evaluators import (
    CmcsConfiguration,
    Evaluator,
    ReplayEvaluator,
    SplpInstance,
    SyntheticParams,
    cmcs_evaluator,
    enumerate_cmcs_configurations,
    generate_splp_instance,
    generate_synthetic,
    replay_evaluator,
    splp_objective,
)
from .metrics import (
    TruthTable,
    experiment_table,
    figure_data,
    overlap_fraction,
    overlap_top,
    speedup,
)
from .profiles import (
    CheckpointSchedule,
    PerformanceProfile,
    QualityMatrix,
    RawTraceSet,
    ValidationError,
    enforce_monotone,
    final_quality,
    normalize,
    rank_percentile,
    read_matrix,
    write_matrix,
)
from .racing import Pool, RacingParams, RacingResult, RunOutcome, race_pass, run_racing, seed_pool

__version__ = "0.1.0"
