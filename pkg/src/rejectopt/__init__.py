"""Pareto-optimal rejection thresholds for abstaining binary classifiers.

Given confidence scores and labels from any external scorer, this package
finds threshold pairs (t1, t2) — scores in (t1, t2] abstain — that are
Pareto-optimal for the two per-class error rates under per-class
abstention caps, via an elitist constrained genetic engine. Two published
baselines (ROC-convex-hull expected-cost minimization and bounded
abstention), cost-model comparison counting, and performance-rejection
curve sweeps are included.
"""

from .baselines import (
    ActivationCheck,
    BaResult,
    RocPoint,
    TortorellaResult,
    ba_optimize,
    candidate_thresholds,
    check_reject_activation,
    reject_activation,
    roc_points,
    rocch,
    tortorella_optimize,
)
from .data import (
    NEGATIVE,
    POSITIVE,
    ScoredDataset,
    ScoredExample,
    ScoresCsvError,
    SplitSpec,
    load_scored_csv,
    stratified_split,
    synth_two_gaussian,
    write_scored_csv,
)
from .harness import (
    ComparisonCounts,
    CostModelSpec,
    CurvePoint,
    NoEligibleSolutionError,
    SolutionEval,
    builtin_cost_models,
    cost_comparison_experiment,
    curve_sweep,
    default_sweep_grid,
    evaluate_solutions,
    sample_cost_matrix,
    select_best_under_cap,
    select_min_cost,
    write_comparison_csv,
    write_curve_csv,
)
from .metrics import (
    ClassPriors,
    CostMatrix,
    EssentialMetrics,
    RejectionConfusion,
    ThresholdPair,
    ba_objective,
    classify_with_rejection,
    empirical_priors,
    essential_metrics,
    expected_cost,
)
from .moba import (
    EvolveResult,
    GenerationStats,
    Individual,
    MobaConfig,
    NoFeasibleSolutionError,
    crowding_distance_assignment,
    dominates,
    elite_preservation,
    evaluate,
    evolve,
    fast_nondominated_sort,
    hypervolume_2d,
    mutation_delta,
    pareto_document,
    polynomial_mutation,
    pop_initialization,
    sbx_beta,
    sbx_children,
    sbx_crossover,
    tournament_selection,
)

__version__ = "0.1.0"
