"""Numerical workbench for random multiscale isometry networks.

The package builds layered random-isometry states on rings with
level-dependent site dimensions, measures their interval entanglement
exactly at small scale, computes combinatorial two-sided bounds on those
entropies by dynamic programming over endpoint-reduction sequences, and
studies the singular spectra of the random coarse-graining channel that
controls correlation decay.

Modules
-------
haar       - Haar isometry sampling and fourth-moment closed forms.
schedule   - the level-dimension recursion, its feasibility and scaling.
network    - ring geometry: pairings, intervals, modular arithmetic.
simulator  - exact dense states, reduced spectra, entropies, Monte Carlo.
cutbounds  - reduction-sequence dynamic programs and entropy brackets.
spectra    - coarse-graining channel spectra and rescaling collapses.
svgplot    - dependency-free SVG line plots.
cli        - the ``randmera`` command-line front end.
"""

from .errors import DegenerateMomentError, FeasibilityError, UsageError
from .haar import (
    CANONICAL_CONTRACTIONS,
    MIXED_CONTRACTION,
    Isometry,
    McEstimate,
    MomentConstants,
    fourth_moment_exact,
    fourth_moment_mc,
    moment_constants,
    pure_state_moment_constant,
    sample_isometry,
    sample_isometry_batch,
)
from .network import Interval, MeraNetwork, Stage, modular_distance, v_children, w_partner
from .schedule import (
    DimensionSchedule,
    MemoryEstimate,
    find_epsilon,
    memory_estimate,
    schedule_report,
    solve_schedule,
)
from .simulator import (
    DenseState,
    DensityMatrix,
    StateTrajectory,
    build_state,
    correlation_proxies,
    entropy_renyi2,
    entropy_vn,
    interval_spectrum,
    mc_entropy_stats,
    mc_entropy_sweep,
    mc_mutual_information,
    mutual_information,
    reduced_density,
)
from .cutbounds import (
    CutBounds,
    ReductionSequence,
    ReductionStep,
    SandwichBounds,
    cut_dp,
    interval_entropy_scaling,
    mi_prediction,
    sandwich,
)
from .spectra import (
    SingularSpectrum,
    SuperOperatorSpec,
    build_superop,
    collapse_experiment,
    frobenius_check,
    frobenius_exact,
    second_singular_scaling,
    singular_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_CONTRACTIONS",
    "MIXED_CONTRACTION",
    "DegenerateMomentError",
    "FeasibilityError",
    "UsageError",
    "Isometry",
    "McEstimate",
    "MomentConstants",
    "fourth_moment_exact",
    "fourth_moment_mc",
    "moment_constants",
    "pure_state_moment_constant",
    "sample_isometry",
    "sample_isometry_batch",
    "Interval",
    "MeraNetwork",
    "Stage",
    "modular_distance",
    "v_children",
    "w_partner",
    "DimensionSchedule",
    "MemoryEstimate",
    "find_epsilon",
    "memory_estimate",
    "schedule_report",
    "solve_schedule",
    "DenseState",
    "DensityMatrix",
    "StateTrajectory",
    "build_state",
    "correlation_proxies",
    "entropy_renyi2",
    "entropy_vn",
    "interval_spectrum",
    "mc_entropy_stats",
    "mc_entropy_sweep",
    "mc_mutual_information",
    "mutual_information",
    "reduced_density",
    "CutBounds",
    "ReductionSequence",
    "ReductionStep",
    "SandwichBounds",
    "cut_dp",
    "interval_entropy_scaling",
    "mi_prediction",
    "sandwich",
    "SingularSpectrum",
    "SuperOperatorSpec",
    "build_superop",
    "collapse_experiment",
    "frobenius_check",
    "frobenius_exact",
    "second_singular_scaling",
    "singular_spectrum",
    "__version__",
]
