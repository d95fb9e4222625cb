"""Exact and verified computation for hyperbolic toral dynamics.

The package computes in four layers:

* exact algebra on toral automorphisms, their inverse-limit solenoids,
  and the associated covers (``linalg``, ``solenoid``, ``cover``);
* a shadowing engine with a priori existence and uniqueness bounds
  (``shadowing``) and two conjugacies built on top of it
  (``conjugacy``);
* measures of maximal entropy for shifts of finite type, word weights,
  and the signed unstable length functional (``mme``);
* an attractor classifier driven by sampled orbits (``classify``).

An HTTP service (``soldyn.service``) and a thin command line client
(``soldyn.cli``) expose every operation.
"""

__version__ = "1.0.0"

from .classify import (
    AttractorReport,
    ClassifierConfig,
    DivergenceError,
    EstimatorQualityError,
    InvalidCombinationError,
    InvalidSpecError,
    MapSpec,
    OrbitCloud,
    box_counting_dimension,
    classify,
    generate_orbit,
    lyapunov_spectrum,
    report,
    report_many,
)
from .conjugacy import (
    ConjugacyMap,
    PerturbedToral,
    PicardDivergenceError,
    SmaleSystem,
    default_perturbation,
    linearize_at,
    perturbed_anosov_conjugacy,
    solenoid_to_attractor,
    verify_conjugacy,
)
from .cover import CoverPoint, TildeCoverPoint, verify_cover_identities
from .linalg import (
    DefectiveMatrixError,
    HyperbolicSplitting,
    IntMatrix,
    TorusPoint,
    check_hyperbolic,
    splitting,
    toral_entropy,
)
from .mme import (
    InadmissibleWordError,
    LinearModelPath,
    PerronData,
    TransitionMatrix,
    entropy_sft,
    enumerate_weights,
    full_shift_transition,
    golden_mean_transition,
    path_unstable_length,
    transition_from_adjacency,
    unstable_length,
    verify_weight_laws,
    word_weight,
)
from .shadowing import (
    ProductHyperbolicSystem,
    PseudoOrbit,
    ShadowResult,
    doubling_system,
    existence_bound,
    linear_toral_system,
    sample_pseudo_orbit,
    shadow,
    uniqueness_epsilon,
    verify_shadow,
)
from .solenoid import SolenoidPoint, identity_point, random_point

__all__ = [
    "__version__",
    "AttractorReport",
    "ClassifierConfig",
    "ConjugacyMap",
    "CoverPoint",
    "DefectiveMatrixError",
    "DivergenceError",
    "EstimatorQualityError",
    "HyperbolicSplitting",
    "InadmissibleWordError",
    "IntMatrix",
    "InvalidCombinationError",
    "InvalidSpecError",
    "LinearModelPath",
    "MapSpec",
    "OrbitCloud",
    "PerronData",
    "PerturbedToral",
    "PicardDivergenceError",
    "ProductHyperbolicSystem",
    "PseudoOrbit",
    "ShadowResult",
    "SmaleSystem",
    "SolenoidPoint",
    "TildeCoverPoint",
    "TorusPoint",
    "TransitionMatrix",
    "box_counting_dimension",
    "check_hyperbolic",
    "classify",
    "default_perturbation",
    "doubling_system",
    "entropy_sft",
    "enumerate_weights",
    "existence_bound",
    "full_shift_transition",
    "generate_orbit",
    "golden_mean_transition",
    "identity_point",
    "linear_toral_system",
    "linearize_at",
    "lyapunov_spectrum",
    "path_unstable_length",
    "perturbed_anosov_conjugacy",
    "random_point",
    "report",
    "report_many",
    "sample_pseudo_orbit",
    "shadow",
    "solenoid_to_attractor",
    "splitting",
    "toral_entropy",
    "transition_from_adjacency",
    "uniqueness_epsilon",
    "unstable_length",
    "verify_conjugacy",
    "verify_cover_identities",
    "verify_shadow",
    "verify_weight_laws",
    "word_weight",
]
