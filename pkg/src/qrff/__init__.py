"""qrff: statevector simulation and Fourier-sampling construction of
block-diagonal variational and reservoir quantum circuits, with empirical
verification of their n^(-1/2) approximation-error bounds."""

from .bounds import (
    BoundReport,
    bound_l2_reservoir,
    bound_l2_trainable,
    bound_linf_reservoir,
    bound_linf_trainable,
    mixture_constant,
    mixture_l2bar_bound,
)
from .circuit import (
    CircuitParams,
    ResidueProbabilities,
    closed_form,
    closed_form_batch,
    estimate_probabilities,
    evaluate,
    exact_probabilities,
)
from .estimators import QuantumReservoirRegressor, ReservoirFeatureMap
from .fourier import (
    FourierModel,
    NormComputationError,
    NormReport,
    compute_norms,
    gaussian_model,
    get_model,
    laplace_model,
    shifted_gaussian_model,
)
from .gates import (
    build_reservoir_unitary,
    build_state_prep,
    build_trainable_unitary,
    hadamard,
    padded_dimension,
    ry,
    rz,
    trainable_block,
    u1_block,
)
from .harness import (
    ConfigError,
    ErrorMeasure,
    ExperimentConfig,
    ExperimentRecord,
    l2_error,
    parse_config,
    run_scaling_experiment,
    sup_error,
)
from .reservoir import (
    AbsoluteContinuityError,
    RankDeficiencyError,
    ReadoutWeights,
    ReservoirCircuit,
    features,
    features_closed_form,
    fit_readout,
    load_dataset,
    optimal_weights,
    save_dataset,
)
from .sampling import (
    FourierSamplingPlan,
    FrequencyDensity,
    ReservoirDraw,
    build_plan,
    cauchy_density,
    gaussian_density,
    mixture_density,
    parse_density,
    sample_reservoir,
    sample_theta,
    student_t_density,
)
from .statevector import (
    BlockDiagonalUnitary,
    MeasurementDistribution,
    StateVector,
    apply_block_diagonal,
    exact_distribution,
    sample_shots,
)

__version__ = "0.1.0"
