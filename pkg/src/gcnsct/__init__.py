"""Smoothness analysis and learnable smoothness control for graph
convolutional features."""

from .activations import (
    Activation,
    elu,
    identity,
    leaky_relu,
    leaky_relu_sphere_residual,
    pos_neg_split,
    relu,
    relu_midpoint_sphere_residual,
    relu_sphere_residual,
    selu,
    split_projection_identity_residual,
    srelu,
)
from .control import (
    SweepCurve,
    leaky_range_probe,
    relu_min_smoothness_closed_form,
    shifted_input,
    sweep,
    verify_monotone_region,
)
from .errors import (
    ConfigError,
    GcnSctError,
    InputError,
    NumericalError,
    ShapeError,
    TrainingError,
)
from .graphs import (
    Graph,
    PropagationOperator,
    SpectralBasis,
    build_propagation_operator,
    connected_components,
    eigenbasis,
    load_graph,
    make_graph,
    parse_graph_text,
)
from .linalg import symmetric_eigendecomposition
from .models import Model, ModelConfig, SctParams, gcn_layer, gcnii_layer, egnn_layer, sct_term
from .optim import Adam, adam_step
from .smoothness import (
    SmoothnessReport,
    decompose,
    dirichlet_energy,
    distance_to_eigenspace,
    normalized_smoothness,
    smoothness_report,
)
from .training import Dataset, RunResult, TrainConfig, nll_loss, sbm_dataset, t_score, train

__version__ = "0.1.0"
