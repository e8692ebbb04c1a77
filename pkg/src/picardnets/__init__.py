"""Explicit feedforward networks for full-history Picard estimators.

The package is organized bottom-up: plain network containers and activation
descriptions, a composition calculus on them, identity and interpolation
building blocks, a counter-based sampling oracle, the recursive estimator,
the compiler that turns an estimator instance into one network, and a small
heat-equation lab used for convergence runs.
"""

from .activations import Activation, leaky_relu, parse_activation, relu, repu, softplus
from .calculus import (
    activation_wrapper,
    affine,
    compose,
    extend,
    fan_in,
    fan_out,
    identity_affine,
    linear_combination_same,
    parallelize,
    power,
    scalar_mul,
    sum_diff_depth,
    sum_same_depth,
)
from .compiler import (
    CompileInputs,
    EquivalenceReport,
    PARAM_BOUND_LIMIT,
    SizeReport,
    bound_depth,
    bound_params,
    bound_width,
    compile_mlp,
    prune_zero_blocks,
    report_json,
    size_report,
    verify_equivalence,
)
from .engine import MlpConfig, ProblemFns, ROOT_PATH, mlp_estimate_batch, mlp_eval
from .identities import (
    default_identity,
    identity_leaky,
    identity_power,
    identity_repu,
    identity_softplus,
    monomial_net,
)
from .interp import (
    ApproxGuarantee,
    Grid,
    LipschitzFn,
    approx_net_leaky,
    approx_net_relu,
    approx_net_softplus,
    empirical_modulus,
    interp_net_leaky,
    interp_net_relu,
    interp_net_softplus,
    lin_interp,
)
from .network import (
    Network,
    depth,
    dim_at,
    dims,
    dumps_network,
    hidden_count,
    input_dim,
    load_network,
    loads_network,
    max_width,
    network,
    output_dim,
    param_count,
    realize,
    save_network,
)
from .pde import (
    CSV_HEADER,
    EngineForm,
    ErrorEstimate,
    PdeProblem,
    brownian_moment_check,
    convergence_experiment,
    lp_error,
    pde_residual_check,
    reference_solution,
    rows_to_csv,
    time_rescale,
)
from .sampling import (
    RandomOracle,
    box_point,
    box_points,
    brownian_increment,
    probe_point,
    theta_bytes,
    uniform_time,
)

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "ApproxGuarantee",
    "CSV_HEADER",
    "CompileInputs",
    "EngineForm",
    "EquivalenceReport",
    "ErrorEstimate",
    "Grid",
    "LipschitzFn",
    "MlpConfig",
    "Network",
    "PARAM_BOUND_LIMIT",
    "PdeProblem",
    "ProblemFns",
    "ROOT_PATH",
    "RandomOracle",
    "SizeReport",
    "activation_wrapper",
    "affine",
    "approx_net_leaky",
    "approx_net_relu",
    "approx_net_softplus",
    "bound_depth",
    "bound_params",
    "bound_width",
    "box_point",
    "box_points",
    "brownian_increment",
    "brownian_moment_check",
    "compile_mlp",
    "compose",
    "convergence_experiment",
    "default_identity",
    "depth",
    "dim_at",
    "dims",
    "dumps_network",
    "empirical_modulus",
    "extend",
    "fan_in",
    "fan_out",
    "hidden_count",
    "identity_affine",
    "identity_leaky",
    "identity_power",
    "identity_repu",
    "identity_softplus",
    "input_dim",
    "interp_net_leaky",
    "interp_net_relu",
    "interp_net_softplus",
    "leaky_relu",
    "lin_interp",
    "linear_combination_same",
    "load_network",
    "loads_network",
    "lp_error",
    "max_width",
    "mlp_estimate_batch",
    "mlp_eval",
    "monomial_net",
    "network",
    "output_dim",
    "parallelize",
    "param_count",
    "parse_activation",
    "pde_residual_check",
    "power",
    "probe_point",
    "prune_zero_blocks",
    "realize",
    "reference_solution",
    "relu",
    "report_json",
    "repu",
    "rows_to_csv",
    "save_network",
    "scalar_mul",
    "size_report",
    "softplus",
    "sum_diff_depth",
    "sum_same_depth",
    "theta_bytes",
    "time_rescale",
    "uniform_time",
    "verify_equivalence",
]
