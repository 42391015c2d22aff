"""Quantum (multiplicative) max-flow / min-cut on capacity-weighted multigraphs."""

from .classical import Cut, GroupValue, edge_disjoint_paths, lex_min_cut
from .flow import (
    MultiplicativeFlow,
    cut_ratio,
    exponent_flows,
    flow_value,
    integer_flow,
    quantum_min_cut,
    rational_max_flow,
    saturation_check,
    scaling_params,
    strictify,
    verify_flow,
)
from .network import (
    Network,
    diamond2,
    parallel5,
    parse_network,
    path_network,
    scale_network,
    serialize_network,
)
from .oracles import brute_force_qmc, brute_force_qmf
from .protocol import Protocol, extract_protocol, simulate_protocol
from .tensor import contract_random, estimate_qmf_tilde

__version__ = "0.1.0"
