"""Field-size bounds and constructions for secure linear network codes."""

from .bounds import (
    BoundsReport,
    ClassPartition,
    bound_report,
    class_subspace_keys,
    enumerate_E_r_cut,
    equivalence_classes,
)
from .cuts import (
    MinCutFamily,
    PathSystem,
    augment_for_set,
    edge_disjoint_paths,
    enumerate_min_cuts,
    is_cut,
    min_cut_meet,
    mincut_capacity,
)
from .gf import FieldMatrix, PrimeField, invert, rank, spans_intersect_trivially
from .lnc import LinearNetworkCode, construct_lnc, enumerate_E_r, kernel_matrix
from .netmodel import (
    ChannelSet,
    Edge,
    Network,
    gen_combination,
    load_network,
    precedes,
    render_network,
    topological_order,
)
from .secure import (
    SecureCode,
    Transmission,
    choose_secure_basis,
    construct_secure_code,
    decode,
    encode,
    verify_secure_condition,
    verify_security_exhaustive,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsReport",
    "ChannelSet",
    "ClassPartition",
    "Edge",
    "FieldMatrix",
    "LinearNetworkCode",
    "MinCutFamily",
    "Network",
    "PathSystem",
    "PrimeField",
    "SecureCode",
    "Transmission",
    "augment_for_set",
    "bound_report",
    "choose_secure_basis",
    "class_subspace_keys",
    "construct_lnc",
    "construct_secure_code",
    "decode",
    "edge_disjoint_paths",
    "encode",
    "enumerate_E_r",
    "enumerate_E_r_cut",
    "enumerate_min_cuts",
    "equivalence_classes",
    "gen_combination",
    "invert",
    "is_cut",
    "kernel_matrix",
    "load_network",
    "min_cut_meet",
    "mincut_capacity",
    "precedes",
    "rank",
    "render_network",
    "spans_intersect_trivially",
    "topological_order",
    "verify_secure_condition",
    "verify_security_exhaustive",
]
