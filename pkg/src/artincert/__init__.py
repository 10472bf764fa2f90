"""Certifying toolkit for Artin groups of labelled presentation graphs.

Decides applicability of constructive poly-freeness criteria, emits
machine-checkable certificates (chains of quotient maps with free kernels,
or FJCw derivation trees), and re-verifies certificates independently,
backed by exact word arithmetic in the dihedral-type edge groups.
"""

from .certify import (
    CertificateError,
    FjcCertificate,
    PolyFreeCertificate,
    Verdict,
    certify_fjcw,
    certify_polyfree,
    explain,
    verify_certificate,
)
from .graphs import (
    GraphError,
    JoinDecomposition,
    LabelledGraph,
    NotSpherical,
    SphericalFactorization,
    enumerate_maximal_cliques,
    full_subgraph,
    is_even,
    is_fc_even,
    is_tree,
    join_decomposition,
    link,
    parse_graph,
    serialize_graph,
    spherical_factorization,
    star,
)
from .reductions import (
    Chain,
    QuotientStep,
    choose_split_vertex,
    clique_reduction_chain,
    completion_chain,
    edge_addition_step,
    free_product_split,
    split_at_vertex,
    spherical_tower,
    tree_reduction,
)
from .words import (
    BaumslagSolitarGroup,
    BSNormalForm,
    DihedralNormalForm,
    OddDihedralGroup,
    Word,
    WordError,
    bs_normal_form,
    check_substitution,
    dihedral_normal_form,
    eval_R,
    eval_chi,
    eval_retraction,
    even_edge_change,
    free_reduce,
    is_elliptic,
    kernel_free_action_check,
    odd_edge_change,
    substitute,
)

__version__ = "0.1.0"
