"""Box complexes, bigraph loop-space towers, and exact homology checks.

The package builds the combinatorial machinery around graph homomorphism
complexes: graphs and bigraphs with folds and exponentials, Hom/box/clique/
neighborhood complexes, exact integer homology via Smith normal form,
truncated loop-space towers with stabilization detection, the combinatorial
2-fundamental group, and an executable check suite tying them together.
"""

from .graphs import (
    Graph,
    Bigraph,
    GraphHom,
    OddInvolution,
    SizeCapError,
    complete_graph,
    cycle_graph,
    reflexive_interval,
    looped_point,
    standard_graph,
    interval_bigraph,
    k2_bigraph,
    product,
    product_bigraph,
    kronecker_cover,
    quotient_by_involution,
    exponential_graph,
    exponential_bigraph,
    find_dismantlable,
    fold_reduce,
    is_isomorphic,
    times_homotopic,
)

__all__ = [
    "Graph",
    "Bigraph",
    "GraphHom",
    "OddInvolution",
    "SizeCapError",
    "complete_graph",
    "cycle_graph",
    "reflexive_interval",
    "looped_point",
    "standard_graph",
    "interval_bigraph",
    "k2_bigraph",
    "product",
    "product_bigraph",
    "kronecker_cover",
    "quotient_by_involution",
    "exponential_graph",
    "exponential_bigraph",
    "find_dismantlable",
    "fold_reduce",
    "is_isomorphic",
    "times_homotopic",
]
