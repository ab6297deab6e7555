"""Cluster trees of piecewise-constant densities.

Build Hartigan trees and finest axiom trees over region complexes, check
the clustering axioms directly, compare dendrograms with the merge
distortion distance, and approximate continuous densities on shifted
grids whose cells meet only along full faces.
"""
from .axioms import (
    AxiomVerdict,
    BoxCluster,
    ClusterSet,
    check_a1,
    check_a2,
    check_a3,
    enumerate_axiom_clusters,
    is_cluster_tree,
    is_finer,
    verify_cluster,
)
from .discretizer import (
    ConvergenceReport,
    DensitySpec,
    Discretization,
    convergence_experiment,
    discretize,
    split_fixture,
    sup_on_cell,
    truth_merge_height,
)
from .exceptions import (
    ClusterTreeError,
    DisconnectedSupportError,
    EmptyComplexError,
    InvariantError,
    NotInClassError,
    PreconditionError,
    SchemaError,
)
from .level_tree import (
    Dendrogram,
    Forest,
    axiom_forest,
    axiom_tree,
    export_forest,
    export_tree,
    forest_from_json,
    hartigan_forest,
    hartigan_tree,
    sweep_forest,
    sweep_tree,
    tree_from_json,
)
from .merge_metric import (
    DistortionResult,
    is_isomorphic,
    merge_distortion,
    merge_height,
    merge_height_maximin,
    merge_height_table,
    sup_norm_distance,
)
from .regions import (
    Adjacency,
    Region,
    RegionComplex,
    build_complex_abstract,
    build_complex_from_cells,
    classify,
    complex_from_json,
    export_complex,
    region_at,
)
from .shifted_grid import Box, CellId, ShiftedGrid

__version__ = "0.1.0"
