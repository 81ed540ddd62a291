"""Complex-vector fingerprints for persistence diagrams.

Pipeline: triangle mesh -> scalar filter -> degree-0 persistence diagram
-> complex roots -> elementary-symmetric coefficient vector -> distances
and retrieval evaluation.
"""

from .coefficients import (
    CoefficientVector,
    coefficient_vector,
    default_coefficient_count,
    elementary_symmetric,
    embed_diagram,
    embed_roots,
    pad_roots,
)
from .diagram import (
    PersistenceDiagram,
    PersistencePoint,
    parse_diagram,
    serialize_diagram,
)
from .mesh import (
    FILTERS,
    MeshFrame,
    TriangleMesh,
    axis_vector,
    beta0,
    center_of_mass,
    filter_line,
    filter_plane,
    mesh_zero_persistence,
    multiplicity0,
    normalize_mesh,
    parse_off,
    triangle_edges,
    zero_persistence,
)
from .metrics import (
    COEFFICIENT_METRICS,
    METRICS,
    bottleneck_bruteforce,
    bottleneck_distance,
    coefficient_distance,
    point_distance,
)
from .retrieval import (
    DatabaseEntry,
    DistanceMatrix,
    LabeledDatabase,
    PRTable,
    database_labels,
    distance_matrix,
    embed_database,
    load_index,
    parse_index,
    parse_labels,
    parse_matrix,
    parse_pr_table,
    pr_curve,
    save_index,
    serialize_index,
    serialize_labels,
    serialize_matrix,
    serialize_pr_table,
    synthetic_database,
    two_stage_query,
)
from .transforms import (
    TRANSFORMS,
    ComplexRoot,
    ComplexRootList,
    get_transform,
    transform_diagram,
    transform_point,
)

__all__ = [
    "COEFFICIENT_METRICS",
    "FILTERS",
    "METRICS",
    "TRANSFORMS",
    "CoefficientVector",
    "ComplexRoot",
    "ComplexRootList",
    "DatabaseEntry",
    "DistanceMatrix",
    "LabeledDatabase",
    "MeshFrame",
    "PRTable",
    "PersistenceDiagram",
    "PersistencePoint",
    "TriangleMesh",
    "axis_vector",
    "beta0",
    "bottleneck_bruteforce",
    "bottleneck_distance",
    "center_of_mass",
    "coefficient_distance",
    "coefficient_vector",
    "database_labels",
    "default_coefficient_count",
    "distance_matrix",
    "elementary_symmetric",
    "embed_database",
    "embed_diagram",
    "embed_roots",
    "filter_line",
    "filter_plane",
    "get_transform",
    "load_index",
    "mesh_zero_persistence",
    "multiplicity0",
    "normalize_mesh",
    "pad_roots",
    "parse_diagram",
    "parse_index",
    "parse_labels",
    "parse_matrix",
    "parse_off",
    "parse_pr_table",
    "point_distance",
    "pr_curve",
    "save_index",
    "serialize_diagram",
    "serialize_index",
    "serialize_labels",
    "serialize_matrix",
    "serialize_pr_table",
    "synthetic_database",
    "transform_diagram",
    "transform_point",
    "triangle_edges",
    "two_stage_query",
    "zero_persistence",
]

__version__ = "0.1.0"
