"""geolab: geodesics, developments, and curvature bookkeeping on convex
triangulated surfaces."""

__version__ = "0.1.0"

from .mesh import ConvexMesh, angle_defect, validate_convex
from .generate import (
    SurfaceFamily,
    child_seed,
    convex_hull_mesh,
    generate_surface,
    icosphere,
)
from .tolerances import DEFAULT as DEFAULT_TOLERANCES, Tolerances
from .paths import (
    SurfacePath,
    SurfacePoint,
    eps_straight_subdivide,
    is_eps_straight,
    path_diameter,
    total_curvature,
    winding_number,
)
from .solver import GeodesicCertificate, shortest_path, steiner_graph
from .development import (
    PlanarDevelopment,
    check_liberman,
    develop_about_point,
    develop_in_direction,
    directional_tc,
)
from .horizon import (
    CrossingSequence,
    DriftFrameSequence,
    classify_sides,
    drift_angles,
    extract_horizon,
    find_crossings,
    plane_section,
)
from .spairs import (
    SignSequence,
    brute_force_oracle,
    check_depth_bounds,
    match_spairs,
    partition_indices,
)
from .lemmas import (
    almost_constant_arc,
    check_drift_monotonicity,
    check_global_bounds,
    check_growth,
    detect_and_check_tongues,
    split_three_arcs,
    tongue_tolerance,
)
from .reports import LemmaReport
from .sweep import SweepConfig, default_config, instance_checks, run_sweep
from .meshio import read_obj, read_off, write_obj, write_off

__all__ = [
    "ConvexMesh",
    "CrossingSequence",
    "DriftFrameSequence",
    "DEFAULT_TOLERANCES",
    "GeodesicCertificate",
    "LemmaReport",
    "PlanarDevelopment",
    "SignSequence",
    "SurfaceFamily",
    "SurfacePath",
    "SurfacePoint",
    "SweepConfig",
    "Tolerances",
    "__version__",
    "almost_constant_arc",
    "angle_defect",
    "brute_force_oracle",
    "check_depth_bounds",
    "check_drift_monotonicity",
    "check_global_bounds",
    "check_growth",
    "check_liberman",
    "child_seed",
    "classify_sides",
    "convex_hull_mesh",
    "default_config",
    "detect_and_check_tongues",
    "develop_about_point",
    "develop_in_direction",
    "directional_tc",
    "drift_angles",
    "eps_straight_subdivide",
    "extract_horizon",
    "find_crossings",
    "generate_surface",
    "icosphere",
    "instance_checks",
    "is_eps_straight",
    "match_spairs",
    "partition_indices",
    "path_diameter",
    "plane_section",
    "read_obj",
    "read_off",
    "run_sweep",
    "shortest_path",
    "split_three_arcs",
    "steiner_graph",
    "tongue_tolerance",
    "total_curvature",
    "validate_convex",
    "winding_number",
    "write_obj",
    "write_off",
]
