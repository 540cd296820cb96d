"""Numeric tolerances used across the package.

Relative tolerances are expressed per unit of the named scale; call sites
multiply by the mesh bounding-box diameter or the path length as documented.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default tolerance profile.

    Attributes
    ----------
    hull_rel : convexity slack per unit of bounding-box diameter, used both
        for hull membership and for dihedral tests.
    defect : absolute slack on angle defects and their closed sums.
    straightness : largest unfolded turning residual, in radians, that a
        certified geodesic may carry at any single crossing.
    length_rel : slack on length comparisons per unit of mesh diameter.
    on_surface_rel : distance to the surface per unit of diameter below
        which a point counts as lying on the mesh.
    development_rel : tolerance on invariants of developments per unit of
        arc length.
    generic : margin below which a dot product counts as a tie.
    merge_rel : crossings closer than this fraction of the path length are
        merged as one tangency.
    graze_rel : crossing parameters are clamped this far (per unit of mesh
        diameter) from edge endpoints.
    """

    hull_rel: float = 1e-9
    defect: float = 1e-9
    straightness: float = 1e-8
    length_rel: float = 1e-6
    on_surface_rel: float = 1e-10
    development_rel: float = 1e-10
    generic: float = 1e-12
    merge_rel: float = 1e-7
    graze_rel: float = 1e-9
    curvature: float = 1e-4
    frame: float = 1e-6
    winding: float = 1e-6


DEFAULT = Tolerances()
