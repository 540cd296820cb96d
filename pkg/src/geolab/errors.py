"""Exception types shared across the package."""


class GeolabError(Exception):
    """Base class for domain errors raised by geolab operations."""


class MeshTopologyError(GeolabError):
    """The face complex is not a closed orientable manifold of sphere type."""


class GenerationError(GeolabError):
    """A surface generator exhausted its retry budget."""


class OffSurfaceError(GeolabError):
    """A query point does not lie on the mesh within tolerance."""


class NonGenericDirectionError(GeolabError):
    """A direction is too close to degenerate for the requested analysis."""


class StraighteningError(GeolabError):
    """Path straightening failed to reach a stable corridor."""


class DevelopmentError(GeolabError):
    """A planar development is infeasible beyond rounding tolerance."""
