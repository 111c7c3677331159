"""wpgeo: exact Weil-Petersson volumes, geodesic enumeration on small
hyperbolic surfaces, Selberg-style test-function transforms, and
moduli-space expectation engines, with a command-line interface.
"""

__version__ = "1.0.0"

__all__ = [
    "exactpi",
    "intersections",
    "volumes",
    "geodesics",
    "spectral",
    "expectations",
]
