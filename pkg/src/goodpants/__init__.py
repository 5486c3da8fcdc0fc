"""Good-pants workbench on the regular-octagon genus-2 surface.

Enumeration of good curves and pants, feet measures with exact
bookkeeping, the correction homology producing boundary witnesses, and
the Hall pairing that assembles covers with twists near +1.
"""

from .formal import FormalSum, average
from .group import (ClosedGeodesic, GroupElement, ResourceBudgetError,
                    SurfaceGroup, standard_group)
from .inefficiency import (BrokenPath, angle_inefficiency, arc_inefficiency,
                           closed_inefficiency, third_side)
from .pants import Pants, enumerate_pants, pants_from_theta_graph
from .plane import Geodesic, Isometry, UnitTangent, angle, dis, dist, transport

__all__ = [
    "FormalSum", "average", "ClosedGeodesic", "GroupElement",
    "ResourceBudgetError", "SurfaceGroup", "standard_group", "BrokenPath",
    "angle_inefficiency", "arc_inefficiency", "closed_inefficiency",
    "third_side", "Pants", "enumerate_pants", "pants_from_theta_graph",
    "Geodesic", "Isometry", "UnitTangent", "angle", "dis", "dist",
    "transport",
]

__version__ = "0.1.0"
