"""conelab: support cones of convex bodies and the checks that characterize
ellipsoids through them."""

from ._kernels import BACKEND as kernel_backend
from .bodies import (
    ContainmentError,
    CustomBody,
    Ellipsoid,
    NotOnSurfaceError,
    Polytope,
    RadialBody,
    RadialPoly,
    StarSurface,
    SupportBody,
    Superellipsoid,
    antipode,
    body_from_dict,
    body_to_dict,
    circumradius,
    contains,
    diametral_chord_test,
    perturbed_ellipsoid,
    perturbed_superellipsoid,
    random_ellipsoid,
    random_rotation,
    random_star_surface,
    section_through_origin,
)
from .characterize import (
    SipReport,
    SipScene,
    central_symmetry_check,
    construct_e3,
    deviation_metric,
    hammer_test,
    homothety_ratio,
    kakutani_test,
    omega_identity_check,
    reflection_conjugacy_check,
    shadow_boundary_test,
    sip_check,
)
from .cones import (
    ApexInsideBodyError,
    CollinearityError,
    GrazeSet,
    SupportCone,
    TangencySearchError,
    cone_contains,
    cone_pair_intersection,
    graze_sample,
    is_ellipsoidal_cone,
    polar_hyperplane,
)
from .geometry import (
    AffineReflection,
    DegenerateReflectionError,
    GeometryError,
    Hyperplane,
    RankDeficiencyError,
    fit_hyperplane,
    fit_hyperplane_through_origin,
    orthonormal_basis,
    reflect,
)

__version__ = "0.1.0"

__all__ = [
    "AffineReflection",
    "ApexInsideBodyError",
    "CollinearityError",
    "ContainmentError",
    "CustomBody",
    "DegenerateReflectionError",
    "Ellipsoid",
    "GeometryError",
    "GrazeSet",
    "Hyperplane",
    "NotOnSurfaceError",
    "Polytope",
    "RadialBody",
    "RadialPoly",
    "RankDeficiencyError",
    "SipReport",
    "SipScene",
    "StarSurface",
    "SupportBody",
    "SupportCone",
    "Superellipsoid",
    "TangencySearchError",
    "antipode",
    "body_from_dict",
    "body_to_dict",
    "central_symmetry_check",
    "circumradius",
    "cone_contains",
    "cone_pair_intersection",
    "construct_e3",
    "contains",
    "deviation_metric",
    "diametral_chord_test",
    "fit_hyperplane",
    "fit_hyperplane_through_origin",
    "graze_sample",
    "hammer_test",
    "homothety_ratio",
    "is_ellipsoidal_cone",
    "kakutani_test",
    "kernel_backend",
    "omega_identity_check",
    "orthonormal_basis",
    "perturbed_ellipsoid",
    "perturbed_superellipsoid",
    "polar_hyperplane",
    "random_ellipsoid",
    "random_rotation",
    "random_star_surface",
    "reflect",
    "reflection_conjugacy_check",
    "section_through_origin",
    "shadow_boundary_test",
    "sip_check",
]
