"""Deformable quad nets under area-preserving direction-preserving
transformations: classification, explicit deformation families, duals,
generators, and the smooth counterpart surfaces."""

from .errors import (
    CombescureError, NetValidationError, DegenerateGeometryError,
    NotDeformableError, ClassConditionError, AdmissibleRangeError,
    IsotropicPlaneError,
)
from .nets import (
    Tolerances, Quad, quad, check_quad, Net, net_from_grid, validate,
    require_valid, oriented_area, mixed_area, are_parallel_nets,
)
from .ratios import (
    simple_ratio, opposite_ratio, quad_from_ratios, affine_symmetric,
    affine_symmetry_residual, SimpleRatioFrame, local_frame,
    area_identity_residual, diagonal_intersection,
)
# the bare function stays at combescure.classify.classify so the submodule
# name keeps pointing at the module itself
from .classify import (
    ClassVerdict, ratio_tables, ratio_residual, koenigs_residual,
    is_koenigs, cone_net_kind, zigzag_diagnostic,
)
from .deform import (
    SystemPolynomial, deform_1x1, ClosedForm2x2, family_2x2_class_i,
    family_2x2_class_ii, propagate, christoffel_dual, dual_pair_residual,
    hyperbolic_family, cone_cylinder_family, DeformationFamily,
    family_from_propagation, family_from_dual, family_from_cone_cylinder,
    family_from_2x2, estimate_domain,
)
from .construct import (
    LShapedNet, extract_l_shape, complete_L, build_2x2_from_opposite_faces,
    ConeCylinderData, strip_apex, gen_cone_cylinder,
    extract_cone_cylinder_data, gen_doubled_cone_cylinder, lift_planar_net,
)
from .isotropic import (
    IsoPlane, ContactElement, delta_point, delta_plane, delta_contact,
    face_plane, dual_net, dual_family_invariants,
    isotropic_gaussian_curvature,
)
from .smooth import (
    PolyCurve, TrigCurve, SmoothConeCylinderNet, SmoothFamilyMember,
    sample_smooth, family_eval, first_fundamental_det, conjugate_net_check,
    translational_dual, TranslationalDual,
)
from . import io

__version__ = "0.1.0"
