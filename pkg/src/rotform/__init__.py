"""Expansion and rotation quadratic forms of real endomorphisms.

Any real n x n matrix acts on a direction u as an expansion along u plus a
sum of plane rotations of u; the coefficients are values of quadratic forms.
This package builds those forms, recovers eigenstructure and geometric
multiplicity from their common zeros, verifies the accompanying trace and
determinant identities, and applies the machinery to the Frenet frames of
unit flow fields on three-space.
"""

from .errors import FieldError, InputError, NumericalError
from .linalg import (
    DEFAULT_TOL,
    Spectrum,
    ToleranceConfig,
    nullspace,
    principal_minor_sums,
    random_orthogonal,
    real_spectrum,
    sym_eigen,
)
from .quasirot import (
    RotationCoeffs,
    almost_orthogonal_expand,
    apply_quasi_rotation,
    plane_pairs,
    quasi_rotation,
    rotation_change_of_basis,
    skew_rotation_coeffs,
)
from .qforms import (
    Decomposition,
    FormFamily,
    QForm,
    commutator_forms,
    decompose,
    evaluate,
    expansion_form,
    form_average,
    form_extremes,
    form_family,
    polar,
    rotation_form,
    rotation_form_change_of_basis,
    rotation_trace_sum,
    zero_subspace_extend,
)
from .canonical import (
    DSSplit,
    NormalityReport,
    SkewBlockForm,
    expansion_eigenbasis,
    normal_power_basis,
    normality_report,
    skew_canonical_basis,
)
from .spectral import (
    PlanarReport,
    SpectralReport,
    bromwich_bounds,
    common_zero_check,
    eigenstructure,
    planar_analyze,
    skew_square_structure,
)
from .invariants import (
    InvariantReport,
    cayley_hamilton_residual,
    ch_form_residuals,
    ch_trace_residuals,
    collings_det,
    euler_cauchy_stokes,
    gram_trace_identity_residual,
    invariant_report,
    n4_det_identity_residual,
    newton_residuals,
    normal_invariant_recover,
    pm2_identity_residual,
    power_form_step,
)
from .frenet import (
    FlowField,
    FrenetData,
    circular_field,
    constant_field,
    field_jacobian,
    frenet_frame,
    frenet_rotation_forms,
    helix_field,
    model_compare,
    shape_map_frenet,
)

__version__ = "0.1.0"
