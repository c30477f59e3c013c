"""Frenet-frame analysis of unit flow fields on three-dimensional space.

The central object is the shape map of the field: the endomorphism sending a
direction Y to the directional derivative of the field along Y, expressed in
the moving (tangent, normal, binormal) frame.  Its rotation forms carry the
curvature and torsion; an idealised skew model of that matrix is assembled
from (kappa, tau, sigma) and compared entry by entry against the numerical
one, with discrepancies reported rather than assumed away.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FieldError, InputError
from .qforms import expansion_form, rotation_form
from .quasirot import plane_pairs

_UNIT_TOL = 1e-8


@dataclass(frozen=True)
class FlowField:
    """A unit vector field on (a subset of) three-space.

    evaluator maps a point to a 3-vector that must be unit length within
    1e-8 (checked on every query); jacobian, when supplied, returns the
    analytic 3x3 derivative and is preferred over finite differences.
    fd_step scales the central-difference step: h = fd_step * (1 + |x|).
    """

    evaluator: object
    jacobian: object = None
    fd_step: float = 1e-5
    name: str = "field"

    def at(self, x):
        x = np.asarray(x, dtype=float)
        v = np.asarray(self.evaluator(x), dtype=float)
        if v.shape != (3,):
            raise FieldError(f"{self.name} returned shape {v.shape}, expected a 3-vector")
        norm = float(np.linalg.norm(v))
        if not np.isfinite(norm) or abs(norm - 1.0) > _UNIT_TOL:
            raise FieldError(
                f"{self.name} is not unit at {tuple(float(c) for c in x)}: |v| = {norm:.12g}"
            )
        return v

    def step(self, x):
        return self.fd_step * (1.0 + float(np.linalg.norm(x)))


def _point(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise InputError(f"point must be a 3-vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("point has non-finite coordinates")
    return x


def field_jacobian(field, x):
    """Derivative matrix of the field at x: column j holds the directional
    derivative along the j-th axis.  Analytic when the field provides one,
    otherwise fourth-order central differences."""
    x = _point(x)
    if field.jacobian is not None:
        field.at(x)  # enforce the unit contract at the query point
        J = np.asarray(field.jacobian(x), dtype=float)
        if J.shape != (3, 3):
            raise FieldError(f"analytic jacobian returned shape {J.shape}")
        return J
    h = field.step(x)
    J = np.zeros((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        f1 = field.at(x - 2.0 * h * e)
        f2 = field.at(x - h * e)
        f3 = field.at(x + h * e)
        f4 = field.at(x + 2.0 * h * e)
        J[:, j] = (f1 - 8.0 * f2 + 8.0 * f3 - f4) / (12.0 * h)
    return J


def _directional(fn, x, direction, h):
    """Fourth-order directional derivative of a vector-valued function."""
    d = direction
    f1 = fn(x - 2.0 * h * d)
    f2 = fn(x - h * d)
    f3 = fn(x + h * d)
    f4 = fn(x + 2.0 * h * d)
    return (f1 - 8.0 * f2 + 8.0 * f3 - f4) / (12.0 * h)


def _normal_at(field, x, kappa_tol):
    J = field_jacobian(field, x)
    d = J @ field.at(x)
    norm = float(np.linalg.norm(d))
    if norm <= kappa_tol:
        raise InputError(
            f"straight flow: curvature {norm:.3e} at {tuple(float(c) for c in x)} "
            f"is below {kappa_tol:.3e}"
        )
    return d / norm


def frenet_frame(field, x, kappa_tol=1e-8):
    """(T, N, B, kappa, tau) at x.

    T is the field value, N the normalised turning direction, B their cross
    product; tau comes from a directional difference of the normal field
    along T.  Curvature at or below kappa_tol raises (straight flow).
    """
    x = _point(x)
    T = field.at(x)
    J = field_jacobian(field, x)
    dT = J @ T
    kappa = float(np.linalg.norm(dT))
    if kappa <= kappa_tol:
        raise InputError(
            f"straight flow: curvature {kappa:.3e} at {tuple(float(c) for c in x)} "
            f"is below {kappa_tol:.3e}"
        )
    N = dT / kappa
    B = np.cross(T, N)
    h = 10.0 * field.step(x)
    dN = _directional(lambda y: _normal_at(field, y, kappa_tol * 0.01), x, T, h)
    tau = float(dN @ B)
    return T, N, B, kappa, tau


@dataclass(frozen=True)
class FrenetData:
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float
    sigma: float
    shape_matrix: np.ndarray   # shape map in the (T, N, B) frame
    model_matrix: np.ndarray   # idealised skew model built from kappa, tau, sigma
    skew_residual: float       # max|A + A^T| of the numerical shape matrix


def model_shape_matrix(kappa, tau, sigma):
    return np.array(
        [
            [0.0, -kappa, 0.0],
            [kappa, 0.0, -tau + sigma],
            [0.0, tau - sigma, 0.0],
        ]
    )


def shape_map_frenet(field, x, kappa_tol=1e-8):
    """Shape map of the field at x in its own Frenet frame.

    sigma is defined operationally as tau minus the (B, N) entry of the
    numerical matrix, which makes the model's (3, 2) entry match by
    construction; every other model entry is a genuine prediction.
    """
    x = _point(x)
    T, N, B, kappa, tau = frenet_frame(field, x, kappa_tol)
    J = field_jacobian(field, x)
    F = np.column_stack([T, N, B])
    A_F = F.T @ J @ F
    sigma = tau - float(A_F[2, 1])
    model = model_shape_matrix(kappa, tau, sigma)
    skew_residual = float(np.max(np.abs(A_F + A_F.T)))
    return FrenetData(
        T=T, N=N, B=B, kappa=kappa, tau=tau, sigma=sigma,
        shape_matrix=A_F, model_matrix=model, skew_residual=skew_residual,
    )


def model_rotation_forms(kappa, tau, sigma):
    """Rotation forms of the idealised shape matrix in the Frenet frame,
    keyed by the (T,N) = (1,2), (T,B) = (1,3) and (N,B) = (2,3) planes."""
    half = 0.5 * (sigma - tau)
    return {
        (1, 2): np.array([[kappa, 0.0, half], [0.0, kappa, 0.0], [half, 0.0, 0.0]]),
        (1, 3): np.array([[0.0, -half, 0.0], [-half, 0.0, 0.5 * kappa], [0.0, 0.5 * kappa, 0.0]]),
        (2, 3): np.array(
            [[0.0, 0.0, -0.5 * kappa], [0.0, tau - sigma, 0.0], [-0.5 * kappa, 0.0, tau - sigma]]
        ),
    }


@dataclass(frozen=True)
class FrenetForms:
    data: FrenetData
    computed: dict       # pair -> QForm of the numerical shape matrix
    model: dict          # pair -> model matrix
    deltas: dict         # pair -> max entrywise difference
    expansion_norm: float


def frenet_rotation_forms(field, x, kappa_tol=1e-8):
    """Rotation forms of the numerical shape map next to the model forms.

    The model predicts a zero expansion form; its actual norm is reported.
    """
    data = shape_map_frenet(field, x, kappa_tol)
    computed = {pair: rotation_form(data.shape_matrix, pair) for pair in plane_pairs(3)}
    model = model_rotation_forms(data.kappa, data.tau, data.sigma)
    deltas = {
        pair: float(np.max(np.abs(computed[pair].matrix - model[pair])))
        for pair in plane_pairs(3)
    }
    expansion_norm = float(np.max(np.abs(expansion_form(data.shape_matrix).matrix)))
    return FrenetForms(
        data=data, computed=computed, model=model, deltas=deltas,
        expansion_norm=expansion_norm,
    )


@dataclass(frozen=True)
class ModelComparison:
    """Findings, not assertions: where the numerical shape matrix differs
    from the idealised skew model."""

    skew_residual: float
    entry_12: float            # numerical (T, N) entry
    model_entry_12: float      # the model says -kappa
    delta_12: float
    diag_22: float             # model says 0
    diag_33: float             # model says 0
    expansion_norm: float
    kernel_residual: float     # |A_F w| / |w| for w = (sigma - tau) T - kappa B
    sigma: float
    sigma_commutator: float    # [T, N].B via differences of the normal field
    sigma_alt: float           # -[T, B].N via differences of the binormal field
    sigma_spread: float        # max pairwise difference of the three sigmas


def compare_matrix_to_model(A_F, kappa, tau, sigma):
    """Entry-level comparison of a frame matrix against the skew model."""
    A_F = np.asarray(A_F, dtype=float)
    w = np.array([sigma - tau, 0.0, -kappa])
    norm_w = float(np.linalg.norm(w))
    kernel_residual = float(np.linalg.norm(A_F @ w)) / norm_w if norm_w > 0 else 0.0
    return {
        "skew_residual": float(np.max(np.abs(A_F + A_F.T))),
        "entry_12": float(A_F[0, 1]),
        "model_entry_12": -kappa,
        "delta_12": float(abs(A_F[0, 1] + kappa)),
        "diag_22": float(A_F[1, 1]),
        "diag_33": float(A_F[2, 2]),
        "expansion_norm": float(np.max(np.abs(0.5 * (A_F + A_F.T)))),
        "kernel_residual": kernel_residual,
    }


def model_compare(field, x, kappa_tol=1e-8):
    """Structured discrepancy report for the shape matrix at x."""
    x = _point(x)
    data = shape_map_frenet(field, x, kappa_tol)
    base = compare_matrix_to_model(data.shape_matrix, data.kappa, data.tau, data.sigma)
    h = 10.0 * field.step(x)
    J = field_jacobian(field, x)

    def normal_fn(y):
        return _normal_at(field, y, kappa_tol * 0.01)

    def binormal_fn(y):
        return np.cross(field.at(y), _normal_at(field, y, kappa_tol * 0.01))

    dN = _directional(normal_fn, x, data.T, h)
    dB = _directional(binormal_fn, x, data.T, h)
    bracket_TN = dN - J @ data.N
    bracket_TB = dB - J @ data.B
    sigma_commutator = float(bracket_TN @ data.B)
    sigma_alt = float(-(bracket_TB @ data.N))
    sigmas = (data.sigma, sigma_commutator, sigma_alt)
    spread = max(abs(a - b) for a in sigmas for b in sigmas)
    return ModelComparison(
        skew_residual=base["skew_residual"],
        entry_12=base["entry_12"],
        model_entry_12=base["model_entry_12"],
        delta_12=base["delta_12"],
        diag_22=base["diag_22"],
        diag_33=base["diag_33"],
        expansion_norm=base["expansion_norm"],
        kernel_residual=base["kernel_residual"],
        sigma=data.sigma,
        sigma_commutator=sigma_commutator,
        sigma_alt=sigma_alt,
        sigma_spread=spread,
    )


def helix_field(c, analytic=True):
    """Unit field (-y, x, c) / sqrt(x^2 + y^2 + c^2); singular on the z-axis
    when c = 0.  Integral curves are helices around the z-axis."""
    c = float(c)

    def evaluator(x):
        s2 = x[0] * x[0] + x[1] * x[1] + c * c
        if s2 <= 0.0:
            raise FieldError(f"helix field singular at {tuple(float(v) for v in x)}")
        s = np.sqrt(s2)
        return np.array([-x[1] / s, x[0] / s, c / s])

    def jacobian(x):
        s2 = x[0] * x[0] + x[1] * x[1] + c * c
        if s2 <= 0.0:
            raise FieldError(f"helix field singular at {tuple(float(v) for v in x)}")
        s = np.sqrt(s2)
        s3 = s * s2
        return np.array(
            [
                [x[0] * x[1] / s3, -1.0 / s + x[1] * x[1] / s3, 0.0],
                [1.0 / s - x[0] * x[0] / s3, -x[0] * x[1] / s3, 0.0],
                [-c * x[0] / s3, -c * x[1] / s3, 0.0],
            ]
        )

    return FlowField(
        evaluator=evaluator,
        jacobian=jacobian if analytic else None,
        name=f"helix(c={c:g})",
    )


def circular_field(analytic=True):
    """Planar rotation field around the z-axis: helix with c = 0."""
    return helix_field(0.0, analytic=analytic)


def constant_field(direction):
    """Constant unit field; zero curvature everywhere."""
    d = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise InputError("constant field needs a non-zero direction")
    d = d / norm
    return FlowField(evaluator=lambda x: d.copy(), jacobian=lambda x: np.zeros((3, 3)),
                     name="constant")


@dataclass(frozen=True)
class GridField:
    """Trilinear interpolation of unit samples on a regular grid.

    Raw samples must be unit within 1e-8 (checked at construction); the
    interpolated value is renormalised so queries meet the unit contract.
    Queries outside the grid raise.
    """

    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray  # shape (nx, ny, nz, 3)

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        spacing = np.asarray(self.spacing, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if origin.shape != (3,) or spacing.shape != (3,):
            raise InputError("grid origin and spacing must be 3-vectors")
        if np.any(spacing <= 0.0):
            raise InputError("grid spacing must be positive")
        if values.ndim != 4 or values.shape[3] != 3 or min(values.shape[:3]) < 2:
            raise InputError(
                f"grid values must have shape (nx, ny, nz, 3) with nx, ny, nz >= 2, "
                f"got {values.shape}"
            )
        norms = np.linalg.norm(values, axis=3)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > _UNIT_TOL:
            raise InputError(f"grid samples are not unit: worst |v| deviation {worst:.3e}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "values", values)

    def __call__(self, x):
        rel = (np.asarray(x, dtype=float) - self.origin) / self.spacing
        dims = self.values.shape[:3]
        if np.any(rel < 0.0) or any(rel[i] > dims[i] - 1 for i in range(3)):
            raise FieldError(f"point {tuple(float(v) for v in x)} lies outside the sampled grid")
        i0 = np.minimum(rel.astype(int), np.array(dims) - 2)
        f = rel - i0
        out = np.zeros(3)
        for dx in (0, 1):
            for dy in (0, 1):
                for dz in (0, 1):
                    weight = (
                        (f[0] if dx else 1.0 - f[0])
                        * (f[1] if dy else 1.0 - f[1])
                        * (f[2] if dz else 1.0 - f[2])
                    )
                    out += weight * self.values[i0[0] + dx, i0[1] + dy, i0[2] + dz]
        norm = float(np.linalg.norm(out))
        if norm == 0.0:
            raise FieldError("interpolated field vanished; samples disagree too strongly")
        return out / norm


def grid_field(origin, spacing, values, fd_step=1e-5):
    interp = GridField(origin=origin, spacing=spacing, values=values)
    return FlowField(evaluator=interp, jacobian=None, fd_step=fd_step, name="grid field")
