"""Two-plane quasi-rotations and the expansions built on them.

A quasi-rotation of the (k, l) basis plane sends b_k -> b_l, b_l -> -b_k and
annihilates every other basis vector; it is skew and rank 2.  Plane pairs are
1-based with k < l throughout, iterated in lexicographic order.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import as_square, as_vector, check_orthogonal, maxabs


def plane_pairs(n):
    """Lexicographic (k, l) pairs, 1 <= k < l <= n."""
    for k in range(1, n):
        for l in range(k + 1, n + 1):
            yield (k, l)


def check_plane_pair(n, pair):
    if isinstance(pair, str):
        raise InputError(f"plane pair must be a (k, l) index pair, got {pair!r}")
    try:
        k, l = pair
        k, l = int(k), int(l)
    except (TypeError, ValueError):
        raise InputError(f"plane pair must be a (k, l) index pair, got {pair!r}") from None
    if not (1 <= k < l <= n):
        raise InputError(f"invalid plane pair {pair!r} for dimension {n}: need 1 <= k < l <= n")
    return k, l


@dataclass(frozen=True)
class RotationCoeffs:
    """A real coefficient for every plane pair of dimension n."""

    n: int
    values: dict

    def __post_init__(self):
        expected = set(plane_pairs(self.n))
        got = set(self.values)
        if got != expected:
            raise InputError(
                f"coefficient domain mismatch for dimension {self.n}: "
                f"missing {sorted(expected - got)}, extra {sorted(got - expected)}"
            )

    def __getitem__(self, pair):
        k, l = check_plane_pair(self.n, pair)
        return self.values[(k, l)]

    def items(self):
        for pair in plane_pairs(self.n):
            yield pair, self.values[pair]

    def vector(self):
        return np.array([self.values[pair] for pair in plane_pairs(self.n)])

    def norm_sq(self):
        return float(sum(v * v for _, v in self.items()))


def rotation_coeffs_from_vector(n, vec):
    vec = as_vector(vec, "coefficient vector")
    pairs = list(plane_pairs(n))
    if len(vec) != len(pairs):
        raise InputError(f"expected {len(pairs)} coefficients for dimension {n}, got {len(vec)}")
    return RotationCoeffs(n, {pair: float(v) for pair, v in zip(pairs, vec)})


def quasi_rotation(n, pair):
    """Matrix of the quasi-rotation of the (k, l) plane: entry (l, k) = 1, (k, l) = -1."""
    k, l = check_plane_pair(n, pair)
    R = np.zeros((n, n))
    R[l - 1, k - 1] = 1.0
    R[k - 1, l - 1] = -1.0
    return R


def apply_quasi_rotation(u, pair):
    """u^k b_l - u^l b_k; orthogonal to u, zero on the complement of the plane."""
    u = as_vector(u)
    k, l = check_plane_pair(len(u), pair)
    out = np.zeros_like(u)
    out[l - 1] = u[k - 1]
    out[k - 1] = -u[l - 1]
    return out


def almost_orthogonal_expand(u, v, unit_tol=1e-10):
    """Expand u over the unit vector v and its quasi-rotated images.

    Returns (c0, coeffs) with c0 = u.v and coeffs[(k, l)] = u.R_kl(v); the
    reassembly c0*v + sum coeffs*R_kl(v) reproduces u and the coefficient
    squares sum to ||u||^2.  v must already be unit; nothing is normalised
    silently.
    """
    u = as_vector(u)
    v = as_vector(v)
    if len(u) != len(v):
        raise InputError(f"dimension mismatch: {len(u)} vs {len(v)}")
    nv = float(np.linalg.norm(v))
    if abs(nv - 1.0) > unit_tol:
        raise InputError(f"expansion axis must be unit length: ||v|| = {nv:.12g}")
    n = len(u)
    c0 = float(u @ v)
    M = np.outer(v, u) - np.outer(u, v)
    coeffs = {(k, l): float(M[k - 1, l - 1]) for k, l in plane_pairs(n)}
    return c0, RotationCoeffs(n, coeffs)


def reassemble(c0, coeffs, v):
    """c0*v + sum over pairs coeffs[(k,l)] * R_kl(v)."""
    v = as_vector(v)
    out = c0 * v.copy()
    for (k, l), c in coeffs.items():
        out[l - 1] += c * v[k - 1]
        out[k - 1] -= c * v[l - 1]
    return out


def skew_rotation_coeffs(S, skew_tol=1e-10):
    """Coefficients of a skew matrix over the quasi-rotation basis: c(k,l) = -S[k,l]."""
    S = as_square(S, "skew matrix")
    gap = maxabs(S + S.T)
    if gap > skew_tol * max(maxabs(S), 1e-300):
        raise InputError(f"matrix is not skew-symmetric: max|S + S^T| = {gap:.3e}")
    n = S.shape[0]
    return RotationCoeffs(n, {(k, l): float(-S[k - 1, l - 1]) for k, l in plane_pairs(n)})


def coeffs_to_matrix(coeffs):
    """Sum of coeffs[(k,l)] * [R_kl]; always skew."""
    n = coeffs.n
    M = np.zeros((n, n))
    for (k, l), c in coeffs.items():
        M[l - 1, k - 1] += c
        M[k - 1, l - 1] -= c
    return M


def rotation_change_of_basis(P, pq):
    """Express the quasi-rotation of the (p, q) plane of the basis given by the
    columns of P as a combination of the plane rotations of the original basis.

    c(k, l) = -(P^l_p P^k_q - P^l_q P^k_p), so that sum c(k,l) [R_kl] equals
    P [R_pq] P^T.
    """
    P = check_orthogonal(P)
    n = P.shape[0]
    p, q = check_plane_pair(n, pq)
    coeffs = {}
    for k, l in plane_pairs(n):
        coeffs[(k, l)] = float(
            -(P[l - 1, p - 1] * P[k - 1, q - 1] - P[l - 1, q - 1] * P[k - 1, p - 1])
        )
    return RotationCoeffs(n, coeffs)
