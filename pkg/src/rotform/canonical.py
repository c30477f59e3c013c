"""Canonical orthonormal bases attached to a matrix and normality analysis.

Two bases matter here: the eigenbasis of the symmetric part, in which the
matrix splits into a diagonal D plus a skew S whose entries are half the
rotation-form traces, and the block basis of the skew part, in which the skew
part becomes 2x2 rotation blocks plus a kernel.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .linalg import DEFAULT_TOL, as_square, maxabs, sym_eigen
from .qforms import ZERO_FORM_REL

_NORMALITY_REL = 1e-9  # commutator threshold, scaled by max|A|^2


@dataclass(frozen=True)
class DSSplit:
    """A in the eigenbasis of its symmetric part: diagonal + skew."""

    basis: np.ndarray  # columns are the new basis vectors
    D: np.ndarray      # eigenvalues of the symmetric part, descending
    S: np.ndarray      # strictly skew remainder in that basis


@dataclass(frozen=True)
class SkewBlockForm:
    """Skew part reduced to 2x2 blocks [[0, lam], [-lam, 0]] plus a kernel."""

    basis: np.ndarray
    lambdas: tuple     # one positive value per block, descending
    zero_dim: int


@dataclass(frozen=True)
class NormalityReport:
    is_normal: bool
    violating_pairs: tuple  # (i, j, rotation trace, expansion eigenvalue gap)
    commutator_norm: float
    expansion_eigenvalues: tuple


def _sign_fix(P):
    """Make the first component of significant magnitude in each column positive."""
    Q = P.copy()
    n = Q.shape[0]
    for j in range(Q.shape[1]):
        col = Q[:, j]
        lead = 0.0
        for i in range(n):
            if abs(col[i]) > 1e-12:
                lead = col[i]
                break
        if lead < 0.0:
            Q[:, j] = -col
    return Q


def expansion_eigenbasis(A, tol=DEFAULT_TOL):
    """Eigenbasis of the symmetric part, with A re-expressed as diag(D) + S.

    D is sorted descending; repeated eigenvalues are ordered by a lexicographic
    tie-break on the (sign-fixed) eigenvector entries so reports reproduce.
    In the returned basis S[q, p] equals half the trace of the (p, q) rotation
    form for p < q.
    """
    A = as_square(A)
    n = A.shape[0]
    Asym = 0.5 * (A + A.T)
    if maxabs(Asym) <= ZERO_FORM_REL * maxabs(A):
        raise InputError("expansion form is zero (pure skew matrix); use skew_canonical_basis")
    w, P = sym_eigen(Asym, tol)
    P = _sign_fix(P)
    order = sorted(range(n), key=lambda i: (-w[i], tuple(P[:, i])))
    w = w[order]
    P = P[:, order]
    B = P.T @ A @ P
    S = 0.5 * (B - B.T)
    sym_off = B - np.diag(np.diag(B)) - S
    gap = maxabs(sym_off)
    if gap > tol.residual_tol * max(1.0, maxabs(A)):
        raise NumericalError(
            f"eigenbasis failed to diagonalise the symmetric part: residual {gap:.3e}",
            residual=gap,
        )
    return DSSplit(basis=P, D=w.copy(), S=S)


def skew_canonical_basis(A, tol=DEFAULT_TOL):
    """Orthonormal basis reducing the skew part to rotation blocks.

    Returns blocks ordered by descending rotation rate lambda > 0; in that
    basis the skew part equals -sum lambda_k [R_(k, k+1)] over odd k, and each
    lambda equals minus half the trace of the matching rotation form.
    """
    A = as_square(A)
    n = A.shape[0]
    K = 0.5 * (A - A.T)
    if maxabs(K) <= ZERO_FORM_REL * max(maxabs(A), 1e-300):
        raise InputError("skew part is zero (symmetric matrix); use expansion_eigenbasis")
    zero_thresh = max(n * tol.rank_tol * maxabs(K), 1e-300)

    C = np.eye(n)
    planes = []
    lambdas = []
    kernel = []
    while C.shape[1] > 0:
        Ksub = C.T @ K @ C
        w, V = sym_eigen(Ksub.T @ Ksub, tol)
        s = np.sqrt(np.clip(w, 0.0, None))
        i = int(np.argmax(s))
        if s[i] <= zero_thresh:
            kernel = [C @ V[:, j] for j in range(V.shape[1])]
            break
        v = V[:, i]
        Kv = Ksub @ v
        lam = float(np.linalg.norm(Kv))
        wvec = Kv / lam
        planes.append((C @ wvec, C @ v))
        lambdas.append(lam)
        d = C.shape[1]
        proj = np.eye(d) - np.outer(v, v) - np.outer(wvec, wvec)
        U, sv, _ = np.linalg.svd(proj)
        C = C @ U[:, : d - 2]

    cols = []
    for x1, x2 in planes:
        cols.extend([x1, x2])
    cols.extend(kernel)
    P = np.column_stack(cols)
    zero_dim = len(kernel)
    if 2 * len(planes) + zero_dim != n:
        raise NumericalError(
            f"block reduction accounted for {2 * len(planes) + zero_dim} of {n} dimensions"
        )
    return SkewBlockForm(basis=P, lambdas=tuple(lambdas), zero_dim=zero_dim)


def normality_report(A, tol=DEFAULT_TOL):
    """Normality via the diagonal-plus-skew split: A is normal exactly when
    D and S commute, i.e. no skew entry couples distinct expansion eigenvalues.

    Purely symmetric or purely skew matrices short-circuit to normal.
    """
    A = as_square(A)
    scale = maxabs(A)
    threshold = _NORMALITY_REL * max(scale * scale, 1e-300)
    Asym = 0.5 * (A + A.T)
    Askew = 0.5 * (A - A.T)
    pure_skew = maxabs(Asym) <= ZERO_FORM_REL * scale
    pure_sym = maxabs(Askew) <= ZERO_FORM_REL * scale
    if pure_skew or pure_sym:
        eigs = ()
        if not pure_skew:
            eigs = tuple(float(x) for x in sym_eigen(Asym, tol)[0][::-1])
        return NormalityReport(
            is_normal=True, violating_pairs=(), commutator_norm=0.0,
            expansion_eigenvalues=eigs,
        )
    split = expansion_eigenbasis(A, tol)
    D = np.diag(split.D)
    S = split.S
    comm = D @ S - S @ D
    comm_norm = maxabs(comm)
    violations = []
    n = A.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if abs(comm[i, j]) > threshold:
                rot_trace = 2.0 * S[j, i]
                violations.append((i + 1, j + 1, float(rot_trace), float(split.D[i] - split.D[j])))
    return NormalityReport(
        is_normal=comm_norm <= threshold,
        violating_pairs=tuple(violations),
        commutator_norm=float(comm_norm),
        expansion_eigenvalues=tuple(float(x) for x in split.D),
    )


def _refine_blocks(mats, tol, cluster_rel=1e-8):
    """Common orthonormal eigenbasis of a commuting family of symmetric
    matrices, by successive eigenspace refinement."""
    n = mats[0].shape[0]
    blocks = [np.eye(n)]
    for M in mats:
        scale = max(1.0, maxabs(M))
        new_blocks = []
        for V in blocks:
            if V.shape[1] == 1:
                new_blocks.append(V)
                continue
            w, U = sym_eigen(V.T @ M @ V, tol)
            thr = cluster_rel * scale
            start = 0
            for i in range(1, len(w) + 1):
                if i == len(w) or w[i] - w[start] > thr:
                    new_blocks.append(V @ U[:, start:i])
                    start = i
        blocks = new_blocks
    return _sign_fix(np.hstack(blocks))


def normal_power_basis(A, tol=DEFAULT_TOL):
    """Basis simultaneously diagonalising the symmetric parts of all powers
    A^p (p = 1..n) of a normal matrix, with the square of the skew part
    diagonal as well.

    Returns (basis, checks) where checks holds the off-diagonal residual per
    power, the off-diagonal residual of S^2, and the largest commutator norm
    among the symmetric power parts.
    """
    A = as_square(A)
    n = A.shape[0]
    report = normality_report(A, tol)
    if not report.is_normal:
        raise InputError(
            f"matrix is not normal: commutator norm {report.commutator_norm:.3e}"
        )
    Askew = 0.5 * (A - A.T)
    sym_powers = []
    M = np.eye(n)
    for _ in range(n):
        M = M @ A
        sym_powers.append(0.5 * (M + M.T))
    family = sym_powers + [Askew @ Askew]
    P = _refine_blocks(family, tol)

    checks = {}
    comm_max = 0.0
    for p, Mp in enumerate(sym_powers, start=1):
        checks[f"expansion_power_{p}"] = _offdiag_max(P.T @ Mp @ P)
        for Mq in sym_powers[p:]:
            comm_max = max(comm_max, maxabs(Mp @ Mq - Mq @ Mp))
    checks["skew_square"] = _offdiag_max(P.T @ (Askew @ Askew) @ P)
    checks["power_commutator_max"] = float(comm_max)
    return P, checks


def _offdiag_max(M):
    off = M - np.diag(np.diag(M))
    return float(maxabs(off))
