"""Trace and determinant identities relating a matrix to its expansion and
rotation forms.

Every *_residual function returns a relative residual that an exact identity
would make zero; the test suite and the CLI report them.  The subset
determinant expansion and the diagonal-plus-skew determinant audit live here
too, as does the linear system that recovers the characteristic-polynomial
coefficients of a normal matrix from its form eigenvalues.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import InputError, NumericalError
from .canonical import expansion_eigenbasis, normal_power_basis, normality_report
from .linalg import (
    DEFAULT_TOL,
    as_square,
    as_vector,
    maxabs,
    power_traces,
    principal_minor_sums,
)
from .qforms import ZERO_FORM_REL, evaluate, expansion_form, rotation_form, rotation_values
from .quasirot import apply_quasi_rotation, check_plane_pair, plane_pairs


@dataclass(frozen=True)
class InvariantReport:
    pms: tuple
    residuals: dict  # name -> relative residual
    ecs: tuple       # (theta, shear matrix, twist matrix)


def _rel(total, terms):
    denom = max(1.0, max((abs(t) for t in terms), default=0.0))
    return abs(total) / denom


def _unit(u, name="vector"):
    u = as_vector(u, name)
    nu = float(np.linalg.norm(u))
    if abs(nu - 1.0) > 1e-10:
        raise InputError(f"{name} must be unit length: norm = {nu:.12g}")
    return u


def _powers(A, top):
    """I, A, A^2, ..., A^top."""
    n = A.shape[0]
    out = [np.eye(n)]
    for _ in range(top):
        out.append(out[-1] @ A)
    return out


def newton_residuals(A):
    """Relative residual of the k-th trace identity, k = 1..n.

    tr(A^k) - pm1 tr(A^(k-1)) + ... + (-1)^(k-1) pm^(k-1) tr(A) + (-1)^k n pm^k
    must equal (n-k)(-1)^k pm^k.
    """
    A = as_square(A)
    n = A.shape[0]
    pm = (1.0,) + principal_minor_sums(A)
    traces = power_traces(A, n)
    out = []
    for k in range(1, n + 1):
        terms = [traces[k - 1]]
        for j in range(1, k):
            terms.append((-1.0) ** j * pm[j] * traces[k - j - 1])
        terms.append((-1.0) ** k * pm[k] * n)
        rhs = (n - k) * (-1.0) ** k * pm[k]
        out.append(_rel(sum(terms) - rhs, terms + [rhs]))
    return out


def cayley_hamilton_residual(A, u, v):
    """The characteristic polynomial annihilates A, probed against unit u, v:
    sum over k of (-1)^k pm^k (A^(n-k) u).v, relative to the term sizes."""
    A = as_square(A)
    n = A.shape[0]
    u = _unit(u, "u")
    v = _unit(v, "v")
    if len(u) != n or len(v) != n:
        raise InputError("probe vectors must match the matrix dimension")
    pm = (1.0,) + principal_minor_sums(A)
    pows = _powers(A, n)
    terms = [(-1.0) ** k * pm[k] * float((pows[n - k] @ u) @ v) for k in range(n + 1)]
    return _rel(sum(terms), terms)


def ch_form_residuals(A, u):
    """Characteristic-polynomial identities for the expansion and rotation
    forms of the powers of A, evaluated at a unit vector.

    Returns (expansion residual, {pair: rotation residual}).
    """
    A = as_square(A)
    n = A.shape[0]
    u = _unit(u, "u")
    if len(u) != n:
        raise InputError("probe vector must match the matrix dimension")
    pm = (1.0,) + principal_minor_sums(A)
    pows = _powers(A, n)
    e_terms = [
        (-1.0) ** k * pm[k] * evaluate(expansion_form(pows[n - k]), u) for k in range(n + 1)
    ]
    expansion_residual = _rel(sum(e_terms), e_terms)
    rotation_residuals = {}
    for pair in plane_pairs(n):
        r_terms = [
            (-1.0) ** k * pm[k] * evaluate(rotation_form(pows[n - k], pair), u)
            for k in range(n)
        ]
        rotation_residuals[pair] = _rel(sum(r_terms), r_terms)
    return expansion_residual, rotation_residuals


def ch_trace_residuals(A):
    """Trace versions of the form identities: the expansion line gains an
    n * det term, the rotation lines close without one."""
    A = as_square(A)
    n = A.shape[0]
    pm = (1.0,) + principal_minor_sums(A)
    pows = _powers(A, n)
    e_terms = [
        (-1.0) ** k * pm[k] * float(np.trace(expansion_form(pows[n - k]).matrix))
        for k in range(n)
    ]
    e_terms.append((-1.0) ** n * n * pm[n])
    expansion_residual = _rel(sum(e_terms), e_terms)
    rotation_residuals = {}
    for pair in plane_pairs(n):
        r_terms = [
            (-1.0) ** k * pm[k] * float(np.trace(rotation_form(pows[n - k], pair).matrix))
            for k in range(n)
        ]
        rotation_residuals[pair] = _rel(sum(r_terms), r_terms)
    return expansion_residual, rotation_residuals


def pm2_identity_residual(A):
    """pm^2 of A equals pm^2 of the expansion form plus a quarter of the
    summed squared rotation-form traces."""
    A = as_square(A)
    n = A.shape[0]
    if n < 2:
        raise InputError("the second minor sum needs n >= 2")
    pm2 = principal_minor_sums(A)[1]
    pm2_sym = principal_minor_sums(0.5 * (A + A.T))[1]
    skew = 0.5 * (A - A.T)
    trace_sq = sum(
        (-2.0 * skew[k - 1, l - 1]) ** 2 for k, l in plane_pairs(n)
    )
    rhs = pm2_sym + 0.25 * trace_sq
    return _rel(pm2 - rhs, [pm2, pm2_sym, 0.25 * trace_sq])


def pm2_sym_skew_residual(A):
    """pm^2 splits across the symmetric and skew parts."""
    A = as_square(A)
    if A.shape[0] < 2:
        raise InputError("the second minor sum needs n >= 2")
    pm2 = principal_minor_sums(A)[1]
    pm2_sym = principal_minor_sums(0.5 * (A + A.T))[1]
    pm2_skew = principal_minor_sums(0.5 * (A - A.T))[1]
    return _rel(pm2 - pm2_sym - pm2_skew, [pm2, pm2_sym, pm2_skew])


def gram_trace_identity_residual(A):
    """n tr(A A^T) against the rotation/expansion invariants, both printed
    forms; returns the larger of the two relative residuals."""
    A = as_square(A)
    n = A.shape[0]
    lhs = n * float(np.sum(A * A))
    tr_e = float(np.trace(A))  # equals tr of the expansion form exactly
    rot_sq = 0.0
    pm2_rot = 0.0
    trace_sq = 0.0
    for pair in plane_pairs(n):
        M = rotation_form(A, pair).matrix
        rot_sq += float(np.trace(M @ M))
        trace_sq += float(np.trace(M)) ** 2
        if n >= 2:
            pm2_rot += principal_minor_sums(M)[1]
    first = _rel(lhs - 2.0 * rot_sq - tr_e**2, [lhs, 2.0 * rot_sq, tr_e**2])
    if n < 2:
        return first
    second = _rel(
        lhs - (-4.0 * pm2_rot + 2.0 * trace_sq + tr_e**2),
        [lhs, 4.0 * pm2_rot, 2.0 * trace_sq, tr_e**2],
    )
    return max(first, second)


def euler_cauchy_stokes(A):
    """Unique split into mean expansion, traceless shear and twist:
    A = (theta/n) I + Sigma + Omega."""
    A = as_square(A)
    n = A.shape[0]
    theta = float(np.trace(A))
    sigma = 0.5 * (A + A.T) - (theta / n) * np.eye(n)
    omega = 0.5 * (A - A.T)
    return theta, sigma, omega


def collings_det(Dd, B, max_dim=20):
    """det(D + B) for diagonal D as a sum over all index subsets of products
    of complementary principal minors.  Cost 2^n; guarded at n <= max_dim."""
    Dd = as_square(Dd, "diagonal matrix")
    B = as_square(B)
    n = Dd.shape[0]
    if B.shape[0] != n:
        raise InputError("matrices must share a dimension")
    off = Dd - np.diag(np.diag(Dd))
    if maxabs(off) > 1e-12 * max(1.0, maxabs(Dd)):
        raise InputError("first argument must be diagonal")
    if n > max_dim:
        raise InputError(f"subset expansion is 2^n; refusing n = {n} > {max_dim}")
    d = np.diag(Dd)
    total = 0.0
    indices = list(range(n))
    for size in range(n + 1):
        for theta in combinations(indices, size):
            comp = [i for i in indices if i not in theta]
            d_part = float(np.prod(d[comp])) if comp else 1.0
            if theta:
                sub = B[np.ix_(theta, theta)]
                b_part = float(np.linalg.det(sub))
            else:
                b_part = 1.0
            total += d_part * b_part
    return total


def n4_det_identity_residual(A):
    """Audit of the six-term determinant identity for the diagonal-plus-skew
    split of a 4x4 matrix; the relative residual is reported, not asserted."""
    A = as_square(A)
    if A.shape[0] != 4:
        raise InputError("this determinant audit is specific to 4x4 matrices")
    if maxabs(0.5 * (A + A.T)) <= ZERO_FORM_REL * maxabs(A):
        D = np.zeros((4, 4))
        S = 0.5 * (A - A.T)
    else:
        split = expansion_eigenbasis(A)
        D = np.diag(split.D)
        S = split.S
    det_a = principal_minor_sums(A)[3]
    rhs = (
        float(np.prod(np.diag(D)))
        + float(np.linalg.det(S))
        - float(np.trace(D @ D @ S @ S))
        - 0.5 * float(np.trace(S @ D @ S @ D))
        + float(np.trace(S @ D @ S)) * float(np.trace(D))
        + principal_minor_sums(D)[1] * principal_minor_sums(S)[1]
    )
    return abs(det_a - rhs) / max(1.0, abs(det_a))


def normal_invariant_recover(A, tol=DEFAULT_TOL):
    """Recover the minor sums pm^1..pm^n of a normal, non-symmetric matrix
    from the eigenvalues of its power expansion forms and the skew entries.

    Assembles one equation per basis direction from the diagonalised power
    forms plus one per coupled plane from the skew closed form, solves by
    least squares, and returns (pm estimates, system rank).  Rank below n
    raises NumericalError with the assembled system attached.
    """
    A = as_square(A)
    n = A.shape[0]
    report = normality_report(A, tol)
    if not report.is_normal:
        raise InputError(f"matrix is not normal: commutator norm {report.commutator_norm:.3e}")
    if maxabs(0.5 * (A - A.T)) <= ZERO_FORM_REL * maxabs(A):
        raise InputError("matrix is symmetric; the power system degenerates")
    P, _checks = normal_power_basis(A, tol)

    pows = _powers(A, n)
    diag_powers = []  # diag_powers[p][i] = eigenvalue of the p-th power form
    for p in range(n + 1):
        M = P.T @ (0.5 * (pows[p] + pows[p].T)) @ P
        diag_powers.append(np.diag(M).copy())
    B = P.T @ A @ P
    S = 0.5 * (B - B.T)
    S2 = S @ S
    lam_e = diag_powers[1]

    rows = []
    rhs = []
    for i in range(n):
        row = [(-1.0) ** k * diag_powers[n - k][i] for k in range(1, n + 1)]
        rows.append(row)
        rhs.append(-diag_powers[n][i])

    skew_floor = 1e-10 * max(1.0, maxabs(S))
    for k in range(n):
        for l in range(k + 1, n):
            if abs(S[l, k]) <= skew_floor:
                continue
            c = [0.0] * (n + 1)  # c[p] for p = 1..n
            for p in range(1, n + 1):
                acc = 0.0
                for m in range(p):
                    if (p - m) % 2 == 1:
                        acc += (
                            comb(p, p - m)
                            * lam_e[l] ** m
                            * S2[l, l] ** ((p - m - 1) // 2)
                        )
                c[p] = acc
            row = [0.0] * n
            for j in range(1, n):
                row[j - 1] = (-1.0) ** j * c[n - j]
            rows.append(row)
            rhs.append(-c[n])

    M = np.array(rows)
    b = np.array(rhs)
    norms = np.linalg.norm(np.column_stack([M, b]), axis=1)
    norms[norms == 0.0] = 1.0
    M_scaled = M / norms[:, None]
    b_scaled = b / norms
    rank = int(np.linalg.matrix_rank(M_scaled))
    if rank < n:
        raise NumericalError(
            f"power system is rank deficient: rank {rank} < {n}",
            system=(M, b),
        )
    solution, *_ = np.linalg.lstsq(M_scaled, b_scaled, rcond=None)
    return tuple(float(x) for x in solution), rank


def power_form_step(A, m, u):
    """One step of the power recurrences for the expansion and rotation forms.

    Returns (lhs_e, rhs_e, lhs_r, rhs_r): the expansion form of A^(m+1) at
    unit u against its recurrence value, and per-pair rotation forms of
    A^(m+1) against theirs.
    """
    A = as_square(A)
    n = A.shape[0]
    if m < 1:
        raise InputError("power step needs m >= 1")
    u = _unit(u, "u")
    if len(u) != n:
        raise InputError("probe vector must match the matrix dimension")
    pows = _powers(A, m + 1)
    e_m = evaluate(expansion_form(pows[m]), u)
    e_1 = evaluate(expansion_form(A), u)
    r_m = rotation_values(pows[m], u)
    r_T = rotation_values(A.T, u)
    lhs_e = evaluate(expansion_form(pows[m + 1]), u)
    rhs_e = e_m * e_1 + sum(r_m[pair] * r_T[pair] for pair in plane_pairs(n))

    r_1 = rotation_values(A, u)
    images = {pair: A @ apply_quasi_rotation(u, pair) for pair in plane_pairs(n)}
    lhs_r = rotation_values(pows[m + 1], u)
    rhs_r = {}
    for pq in plane_pairs(n):
        rot_pq = apply_quasi_rotation(u, pq)
        acc = e_m * r_1[pq]
        for kl in plane_pairs(n):
            acc += r_m[kl] * float(images[kl] @ rot_pq)
        rhs_r[pq] = acc
    return lhs_e, rhs_e, lhs_r, rhs_r


def diagonal_rotation_recursion(A, m, pq):
    """The basis-direction specialisation of the rotation recurrence.

    For u = b_p the cross terms collapse onto four sums over single planes;
    returns (lhs, rhs) for the (p, q) rotation form of A^(m+1) at b_p.
    """
    A = as_square(A)
    n = A.shape[0]
    p, q = check_plane_pair(n, pq)
    pows = _powers(A, m + 1)
    e_p = np.zeros(n)
    e_p[p - 1] = 1.0
    r_m = rotation_values(pows[m], e_p)
    lhs = rotation_values(pows[m + 1], e_p)[(p, q)]

    def basis_vec(i):
        v = np.zeros(n)
        v[i - 1] = 1.0
        return v

    rhs = evaluate(expansion_form(pows[m]), e_p) * rotation_values(A, e_p)[(p, q)]
    rhs += r_m[(p, q)] * evaluate(expansion_form(A), basis_vec(q))
    for l in range(p + 1, q):
        rhs += r_m[(p, l)] * rotation_values(A, basis_vec(l))[(l, q)]
    for l in range(q + 1, n + 1):
        rhs -= r_m[(p, l)] * rotation_values(A, basis_vec(l))[(q, l)]
    for k in range(1, p):
        rhs -= r_m[(k, p)] * rotation_values(A, basis_vec(k))[(k, q)]
    return lhs, rhs


def invariant_report(A, seed=0, power_steps=3):
    """All identity residuals for one matrix, with seeded probe vectors."""
    A = as_square(A)
    n = A.shape[0]
    rng = np.random.default_rng(seed)

    def unit_sample():
        while True:
            v = rng.standard_normal(n)
            norm = float(np.linalg.norm(v))
            if norm > 1e-6:
                return v / norm

    u = unit_sample()
    v = unit_sample()
    residuals = {}
    for k, value in enumerate(newton_residuals(A), start=1):
        residuals[f"newton_{k}"] = value
    residuals["ch_vector"] = cayley_hamilton_residual(A, u, v)
    e_res, r_res = ch_form_residuals(A, u)
    residuals["ch_expansion"] = e_res
    for (k, l), value in r_res.items():
        residuals[f"ch_rotation_{k}_{l}"] = value
    e_res, r_res = ch_trace_residuals(A)
    residuals["tr_ch_expansion"] = e_res
    for (k, l), value in r_res.items():
        residuals[f"tr_ch_rotation_{k}_{l}"] = value
    if n >= 2:
        residuals["pm2"] = pm2_identity_residual(A)
        residuals["pm2_sym_skew"] = pm2_sym_skew_residual(A)
    residuals["gram_trace"] = gram_trace_identity_residual(A)
    for m in range(1, power_steps + 1):
        lhs_e, rhs_e, lhs_r, rhs_r = power_form_step(A, m, u)
        residuals[f"power_expansion_{m}"] = _rel(lhs_e - rhs_e, [lhs_e, rhs_e])
        worst = 0.0
        for pair in lhs_r:
            worst = max(worst, _rel(lhs_r[pair] - rhs_r[pair], [lhs_r[pair], rhs_r[pair]]))
        residuals[f"power_rotation_{m}"] = worst
    if n == 4:
        residuals["n4_det"] = n4_det_identity_residual(A)
    return InvariantReport(
        pms=principal_minor_sums(A),
        residuals=residuals,
        ecs=euler_cauchy_stokes(A),
    )
