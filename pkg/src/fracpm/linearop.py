"""Assembled matrix of -div(alpha grad .) and its deflated spectrum.

This is the conservative finite-difference realization (face-centered
coefficients), deliberately independent from the spectral operator used in
time stepping: the two discretizations cross-validate each other through
the decay-rate acceptance check.

The matrix annihilates constants by construction (zero row sums). Its
near-kernel is spanned by the indicators of the connected components of
the complement of the jump set; the "deflated gap" gamma is the smallest
eigenvalue after projecting that span out, and 1/sqrt(gamma) is the
corresponding Poincare-type constant.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, LinearAlgebraError
from .grid import FracParams, PeriodicGrid, ScalarField
from .geometry import JumpSet1D


def face_alpha(grid: PeriodicGrid, geom, p: FracParams):
    """Oracle diffusion coefficient at face midpoints.

    1D: faces[i] sits between nodes i-1 and i. 2D: (ax_faces, ay_faces),
    where ax_faces[i,j] is the face between nodes (i-1,j) and (i,j).
    """
    from .evolution import precompute_singular_field
    from .spectral import alpha_from_fracfield

    if grid.dim == 1:
        s = precompute_singular_field(grid, geom, p, offsets=(-0.5,))
        return alpha_from_fracfield(s)
    sx = precompute_singular_field(grid, geom, p, offsets=(-0.5, 0.0))
    sy = precompute_singular_field(grid, geom, p, offsets=(0.0, -0.5))
    return alpha_from_fracfield(sx), alpha_from_fracfield(sy)


def assemble(grid: PeriodicGrid, alpha_faces) -> np.ndarray:
    """Dense matrix A with (A w)_i = -div(alpha grad w)_i, periodic FD."""
    n = grid.n
    inv_h2 = 1.0 / grid.h**2
    if grid.dim == 1:
        af = np.asarray(alpha_faces, dtype=float)
        if af.shape != (n,):
            raise ConfigError("1D face coefficient array must have length n")
        A = np.zeros((n, n))
        idx = np.arange(n)
        right = af[(idx + 1) % n]
        left = af
        A[idx, idx] = (left + right) * inv_h2
        A[idx, (idx + 1) % n] = -right * inv_h2
        A[idx, (idx - 1) % n] = -left * inv_h2
        return A
    if n > 80:
        raise ConfigError(
            "dense 2D assembly is limited to n <= 80 (matrix is n^2 x n^2)"
        )
    ax, ay = (np.asarray(a, dtype=float) for a in alpha_faces)
    N = n * n
    A = np.zeros((N, N))
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    flat = (ii * n + jj).ravel()

    def nb(di, dj):
        return (((ii + di) % n) * n + (jj + dj) % n).ravel()

    a_w = ax[ii, jj].ravel()  # face to node (i-1, j)
    a_e = ax[(ii + 1) % n, jj].ravel()
    a_s = ay[ii, jj].ravel()  # face to node (i, j-1)
    a_n = ay[ii, (jj + 1) % n].ravel()
    A[flat, flat] = (a_w + a_e + a_s + a_n) * inv_h2
    A[flat, nb(-1, 0)] -= a_w * inv_h2
    A[flat, nb(1, 0)] -= a_e * inv_h2
    A[flat, nb(0, -1)] -= a_s * inv_h2
    A[flat, nb(0, 1)] -= a_n * inv_h2
    return A


def component_indicators(grid: PeriodicGrid, geom) -> np.ndarray:
    """Indicator vectors (columns) of the components of the complement of Gamma."""
    if grid.dim == 1:
        x = grid.axis_nodes()
        cols = []
        pos = list(geom.positions)
        for j in range(len(pos)):
            a, b = pos[j], pos[(j + 1) % len(pos)]
            if b > a:
                ind = (x >= a) & (x < b)
            else:
                ind = (x >= a) | (x < b)
            cols.append(ind.astype(float))
        return np.stack(cols, axis=1)
    curve = getattr(geom, "curve", geom)
    inside = curve.indicator(*grid.nodes()).ravel()
    return np.stack([inside, 1.0 - inside], axis=1)


def _orthonormal_deflation_basis(indicators: np.ndarray) -> np.ndarray:
    """QR basis of the indicator span; rejects rank-deficient spans.

    A deflation column with (numerically) zero norm after orthogonalization
    means a component the grid does not resolve; proceeding would deflate
    a phantom direction, so this is a hard error.
    """
    from scipy.linalg import qr

    V = np.asarray(indicators, dtype=float)
    Q, R = qr(V, mode="economic")
    col_scale = np.max(np.abs(V), axis=0)
    if np.any(np.abs(np.diag(R)) <= 1e-10 * np.maximum(col_scale, 1.0)):
        raise LinearAlgebraError(
            "deflation space is rank-deficient: a component of the jump-set "
            "complement is not resolved by the grid"
        )
    return Q


def spectrum_deflated(A: np.ndarray, indicators: np.ndarray):
    """Eigenvalues of P A P with P projecting out the indicator span.

    Returns (gamma, eigenvalues_ascending, deflation_dim). The first
    deflation_dim eigenvalues are the zeros manufactured by P; gamma is
    the next one. A must be symmetric PSD; symmetry defects beyond
    round-off raise LinearAlgebraError.
    """
    from scipy.linalg import eigh

    defect = float(np.max(np.abs(A - A.T)))
    scale = float(np.max(np.abs(A)))
    if defect > 1e-10 * max(scale, 1.0):
        raise LinearAlgebraError(f"matrix symmetry defect {defect:.2e}")
    Q = _orthonormal_deflation_basis(indicators)
    r = Q.shape[1]
    B = 0.5 * (A + A.T)
    PB = B - Q @ (Q.T @ B)
    M = PB - (PB @ Q) @ Q.T
    M = 0.5 * (M + M.T)
    eigs = eigh(M, eigvals_only=True)
    gamma = float(eigs[r])
    return gamma, eigs, r


def near_null_overlap(A: np.ndarray, indicators: np.ndarray) -> float:
    """Subspace overlap between A's lowest eigenvectors and the indicators.

    Returns the smallest principal-angle cosine between the span of the
    r lowest eigenvectors of A and the indicator span (1 = identical).
    """
    from scipy.linalg import eigh, qr, svd

    r = indicators.shape[1]
    _, vecs = eigh(0.5 * (A + A.T))
    U = vecs[:, :r]
    Q, _ = qr(np.asarray(indicators, dtype=float), mode="economic")
    s = svd(U.T @ Q, compute_uv=False)
    return float(np.min(s))


def rayleigh_quotient(A: np.ndarray, v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float).ravel()
    return float(v @ (A @ v) / (v @ v))


def quadratic_form(A: np.ndarray, w: np.ndarray) -> float:
    """The nodal quadratic form w^T A w of the assembled matrix."""
    w = np.asarray(w, dtype=float).ravel()
    return float(w @ (A @ w))


def form_value(u: ScalarField, v: ScalarField, alpha: ScalarField) -> float:
    """Energy form: integral of alpha * (grad u . grad v) over the box.

    Gradients are spectral, the product is pointwise, and the integral is
    the trapezoid rule (a plain cell-volume sum on the periodic torus).
    Cross-check: h^N * quadratic_form(A, u) agrees with form_value(u, u)
    to O(h^2) when A is assembled from the same coefficient.
    """
    from .spectral import gradient

    if u.grid != v.grid or u.grid != alpha.grid:
        raise ConfigError("form_value requires fields on one common grid")
    gu = gradient(u)
    gv = gradient(v)
    dot = np.zeros(u.grid.shape)
    for a, b in zip(gu, gv):
        dot += a.values * b.values
    return float(np.sum(alpha.values * dot) * u.grid.h**u.grid.dim)


def assemble_sparse(grid: PeriodicGrid, alpha_faces):
    """CSR variant of assemble, for grids past the dense eigensolve cap."""
    from scipy.sparse import coo_matrix

    n = grid.n
    inv_h2 = 1.0 / grid.h**2
    if grid.dim == 1:
        af = np.asarray(alpha_faces, dtype=float)
        idx = np.arange(n)
        right = af[(idx + 1) % n]
        left = af
        rows = np.concatenate([idx, idx, idx])
        cols = np.concatenate([idx, (idx + 1) % n, (idx - 1) % n])
        vals = np.concatenate([(left + right), -right, -left]) * inv_h2
        return coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    ax, ay = (np.asarray(a, dtype=float) for a in alpha_faces)
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    flat = (ii * n + jj).ravel()

    def nb(di, dj):
        return (((ii + di) % n) * n + (jj + dj) % n).ravel()

    a_w = ax[ii, jj].ravel()
    a_e = ax[(ii + 1) % n, jj].ravel()
    a_s = ay[ii, jj].ravel()
    a_n = ay[ii, (jj + 1) % n].ravel()
    rows = np.concatenate([flat] * 5)
    cols = np.concatenate([flat, nb(-1, 0), nb(1, 0), nb(0, -1), nb(0, 1)])
    vals = np.concatenate([a_w + a_e + a_s + a_n, -a_w, -a_e, -a_s, -a_n])
    N = n * n
    return coo_matrix((vals * inv_h2, (rows, cols)), shape=(N, N)).tocsr()


def spectrum_deflated_iterative(A_sparse, indicators: np.ndarray, k: int = 10):
    """Bottom deflated eigenvalues by shifted inverse iteration.

    For grids too large for a dense eigh. Indicator directions are pushed
    far up the spectrum with a rank-r penalty c*QQ^T rather than projected
    out, which keeps the operator cheap to apply; the shifted inverse
    (M + I)^{-1} is a sparse LU of A + I plus a Woodbury correction for
    the penalty. Returns (gamma, bottom_eigenvalues, deflation_dim).
    """
    from scipy.sparse import eye as speye
    from scipy.sparse.linalg import LinearOperator, eigsh, splu

    Q = _orthonormal_deflation_basis(indicators)
    r = Q.shape[1]
    n = A_sparse.shape[0]
    c = float(np.max(np.abs(A_sparse).sum(axis=1)))
    lu = splu((A_sparse + speye(n, format="csr")).tocsc())
    W = lu.solve(Q)
    S = np.eye(r) / c + Q.T @ W

    def apply_m(x):
        return A_sparse @ x + c * (Q @ (Q.T @ x))

    def apply_inv(b):
        y0 = lu.solve(b)
        return y0 - W @ np.linalg.solve(S, Q.T @ y0)

    m_op = LinearOperator((n, n), matvec=apply_m, dtype=float)
    inv_op = LinearOperator((n, n), matvec=apply_inv, dtype=float)
    try:
        vals = eigsh(
            m_op, k=k, sigma=-1.0, which="LM", OPinv=inv_op,
            return_eigenvectors=False,
        )
    except Exception as exc:  # ArpackNoConvergence and friends
        raise LinearAlgebraError(f"shifted inverse iteration failed: {exc}")
    vals = np.sort(vals)
    return float(vals[0]), vals, r


def poincare_constant(gamma: float) -> float:
    if gamma <= 0:
        raise LinearAlgebraError("Poincare constant needs a positive gap")
    return 1.0 / np.sqrt(gamma)


def fd_laplacian_eigenvalues(grid: PeriodicGrid) -> np.ndarray:
    """Exact eigenvalues (4/h^2) sin^2(pi k h / 2) of the alpha = 1 matrix."""
    n, h = grid.n, grid.h
    k = np.arange(n)
    lam = (4.0 / h**2) * np.sin(np.pi * k * h / 2.0) ** 2
    if grid.dim == 1:
        return np.sort(lam)
    return np.sort(np.add.outer(lam, lam).ravel())
