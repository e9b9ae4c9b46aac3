"""Small dense linear-algebra helpers shared across the package."""
import numpy as np
from scipy.linalg import schur


def symplectic_form(n_modes):
    """Block-diagonal symplectic form for ``n_modes`` modes in (x1, p1, x2, p2, ...) order."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _spd_eigh(M, name):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} expects a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} received non-finite entries")
    scale = max(1.0, np.max(np.abs(M)))
    if np.max(np.abs(M - M.T)) > 1e-8 * scale:
        raise ValueError(f"{name} expects a symmetric matrix")
    w, U = np.linalg.eigh(0.5 * (M + M.T))
    if w[0] <= 1e-12:
        raise ValueError(f"{name} expects a positive-definite matrix (min eigenvalue {w[0]:.3e})")
    return w, U


def sqrtm_spd(M):
    """Symmetric square root of a symmetric positive-definite matrix.

    Uses the eigendecomposition ``M = U diag(w) U^T``; the result is
    symmetrized so it is exactly symmetric.

    Raises:
        ValueError: if ``M`` is not symmetric or has an eigenvalue <= 1e-12.
    """
    w, U = _spd_eigh(M, "sqrtm_spd")
    S = (U * np.sqrt(w)) @ U.T
    return 0.5 * (S + S.T)


def inv_sqrtm_spd(M):
    """Inverse symmetric square root ``M^(-1/2)`` of an SPD matrix."""
    w, U = _spd_eigh(M, "inv_sqrtm_spd")
    S = (U / np.sqrt(w)) @ U.T
    return 0.5 * (S + S.T)


def psd_factor(M, tol=1e-10):
    """Return ``L`` with ``L @ L.T == M`` for a symmetric positive-semidefinite ``M``.

    Cholesky is tried first. Semidefinite inputs fall back to an
    eigendecomposition with eigenvalues above ``-tol * ||M||`` clipped to zero.
    """
    M = np.asarray(M, dtype=float)
    M = 0.5 * (M + M.T)
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        pass
    w, U = np.linalg.eigh(M)
    scale = max(np.max(np.abs(w)), 1.0)
    if w[0] < -tol * scale:
        raise ValueError(f"matrix is indefinite (min eigenvalue {w[0]:.3e}); no real factor exists")
    return U * np.sqrt(np.clip(w, 0.0, None))


def symplectic_spectrum(V):
    """Symplectic eigenvalues of a covariance matrix, descending.

    For positive-definite ``V = L L^T`` the spectrum of ``i L^T Omega L`` is
    ``{+nu_k, -nu_k}``, which is Hermitian and therefore well conditioned.
    Matrices that are not positive definite use ``|eig(Omega V)|`` instead.
    """
    V = np.asarray(V, dtype=float)
    if not np.all(np.isfinite(V)):
        raise ValueError("covariance matrix has non-finite entries")
    n = V.shape[0] // 2
    omega = symplectic_form(n)
    try:
        L = np.linalg.cholesky(0.5 * (V + V.T))
        w = np.linalg.eigvalsh(1j * (L.T @ omega @ L))
        return np.sort(np.abs(w))[::-1][::2].copy()
    except np.linalg.LinAlgError:
        w = np.abs(np.linalg.eigvals(omega @ V))
        return np.sort(w)[::-1][::2].copy()


def williamson(V):
    """Williamson normal form ``V = S diag(nu_1, nu_1, ..., nu_n, nu_n) S^T``.

    ``S`` is symplectic. Built from the real Schur form of the antisymmetric
    matrix ``V^(-1/2) Omega V^(-1/2)``, whose 2x2 blocks carry ``1 / nu_k``.

    Returns:
        ``(S, nu, cond)`` where ``cond`` is the spectral condition number of
        ``V``; ``nu`` is accurate to about ``eps * cond``.
    """
    w, U = _spd_eigh(V, "williamson")
    n = w.size // 2
    root = (U * np.sqrt(w)) @ U.T
    inv_root = (U / np.sqrt(w)) @ U.T
    K = inv_root @ symplectic_form(n) @ inv_root
    T, O = schur(0.5 * (K - K.T), output="real")
    d = np.empty(n)
    for k in range(n):
        i = 2 * k
        if T[i, i + 1] < 0:
            O[:, [i, i + 1]] = O[:, [i + 1, i]]
        d[k] = abs(T[i, i + 1])
    nu = 1.0 / d
    S = root @ O / np.sqrt(np.repeat(nu, 2))
    return S, nu, float(w[-1] / w[0])
