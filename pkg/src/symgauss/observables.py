"""Scalar and phase-space diagnostics of Gaussian states.

Entropies are in nats. Fidelity is the squared Uhlmann fidelity, so that
``fidelity(coherent(a), coherent(b)) == exp(-|a - b|**2)``.
"""
import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import xlogy

from .linalg import symplectic_form, symplectic_spectrum, williamson
from .state import _check_modes, _quadrature_indices, only_modes


def symplectic_eigenvalues(state):
    """Symplectic eigenvalues of the covariance matrix, in descending order."""
    return symplectic_spectrum(state.V)


def purity(state):
    """``Tr(rho^2) = 1 / sqrt(det V)``."""
    sign, logdet = np.linalg.slogdet(state.V)
    return float(np.exp(-0.5 * logdet))


def _entropy_term(nu):
    # g(nu) = (nu+1)/2 ln((nu+1)/2) - (nu-1)/2 ln((nu-1)/2), with g(1) = 0;
    # xlogy gives 0 ln 0 = 0 exactly, round-off below nu = 1 is clipped
    eps = np.clip((np.asarray(nu, dtype=float) - 1.0) / 2.0, 0.0, None)
    return xlogy(1.0 + eps, 1.0 + eps) - xlogy(eps, eps)


def von_neumann_entropy(state):
    return float(np.sum(_entropy_term(symplectic_eigenvalues(state))))


def mutual_information(state):
    """Sum of single-mode entropies minus the entropy of the whole state."""
    local = sum(von_neumann_entropy(only_modes(state, [j])) for j in range(state.n_modes))
    return local - von_neumann_entropy(state)


def _mode_block(state, mode):
    if mode is None:
        if state.n_modes != 1:
            raise ValueError("multimode state: pass the mode to inspect")
        mode = 0
    (mode,) = _check_modes([mode], state.n_modes)
    idx = _quadrature_indices([mode])
    return state.R[idx], state.V[np.ix_(idx, idx)]


def squeezing_degree(state, mode=None):
    """Ratio of the smallest to the largest quadrature variance of one mode.

    Returns ``(ratio, angle)`` where ``angle`` (radians, in ``[0, pi)``) is the
    phase-space direction of the squeezed quadrature.
    """
    _, V = _mode_block(state, mode)
    w, U = np.linalg.eigh(V)
    angle = float(np.arctan2(U[1, 0], U[0, 0]) % np.pi)
    return float(w[0] / w[1]), angle


def occupation(state):
    """Mean photon number of every mode."""
    R = state.R.reshape(-1, 2)
    diag = np.diag(state.V).reshape(-1, 2)
    return (diag.sum(axis=1) + (R ** 2).sum(axis=1) - 2.0) / 4.0


@dataclass(frozen=True)
class NumberMoments:
    mean: np.ndarray
    variance: np.ndarray


def number_moments(state):
    """Per-mode mean and variance of the photon number."""
    var = np.empty(state.n_modes)
    for j in range(state.n_modes):
        R, V = _mode_block(state, j)
        var[j] = (np.trace(V @ V) - 2.0) / 8.0 + R @ V @ R / 4.0
    return NumberMoments(mean=occupation(state), variance=var)


# nu - 1 below this multiple of eps * cond(V) cannot be told apart from a pure mode
_PURE_MODE_SNAP = 16 * np.finfo(float).eps


def _impurity(V):
    """Williamson frame of ``V`` and ``(nu_k^2 - 1) / 4`` per mode, snapped to 0 at round-off."""
    S, nu, cond = williamson(V)
    excess = nu - 1.0
    excess[excess < _PURE_MODE_SNAP * cond] = 0.0
    return S, excess * (nu + 1.0) / 4.0


def fidelity(a, b):
    """Squared Uhlmann fidelity between two Gaussian states.

    Uses the closed form of Banchi, Braunstein and Pirandola, rearranged so
    that modes which are pure (or nearly pure) in either state do not lose
    accuracy; when either state is pure the overlap ``<psi|rho|psi>`` is
    evaluated directly.
    """
    if a.n_modes != b.n_modes:
        raise ValueError(f"mode count mismatch: {a.n_modes} vs {b.n_modes}")
    n = a.n_modes
    delta = b.R - a.R
    Vsum = a.V + b.V
    try:
        gauss = float(np.exp(-0.5 * delta @ np.linalg.solve(Vsum, delta)))
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("V_a + V_b is singular") from exc

    S_a, e_a = _impurity(a.V)
    S_b, e_b = _impurity(b.V)
    if not e_a.any() or not e_b.any():
        return float(2.0 ** n / np.sqrt(np.linalg.det(Vsum)) * gauss)

    # closed form is written for vacuum covariance I/2
    V1, V2 = a.V / 2.0, b.V / 2.0
    omega = symplectic_form(n)
    S = V1 + V2
    V_aux = omega.T @ np.linalg.solve(S, omega / 4.0 + V2 @ omega @ V1)
    # The closed form needs the spectrum of sqrt(I + (X X)^-1 / 4), X = V_aux Omega, whose
    # argument vanishes on pure modes, so forming it directly costs sqrt(eps) accuracy.
    # X X + I/4 is similar to -C Omega C^T Omega with C = E_a^(1/2) S_a^T (V1 + V2)^-1 S_b E_b^(1/2)
    # and E = diag((nu^2 - 1) / 4) in the Williamson frames. Pure modes contribute exact
    # zeros and are dropped. The square roots of the remaining eigenvalues are read off
    # H = [[0, C Omega], [C^T Omega^T, 0]], whose square is block diagonal with the two
    # products, so rounding lands on sqrt(eta) rather than on eta.
    keep_a = np.repeat(e_a > 0, 2)
    keep_b = np.repeat(e_b > 0, 2)
    C = np.sqrt(np.repeat(e_a, 2))[:, None] * (S_a.T @ np.linalg.solve(S, S_b)) * np.sqrt(np.repeat(e_b, 2))[None, :]
    C = C[keep_a][:, keep_b]
    ka, kb = C.shape
    H = np.zeros((ka + kb, ka + kb))
    H[:ka, ka:] = C @ symplectic_form(kb // 2)
    H[ka:, :ka] = C.T @ symplectic_form(ka // 2).T
    # each nonzero eta appears in spec(H) as +-sqrt(eta), zeros contribute a factor of 1
    s_eta = np.abs(np.linalg.eigvals(H))
    log_prod = 0.5 * np.sum(np.log1p(s_eta / np.sqrt(s_eta**2 + 0.25)))
    ratio = 4.0 ** n * np.exp(log_prod) * np.linalg.det(V_aux) / np.linalg.det(S)
    return float(np.sqrt(ratio) * gauss)


def coherence(state):
    """Relative-entropy coherence in the Fock basis."""
    nbar = np.clip(occupation(state), 0.0, None)
    return float(np.sum(xlogy(nbar + 1.0, nbar + 1.0) - xlogy(nbar, nbar)) - von_neumann_entropy(state))


def logarithmic_negativity(state, partition):
    """Log-negativity of the bipartition ``partition`` vs. the remaining modes."""
    part = _check_modes(partition, state.n_modes)
    if not part or len(part) == state.n_modes:
        raise ValueError("partition must be a proper, non-empty subset of the modes")
    flip = np.ones(2 * state.n_modes)
    flip[[2 * m + 1 for m in part]] = -1.0
    V_pt = state.V * np.outer(flip, flip)
    nu = symplectic_spectrum(V_pt)
    return float(np.sum(np.maximum(0.0, -np.log(nu))))


def vacuum_probability(state):
    """Probability of finding every mode empty, ``<0...0|rho|0...0>``."""
    M = state.V + np.eye(2 * state.n_modes)
    R = state.R
    return float(2.0 ** state.n_modes * np.exp(-0.5 * R @ np.linalg.solve(M, R)) / np.sqrt(np.linalg.det(M)))


# ---------------------------------------------------------------------------
# phase space


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Values of a quasi-probability on the grid ``x_axis x p_axis``.

    ``values[i, j]`` is the value at ``(x_axis[j], p_axis[i])`` (meshgrid
    ``xy`` layout).
    """

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    def integral(self):
        """Trapezoidal integral over the grid."""
        return float(trapezoid(trapezoid(self.values, self.x_axis, axis=1), self.p_axis))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "p", "value"])
            for i, p in enumerate(self.p_axis):
                for j, x in enumerate(self.x_axis):
                    writer.writerow([repr(float(x)), repr(float(p)), repr(float(self.values[i, j]))])


def _gaussian_grid(mean, cov, x_axis, p_axis):
    x_axis = np.asarray(x_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    X, P = np.meshgrid(x_axis, p_axis)
    dx, dp = X - mean[0], P - mean[1]
    inv = np.linalg.inv(cov)
    quad = inv[0, 0] * dx ** 2 + 2 * inv[0, 1] * dx * dp + inv[1, 1] * dp ** 2
    values = np.exp(-0.5 * quad) / (2 * np.pi * np.sqrt(np.linalg.det(cov)))
    return PhaseSpaceGrid(x_axis, p_axis, values)


def wigner(state, x_axis, p_axis):
    """Wigner function of a single-mode state on a rectangular grid."""
    if state.n_modes != 1:
        raise ValueError("wigner expects a single-mode state")
    return _gaussian_grid(state.R, state.V, x_axis, p_axis)


def q_function(state, x_axis, p_axis):
    """Husimi Q-function (density over x, p) of a single-mode state."""
    if state.n_modes != 1:
        raise ValueError("q_function expects a single-mode state")
    return _gaussian_grid(state.R, state.V + np.eye(2), x_axis, p_axis)
