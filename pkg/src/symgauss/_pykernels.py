"""Pure-numpy integration kernels.

Same call signatures as the compiled ``_kernels`` module; used when the
extension is not built or when ``SYMGAUSS_BACKEND=python`` is set.
"""
import numpy as np


def _covariance_rhs(A, D, calC, Gamma, V):
    AV = A @ V
    F = AV + AV.T + D
    if calC.shape[0]:
        K = V @ calC.T + Gamma.T
        F -= K @ K.T
    return F


def rk4_moments(A, D, b, calC, Gamma, V0, R0, hs, ksteps):
    """Fixed-step RK4 for the covariance (Riccati/Lyapunov) and mean flows.

    Interval ``i`` is covered by ``ksteps[i]`` substeps of size ``hs[i]``.
    Returns the covariance and mean at the start and at the end of every
    interval, stacked along the first axis.
    """
    n_int = len(hs)
    n = V0.shape[0]
    V_out = np.empty((n_int + 1, n, n))
    R_out = np.empty((n_int + 1, n))
    V = np.array(V0, dtype=float)
    R = np.array(R0, dtype=float)
    V_out[0] = V
    R_out[0] = R
    for i in range(n_int):
        h = hs[i]
        for _ in range(ksteps[i]):
            k1 = _covariance_rhs(A, D, calC, Gamma, V)
            k2 = _covariance_rhs(A, D, calC, Gamma, V + 0.5 * h * k1)
            k3 = _covariance_rhs(A, D, calC, Gamma, V + 0.5 * h * k2)
            k4 = _covariance_rhs(A, D, calC, Gamma, V + h * k3)
            V = V + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            V = 0.5 * (V + V.T)

            q1 = A @ R + b
            q2 = A @ (R + 0.5 * h * q1) + b
            q3 = A @ (R + 0.5 * h * q2) + b
            q4 = A @ (R + h * q3) + b
            R = R + (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
        V_out[i + 1] = V
        R_out[i + 1] = R
    return V_out, R_out


def em_ensemble(A, b, K, dts, dw, R0, record):
    """Euler-Maruyama for ``dR = (A R + b) dt + K dw`` over many trajectories.

    ``K`` has shape ``(1, n, m)`` (constant gain) or ``(n_steps, n, m)``;
    ``dw`` holds the already-scaled Wiener increments, shape
    ``(n_traj, n_steps, m)``. The mean vector is stored after each step
    index listed in ``record`` (index 0 is the initial value).
    """
    n_traj, n_steps, _ = dw.shape
    n = R0.shape[0]
    out = np.empty((n_traj, len(record), n))
    R = np.tile(np.asarray(R0, dtype=float), (n_traj, 1))
    constant_gain = K.shape[0] == 1
    slot = 0
    if slot < len(record) and record[slot] == 0:
        out[:, slot] = R
        slot += 1
    for j in range(n_steps):
        gain = K[0] if constant_gain else K[j]
        R = R + (R @ A.T + b) * dts[j] + dw[:, j, :] @ gain.T
        while slot < len(record) and record[slot] == j + 1:
            out[:, slot] = R
            slot += 1
    return out
