"""Time evolution of Gaussian states.

Unconditional evolution integrates the Lyapunov flow

    dV/dt = A V + V A^T + D,        dR/dt = A R + b,

conditional (continuously monitored) evolution adds the deterministic
information-gain term ``- K K^T`` with ``K = V calC^T + Gamma^T`` to the
covariance flow and drives the mean with ``K dw``. Both deterministic flows
use fixed-step classical RK4; stochastic means use Euler-Maruyama.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from . import _backend
from .linalg import inv_sqrtm_spd, psd_factor, sqrtm_spd, symplectic_form, symplectic_spectrum
from .state import GaussianState, UnphysicalStateError, _block_diag, dyne_covariance

__all__ = [
    "DynamicsSpec",
    "Generators",
    "IntegrationError",
    "MonitoringSpec",
    "NotHurwitzError",
    "StateSeries",
    "TrajectoryEnsemble",
    "build_generators",
    "conditional_dynamics",
    "semi_classical",
    "sqrtm_spd",
    "steady_state",
    "unconditional_dynamics",
]

SERIES_PHYSICAL_TOL = 1e-6
HURWITZ_TOL = -1e-12
STEPS_PER_INVERSE_NORM = 200
KRONECKER_MAX_DIM = 60
TRAJECTORY_CHUNK = 256


class IntegrationError(FloatingPointError):
    """Non-finite or unphysical values appeared during integration."""

    def __init__(self, message, time):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


class NotHurwitzError(ValueError):
    """The drift matrix has no stable steady state."""


@dataclass
class Generators:
    A: np.ndarray
    D: np.ndarray
    b: np.ndarray
    calC: np.ndarray
    Gamma: np.ndarray


def _monitoring_gains(C, V_B, V_M):
    n2, m2 = C.shape
    X = inv_sqrtm_spd(V_B + V_M)
    omega, omega_B = symplectic_form(n2 // 2), symplectic_form(m2 // 2)
    # gains from the system/output cross-covariance  V C Omega_B^T + Omega C V_B
    calC = X @ omega_B @ C.T
    Gamma = X @ V_B @ C.T @ omega.T
    return calC, Gamma


def build_generators(H, alpha_H=None, C=None, V_B=None, V_M=None):
    """Drift, diffusion, drive and monitoring gains from a quadratic Hamiltonian.

    Args:
        H: symmetric 2N x 2N Hamiltonian matrix.
        alpha_H: linear Hamiltonian term (length 2N), default zero.
        C: 2N x 2M system-bath coupling, default none (closed dynamics).
        V_B: bath covariance (2M x 2M), default vacuum.
        V_M: general-dyne covariance of the monitored bath modes; when
            omitted the monitoring gains are zero.

    Returns:
        :class:`Generators` with ``calC`` and ``Gamma`` of shape (2M, 2N).
    """
    H = np.asarray(H, dtype=float)
    n2 = H.shape[0]
    omega = symplectic_form(n2 // 2)
    alpha_H = np.zeros(n2) if alpha_H is None else np.asarray(alpha_H, dtype=float).reshape(-1)
    A = omega @ H
    D = np.zeros((n2, n2))
    b = omega @ alpha_H
    if C is None:
        empty = np.zeros((0, n2))
        return Generators(A, D, b, empty, empty.copy())

    C = np.asarray(C, dtype=float)
    if C.shape[0] != n2 or C.shape[1] % 2:
        raise ValueError(f"coupling must be 2N x 2M, got {C.shape}")
    m2 = C.shape[1]
    omega_B = symplectic_form(m2 // 2)
    V_B = np.eye(m2) if V_B is None else np.asarray(V_B, dtype=float)
    A = A + 0.5 * omega @ C @ omega_B @ C.T
    D = omega @ C @ V_B @ C.T @ omega.T
    if V_M is None:
        zeros = np.zeros((m2, n2))
        return Generators(A, D, b, zeros, zeros.copy())
    calC, Gamma = _monitoring_gains(C, V_B, np.asarray(V_M, dtype=float))
    return Generators(A, D, b, calC, Gamma)


@dataclass
class DynamicsSpec:
    """An evolution problem ``dR = (A R + b) dt``, ``dV = (A V + V A^T + D) dt``.

    ``A`` may be a callable ``A(t)`` for time-dependent drift.
    """

    A: Union[np.ndarray, Callable[[float], np.ndarray]]
    D: np.ndarray
    b: Optional[np.ndarray] = None

    def __post_init__(self):
        self.D = np.asarray(self.D, dtype=float)
        n = self.D.shape[0]
        if self.D.shape != (n, n) or n % 2:
            raise ValueError(f"diffusion must be 2N x 2N, got {self.D.shape}")
        if np.max(np.abs(self.D - self.D.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(self.D))):
            raise ValueError("diffusion matrix must be symmetric")
        if np.linalg.eigvalsh(self.D)[0] < -1e-10 * max(1.0, np.max(np.abs(self.D))):
            raise ValueError("diffusion matrix must be positive semidefinite")
        if not callable(self.A):
            self.A = np.asarray(self.A, dtype=float)
            if self.A.shape != (n, n):
                raise ValueError(f"drift shape {self.A.shape} does not match diffusion {self.D.shape}")
        self.b = np.zeros(n) if self.b is None else np.asarray(self.b, dtype=float).reshape(-1)
        if self.b.shape != (n,):
            raise ValueError("drive vector length does not match the drift")

    @classmethod
    def from_hamiltonian(cls, H, alpha_H=None, C=None, V_B=None):
        g = build_generators(H, alpha_H, C, V_B)
        return cls(g.A, g.D, g.b)

    @property
    def dim(self):
        return self.D.shape[0]

    @property
    def time_dependent(self):
        return callable(self.A)

    def drift(self, t=0.0):
        return np.asarray(self.A(t), dtype=float) if callable(self.A) else self.A


@dataclass
class MonitoringSpec:
    """Continuous general-dyne monitoring of the bath modes.

    Args:
        C: 2N x 2M system-bath coupling.
        V_B: bath covariance (2M x 2M).
        s: general-dyne parameter per monitored bath mode (``s -> 0`` is
            homodyne, ``s = 1`` heterodyne).
        phi: measurement angle per monitored bath mode. The angle refers to
            the output field, so with the coupling ``C = sqrt(gamma) I`` the
            default ``phi = pi/2`` reads out the system x quadrature.
        n_trajectories: number of stochastic mean-vector trajectories.
        seed: master seed; trajectory ``k`` draws from the stream
            ``SeedSequence(seed, spawn_key=(k,))``.
        dw_variance: ``"dt"`` (default) gives Wiener increments of variance
            ``dt`` per component; ``"half_dt"`` gives ``dt / 2``.
    """

    C: np.ndarray
    V_B: np.ndarray
    s: Sequence[float] = (1e-5,)
    phi: Sequence[float] = (np.pi / 2,)
    n_trajectories: int = 100
    seed: int = 0
    dw_variance: str = "dt"

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=float)
        self.V_B = np.asarray(self.V_B, dtype=float)
        m = self.C.shape[1] // 2
        self.s = np.broadcast_to(np.asarray(self.s, dtype=float), (m,)).copy()
        self.phi = np.broadcast_to(np.asarray(self.phi, dtype=float), (m,)).copy()
        if np.any(self.s <= 0):
            raise ValueError("general-dyne parameters s must be positive")
        if self.V_B.shape != (2 * m, 2 * m):
            raise ValueError("bath covariance must be 2M x 2M")
        if symplectic_spectrum(self.V_B)[-1] < 1 - 1e-8:
            raise ValueError("bath covariance is unphysical")
        if self.n_trajectories < 1:
            raise ValueError("need at least one trajectory")
        if self.dw_variance not in ("dt", "half_dt"):
            raise ValueError("dw_variance must be 'dt' or 'half_dt'")

    @property
    def V_M(self):
        return _block_diag([dyne_covariance(s, p) for s, p in zip(self.s, self.phi)])

    def gains(self):
        """Return ``(calC, Gamma)``, each of shape (2M, 2N)."""
        return _monitoring_gains(self.C, self.V_B, self.V_M)


@dataclass
class StateSeries:
    times: np.ndarray
    states: list

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)

    @property
    def R(self):
        return np.array([s.R for s in self.states])

    @property
    def V(self):
        return np.array([s.V for s in self.states])


@dataclass
class TrajectoryEnsemble:
    """Stochastic mean-vector trajectories sharing one deterministic covariance series.

    ``R`` has shape ``(n_trajectories, n_times, 2N)``. ``V`` is the conditional
    covariance at each output time (``None`` for semi-classical runs).
    """

    times: np.ndarray
    R: np.ndarray
    V: Optional[np.ndarray] = None

    @property
    def n_trajectories(self):
        return self.R.shape[0]

    def mean_R(self):
        return self.R.mean(axis=0)

    def var_R(self):
        return self.R.var(axis=0, ddof=1) if self.n_trajectories > 1 else np.zeros(self.R.shape[1:])

    def trajectory(self, k):
        """Conditional states along trajectory ``k``."""
        if self.V is None:
            raise ValueError("semi-classical ensembles carry no covariance")
        return StateSeries(self.times, [GaussianState._trusted(r, v) for r, v in zip(self.R[k], self.V)])

    def conditional_states(self):
        """Ensemble-mean vector paired with the conditional covariance, per time."""
        if self.V is None:
            raise ValueError("semi-classical ensembles carry no covariance")
        mean = self.mean_R()
        return StateSeries(self.times, [GaussianState._trusted(r, v) for r, v in zip(mean, self.V)])

    def average_states(self):
        """Ensemble-averaged states: mean of R, conditional V plus the spread of R."""
        if self.V is None:
            raise ValueError("semi-classical ensembles carry no covariance")
        states = []
        for i in range(len(self.times)):
            Rs = self.R[:, i, :]
            spread = np.cov(Rs, rowvar=False, bias=True) if self.n_trajectories > 1 else 0.0
            states.append(GaussianState._trusted(Rs.mean(axis=0), self.V[i] + spread))
        return StateSeries(self.times, states)


# ---------------------------------------------------------------------------
# stepping plan


def _check_times(times):
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size < 1 or not np.all(np.isfinite(times)):
        raise ValueError("times must be a non-empty finite vector")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def _step_plan(spec, times, max_step):
    """Substep size and count for every output interval."""
    dts = np.diff(times)
    if spec.time_dependent:
        norm = max(np.linalg.norm(spec.drift(t), 2) for t in times)
    else:
        norm = np.linalg.norm(spec.A, 2)
    h_cap = np.inf if norm == 0 else 1.0 / (STEPS_PER_INVERSE_NORM * norm)
    if max_step is not None:
        h_cap = min(h_cap, float(max_step))
    ks = np.maximum(1, np.ceil(dts / h_cap - 1e-9)).astype(np.int64)
    return dts / ks, ks


def _rk4_time_dependent(spec, calC, Gamma, V0, R0, t0, hs, ks):
    def cov_rhs(t, V):
        A = spec.drift(t)
        AV = A @ V
        F = AV + AV.T + spec.D
        if calC.shape[0]:
            K = V @ calC.T + Gamma.T
            F -= K @ K.T
        return F

    def mean_rhs(t, R):
        return spec.drift(t) @ R + spec.b

    V, R, t = np.array(V0, dtype=float), np.array(R0, dtype=float), t0
    V_out = [V.copy()]
    R_out = [R.copy()]
    for h, k in zip(hs, ks):
        for _ in range(k):
            k1 = cov_rhs(t, V)
            k2 = cov_rhs(t + h / 2, V + h / 2 * k1)
            k3 = cov_rhs(t + h / 2, V + h / 2 * k2)
            k4 = cov_rhs(t + h, V + h * k3)
            V = V + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            V = 0.5 * (V + V.T)
            q1 = mean_rhs(t, R)
            q2 = mean_rhs(t + h / 2, R + h / 2 * q1)
            q3 = mean_rhs(t + h / 2, R + h / 2 * q2)
            q4 = mean_rhs(t + h, R + h * q3)
            R = R + h / 6 * (q1 + 2 * q2 + 2 * q3 + q4)
            t += h
        V_out.append(V.copy())
        R_out.append(R.copy())
    return np.array(V_out), np.array(R_out)


def _integrate(spec, calC, Gamma, V0, R0, times, hs, ks, backend):
    if spec.time_dependent:
        return _rk4_time_dependent(spec, calC, Gamma, V0, R0, times[0], hs, ks)
    kern = _backend.get_kernels(backend)
    return kern.rk4_moments(spec.A, spec.D, spec.b, calC, Gamma, V0, R0, hs, ks)


def _states_from_moments(times, Vs, Rs, check_physical):
    states = []
    for t, V, R in zip(times, Vs, Rs):
        if not (np.all(np.isfinite(V)) and np.all(np.isfinite(R))):
            raise IntegrationError("non-finite moments", t)
        if check_physical:
            try:
                states.append(GaussianState(R, V, physical_tol=SERIES_PHYSICAL_TOL))
            except UnphysicalStateError as exc:
                raise IntegrationError(str(exc), t) from exc
        else:
            states.append(GaussianState._trusted(R, V))
    return states


def _check_initial(spec, initial):
    if 2 * initial.n_modes != spec.dim:
        raise ValueError(f"initial state has {initial.n_modes} modes, dynamics act on {spec.dim // 2}")


# ---------------------------------------------------------------------------
# public evolution routines


def unconditional_dynamics(spec, initial, times, *, max_step=None, backend=None, check_physical=True):
    """Evolve ``initial`` under the unconditional (Lyapunov) flow.

    Args:
        spec: :class:`DynamicsSpec`.
        initial: initial :class:`GaussianState` at ``times[0]``.
        times: strictly increasing output times.
        max_step: optional cap on the internal RK4 step; by default the step
            is ``min(dt, 1 / (200 ||A||_2))``.
        backend: ``"compiled"``, ``"python"`` or ``None`` for the active one.
        check_physical: verify the uncertainty relation (1e-6) at output times.

    Returns:
        :class:`StateSeries` with one state per output time.

    Raises:
        IntegrationError: on non-finite or unphysical moments.
    """
    _check_initial(spec, initial)
    times = _check_times(times)
    hs, ks = _step_plan(spec, times, max_step)
    empty = np.zeros((0, spec.dim))
    with np.errstate(over="ignore", invalid="ignore"):
        Vs, Rs = _integrate(spec, empty, empty, initial.V, initial.R, times, hs, ks, backend)
    return StateSeries(times, _states_from_moments(times, Vs, Rs, check_physical))


def lyapunov_solve(A, D):
    """Solve ``A V + V A^T + D = 0``.

    Small systems use the Kronecker-vectorised linear system; above
    ``KRONECKER_MAX_DIM`` the Bartels-Stewart solver of scipy is used.
    """
    n = A.shape[0]
    if n <= KRONECKER_MAX_DIM:
        I = np.eye(n)
        # row-major vec: vec(A V) = (A kron I) vec V, vec(V A^T) = (I kron A) vec V
        L = np.kron(A, I) + np.kron(I, A)
        V = np.linalg.solve(L, -D.reshape(-1)).reshape(n, n)
    else:
        V = scipy.linalg.solve_continuous_lyapunov(A, -D)
    return 0.5 * (V + V.T)


def steady_state(spec):
    """Stationary state of a time-independent unconditional flow.

    Raises:
        NotHurwitzError: when the spectral abscissa of ``A`` is >= -1e-12.
    """
    if spec.time_dependent:
        raise ValueError("steady state requires a time-independent drift")
    abscissa = float(np.max(np.linalg.eigvals(spec.A).real))
    if abscissa >= HURWITZ_TOL:
        raise NotHurwitzError(f"drift is not Hurwitz (spectral abscissa {abscissa:.3e})")
    V = lyapunov_solve(spec.A, spec.D)
    R = -np.linalg.solve(spec.A, spec.b)
    return GaussianState(R, V, physical_tol=SERIES_PHYSICAL_TOL)


def _trajectory_rng(seed, k):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))


def _run_ensemble(spec, K, sub_dts, sub_times, R0, record, n_traj, seed, var_factor, backend):
    m = K.shape[2]
    scale = np.sqrt(var_factor * sub_dts)[None, :, None]
    n_steps = sub_dts.size
    out = np.empty((n_traj, len(record), R0.size))
    kern = _backend.get_kernels(backend)
    for start in range(0, n_traj, TRAJECTORY_CHUNK):
        stop = min(start + TRAJECTORY_CHUNK, n_traj)
        z = np.stack([_trajectory_rng(seed, k).standard_normal((n_steps, m)) for k in range(start, stop)])
        dw = z * scale
        if spec.time_dependent:
            out[start:stop] = _em_time_dependent(spec, K, sub_dts, sub_times, dw, R0, record)
        else:
            out[start:stop] = kern.em_ensemble(spec.A, spec.b, K, sub_dts, dw, R0, record)
    return out


def _em_time_dependent(spec, K, dts, sub_times, dw, R0, record):
    n_traj = dw.shape[0]
    R = np.tile(R0, (n_traj, 1))
    out = np.empty((n_traj, len(record), R0.size))
    slot = 0
    if record[0] == 0:
        out[:, 0] = R
        slot = 1
    for j, dt in enumerate(dts):
        gain = K[0] if K.shape[0] == 1 else K[j]
        A = spec.drift(sub_times[j])
        R = R + (R @ A.T + spec.b) * dt + dw[:, j, :] @ gain.T
        while slot < len(record) and record[slot] == j + 1:
            out[:, slot] = R
            slot += 1
    return out


def _substep_grid(times, hs, ks):
    sub_dts = np.repeat(hs, ks)
    sub_times = times[0] + np.concatenate([[0.0], np.cumsum(sub_dts)])
    record = np.concatenate([[0], np.cumsum(ks)]).astype(np.int64)
    return sub_dts, sub_times, record


def conditional_dynamics(spec, monitoring, initial, times, *, max_step=None, backend=None):
    """Evolve ``initial`` under continuous general-dyne monitoring.

    The conditional covariance obeys a deterministic Riccati equation and is
    integrated once with RK4; each trajectory's mean vector follows

        dR = (A R + b) dt + (V calC^T + Gamma^T) dw

    integrated with Euler-Maruyama on the same substep grid.

    Returns:
        :class:`TrajectoryEnsemble` sampled at ``times``.
    """
    _check_initial(spec, initial)
    times = _check_times(times)
    calC, Gamma = monitoring.gains()
    if calC.shape[1] != spec.dim:
        raise ValueError("coupling matrix does not match the system dimension")
    hs, ks = _step_plan(spec, times, max_step)
    sub_dts, sub_times, record = _substep_grid(times, hs, ks)

    with np.errstate(over="ignore", invalid="ignore"):
        V_sub, _ = _integrate(
            spec, calC, Gamma, initial.V, initial.R, sub_times, sub_dts, np.ones(sub_dts.size, np.int64), backend
        )
    V_out = V_sub[record]
    for t, V in zip(times, V_out):
        if not np.all(np.isfinite(V)):
            raise IntegrationError("non-finite covariance", t)
        if symplectic_spectrum(V)[-1] < 1 - SERIES_PHYSICAL_TOL:
            raise IntegrationError("conditional covariance became unphysical", t)

    K = V_sub[:-1] @ calC.T + Gamma.T
    var_factor = 1.0 if monitoring.dw_variance == "dt" else 0.5
    R = _run_ensemble(
        spec, K, sub_dts, sub_times, initial.R, record, monitoring.n_trajectories, monitoring.seed, var_factor, backend
    )
    return TrajectoryEnsemble(times, R, V_out)


def semi_classical(spec, initial, times, n_trajectories, seed, *, max_step=None, backend=None):
    """Monte-Carlo Langevin trajectories ``dR = (A R + b) dt + L dw`` with ``L L^T = D``.

    ``initial`` is a :class:`GaussianState` or a mean vector.
    """
    R0 = initial.R if isinstance(initial, GaussianState) else np.asarray(initial, dtype=float).reshape(-1)
    if R0.size != spec.dim:
        raise ValueError("initial mean vector does not match the system dimension")
    if n_trajectories < 1:
        raise ValueError("need at least one trajectory")
    times = _check_times(times)
    L = psd_factor(spec.D)
    hs, ks = _step_plan(spec, times, max_step)
    sub_dts, sub_times, record = _substep_grid(times, hs, ks)
    R = _run_ensemble(spec, L[None], sub_dts, sub_times, R0, record, n_trajectories, seed, 1.0, backend)
    return TrajectoryEnsemble(times, R, None)
