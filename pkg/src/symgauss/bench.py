"""Timing harness for unconditional dynamics of all-to-all coupled modes."""
import time
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dynamics import DynamicsSpec, unconditional_dynamics
from .state import coherent, tensor_product

OMEGA = 2 * np.pi * 305e3
CYCLES = 5
N_OUTPUT = 101


def coupled_hamiltonian(n_modes, omega=OMEGA, rng=None):
    """Quadratic Hamiltonian matrix ``omega I + K`` with every quadrature pair coupled.

    The coupling entries are drawn as ``(omega/3) U(-1, 1)`` and then the
    symmetric matrix is rescaled to spectral norm ``omega/2``, which keeps
    the Hamiltonian positive definite.
    """
    rng = np.random.default_rng(rng)
    dim = 2 * n_modes
    K = (omega / 3.0) * rng.uniform(-1.0, 1.0, size=(dim, dim))
    K = 0.5 * (K + K.T)
    K *= (omega / 2.0) / np.linalg.norm(K, 2)
    return omega * np.eye(dim) + K


def coupled_spec(n_modes, omega=OMEGA, gamma=None, nbar=10.0, rng=None):
    """Drift ``Omega H - gamma/2`` and thermal diffusion ``gamma (2 nbar + 1) I``."""
    gamma = omega / 10.0 if gamma is None else gamma
    H = coupled_hamiltonian(n_modes, omega, rng)
    dim = 2 * n_modes
    omega_form = np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    A = omega_form @ H - 0.5 * gamma * np.eye(dim)
    D = gamma * (2 * nbar + 1) * np.eye(dim)
    return DynamicsSpec(A, D)


def time_run(n_modes, steps=10_000, seed=0, backend=None, omega=OMEGA):
    """Wall-clock seconds for ``steps`` RK4 steps spanning five oscillation cycles.

    Output is stored at ``N_OUTPUT`` evenly spaced times; the step size is
    pinned to ``T / steps`` through ``max_step``.
    """
    spec = coupled_spec(n_modes, omega, rng=np.random.SeedSequence(seed, spawn_key=(n_modes,)))
    initial = tensor_product([coherent(1.0)] * n_modes)
    t_end = CYCLES * 2 * np.pi / omega
    times = np.linspace(0.0, t_end, N_OUTPUT)
    start = time.perf_counter()
    unconditional_dynamics(spec, initial, times, max_step=t_end / steps, backend=backend, check_physical=False)
    return time.perf_counter() - start


@dataclass
class BenchReport:
    modes: np.ndarray
    seconds: np.ndarray
    seconds_std: np.ndarray
    exponent: float
    exponent_ci: tuple
    reps: int
    steps: int
    backend: str

    def columns(self):
        return {"N": self.modes, "seconds_mean": self.seconds, "seconds_std": self.seconds_std}


def fit_power_law(modes, seconds, confidence=0.95):
    """Slope of ``log(seconds)`` against ``log(modes)`` with a t-distribution interval."""
    modes = np.asarray(modes, dtype=float)
    if np.unique(modes).size < 4:
        raise ValueError("power-law fit needs at least 4 distinct mode counts")
    res = stats.linregress(np.log(modes), np.log(seconds))
    half = stats.t.ppf(0.5 + confidence / 2, modes.size - 2) * res.stderr
    return float(res.slope), (float(res.slope - half), float(res.slope + half))


def run_bench(modes=(5, 10, 20, 40), reps=5, steps=10_000, seed=0, backend=None):
    """Time ``reps`` runs for every mode count and fit the scaling exponent."""
    from ._backend import BACKEND

    modes = np.asarray(modes, dtype=int)
    if np.any(modes < 2):
        raise ValueError("mode counts must be >= 2")
    if reps < 1 or steps < 1:
        raise ValueError("reps and steps must be positive")
    time_run(int(modes[0]), steps=min(steps, 100), seed=seed, backend=backend)  # warm-up
    samples = np.array([[time_run(int(n), steps, seed, backend) for _ in range(reps)] for n in modes])
    mean = samples.mean(axis=1)
    std = samples.std(axis=1, ddof=1) if reps > 1 else np.zeros(len(modes))
    exponent, ci = fit_power_law(modes, mean)
    return BenchReport(modes, mean, std, exponent, ci, reps, steps, backend or BACKEND)
