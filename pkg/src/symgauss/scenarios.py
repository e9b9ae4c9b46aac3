"""Worked examples as data-producing scenarios.

Each scenario takes keyword parameters (defaults below) and returns a
:class:`ScenarioResult` holding output columns, metadata and a one-line
summary. Quadratures use hbar = 2 and entropies are in nats.
"""
from dataclasses import dataclass, field

import numpy as np

from . import state as gs
from .circuits import CircuitParams, ensemble_profile
from .dynamics import DynamicsSpec, MonitoringSpec, conditional_dynamics, steady_state, unconditional_dynamics
from .observables import fidelity, number_moments, squeezing_degree, vacuum_probability

TWO_PI = 2 * np.pi


@dataclass
class ScenarioResult:
    columns: dict
    meta: dict = field(default_factory=dict)
    summary: str = ""


def _oscillator(omega, gamma):
    A = np.array([[-gamma / 2, omega], [-omega, -gamma / 2]])
    return DynamicsSpec(A, gamma * np.eye(2))


def quadrature(omega=TWO_PI, alpha=2.0, r=1.2, t_max=None, n_times=200, **_):
    """Free rotation of a coherent and a squeezed-coherent state."""
    t_max = 2 / omega if t_max is None else t_max
    t = np.linspace(0.0, t_max, int(n_times))
    spec = DynamicsSpec(np.array([[0.0, omega], [-omega, 0.0]]), np.zeros((2, 2)))
    coh = gs.coherent(alpha)
    sq = gs.squeeze(coh, 0, r)
    a = unconditional_dynamics(spec, coh, t)
    b = unconditional_dynamics(spec, sq, t)
    cols = {
        "t": t,
        "mean_x_coherent": a.R[:, 0],
        "var_x_coherent": a.V[:, 0, 0],
        "mean_x_squeezed": b.R[:, 0],
        "var_x_squeezed": b.V[:, 0, 0],
    }
    params = dict(omega=omega, alpha=alpha, r=r, t_max=t_max, n_times=int(n_times))
    return ScenarioResult(cols, {"params": params}, f"final <x> coherent = {a.R[-1, 0]:.6f}")


def damped(omega=TWO_PI, gamma=TWO_PI * 0.3, alpha=2.0, t_max=None, n_times=200, **_):
    """Amplitude damping of a coherent state into the vacuum."""
    t_max = 3.5 * TWO_PI / omega if t_max is None else t_max
    t = np.linspace(0.0, t_max, int(n_times))
    spec = _oscillator(omega, gamma)
    series = unconditional_dynamics(spec, gs.coherent(alpha), t)
    moments = [number_moments(s) for s in series]
    vac = gs.vacuum()
    ss_fid = fidelity(steady_state(spec), vac)
    cols = {
        "t": t,
        "nbar": np.array([m.mean[0] for m in moments]),
        "nvar": np.array([m.variance[0] for m in moments]),
        "fidelity_vacuum": np.array([fidelity(s, vac) for s in series]),
    }
    params = dict(omega=omega, gamma=gamma, alpha=alpha, t_max=t_max, n_times=int(n_times))
    meta = {"params": params, "steady_state_fidelity_vacuum": ss_fid}
    return ScenarioResult(cols, meta, f"steady-state fidelity with vacuum = {ss_fid:.9f}")


def squeezed_damped(omega=TWO_PI, gamma=TWO_PI * 0.1, alpha=2.0, r=1.2, t_max=6.0, n_times=200, **_):
    """Damping of a squeezed-coherent state; squeezing degree relaxes to 1."""
    t = np.linspace(0.0, t_max, int(n_times))
    spec = _oscillator(omega, gamma)
    series = unconditional_dynamics(spec, gs.squeeze(gs.coherent(alpha), 0, r), t)
    ss_sq = squeezing_degree(steady_state(spec))[0]
    cols = {
        "t": t,
        "squeezing_degree": np.array([squeezing_degree(s)[0] for s in series]),
        "mean_x": series.R[:, 0],
        "var_x": series.V[:, 0, 0],
    }
    params = dict(omega=omega, gamma=gamma, alpha=alpha, r=r, t_max=t_max, n_times=int(n_times))
    meta = {"params": params, "steady_state_squeezing_degree": ss_sq}
    return ScenarioResult(cols, meta, f"steady-state squeezing degree = {ss_sq:.9f}")


def lossy_tms(r, tau):
    """Two-mode squeezed vacuum with loss ``tau`` applied to mode 0."""
    return gs.loss_ancilla(gs.two_mode_squeezed(r), 0, tau)


def joint_vacuum_probability(bipartite, alpha, theta):
    """``p(0,0)`` after displacing by ``-alpha`` and ``-alpha e^{i theta}``."""
    shifted = gs.displace(gs.displace(bipartite, 0, -alpha), 1, -alpha * np.exp(1j * theta))
    return vacuum_probability(shifted)


def joint_vacuum_fidelity(bipartite, alpha, theta):
    """Same probability as the overlap with the product coherent state."""
    probe = gs.tensor_product([gs.coherent(alpha), gs.coherent(alpha * np.exp(1j * theta))])
    return fidelity(probe, bipartite)


def visibility(p):
    p = np.asarray(p)
    return float((p.max() - p.min()) / (p.max() + p.min()))


def displacement(r=0.4, alpha=0.1, taus=(1.0, 0.8, 0.6, 0.5), theta_max=6 * np.pi, n_times=200,
                 route_tol=1e-9, **_):
    """Joint zero-photon probability of a displaced lossy TMS against the local-oscillator phase.

    Both the vacuum-projection and the coherent-overlap routes are evaluated;
    they must agree within ``route_tol``.
    """
    theta = np.linspace(0.0, theta_max, int(n_times))
    cols = {"theta": theta}
    vis = {}
    worst = 0.0
    for tau in taus:
        bip = lossy_tms(r, tau)
        p = np.array([joint_vacuum_probability(bip, alpha, th) for th in theta])
        q = np.array([joint_vacuum_fidelity(bip, alpha, th) for th in theta])
        worst = max(worst, float(np.max(np.abs(p - q))))
        cols[f"p00_tau_{tau:g}"] = p
        vis[f"{tau:g}"] = visibility(p)
    if worst > route_tol:
        raise ArithmeticError(f"vacuum-probability and fidelity routes differ by {worst:.3e}")
    params = dict(r=r, alpha=alpha, taus=list(map(float, taus)), theta_max=theta_max, n_times=int(n_times))
    meta = {"params": params, "visibility": vis, "route_max_difference": worst}
    vis_txt = ", ".join(f"tau={k}: {v:.4f}" for k, v in vis.items())
    return ScenarioResult(cols, meta, f"visibility {vis_txt}")


def opo(gamma=TWO_PI * 10, chi=None, alpha=3.0, t_max=0.36, n_times=2000, n_trajectories=100,
        s=1e-5, phi=np.pi / 2, seed=0, **_):
    """Degenerate parametric oscillator with and without homodyne monitoring."""
    chi = gamma / 3 if chi is None else chi
    t = np.linspace(0.0, t_max, int(n_times))
    spec = DynamicsSpec(np.diag([-chi - gamma / 2, chi - gamma / 2]), gamma * np.eye(2))
    uncond = unconditional_dynamics(spec, gs.coherent(alpha), t)
    mon = MonitoringSpec(np.sqrt(gamma) * np.eye(2), np.eye(2), s=(s,), phi=(phi,),
                         n_trajectories=int(n_trajectories), seed=seed)
    ens = conditional_dynamics(spec, mon, gs.coherent(alpha), t)
    cond = ens.conditional_states()
    mean, var = ens.mean_R(), ens.var_R()
    k = 2 * chi / gamma
    theory_u = (1 - k) / (1 + k)
    theory_c = ((gamma - 2 * chi) / gamma) ** 2
    cols = {
        "t": t,
        "squeezing_unconditional": np.array([squeezing_degree(x)[0] for x in uncond]),
        "squeezing_conditional": np.array([squeezing_degree(x)[0] for x in cond]),
        "mean_x_conditional": mean[:, 0],
        "var_x_ensemble": var[:, 0],
    }
    params = dict(gamma=gamma, chi=chi, alpha=alpha, t_max=t_max, n_times=int(n_times),
                  n_trajectories=int(n_trajectories), s=s, phi=phi)
    meta = {"params": params, "seed": seed, "theory_unconditional": theory_u, "theory_conditional": theory_c}
    u, c = cols["squeezing_unconditional"][-1], cols["squeezing_conditional"][-1]
    return ScenarioResult(cols, meta, f"final squeezing unconditional = {u:.6f} (theory {theory_u:.6f}), "
                                      f"conditional = {c:.6f} (theory {theory_c:.6f})")


def random_circuits(n_modes=20, turns=(2, 4, 6, 8, 10), n_realizations=50, mean_alpha=0.1, std_alpha=0.01,
                    r_max=0.5, seed=0, workers=1, **_):
    """Mean entropy profile ``S(x)`` of random circuits for several depths."""
    params = CircuitParams(r_max=r_max, mean_alpha=mean_alpha, std_alpha=std_alpha)
    cols = {"x": np.arange(int(n_modes) + 1)}
    peaks, gates = {}, {}
    for T in turns:
        prof = ensemble_profile(int(n_modes), int(T), params, int(n_realizations),
                                seed=np.random.SeedSequence(seed, spawn_key=(int(T),)).generate_state(1)[0],
                                workers=workers)
        cols[f"S_mean_T{T}"] = prof.mean
        cols[f"S_std_T{T}"] = prof.std
        peaks[str(T)] = float(prof.mean.max())
        gates[str(T)] = float(prof.gate_counts.mean())
    p = dict(n_modes=int(n_modes), turns=[int(T) for T in turns], n_realizations=int(n_realizations),
             mean_alpha=mean_alpha, std_alpha=std_alpha, r_max=r_max)
    meta = {"params": p, "seed": seed, "entropy_unit": "nats", "peak_entropy": peaks,
            "mean_gate_count": gates}
    peak_txt = ", ".join(f"T={k}: {v:.3f}" for k, v in peaks.items())
    return ScenarioResult(cols, meta, f"peak mean entropy (nats) {peak_txt}")


SCENARIOS = {
    "quadrature": (quadrature, "free rotation of coherent and squeezed-coherent quadratures"),
    "damped": (damped, "amplitude-damped coherent state: occupation and fidelity with vacuum"),
    "squeezed-damped": (squeezed_damped, "amplitude-damped squeezed state: squeezing degree"),
    "displacement": (displacement, "p(0,0) oscillations of a displaced lossy two-mode squeezed state"),
    "opo": (opo, "parametric oscillator, unconditional vs homodyne-monitored squeezing"),
    "random-circuits": (random_circuits, "entropy profile S(x) of random Gaussian circuits"),
}


def run_scenario(name, **params):
    if name not in SCENARIOS:
        raise KeyError(name)
    return SCENARIOS[name][0](**params)
