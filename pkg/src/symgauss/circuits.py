"""Random Gaussian circuits on a 1D lattice of modes and spatial entanglement profiles."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import state as gs
from .observables import von_neumann_entropy

SINGLE_MODE_KINDS = ("identity", "rotation", "displacement", "squeezing")
TWO_MODE_KINDS = ("two_mode_squeezing", "beam_splitter")
GATE_KINDS = SINGLE_MODE_KINDS + TWO_MODE_KINDS


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets = 2 if self.kind in TWO_MODE_KINDS else 1
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} acts on {n_targets} mode(s), got targets {self.targets}")
        if n_targets == 2 and self.targets[1] != self.targets[0] + 1:
            raise ValueError("two-mode gates act on nearest neighbours (x, x+1)")


@dataclass(frozen=True)
class CircuitParams:
    """Sampling ranges for gate parameters.

    Rotation angles are uniform on ``[0, 2 pi)``, transmissions uniform on
    ``[0, 1]``, both squeezings uniform on ``[0, r_max]`` and real
    displacements normal with the given mean and standard deviation.
    """

    r_max: float = 0.5
    mean_alpha: float = 0.1
    std_alpha: float = 0.01


@dataclass(frozen=True)
class Circuit:
    n_modes: int
    turns: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for g in self.gates:
            if max(g.targets) >= self.n_modes or min(g.targets) < 0:
                raise ValueError(f"gate {g} addresses a mode outside 0..{self.n_modes - 1}")


def _draw_param(kind, params, rng):
    if kind == "rotation":
        return rng.uniform(0.0, 2 * np.pi)
    if kind == "displacement":
        return rng.normal(params.mean_alpha, params.std_alpha)
    if kind in ("squeezing", "two_mode_squeezing"):
        return rng.uniform(0.0, params.r_max)
    if kind == "beam_splitter":
        return rng.uniform(0.0, 1.0)
    return 0.0


def random_circuit(n_modes, turns, params=None, rng=None):
    """Draw a random circuit of ``turns`` left-to-right sweeps over the lattice.

    At each site a gate kind is chosen uniformly from :data:`GATE_KINDS`;
    a two-mode kind drawn at site ``x`` acts on ``(x, x+1)`` and consumes
    site ``x+1`` for that turn. The last site only draws single-mode kinds.
    """
    if n_modes < 2 or turns < 1:
        raise ValueError("need at least 2 modes and 1 turn")
    params = params or CircuitParams()
    rng = np.random.default_rng(rng)
    gates = []
    for _ in range(turns):
        x = 0
        while x < n_modes:
            kinds = GATE_KINDS if x < n_modes - 1 else SINGLE_MODE_KINDS
            kind = kinds[rng.integers(len(kinds))]
            param = _draw_param(kind, params, rng)
            if kind in TWO_MODE_KINDS:
                gates.append(Gate(kind, (x, x + 1), param))
                x += 2
            else:
                gates.append(Gate(kind, (x,), param))
                x += 1
    return Circuit(n_modes, turns, tuple(gates))


def apply_gate(state, gate):
    kind, t, p = gate.kind, gate.targets, gate.param
    if kind == "identity":
        return state
    if kind == "rotation":
        return gs.rotate(state, t[0], p)
    if kind == "displacement":
        return gs.displace(state, t[0], p)
    if kind == "squeezing":
        return gs.squeeze(state, t[0], p)
    if kind == "two_mode_squeezing":
        return gs.two_mode_squeezing(state, t, p)
    return gs.beam_splitter(state, t, p)


def apply_circuit(initial, circuit):
    """Apply every gate of ``circuit`` to ``initial`` in order."""
    if initial.n_modes != circuit.n_modes:
        raise ValueError(f"circuit acts on {circuit.n_modes} modes, state has {initial.n_modes}")
    state = initial
    for gate in circuit.gates:
        state = apply_gate(state, gate)
    return state


def entropy_profile(state):
    """``S[x]`` = von Neumann entropy of modes ``0..x-1`` for ``x = 0..N``."""
    S = np.zeros(state.n_modes + 1)
    for x in range(1, state.n_modes + 1):
        S[x] = von_neumann_entropy(gs.only_modes(state, range(x)))
    return S


def complement_profile(state):
    """Entropy of modes ``x..N-1`` for ``x = 0..N`` (equals :func:`entropy_profile` for pure states)."""
    N = state.n_modes
    S = np.zeros(N + 1)
    for x in range(N):
        S[x] = von_neumann_entropy(gs.only_modes(state, range(x, N)))
    return S


@dataclass
class EnsembleProfile:
    mean: np.ndarray
    std: np.ndarray
    n_realizations: int
    gate_counts: np.ndarray
    profiles: np.ndarray = None  # one row per realization

    @property
    def sem(self):
        return self.std / np.sqrt(self.n_realizations)


def _realization(n_modes, turns, params, seed, k):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
    circuit = random_circuit(n_modes, turns, params, rng)
    final = apply_circuit(gs.vacuum(n_modes), circuit)
    return entropy_profile(final), len(circuit.gates)


def ensemble_profile(n_modes, turns, params=None, n_realizations=100, seed=0, workers=1):
    """Average entropy profile over independently seeded random circuits.

    Realization ``k`` uses the stream ``SeedSequence(seed, spawn_key=(k,))``,
    so the result does not depend on ``workers``.
    """
    if n_realizations < 1:
        raise ValueError("need at least one realization")
    jobs = range(n_realizations)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda k: _realization(n_modes, turns, params, seed, k), jobs))
    else:
        results = [_realization(n_modes, turns, params, seed, k) for k in jobs]
    profiles = np.array([r[0] for r in results])
    counts = np.array([r[1] for r in results])
    std = profiles.std(axis=0, ddof=1) if n_realizations > 1 else np.zeros(n_modes + 1)
    return EnsembleProfile(profiles.mean(axis=0), std, n_realizations, counts, profiles)
