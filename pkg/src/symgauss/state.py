"""Gaussian states in the symplectic representation and Gaussian operations on them.

Conventions (fixed package-wide):

* hbar = 2, so the vacuum covariance matrix is the identity;
* quadratures are interleaved, ``R = (x1, p1, x2, p2, ...)``;
* rotation by ``theta`` maps ``x -> x cos(theta) + p sin(theta)``, the same
  direction as free evolution ``exp(-i theta n)``;
* ``squeeze(r, 0)`` with ``r > 0`` squeezes the x quadrature.

Every operation returns a new :class:`GaussianState`; states are never
modified in place.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import psd_factor, symplectic_form, symplectic_spectrum

SYMMETRY_TOL = 1e-8
PHYSICAL_TOL = 1e-8
HOMODYNE_S = 1e-8


class UnphysicalStateError(ValueError):
    """Raised when a covariance matrix violates the uncertainty relation."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class GaussianState:
    """An N-mode Gaussian state given by its mean vector ``R`` and covariance ``V``.

    Args:
        R: mean quadrature vector of length 2N.
        V: real symmetric 2N x 2N covariance matrix.
        physical_tol: minimum symplectic eigenvalue allowed is
            ``1 - physical_tol``; pass ``None`` to skip the check.

    Raises:
        ValueError: on shape mismatch, non-finite entries or asymmetric ``V``.
        UnphysicalStateError: if ``V`` violates the uncertainty relation.
    """

    __slots__ = ("_R", "_V")

    def __init__(self, R, V, *, physical_tol=PHYSICAL_TOL):
        R = np.asarray(R, dtype=float).reshape(-1)
        V = np.asarray(V, dtype=float)
        if R.size == 0 or R.size % 2:
            raise ValueError(f"mean vector must have even, nonzero length, got {R.size}")
        if V.shape != (R.size, R.size):
            raise ValueError(f"covariance shape {V.shape} does not match mean length {R.size}")
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(V))):
            raise ValueError("state moments must be finite")
        scale = max(1.0, float(np.max(np.abs(V))))
        asym = float(np.max(np.abs(V - V.T)))
        if asym > SYMMETRY_TOL * scale:
            raise ValueError(f"covariance matrix is not symmetric (max asymmetry {asym:.3e})")
        V = 0.5 * (V + V.T)
        if physical_tol is not None:
            nu_min = symplectic_spectrum(V)[-1]
            if nu_min < 1.0 - physical_tol:
                raise UnphysicalStateError(
                    f"covariance matrix is unphysical: min symplectic eigenvalue {nu_min:.6g} < 1"
                )
        self._R = _frozen(R)
        self._V = _frozen(V)

    @classmethod
    def _trusted(cls, R, V):
        # moments produced by an operation already known to preserve physicality
        obj = cls.__new__(cls)
        obj._R = _frozen(R)
        obj._V = _frozen(0.5 * (V + V.T))
        return obj

    @property
    def R(self):
        return self._R

    @property
    def V(self):
        return self._V

    @property
    def n_modes(self):
        return self._R.size // 2

    @property
    def Omega(self):
        return symplectic_form(self.n_modes)

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes}, R={self._R.tolist()}, V={self._V.tolist()})"

    def copy(self):
        return GaussianState._trusted(self._R.copy(), self._V.copy())

    def isclose(self, other, atol=1e-8):
        """True if both moments agree elementwise within ``atol``."""
        return (
            self.n_modes == other.n_modes
            and np.allclose(self._R, other.R, rtol=0, atol=atol)
            and np.allclose(self._V, other.V, rtol=0, atol=atol)
        )

    def is_physical(self, tol=PHYSICAL_TOL):
        return bool(symplectic_spectrum(self._V)[-1] >= 1.0 - tol)

    # fluent aliases of the module-level operations
    def displace(self, mode, alpha):
        return displace(self, mode, alpha)

    def rotate(self, mode, theta):
        return rotate(self, mode, theta)

    def squeeze(self, mode, r, phi=0.0):
        return squeeze(self, mode, r, phi)

    def beam_splitter(self, modes, tau):
        return beam_splitter(self, modes, tau)

    def two_mode_squeezing(self, modes, r):
        return two_mode_squeezing(self, modes, r)

    def apply_symplectic(self, op):
        return apply_symplectic(self, op)

    def loss_ancilla(self, mode, tau):
        return loss_ancilla(self, mode, tau)

    def partial_trace(self, drop_modes):
        return partial_trace(self, drop_modes)

    def only_modes(self, keep_modes):
        return only_modes(self, keep_modes)

    def tensor_product(self, others):
        return tensor_product([self, *others])

    def measure(self, spec, outcome=None, rng=None):
        return measure(self, spec, outcome=outcome, rng=rng)

    # serialization
    def to_dict(self):
        return {"n_modes": self.n_modes, "R": self._R.tolist(), "V": self._V.tolist()}

    def to_json(self):
        """JSON text with every float printed to 17 significant digits (bit-exact round trip)."""
        f = lambda x: format(float(x), ".17g")  # noqa: E731
        R = ", ".join(f(x) for x in self._R)
        V = ", ".join("[" + ", ".join(f(x) for x in row) + "]" for row in self._V)
        return f'{{"n_modes": {self.n_modes}, "R": [{R}], "V": [{V}]}}'

    @classmethod
    def from_dict(cls, data, *, physical_tol=PHYSICAL_TOL):
        state = cls(data["R"], data["V"], physical_tol=physical_tol)
        if int(data["n_modes"]) != state.n_modes:
            raise ValueError("n_modes field disagrees with the size of R")
        return state

    @classmethod
    def from_json(cls, text, *, physical_tol=PHYSICAL_TOL):
        return cls.from_dict(json.loads(text), physical_tol=physical_tol)


# ---------------------------------------------------------------------------
# constructors


def vacuum(n=1):
    """The n-mode vacuum: ``R = 0``, ``V = I``."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of modes must be a positive integer, got {n}")
    n = int(n)
    return GaussianState._trusted(np.zeros(2 * n), np.eye(2 * n))


def coherent(alpha):
    """Single-mode coherent state; ``R = 2 (Re alpha, Im alpha)``."""
    alpha = complex(alpha)
    return GaussianState._trusted(np.array([2 * alpha.real, 2 * alpha.imag]), np.eye(2))


def thermal(nbar):
    """Single-mode thermal state with mean occupation ``nbar``."""
    if nbar < 0:
        raise ValueError(f"mean occupation must be non-negative, got {nbar}")
    return GaussianState._trusted(np.zeros(2), (2 * nbar + 1) * np.eye(2))


def squeezed(r, phi=0.0):
    """Squeezed vacuum ``S(r, phi)|0>``."""
    return squeeze(vacuum(1), 0, r, phi)


def two_mode_squeezed(r):
    """Two-mode squeezed vacuum with squeezing ``r``."""
    return two_mode_squeezing(vacuum(2), (0, 1), r)


# ---------------------------------------------------------------------------
# gate matrices


def rotation_matrix(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeeze_matrix(r, phi=0.0):
    c, s = np.cos(phi), np.sin(phi)
    return np.cosh(r) * np.eye(2) - np.sinh(r) * np.array([[c, s], [s, -c]])


def beam_splitter_matrix(tau):
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {tau}")
    t, u = np.sqrt(tau), np.sqrt(1.0 - tau)
    I = np.eye(2)
    return np.block([[t * I, u * I], [-u * I, t * I]])


def two_mode_squeezing_matrix(r):
    I, Z = np.eye(2), np.diag([1.0, -1.0])
    return np.block([[np.cosh(r) * I, np.sinh(r) * Z], [np.sinh(r) * Z, np.cosh(r) * I]])


def is_symplectic(S, tol=1e-8):
    S = np.asarray(S, dtype=float)
    omega = symplectic_form(S.shape[0] // 2)
    return bool(np.linalg.norm(S @ omega @ S.T - omega) <= tol * max(1.0, np.linalg.norm(S) ** 2))


@dataclass(frozen=True)
class SymplecticOp:
    """Affine Gaussian unitary ``R -> S R + d``, ``V -> S V S^T``."""

    S: np.ndarray
    d: np.ndarray = field(default=None)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ValueError(f"symplectic matrix must be 2N x 2N, got shape {S.shape}")
        d = np.zeros(S.shape[0]) if self.d is None else np.asarray(self.d, dtype=float).reshape(-1)
        if d.shape != (S.shape[0],):
            raise ValueError("displacement length does not match the matrix")
        object.__setattr__(self, "S", _frozen(S))
        object.__setattr__(self, "d", _frozen(d))

    @property
    def n_modes(self):
        return self.S.shape[0] // 2

    @classmethod
    def identity(cls, n_modes):
        return cls(np.eye(2 * n_modes))

    @classmethod
    def embed(cls, local, modes, n_modes, d_local=None):
        """Lift a local 2k x 2k symplectic acting on ``modes`` to ``n_modes`` modes."""
        idx = _quadrature_indices(_check_modes(modes, n_modes))
        S = np.eye(2 * n_modes)
        S[np.ix_(idx, idx)] = local
        d = np.zeros(2 * n_modes)
        if d_local is not None:
            d[idx] = d_local
        return cls(S, d)

    def is_symplectic(self, tol=1e-8):
        return is_symplectic(self.S, tol)

    def compose(self, first):
        """The map ``self o first`` (``first`` acts first)."""
        return SymplecticOp(self.S @ first.S, self.S @ first.d + self.d)

    def __matmul__(self, other):
        return self.compose(other)


# ---------------------------------------------------------------------------
# operations


def _check_modes(modes, n_modes, *, distinct=True):
    modes = [int(m) for m in np.atleast_1d(modes)]
    for m in modes:
        if not 0 <= m < n_modes:
            raise IndexError(f"mode index {m} out of range for a {n_modes}-mode state")
    if distinct and len(set(modes)) != len(modes):
        raise ValueError(f"mode indices must be distinct, got {modes}")
    return modes


def _quadrature_indices(modes):
    return np.array([q for m in modes for q in (2 * m, 2 * m + 1)], dtype=int)


def _apply_local(state, S_local, modes, d_local=None):
    idx = _quadrature_indices(_check_modes(modes, state.n_modes))
    R = state.R.copy()
    V = state.V.copy()
    R[idx] = S_local @ R[idx]
    if d_local is not None:
        R[idx] += d_local
    V[idx, :] = S_local @ V[idx, :]
    V[:, idx] = V[:, idx] @ S_local.T
    return GaussianState._trusted(R, V)


def displace(state, mode, alpha):
    """Displace ``mode`` by the complex amplitude ``alpha``."""
    (mode,) = _check_modes([mode], state.n_modes)
    alpha = complex(alpha)
    R = state.R.copy()
    R[2 * mode] += 2 * alpha.real
    R[2 * mode + 1] += 2 * alpha.imag
    return GaussianState._trusted(R, state.V)


def rotate(state, mode, theta):
    return _apply_local(state, rotation_matrix(theta), [mode])


def squeeze(state, mode, r, phi=0.0):
    return _apply_local(state, squeeze_matrix(r, phi), [mode])


def _pair(modes, n_modes):
    j, k = _check_modes(modes, n_modes)
    return j, k


def beam_splitter(state, modes, tau):
    """Beam splitter with power transmission ``tau`` between ``modes = (j, k)``."""
    return _apply_local(state, beam_splitter_matrix(tau), _pair(modes, state.n_modes))


def two_mode_squeezing(state, modes, r):
    return _apply_local(state, two_mode_squeezing_matrix(r), _pair(modes, state.n_modes))


def apply_symplectic(state, op, tol=1e-8):
    """Apply a generic Gaussian unitary given as a :class:`SymplecticOp`.

    Raises:
        ValueError: on dimension mismatch or when ``op.S`` is not symplectic.
    """
    if not isinstance(op, SymplecticOp):
        op = SymplecticOp(op)
    if op.n_modes != state.n_modes:
        raise ValueError(f"operation acts on {op.n_modes} modes, state has {state.n_modes}")
    if not op.is_symplectic(tol):
        raise ValueError("matrix is not symplectic")
    return GaussianState._trusted(op.S @ state.R + op.d, op.S @ state.V @ op.S.T)


def tensor_product(states):
    """Direct sum of the moments of ``states`` in the order given."""
    states = list(states)
    if not states:
        raise ValueError("tensor_product needs at least one state")
    R = np.concatenate([s.R for s in states])
    V = np.zeros((R.size, R.size))
    i = 0
    for s in states:
        k = 2 * s.n_modes
        V[i:i + k, i:i + k] = s.V
        i += k
    return GaussianState._trusted(R, V)


def only_modes(state, keep_modes):
    """Reduced state on ``keep_modes`` (order preserved as given)."""
    keep = _check_modes(keep_modes, state.n_modes)
    if not keep:
        raise ValueError("at least one mode must be kept")
    idx = _quadrature_indices(keep)
    return GaussianState._trusted(state.R[idx], state.V[np.ix_(idx, idx)])


def partial_trace(state, drop_modes):
    """Trace out ``drop_modes``; remaining modes keep their relative order."""
    drop = set(_check_modes(drop_modes, state.n_modes))
    keep = [m for m in range(state.n_modes) if m not in drop]
    if not keep:
        raise ValueError("cannot trace out every mode")
    return only_modes(state, keep)


def loss_ancilla(state, mode, tau):
    """Mix ``mode`` with a vacuum ancilla on a beam splitter of transmission ``tau``,
    then discard the ancilla."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {tau}")
    (mode,) = _check_modes([mode], state.n_modes)
    n = state.n_modes
    joint = tensor_product([state, vacuum(1)])
    joint = beam_splitter(joint, (mode, n), tau)
    return partial_trace(joint, [n])


# ---------------------------------------------------------------------------
# measurements


def dyne_covariance(s, phi):
    """Single-mode general-dyne covariance ``Rot(phi) diag(s, 1/s) Rot(phi)^T``.

    ``s -> 0`` at ``phi = 0`` is homodyne detection of x; ``s = 1`` is heterodyne.
    """
    if s <= 0:
        raise ValueError(f"general-dyne parameter must be positive, got {s}")
    c, sn = np.cos(phi), np.sin(phi)
    rot = np.array([[c, -sn], [sn, c]])
    return rot @ np.diag([s, 1.0 / s]) @ rot.T


@dataclass(frozen=True)
class MeasurementSpec:
    """Which modes are measured and with what general-dyne covariance.

    Build instances with :meth:`general`, :meth:`homodyne` or :meth:`heterodyne`.
    """

    kind: str
    modes: tuple
    V_M: np.ndarray

    @classmethod
    def general(cls, modes, V_M):
        modes = tuple(int(m) for m in np.atleast_1d(modes))
        V_M = np.asarray(V_M, dtype=float)
        if V_M.shape != (2 * len(modes), 2 * len(modes)):
            raise ValueError("V_M must be 2m x 2m for m measured modes")
        if np.max(np.abs(V_M - V_M.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(V_M))):
            raise ValueError("V_M must be symmetric")
        if np.linalg.eigvalsh(0.5 * (V_M + V_M.T))[0] <= 0:
            raise ValueError("V_M must be positive definite")
        return cls("general", modes, _frozen(0.5 * (V_M + V_M.T)))

    @classmethod
    def homodyne(cls, modes, phi=0.0, s=HOMODYNE_S):
        """Homodyne of the quadrature ``x cos(phi) + p sin(phi)``, as the ``s -> 0`` dyne limit."""
        modes = tuple(int(m) for m in np.atleast_1d(modes))
        phis = np.broadcast_to(np.asarray(phi, dtype=float), (len(modes),))
        blocks = [dyne_covariance(s, p) for p in phis]
        return cls("homodyne", modes, _frozen(_block_diag(blocks)))

    @classmethod
    def heterodyne(cls, modes):
        modes = tuple(int(m) for m in np.atleast_1d(modes))
        return cls("heterodyne", modes, _frozen(np.eye(2 * len(modes))))


def _block_diag(blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def measure(state, spec, outcome=None, rng=None):
    """Conditional state after a general-dyne measurement of ``spec.modes``.

    Exactly one of ``outcome`` (the measured quadrature values, length 2m)
    or ``rng`` (a ``numpy.random.Generator`` used to sample one) must be
    given. Returns ``(state of the unmeasured modes, outcome)``.
    """
    if (outcome is None) == (rng is None):
        raise ValueError("provide exactly one of `outcome` or `rng`")
    measured = _check_modes(spec.modes, state.n_modes)
    kept = [m for m in range(state.n_modes) if m not in set(measured)]
    if not kept:
        raise ValueError("cannot measure every mode")
    a = _quadrature_indices(kept)
    b = _quadrature_indices(measured)
    V_A = state.V[np.ix_(a, a)]
    V_B = state.V[np.ix_(b, b)]
    V_AB = state.V[np.ix_(a, b)]
    sigma = V_B + spec.V_M
    sigma = 0.5 * (sigma + sigma.T)
    if np.linalg.eigvalsh(sigma)[0] <= 1e-14 * max(1.0, np.max(np.abs(sigma))):
        raise np.linalg.LinAlgError("V_B + V_M is singular")
    if outcome is None:
        outcome = state.R[b] + psd_factor(sigma) @ rng.standard_normal(b.size)
    outcome = np.asarray(outcome, dtype=float).reshape(-1)
    if outcome.shape != (b.size,):
        raise ValueError(f"outcome must have length {b.size}, got {outcome.size}")
    gain = np.linalg.solve(sigma, V_AB.T).T
    R_A = state.R[a] + gain @ (outcome - state.R[b])
    V_new = V_A - gain @ V_AB.T
    return GaussianState._trusted(R_A, V_new), outcome
