"""Exact simulation of multimode Gaussian quantum states.

States are stored as a mean quadrature vector and a covariance matrix
(hbar = 2, vacuum covariance = identity). See :mod:`symgauss.state`,
:mod:`symgauss.observables`, :mod:`symgauss.dynamics` and
:mod:`symgauss.circuits`.
"""
from ._backend import BACKEND, available_backends
from .circuits import (
    Circuit,
    CircuitParams,
    EnsembleProfile,
    Gate,
    apply_circuit,
    ensemble_profile,
    entropy_profile,
    random_circuit,
)
from .dynamics import (
    DynamicsSpec,
    IntegrationError,
    MonitoringSpec,
    NotHurwitzError,
    StateSeries,
    TrajectoryEnsemble,
    build_generators,
    conditional_dynamics,
    semi_classical,
    steady_state,
    unconditional_dynamics,
)
from .linalg import sqrtm_spd, symplectic_form
from .observables import (
    NumberMoments,
    PhaseSpaceGrid,
    coherence,
    fidelity,
    logarithmic_negativity,
    mutual_information,
    number_moments,
    occupation,
    purity,
    q_function,
    squeezing_degree,
    symplectic_eigenvalues,
    vacuum_probability,
    von_neumann_entropy,
    wigner,
)
from .state import (
    GaussianState,
    MeasurementSpec,
    SymplecticOp,
    UnphysicalStateError,
    apply_symplectic,
    beam_splitter,
    coherent,
    displace,
    loss_ancilla,
    measure,
    only_modes,
    partial_trace,
    rotate,
    squeeze,
    squeezed,
    tensor_product,
    thermal,
    two_mode_squeezed,
    two_mode_squeezing,
    vacuum,
)

__version__ = "0.1.0"
