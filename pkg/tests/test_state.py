import json

import numpy as np
import pytest

import symgauss as sg
from symgauss.state import (
    GaussianState,
    MeasurementSpec,
    SymplecticOp,
    UnphysicalStateError,
    beam_splitter_matrix,
    dyne_covariance,
    is_symplectic,
    rotation_matrix,
    squeeze_matrix,
    two_mode_squeezing_matrix,
)

from fock_oracle import FockSpace, TruncatedModes


# constructors


def test_vacuum():
    v = sg.vacuum(3)
    np.testing.assert_array_equal(v.R, np.zeros(6))
    np.testing.assert_array_equal(v.V, np.eye(6))
    with pytest.raises(ValueError):
        sg.vacuum(0)


def test_coherent_and_thermal():
    np.testing.assert_array_equal(sg.coherent(2).R, [4, 0])
    np.testing.assert_array_equal(sg.coherent(1 - 2j).R, [2, -4])
    np.testing.assert_array_equal(sg.thermal(1).V, 3 * np.eye(2))
    assert sg.thermal(0).isclose(sg.vacuum())
    with pytest.raises(ValueError):
        sg.thermal(-0.1)


def test_squeezed_state():
    np.testing.assert_allclose(sg.squeezed(1.2).V, np.diag([np.exp(-2.4), np.exp(2.4)]), rtol=1e-14)
    assert sg.squeezed(0.0, 0.7).isclose(sg.vacuum())


def test_two_mode_squeezed():
    r = 0.3
    Z = np.diag([1.0, -1.0])
    expected = np.block([[np.cosh(2 * r) * np.eye(2), np.sinh(2 * r) * Z], [np.sinh(2 * r) * Z, np.cosh(2 * r) * np.eye(2)]])
    np.testing.assert_allclose(sg.two_mode_squeezed(r).V, expected, atol=1e-14)


def test_rejects_bad_moments():
    with pytest.raises(ValueError):
        GaussianState([0, 0], [[1, 0.1], [0, 1]])
    with pytest.raises(ValueError):
        GaussianState([0, 0, 0], np.eye(3))
    with pytest.raises(ValueError):
        GaussianState([np.nan, 0], np.eye(2))
    with pytest.raises(UnphysicalStateError):
        GaussianState([0, 0], 0.5 * np.eye(2))
    # squeezed below the vacuum in both quadratures is unphysical, but allowed with the check off
    s = GaussianState([0, 0], 0.5 * np.eye(2), physical_tol=None)
    assert not s.is_physical()


def test_state_arrays_are_read_only():
    s = sg.coherent(1)
    with pytest.raises(ValueError):
        s.R[0] = 3.0


# gates


@pytest.mark.parametrize(
    "S",
    [rotation_matrix(0.3), squeeze_matrix(0.7, 1.1), beam_splitter_matrix(0.37), two_mode_squeezing_matrix(0.9)],
)
def test_builtin_gates_are_symplectic(S):
    assert is_symplectic(S)
    assert np.linalg.det(S) == pytest.approx(1.0, abs=1e-12)


def test_displace_examples():
    assert sg.displace(sg.vacuum(), 0, 2).isclose(sg.coherent(2))
    s = sg.thermal(1)
    assert sg.displace(sg.displace(s, 0, 0.3 + 1j), 0, -0.3 - 1j).isclose(s)
    d = sg.displace(sg.thermal(1), 0, 1)
    np.testing.assert_array_equal(d.R, [2, 0])
    np.testing.assert_array_equal(d.V, 3 * np.eye(2))


def test_rotate_examples():
    np.testing.assert_allclose(sg.rotate(sg.coherent(2), 0, np.pi / 2).R, [0, -4], atol=1e-14)
    th = sg.thermal(2)
    assert sg.rotate(th, 0, 1.234).isclose(th)
    s = sg.squeezed(0.4)
    assert sg.rotate(s, 0, 0).isclose(s)


def test_squeeze_examples():
    r = 0.35
    np.testing.assert_allclose(sg.squeeze(sg.vacuum(), 0, r).V, np.diag([np.exp(-2 * r), np.exp(2 * r)]))
    s = sg.coherent(1 + 1j)
    assert sg.squeeze(s, 0, 0.0, 1.3).isclose(s)
    assert sg.squeeze(sg.squeeze(sg.vacuum(), 0, r), 0, -r).isclose(sg.vacuum(), atol=1e-14)


def test_beam_splitter_examples():
    s = sg.tensor_product([sg.coherent(2), sg.vacuum()])
    out = sg.beam_splitter(s, (0, 1), 0.5)
    np.testing.assert_allclose(out.R, [2 * np.sqrt(2), 0, -2 * np.sqrt(2), 0], atol=1e-14)
    assert sg.beam_splitter(s, (0, 1), 1.0).isclose(s)
    with pytest.raises(ValueError):
        sg.beam_splitter(s, (0, 0), 0.5)
    with pytest.raises(IndexError):
        sg.beam_splitter(s, (0, 2), 0.5)
    with pytest.raises(ValueError):
        sg.beam_splitter(s, (0, 1), 1.5)


def test_two_mode_squeezing_identity_at_zero():
    assert sg.two_mode_squeezing(sg.vacuum(2), (0, 1), 0.0).isclose(sg.vacuum(2))


def test_gates_on_non_adjacent_modes_match_embedding():
    s = sg.tensor_product([sg.thermal(0.5), sg.coherent(1j), sg.squeezed(0.3, 0.2)])
    out = sg.beam_splitter(s, (2, 0), 0.3)
    op = SymplecticOp.embed(beam_splitter_matrix(0.3), (2, 0), 3)
    assert out.isclose(sg.apply_symplectic(s, op), atol=1e-13)


def test_gate_conventions_match_fock_oracle():
    """Moments of each gate against generators exp(-i theta n), exp((xi* a^2 - xi a^dag^2)/2), ..."""
    c = 30
    F1, T1 = FockSpace(1, c), TruncatedModes(1, c)
    psi = F1.displace(F1.vacuum(), 0, 0.5 - 0.2j)
    base = sg.coherent(0.5 - 0.2j)
    cases = [
        (F1.rotate(psi, 0, 0.7), sg.rotate(base, 0, 0.7)),
        (F1.squeeze(psi, 0, 0.4), sg.squeeze(base, 0, 0.4)),
        (F1.squeeze(psi, 0, 0.4, 0.9), sg.squeeze(base, 0, 0.4, 0.9)),
    ]
    for vec, state in cases:
        R, V = T1.moments(F1.truncate(vec))
        np.testing.assert_allclose(R, state.R, atol=1e-9)
        np.testing.assert_allclose(V, state.V, atol=1e-9)

    F2, T2 = FockSpace(2, c), TruncatedModes(2, c)
    psi2 = F2.displace(F2.displace(F2.vacuum(), 0, 0.6), 1, -0.3j)
    base2 = sg.tensor_product([sg.coherent(0.6), sg.coherent(-0.3j)])
    cases = [
        (F2.beam_splitter(psi2, 0, 1, 0.3), sg.beam_splitter(base2, (0, 1), 0.3)),
        (F2.two_mode_squeeze(psi2, 0, 1, 0.3), sg.two_mode_squeezing(base2, (0, 1), 0.3)),
    ]
    for vec, state in cases:
        R, V = T2.moments(F2.truncate(vec))
        np.testing.assert_allclose(R, state.R, atol=1e-9)
        np.testing.assert_allclose(V, state.V, atol=1e-9)


def test_apply_symplectic_and_compose():
    s = sg.tensor_product([sg.coherent(1 + 0.5j), sg.thermal(0.3)])
    S1 = SymplecticOp.embed(rotation_matrix(0.4), [0], 2, d_local=[0.1, -0.2])
    S2 = SymplecticOp(two_mode_squeezing_matrix(0.2), np.array([0.0, 1.0, 0.0, 0.0]))
    assert sg.apply_symplectic(s, SymplecticOp.identity(2)).isclose(s)
    seq = sg.apply_symplectic(sg.apply_symplectic(s, S1), S2)
    assert sg.apply_symplectic(s, S2 @ S1).isclose(seq, atol=1e-13)
    rot = SymplecticOp.embed(rotation_matrix(0.4), [0], 2)
    assert sg.apply_symplectic(s, rot).isclose(sg.rotate(s, 0, 0.4), atol=1e-14)


def test_apply_symplectic_errors():
    s = sg.vacuum(2)
    with pytest.raises(ValueError):
        sg.apply_symplectic(s, SymplecticOp(np.diag([2.0, 1.0, 1.0, 1.0])))
    with pytest.raises(ValueError):
        sg.apply_symplectic(s, SymplecticOp.identity(1))


# composition and reduction


def test_tensor_product_and_partial_trace():
    c, t = sg.coherent(2), sg.thermal(1)
    joint = sg.tensor_product([c, t])
    np.testing.assert_array_equal(joint.R, [4, 0, 0, 0])
    np.testing.assert_array_equal(joint.V, np.diag([1, 1, 3, 3]))
    assert sg.partial_trace(joint, [1]).isclose(c)
    assert sg.only_modes(joint, [1]).isclose(t)
    assert sg.tensor_product([sg.vacuum(), sg.vacuum()]).isclose(sg.vacuum(2))
    with pytest.raises(ValueError):
        sg.tensor_product([])
    with pytest.raises(ValueError):
        sg.partial_trace(joint, [0, 1])


def test_only_modes_examples():
    assert sg.only_modes(sg.vacuum(3), [0, 2]).isclose(sg.vacuum(2))
    s = sg.two_mode_squeezed(0.5)
    assert sg.only_modes(s, [0, 1]).isclose(s)
    r = 0.5
    assert sg.only_modes(s, [0]).isclose(sg.thermal(np.sinh(r) ** 2), atol=1e-13)
    assert sg.partial_trace(s, [1]).isclose(sg.only_modes(s, [0]))


def test_loss_ancilla_examples():
    a, tau = 1.0 + 0.5j, 0.3
    s = sg.coherent(a)
    assert sg.loss_ancilla(s, 0, 1.0).isclose(s)
    assert sg.loss_ancilla(s, 0, tau).isclose(sg.coherent(np.sqrt(tau) * a), atol=1e-14)
    assert sg.loss_ancilla(sg.thermal(2.0), 0, tau).isclose(sg.thermal(tau * 2.0), atol=1e-14)
    with pytest.raises(ValueError):
        sg.loss_ancilla(s, 0, -0.1)


# measurement


def test_dyne_covariance_orientation():
    np.testing.assert_allclose(dyne_covariance(1e-3, 0.0), np.diag([1e-3, 1e3]))
    np.testing.assert_allclose(dyne_covariance(1e-3, np.pi / 2), np.diag([1e3, 1e-3]), atol=1e-9)


def test_heterodyne_on_product_state_leaves_other_mode():
    s = sg.tensor_product([sg.squeezed(0.3), sg.thermal(1)])
    out, m = sg.measure(s, MeasurementSpec.heterodyne([1]), rng=np.random.default_rng(0))
    assert out.isclose(sg.squeezed(0.3))
    assert m.shape == (2,)


def test_homodyne_on_tms_schur_complement():
    r, s_param = 0.6, 1e-8
    out, _ = sg.measure(sg.two_mode_squeezed(r), MeasurementSpec.homodyne([1], phi=0.0), outcome=[0.0, 0.0])
    c, sh = np.cosh(2 * r), np.sinh(2 * r)
    assert out.V[0, 0] == pytest.approx(c - sh ** 2 / (c + s_param), rel=1e-12)
    assert out.V[0, 0] == pytest.approx(1 / c, rel=1e-6)


def test_measurement_update_is_outcome_independent_for_V():
    s = sg.beam_splitter(sg.tensor_product([sg.squeezed(0.5), sg.thermal(0.4)]), (0, 1), 0.6)
    spec = MeasurementSpec.general([1], dyne_covariance(0.3, 0.4))
    a, _ = sg.measure(s, spec, outcome=[0.0, 0.0])
    b, _ = sg.measure(s, spec, outcome=[1.5, -2.0])
    np.testing.assert_array_equal(a.V, b.V)
    assert not np.allclose(a.R, b.R)


def test_measurement_mean_update_matches_conditioning():
    # direct Gaussian conditioning of the joint (system, outcome) distribution
    s = sg.beam_splitter(sg.tensor_product([sg.coherent(1), sg.squeezed(0.4)]), (0, 1), 0.7)
    V_M = dyne_covariance(0.5, 0.2)
    out, m = sg.measure(s, MeasurementSpec.general([1], V_M), outcome=[0.3, -0.1])
    V = s.V
    joint = V.copy()
    joint[2:, 2:] += V_M
    cond_mean = s.R[:2] + V[:2, 2:] @ np.linalg.inv(joint[2:, 2:]) @ (np.array([0.3, -0.1]) - s.R[2:])
    np.testing.assert_allclose(out.R, cond_mean, atol=1e-12)


def test_measurement_sampler_covariance():
    rng = np.random.default_rng(11)
    s = sg.tensor_product([sg.vacuum(), sg.thermal(1)])
    spec = MeasurementSpec.heterodyne([1])
    draws = np.array([sg.measure(s, spec, rng=rng)[1] for _ in range(20000)])
    np.testing.assert_allclose(np.cov(draws, rowvar=False), 4 * np.eye(2), atol=0.2)


def test_measurement_reproducible_and_errors():
    s = sg.two_mode_squeezed(0.3)
    spec = MeasurementSpec.heterodyne([0])
    a = sg.measure(s, spec, rng=np.random.default_rng(5))
    b = sg.measure(s, spec, rng=np.random.default_rng(5))
    np.testing.assert_array_equal(a[1], b[1])
    with pytest.raises(ValueError):
        sg.measure(s, spec)
    with pytest.raises(ValueError):
        sg.measure(s, spec, outcome=[0, 0], rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        sg.measure(s, MeasurementSpec.heterodyne([0, 1]), outcome=[0, 0, 0, 0])
    with pytest.raises(ValueError):
        sg.measure(s, spec, outcome=[0, 0, 0])
    with pytest.raises(ValueError):
        MeasurementSpec.general([0], -np.eye(2))


# serialization


def test_json_round_trip_is_bitwise():
    s = sg.rotate(sg.squeeze(sg.two_mode_squeezed(0.37), 1, 0.21, 0.3), 0, 1 / 3)
    text = s.to_json()
    back = GaussianState.from_json(text)
    np.testing.assert_array_equal(back.R, s.R)
    np.testing.assert_array_equal(back.V, s.V)
    doc = json.loads(text)
    assert doc["n_modes"] == 2
    with pytest.raises(ValueError):
        GaussianState.from_dict({"n_modes": 3, "R": doc["R"], "V": doc["V"]})


def test_fluent_methods_match_functions():
    s = sg.vacuum(2)
    a = s.squeeze(0, 0.2).beam_splitter((0, 1), 0.4).rotate(1, 0.3).displace(0, 0.5)
    b = sg.displace(sg.rotate(sg.beam_splitter(sg.squeeze(s, 0, 0.2), (0, 1), 0.4), 1, 0.3), 0, 0.5)
    assert a.isclose(b, atol=0)
