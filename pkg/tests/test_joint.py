import numpy as np
import pytest

from ionize.joint import build_joint_system, dispersive_shift
from ionize.params import DeviceParams, fitted_device, fitted_transmon


def test_static_hamiltonian_hermitian(joint):
    h = joint.h_static
    assert np.abs(h - h.conj().T).max() < 1e-12


def test_dressed_anchor_frequencies(joint):
    e = joint.dressed_energy
    omega_01 = e(1, 0) - e(0, 0)
    assert omega_01 * 1e3 == pytest.approx(3876.7, abs=1.0)
    assert omega_01 / 3.0 * 1e3 == pytest.approx(1292.3, abs=1.0)
    assert (e(2, 0) - e(0, 0)) / 6.0 * 1e3 == pytest.approx(1267.5, abs=1.0)


def test_dispersive_shift(joint):
    chi = dispersive_shift(joint)
    assert abs(chi) * 1e3 == pytest.approx(0.4, abs=0.1)
    assert chi < 0


def test_decoupled_limit_identity_labels():
    dev = DeviceParams(transmon=fitted_transmon(kept_levels=10),
                       omega_r=6.4043, g=0.0, resonator_cutoff=4)
    system = build_joint_system(dev)
    assert np.allclose(system.label_map.overlaps, 1.0, atol=1e-12)
    assert not system.label_map.ambiguous.any()
    # Dressed energies equal bare sums.
    from ionize.transmon import transmon_eigensystem
    eig = transmon_eigensystem(dev.transmon)
    for i_t in range(5):
        for n_r in range(3):
            assert system.dressed_energy(i_t, n_r) == pytest.approx(
                eig.energies[i_t] + n_r * dev.omega_r, abs=1e-10)


def test_label_map_bijection(joint):
    labels = joint.label_map.labels
    assert len(set(labels)) == len(labels)
    dim = joint.h_static.shape[0]
    assert len(labels) == dim
    assert all(0.0 < o <= 1.0 + 1e-12 for o in joint.label_map.overlaps)


def test_drive_operator_block_structure(joint, tp_eig):
    # Drive acts on the transmon factor only: n_t (x) identity.
    n_r = joint.device.resonator_cutoff
    d = joint.drive_op
    cm = d[::n_r, ::n_r]
    assert np.abs(d - np.kron(cm, np.eye(n_r))).max() < 1e-12
    assert np.abs(cm - cm.conj().T).max() < 1e-10


def test_dressed_states_orthonormal(joint):
    gram = joint.modes.conj().T @ joint.modes
    assert np.abs(gram - np.eye(gram.shape[0])).max() < 1e-8
