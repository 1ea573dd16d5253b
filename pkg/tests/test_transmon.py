import numpy as np
import pytest

from ionize.params import ParameterError, TransmonParams, fitted_transmon
from ionize.transmon import (
    build_transmon_hamiltonian,
    charge_dispersion,
    effective_harmonics_from_series_inductance,
    josephson_potential,
    nn_resonance_detunings,
    potential_well_level_count,
    potential_well_top,
    transmon_eigensystem,
)


def spectrum(tp):
    return transmon_eigensystem(tp).energies


def test_hamiltonian_hermitian(tp):
    h = build_transmon_hamiltonian(tp)
    assert np.abs(h - h.conj().T).max() < 1e-12


def test_harmonic_order_exceeding_cutoff_rejected():
    with pytest.raises(ParameterError):
        build_transmon_hamiltonian(
            TransmonParams(e_c=0.15, e_j=(14.0, 0.0, 0.0, 1.0), n_g=0.0,
                           charge_cutoff=1, kept_levels=2))


def test_single_harmonic_plasma_frequency():
    # Deep-well level spacing approaches sqrt(8 e_c e_j).
    tp = TransmonParams(e_c=0.05, e_j=(50.0,), n_g=0.0)
    eig = transmon_eigensystem(tp)
    omega_p = np.sqrt(8.0 * 0.05 * 50.0)
    assert eig.transition(0, 1) == pytest.approx(omega_p, rel=0.02)


def test_ng_periodicity_and_symmetry(tp):
    e_pos = spectrum(tp.with_ng(0.3))
    assert np.abs(e_pos - spectrum(tp.with_ng(-0.3))).max() < 1e-10
    assert np.abs(e_pos - spectrum(tp.with_ng(1.3))).max() < 1e-10


def test_eigensystem_contract(tp_eig):
    assert np.all(np.diff(tp_eig.energies) >= -1e-12)
    gram = tp_eig.modes.conj().T @ tp_eig.modes
    assert np.abs(gram - np.eye(gram.shape[0])).max() < 1e-10
    cm = tp_eig.charge_matrix
    assert np.abs(cm - cm.conj().T).max() < 1e-10
    assert list(tp_eig.labels) == list(range(30))


def test_cutoff_convergence(tp):
    e40 = spectrum(tp)
    e80 = spectrum(TransmonParams(e_c=tp.e_c, e_j=tp.e_j, n_g=tp.n_g,
                                  charge_cutoff=80, kept_levels=30))
    assert np.abs(e40 - e80).max() < 1e-8


def test_charge_matrix_structure_vs_doubled_cutoff(tp, tp_eig):
    # Oracle: recompute at doubled cutoff; low-level structure must agree.
    big = transmon_eigensystem(
        TransmonParams(e_c=tp.e_c, e_j=tp.e_j, n_g=tp.n_g,
                       charge_cutoff=80, kept_levels=30))
    small = np.abs(tp_eig.charge_matrix[:10, :10])
    assert np.abs(small - np.abs(big.charge_matrix[:10, :10])).max() < 1e-8
    assert small[0, 2] / small[0, 1] < 0.1  # nearest-neighbor dominance


def test_well_level_count_fitted(tp):
    for ng in (0.0, 0.25, 0.5):
        assert potential_well_level_count(tp.with_ng(ng)) == 9


def test_well_level_count_deep_well():
    tp = TransmonParams(e_c=0.01, e_j=(100.0,), n_g=0.0,
                        charge_cutoff=120, kept_levels=150)
    count = potential_well_level_count(tp)
    assert count > 50
    # Oracle: direct count below the potential top from the same spectrum.
    top = potential_well_top(tp.e_j)
    oracle = int(np.sum(transmon_eigensystem(tp).energies < top))
    assert count == oracle


def test_well_count_vanishing_junction():
    # Free-rotor limit: no excited level is bound.  The ground state sits
    # ~e_j^2 below the well top (height e_j) for any e_j > 0, so the count
    # is 1 rather than the strict-limit value 0.
    tp = TransmonParams(e_c=0.2, e_j=(1e-9,), n_g=0.0)
    assert potential_well_level_count(tp) <= 1


def test_well_top_matches_potential_scan(tp):
    phi = np.linspace(-np.pi, np.pi, 200001)
    oracle = josephson_potential(tp.e_j, phi).max()
    assert potential_well_top(tp.e_j) == pytest.approx(oracle, abs=1e-9)


def test_charge_dispersion(tp):
    grid = np.linspace(0.0, 0.5, 51)
    d0 = charge_dispersion(tp, 0, grid)
    assert d0 < 1e-6
    # Monotone growth near and above the well top.
    disp = [charge_dispersion(tp, i, grid) for i in range(8, 13)]
    assert all(b > a for a, b in zip(disp, disp[1:]))
    # Mirror grid gives the same dispersion.
    d9 = charge_dispersion(tp, 9, grid)
    assert charge_dispersion(tp, 9, 1.0 - grid) == pytest.approx(d9, rel=1e-9)


def test_charge_dispersion_small_grid_rejected(tp):
    with pytest.raises(ParameterError):
        charge_dispersion(tp, 0, [0.0, 0.5])


def test_nn_detunings_definition(tp, tp_eig):
    omega_d = tp_eig.transition(0, 1)
    levels, det, widths = nn_resonance_detunings(tp, omega_d, 0.0,
                                                 max_level=12)
    assert det[1] == pytest.approx(0.0, abs=1e-12)
    assert len(widths) == len(det) == len(levels) == 13
    # Consistency with direct spectrum differences at n_g = 0.25.
    _, det25, _ = nn_resonance_detunings(tp, 1.4, 0.25, max_level=12)
    eig25 = transmon_eigensystem(tp.with_ng(0.25))
    for i in range(1, 12):
        assert det25[i] == pytest.approx(
            eig25.transition(0, i) - i * 1.4, abs=1e-12)


def test_nn_no_below_top_crossings(tp):
    # No (n:n) resonance below the well top for omega_d in [1, 2] GHz.
    top_count = potential_well_level_count(tp)
    for omega_d in np.linspace(1.0, 2.0, 21):
        _, det, _ = nn_resonance_detunings(tp, float(omega_d), 0.0,
                                           max_level=top_count - 1)
        signs = np.sign(det[2:top_count])
        assert np.all(signs == signs[0])


def test_series_inductance_limits():
    harmonics = effective_harmonics_from_series_inductance(14.0, 14000.0)
    assert harmonics[0] == pytest.approx(14.0, rel=1e-3)
    assert np.abs(harmonics[1:]).max() < 0.02


def test_series_inductance_hierarchy():
    e_j = 14.0
    harmonics = effective_harmonics_from_series_inductance(e_j, e_j / 0.1)
    assert harmonics[1] < 0
    assert abs(harmonics[1]) > abs(harmonics[2]) > abs(harmonics[3])


def test_series_inductance_perturbative_oracle():
    # Independent oracle: solve the current-conservation condition with
    # scipy's scalar root finder per grid point, then integrate Fourier
    # coefficients of the effective potential by quadrature.
    from scipy.optimize import brentq

    e_j, e_l = 14.0, 140.0
    phi = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)

    def phi_l(p):
        return brentq(lambda x: e_l * x - e_j * np.sin(p - x), -2.0, 2.0,
                      xtol=1e-14)

    pl = np.array([phi_l(p) for p in phi])
    u = -e_j * np.cos(phi - pl) + 0.5 * e_l * pl**2
    coeffs = [-np.mean(u * np.cos(m * phi)) * 2.0 for m in (1, 2, 3, 4)]
    harmonics = effective_harmonics_from_series_inductance(e_j, e_l)
    assert np.allclose(harmonics, coeffs, atol=1e-8)


def test_series_inductance_non_contraction_rejected():
    with pytest.raises(ParameterError):
        effective_harmonics_from_series_inductance(14.0, 14.0)
