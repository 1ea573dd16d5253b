"""Transmon Hamiltonian in the charge basis and spectral diagnostics.

The charge basis spans n = -N_c .. N_c.  The kinetic term is diagonal,
4 E_C (n - n_g)^2, and each cos(m phi) harmonic contributes 1/2 on the
m-th off-diagonals.  All energies are ordinary frequencies in GHz.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ParameterError, TransmonParams


class DiagonalizationError(RuntimeError):
    """Eigensolver failure, carrying basic condition diagnostics."""


@dataclass(frozen=True)
class EigenSystem:
    """Retained transmon eigensystem.

    energies: ascending eigenvalues, GHz (raw, no ground-state subtraction).
    modes: columns are eigenvectors in the charge basis.
    charge_matrix: n-hat in the retained eigenbasis.
    labels: transmon indices 0 .. kept_levels-1.
    """

    energies: np.ndarray
    modes: np.ndarray
    charge_matrix: np.ndarray
    labels: np.ndarray

    @property
    def kept_levels(self) -> int:
        return len(self.energies)

    def transition(self, i: int, j: int) -> float:
        """Transition frequency omega_ij / 2pi in GHz."""
        return float(self.energies[j] - self.energies[i])


def charge_operator(charge_cutoff: int) -> np.ndarray:
    """Diagonal n-hat on the charge basis."""
    return np.diag(np.arange(-charge_cutoff, charge_cutoff + 1, dtype=float))


def cosine_operator(charge_cutoff: int, m: int) -> np.ndarray:
    """cos(m phi) on the charge basis: 1/2 at |n><n +/- m|."""
    dim = 2 * charge_cutoff + 1
    if m > 2 * charge_cutoff:
        raise ParameterError(f"harmonic order {m} exceeds charge basis span")
    return 0.5 * (np.eye(dim, k=m) + np.eye(dim, k=-m))


def build_transmon_hamiltonian(params: TransmonParams) -> np.ndarray:
    """H = 4 e_c (n - n_g)^2 - sum_m e_j[m] cos(m phi), in GHz."""
    n = np.arange(-params.charge_cutoff, params.charge_cutoff + 1, dtype=float)
    h = np.diag(4.0 * params.e_c * (n - params.n_g) ** 2)
    for m, ej in enumerate(params.e_j, start=1):
        h -= ej * cosine_operator(params.charge_cutoff, m)
    return h


def transmon_eigensystem(params: TransmonParams) -> EigenSystem:
    """Diagonalize and retain the lowest kept_levels eigenstates."""
    h = build_transmon_hamiltonian(params)
    try:
        energies, modes = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        scale = np.abs(h).max()
        raise DiagonalizationError(
            f"charge-basis diagonalization failed (dim={h.shape[0]}, "
            f"max element {scale:.3e})"
        ) from exc
    k = params.kept_levels
    energies = energies[:k]
    modes = modes[:, :k]
    n_op = np.arange(-params.charge_cutoff, params.charge_cutoff + 1, dtype=float)
    charge_matrix = modes.T.conj() @ (n_op[:, None] * modes)
    return EigenSystem(
        energies=energies,
        modes=modes,
        charge_matrix=charge_matrix,
        labels=np.arange(k),
    )


def josephson_potential(e_j, phi) -> np.ndarray:
    """V(phi) = -sum_m e_j[m] cos(m phi)."""
    phi = np.asarray(phi, dtype=float)
    v = np.zeros_like(phi)
    for m, ej in enumerate(e_j, start=1):
        v -= ej * np.cos(m * phi)
    return v


def potential_well_top(e_j, scan_points: int = 4001) -> float:
    """Maximum of the Josephson potential over phi in [-pi, pi).

    Dense scan followed by local parabolic refinement; the potential and
    the Hamiltonian eigenvalues share the same energy zero.
    """
    phi = np.linspace(-np.pi, np.pi, scan_points, endpoint=False)
    v = josephson_potential(e_j, phi)
    k = int(np.argmax(v))
    # Parabolic refinement around the discrete maximum.
    h = phi[1] - phi[0]
    vm, v0, vp = v[k - 1], v[k], v[(k + 1) % scan_points]
    denom = vm - 2 * v0 + vp
    if denom < 0:
        delta = 0.5 * (vm - vp) / denom * h
        phi_star = phi[k] + delta
        return float(josephson_potential(e_j, phi_star))
    return float(v0)


def potential_well_level_count(params: TransmonParams) -> int:
    """Number of eigenstates with energy below the potential maximum."""
    eig = transmon_eigensystem(params)
    top = potential_well_top(params.e_j)
    return int(np.count_nonzero(eig.energies < top))


def charge_dispersion(params: TransmonParams, level: int, n_g_grid) -> float:
    """Peak-to-peak swing of E_level over the offset-charge grid, GHz."""
    n_g_grid = np.asarray(n_g_grid, dtype=float)
    if n_g_grid.size < 3:
        raise ParameterError("n_g grid needs at least 3 points")
    energies = np.empty(n_g_grid.size)
    for i, ng in enumerate(n_g_grid):
        eig = transmon_eigensystem(params.with_ng(ng))
        energies[i] = eig.energies[level]
    return float(energies.max() - energies.min())


def nn_resonance_detunings(params: TransmonParams, omega_d: float,
                           n_g: float, max_level: int,
                           dispersion_grid=None):
    """Detunings D_i = omega_{0,i}/2pi - i*omega_d with dispersion widths.

    A sign change of D_i flags an (n:n) multiphoton resonance candidate
    where absorbing i drive photons climbs i transmon levels.
    """
    if max_level > params.kept_levels:
        raise ParameterError("max_level exceeds kept_levels")
    eig = transmon_eigensystem(params.with_ng(n_g))
    levels = np.arange(max_level + 1)
    detunings = (eig.energies[: max_level + 1] - eig.energies[0]) - levels * omega_d
    if dispersion_grid is None:
        dispersion_grid = np.linspace(0.0, 0.5, 11)
    widths = np.array(
        [charge_dispersion(params, int(i), dispersion_grid) for i in levels]
    )
    return levels, detunings, widths


def effective_harmonics_from_series_inductance(
    e_j: float, e_l: float, grid_points: int = 4096, tol: float = 1e-12,
    max_iter: int = 10000,
) -> np.ndarray:
    """Four effective harmonic energies of a junction with series inductance.

    Solves the current-conservation condition E_L phi_L = E_J sin(phi - phi_L)
    by fixed-point iteration on a dense phi grid, forms the effective
    potential U(phi) = -E_J cos(phi - phi_L) + (E_L/2) phi_L^2, and returns
    its first four Fourier cosine coefficients with the sign convention of
    the -sum_m e_j[m] cos(m phi) expansion.
    """
    if e_j <= 0 or e_l <= 0:
        raise ParameterError("e_j and e_l must be positive")
    r = e_j / e_l
    if r >= 1:
        raise ParameterError(
            "e_j/e_l >= 1: current-conservation admits multiple solutions"
        )
    phi = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    phi_l = np.zeros_like(phi)
    for _ in range(max_iter):
        nxt = r * np.sin(phi - phi_l)
        if np.abs(nxt - phi_l).max() < tol:
            phi_l = nxt
            break
        phi_l = nxt
    else:
        raise RuntimeError("fixed-point iteration did not converge")
    u = -e_j * np.cos(phi - phi_l) + 0.5 * e_l * phi_l**2
    # Fourier analysis on the uniform grid; odd components must vanish.
    coeffs = np.fft.rfft(u) / grid_points
    sine_leak = np.abs(coeffs.imag[1:5]).max()
    if sine_leak > 1e-10:
        raise RuntimeError(f"effective potential has odd components ({sine_leak:.2e})")
    # u(phi) = a0 + sum_m 2*Re(c_m) cos(m phi) = const - sum_m e_eff[m] cos(m phi)
    return -2.0 * coeffs.real[1:5]
