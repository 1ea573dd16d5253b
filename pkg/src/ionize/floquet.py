"""Floquet analysis of the constant-amplitude driven transmon.

The one-period propagator is built in the transmon eigenbasis by a
fourth-order commutator-free Magnus scheme (two matrix exponentials per
time slice, Gauss-point sampling of the drive).  Quasienergies and modes
come from its Schur decomposition, branches are tracked versus drive
amplitude by optimal bipartite assignment of mode overlaps, and average
populations are gate-charge averaged label-wise.  The resonator is
deliberately absent here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur
from scipy.optimize import linear_sum_assignment

from .params import ParameterError, TransmonParams
from .transmon import transmon_eigensystem

TWO_PI = 2.0 * np.pi

# Gauss nodes and exponent weights of the 4th-order commutator-free scheme.
_C1 = 0.5 - np.sqrt(3.0) / 6.0
_C2 = 0.5 + np.sqrt(3.0) / 6.0
_A1 = 0.25 - np.sqrt(3.0) / 6.0
_A2 = 0.25 + np.sqrt(3.0) / 6.0


class PropagatorError(RuntimeError):
    """Slice-count ceiling reached before convergence."""


@dataclass(frozen=True)
class FloquetSpectrum:
    """Quasienergies folded into (-omega_d/2, omega_d/2] and modes at t=0."""

    quasienergies: np.ndarray
    modes: np.ndarray
    omega_d: float
    unitarity_deviation: float
    degenerate: bool


@dataclass(frozen=True)
class FloquetBranchSet:
    """Branches tracked versus drive amplitude at fixed (omega_d, n_g)."""

    eps_d_grid: np.ndarray
    labels: np.ndarray
    quasienergies: np.ndarray          # (branches, amplitudes), folded
    quasienergies_unwrapped: np.ndarray
    populations: np.ndarray            # (branches, amplitudes)
    modes: np.ndarray                  # (amplitudes, dim, branches)
    continuity_warnings: np.ndarray    # True where best overlap^2 < 0.1
    omega_d: float
    n_g: float


@dataclass(frozen=True)
class AveragedPopulations:
    """Label-wise gate-charge average of branch populations."""

    eps_d_grid: np.ndarray
    labels: np.ndarray
    populations: np.ndarray            # (branches, amplitudes)
    n_g_grid: tuple
    omega_d: float
    per_ng: tuple = field(repr=False, default=())


def _fold(values, omega_d):
    """Fold into the quasienergy Brillouin zone (-omega_d/2, omega_d/2]."""
    folded = np.mod(np.asarray(values) + omega_d / 2.0, omega_d) - omega_d / 2.0
    return np.where(folded <= -omega_d / 2.0, folded + omega_d, folded)


def _cf4_propagators(energies, charge_matrix, omega_d, eps_values,
                     n_slices) -> np.ndarray:
    """One-period propagators for a stack of drive amplitudes.

    The Hamiltonian slice exponentials are evaluated by stacked Hermitian
    diagonalization; both exponents of each slice share the structure
    H0/2 + w * eps * n_hat with scalar Gauss weights w.
    """
    eps_values = np.atleast_1d(np.asarray(eps_values, dtype=float))
    dim = len(energies)
    period = 1.0 / omega_d
    h = period / n_slices
    t0 = np.arange(n_slices) * h
    s1 = np.sin(TWO_PI * omega_d * (t0 + _C1 * h))
    s2 = np.sin(TWO_PI * omega_d * (t0 + _C2 * h))
    # First (rightmost) exponent leans on the later Gauss node.
    w_first = _A2 * s1 + _A1 * s2
    w_second = _A1 * s1 + _A2 * s2

    h0_half = 0.5 * np.diag(energies)
    u = np.broadcast_to(np.eye(dim, dtype=complex),
                        (len(eps_values), dim, dim)).copy()
    for j in range(n_slices):
        for w in (w_first[j], w_second[j]):
            ham = h0_half[None, :, :] + (eps_values * w)[:, None, None] \
                * charge_matrix[None, :, :]
            evals, evecs = np.linalg.eigh(ham)
            phase = np.exp(-1j * TWO_PI * evals * h)
            u = (evecs * phase[:, None, :]) @ np.conj(
                np.swapaxes(evecs, -1, -2)) @ u
    return u


def one_period_propagator(params: TransmonParams, omega_d: float,
                          eps_d: float, tol: float = 1e-9,
                          start_slices: int = 64,
                          max_slices: int = 1 << 20) -> np.ndarray:
    """U(T, 0) at constant drive amplitude, converged by slice doubling.

    Doubles the slice count until the maximal elementwise change between
    consecutive refinements drops below tol.
    """
    if omega_d <= 0:
        raise ParameterError("omega_d must be positive")
    eig = transmon_eigensystem(params)
    n_slices = start_slices
    prev = _cf4_propagators(eig.energies, eig.charge_matrix, omega_d,
                            eps_d, n_slices)[0]
    while n_slices <= max_slices:
        n_slices *= 2
        cur = _cf4_propagators(eig.energies, eig.charge_matrix, omega_d,
                               eps_d, n_slices)[0]
        change = np.abs(cur - prev).max()
        prev = cur
        if change < tol:
            dim = cur.shape[0]
            deviation = np.abs(cur.conj().T @ cur - np.eye(dim)).max()
            if deviation > 1e-8:
                raise PropagatorError(
                    f"unitarity deviation {deviation:.2e} exceeds 1e-8")
            return cur
    raise PropagatorError(
        f"slice ceiling {max_slices} reached, last change {change:.2e}")


def floquet_spectrum(u: np.ndarray, omega_d: float,
                     degeneracy_tol: float = 1e-12) -> FloquetSpectrum:
    """Quasienergies and orthonormal Floquet modes of a one-period unitary.

    Eigenvalues exp(-i 2 pi eps T) give eps = -arg/(2 pi T), folded into
    (-omega_d/2, omega_d/2].  The Schur basis keeps the modes orthonormal
    even near degeneracies.
    """
    dim = u.shape[0]
    deviation = float(np.abs(u.conj().T @ u - np.eye(dim)).max())
    t_mat, z = schur(u, output="complex")
    eigvals = np.diag(t_mat)
    period = 1.0 / omega_d
    quasi = _fold(-np.angle(eigvals) / (TWO_PI * period), omega_d)
    sorted_vals = np.sort(eigvals)
    degenerate = bool(np.any(np.abs(np.diff(sorted_vals)) < degeneracy_tol))
    return FloquetSpectrum(
        quasienergies=quasi,
        modes=z,
        omega_d=omega_d,
        unitarity_deviation=deviation,
        degenerate=degenerate,
    )


def calibrate_slices(params: TransmonParams, omega_d: float, eps_d: float,
                     tol: float = 1e-6, start_slices: int = 32,
                     max_slices: int = 1 << 16) -> int:
    """Slice count whose refinement error at eps_d is below tol."""
    eig = transmon_eigensystem(params)
    n_slices = start_slices
    prev = _cf4_propagators(eig.energies, eig.charge_matrix, omega_d,
                            eps_d, n_slices)[0]
    while n_slices <= max_slices:
        n_slices *= 2
        cur = _cf4_propagators(eig.energies, eig.charge_matrix, omega_d,
                               eps_d, n_slices)[0]
        if np.abs(cur - prev).max() < tol:
            return n_slices
        prev = cur
    raise PropagatorError(f"no convergence below {tol} within {max_slices}")


def track_branches(params: TransmonParams, omega_d: float, eps_d_max: float,
                   step: float = 0.010, tracked_levels: int | None = None,
                   propagator_tol: float = 1e-6,
                   batch: int = 128) -> FloquetBranchSet:
    """Track Floquet branches from eps_d = 0 upward in fixed increments.

    Modes at each amplitude are matched to the previous step's branches by
    maximizing total squared overlap (optimal bipartite assignment).  The
    deliberately coarse default step of 10 MHz skips avoided crossings of
    sub-MHz size.
    """
    if step <= 0:
        raise ParameterError("step must be positive")
    tracked = tracked_levels if tracked_levels is not None else min(
        30, params.kept_levels)
    if tracked > params.kept_levels:
        raise ParameterError("tracked_levels exceeds kept_levels")
    eig = transmon_eigensystem(params)
    dim = params.kept_levels
    eps_grid = np.arange(0.0, eps_d_max + step / 2.0, step)
    n_eps = len(eps_grid)
    period = 1.0 / omega_d

    n_slices = calibrate_slices(params, omega_d, max(eps_d_max, step),
                                tol=propagator_tol)

    quasi = np.zeros((tracked, n_eps))
    unwrapped = np.zeros((tracked, n_eps))
    pops = np.zeros((tracked, n_eps))
    warn = np.zeros((tracked, n_eps), dtype=bool)
    modes_out = np.zeros((n_eps, dim, tracked), dtype=complex)

    # Static limit: modes are the transmon eigenbasis, labels by index.
    level_weights = np.arange(dim, dtype=float)
    quasi[:, 0] = _fold(eig.energies[:tracked], omega_d)
    unwrapped[:, 0] = eig.energies[:tracked]
    pops[:, 0] = np.arange(tracked)
    modes_out[0] = np.eye(dim)[:, :tracked]
    prev_modes = modes_out[0]

    for lo in range(1, n_eps, batch):
        hi = min(lo + batch, n_eps)
        u_stack = _cf4_propagators(eig.energies, eig.charge_matrix, omega_d,
                                   eps_grid[lo:hi], n_slices)
        for k, u in enumerate(u_stack, start=lo):
            spec = floquet_spectrum(u, omega_d)
            overlap = np.abs(prev_modes.conj().T @ spec.modes) ** 2
            rows, cols = linear_sum_assignment(-overlap)
            new_modes = spec.modes[:, cols]
            quasi[rows, k] = spec.quasienergies[cols]
            # Unwrap: pick the branch-cut copy closest to the previous value.
            shift = np.round(
                (unwrapped[rows, k - 1] - spec.quasienergies[cols]) / omega_d)
            unwrapped[rows, k] = spec.quasienergies[cols] + shift * omega_d
            pops[rows, k] = level_weights @ (np.abs(new_modes) ** 2)
            warn[rows, k] = overlap[rows, cols] < 0.1
            modes_out[k] = new_modes
            prev_modes = new_modes

    return FloquetBranchSet(
        eps_d_grid=eps_grid,
        labels=np.arange(tracked),
        quasienergies=quasi,
        quasienergies_unwrapped=unwrapped,
        populations=pops,
        modes=modes_out,
        continuity_warnings=warn,
        omega_d=omega_d,
        n_g=params.n_g,
    )


def ng_averaged_populations(params: TransmonParams, omega_d: float,
                            eps_d_max: float, n_g_grid,
                            step: float = 0.010,
                            tracked_levels: int | None = None,
                            propagator_tol: float = 1e-6) -> AveragedPopulations:
    """Track branches per gate charge, then average populations label-wise."""
    n_g_grid = tuple(float(x) for x in np.atleast_1d(n_g_grid))
    sets = [
        track_branches(params.with_ng(ng), omega_d, eps_d_max, step=step,
                       tracked_levels=tracked_levels,
                       propagator_tol=propagator_tol)
        for ng in n_g_grid
    ]
    populations = np.mean([s.populations for s in sets], axis=0)
    return AveragedPopulations(
        eps_d_grid=sets[0].eps_d_grid,
        labels=sets[0].labels,
        populations=populations,
        n_g_grid=n_g_grid,
        omega_d=omega_d,
        per_ng=tuple(sets),
    )
