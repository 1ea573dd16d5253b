"""Joint transmon-resonator system with dressed-state labeling.

The static Hamiltonian is built on the tensor space (transmon eigenbasis x
resonator Fock), index = i_t * N_r + n_r:

    H = H_t (x) 1 + omega_r * 1 (x) a^dag a + i g (n - n_g) (x) (a^dag - a)

The drive couples through n_t (x) 1.  Dressed eigenstates are labeled by
bare products via a greedy global assignment on squared overlaps, which
guarantees a bijection onto the retained bare labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DeviceParams
from .transmon import transmon_eigensystem


@dataclass(frozen=True)
class DressedLabelMap:
    """Bijection between joint eigenstates and bare (i_t, n_r) labels."""

    labels: tuple          # labels[k] = (i_t, n_r) of eigenstate k
    overlaps: np.ndarray   # squared overlap with the assigned bare product
    ambiguous: np.ndarray  # True where the best overlap^2 fell below 0.5

    def index_of(self, i_t: int, n_r: int) -> int:
        """Eigenstate column carrying the bare label (i_t, n_r)."""
        return self.labels.index((i_t, n_r))

    def transmon_index(self) -> np.ndarray:
        """i_t label per eigenstate column."""
        return np.array([it for it, _ in self.labels])


@dataclass(frozen=True)
class JointSystem:
    """Static joint Hamiltonian, drive operator, and dressed eigensystem."""

    h_static: np.ndarray
    drive_op: np.ndarray
    energies: np.ndarray
    modes: np.ndarray
    label_map: DressedLabelMap
    device: DeviceParams

    def dressed_state(self, i_t: int, n_r: int) -> np.ndarray:
        return self.modes[:, self.label_map.index_of(i_t, n_r)]

    def dressed_energy(self, i_t: int, n_r: int) -> float:
        return float(self.energies[self.label_map.index_of(i_t, n_r)])


def _assign_labels(modes: np.ndarray, k_t: int, n_r: int) -> DressedLabelMap:
    """Greedy global assignment: largest squared overlap first."""
    dim = k_t * n_r
    weight = np.abs(modes) ** 2  # weight[bare, eigenstate]
    order = np.argsort(weight, axis=None)[::-1]
    labels = [None] * dim
    overlaps = np.zeros(dim)
    bare_taken = np.zeros(dim, dtype=bool)
    eig_taken = np.zeros(dim, dtype=bool)
    assigned = 0
    for flat in order:
        bare, col = divmod(int(flat), dim)
        if bare_taken[bare] or eig_taken[col]:
            continue
        labels[col] = divmod(bare, n_r)
        overlaps[col] = weight[bare, col]
        bare_taken[bare] = True
        eig_taken[col] = True
        assigned += 1
        if assigned == dim:
            break
    return DressedLabelMap(
        labels=tuple(labels),
        overlaps=overlaps,
        ambiguous=overlaps < 0.5,
    )


def build_joint_system(device: DeviceParams) -> JointSystem:
    """Construct and diagonalize the static joint Hamiltonian."""
    tp = device.transmon
    eig = transmon_eigensystem(tp)
    k_t = tp.kept_levels
    n_r = device.resonator_cutoff

    a = np.diag(np.sqrt(np.arange(1, n_r)), k=1)
    n_res = a.T @ a
    field = 1j * (a.T - a)  # i (a^dag - a), Hermitian

    eye_t = np.eye(k_t)
    eye_r = np.eye(n_r)
    h_static = (
        np.kron(np.diag(eig.energies), eye_r)
        + device.omega_r * np.kron(eye_t, n_res)
        + device.g * np.kron(eig.charge_matrix - tp.n_g * eye_t, field)
    )
    drive_op = np.kron(eig.charge_matrix, eye_r)

    energies, modes = np.linalg.eigh(h_static)
    label_map = _assign_labels(modes, k_t, n_r)
    return JointSystem(
        h_static=h_static,
        drive_op=drive_op,
        energies=energies,
        modes=modes,
        label_map=label_map,
        device=device,
    )


def dispersive_shift(system: JointSystem) -> float:
    """Conditional resonator pull in GHz.

    Defined as the full frequency difference between the resonator
    conditioned on the transmon being in its first-excited versus ground
    state.  The fitted device gives about -0.4 MHz.
    """
    e = system.dressed_energy
    return (e(1, 1) - e(1, 0)) - (e(0, 1) - e(0, 0))
