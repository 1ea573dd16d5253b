"""Ionization-threshold detection from averaged Floquet populations.

The chaotic cluster at a given amplitude is found with an exact 1D
two-cluster split (sorted scan, no random initialization).  A branch's
threshold is the lowest grid amplitude where its gate-charge averaged
population exceeds the cluster mean minus a fluctuation margin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .floquet import AveragedPopulations, ng_averaged_populations
from .params import ParameterError, TransmonParams


@dataclass(frozen=True)
class KMeansResult:
    assignment: np.ndarray   # 0 = low cluster, 1 = high cluster
    centroids: tuple         # (low, high)
    degenerate: bool         # all inputs identical


@dataclass(frozen=True)
class ClusterDiagnostics:
    formed: bool
    mean_population: float   # M, mean of the chaotic (higher) cluster
    centroids: tuple
    sizes: tuple


@dataclass(frozen=True)
class ThresholdResult:
    omega_d: float
    label: int
    eps_threshold: float | None
    diagnostics: tuple = field(repr=False, default=())


def kmeans_1d(values, k: int = 2) -> KMeansResult:
    """Globally optimal 1D two-cluster split by sorted split-point scan.

    Ties in within-cluster variance break toward the smaller split index.
    """
    if k != 2:
        raise ParameterError("only k = 2 is supported")
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < k:
        raise ParameterError("need at least k values")
    if np.all(values == values[0]):
        return KMeansResult(
            assignment=np.zeros(n, dtype=int),
            centroids=(float(values[0]), float(values[0])),
            degenerate=True,
        )
    order = np.argsort(values, kind="stable")
    x = values[order]
    # Prefix sums give each split's within-cluster sum of squares in O(n).
    csum = np.cumsum(x)
    csq = np.cumsum(x * x)
    total_sum, total_sq = csum[-1], csq[-1]
    splits = np.arange(1, n)
    left_n = splits
    right_n = n - splits
    left_sum = csum[:-1]
    right_sum = total_sum - left_sum
    sse = (csq[:-1] - left_sum**2 / left_n) \
        + ((total_sq - csq[:-1]) - right_sum**2 / right_n)
    best = int(np.argmin(sse))  # argmin returns the first (smallest) index
    split = splits[best]
    assignment = np.zeros(n, dtype=int)
    assignment[order[split:]] = 1
    return KMeansResult(
        assignment=assignment,
        centroids=(float(x[:split].mean()), float(x[split:].mean())),
        degenerate=False,
    )


def chaotic_cluster_stat(populations, min_size: int = 2,
                         min_separation: float = 1.0) -> ClusterDiagnostics:
    """Mean population M of the strongly hybridized cluster, if formed.

    The chaotic cluster is the higher-centroid one; it counts as formed
    when it holds at least min_size branches and its centroid sits more
    than min_separation transmon levels above the low cluster.
    """
    populations = np.asarray(populations, dtype=float)
    km = kmeans_1d(populations)
    if km.degenerate:
        return ClusterDiagnostics(False, float("nan"), km.centroids, (len(populations), 0))
    low, high = km.centroids
    sizes = (int(np.sum(km.assignment == 0)), int(np.sum(km.assignment == 1)))
    formed = sizes[1] >= min_size and (high - low) > min_separation
    mean_pop = float(populations[km.assignment == 1].mean()) if formed else float("nan")
    return ClusterDiagnostics(formed, mean_pop, km.centroids, sizes)


def branch_threshold(averaged: AveragedPopulations, label: int,
                     margin: float = 2.0,
                     cluster_levels: int | None = None) -> ThresholdResult:
    """Lowest amplitude where the labeled branch exceeds M - margin.

    The cluster statistic is evaluated over the first cluster_levels
    branches only.  Branches far above the potential barrier behave as
    nearly free rotor states: their average populations stay pinned to the
    unperturbed ladder at all amplitudes, so including them would make the
    higher-centroid cluster a mix of the chaotic bunch and these regular
    stragglers and push M far above the bunch.  Restricting to roughly
    twice the well capacity keeps the higher cluster the bunched one.
    """
    label = int(label)
    if label not in averaged.labels:
        raise ParameterError(f"label {label} not tracked")
    if cluster_levels is None:
        cluster_levels = min(20, len(averaged.labels))
    if not 2 <= cluster_levels <= len(averaged.labels):
        raise ParameterError("cluster_levels out of range")
    if label >= cluster_levels:
        raise ParameterError("label outside the clustered branches")
    diagnostics = []
    threshold = None
    for k, eps in enumerate(averaged.eps_d_grid):
        stat = chaotic_cluster_stat(averaged.populations[:cluster_levels, k])
        diagnostics.append((float(eps), stat))
        if stat.formed and averaged.populations[label, k] > stat.mean_population - margin:
            threshold = float(eps)
            break
    return ThresholdResult(
        omega_d=averaged.omega_d,
        label=label,
        eps_threshold=threshold,
        diagnostics=tuple(diagnostics),
    )


def threshold_curve(params: TransmonParams, omega_d_grid, label: int,
                    n_g_grid, eps_d_max: float, step: float = 0.010,
                    tracked_levels: int | None = None,
                    margin: float = 2.0, cluster_levels: int | None = None,
                    propagator_tol: float = 1e-6) -> list[ThresholdResult]:
    """ThresholdResult per drive frequency, for overlay on dynamics sweeps."""
    results = []
    for omega_d in np.atleast_1d(omega_d_grid):
        averaged = ng_averaged_populations(
            params, float(omega_d), eps_d_max, n_g_grid, step=step,
            tracked_levels=tracked_levels, propagator_tol=propagator_tol)
        results.append(branch_threshold(averaged, label, margin=margin,
                                        cluster_levels=cluster_levels))
    return results
