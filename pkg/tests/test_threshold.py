import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionize.floquet import AveragedPopulations
from ionize.params import ParameterError
from ionize.threshold import branch_threshold, chaotic_cluster_stat, kmeans_1d


def exhaustive_two_means(values):
    """Oracle: try every sorted split point, return the best cost."""
    v = np.sort(np.asarray(values, dtype=float))
    best = None
    for split in range(1, len(v)):
        lo, hi = v[:split], v[split:]
        cost = ((lo - lo.mean()) ** 2).sum() + ((hi - hi.mean()) ** 2).sum()
        if best is None or cost < best - 1e-12:
            best = cost
    return best


def cost_of(result, values):
    v = np.asarray(values, dtype=float)
    total = 0.0
    for label in (0, 1):
        members = v[result.assignment == label]
        if len(members):
            total += ((members - members.mean()) ** 2).sum()
    return total


def test_simple_clusters():
    r = kmeans_1d([0.0, 0.0, 10.0, 10.0])
    assert tuple(r.centroids) == (0.0, 10.0)
    assert list(r.assignment) == [0, 0, 1, 1]


def test_outlier_cluster():
    r = kmeans_1d([1.0, 2.0, 3.0, 100.0])
    assert list(r.assignment) == [0, 0, 0, 1]


def test_degenerate_values():
    r = kmeans_1d([5.0, 5.0, 5.0, 5.0])
    assert r.degenerate


def test_kmeans_requires_enough_values():
    with pytest.raises(ParameterError):
        kmeans_1d([1.0])


def test_kmeans_against_exhaustive_oracle(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        values = rng.normal(scale=rng.uniform(0.5, 20.0), size=n)
        result = kmeans_1d(values)
        if result.degenerate:
            assert np.ptp(values) == 0.0
            continue
        assert cost_of(result, values) <= exhaustive_two_means(values) + 1e-9


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=-50, max_value=50, allow_nan=False),
                min_size=2, max_size=64))
def test_kmeans_property(values):
    result = kmeans_1d(values)
    if result.degenerate:
        assert max(values) == min(values)
        return
    assert cost_of(result, values) <= exhaustive_two_means(values) + 1e-9


def test_cluster_stat_synthetic():
    pops = np.array([0.0, 1.0, 2.0, 8.0, 18.0, 18.0, 18.0])
    stat = chaotic_cluster_stat(pops)
    assert stat.formed
    assert stat.mean_population == pytest.approx(18.0)


def test_cluster_stat_not_formed_single_outlier():
    pops = np.array([0.0, 1.0, 2.0, 3.0, 25.0])
    stat = chaotic_cluster_stat(pops)
    assert not stat.formed  # size 1 < min_size


def test_cluster_stat_static_limit():
    stat = chaotic_cluster_stat(np.arange(30.0))
    # Whatever the split, no low branch can exceed M - 2 before the
    # branches move, so the static limit can never trigger a threshold.
    if stat.formed:
        assert stat.mean_population - 2.0 > 2.0


def synthetic_branch_set(pop_matrix, eps_grid):
    return AveragedPopulations(
        eps_d_grid=np.asarray(eps_grid, dtype=float),
        labels=np.arange(pop_matrix.shape[0]),
        populations=np.asarray(pop_matrix, dtype=float),
        n_g_grid=(0.0,),
        omega_d=1.4,
    )


def test_branch_threshold_detection():
    eps = np.arange(0.0, 0.5, 0.1)
    # 30 branches; the top half bunches at 20 from step 2 onward and
    # branch 9 joins them there, while branch 0 never does.
    pops = np.tile(np.arange(30.0)[:, None], (1, len(eps)))
    pops[15:, 2:] = 20.0
    pops[9, 2:] = 19.0
    result = branch_threshold(synthetic_branch_set(pops, eps), 9)
    assert result.eps_threshold == pytest.approx(0.2)
    low = branch_threshold(synthetic_branch_set(pops, eps), 0)
    assert low.eps_threshold is None


def test_branch_threshold_unknown_label():
    eps = np.arange(0.0, 0.3, 0.1)
    pops = np.tile(np.arange(5.0)[:, None], (1, len(eps)))
    with pytest.raises(ParameterError):
        branch_threshold(synthetic_branch_set(pops, eps), 7)


def test_threshold_on_grid():
    eps = np.arange(0.0, 1.0, 0.25)
    pops = np.tile(np.arange(8.0)[:, None], (1, len(eps)))
    pops[4:, 3:] = 20.0
    pops[0, 3:] = 19.0
    result = branch_threshold(synthetic_branch_set(pops, eps), 0)
    assert result.eps_threshold in eps
