import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from pcp.graph import Dag
from pcp.simgen import (
    SemModel,
    make_rng,
    population_correlation,
    population_covariance,
    random_dag,
    random_sem,
    read_csv,
    sample,
    write_csv,
)


def test_degree_caps_and_acyclicity_over_many_seeds():
    for seed in range(1000):
        dag = random_dag(20, 2, 2, seed)
        indeg = np.zeros(20, int)
        outdeg = np.zeros(20, int)
        for a, b in dag.edges:
            outdeg[a] += 1
            indeg[b] += 1
        assert indeg.max() <= 2 and outdeg.max() <= 2
        assert len(dag.topological_order()) == 20


def test_small_and_boundary_cases():
    seen = set()
    for seed in range(50):
        seen.add(frozenset(random_dag(2, 2, 2, seed).edges))
    assert seen <= {frozenset(), frozenset({(0, 1)}), frozenset({(1, 0)})}
    assert not random_dag(10, 0, 2, 3).edges
    with pytest.raises(ValueError):
        random_dag(1)


@given(st.integers(0, 2**32 - 1), st.integers(0, 3), st.integers(0, 3))
def test_caps_hold_for_any_setting(seed, max_in, max_out):
    dag = random_dag(12, max_in, max_out, seed, edge_prob=0.7)
    for v in range(12):
        assert len(dag.parents(v)) <= max_in
        assert sum(1 for a, _ in dag.edges if a == v) <= max_out


def test_sem_on_empty_dag():
    sem = random_sem(Dag(6), 0)
    assert sem.weights == {}
    assert np.all(sem.noise_sd >= 0.1)


def test_determinism():
    a = random_sem(random_dag(15, rng=7), 8)
    b = random_sem(random_dag(15, rng=7), 8)
    assert a.weights == b.weights
    assert_array_equal(a.noise_sd, b.noise_sd)
    assert_array_equal(sample(a, 50, 9), sample(b, 50, 9))


def test_sem_validation():
    dag = Dag(2, [(0, 1)])
    with pytest.raises(ValueError):
        SemModel(dag, {}, np.ones(2))
    with pytest.raises(ValueError):
        SemModel(dag, {(0, 1): 1.0}, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        sample(SemModel(dag, {(0, 1): 1.0}, np.ones(2)), 0)


def test_chain_covariance_closed_form():
    # X0 -> X1 -> X2 with explicit variances
    sem = SemModel(Dag(3, [(0, 1), (1, 2)]), {(0, 1): 0.7, (1, 2): -1.3}, np.array([1.5, 0.4, 2.0]))
    v0 = 1.5**2
    v1 = 0.7**2 * v0 + 0.4**2
    v2 = 1.3**2 * v1 + 2.0**2
    expected = np.array([
        [v0, 0.7 * v0, -1.3 * 0.7 * v0],
        [0.7 * v0, v1, -1.3 * v1],
        [-1.3 * 0.7 * v0, -1.3 * v1, v2],
    ])
    assert_allclose(population_covariance(sem), expected, atol=1e-12)


def test_single_vertex_sample_sd():
    sem = SemModel(Dag(2), {}, np.array([1.0, 1.0]))
    x = sample(sem, 100_000, 1)
    assert abs(x[:, 0].std() - 1.0) < 0.01


def test_zero_weight_columns_are_uncorrelated():
    sem = random_sem(Dag(8), 4)
    n = 20_000
    c = np.corrcoef(sample(sem, n, 5), rowvar=False)
    off = c[~np.eye(8, dtype=bool)]
    assert np.abs(off).max() < 3 / np.sqrt(n)


@pytest.mark.parametrize("seed", range(5))
def test_empirical_correlation_converges(seed):
    rng = make_rng(seed)
    sem = random_sem(random_dag(20, rng=rng), rng)
    n = 50_000
    emp = np.corrcoef(sample(sem, n, rng), rowvar=False)
    assert np.abs(emp - population_correlation(sem)).max() < 5 / np.sqrt(n)


def test_csv_round_trip(tmp_path):
    x = sample(random_sem(random_dag(4, rng=0), 0), 10, 0)
    path = tmp_path / "d.csv"
    write_csv(path, x, ["a", "b", "c", "d"])
    names, y = read_csv(path)
    assert names == ["a", "b", "c", "d"]
    assert_array_equal(x, y)


def test_csv_errors_name_the_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(ValueError, match=":3:"):
        read_csv(path)
    path.write_text("a,b\n1,x\n")
    with pytest.raises(ValueError, match=":2:"):
        read_csv(path)
    path.write_text("a,a\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(path)
