"""Dense state sampling, reduced spectra, entropies, and Monte Carlo sweeps."""

from __future__ import annotations

import math

import numpy as np
import pytest

from randmera import (
    FeasibilityError,
    Interval,
    Stage,
    UsageError,
    build_state,
    correlation_proxies,
    entropy_renyi2,
    entropy_vn,
    interval_spectrum,
    mc_entropy_stats,
    mc_mutual_information,
    memory_estimate,
    mutual_information,
    reduced_density,
)
from randmera.simulator import DenseState, DensityMatrix, max_amplitudes_from_env


@pytest.fixture(scope="module")
def traj_l3(net_l3):
    return build_state(net_l3, seed=11)


@pytest.fixture(scope="module")
def traj_l4(net_l4):
    return build_state(net_l4, seed=11)


def test_every_snapshot_is_normalized(traj_l4, net_l4):
    for k in range(1, net_l4.levels + 1):
        for stage in (Stage.AFTER_V, Stage.AFTER_W):
            st = traj_l4.state_at(k, stage)
            assert st.norm() == pytest.approx(1.0, abs=1e-10)
            expected = net_l4.site_dim(k, stage)
            assert st.site_dims == (expected,) * (1 << k)
    assert traj_l4.leaf is traj_l4.state_at(net_l4.levels, Stage.AFTER_W)


def test_builds_are_reproducible_and_seed_sensitive(net_l3):
    a = build_state(net_l3, seed=(4, 2)).leaf.amplitudes
    b = build_state(net_l3, seed=(4, 2)).leaf.amplitudes
    c = build_state(net_l3, seed=(4, 3)).leaf.amplitudes
    assert np.array_equal(a, b)
    assert np.max(np.abs(a - c)) > 1e-3


def test_missing_snapshot_is_reported(traj_l3):
    with pytest.raises(UsageError):
        traj_l3.state_at(9, Stage.AFTER_W)
    with pytest.raises(UsageError):
        traj_l3.state_at(0, Stage.AFTER_V)


def test_amplitude_budget_is_enforced_at_the_exact_peak(net_l3):
    peak = memory_estimate(net_l3.schedule).peak
    build_state(net_l3, seed=0, max_amplitudes=peak)  # just enough
    with pytest.raises(FeasibilityError) as err:
        build_state(net_l3, seed=0, max_amplitudes=peak - 1)
    assert "level" in str(err.value)


def test_amplitude_budget_env_override(monkeypatch):
    monkeypatch.delenv("RANDMERA_MAX_AMPLITUDES", raising=False)
    assert max_amplitudes_from_env() == 1 << 26
    monkeypatch.setenv("RANDMERA_MAX_AMPLITUDES", "12345")
    assert max_amplitudes_from_env() == 12345
    monkeypatch.setenv("RANDMERA_MAX_AMPLITUDES", "zero")
    with pytest.raises(UsageError):
        max_amplitudes_from_env()
    monkeypatch.setenv("RANDMERA_MAX_AMPLITUDES", "-3")
    with pytest.raises(UsageError):
        max_amplitudes_from_env()


def test_entropies_of_a_hand_computed_spectrum():
    spec = np.array([0.75, 0.25])
    assert entropy_vn(spec) == pytest.approx(0.5623351446188083, abs=1e-14)
    assert entropy_renyi2(spec) == pytest.approx(math.log(16.0 / 10.0), abs=1e-14)


def test_entropy_accepts_matrix_wrapper_and_spectrum_forms():
    spec = np.array([0.75, 0.25])
    mat = np.diag(spec).astype(complex)
    wrapped = DensityMatrix(dims=(2,), matrix=mat)
    vals = {entropy_vn(spec), entropy_vn(mat), entropy_vn(wrapped)}
    assert max(vals) - min(vals) < 1e-12


def test_entropy_edge_cases_and_order():
    assert entropy_vn(np.array([1.0])) == 0.0
    assert entropy_renyi2(np.array([1.0])) == 0.0
    d = 7
    uniform = np.full(d, 1.0 / d)
    assert entropy_vn(uniform) == pytest.approx(math.log(d), abs=1e-12)
    assert entropy_renyi2(uniform) == pytest.approx(math.log(d), abs=1e-12)
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = rng.dirichlet(np.ones(6))
        assert entropy_vn(p) >= entropy_renyi2(p) - 1e-12


def test_non_states_are_rejected():
    with pytest.raises(UsageError):
        entropy_vn(np.array([0.5, 0.4]))  # trace off
    with pytest.raises(UsageError):
        entropy_vn(np.array([1.2, -0.2]))  # negative weight


def test_reduced_density_is_a_density_matrix(traj_l3):
    rho = reduced_density(traj_l3.leaf, Interval.of_length(3, Stage.AFTER_W, 2, 3))
    assert rho.dims == (2, 2, 2)
    m = rho.matrix
    assert m.shape == (8, 8)
    assert np.max(np.abs(m - m.conj().T)) < 1e-12
    assert np.trace(m).real == pytest.approx(1.0, abs=1e-10)
    assert np.min(np.linalg.eigvalsh(m)) > -1e-10


def test_empty_and_whole_regions_are_trivial(traj_l3, net_l3):
    empty = reduced_density(traj_l3.leaf, Interval.empty(3, Stage.AFTER_W))
    assert empty.matrix.shape == (1, 1)
    assert empty.matrix[0, 0] == pytest.approx(1.0, abs=1e-12)
    whole = interval_spectrum(traj_l3.leaf, Interval.whole_ring(3, Stage.AFTER_W))
    assert whole[0] == pytest.approx(1.0, abs=1e-10)
    assert entropy_vn(whole) == pytest.approx(0.0, abs=1e-10)


def test_children_of_one_parent_inherit_its_spectrum(traj_l4, net_l4):
    # Splitting is an isometry on the parent site, so the two children
    # together carry exactly the parent's reduced spectrum; in particular
    # their rank is capped by the parent dimension (6), not the ambient 9.
    child_spec = interval_spectrum(traj_l4.state_at(3, Stage.AFTER_V), [2, 3])
    parent_spec = interval_spectrum(traj_l4.state_at(2, Stage.AFTER_W), [1])
    assert (child_spec > 1e-12).sum() <= net_l4.site_dim(2, Stage.AFTER_W)
    k = max(len(child_spec), len(parent_spec))
    a = np.pad(child_spec, (0, k - len(child_spec)))
    b = np.pad(parent_spec, (0, k - len(parent_spec)))
    assert np.max(np.abs(a - b)) < 1e-10


def test_interval_and_complement_have_the_same_spectrum(traj_l4):
    iv = Interval.span(4, Stage.AFTER_W, 1, 5)
    comp = Interval.span(4, Stage.AFTER_W, 6, 0)
    a = interval_spectrum(traj_l4.leaf, iv)
    b = interval_spectrum(traj_l4.leaf, comp)
    k = min(len(a), len(b))
    assert np.max(np.abs(a[:k] - b[:k])) < 1e-8
    assert float(a[k:].sum()) < 1e-10


@pytest.mark.parametrize("level,i,j", [(4, 1, 2), (4, 1, 4), (4, 3, 6), (3, 1, 2), (3, 1, 4)])
def test_pair_aligned_intervals_ignore_the_rotation_layer(traj_l4, net_l4, level, i, j):
    # Start odd, end even: the interval covers whole rotated pairs, so
    # undoing the rotation cannot change its reduced spectrum.
    n = net_l4.n_sites(level)
    after_w = interval_spectrum(
        traj_l4.state_at(level, Stage.AFTER_W), Interval.span(level, Stage.AFTER_W, i, j)
    )
    after_v = interval_spectrum(
        traj_l4.state_at(level, Stage.AFTER_V), Interval.span(level, Stage.AFTER_V, i, j)
    )
    k = max(len(after_w), len(after_v))
    a = np.pad(after_w, (0, k - len(after_w)))
    b = np.pad(after_v, (0, k - len(after_v)))
    assert np.max(np.abs(a - b)) < 1e-10


def test_single_site_entropy_is_capped_by_the_site_dimension(traj_l4, net_l4):
    for level in range(1, net_l4.levels + 1):
        for stage in (Stage.AFTER_V, Stage.AFTER_W):
            cap = math.log(net_l4.site_dim(level, stage))
            st = traj_l4.state_at(level, stage)
            for site in range(net_l4.n_sites(level)):
                assert entropy_vn(interval_spectrum(st, [site])) <= cap + 1e-9


def test_moving_an_endpoint_changes_entropy_by_at_most_the_site_log(traj_l4):
    base = Interval.span(4, Stage.AFTER_W, 3, 8)
    s_base = entropy_vn(interval_spectrum(traj_l4.leaf, base))
    step = math.log(2.0)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            moved = Interval.span(4, Stage.AFTER_W, 3 + di, 8 + dj)
            s_moved = entropy_vn(interval_spectrum(traj_l4.leaf, moved))
            assert s_base <= s_moved + step * (abs(di) + abs(dj)) + 1e-8


def test_mutual_information_basics(traj_l4):
    left = Interval.span(4, Stage.AFTER_W, 0, 3)
    right = Interval.span(4, Stage.AFTER_W, 4, 7)
    assert mutual_information(traj_l4.leaf, left, right) >= -1e-8

    empty = Interval.empty(4, Stage.AFTER_W)
    assert mutual_information(traj_l4.leaf, left, empty) == pytest.approx(0.0, abs=1e-10)

    half = Interval.span(4, Stage.AFTER_W, 0, 7)
    other = Interval.span(4, Stage.AFTER_W, 8, 15)
    s_half = entropy_vn(interval_spectrum(traj_l4.leaf, half))
    assert mutual_information(traj_l4.leaf, half, other) == pytest.approx(
        2 * s_half, abs=1e-8
    )

    with pytest.raises(UsageError):
        mutual_information(traj_l4.leaf, half, Interval.span(4, Stage.AFTER_W, 7, 9))


def test_two_site_state_mutual_information_saturates_purity(net_tiny):
    # On a pure two-site state S(union) = 0 and S(x) = S(y), so the mutual
    # information equals 2 S(x) exactly and stays below 2 log 2.
    traj = build_state(net_tiny, seed=6)
    x = Interval.of_length(1, Stage.AFTER_W, 0, 1)
    y = Interval.of_length(1, Stage.AFTER_W, 1, 1)
    s_x = entropy_vn(interval_spectrum(traj.leaf, x))
    mi = mutual_information(traj.leaf, x, y)
    assert mi == pytest.approx(2 * s_x, abs=1e-10)
    assert 0.0 < mi <= 2 * math.log(2.0) + 1e-12


def test_product_state_has_zero_correlation_witness():
    rng = np.random.default_rng(17)
    left = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    right = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    left /= np.linalg.norm(left)
    right /= np.linalg.norm(right)
    state = DenseState(
        level=2,
        stage=Stage.AFTER_W,
        site_dims=(2, 2, 2, 2),
        amplitudes=np.kron(left, right),
    )
    x = Interval.of_length(2, Stage.AFTER_W, 0, 2)
    y = Interval.of_length(2, Stage.AFTER_W, 2, 2)
    prox = correlation_proxies(state, x, y)
    assert prox.trace_norm_bound == pytest.approx(0.0, abs=1e-10)
    assert mutual_information(state, x, y) == pytest.approx(0.0, abs=1e-10)


def test_monte_carlo_entropies_match_a_manual_loop(net_l3):
    iv = Interval.of_length(3, Stage.AFTER_W, 1, 2)
    stats = mc_entropy_stats(net_l3, iv, trials=5, seed=9)
    assert len(stats.samples_s) == 5
    for t in range(5):
        traj = build_state(net_l3, (9, t))
        spec = interval_spectrum(traj.leaf, iv)
        assert stats.samples_s[t] == pytest.approx(entropy_vn(spec), abs=1e-10)
        assert stats.samples_s2[t] == pytest.approx(entropy_renyi2(spec), abs=1e-10)
    again = mc_entropy_stats(net_l3, iv, trials=5, seed=9)
    assert np.array_equal(stats.samples_s, again.samples_s)


def test_sample_summaries_are_consistent(net_l3):
    iv = Interval.of_length(3, Stage.AFTER_W, 0, 3)
    stats = mc_entropy_stats(net_l3, iv, trials=8, seed=2)
    assert stats.mean_s == pytest.approx(float(stats.samples_s.mean()), abs=1e-14)
    assert stats.mean_exp_neg_s2 == pytest.approx(
        float(np.exp(-stats.samples_s2).mean()), abs=1e-14
    )
    assert stats.stderr_s > 0
    assert np.all(stats.samples_s >= stats.samples_s2 - 1e-10)


def test_monte_carlo_mutual_information_matches_a_manual_loop(net_l3):
    left = Interval.of_length(3, Stage.AFTER_W, 0, 2)
    right = Interval.of_length(3, Stage.AFTER_W, 2, 2)
    (res,) = mc_mutual_information(net_l3, [(left, right)], trials=4, seed=14)
    assert len(res.samples) == 4
    for t in range(4):
        traj = build_state(net_l3, (14, t))
        assert res.samples[t] == pytest.approx(
            mutual_information(traj.leaf, left, right), abs=1e-10
        )
    assert np.all(res.samples >= -1e-8)


def test_correlation_proxies_are_bounded_witnesses(traj_l3):
    x = Interval.of_length(3, Stage.AFTER_W, 1, 1)
    y = Interval.of_length(3, Stage.AFTER_W, 5, 1)
    prox = correlation_proxies(traj_l3.leaf, x, y)
    assert 0.0 <= prox.trace_norm_bound <= 2.0 + 1e-9
    assert 0.0 < prox.schmidt_max <= 1.0 + 1e-12
    assert prox.l2_bound > 0.0
    empty = correlation_proxies(traj_l3.leaf, x, Interval.empty(3, Stage.AFTER_W))
    assert (empty.trace_norm_bound, empty.l2_bound, empty.schmidt_max) == (0.0, 0.0, 0.0)
    with pytest.raises(UsageError):
        correlation_proxies(traj_l3.leaf, x, x)


def test_mean_top_schmidt_weight_tracks_the_site_dimension(net_single):
    # Single-level ring of two sites: the top reduced eigenvalue of one site,
    # rescaled by the site dimension, stays within a small fixed band.
    tops = []
    x = Interval.of_length(1, Stage.AFTER_W, 0, 1)
    y = Interval.of_length(1, Stage.AFTER_W, 1, 1)
    for s in range(30):
        traj = build_state(net_single, seed=(31, s))
        tops.append(correlation_proxies(traj.leaf, x, y).schmidt_max)
    scaled = 9.0 * float(np.mean(tops))
    assert 0.5 <= scaled <= 10.0
