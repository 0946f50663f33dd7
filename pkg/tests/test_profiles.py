import numpy as np
import pytest

from pdante import aht, profiles, pulse, su2
from pdante import sequences as sq

TH = np.pi / 60
TP = 720e-9


def test_exact_single_pulse():
    spec = sq.dante(1, 0.3, 1e-5, 0.0)
    wz = 2 * np.pi * 3000.0
    ref = pulse.exact_pulse(pulse.PulseParams(spec.omega_rf, 0.0, spec.t_p, wz))
    assert su2.frobenius_distance(profiles.exact_sequence_propagator(spec, wz), ref) < 1e-14


def test_exact_dante_on_resonance():
    u = profiles.exact_sequence_propagator(sq.dante(30, TH, TP, 2e-3), 0.0)
    assert np.allclose(su2.bloch_evolve(u, (0, 0, 1)), (0, -1, 0), atol=1e-9)


def test_exact_at_comb_tooth_matches_aht():
    t_p = 1e-6
    spec = sq.dante(30, TH, t_p, 1000 * t_p)
    wz = 2 * np.pi / (1001 * t_p)
    v = su2.bloch_evolve(profiles.exact_sequence_propagator(spec, wz), (0, 0, 1))
    expected = np.sin(np.pi / 2 * float(pulse.sinc(wz * t_p / 2)))
    assert -v[1] == pytest.approx(expected, abs=2e-3)


def test_exact_unitary_long_train():
    spec = sq.pdante_random(1000, 0.01, 1e-6, 0.5, nu0=10.0, seed=1)
    u = profiles.exact_sequence_propagator(spec, 2 * np.pi * 321.0)
    assert np.linalg.norm(u.conj().T @ u - su2.IDENTITY) < 1e-11


def test_profile_norm_and_range():
    spec = sq.pdante_random(30, TH, TP, 46.4e-3, nu0=50.0, seed=2)
    p = profiles.profile(spec, np.arange(-1000, 1001, 5.0))
    norm = np.sqrt(p.ix**2 + p.minus_iy**2 + p.iz**2)
    assert np.abs(norm - 1).max() < 1e-9
    assert np.all(np.abs(p.as_array()) <= 1 + 1e-9)


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("nu0", [0.0, 200.0, -350.0])
def test_pdante_full_turn_at_target(seed, nu0):
    # rotating-frame components: the target ends transverse, phase set by precession
    spec = sq.pdante_random(30, TH, TP, 46.4e-3, nu0=nu0, seed=seed)
    p = profiles.profile(spec, [0.0])
    assert np.hypot(p.ix[0], p.minus_iy[0]) == pytest.approx(1.0, abs=1e-6)
    assert p.iz[0] == pytest.approx(0.0, abs=1e-6)


def test_phase_lock_sign_selects_target():
    spec = sq.pdante_random(30, TH, TP, 46.4e-3, nu0=200.0, seed=5)
    p = profiles.profile(spec, [-400.0, 0.0])
    assert p.iz[1] < 1e-6 and p.iz[0] > 0.5


def test_dante_profile_symmetry():
    spec = sq.dante(30, TH, TP, 2e-3)
    off = np.arange(-700, 701, 7.0)
    p = profiles.profile(spec, off)
    assert np.allclose(p.minus_iy, p.minus_iy[::-1], atol=1e-9)
    assert np.allclose(p.iz, p.iz[::-1], atol=1e-9)
    assert np.allclose(p.ix, -p.ix[::-1], atol=1e-9)


@pytest.mark.parametrize("engine", ["aht-1", "aht-2", "aht2"])
def test_aht_engine_on_resonance(engine):
    spec = sq.dante(30, TH, TP, 2e-3)
    p = profiles.profile(spec, [0.0], engine)
    assert p.minus_iy[0] == pytest.approx(1.0, abs=1e-12)
    assert p.engine == profiles.normalize_engine(engine)


def test_aht_far_from_resonances():
    spec = sq.dante(30, TH, TP, 2e-3)
    tau_t = 2e-3 + TP
    window = aht.validity_window(TH, np.pi / 2, tau_t)
    off = np.arange(-580, 581, 1.0)
    teeth = np.arange(-2, 3) / tau_t
    far = np.min(np.abs(off[:, None] - teeth[None, :]), axis=1) > 3 * window
    ex = profiles.profile(spec, off, "exact")
    ap = profiles.profile(spec, off, "aht-2")
    assert np.abs(ex.minus_iy - ap.minus_iy)[far].max() < 0.05


def test_order_two_beats_order_one_off_resonance():
    fam = sq.cosine_family(30, TH, TP, 1.6e-3, 1 / np.sqrt(2), 10)
    off = np.arange(-1000, 1001, 2.0)
    keep = np.abs(off) > 50
    wins = total = 0
    for spec in fam:
        w = 2 * np.pi * off
        exact = profiles.exact_ck(spec, w)
        e1 = su2.ck_distance(exact, aht.aht_ck(spec, w, 1))
        e2 = su2.ck_distance(exact, aht.aht_ck(spec, w, 2))
        wins += np.count_nonzero(e2[keep] <= e1[keep])
        total += keep.sum()
    assert wins / total >= 0.9


def test_unknown_engine():
    with pytest.raises(ValueError):
        profiles.profile(sq.dante(2, TH, TP, 1e-3), [0.0], "magic")


def test_non_finite_offsets():
    with pytest.raises(ValueError):
        profiles.profile(sq.dante(2, TH, TP, 1e-3), [np.nan])


def test_ensemble_single_member_is_identity():
    spec = sq.pdante_random(30, TH, TP, 46.4e-3, seed=3)
    off = np.arange(-500, 501, 10.0)
    e = profiles.ensemble_average([spec], off)
    p = profiles.profile(spec, off)
    assert np.array_equal(e.profile.minus_iy, p.minus_iy)
    assert e.n_avg == 1


def test_ensemble_is_mean_and_permutation_invariant():
    fam = sq.random_family(30, TH, TP, 46.4e-3, 6, seed=20)
    off = np.arange(-500, 501, 10.0)
    e = profiles.ensemble_average(fam, off)
    members = np.stack([profiles.profile(s, off).as_array() for s in fam])
    assert np.allclose(e.profile.as_array(), members.mean(axis=0), atol=1e-15)
    shuffled = profiles.ensemble_average(fam[::-1], off)
    assert np.allclose(shuffled.profile.as_array(), e.profile.as_array(), atol=1e-15)


def test_ensemble_rejects_mismatch():
    a = sq.pdante_random(30, TH, TP, 46.4e-3, seed=1)
    b = sq.pdante_random(30, TH / 2, TP, 46.4e-3, seed=1)
    with pytest.raises(ValueError):
        profiles.ensemble_average([a, b], [0.0, 100.0])


def test_ensemble_window_covering_everything():
    a = sq.pdante_random(30, TH, TP, 46.4e-3, seed=1)
    with pytest.raises(ValueError):
        profiles.ensemble_average([a], [-10.0, 10.0], exclusion_window=39.0)


def test_resonance_exclusion_shrinks_window():
    fam = sq.cosine_family(30, TH, TP, 1.6e-3, 1 / np.sqrt(2), 3)
    off = np.arange(-1000, 1001, 2.0)
    keep = profiles.resonance_mask(fam, off, 39.0)
    assert not keep[np.argmin(np.abs(off - 366.19))]
    assert keep.sum() < keep.size
    e = profiles.ensemble_average(fam, off, exclude_resonances=True)
    assert np.isfinite(e.fluctuation_std)


def test_fluctuation_stats_identical_profiles():
    spec = sq.pdante_random(30, TH, TP, 46.4e-3, seed=3)
    p = profiles.profile(spec, np.arange(-1000, 1001, 10.0))
    stats = profiles.fluctuation_stats([p] * 30, 39.0, prefixes=(1, 25))
    assert stats[25] == pytest.approx(stats[1], rel=1e-12)


def test_fluctuation_stats_all_prefixes_and_baseline():
    off = np.arange(-1000, 1001, 10.0)
    rng = np.random.default_rng(0)
    rows = rng.normal(size=(8, off.size))
    stats = profiles.fluctuation_stats_array(rows, off, 39.0, prefixes=None)
    assert sorted(stats) == list(range(1, 9))
    zeroed = profiles.fluctuation_stats_array(rows, off, 39.0, prefixes=(8,), baseline=rows.mean(axis=0))
    assert zeroed[8] == pytest.approx(0.0, abs=1e-15)


def test_fluctuation_stats_errors():
    off = np.arange(-20, 21, 10.0)
    p = profiles.Profile(off, off * 0, off * 0, off * 0 + 1, "exact")
    with pytest.raises(ValueError):
        profiles.fluctuation_stats([p], 5.0)
    with pytest.raises(ValueError):
        profiles.fluctuation_stats([p, p], 39.0)


def test_validity_map_zero_column_and_bounds():
    vm = profiles.validity_map(np.pi / 2, 1000, [30, 31, 60], np.round(np.arange(0, 101) * 0.02, 10))
    assert vm.distances.shape == (3, 101)
    assert np.all(vm.distances[:, 0] < 1e-10)
    assert np.all((vm.distances >= 0) & (vm.distances <= 2 * np.sqrt(2)))


def test_validity_map_on_comb_tooth_bound():
    theta_total, ratio_tau = np.pi / 2, 1000
    for n in (30, 60, 120):
        theta = theta_total / n
        # offset ratio that puts w_z tau_t at 2 pi
        ratio = 2 * np.pi / ((ratio_tau + 1) * theta)
        vm = profiles.validity_map(theta_total, ratio_tau, [n], [ratio])
        assert vm.distances[0, 0] <= n * 1e-3 * theta / (2 * np.pi / 9)


def test_validity_map_larger_total_flip_is_worse():
    n = np.arange(30, 61, 3)
    r = np.round(np.arange(0, 201) * 0.01, 10)
    small = profiles.validity_map(np.pi / 2, 1000, n, r).distances.max()
    large = profiles.validity_map(2 * np.pi, 1000, n, r).distances.max()
    assert large > small


def test_validity_map_rejects_large_flip():
    with pytest.raises(ValueError):
        profiles.validity_map(2 * np.pi, 1000, [5], [0.1])
    with pytest.raises(ValueError):
        profiles.validity_map(np.pi / 2, 1000, [1], [0.1])


def test_aht_error_profile_checkpoints():
    fam = sq.cosine_family(30, TH, TP, 1.6e-3, 1 / np.sqrt(2), 5)
    off = np.arange(-200, 201, 5.0)
    res = profiles.aht_error_profile(fam, off, order=2, checkpoints=(1, 5, 25))
    assert res.checkpoints == (1, 5)
    assert res.differences.shape == (2, 3, off.size)
    assert np.all(res.differences >= 0)


def test_local_maxima():
    v = np.array([0, 1, 0, 2, 2, 1, 3, 0])
    assert list(profiles.local_maxima(v)) == [1, 3, 4, 6]
