import numpy as np
import pytest

from pdante import aht, pulse, su2
from pdante import sequences as sq
from pdante.errors import ConvergenceError

from oracles import brute_force

TH = np.pi / 60
TP = 720e-9
F = 1 / np.sqrt(2)
RATIO = 1 / np.sqrt(2)


def components_matrix(comps, i=0):
    return su2.hermitian(*(c[i] for c in comps))


def member_one():
    tau = sq.cosine_base_delay(30, 1.6e-3, RATIO, F)
    return tau, RATIO * tau


def test_dante_on_resonance():
    r = aht.dante_avg_hamiltonian(30, TH, TP, 2e-3, 0.0, 2)
    assert np.allclose(r.h_avg, TH / TP * su2.IX, atol=1e-9)
    assert r.transverse_amplitude * r.duration == pytest.approx(np.pi / 2, rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dante_commuting_point(n):
    tau = 2e-3
    wz = 2 * np.pi * n / (tau + TP)
    h1 = aht.dante_avg_hamiltonian(30, TH, TP, tau, wz, 1).h_avg
    h2 = aht.dante_avg_hamiltonian(30, TH, TP, tau, wz, 2).h_avg
    assert np.abs(h2 - h1).max() < 1e-12 * TH / TP
    _, hx, hy, _ = su2.components(h1)
    a = pulse.transverse_scale(wz, TH / TP, TP)
    assert np.hypot(hx, hy) == pytest.approx(a, rel=1e-12)
    # transverse axis sits at angle -omega_z t_p / 2 from x
    assert np.arctan2(hy, hx) == pytest.approx(-wz * TP / 2, abs=1e-9)


@pytest.mark.parametrize("n_pulses", [2, 8, 31])
@pytest.mark.parametrize("nu", [137.3, -412.0, 499.5, 1e-3])
def test_dante_closed_form_matches_brute_force(n_pulses, nu):
    tau = 2e-3
    spec = sq.dante(n_pulses, TH, TP, tau)
    wz = 2 * np.pi * nu
    b1, b2 = brute_force(spec.times, spec.phases, TH, TP, wz)
    scale = TH / TP
    for order, ref in ((1, b1), (2, b2)):
        got = aht.dante_avg_hamiltonian(n_pulses, TH, TP, tau, wz, order).h_avg
        assert np.abs(got - ref).max() < 1e-10 * scale


def test_dante_closed_form_near_singularities():
    tau = 2e-3
    tau_t = tau + TP
    centres = 2 * np.pi * np.arange(-3, 4) / tau_t
    eps = np.array([0.0, 1e-12, 1e-8, 1e-6, 1e-4, 1e-2, 0.049, 0.051, 0.2]) / tau_t
    w = (centres[:, None] + np.concatenate([-eps, eps])[None, :]).ravel()
    spec = sq.dante(30, TH, TP, tau)
    closed = aht.dante_components(30, TH, TP, tau, w, 2)
    direct = aht.spec_components(spec, w, 2)
    assert all(np.all(np.isfinite(c)) for c in closed)
    assert max(np.abs(c - d).max() for c, d in zip(closed, direct)) < 1e-10 * TH / TP


def test_dirichlet_ratio_limits():
    x = np.array([0.0, np.pi, 2 * np.pi, 1e-9, np.pi + 1e-9])
    assert np.allclose(aht.dirichlet_ratio(5, x), [1, 1, 1, 1, 1], atol=1e-12)
    assert np.allclose(aht.dirichlet_ratio(4, x), [1, -1, 1, 1, -1], atol=1e-12)
    y = np.linspace(0.1, 3.0, 7)
    assert np.allclose(aht.dirichlet_ratio(7, y), np.sin(7 * y) / (7 * np.sin(y)), rtol=1e-12)


def test_pdante_on_resonance():
    spec = sq.pdante_random(20, TH, TP, 30e-3, nu0=250.0, seed=3)
    r2 = aht.pdante_avg_hamiltonian(spec.times, TH, TP, 2 * np.pi * 250.0, 250.0, 2)
    r1 = aht.pdante_avg_hamiltonian(spec.times, TH, TP, 2 * np.pi * 250.0, 250.0, 1)
    a = pulse.transverse_scale(2 * np.pi * 250.0, TH / TP, TP)
    assert r1.transverse_amplitude == pytest.approx(a, rel=1e-12)
    assert np.abs(r2.h_avg - r1.h_avg).max() < 1e-9 * a


def test_pdante_uniform_reproduces_dante():
    spec = sq.dante(30, TH, TP, 2e-3)
    for nu in (0.0, 55.5, 500.0, -731.0):
        wz = 2 * np.pi * nu
        for order in (1, 2):
            d = aht.dante_avg_hamiltonian(30, TH, TP, 2e-3, wz, order).h_avg
            p = aht.pdante_avg_hamiltonian(spec.times, TH, TP, wz, 0.0, order).h_avg
            assert np.abs(d - p).max() < 1e-12 * TH / TP * 30


def test_pdante_requires_increasing_times():
    with pytest.raises(ValueError):
        aht.pdante_avg_hamiltonian([0.0, 1e-3, 1e-3], TH, TP, 1.0, 0.0)


def test_oracle_equivalence_random_small():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for case in range(100):
        n = int(rng.integers(2, 17))
        theta = rng.uniform(0.01, 0.6)
        t_p = rng.uniform(1e-6, 2e-5)
        nu0 = rng.uniform(-500, 500)
        spec = sq.pdante_random(n, theta, t_p, n * rng.uniform(1e-4, 3e-3), nu0, seed=case)
        wz = 2 * np.pi * (nu0 + rng.uniform(-2000, 2000))
        b1, b2 = brute_force(spec.times, spec.phases, theta, t_p, wz)
        for order, ref in ((1, b1), (2, b2)):
            got = components_matrix(aht.spec_components(spec, wz, order))
            worst = max(worst, np.abs(got - ref).max() / (theta / t_p))
    assert worst < 1e-10


def test_bessel_zero_modulation_is_dante():
    w = 2 * np.pi * np.linspace(-900, 900, 37)
    hx, hy, hz, n_used = aht.bessel_components(1.6e-3, 0.0, F, 30, TH, TP, w, n_max=4)
    ref = aht.sequence_components(np.arange(30) * 1.6e-3, np.zeros(30), TH, TP, w, 1)
    assert max(np.abs(c - d).max() for c, d in zip((hx, hy, hz), ref)) < 1e-12 * TH / TP


def test_bessel_matches_direct_sum():
    tau, dtau = member_one()
    w = 2 * np.pi * np.linspace(-1000, 1000, 500)
    times = sq.cosine_closed_form_times(30, tau, dtau, F)
    hx, hy, hz, _ = aht.bessel_components(tau, dtau, F, 30, TH, TP, w, n_max=200)
    ref = aht.sequence_components(times, np.zeros(30), TH, TP, w, 1)
    a = TH / TP
    assert max(np.abs(c - d).max() for c, d in zip((hx, hy, hz), ref)) <= 1e-8 * a


def test_bessel_with_pulse_width_matches_spec():
    tau, dtau = member_one()
    spec = sq.pdante_cosine(30, TH, TP, tau, dtau, F, nu0=80.0)
    w = 2 * np.pi * (80.0 + np.linspace(-1000, 1000, 101))
    hx, hy, hz, _ = aht.bessel_components(tau, dtau, F, 30, TH, TP, w, nu0=80.0, include_pulse_width=True)
    ref = aht.spec_components(spec, w, 1)
    assert max(np.abs(c - d).max() for c, d in zip((hx, hy, hz), ref)) <= 1e-9 * TH / TP


def raw_series(tau, dtau, w, n_max):
    """The truncated Bessel comb without the tail check."""
    from pdante.bessel import jn_symmetric

    z = w * dtau / (2 * np.sin(np.pi / F))
    orders = np.arange(-n_max, n_max + 1)[:, None]
    wn = w[None, :] * tau + 2 * np.pi * orders / F
    chi = w[None, :] * (29 * tau - dtau) / 2 + 30 * orders * np.pi / F + w[None, :] * TP / 2
    a = pulse.transverse_scale(w, TH / TP, TP)
    c = 0.5 * a * (jn_symmetric(n_max, z) * aht.dirichlet_ratio(30, wn / 2) * np.exp(1j * chi)).sum(axis=0)
    return 2 * c.real, -2 * c.imag


def test_bessel_truncation_improves():
    tau, dtau = member_one()
    w = 2 * np.pi * np.linspace(-1000, 1000, 50)
    times = sq.cosine_closed_form_times(30, tau, dtau, F)
    ref = aht.sequence_components(times, np.zeros(30), TH, TP, w, 1)
    errs = []
    for n_max in (1, 2, 4, 8):
        hx, hy = raw_series(tau, dtau, w, n_max)
        errs.append(max(np.abs(hx - ref[0]).max(), np.abs(hy - ref[1]).max()))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3 * TH / TP


def test_bessel_non_convergence_raises():
    with pytest.raises(ConvergenceError):
        aht.bessel_components(1.6e-3, 1.1e-3, F, 30, TH, TP, [2 * np.pi * 900.0], n_max=2, auto=False)


def test_bessel_auto_doubles():
    _, _, _, n_used = aht.bessel_components(1.6e-3, 1.1e-3, F, 30, TH, TP, [2 * np.pi * 900.0], n_max=2)
    assert n_used > 2


def test_bessel_rejects_bad_input():
    with pytest.raises(ValueError):
        aht.bessel_components(1e-3, 2e-3, F, 30, TH, TP, [1.0])
    with pytest.raises(ValueError):
        aht.bessel_components(1e-3, 0.5e-3, 0.5, 30, TH, TP, [1.0])
    with pytest.raises(ValueError):
        aht.bessel_components(1e-3, 0.5e-3, F, 30, TH, TP, [1.0], n_max=0)


def test_member_one_amplitude_near_366():
    tau, dtau = member_one()
    times = sq.cosine_closed_form_times(30, tau, dtau, F)
    wz = 2 * np.pi * (2 - np.sqrt(2)) / tau
    a = pulse.transverse_scale(wz, TH / TP, TP)
    r = aht.pdante_avg_hamiltonian(times, TH, TP, wz, 0.0, 1)
    # the n = 1 comb term alone; the others are bounded by sum |J_n D_N|
    hx, hy, _, n_used = aht.bessel_components(tau, dtau, F, 30, TH, TP, [wz])
    from pdante.bessel import jn_symmetric

    z = wz * dtau / (2 * np.sin(np.pi / F))
    orders = np.arange(-n_used, n_used + 1)
    d = aht.dirichlet_ratio(30, (wz * tau + 2 * np.pi * orders / F) / 2)
    terms = np.abs(jn_symmetric(n_used, np.array([z]))[:, 0] * d)
    one = terms[orders == 1][0]
    assert one == pytest.approx(0.5325, abs=5e-4)
    rest = terms.sum() - one
    assert abs(r.transverse_amplitude / a - one) <= rest


def test_bessel_first_order_result():
    tau, dtau = member_one()
    r = aht.pdante_bessel_first_order(tau, dtau, F, 30, TH, TP, 0.0)
    assert r.order == 1
    assert r.transverse_amplitude == pytest.approx(TH / TP, rel=1e-12)


def test_aht_propagator_on_resonance_dante():
    spec = sq.dante(30, TH, TP, 2e-3)
    assert su2.frobenius_distance(aht.aht_propagator(spec, 0.0, 2), su2.rx(np.pi / 2)) < 1e-12


def test_aht_propagator_at_comb_tooth():
    spec = sq.dante(30, TH, 1e-6, 1e-3)
    wz = 2 * np.pi / (1e-3 + 1e-6)
    u = aht.aht_propagator(spec, wz, 2)
    v = su2.bloch_evolve(u, (0, 0, 1))
    angle = np.arccos(v[2])
    assert angle == pytest.approx(np.pi / 2 * float(pulse.sinc(wz * 1e-6 / 2)), rel=1e-9)
    assert angle == pytest.approx(np.pi / 2, rel=1e-5)


def test_aht_propagator_unitary():
    rng = np.random.default_rng(5)
    for seed in range(20):
        spec = sq.pdante_random(12, 0.3, 1e-5, 12e-3, rng.uniform(-100, 100), seed)
        u = aht.aht_propagator(spec, rng.uniform(-1e4, 1e4), 2)
        assert np.linalg.norm(u.conj().T @ u - su2.IDENTITY) < 1e-12
        assert su2.is_hermitian(aht.pdante_avg_hamiltonian(spec.times, 0.3, 1e-5, 1.0, spec.nu0).h_avg, 1e-12)


def test_resonance_line_arithmetic():
    assert aht.dante_resonance_lines(np.pi / 2, 1000, 1, 0.4) == 100
    slope1 = aht.dante_line_position(2 * np.pi, 1000, 1, 1.0)
    assert aht.dante_line_position(2 * np.pi, 1000, 2, 1.0) == pytest.approx(slope1 / 2)
    assert aht.dante_resonance_lines(np.pi / 2, 1000, 1, 0.0) == 0
    lo, hi = aht.dante_ridge_lines(np.pi / 2, 1000, 1, 0.4)
    assert (lo, hi) == (round(100.1 - 0.6), round(100.1 + 0.6))


def test_resonance_line_rejects_zero():
    with pytest.raises(ValueError):
        aht.dante_resonance_lines(np.pi / 2, 1000, 0, 0.4)


def test_comb_predictions():
    preds = aht.pdante_resonances(1 / 625.13, F, RATIO, (-3, 3), (-3, 3))
    assert (preds[0].m, preds[0].n, preds[0].scale) == (0, 0, 1.0)
    by_mn = {(p.m, p.n): p for p in preds}
    assert by_mn[(2, 1)].delta_nu == pytest.approx(366.2, abs=0.05)
    assert by_mn[(-2, -1)].delta_nu == pytest.approx(-366.2, abs=0.05)
    assert abs(by_mn[(2, 1)].scale) == pytest.approx(0.5325, abs=5e-4)
    assert by_mn[(1, 0)].scale == pytest.approx(0.053, abs=5e-4)
    assert by_mn[(1, 0)].suppressed and not by_mn[(2, 1)].suppressed
    for p in preds:
        assert p.delta_nu == pytest.approx(625.13 * (p.m - np.sqrt(2) * p.n), rel=1e-12, abs=1e-9)
    assert [abs(p.delta_nu) for p in preds] == sorted(abs(p.delta_nu) for p in preds)


def test_comb_argument_matches_bessel_form():
    tau, dtau = member_one()
    p = next(r for r in aht.pdante_resonances(tau, F, RATIO, (0, 3), (0, 2)) if (r.m, r.n) == (2, 1))
    z = 2 * np.pi * p.delta_nu * dtau / (2 * np.sin(np.pi / F))
    assert p.bessel_argument == pytest.approx(z, rel=1e-12)


def test_comb_rejects_bad_input():
    with pytest.raises(ValueError):
        aht.pdante_resonances(0.0, F, RATIO, (0, 1), (0, 1))
    with pytest.raises(ValueError):
        aht.pdante_resonances(1e-3, 0.0, RATIO, (0, 1), (0, 1))


def test_validity_window():
    w = aht.validity_window(TH, np.pi / 2, 1.6e-3 + TP)
    assert w == pytest.approx(12.49, abs=0.01)
    assert aht.validity_window(TH, np.pi / 2, 1.6e-3 + TP, constant=2 / 5) == pytest.approx(w * 2 / 3)


@pytest.mark.parametrize("order", [0, 3])
def test_bad_order(order):
    with pytest.raises(ValueError):
        aht.dante_components(5, TH, TP, 1e-3, [0.0], order)
