import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from qecclab.channels import DomainError
from qecclab.decoherence import (
    TruncGauss,
    TvPreset,
    builtin_presets,
    dump_presets,
    get_preset,
    load_presets,
    lorentzian_psd,
    lorentzian_series,
    periodogram_at_zero,
    psd_sigma,
    sample_t1,
    sample_t2,
    simulate_t1_series,
    tv_gamma,
    tv_gamma_draw,
)


def test_builtin_table():
    table = {p.name: p for p in builtin_presets()}
    assert set(table) == {"QA_C5", "QB_C5", "QA_C6", "QB_C6"}
    qa = table["QA_C5"]
    assert (qa.mu_t1, qa.sigma_t1, qa.h0, qa.A1, qa.inv_tau01, qa.A2, qa.inv_tau02) == (
        44.49, 11.7, 2e-3, 5.2, 142.9, 2.6, 83.3)
    assert table["QB_C5"].mu_t1 == 81.63 and table["QB_C5"].sigma_t1 == 17.01
    assert table["QA_C6"].mu_t1 == 46.64 and table["QA_C6"].sigma_t1 == 10.24
    assert table["QB_C6"].mu_t1 == 71.22 and table["QB_C6"].sigma_t1 == 14.31
    assert round(qa.cv, 3) == 0.263
    assert round(table["QA_C6"].cv, 2) == 0.22


def test_preset_validation():
    with pytest.raises(DomainError):
        TvPreset("bad", 10, 0, 1, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        TvPreset("bad", 10, 12, 1, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        TvPreset("bad", 10, 1, 1, 1, 1, 1, 1, mu_tphi=5.0)
    with pytest.raises(KeyError):
        get_preset("nope")


def test_preset_file_round_trip(tmp_path):
    path = tmp_path / "presets.json"
    custom = get_preset("QA_C5").with_cv(0.1)
    dump_presets([custom, get_preset("QB_C6")], path)
    back = load_presets(path)
    assert back == [custom, get_preset("QB_C6")]
    assert get_preset(custom.name, back) == custom
    path.write_text(json.dumps([{"name": "x", "bogus": 1}]))
    with pytest.raises(ValueError):
        load_presets(path)


@pytest.mark.parametrize("mu,sigma,lo,hi", [(44.49, 11.7, 0, math.inf), (1.0, 0.25, 0, math.inf), (0.1, 0.3, 0, 1)])
def test_truncgauss_against_scipy(mu, sigma, lo, hi):
    dist = TruncGauss(mu, sigma, lo, hi)
    ref = stats.truncnorm((lo - mu) / sigma, (hi - mu) / sigma, loc=mu, scale=sigma)
    xs = np.linspace(max(lo, mu - 4 * sigma), min(hi, mu + 4 * sigma), 13)
    np.testing.assert_allclose(dist.pdf(xs), ref.pdf(xs), rtol=1e-10)
    np.testing.assert_allclose(dist.cdf(xs), ref.cdf(xs), rtol=1e-10, atol=1e-14)
    assert dist.mean() == pytest.approx(ref.mean(), rel=1e-10)
    assert dist.variance() == pytest.approx(ref.var(), rel=1e-9)


def test_truncgauss_pdf_normalised():
    from scipy.integrate import quad

    d = TruncGauss(0.1, 0.3, 0.0, 1.0)
    assert quad(d.pdf, 0, 1, epsabs=1e-13)[0] == pytest.approx(1.0, abs=1e-9)


def test_t1_draws():
    rng = np.random.default_rng(3)
    dist = TruncGauss(1.0, 0.6)
    draws = sample_t1(dist, rng, 10**6)
    assert draws.min() >= 0
    se = math.sqrt(dist.variance() / draws.size)
    assert abs(draws.mean() - dist.mean()) <= 4 * se
    assert sample_t1(TruncGauss(44.49, 0.0), rng) == 44.49


def test_t2_draws_t1_limited():
    rng = np.random.default_rng(0)
    t1 = np.array([10.0, 20.0])
    np.testing.assert_array_equal(sample_t2(get_preset("QA_C5"), t1, rng), 2 * t1)
    with_phi = TvPreset("phi", 40, 5, 1e-3, 1, 100, 1, 100, mu_tphi=60.0, sigma_tphi=6.0)
    t2 = sample_t2(with_phi, t1, rng)
    assert np.all(t2 < 2 * t1) and np.all(t2 > 0)


def test_tv_gamma():
    g = 0.2
    assert tv_gamma(g, 50.0, 50.0) == pytest.approx(g, abs=1e-15)
    assert tv_gamma(g, 25.0, 50.0) == pytest.approx(1 - (1 - g) ** 2, abs=1e-15)
    rng = np.random.default_rng(1)
    assert tv_gamma_draw(g, 44.49, TruncGauss(44.49, 0.0), rng) == pytest.approx(g, abs=1e-15)
    with pytest.raises(DomainError):
        tv_gamma_draw(0.7, 44.49, TruncGauss(44.49, 1.0), rng)
    with pytest.raises(DomainError):
        tv_gamma_draw(0.0, 44.49, TruncGauss(44.49, 1.0), rng)


@given(st.floats(1e-6, 1 - math.exp(-1)), st.floats(1e-9, 1e4))
def test_tv_gamma_in_open_interval(g, t1):
    out = float(tv_gamma(g, t1, 1.0))
    assert 0 < out < 1


def test_constant_series_without_noise():
    quiet = TvPreset("quiet", 50.0, 5.0, 1e-300, 1e-300, 100.0, 1e-300, 100.0)
    x = simulate_t1_series(quiet, 1.0, 100, np.random.default_rng(0))
    np.testing.assert_allclose(x, 50.0, atol=1e-12)
    with pytest.raises(DomainError):
        simulate_t1_series(quiet, 1e-4, 10, np.random.default_rng(0))
    with pytest.raises(DomainError):
        simulate_t1_series(quiet, 1.0, 0, np.random.default_rng(0))


def test_lorentzian_autocovariance():
    fs, tau0, A = 1.0, 5.0, 1.3
    n = 4 * 10**6
    x = lorentzian_series(A, tau0, fs, n, np.random.default_rng(7))
    x = x - x.mean()
    for k in (0, 1, 3, 8):
        emp = float(np.dot(x[: n - k], x[k:]) / (n - k))
        assert emp == pytest.approx(2 * A * A * math.exp(-k / (fs * tau0)), rel=0.05)


def test_periodogram_at_zero():
    fs, tau0, A, h0 = 1.0, 4.0, 1.0, 0.5
    rng = np.random.default_rng(9)
    n = 2**21
    x = lorentzian_series(A, tau0, fs, n, rng) + rng.normal(0, math.sqrt(h0 * fs / 2), n)
    est = periodogram_at_zero(x, fs, 512)
    assert est == pytest.approx(lorentzian_psd(0.0, A, tau0) + h0 / 2, rel=0.1)


def test_series_stationary_and_variance():
    preset = get_preset("QA_C5")
    fs = 0.01
    x = simulate_t1_series(preset, fs, 2 * 10**6, np.random.default_rng(2))
    expected_var = 2 * preset.A1**2 + 2 * preset.A2**2 + preset.h0 * fs / 2
    assert x.var() == pytest.approx(expected_var, rel=0.05)
    half = x.size // 2
    # standard error of a correlated mean via batch means
    batches = x.reshape(200, -1).mean(axis=1)
    se = batches.std(ddof=1) / math.sqrt(100)
    assert abs(x.mean() - preset.mu_t1) < 4 * se / math.sqrt(2)
    assert abs(x[:half].mean() - x[half:].mean()) < 3 * math.sqrt(2) * se


def test_psd_sigma_below_table():
    qa = get_preset("QA_C5")
    assert psd_sigma(qa) == pytest.approx(math.sqrt(2 * 5.2**2 + 2 * 2.6**2))
    assert round(psd_sigma(qa), 1) == 8.2
    assert psd_sigma(qa) < qa.sigma_t1
    assert psd_sigma(qa, 1e-3) == pytest.approx(psd_sigma(qa), rel=1e-2)
