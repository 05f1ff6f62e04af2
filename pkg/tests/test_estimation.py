import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import norm

from qecclab.channels import DomainError, PauliChannelParams, pauli_from_alpha, sample_codes
from qecclab.estimation import (
    AsymEstimate,
    EstimationError,
    SensitivityCurve,
    adaptive_simpson,
    averaged_wer,
    cramer_rao_var,
    default_init,
    estimator_pdf,
    fisher,
    online_decode,
    online_decode_pooled,
    online_estimate_step,
    online_estimate_step_asym,
    online_expectation,
    online_fixed_points,
    population_fixed_point,
)
from qecclab.small_codes import coset_probabilities, error_index, five_qubit_code, posterior_marginals

CODE = five_qubit_code()


def test_fisher_values():
    assert fisher(0.25, "pure") == pytest.approx(1.8)
    assert fisher(0.25, "epr") == pytest.approx(3.0)
    for p in np.linspace(0.01, 0.99, 50):
        assert fisher(p, "epr") > fisher(p, "pure")
    assert cramer_rao_var(0.25, "epr", 100) == pytest.approx(1 / 300)
    with pytest.raises(DomainError):
        fisher(0.0, "pure")
    with pytest.raises(ValueError):
        fisher(0.2, "mixed")
    with pytest.raises(DomainError):
        cramer_rao_var(0.2, "pure", 0)


def test_estimator_pdf():
    dist = estimator_pdf(0.1, "pure", 50)
    assert quad(dist.pdf, 0, 1, points=[0.1], epsabs=1e-13)[0] == pytest.approx(1, abs=1e-9)
    xs = np.linspace(0, 1, 2001)
    assert xs[np.argmax(dist.pdf(xs))] == pytest.approx(0.1, abs=1e-3)
    assert estimator_pdf(0.1, "epr", 10**15).sigma < 1e-6


def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0, math.pi, 1e-12) == pytest.approx(2, abs=1e-10)


def test_sensitivity_curve(tmp_path):
    c = SensitivityCurve(np.array([0.1, 0.2]), np.array([1.0, 3.0]))
    assert c(0.15) == pytest.approx(2.0)
    assert c(0.0) == 1.0 and c(0.9) == 3.0
    path = tmp_path / "c.csv"
    c.to_csv(path)
    back = SensitivityCurve.from_csv(path)
    assert np.array_equal(back.p_hat, c.p_hat) and np.array_equal(back.wer, c.wer)
    with pytest.raises(ValueError):
        SensitivityCurve(np.array([0.2, 0.1]), np.array([1.0, 1.0]))


def test_averaged_wer_trivial_cases():
    curve = SensitivityCurve(np.linspace(0, 1, 11), np.linspace(0, 1, 11) ** 2)
    assert averaged_wer(SensitivityCurve.constant(0.3), 0.1, "pure", 20) == pytest.approx(0.3, rel=1e-6)
    assert averaged_wer(curve, 0.1, "epr", 10**20) == pytest.approx(float(curve(0.1)), rel=1e-6)


@pytest.mark.parametrize("p0,p,N", [(0.12, 0.1, 200), (0.05, 0.1, 30), (0.3, 0.1, 5)])
def test_averaged_wer_step_closed_form(p0, p, N):
    curve = SensitivityCurve(np.array([0.0, p0, p0, 1.0]), np.array([0.0, 0.0, 1.0, 1.0]))
    sigma = math.sqrt(cramer_rao_var(p, "pure", N))
    mass = norm.cdf((1 - p) / sigma) - norm.cdf(-p / sigma)
    ref = (norm.cdf((1 - p) / sigma) - norm.cdf((p0 - p) / sigma)) / mass
    assert averaged_wer(curve, p, "pure", N) == pytest.approx(ref, rel=1e-6)


def test_averaged_wer_monotone_in_n():
    xs = np.linspace(0, 1, 41)
    curve = SensitivityCurve(xs, 0.01 + xs**3)
    vals = [averaged_wer(curve, 0.1, "epr", N) for N in (5, 20, 100, 1000, 10**5)]
    gaps = [abs(v - float(curve(0.1))) for v in vals]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4


def test_estimator_steps():
    assert online_estimate_step(np.tile([1.0, 0, 0, 0], (5, 1))) == 0
    assert online_estimate_step(np.tile([0.95, 0.02, 0.01, 0.02], (5, 1))) == pytest.approx(0.05)
    sym = online_estimate_step_asym(np.tile([0.7, 0.1, 0.1, 0.1], (5, 1)))
    assert sym.alpha == pytest.approx(1.0)
    zero = online_estimate_step_asym(np.tile([1.0, 0, 0, 0], (5, 1)))
    assert zero.as_tuple() == (0, 0, 0) and zero.alpha is None
    assert AsymEstimate(0.01, 0.01, 0.1).alpha == pytest.approx(10)


def test_step_on_posteriors_matches_hand_sum():
    params = PauliChannelParams.depolarizing(0.05)
    m = posterior_marginals(CODE, (0, 1, 1, 1), params)
    t = CODE.table
    w = t.probabilities(params) * (t.syn == 7)
    hand = sum(w[t.codes[:, i] != 0].sum() for i in range(5)) / (5 * w.sum())
    assert online_estimate_step(m) == pytest.approx(hand, abs=1e-14)
    a = online_estimate_step_asym(m)
    assert a.p == pytest.approx(online_estimate_step(m), abs=1e-12)


def test_default_init():
    p_star = default_init(CODE)
    assert p_star == pytest.approx(0.138544, abs=1e-6)
    np.testing.assert_allclose(default_init(CODE, "pauli"), p_star / 3)


def test_init_truth_constant_at_tiny_p():
    res = online_decode(CODE, (0, 0, 0, 0), init=1e-10, max_iters=5)
    assert all(abs(v - 1e-10) < 1e-9 for v in res.trajectory)
    assert res.converged and res.logical_class == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 15), st.floats(0.001, 0.5), st.sampled_from(["depolarizing", "pauli"]))
def test_trajectory_bounds(si, init, kind):
    bits = tuple((si >> (3 - i)) & 1 for i in range(4))
    res = online_decode(CODE, bits, init=init, channel_kind=kind, max_iters=8)
    for est in res.trajectory:
        arr = np.atleast_1d(est)
        assert np.all(arr >= 0) and arr.sum() <= 1 + 1e-12
    assert res.iterations <= 8


def test_bad_channel_kind():
    with pytest.raises(ValueError):
        online_decode(CODE, (0, 0, 0, 0), init=0.1, channel_kind="amplitude")
    with pytest.raises(ValueError):
        online_decode(CODE, (0, 0, 0, 0), init=[0.1, 0.1], channel_kind="pauli")


def test_estimation_error_carries_trajectory():
    err = EstimationError("boom", [0.1, 0.2])
    assert err.trajectory == [0.1, 0.2]


def _monte_carlo_final(p, blocks, seed, init=None):
    params = PauliChannelParams.depolarizing(p)
    fixed = online_fixed_points(CODE, init)
    codes = sample_codes(params, (blocks, 5), np.random.default_rng(seed))
    syn = CODE.table.syn[error_index(codes)]
    return fixed[syn], online_expectation(CODE, params, fixed)


def test_per_block_mean_matches_exact_oracle():
    vals, oracle = _monte_carlo_final(0.05, 10**4, 1)
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - oracle) <= 3 * se
    # the per-block estimate is biased upwards at this p
    assert 0.13 < oracle < 0.14


def test_exact_oracle_is_a_weighted_sum():
    params = PauliChannelParams.depolarizing(0.05)
    fixed = online_fixed_points(CODE)
    ps = coset_probabilities(CODE, params).sum(axis=1)
    assert online_expectation(CODE, params, fixed) == pytest.approx(float(ps @ fixed), abs=1e-15)


def test_population_fixed_point_recovers_asymmetry():
    truth = pauli_from_alpha(0.1, 10)
    est = population_fixed_point(CODE, truth, channel_kind="pauli")
    np.testing.assert_allclose(est, [truth.px, truth.py, truth.pz], atol=1e-8)
    dep = population_fixed_point(CODE, PauliChannelParams.depolarizing(0.05))
    assert dep == pytest.approx(0.05, abs=1e-8)


def test_pooled_window():
    truth = pauli_from_alpha(0.1, 10)
    codes = sample_codes(truth, (20000, 5), np.random.default_rng(12))
    syn = CODE.table.syn[error_index(codes)]
    res = online_decode_pooled(CODE, syn, channel_kind="pauli", max_iters=200)
    est = AsymEstimate(*res.final)
    assert est.alpha == pytest.approx(10, rel=0.35)
    assert est.p == pytest.approx(0.1, rel=0.1)
    assert res.logical_class.shape == syn.shape
    with pytest.raises(ValueError):
        online_decode_pooled(CODE, [], channel_kind="pauli")
