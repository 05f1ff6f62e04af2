import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qecclab.channels import DomainError
from qecclab.interleavers import (
    InterleaverError,
    Permutation,
    apply_interleaver,
    deinterleave,
    dispersion,
    identity_interleaver,
    is_primitive_root,
    jpl,
    random_interleaver,
    s_random,
    spread,
    welch_costas,
)
from qecclab.pauli import PauliString


def brute_spread(perm):
    """Largest s with |pi(i)-pi(j)| >= s for all 0 < |i-j| <= s, by direct search."""
    n = len(perm)
    best = 0
    for s in range(1, n):
        if all(abs(perm[i] - perm[j]) >= s for i in range(n) for j in range(n) if 0 < abs(i - j) <= s):
            best = s
        else:
            break
    return best


def brute_dispersion(perm):
    n = len(perm)
    vecs = {(j - i, perm[j] - perm[i]) for i, j in itertools.combinations(range(n), 2)}
    return len(vecs) / (n * (n - 1) / 2)


def test_permutation_validation(tmp_path):
    with pytest.raises(InterleaverError):
        Permutation(np.array([0, 0, 1]))
    with pytest.raises(InterleaverError):
        Permutation(np.array([0, 3]))
    p = Permutation(np.array([2, 0, 1]))
    path = tmp_path / "p.txt"
    p.to_file(path)
    assert path.read_text() == "3\n2 0 1\n"
    assert Permutation.from_file(path) == p
    path.write_text("4\n0 1 2\n")
    with pytest.raises(InterleaverError):
        Permutation.from_file(path)


def test_random_small():
    rng = np.random.default_rng(0)
    assert random_interleaver(1, rng) == identity_interleaver(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2**32 - 1))
def test_metrics_against_brute_force(n, seed):
    p = random_interleaver(n, np.random.default_rng(seed))
    assert spread(p) == brute_spread(p.perm.tolist())
    assert dispersion(p) == pytest.approx(brute_dispersion(p.perm.tolist()), abs=1e-15)
    assert 0 < dispersion(p) <= 1


@pytest.mark.parametrize("n", [2, 5, 40])
def test_identity_metrics(n):
    p = identity_interleaver(n)
    assert spread(p) == 1
    assert dispersion(p) == pytest.approx(2 / n)


def test_s_random_small_exhaustive():
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = s_random(10, 1, rng).perm
        for i, j in itertools.combinations(range(10), 2):
            if j - i <= 1:
                assert abs(p[i] - p[j]) > 1


@settings(max_examples=15, deadline=None)
@given(st.integers(30, 200), st.integers(0, 2**32 - 1))
def test_s_random_condition(n, seed):
    S = max(1, int(np.sqrt(n / 2)) - 1)
    p = s_random(n, S, np.random.default_rng(seed))
    perm = p.perm
    for k in range(1, S + 1):
        assert np.abs(perm[k:] - perm[:-k]).min() > S
    assert spread(p) >= S


def test_s_random_impossible():
    with pytest.raises(InterleaverError) as info:
        s_random(6, 4, np.random.default_rng(0), max_restarts=2)
    assert info.value.attempts == 2


def test_welch_costas():
    assert welch_costas(6, 3).perm.tolist() == [0, 2, 1, 5, 3, 4]
    with pytest.raises(DomainError):
        welch_costas(7, 3)  # 8 is not prime
    with pytest.raises(DomainError):
        welch_costas(6, 2)  # 2 has order 3 mod 7
    assert is_primitive_root(2987, 3001)
    assert not is_primitive_root(2, 7)


def test_welch_costas_large():
    p = welch_costas(3000, 2987)
    assert p.N == 3000
    assert dispersion(p) == 1.0
    assert spread(p) == 1


def test_jpl_small_and_errors():
    assert sorted(jpl(16, 8).perm.tolist()) == list(range(16))
    with pytest.raises(DomainError):
        jpl(20, 8)


def test_jpl_3000_measured():
    p = jpl(3000)
    assert dispersion(p) == pytest.approx(0.35, abs=0.01)
    # closed-lag convention gives 15, the one-higher open-lag convention 16
    assert spread(p) == 15
    assert spread(p, open_lag=True) == 16


def test_table_metrics_random_and_s_random():
    rng = np.random.default_rng(1)
    r = random_interleaver(3000, rng)
    assert spread(r) == 1
    assert dispersion(r) == pytest.approx(0.81, abs=0.01)
    s = s_random(3000, 25, rng)
    assert spread(s) == 25
    assert dispersion(s) == pytest.approx(0.8136, abs=0.01)


@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_apply_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    p = random_interleaver(n, rng)
    e = PauliString.from_codes(rng.integers(0, 4, n))
    out = apply_interleaver(p, e)
    assert out.weight == e.weight
    assert deinterleave(p, out) == e
    assert out.codes().tolist() == [e.codes()[p.perm[i]] for i in range(n)]
    assert apply_interleaver(identity_interleaver(n), e) == e


def test_apply_length_mismatch():
    with pytest.raises(ValueError):
        apply_interleaver(identity_interleaver(3), PauliString.identity(4))
