import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qecclab._kernels import BACKEND, EXACT_FLAG, _pykernels
from qecclab.channels import PauliChannelParams, sample_codes
from qecclab.toric import matching_bruteforce

try:
    from qecclab._kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_backend_selected():
    assert BACKEND in ("cython", "python")
    assert EXACT_FLAG == 4


def test_env_forces_fallback():
    env = dict(os.environ, QECCLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import qecclab; print(qecclab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True, cwd="/")
    assert out.stdout.strip() == "python"


@needs_c
@pytest.mark.parametrize("d,p", [(3, 0.05), (3, 0.2), (5, 0.08), (7, 0.06), (5, 0.3)])
def test_backends_bit_identical(d, p):
    rng = np.random.default_rng(d * 100 + int(p * 100))
    codes = sample_codes(PauliChannelParams.depolarizing(p), (400, 2 * d * d), rng)
    np.testing.assert_array_equal(_ckernels.decode_toric_batch(codes, d), _pykernels.decode_toric_batch(codes, d))


@needs_c
def test_compiled_rejects_bad_shapes():
    with pytest.raises(ValueError):
        _ckernels.decode_toric_batch(np.zeros((2, 17), dtype=np.uint8), 3)
    with pytest.raises(ValueError):
        _ckernels.decode_toric_batch(np.zeros(18, dtype=np.uint8), 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 6, 8, 10]))
def test_dp_matching_against_bruteforce(seed, m):
    w = np.random.default_rng(seed).integers(1, 20, size=(m, m)).astype(float)
    w = np.triu(w, 1) + np.triu(w, 1).T
    total, pairs = _pykernels.min_weight_matching(w)
    assert total == matching_bruteforce(w)[0]
    assert sorted(i for pr in pairs for i in pr) == list(range(m))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_blossom_against_dp(seed):
    rng = np.random.default_rng(seed)
    m = 16
    w = rng.integers(1, 30, size=(m, m)).astype(float)
    w = np.triu(w, 1) + np.triu(w, 1).T
    assert _pykernels._blossom_matching(w)[0] == _pykernels.dp_matching_weight(w)
    big = rng.integers(1, 30, size=(20, 20)).astype(float)
    big = np.triu(big, 1) + np.triu(big, 1).T
    total, pairs = _pykernels.min_weight_matching(big)
    assert len(pairs) == 10 and total == sum(big[i, j] for i, j in pairs)


def test_odd_matching_rejected():
    with pytest.raises(ValueError):
        _pykernels.min_weight_matching(np.zeros((3, 3)))


def test_torus_distance():
    assert _pykernels.toric_distance((0, 0), (0, 4), 5) == 1
    assert _pykernels.toric_distance((0, 0), (2, 2), 5) == 4
    assert _pykernels.toric_distance((1, 1), (1, 1), 5) == 0
