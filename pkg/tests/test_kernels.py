"""JIT kernels agree with their numpy fallbacks; env flag selects the lane."""

import os
import subprocess
import sys

import numpy as np

from hyperdisc import _kernels


def test_horner_matches_numpy():
    rng = np.random.default_rng(5)
    coeffs = rng.normal(size=7)
    xs = rng.normal(size=40)
    got = _kernels.horner_many(coeffs, xs)
    want = _kernels.horner_many_numpy(coeffs, xs)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-12)


def test_power_sum_matches_numpy_batch():
    rng = np.random.default_rng(6)
    tops = rng.normal(size=(24, 6))
    for k in (2, 4, 6):
        got = _kernels.power_sums_batch(np.ascontiguousarray(tops[:, :k]), k)
        want = _kernels.power_sums_batch_numpy(tops[:, :k], k)
        assert np.allclose(got, want, rtol=1e-10, atol=1e-12)


def test_power_sum_known_value():
    # x^3 - 6x^2 + 11x - 6 has roots 1,2,3: p_3 = 36.
    top = np.array([-6.0, 11.0, -6.0])
    assert _kernels.power_sum_from_top_coeffs(top, 3) == 36.0


def test_newton_polish_improves_roots():
    coeffs = np.array([2.0, -3.0, 1.0])  # (x-1)(x-2)
    dcoeffs = np.array([-3.0, 2.0])
    rough = np.array([0.9, 2.2])
    polished = _kernels.newton_polish(coeffs, dcoeffs, rough, 20)
    assert np.allclose(sorted(polished), [1.0, 2.0], atol=1e-12)


def test_env_flag_selects_fallback():
    code = (
        "import hyperdisc._kernels as k; import numpy as np;"
        "print(k.USING_NUMBA);"
        "print(k.power_sum_from_top_coeffs(np.array([-6.,11.,-6.]), 3))"
    )
    env = dict(os.environ, HYPERDISC_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env=env, check=True)
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "False"
    assert float(lines[1]) == 36.0
