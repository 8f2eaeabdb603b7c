import mpmath
import numpy as np
import pytest

from inudft.elliptic import dn_comp, ellipk_comp

# m = 1 - kc^2 must not round to 1 in the reference
mpmath.mp.dps = 50


@pytest.mark.parametrize("kc", [0.9, 0.5, 0.1, 1e-3, 1e-8])
def test_complete_integral(kc):
    m = 1 - kc ** 2
    ref = float(mpmath.ellipk(mpmath.mpf(1) - mpmath.mpf(kc) ** 2))
    assert abs(ellipk_comp(kc) - ref) < 1e-13 * ref, m


@pytest.mark.parametrize("kc", [0.7, 0.2, 1e-4, 1e-10])
def test_dn_against_mpmath(kc):
    K = ellipk_comp(kc)
    u = np.linspace(0, K, 9)
    mp = mpmath.mpf(1) - mpmath.mpf(kc) ** 2
    ref = np.array([float(mpmath.ellipfun("dn", mpmath.mpf(float(v)), m=mp)) for v in u])
    got = dn_comp(u, kc)
    assert np.max(np.abs(got - ref) / ref) < 1e-12
    # dn(K) = kc exactly in theory
    assert abs(got[-1] - kc) < 1e-12 * kc
