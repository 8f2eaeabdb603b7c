"""Complete elliptic integral and Jacobi ``dn`` for moduli close to one.

Both routines take the *complementary* modulus as input.  The Zolotarev shift
construction works with moduli extremely close to one, where passing the
parameter ``m = k**2`` (as ``scipy.special.ellipj`` expects) rounds to 1 and
loses every digit of information about the small complementary modulus.
"""

import numpy as np

__all__ = ["agm_sequence", "ellipk_comp", "dn_comp"]

_MAXITER = 64


def agm_sequence(kc):
    """AGM iterates ``(a_n, c_n)`` starting at ``a_0 = 1``, ``b_0 = kc``.

    ``c_0 = sqrt(1 - kc**2)`` is the modulus; ``c_{n+1} = (a_n - b_n)/2`` is
    formed from the difference directly so no cancellation occurs.
    """
    kc = float(kc)
    if not 0.0 < kc <= 1.0:
        raise ValueError(f"complementary modulus must lie in (0, 1], got {kc}")
    a, b = 1.0, kc
    As = [a]
    Cs = [np.sqrt((1.0 - kc) * (1.0 + kc))]
    for _ in range(_MAXITER):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        As.append(a)
        Cs.append(c)
        if abs(c) <= 4 * np.finfo(float).eps * a:
            break
    return np.array(As), np.array(Cs)


def ellipk_comp(kc):
    """``K(k)`` for modulus ``k = sqrt(1 - kc**2)``: ``pi / (2 AGM(1, kc))``."""
    As, _ = agm_sequence(kc)
    return np.pi / (2.0 * As[-1])


def _sech(x):
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def dn_comp(u, kc):
    """Jacobi ``dn(u, k)`` with ``k = sqrt(1 - kc**2)``.

    For ``kc <= 1/4`` the hyperbolic series (imaginary transformation of the
    theta expansion) ``dn(u) = s * sum_j sech(s (u - 2jK))``, ``s = pi/(2K')``,
    is used; its terms shrink like the complementary nome, so a few suffice
    and no cancellation occurs near ``u = K/2``.  Otherwise descending Landen
    steps are used, folded into ``[0, K/2]`` with ``dn(u) dn(K - u) = kc``.
    """
    u = np.asarray(u, dtype=float)
    kc = float(kc)
    if kc <= 0.25:
        K = ellipk_comp(kc)
        Kp = ellipk_comp(np.sqrt((1.0 - kc) * (1.0 + kc)))
        s = np.pi / (2.0 * Kp)
        # dn is even with period 2K
        v = np.abs(np.mod(u + K, 2.0 * K) - K)
        j = np.arange(-8, 9)
        return s * np.sum(_sech(s * (v[..., None] - 2.0 * j * K)), axis=-1)
    As, Cs = agm_sequence(kc)
    N = len(As) - 1
    if N == 0:
        # kc == 1: modulus zero, dn is identically one
        return np.ones_like(u)
    K = np.pi / (2.0 * As[N])
    v = np.abs(np.mod(u + K, 2.0 * K) - K)
    far = v > 0.5 * K
    out = _dn_landen(np.where(far, K - v, v), As, Cs, N)
    return np.where(far, kc / out, out)


def _dn_landen(u, As, Cs, N):
    phi = (2.0 ** N) * As[N] * u
    prev = phi
    for j in range(N, 0, -1):
        prev = phi
        phi = 0.5 * (phi + np.arcsin(np.clip(Cs[j] / As[j] * np.sin(phi), -1.0, 1.0)))
    return np.cos(phi) / np.cos(prev - phi)
