"""
Special functions for the averaged oscillator coefficients.

Complete elliptic integrals come from the arithmetic-geometric mean, Jacobi
elliptic functions from the descending Landen transformation, and Ei from its
power series joined to the asymptotic expansion at x = 40. Every function
broadcasts over numpy arrays and returns a plain float for scalar input.

Callers that know the complementary modulus k' = sqrt(1 - k^2) exactly (the
Duffing geometry does) can pass it as ``kc`` and avoid forming 1 - k^2.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from fpte.constants import COMPLEMENTARY_SWITCH, EI_SERIES_MAX
from fpte.errors import DomainError

EULER_GAMMA = 0.57721566490153286061

_MAX_ITER = 64
_EPS = float(np.finfo(float).eps)


class JacobiTriple(NamedTuple):
    """Values of sn, cn and dn at one (u, k) pair or a broadcast grid of them."""

    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def _as_output(values: np.ndarray, shape: tuple):
    values = values.reshape(shape)
    return float(values) if values.ndim == 0 else values


def _moduli(k, kc, allow_one: bool) -> tuple[np.ndarray, np.ndarray]:
    """Validate the modulus and return flattened (k, k') arrays."""
    k = np.asarray(k, dtype=float)
    if kc is None:
        if np.any(~np.isfinite(k)) or np.any(k < 0.0) or np.any(k > 1.0):
            raise DomainError(f"elliptic modulus outside [0, 1]: {k}")
        kc = np.sqrt((1.0 - k) * (1.0 + k))
    else:
        kc = np.asarray(kc, dtype=float)
        if np.any(k < 0.0) or np.any(kc < 0.0) or np.any(kc > 1.0):
            raise DomainError(f"invalid modulus pair k={k}, k'={kc}")
    if not allow_one and np.any(kc <= 0.0):
        raise DomainError("K(k) diverges at k = 1; modulus must satisfy k < 1")
    k, kc = np.broadcast_arrays(k, kc)
    return k.astype(float), kc.astype(float)


def _agm(k: np.ndarray, kc: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Run the AGM sequence a_0 = 1, b_0 = k', c_0 = k.

    Returns:
        tuple: (a_N, sum_n 2^(n-1) c_n^2); the sum equals 1 - E/K.
    """
    a = np.ones_like(kc)
    b = kc.copy()
    c = k.copy()
    deficit = 0.5 * c * c
    weight = 0.5
    for _ in range(_MAX_ITER):
        if np.all(c <= _EPS * a):
            break
        a_next = 0.5 * (a + b)
        b = np.sqrt(a * b)
        # c_{n+1} = (a_n - b_n) / 2 without the subtraction
        c = c * c / (4.0 * a_next)
        a = a_next
        weight *= 2.0
        deficit = deficit + weight * c * c
    return a, deficit


def _near_one(kc: np.ndarray) -> np.ndarray:
    return kc * kc < COMPLEMENTARY_SWITCH


def complete_elliptic_K(k, kc=None):
    """
    Complete elliptic integral of the first kind K(k) for 0 <= k < 1.

    Args:
        k: Modulus (scalar or array)
        kc: Optional complementary modulus sqrt(1 - k^2)

    Returns:
        K(k) with the shape of the broadcast inputs
    """
    k, kc = _moduli(k, kc, allow_one=False)
    shape = k.shape
    k, kc = k.ravel(), kc.ravel()
    out = np.empty(k.shape)

    near = _near_one(kc)
    if np.any(near):
        log_term = np.log(4.0 / kc[near])
        out[near] = log_term + 0.25 * kc[near] ** 2 * (log_term - 1.0)
    regular = ~near
    if np.any(regular):
        a, _ = _agm(k[regular], kc[regular])
        out[regular] = math.pi / (2.0 * a)
    return _as_output(out, shape)


def complete_elliptic_E(k, kc=None):
    """Complete elliptic integral of the second kind E(k) for 0 <= k <= 1."""
    k, kc = _moduli(k, kc, allow_one=True)
    shape = k.shape
    k, kc = k.ravel(), kc.ravel()
    out = np.ones(k.shape)

    near = _near_one(kc) & (kc > 0.0)
    if np.any(near):
        log_term = np.log(4.0 / kc[near])
        out[near] = 1.0 + 0.5 * kc[near] ** 2 * (log_term - 0.5)
    regular = ~_near_one(kc)
    if np.any(regular):
        a, deficit = _agm(k[regular], kc[regular])
        out[regular] = math.pi / (2.0 * a) * (1.0 - deficit)
    return _as_output(out, shape)


def elliptic_deficit(k, kc=None):
    """
    Return 1 - E(k)/K(k) without cancellation.

    For small k the value behaves like k^2/2, which is what the Duffing
    coefficients need at low energy.
    """
    k, kc = _moduli(k, kc, allow_one=True)
    shape = k.shape
    k, kc = k.ravel(), kc.ravel()
    out = np.ones(k.shape)

    near = _near_one(kc) & (kc > 0.0)
    if np.any(near):
        log_term = np.log(4.0 / kc[near])
        big_k = log_term + 0.25 * kc[near] ** 2 * (log_term - 1.0)
        big_e = 1.0 + 0.5 * kc[near] ** 2 * (log_term - 0.5)
        out[near] = 1.0 - big_e / big_k
    regular = ~_near_one(kc)
    if np.any(regular):
        _, deficit = _agm(k[regular], kc[regular])
        out[regular] = deficit
    return _as_output(out, shape)


def _landen(u: np.ndarray, k: np.ndarray, kc: np.ndarray) -> JacobiTriple:
    """Descending Landen transformation for 0 <= k < 1."""
    a = np.ones_like(u)
    b = kc.copy()
    c = k.copy()
    ratios = []
    for _ in range(_MAX_ITER):
        if np.all(c <= _EPS * a):
            break
        a_next = 0.5 * (a + b)
        b = np.sqrt(a * b)
        c = c * c / (4.0 * a_next)
        a = a_next
        ratios.append(c / a)

    phi = 2.0 ** len(ratios) * a * u
    for ratio in reversed(ratios):
        phi = 0.5 * (phi + np.arcsin(ratio * np.sin(phi)))

    cn = np.cos(phi)
    # dn^2 = k'^2 + k^2 cn^2 has no cancellation near u = K
    dn = np.sqrt(kc * kc + k * k * cn * cn)
    return JacobiTriple(np.sin(phi), cn, dn)


def jacobi_elliptic(u, k, kc=None) -> JacobiTriple:
    """
    Jacobi elliptic functions sn, cn, dn at argument u and modulus k in [0, 1].

    Args:
        u: Real argument (scalar or array)
        k: Modulus (scalar or array, broadcast against u)
        kc: Optional complementary modulus

    Returns:
        JacobiTriple of floats or arrays
    """
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)):
        raise DomainError("Jacobi elliptic functions need a finite argument")
    k, kc = _moduli(k, kc, allow_one=True)
    u, k, kc = np.broadcast_arrays(u, k, kc)
    shape = u.shape
    u, k, kc = u.ravel(), k.ravel(), kc.ravel()

    sn = np.empty(u.shape)
    cn = np.empty(u.shape)
    dn = np.empty(u.shape)

    hyperbolic = kc == 0.0
    if np.any(hyperbolic):
        sn[hyperbolic] = np.tanh(u[hyperbolic])
        cn[hyperbolic] = 1.0 / np.cosh(u[hyperbolic])
        dn[hyperbolic] = cn[hyperbolic]
    regular = ~hyperbolic
    if np.any(regular):
        triple = _landen(u[regular], k[regular], kc[regular])
        sn[regular], cn[regular], dn[regular] = triple

    return JacobiTriple(_as_output(sn, shape), _as_output(cn, shape), _as_output(dn, shape))


def _ei_series(x: np.ndarray) -> np.ndarray:
    """gamma + ln x + sum x^n / (n n!); all terms positive."""
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for n in range(1, 500):
        term = term * x / n
        contrib = term / n
        total = total + contrib
        if np.all(contrib <= 1e-17 * total):
            break
    return EULER_GAMMA + np.log(x) + total


def _ei_asymptotic(x: np.ndarray) -> np.ndarray:
    """e^x / x * sum n! / x^n, truncated at the smallest term."""
    total = np.ones_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for n in range(1, 200):
        candidate = term * n / x
        use = active & (candidate < term)
        total = total + np.where(use, candidate, 0.0)
        term = np.where(use, candidate, term)
        active = use & (candidate > 1e-17 * total)
        if not active.any():
            break
    return np.exp(x) / x * total


def exponential_integral_Ei(x):
    """
    Exponential integral Ei(x) for x > 0.

    Raises:
        DomainError: for x <= 0
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0.0)):
        raise DomainError(f"Ei(x) requires x > 0, got {x}")
    shape = x.shape
    flat = x.ravel()
    out = np.empty(flat.shape)
    series = flat <= EI_SERIES_MAX
    if np.any(series):
        out[series] = _ei_series(flat[series])
    if np.any(~series):
        out[~series] = _ei_asymptotic(flat[~series])
    return _as_output(out, shape)
