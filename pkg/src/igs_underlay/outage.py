"""Outage probabilities of the SU and PU links under average CSI."""

from __future__ import annotations

import math

import numpy as np

from ._quadrature import QuadratureError, QuadResult, integrate
from .core import ChannelMeans, PuConfig, SignalParams, SuConfig, other, rate_threshold

__all__ = [
    "QuadratureError",
    "psi_s",
    "psi_p",
    "su_threshold",
    "su_outage_acsi",
    "su_outage_acsi_proper",
    "su_outage_acsi_max_improper",
    "pu_outage_proper_exact",
    "pu_outage_exact_numeric",
    "pu_outage_exact_quad",
    "pu_outage_upper_bound",
    "convexity_g",
]


def psi_s(p_s: float, c_x: float, gamma_s_thr: float) -> float:
    """(sqrt(1 + Gamma_s (1 - c^2)) - 1) / p_s, written without cancellation."""
    w = 1.0 - c_x * c_x
    return gamma_s_thr * w / (p_s * (math.sqrt(1.0 + gamma_s_thr * w) + 1.0))


def psi_p(x: float, gamma_p_thr: float, p_i: float) -> float:
    """(sqrt(1 + Gamma_p (1 - x^2)) - 1) / p_i."""
    w = 1.0 - x * x
    return gamma_p_thr * w / (p_i * (math.sqrt(1.0 + gamma_p_thr * w) + 1.0))


def su_threshold(p_s: float, c_x: float, gamma_s_thr: float) -> float:
    """Psi_s / (1 - c^2): the direct-link CNR below which the SU is surely in outage.

    Finite at c_x = 1, where it takes the maximally improper limit Gamma_s / (2 p_s).
    """
    w = 1.0 - c_x * c_x
    return gamma_s_thr / (p_s * (math.sqrt(1.0 + gamma_s_thr * w) + 1.0))


def _su_outage_from_theta(theta: float, means: ChannelMeans, pu: PuConfig) -> float:
    log_success = -theta
    for j in (0, 1):
        log_success -= math.log1p(pu.p[j] * means.i_p_bar[j] * theta)
    return -math.expm1(log_success)


def su_outage_acsi(sig: SignalParams, means: ChannelMeans, pu: PuConfig, su: SuConfig) -> float:
    """SU outage probability averaged over all fading (closed form)."""
    if sig.c_x == 1.0:
        return su_outage_acsi_max_improper(sig.p_s, means, pu, su)
    if sig.p_s == 0.0:
        return 1.0 if su.r0_s > 0 else 0.0
    theta = su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s)) / means.gamma_s_bar
    return _su_outage_from_theta(theta, means, pu)


def su_outage_acsi_proper(p_s: float, means: ChannelMeans, pu: PuConfig, su: SuConfig) -> float:
    """Proper-signaling SU outage written with 2^R - 1."""
    theta = (2.0**su.r0_s - 1.0) / (p_s * means.gamma_s_bar)
    den = 1.0
    for j in (0, 1):
        den *= pu.p[j] * means.i_p_bar[j] * theta + 1.0
    return 1.0 - math.exp(-theta) / den


def su_outage_acsi_max_improper(p_s: float, means: ChannelMeans, pu: PuConfig, su: SuConfig) -> float:
    if p_s == 0.0:
        return 1.0 if su.r0_s > 0 else 0.0
    theta = rate_threshold(su.r0_s) / (2.0 * p_s * means.gamma_s_bar)
    return _su_outage_from_theta(theta, means, pu)


def pu_outage_proper_exact(p_s: float, means: ChannelMeans, pu: PuConfig, i: int) -> float:
    """Exact PU outage of link ``i`` for a proper SU signal of power ``p_s``."""
    j = other(i)
    a = (2.0 ** pu.r0_p[i - 1] - 1.0) / (pu.p[i - 1] * means.gamma_p_bar[i - 1])
    log_success = (
        -a
        - math.log1p(p_s * means.i_s_bar[j - 1] * a)
        - math.log1p(pu.p[j - 1] * means.upsilon_p_bar[j - 1] * a)
    )
    return -math.expm1(log_success)


def _conditional_exponent(x, y, p_s, c_x, gamma_p_thr, p_i, p_j, gamma_p_bar):
    """S * Psi_p(p_s x c / S) / gamma_p_bar with S = p_j y + p_s x + 1 (vectorized)."""
    s = p_j * y + p_s * x + 1.0
    q2 = (p_s * x * c_x) ** 2
    radicand = s * s * (1.0 + gamma_p_thr) - gamma_p_thr * q2
    return gamma_p_thr * (s * s - q2) / (p_i * (np.sqrt(radicand) + s)) / gamma_p_bar


def _half_line(t):
    """Map t in (0, 1) to x = t/(1-t) and return (x, exp(-x) dx/dt)."""
    one_minus = 1.0 - t
    x = t / one_minus
    return x, np.exp(-x) / (one_minus * one_minus)


def pu_outage_exact_quad(sig: SignalParams, means: ChannelMeans, pu: PuConfig, i: int,
                         rel_tol: float = 1e-7) -> QuadResult:
    """Exact PU outage of link ``i`` as a double integral over the SU interference
    CNR and the partner's RSI CNR, each mapped onto (0, 1) at its own mean."""
    if not 1e-10 < rel_tol < 1e-3:
        raise ValueError(f"rel_tol must lie in (1e-10, 1e-3), got {rel_tol}")
    j = other(i)
    p_s = sig.p_s
    c_x = sig.c_x if p_s > 0 else 0.0
    i_s_bar = means.i_s_bar[j - 1]
    ups_bar = means.upsilon_p_bar[j - 1]
    params = dict(
        p_s=p_s, c_x=c_x, gamma_p_thr=rate_threshold(pu.r0_p[i - 1]),
        p_i=pu.p[i - 1], p_j=pu.p[j - 1], gamma_p_bar=means.gamma_p_bar[i - 1],
    )
    inner_tol = 0.1 * rel_tol

    if p_s == 0.0 and ups_bar == 0.0:
        value = float(-np.expm1(-_conditional_exponent(0.0, 0.0, **params)))
        return QuadResult(value, 0.0, 1)

    if p_s == 0.0 or ups_bar == 0.0:
        # one axis degenerates to a point mass at zero
        scale = ups_bar if p_s == 0.0 else i_s_bar

        def one_axis(t):
            v, dens = _half_line(t)
            v = scale * v
            x, y = (0.0, v) if p_s == 0.0 else (v, 0.0)
            return dens * -np.expm1(-_conditional_exponent(x, y, **params))

        return integrate(one_axis, 0.0, 1.0, rel_tol)

    inner_evals = 0
    inner_rel_err = 0.0

    def outer(u):
        nonlocal inner_evals, inner_rel_err
        y, dens_y = _half_line(u)
        y = ups_bar * y
        out = np.empty_like(u)
        for k, (yk, dk) in enumerate(zip(y, dens_y)):
            if dk == 0.0:
                out[k] = 0.0
                continue

            def inner(t, yk=yk):
                x, dens_x = _half_line(t)
                return dens_x * -np.expm1(-_conditional_exponent(i_s_bar * x, yk, **params))

            res = integrate(inner, 0.0, 1.0, inner_tol, abs_tol=1e-300)
            inner_evals = max(inner_evals, res.n_evals)
            if res.value > 0:
                inner_rel_err = max(inner_rel_err, res.abs_err / res.value)
            out[k] = dk * res.value
        return out

    res = integrate(outer, 0.0, 1.0, rel_tol)
    abs_err = res.abs_err + inner_rel_err * abs(res.value)
    return QuadResult(res.value, abs_err, max(res.n_evals, inner_evals))


def pu_outage_exact_numeric(sig: SignalParams, means: ChannelMeans, pu: PuConfig, i: int,
                            rel_tol: float = 1e-7) -> float:
    """Exact PU outage of link ``i`` for any circularity (numerical quadrature).

    Raises QuadratureError when an axis exceeds its evaluation cap.
    """
    return pu_outage_exact_quad(sig, means, pu, i, rel_tol).value


def pu_outage_upper_bound(sig: SignalParams, means: ChannelMeans, pu: PuConfig, i: int) -> float:
    """Upper bound on the PU outage of link ``i`` obtained by moving both averages
    (SU interference, RSI) inside the convex conditional success term."""
    j = other(i)
    c_x = sig.c_x if sig.p_s > 0 else 0.0
    exponent = _conditional_exponent(
        means.i_s_bar[j - 1], means.upsilon_p_bar[j - 1], sig.p_s, c_x,
        rate_threshold(pu.r0_p[i - 1]), pu.p[i - 1], pu.p[j - 1], means.gamma_p_bar[i - 1],
    )
    return float(-np.expm1(-exponent))


def convexity_g(i_s, sig: SignalParams, means: ChannelMeans, pu: PuConfig, i: int, upsilon: float):
    """G(I_s) = (D I_s + F) - sqrt(A I_s^2 + B I_s + C) and its discriminant B^2 - 4AC.

    exp(G) is the conditional success probability of link ``i`` given the SU
    interference CNR ``I_s`` and the partner RSI CNR ``upsilon``.
    """
    j = other(i)
    p_i, p_j, p_s = pu.p[i - 1], pu.p[j - 1], sig.p_s
    g2 = (p_i * means.gamma_p_bar[i - 1]) ** 2
    gp = rate_threshold(pu.r0_p[i - 1])
    beta = 1.0 + p_j * upsilon
    a = p_s**2 * (1.0 + gp * (1.0 - sig.c_x**2)) / g2
    b = 2.0 * p_s * (1.0 + gp) * beta / g2
    c = (1.0 + gp) * beta**2 / g2
    d = p_s / (p_i * means.gamma_p_bar[i - 1])
    f = beta / (p_i * means.gamma_p_bar[i - 1])
    i_s = np.asarray(i_s, dtype=float)
    return (d * i_s + f) - np.sqrt(a * i_s**2 + b * i_s + c), b * b - 4.0 * a * c
