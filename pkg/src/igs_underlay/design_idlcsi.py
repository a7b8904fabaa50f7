"""Analysis and design when the SU knows its own direct-link CNR.

Given the instantaneous gamma_s the SU either stays silent (it would be in
outage regardless of the PU interference) or transmits, in which case the
only remaining randomness is the aggregate PU interference
Xi = p_1 I_p1 + p_2 I_p2, a hypoexponential variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy import integrate

from .core import ChannelMeans, EeConfig, PuConfig, SignalParams, SuConfig, rate_threshold
from .design_acsi import algorithm_I, design_constants, interval_candidates
from .outage import pu_outage_exact_numeric, su_outage_acsi, su_threshold

EQUAL_MEANS_RTOL = 1e-9


@dataclass(frozen=True)
class InterferenceSumStats:
    """Scaled means (p_1 I_p1_bar, p_2 I_p2_bar) of the two PU interference terms."""

    a1: float
    a2: float

    @classmethod
    def from_configs(cls, means: ChannelMeans, pu: PuConfig) -> "InterferenceSumStats":
        return cls(pu.p[0] * means.i_p_bar[0], pu.p[1] * means.i_p_bar[1])

    @property
    def equal(self) -> bool:
        return abs(self.a1 - self.a2) < EQUAL_MEANS_RTOL * max(self.a1, self.a2)


@dataclass(frozen=True)
class DlDecision:
    transmit: bool
    params: SignalParams
    outage: float


def interference_sum_pdf(z, stats: InterferenceSumStats):
    z = np.asarray(z, dtype=float)
    zc = np.maximum(z, 0.0)
    if stats.equal:
        a = stats.a1
        pdf = zc * np.exp(-zc / a) / (a * a)
    else:
        a1, a2 = stats.a1, stats.a2
        pdf = (np.exp(-zc / a1) - np.exp(-zc / a2)) / (a1 - a2)
    return np.where(z >= 0, pdf, 0.0)


def interference_sum_sf(z, stats: InterferenceSumStats):
    """Pr{Xi >= z}; equal to 1 for z <= 0."""
    z = np.asarray(z, dtype=float)
    zc = np.maximum(z, 0.0)
    if stats.equal:
        a = stats.a1
        sf = (1.0 + zc / a) * np.exp(-zc / a)
    else:
        a1, a2 = stats.a1, stats.a2
        sf = (a1 * np.exp(-zc / a1) - a2 * np.exp(-zc / a2)) / (a1 - a2)
    return np.where(z > 0, sf, 1.0)


def zeta(gamma_s: float, sig: SignalParams, su: SuConfig) -> float:
    """Interference level above which the SU link fails for this gamma_s."""
    thr = su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s))
    if thr == 0.0:
        return math.inf if gamma_s > 0 else -1.0
    return gamma_s / thr - 1.0


def transmission_condition(gamma_s: float, sig: SignalParams, su: SuConfig) -> bool:
    if sig.p_s == 0.0:
        return False
    return gamma_s > su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s))


def su_outage_dl(gamma_s: float, sig: SignalParams, means: ChannelMeans, pu: PuConfig,
                 su: SuConfig) -> float:
    """SU outage conditioned on the direct-link CNR ``gamma_s``."""
    if su.r0_s == 0.0:
        return 0.0
    if not transmission_condition(gamma_s, sig, su):
        return 1.0
    return float(interference_sum_sf(zeta(gamma_s, sig, su), InterferenceSumStats.from_configs(means, pu)))


def su_outage_dl_average(sig: SignalParams, means: ChannelMeans, pu: PuConfig, su: SuConfig) -> float:
    """Average of ``su_outage_dl`` over the exponential gamma_s, by quadrature."""
    if sig.p_s == 0.0 or su.r0_s == 0.0:
        return su_outage_acsi(sig, means, pu, su)
    thr = su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s))
    g_bar = means.gamma_s_bar
    saving = -math.expm1(-thr / g_bar)

    def integrand(g):
        return su_outage_dl(g, sig, means, pu, su) * math.exp(-g / g_bar) / g_bar

    tail, _ = integrate.quad(integrand, thr, math.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
    return saving + tail


def delta_metric(sig: SignalParams, su: SuConfig) -> float:
    """(1 - c^2) / Psi_s; the transmitting-SU outage decreases as this grows."""
    thr = su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s)) if sig.p_s > 0 else math.inf
    return math.inf if thr == 0.0 else 1.0 / thr


def idl_signal_params(pu: PuConfig, su: SuConfig, means: ChannelMeans,
                      mode: str = "improper") -> Tuple[SignalParams, bool]:
    """Signal parameters used whenever the SU transmits, and the PU-feasibility flag.

    They do not depend on gamma_s, which only gates transmission.
    """
    if mode == "proper":
        out = algorithm_I(pu, su, means)
        return out.params, out.feasible
    if mode != "improper":
        raise ValueError(f"mode must be 'proper' or 'improper', got {mode!r}")
    consts = design_constants(pu, means)
    if any(k.upsilon <= 0 for k in consts):
        return SignalParams(0.0, 0.0), False
    cands = [sig for sig, _ in interval_candidates(consts, su)]
    return max(cands, key=lambda s: delta_metric(s, su)), True


def design_idlcsi(gamma_s: float, pu: PuConfig, su: SuConfig, means: ChannelMeans,
                  mode: str = "improper") -> DlDecision:
    sig, feasible = idl_signal_params(pu, su, means, mode)
    if not feasible or not transmission_condition(gamma_s, sig, su):
        return DlDecision(False, SignalParams(0.0, 0.0), 1.0 if su.r0_s > 0 else 0.0)
    return DlDecision(True, sig, su_outage_dl(gamma_s, sig, means, pu, su))


def idl_decision_function(pu: PuConfig, su: SuConfig, means: ChannelMeans,
                          mode: str = "improper") -> Callable:
    """Vectorized decision rule: gamma_s array -> (transmit mask, params)."""
    sig, feasible = idl_signal_params(pu, su, means, mode)
    thr = su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s)) if sig.p_s > 0 else math.inf

    def decide(gamma_s):
        gamma_s = np.asarray(gamma_s, dtype=float)
        if not feasible:
            return np.zeros(gamma_s.shape, dtype=bool), sig
        return gamma_s > thr, sig

    return decide


def power_saving_probability(sig: SignalParams, means: ChannelMeans, su: SuConfig) -> float:
    """Probability that the SU stays silent because its direct link is too weak."""
    thr = su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s))
    return -math.expm1(-thr / means.gamma_s_bar)


def avg_ee_acsi(sig: SignalParams, means: ChannelMeans, pu: PuConfig, su: SuConfig,
                ee: EeConfig) -> float:
    """Average EE of an always-on SU: delivered rate per Watt consumed."""
    return su.r0_s * (1.0 - su_outage_acsi(sig, means, pu, su)) / (ee.kappa_pa * sig.p_s + ee.p_c)


def avg_ee_dl(sig: SignalParams, means: ChannelMeans, pu: PuConfig, su: SuConfig,
              ee: EeConfig) -> float:
    """Average EE over the periods in which the direct-link-aware SU transmits."""
    theta = su_threshold(sig.p_s, sig.c_x, rate_threshold(su.r0_s)) / means.gamma_s_bar
    den = ee.kappa_pa * sig.p_s + ee.p_c
    for j in (0, 1):
        den *= pu.p[j] * means.i_p_bar[j] * theta + 1.0
    return su.r0_s / den


def pu_outage_dl(sig: SignalParams, means: ChannelMeans, pu: PuConfig, su: SuConfig, i: int,
                 rel_tol: float = 1e-7) -> float:
    """PU outage of link ``i`` when the SU is silent a P_saving fraction of the time."""
    saving = power_saving_probability(sig, means, su)
    quiet = pu_outage_exact_numeric(SignalParams(0.0, 0.0), means, pu, i, rel_tol)
    active = pu_outage_exact_numeric(sig, means, pu, i, rel_tol)
    return saving * quiet + (1.0 - saving) * active
