"""SU signal design from average CSI.

``algorithm_I`` allocates power for a proper SU signal under the exact PU
outage constraint.  ``algorithm_II`` jointly picks power and circularity under
the PU outage upper bound: the feasible power is the lower envelope of two
per-node caps (each increasing in c_x) and the SU budget, the envelope is split
at its breakpoints, and on each piece the SU outage is monotone in c_x, so only
interval endpoints need to be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .core import ChannelMeans, PuConfig, SignalParams, SuConfig, other, rate_threshold
from .outage import su_outage_acsi

BUDGET, CAP1, CAP2 = 0, 1, 2
TAG_NAMES = {BUDGET: "budget", CAP1: "cap1", CAP2: "cap2"}
DEDUP_TOL = 1e-10


@dataclass(frozen=True)
class NodeConstants:
    """Per-node constants of the PU-protection constraint for link ``node``.

    ``beta`` and ``i_s`` belong to the partner node j (the receiver of link i).
    """

    node: int
    gamma_p_thr: float
    mu: float
    beta: float
    lam: float
    upsilon: float
    i_s: float

    def phi(self, c_x: float) -> float:
        return self.gamma_p_thr * (1.0 - c_x * c_x) * self.upsilon

    def omega(self, c_x: float) -> float:
        return self.phi(c_x) / self.lam**2


@dataclass(frozen=True)
class DesignConstants:
    node1: NodeConstants
    node2: NodeConstants

    def __getitem__(self, i: int) -> NodeConstants:
        return (self.node1, self.node2)[i - 1]

    def __iter__(self):
        return iter((self.node1, self.node2))


@dataclass(frozen=True)
class Breakpoints:
    """Ordered circularity breakpoints and the active constraint right of each."""

    points: Tuple[float, ...]
    active: Tuple[int, ...]

    @property
    def intervals(self):
        return list(zip(self.points[:-1], self.points[1:], self.active))


@dataclass(frozen=True)
class DesignOutcome:
    params: SignalParams
    su_outage: float
    feasible: bool
    active: str
    candidates: Tuple[Tuple[float, float], ...] = field(default=(), compare=False)


def node_constants(pu: PuConfig, means: ChannelMeans, i: int) -> NodeConstants:
    j = other(i)
    gamma_p = rate_threshold(pu.r0_p[i - 1])
    mu = pu.p[i - 1] * means.gamma_p_bar[i - 1] * -math.log1p(-pu.o_p[i - 1])
    beta = pu.p[j - 1] * means.upsilon_p_bar[j - 1] + 1.0
    return NodeConstants(
        node=i,
        gamma_p_thr=gamma_p,
        mu=mu,
        beta=beta,
        lam=beta * gamma_p - mu,
        upsilon=mu * mu + 2.0 * beta * mu - gamma_p * beta * beta,
        i_s=means.i_s_bar[j - 1],
    )


def design_constants(pu: PuConfig, means: ChannelMeans) -> DesignConstants:
    return DesignConstants(node_constants(pu, means, 1), node_constants(pu, means, 2))


def max_inr(pu: PuConfig, means: ChannelMeans, i: int) -> float:
    """Largest interference-to-noise margin that keeps link ``i`` at its outage target."""
    mu = node_constants(pu, means, i).mu
    return max(mu / (2.0 ** pu.r0_p[i - 1] - 1.0) - 1.0, 0.0)


def proper_power_cap(pu: PuConfig, means: ChannelMeans, i: int) -> float:
    """Largest proper SU power meeting link ``i``'s exact outage target (0 = stay silent)."""
    j = other(i)
    a = (2.0 ** pu.r0_p[i - 1] - 1.0) / (pu.p[i - 1] * means.gamma_p_bar[i - 1])
    success = 1.0 - pu.o_p[i - 1]
    rsi = pu.p[j - 1] * means.upsilon_p_bar[j - 1] * a + 1.0
    num = math.exp(-a) - success * rsi
    return max(num / (means.i_s_bar[j - 1] * success * a * rsi), 0.0)


def proper_spectrum_sharing_condition(pu: PuConfig, means: ChannelMeans, i: int) -> bool:
    j = other(i)
    ratio = pu.p[i - 1] * means.gamma_p_bar[i - 1] / (2.0 ** pu.r0_p[i - 1] - 1.0)
    rhs = ratio * math.log1p(pu.p[j - 1] * means.upsilon_p_bar[j - 1] / ratio)
    return max_inr(pu, means, i) > rhs


def algorithm_I(pu: PuConfig, su: SuConfig, means: ChannelMeans) -> DesignOutcome:
    """Optimal proper SU power: the tightest of the two PU caps and the budget."""
    if not all(proper_spectrum_sharing_condition(pu, means, i) for i in (1, 2)):
        return DesignOutcome(SignalParams(0.0, 0.0), su_outage_acsi(SignalParams(0.0), means, pu, su),
                             False, "silent")
    caps = (su.p_s_max, proper_power_cap(pu, means, 1), proper_power_cap(pu, means, 2))
    m = min(range(3), key=lambda l: caps[l])
    sig = SignalParams(caps[m], 0.0)
    return DesignOutcome(sig, su_outage_acsi(sig, means, pu, su), True, TAG_NAMES[m])


def improper_power_cap(c_x: float, k: NodeConstants) -> float:
    """Largest SU power at circularity ``c_x`` meeting node k's outage upper bound.

    Returns 0 when the node admits no SU transmission and ``inf`` in the
    maximally improper limit when the cap is unbounded.
    """
    if k.upsilon <= 0:
        return 0.0
    w = 1.0 - c_x * c_x
    disc = math.sqrt(k.lam * k.lam + k.gamma_p_thr * w * k.upsilon)
    if k.lam > 0:
        q = k.upsilon / (disc + k.lam)
    elif w == 0.0:
        return math.inf
    else:
        q = (disc - k.lam) / (k.gamma_p_thr * w)
    return q / k.i_s


def budget_intersection(k: NodeConstants, su: SuConfig) -> Optional[float]:
    """Circularity where node k's cap crosses the SU budget, if inside (0, 1)."""
    if not improper_power_cap(0.0, k) < su.p_s_max < improper_power_cap(1.0, k):
        return None
    q = su.p_s_max * k.i_s
    r2 = 1.0 + (2.0 * q * k.lam - k.upsilon) / (k.gamma_p_thr * q * q)
    if not 0.0 < r2 < 1.0:
        return None
    return math.sqrt(r2)


def caps_identical(consts: DesignConstants) -> bool:
    k1, k2 = consts
    t1 = (k1.gamma_p_thr * k1.i_s**2, k1.lam * k1.i_s, k1.upsilon)
    t2 = (k2.gamma_p_thr * k2.i_s**2, k2.lam * k2.i_s, k2.upsilon)
    return all(math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0) for a, b in zip(t1, t2))


def cap_cross_intersection(consts: DesignConstants) -> Optional[float]:
    """Circularity where the two node caps cross, if inside (0, 1).

    Each cap solves Gamma w I^2 p^2 + 2 Lambda I p - Upsilon = 0 with
    w = 1 - c^2; eliminating p between the two nodes gives w in closed form.
    """
    if caps_identical(consts):
        return None
    k1, k2 = consts
    if k1.upsilon <= 0 or k2.upsilon <= 0:
        return None
    a1, a2 = k1.gamma_p_thr * k1.i_s**2, k2.gamma_p_thr * k2.i_s**2
    b1, b2 = 2.0 * k1.lam * k1.i_s, 2.0 * k2.lam * k2.i_s
    c1, c2 = k1.upsilon, k2.upsilon
    den = (c1 * a2 - c2 * a1) ** 2
    if den == 0.0:
        return None
    w = (b1 * c2 - b2 * c1) * (b1 * a2 - b2 * a1) / den
    if not 0.0 < w < 1.0:
        return None
    r = math.sqrt(1.0 - w)
    d0 = improper_power_cap(0.0, k1) - improper_power_cap(0.0, k2)
    d1 = improper_power_cap(1.0, k1) - improper_power_cap(1.0, k2)
    if math.isnan(d1):
        # both caps unbounded at c_x = 1: compare just below the crossing's far side
        c_probe = 0.5 * (r + 1.0)
        d1 = improper_power_cap(c_probe, k1) - improper_power_cap(c_probe, k2)
    if not d0 * d1 < 0:
        return None
    return r


def active_constraint(c_x: float, consts: DesignConstants, su: SuConfig) -> int:
    caps = (su.p_s_max, improper_power_cap(c_x, consts[1]), improper_power_cap(c_x, consts[2]))
    return min(range(3), key=lambda l: caps[l])


def feasible_power(c_x: float, consts: DesignConstants, su: SuConfig) -> float:
    return min(su.p_s_max, improper_power_cap(c_x, consts[1]), improper_power_cap(c_x, consts[2]))


def breakpoints(consts: DesignConstants, su: SuConfig) -> Breakpoints:
    candidates = [budget_intersection(k, su) for k in consts]
    if not caps_identical(consts):
        candidates.append(cap_cross_intersection(consts))
    points: List[float] = [0.0]
    for r in sorted(r for r in candidates if r is not None):
        if r - points[-1] > DEDUP_TOL:
            points.append(r)
    if 1.0 - points[-1] <= DEDUP_TOL:
        points.pop()
    points.append(1.0)
    active = tuple(
        active_constraint(0.5 * (lo + hi), consts, su) for lo, hi in zip(points[:-1], points[1:])
    )
    return Breakpoints(tuple(points), active)


def improper_benefit_condition(k: NodeConstants, su: SuConfig) -> bool:
    """True when the SU outage along node k's cap does not increase with c_x."""
    if k.lam <= 0:
        return True
    return su.r0_s <= math.log2(k.mu * math.sqrt(1.0 + k.gamma_p_thr) / k.lam)


def su_outage_on_cap(c_x: float, k: NodeConstants, means: ChannelMeans, pu: PuConfig,
                     su: SuConfig) -> float:
    """SU outage when transmitting exactly at node k's cap, as a function of c_x."""
    gamma_s = rate_threshold(su.r0_s)
    if gamma_s == 0.0:
        return 0.0
    p_cap = improper_power_cap(c_x, k)
    if p_cap == 0.0:
        return 1.0
    if math.isinf(p_cap):
        return 0.0
    w = 1.0 - c_x * c_x
    if w == 0.0:
        yg = 2.0 * p_cap * means.gamma_s_bar / gamma_s
    else:
        y = math.sqrt(w) / (math.sqrt(1.0 + w * gamma_s) - 1.0)
        g = p_cap * means.gamma_s_bar * math.sqrt(w)
        yg = y * g
    den = (pu.p[0] * means.i_p_bar[0] + yg) * (pu.p[1] * means.i_p_bar[1] + yg)
    return 1.0 - yg * yg * math.exp(-1.0 / yg) / den


def interval_candidates(consts: DesignConstants, su: SuConfig) -> List[Tuple[SignalParams, int]]:
    """Best endpoint of every breakpoint interval, with the interval's active tag."""
    out = []
    for lo, hi, m in breakpoints(consts, su).intervals:
        if m == BUDGET:
            c = lo
        elif improper_benefit_condition(consts[m], su):
            c = hi
        else:
            c = lo
        out.append((SignalParams(feasible_power(c, consts, su), c), m))
    return out


def algorithm_II(pu: PuConfig, su: SuConfig, means: ChannelMeans) -> DesignOutcome:
    """Globally optimal (power, circularity) under the PU outage upper bound."""
    consts = design_constants(pu, means)
    if any(k.upsilon <= 0 for k in consts):
        return DesignOutcome(SignalParams(0.0, 0.0), su_outage_acsi(SignalParams(0.0), means, pu, su),
                             False, "silent")
    cands = interval_candidates(consts, su)
    outages = [su_outage_acsi(sig, means, pu, su) for sig, _ in cands]
    best = min(range(len(cands)), key=lambda z: outages[z])
    sig, m = cands[best]
    return DesignOutcome(sig, outages[best], True, TAG_NAMES[m],
                         tuple((s.p_s, s.c_x) for s, _ in cands))
