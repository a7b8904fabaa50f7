"""Domain types, unit conversion and instantaneous achievable rates.

Nodes are numbered 1 and 2.  For a PU node ``i`` the partner is ``j = 3 - i``;
the PU link ``i`` is the transmission from node ``i`` that is received at node
``j``, so it suffers node ``j``'s residual self-interference and the SU
interference arriving at node ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

Pair = Tuple[float, float]


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def other(i: int) -> int:
    """Partner index of PU node ``i`` (1 <-> 2)."""
    if i not in (1, 2):
        raise ValueError(f"node index must be 1 or 2, got {i!r}")
    return 3 - i


def _pair(value) -> Pair:
    if isinstance(value, (int, float)):
        return (float(value), float(value))
    a, b = value
    return (float(a), float(b))


def _check_pair(values: Pair, name: str, allow_zero: bool = False) -> None:
    for v in values:
        ok = v >= 0 if allow_zero else v > 0
        if not (ok and math.isfinite(v)):
            raise ValueError(f"{name} must be {'non-negative' if allow_zero else 'positive'} and finite, got {values}")


@dataclass(frozen=True)
class ChannelMeans:
    """Mean CNRs/INRs of every Rayleigh link, all linear.

    ``upsilon_p_bar`` may be zero, which models an ideal (RSI-free) canceller.
    """

    gamma_p_bar: Pair
    gamma_s_bar: float
    i_p_bar: Pair
    i_s_bar: Pair
    upsilon_p_bar: Pair

    def __post_init__(self):
        object.__setattr__(self, "gamma_p_bar", _pair(self.gamma_p_bar))
        object.__setattr__(self, "i_p_bar", _pair(self.i_p_bar))
        object.__setattr__(self, "i_s_bar", _pair(self.i_s_bar))
        object.__setattr__(self, "upsilon_p_bar", _pair(self.upsilon_p_bar))
        object.__setattr__(self, "gamma_s_bar", float(self.gamma_s_bar))
        _check_pair(self.gamma_p_bar, "gamma_p_bar")
        _check_pair(self.i_p_bar, "i_p_bar")
        _check_pair(self.i_s_bar, "i_s_bar")
        _check_pair(self.upsilon_p_bar, "upsilon_p_bar", allow_zero=True)
        if not (self.gamma_s_bar > 0 and math.isfinite(self.gamma_s_bar)):
            raise ValueError(f"gamma_s_bar must be positive and finite, got {self.gamma_s_bar}")

    @classmethod
    def from_db(cls, gamma_p_db, gamma_s_db, i_p_db, i_s_db, upsilon_p_db) -> "ChannelMeans":
        conv = lambda v: tuple(db_to_linear(x) for x in _pair(v))
        return cls(
            gamma_p_bar=conv(gamma_p_db),
            gamma_s_bar=db_to_linear(gamma_s_db),
            i_p_bar=conv(i_p_db),
            i_s_bar=conv(i_s_db),
            upsilon_p_bar=conv(upsilon_p_db),
        )


@dataclass(frozen=True)
class ChannelDraw:
    """One realization of the nine instantaneous CNRs (linear).

    Fields may also hold equally shaped arrays; the rate functions broadcast.
    """

    gamma_p: Pair
    gamma_s: float
    i_p: Pair
    i_s: Pair
    upsilon_p: Pair


@dataclass(frozen=True)
class PuConfig:
    p: Pair = (1.0, 1.0)
    r0_p: Pair = (0.5, 0.5)
    o_p: Pair = (0.01, 0.01)

    def __post_init__(self):
        object.__setattr__(self, "p", _pair(self.p))
        object.__setattr__(self, "r0_p", _pair(self.r0_p))
        object.__setattr__(self, "o_p", _pair(self.o_p))
        _check_pair(self.p, "p")
        _check_pair(self.r0_p, "r0_p")
        if not all(0.0 < o < 1.0 for o in self.o_p):
            raise ValueError(f"o_p must lie in (0, 1), got {self.o_p}")


@dataclass(frozen=True)
class SuConfig:
    p_s_max: float = 1.0
    r0_s: float = 0.5

    def __post_init__(self):
        if not (self.p_s_max > 0 and math.isfinite(self.p_s_max)):
            raise ValueError(f"p_s_max must be positive, got {self.p_s_max}")
        if not (self.r0_s >= 0 and math.isfinite(self.r0_s)):
            raise ValueError(f"r0_s must be non-negative, got {self.r0_s}")


@dataclass(frozen=True)
class SignalParams:
    """SU transmit power (W) and circularity coefficient."""

    p_s: float
    c_x: float = 0.0

    def __post_init__(self):
        if not self.p_s >= 0:
            raise ValueError(f"p_s must be non-negative, got {self.p_s}")
        if not 0.0 <= self.c_x <= 1.0:
            raise ValueError(f"c_x must lie in [0, 1], got {self.c_x}")


@dataclass(frozen=True)
class EeConfig:
    kappa_pa: float = 5.0
    p_c: float = 1.0

    def __post_init__(self):
        if not self.kappa_pa > 0:
            raise ValueError(f"kappa_pa must be positive, got {self.kappa_pa}")
        if not self.p_c >= 0:
            raise ValueError(f"p_c must be non-negative, got {self.p_c}")


def rate_threshold(r0: float) -> float:
    """Gamma = 2^(2 R) - 1, the SINR-type threshold for improper-aware rates."""
    return 2.0 ** (2.0 * r0) - 1.0


@dataclass(frozen=True)
class RateThresholds:
    gamma_s_thr: float
    gamma_p_thr: Pair

    @classmethod
    def from_configs(cls, pu: PuConfig, su: SuConfig) -> "RateThresholds":
        return cls(
            gamma_s_thr=rate_threshold(su.r0_s),
            gamma_p_thr=(rate_threshold(pu.r0_p[0]), rate_threshold(pu.r0_p[1])),
        )


def paper_defaults() -> Tuple[ChannelMeans, PuConfig, SuConfig]:
    """Reference operating point used throughout the numerical examples."""
    means = ChannelMeans.from_db(
        gamma_p_db=25.0, gamma_s_db=20.0, i_p_db=3.0, i_s_db=13.0, upsilon_p_db=5.0
    )
    return means, PuConfig(), SuConfig()


def _pu_terms(draw: ChannelDraw, pu: PuConfig, sig: SignalParams, i: int):
    j = other(i)
    signal = pu.p[i - 1] * draw.gamma_p[i - 1]
    su_int = sig.p_s * draw.i_s[j - 1]
    noise_int = pu.p[j - 1] * draw.upsilon_p[j - 1] + su_int + 1.0
    return signal, su_int, noise_int


def pu_rate(draw: ChannelDraw, pu: PuConfig, sig: SignalParams, i: int) -> float:
    """Achievable rate (b/s/Hz) of PU link ``i`` under an improper SU signal."""
    signal, su_int, noise_int = _pu_terms(draw, pu, sig, i)
    if sig.c_x == 0.0:
        return np.log2(1.0 + signal / noise_int)
    pseudo = (su_int * sig.c_x) ** 2
    num = (signal + noise_int) ** 2 - pseudo
    den = noise_int**2 - pseudo
    return 0.5 * np.log2(num / den)


def circularity_coefficients(
    draw: ChannelDraw, pu: PuConfig, sig: SignalParams, i: int
) -> Tuple[float, float]:
    """Circularity of the received signal and of interference-plus-noise at link ``i``."""
    signal, su_int, noise_int = _pu_terms(draw, pu, sig, i)
    improper = su_int * sig.c_x
    return improper / (signal + noise_int), improper / noise_int


def su_rate(draw: ChannelDraw, pu: PuConfig, sig: SignalParams) -> float:
    """Achievable rate (b/s/Hz) of the SU link treating PU interference as noise."""
    interference = pu.p[0] * draw.i_p[0] + pu.p[1] * draw.i_p[1] + 1.0
    snr = sig.p_s * draw.gamma_s / interference
    return 0.5 * np.log2(snr * snr * (1.0 - sig.c_x**2) + 2.0 * snr + 1.0)
