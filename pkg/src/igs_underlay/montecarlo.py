"""Seedable brute-force oracle for every probability the analytic modules compute.

Draw ``n`` of stream ``(seed, stream)`` is produced by a counter-based Philox
generator jumped to counter block ``3 n``: each draw owns twelve raw 64-bit
words, of which the first nine become the nine exponential CNRs.  Any draw can
therefore be regenerated in isolation, and a run split into chunks (or across
workers) produces exactly the same variates as a sequential one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Tuple

import numpy as np

from .core import (ChannelDraw, ChannelMeans, EeConfig, PuConfig, SignalParams, SuConfig,
                   pu_rate, su_rate)

COLUMNS = ("gamma_p1", "gamma_p2", "gamma_s", "i_p1", "i_p2", "i_s1", "i_s2", "ups1", "ups2")
WORDS_PER_DRAW = 12
BLOCKS_PER_DRAW = 3
CHUNK = 2**17
INNER_SUBSTREAM = 1


@dataclass(frozen=True)
class SeedSpec:
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.stream < 0:
            raise ValueError(f"stream must be non-negative, got {self.stream}")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    n: int
    std_err: float

    @classmethod
    def from_count(cls, count: int, n: int) -> "McEstimate":
        p = count / n
        return cls(p, n, math.sqrt(p * (1.0 - p) / n))

    def agrees(self, value: float, k: float = 3.0) -> bool:
        """|estimate - value| <= k standard errors (exact match when std_err is 0)."""
        return abs(self.estimate - value) <= k * self.std_err


@dataclass(frozen=True)
class DlMetrics:
    su_outage: McEstimate
    p_saving: McEstimate
    avg_ee: McEstimate
    pu_outage: Tuple[McEstimate, McEstimate]


def _key(seed: SeedSpec, sub: Tuple[int, ...]) -> np.ndarray:
    return np.random.SeedSequence([seed.seed, seed.stream, *sub]).generate_state(2, np.uint64)


def uniform_block(seed: SeedSpec, start: int, count: int, sub: Tuple[int, ...] = ()) -> np.ndarray:
    """Open-interval uniforms for draws ``start .. start+count-1``, shape (count, 9)."""
    bitgen = np.random.Philox(key=_key(seed, sub))
    if start:
        bitgen.advance(BLOCKS_PER_DRAW * start)
    raw = bitgen.random_raw(WORDS_PER_DRAW * count).reshape(count, WORDS_PER_DRAW)[:, :9]
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _draw_from_uniforms(u: np.ndarray, means: ChannelMeans) -> ChannelDraw:
    scale = np.array([*means.gamma_p_bar, means.gamma_s_bar, *means.i_p_bar,
                      *means.i_s_bar, *means.upsilon_p_bar])
    x = -np.log(u) * scale
    return ChannelDraw(
        gamma_p=(x[..., 0], x[..., 1]),
        gamma_s=x[..., 2],
        i_p=(x[..., 3], x[..., 4]),
        i_s=(x[..., 5], x[..., 6]),
        upsilon_p=(x[..., 7], x[..., 8]),
    )


def sample_block(means: ChannelMeans, seed: SeedSpec, start: int, count: int) -> ChannelDraw:
    """Draws ``start .. start+count-1`` as a ChannelDraw of arrays."""
    return _draw_from_uniforms(uniform_block(seed, start, count), means)


def sample_channel_draw(means: ChannelMeans, seed: SeedSpec, index: int) -> ChannelDraw:
    d = _draw_from_uniforms(uniform_block(seed, index, 1)[0], means)
    return ChannelDraw(
        gamma_p=tuple(float(v) for v in d.gamma_p), gamma_s=float(d.gamma_s),
        i_p=tuple(float(v) for v in d.i_p), i_s=tuple(float(v) for v in d.i_s),
        upsilon_p=tuple(float(v) for v in d.upsilon_p),
    )


def _chunks(n: int) -> Iterator[Tuple[int, int]]:
    if n < 1:
        raise ValueError(f"sample count must be at least 1, got {n}")
    for start in range(0, n, CHUNK):
        yield start, min(CHUNK, n - start)


def _count(event: Callable[[ChannelDraw], np.ndarray], means: ChannelMeans, n: int,
           seed: SeedSpec) -> McEstimate:
    hits = 0
    for start, m in _chunks(n):
        hits += int(np.count_nonzero(event(sample_block(means, seed, start, m))))
    return McEstimate.from_count(hits, n)


def empirical_su_outage(sig: SignalParams, means: ChannelMeans, pu: PuConfig, su: SuConfig,
                        n: int, seed: SeedSpec) -> McEstimate:
    return _count(lambda d: su_rate(d, pu, sig) < su.r0_s, means, n, seed)


def empirical_pu_outage(sig: SignalParams, means: ChannelMeans, pu: PuConfig, i: int, n: int,
                        seed: SeedSpec) -> McEstimate:
    return _count(lambda d: pu_rate(d, pu, sig, i) < pu.r0_p[i - 1], means, n, seed)


def empirical_ee_acsi(sig: SignalParams, means: ChannelMeans, pu: PuConfig, su: SuConfig,
                      ee: EeConfig, n: int, seed: SeedSpec) -> McEstimate:
    """Delivered rate per consumed power for an SU that always transmits."""
    out = empirical_su_outage(sig, means, pu, su, n, seed)
    scale = su.r0_s / (ee.kappa_pa * sig.p_s + ee.p_c)
    return McEstimate(scale * (1.0 - out.estimate), n, scale * out.std_err)


def _mean_estimate(total: float, total_sq: float, n: int) -> McEstimate:
    if n == 0:
        return McEstimate(math.nan, 0, math.nan)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return McEstimate(mean, n, math.sqrt(var / n))


def empirical_dl_metrics(decide: Callable, means: ChannelMeans, pu: PuConfig, su: SuConfig,
                         ee: EeConfig, n: int, seed: SeedSpec, inner: int = 1) -> DlMetrics:
    """Joint estimates for an SU that sees its direct-link CNR before transmitting.

    ``decide`` maps an array of gamma_s values to (transmit mask, SignalParams).
    Each of the ``n`` outer draws uses its own interference CNRs when
    ``inner == 1``; otherwise ``inner`` fresh (I_p1, I_p2) pairs come from a
    separate substream.  The EE estimate averages over transmitting draws only.
    """
    if inner < 1:
        raise ValueError(f"inner must be at least 1, got {inner}")
    fail_sum, fail_sq, ok_sum, ok_sq = [], [], [], []
    silent = 0
    pu_fail = [0, 0]
    sig = None
    for start, m in _chunks(n):
        d = sample_block(means, seed, start, m)
        tx, sig = decide(d.gamma_s)
        tx = np.asarray(tx, dtype=bool)
        silent += int(m - np.count_nonzero(tx))

        if inner == 1:
            ok = (su_rate(d, pu, sig) >= su.r0_s).astype(float)
        else:
            # inner draw k of outer draw g is substream draw g * inner + k
            u = uniform_block(seed, start * inner, m * inner, sub=(INNER_SUBSTREAM,))
            xi = -np.log(u[:, 3:5].reshape(m, inner, 2)) * np.array(means.i_p_bar)
            d_in = ChannelDraw(d.gamma_p, d.gamma_s[:, None], (xi[..., 0], xi[..., 1]),
                               d.i_s, d.upsilon_p)
            ok = (su_rate(d_in, pu, sig) >= su.r0_s).mean(axis=1)
        ok = np.where(tx, ok, 0.0)
        fail = 1.0 - ok
        fail_sum.append(float(fail.sum()))
        fail_sq.append(float((fail * fail).sum()))
        ok_sum.append(float(ok[tx].sum()))
        ok_sq.append(float((ok[tx] ** 2).sum()))

        quiet = SignalParams(0.0, 0.0)
        for i in (1, 2):
            r_tx = pu_rate(d, pu, sig, i)
            r_quiet = pu_rate(d, pu, quiet, i)
            pu_fail[i - 1] += int(np.count_nonzero(np.where(tx, r_tx, r_quiet) < pu.r0_p[i - 1]))

    n_tx = n - silent
    su_out = _mean_estimate(math.fsum(fail_sum), math.fsum(fail_sq), n)
    success = _mean_estimate(math.fsum(ok_sum), math.fsum(ok_sq), n_tx)
    scale = su.r0_s / (ee.kappa_pa * sig.p_s + ee.p_c)
    avg_ee = McEstimate(scale * success.estimate, n_tx, scale * success.std_err)
    return DlMetrics(
        su_outage=su_out,
        p_saving=McEstimate.from_count(silent, n),
        avg_ee=avg_ee,
        pu_outage=(McEstimate.from_count(pu_fail[0], n), McEstimate.from_count(pu_fail[1], n)),
    )
