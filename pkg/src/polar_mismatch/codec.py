"""Polar encoder, mismatched successive-cancellation decoder and FER harness.

Indices are 0-based and in natural order (no bit reversal).  Index ``i`` of a
length-``2**n`` code sees the synthetic channel ``W^s`` where ``s`` reads the
bits of ``i`` most significant first, ``0 -> '-'`` and ``1 -> '+'``; see
:func:`~polar_mismatch.polar.index_to_signs`.

The decoder is told only the decoding channel ``V``.  Its leaf log-ratios
are ``ln V(y|0) - ln V(y|1)`` and every synthetic decision is the ML rule for
the corresponding synthetic channel of ``V``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .capacity import mismatched_info
from .channels import Channel, SymmetricPair
from .polar import DEFAULT_ALPHABET_CAP, enumerate_depth

EXACT_MAX_DEPTH = 4


def _check_length(N):
    if N < 1 or N & (N - 1):
        raise ValueError(f"block length must be a power of two, got {N}")
    return N.bit_length() - 1


@dataclass(frozen=True)
class PolarCodeConfig:
    """Depth ``n`` (``N = 2**n``), sorted information set and frozen bits.

    ``frozen_values`` is aligned with the sorted complement of ``info_set``.
    """

    n: int
    info_set: tuple
    frozen_values: tuple = None

    def __post_init__(self):
        N = 1 << self.n
        info = tuple(sorted(int(i) for i in self.info_set))
        if len(set(info)) != len(info) or any(i < 0 or i >= N for i in info):
            raise ValueError(f"info_set must be distinct indices in 0..{N - 1}")
        object.__setattr__(self, "info_set", info)
        n_frozen = N - len(info)
        fv = (0,) * n_frozen if self.frozen_values is None else tuple(int(b) & 1 for b in self.frozen_values)
        if len(fv) != n_frozen:
            raise ValueError(f"expected {n_frozen} frozen values, got {len(fv)}")
        object.__setattr__(self, "frozen_values", fv)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def info_mask(self) -> np.ndarray:
        m = np.zeros(self.N, dtype=bool)
        m[list(self.info_set)] = True
        return m

    @property
    def frozen_set(self) -> tuple:
        return tuple(np.flatnonzero(~self.info_mask).tolist())


@dataclass
class SimulationResult:
    trials: int
    block_errors: int
    fer: float
    per_index_first_error: np.ndarray = field(repr=False)
    N: int = 0
    rate: float = 0.0
    seed: int = 0


def polar_encode(u) -> np.ndarray:
    """Apply ``x = u F^{(x)n}`` (kernel ``(u1 ^ u2, u2)``) to a bit vector or batch."""
    u = np.asarray(u, dtype=np.uint8)
    _check_length(u.shape[-1])
    if u.ndim == 1:
        return _kernels.polar_encode_batch(u[None, :])[0]
    return _kernels.polar_encode_batch(u)


def leaf_llr_table(v: Channel) -> np.ndarray:
    """``ln V(y|0) - ln V(y|1)`` per output symbol, with signed infinities."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.log(v.probs[0]) - np.log(v.probs[1])
    t[(v.probs[0] == 0) & (v.probs[1] == 0)] = 0.0
    return t


def sc_decode(y, cfg: PolarCodeConfig, v: Channel, backend=None) -> np.ndarray:
    """Mismatched SC estimate of ``u`` from received symbols ``y`` (1-D or batch).

    Frozen positions copy the configured values; information positions take
    the sign of the synthetic ``V`` log-ratio, ties going to 0.
    """
    y = np.asarray(y, dtype=np.int64)
    single = y.ndim == 1
    y2 = y[None, :] if single else y
    if y2.shape[1] != cfg.N:
        raise ValueError(f"received length {y2.shape[1]} does not match N={cfg.N}")
    if y2.size and (y2.min() < 0 or y2.max() >= v.num_outputs):
        raise ValueError("received symbol outside V's output alphabet")
    llr = leaf_llr_table(v)[y2]
    known = ~cfg.info_mask
    u_known = np.zeros(y2.shape, dtype=np.uint8)
    u_known[:, known] = np.asarray(cfg.frozen_values, dtype=np.uint8)
    _, uhat, _ = _kernels.sc_decode_batch(llr, known.astype(np.uint8), u_known, backend=backend)
    return uhat[0] if single else uhat


def _trial_rng(seed, t):
    return np.random.default_rng([int(seed), int(t)])


def _sample_outputs(w: Channel, x, uniforms):
    cdf = np.cumsum(w.probs, axis=1)
    cdf[:, -1] = 1.0
    y = np.where(x == 0, np.searchsorted(cdf[0], uniforms, side="right"), np.searchsorted(cdf[1], uniforms, side="right"))
    return np.minimum(y, w.num_outputs - 1)


def _draw_block(pair, N, seed, t, info_mask, frozen):
    rng = _trial_rng(seed, t)
    u = np.empty(N, dtype=np.uint8)
    u[info_mask] = rng.integers(0, 2, int(info_mask.sum()), dtype=np.uint8)
    u[~info_mask] = frozen
    unif = rng.random(N)
    return u, unif


def _run_chunk(pair, cfg, seed, t0, t1, genie, backend, want_llr):
    N = cfg.N
    mask = np.ones(N, dtype=bool) if genie else cfg.info_mask
    frozen = np.asarray(cfg.frozen_values, dtype=np.uint8) if not genie else np.zeros(0, dtype=np.uint8)
    U = np.empty((t1 - t0, N), dtype=np.uint8)
    R = np.empty((t1 - t0, N))
    for k, t in enumerate(range(t0, t1)):
        U[k], R[k] = _draw_block(pair, N, seed, t, mask, frozen)
    X = _kernels.polar_encode_batch(U)
    Y = _sample_outputs(pair.w, X, R)
    llr = leaf_llr_table(pair.v)[Y]
    known = np.ones(N, dtype=np.uint8) if genie else (~cfg.info_mask).astype(np.uint8)
    dec, uhat, lo = _kernels.sc_decode_batch(llr, known, U, want_llr=want_llr, backend=backend)
    return U, dec, uhat, lo


def _chunks(trials, chunk):
    return [(a, min(a + chunk, trials)) for a in range(0, trials, chunk)]


def simulate_fer(pair: SymmetricPair, cfg: PolarCodeConfig, trials: int, seed: int = 0,
                 chunk: int = 2048, workers: int = 1, backend=None) -> SimulationResult:
    """Monte Carlo frame error rate of the mismatched SC decoder.

    Each trial draws uniform information bits, encodes, sends the codeword
    through independent uses of ``W`` and decodes with ``V``.  Trial ``t``
    uses its own generator seeded by ``(seed, t)``, so results do not depend
    on chunking or on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    N = cfg.N
    info = cfg.info_mask

    def work(span):
        U, _, uhat, _ = _run_chunk(pair, cfg, seed, span[0], span[1], False, backend, False)
        wrong = (uhat != U) & info[None, :]
        bad = wrong.any(axis=1)
        first = np.argmax(wrong[bad], axis=1)
        return int(bad.sum()), np.bincount(first, minlength=N)

    spans = _chunks(trials, chunk)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    errors = sum(p[0] for p in parts)
    hist = np.sum([p[1] for p in parts], axis=0).astype(np.int64)
    return SimulationResult(trials, errors, errors / trials, hist, N, cfg.rate, seed)


@dataclass
class GenieEstimate:
    """Per-index genie-aided statistics.

    ``error_rate[i]`` is the frequency of a wrong decision at ``i`` when all
    earlier bits are supplied correctly; ``info_estimate[i]`` is the sample
    mean of ``1 - log2(1 + exp(-(1 - 2u) L))``, an unbiased estimate of the
    mismatched functional of the synthetic pair at ``i``.
    """

    trials: int
    errors: np.ndarray
    error_rate: np.ndarray
    info_estimate: np.ndarray


def genie_estimate(pair: SymmetricPair, n: int, trials: int, seed: int = 0, chunk: int = 1024,
                   workers: int = 1, backend=None) -> GenieEstimate:
    N = 1 << n
    cfg = PolarCodeConfig(n, range(N))

    def work(span):
        U, dec, _, lo = _run_chunk(pair, cfg, seed, span[0], span[1], True, backend, True)
        z = np.where(U == 0, lo, -lo)
        with np.errstate(over="ignore"):
            soft = 1.0 - np.logaddexp(0.0, -z) / math.log(2.0)
        return (dec != U).sum(axis=0), soft.sum(axis=0)

    spans = _chunks(trials, chunk)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    errs = np.sum([p[0] for p in parts], axis=0).astype(np.int64)
    soft = np.sum([p[1] for p in parts], axis=0)
    return GenieEstimate(trials, errs, errs / trials, soft / trials)


def exact_index_info(pair: SymmetricPair, n: int, cap: int = DEFAULT_ALPHABET_CAP) -> np.ndarray:
    """``I(W^s, V^s)`` for every natural-order index of a depth-``n`` code."""
    return np.array([mismatched_info(p) for _, p in enumerate_depth(pair, n, cap=cap)])


def exact_index_error(pair: SymmetricPair, n: int, cap: int = DEFAULT_ALPHABET_CAP) -> np.ndarray:
    """Exact genie-aided error probability of the ``V``-decision per index."""
    out = []
    for _, p in enumerate_depth(pair, n, cap=cap):
        lr = leaf_llr_table(p.v)
        W = p.w.probs
        # decide 0 iff lr >= 0
        out.append(0.5 * (W[0][lr < 0].sum() + W[1][lr >= 0].sum()))
    return np.array(out)


def select_info_set(pair: SymmetricPair, n: int, rate: float, genie_trials: int = 2000, seed: int = 0,
                    exact_max_depth: int = EXACT_MAX_DEPTH, cap: int = DEFAULT_ALPHABET_CAP,
                    backend=None) -> PolarCodeConfig:
    """Keep the ``ceil(rate * N)`` best indices; frozen bits are zero.

    Up to ``exact_max_depth`` indices are ranked by the exact
    ``I(W^s, V^s)``.  Deeper codes are ranked by genie-aided Monte Carlo
    error frequency, ties broken by the genie estimate of the same
    functional.  Remaining ties go to the smaller index.
    """
    N = 1 << n
    K = math.ceil(rate * N - 1e-12)
    if not 0 <= K <= N:
        raise ValueError(f"rate {rate} gives K={K} outside 0..{N}")
    idx = np.arange(N)
    if n <= exact_max_depth:
        score = exact_index_info(pair, n, cap=cap)
        order = np.lexsort((idx, -score))
    else:
        est = genie_estimate(pair, n, genie_trials, seed=seed, backend=backend)
        order = np.lexsort((idx, -est.info_estimate, est.error_rate))
    return PolarCodeConfig(n, order[:K].tolist())
