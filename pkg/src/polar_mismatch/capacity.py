"""Information measures for binary-input channels and channel pairs.

Covers entropies and mutual information at an arbitrary input law, the
mismatched functional ``I(W, V)``, the closed-form mismatched capacity of a
symmetric pair under a symmetric additive metric, a brute-force convex
oracle for ``I_d(P, W)`` and ``C_d(W)``, the positive-part bound profile and
the one-step improvement ``Delta(W, V)``.

Everything is in bits.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.special import expit

from .channels import Channel, SymmetricPair, metric_from_channel, metric_is_symmetric
from .errors import NonConvergenceError
from .polar import DEFAULT_ALPHABET_CAP, DEFAULT_MAX_DEPTH, depth_levels, minus_transform, plus_transform

log = logging.getLogger(__name__)

LN2 = math.log(2.0)
ALPHA_CAP = 2.0**40
CLAMP_LOG_TOL = 1e-9


def _plogp(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def binary_entropy(e: float) -> float:
    return float(-_plogp([e, 1.0 - e]).sum())


def _rows(w):
    return w.probs if isinstance(w, Channel) else np.asarray(w, dtype=float)


def output_entropy(p0: float, w) -> float:
    """``H(PW)`` for the input law ``P = (p0, 1 - p0)``."""
    W = _rows(w)
    q = p0 * W[0] + (1.0 - p0) * W[1]
    return float(-_plogp(q).sum())


def conditional_entropy(p0: float, w) -> float:
    """``H(W|P) = -sum_x P(x) sum_y W(y|x) log2 W(y|x)``."""
    W = _rows(w)
    return float(-(p0 * _plogp(W[0]).sum() + (1.0 - p0) * _plogp(W[1]).sum()))


def mutual_information(p0: float, w) -> float:
    return output_entropy(p0, w) - conditional_entropy(p0, w)


def symmetric_capacity(w) -> float:
    """Mutual information at the uniform input law."""
    return mutual_information(0.5, w)


def channel_capacity(w, tol: float = 1e-12) -> float:
    """Capacity of a binary-input channel (concave maximization over ``p0``)."""
    res = optimize.minimize_scalar(
        lambda p: -mutual_information(p, w), bounds=(0.0, 1.0), method="bounded", options={"xatol": tol}
    )
    return max(0.0, float(-res.fun), mutual_information(0.5, w))


def mismatched_info(pair: SymmetricPair) -> float:
    """The polar mismatched functional

    ``I(W, V) = sum_y sum_x 1/2 W(y|x) log2[V(y|x) / (V(y|0)/2 + V(y|1)/2)]``.

    Terms with ``W(y|x) = 0`` vanish; the result is ``-inf`` as soon as ``W``
    charges an output/input combination that ``V`` rules out.
    """
    W = pair.w.probs
    V = pair.v.probs
    vbar = 0.5 * (V[0] + V[1])
    total = 0.0
    for x in range(2):
        m = W[x] > 0
        if np.any(V[x][m] == 0):
            return -math.inf
        total += float(np.sum(W[x][m] * np.log2(V[x][m] / vbar[m])))
    return 0.5 * total


def _clamp(value: float, what: str) -> float:
    c = min(1.0, max(0.0, value))
    if abs(c - value) > CLAMP_LOG_TOL:
        log.info("%s clamped from %.3e to %g", what, value, c)
    return c


# --------------------------------------------------------------------------
# closed form for symmetric pairs


@dataclass(frozen=True)
class TiltedChannel:
    """Minimizing test channel ``W'`` with its tilt parameter ``alpha``.

    ``unclamped`` is the capacity before clipping to ``[0, 1]`` and
    ``residual`` the metric-constraint gap at the returned ``alpha``.
    """

    wprime: Channel
    alpha: float
    unclamped: float = 0.0
    residual: float = 0.0


def _tilt_weights(alpha, d, dp):
    """Share of an output orbit's mass kept on ``y`` (vs ``pi(y)``)."""
    t = np.full(d.shape, 0.5)
    both = np.isfinite(d) & np.isfinite(dp)
    t[both] = expit(alpha * (dp[both] - d[both]))
    # alpha -> 0+ limit when exactly one side is forbidden
    t[np.isinf(d) & np.isfinite(dp)] = 0.0
    t[np.isfinite(d) & np.isinf(dp)] = 1.0
    return t


def balakirsky_capacity(pair: SymmetricPair, metric=None, max_doublings: int = 60):
    """Mismatched capacity ``C_d(W)`` of a symmetric pair at the uniform input.

    The metric defaults to ``-log2 V``.  It must share the pair's symmetry
    (``d(0, y) = d(1, pi(y))``).  The minimizing channel keeps each orbit
    mass ``w_y + w_pi(y)`` and splits it with weights proportional to
    ``exp(-alpha * d_y)``; ``alpha >= 0`` is fixed by requiring the average
    metric of ``W'`` to equal that of ``W``.  When the constraint already
    holds at ``alpha = 0`` the split is even, ``W'`` is useless and the
    capacity is zero.

    Returns ``(capacity, TiltedChannel)``.
    """
    d = metric_from_channel(pair.v) if metric is None else np.asarray(metric, dtype=float)
    pi = pair.pi
    if d.shape != (2, pair.L):
        raise ValueError(f"metric shape {d.shape} does not match pair with L={pair.L}")
    if not metric_is_symmetric(d, pi):
        raise ValueError("metric is not symmetrized by the pair's permutation")

    w = pair.w.probs[0]
    s = w + w[pi]
    d0 = d[0]
    dp = d0[pi]
    q = 0.5 * s

    on = w > 0
    target_inf = bool(np.any(np.isinf(d0[on])))
    both = np.isfinite(d0) & np.isfinite(dp) & (s > 0)
    diff = dp[both] - d0[both]
    s_b = s[both]
    w_b = w[both]

    def gap(alpha):
        # average metric of W'(alpha) minus that of W, over finite orbits
        return -0.5 * float(np.sum((s_b * expit(alpha * diff) - w_b) * diff))

    if target_inf:
        alpha = 0.0
        wprime = q.copy()
        residual = 0.0
    else:
        g0 = gap(0.0)
        if g0 <= 0.0:
            alpha = 0.0
        else:
            hi = 1.0
            for _ in range(max_doublings):
                if gap(hi) <= 0.0 or hi >= ALPHA_CAP:
                    break
                hi *= 2.0
            if gap(hi) > 0.0:
                if gap(hi) > 1e-12:
                    raise NonConvergenceError(f"tilt root not bracketed below alpha={hi:g} (gap {gap(hi):.3e})")
                alpha = hi
            else:
                lo = 0.0
                for _ in range(400):
                    mid = 0.5 * (lo + hi)
                    if mid <= lo or mid >= hi:
                        break
                    if gap(mid) > 0.0:
                        lo = mid
                    else:
                        hi = mid
                alpha = lo if abs(gap(lo)) < abs(gap(hi)) else hi
        wprime = s * _tilt_weights(alpha, d0, dp)
        residual = gap(alpha)

    raw = float(-_plogp(q).sum() + _plogp(wprime).sum())
    cap = _clamp(raw, "mismatched capacity")
    W1 = Channel(np.vstack([wprime, wprime[pi]]))
    return cap, TiltedChannel(W1, float(alpha), raw, float(residual))


def mismatched_capacity(pair: SymmetricPair) -> float:
    """``C(W, V)``: closed-form capacity under the ``-log2 V`` metric."""
    return balakirsky_capacity(pair)[0]


def harmony_event(w, metric, reading: str = "corrected") -> bool:
    """Sign-agreement event deciding ``C_d(W) in {C(W), 0}`` for 2x2 channels.

    ``reading='corrected'`` compares ``sign(1 - W(0|0) - W(1|1))`` with
    ``sign(d00 + d11 - d01 - d10)``; ``reading='literal'`` uses
    ``sign(1 - W(0|0) + W(1|1))`` in place of the former.  Only the
    corrected form agrees with the brute-force oracle.
    """
    W = _rows(w)
    d = np.asarray(metric, dtype=float)
    if W.shape != (2, 2) or d.shape != (2, 2):
        raise ValueError("harmony rule applies to binary-output channels only")
    if reading == "corrected":
        chan = 1.0 - W[0, 0] - W[1, 1]
    elif reading == "literal":
        chan = 1.0 - W[0, 0] + W[1, 1]
    else:
        raise ValueError(f"unknown reading {reading!r}")
    with np.errstate(invalid="ignore"):
        met = d[0, 0] + d[1, 1] - d[0, 1] - d[1, 0]
    if math.isnan(met):
        return False
    return bool(np.sign(chan) == np.sign(met))


def binary_harmony_capacity(pair: SymmetricPair, metric=None, reading: str = "corrected") -> float:
    """``C(W) * 1{A}`` for a binary-output symmetric pair."""
    if pair.L != 2:
        raise ValueError("binary_harmony_capacity needs L = 2")
    d = metric_from_channel(pair.v) if metric is None else np.asarray(metric, dtype=float)
    if not harmony_event(pair.w, d, reading):
        return 0.0
    return symmetric_capacity(pair.w)


# --------------------------------------------------------------------------
# brute-force oracle


@dataclass(frozen=True)
class OracleResult:
    value: float
    wprime: Channel
    p0: float = 0.5


def _finite_dot(a, d):
    """``sum a*d`` with ``0 * inf = 0``."""
    m = a > 0
    return float(np.sum(a[m] * d[m]))


def id_oracle(p0: float, w, metric, starts: int = 6, seed: int = 0) -> OracleResult:
    """Numerically evaluate ``I_d(P, W)``: the minimum of ``I(P, W')`` over
    test channels ``W'`` with the output law of ``W`` and an average metric
    no larger than that of ``W``.

    The problem is convex in the joint masses ``a_y = P(0) W'(y|0)``.  With
    one degree of freedom it is solved by a bounded scalar search; otherwise
    by SLSQP from several starts (``W`` itself, the product channel and
    random mixtures), keeping the best feasible point.  Meant for small
    alphabets (``L <= 6``).
    """
    W = _rows(w)
    d = np.asarray(metric, dtype=float)
    L = W.shape[1]
    if L > 6:
        raise ValueError("id_oracle is limited to L <= 6")
    P0, P1 = p0, 1.0 - p0
    if P0 <= 0.0 or P1 <= 0.0:
        return OracleResult(0.0, Channel(W), p0)

    q_all = P0 * W[0] + P1 * W[1]
    keep = q_all > 0
    q = q_all[keep]
    d0 = d[0][keep]
    d1 = d[1][keep]
    a_w = P0 * W[0][keep]
    budget = _finite_dot(a_w, d0) + _finite_dot(q - a_w, d1)
    bounded = math.isfinite(budget)

    lo = np.zeros_like(q)
    hi = q.copy()
    if bounded:
        # forbidden cells must stay empty
        lo[np.isinf(d1)] = q[np.isinf(d1)]
        hi[np.isinf(d0)] = 0.0
    free = hi > lo
    base = np.where(free, 0.0, lo)
    qf = q[free]
    mass = P0 - base.sum()

    def assemble(af):
        a = base.copy()
        a[free] = np.clip(af, 0.0, qf)
        return a

    def objective(af):
        a = assemble(af)
        return _kl_terms(a, q - a, q, P0, P1)

    def metric_of(af):
        a = assemble(af)
        return _finite_dot(a, d0) + _finite_dot(q - a, d1)

    def result(af):
        a = assemble(af)
        return OracleResult(max(0.0, _kl_terms(a, q - a, q, P0, P1)), _wprime(a, q, keep, P0, P1, L), p0)

    if qf.size <= 1:
        return result(np.full(qf.size, mass))
    slope = (d0 - d1)[free] if bounded else None
    if qf.size == 2:
        _, af = _oracle_1d(qf, mass, slope, budget, metric_of, objective)
        return result(af)

    def grad(af):
        a = np.clip(af, 1e-300, qf)
        b = np.maximum(qf - a, 1e-300)
        return (np.log(a / (P0 * qf)) - np.log(b / (P1 * qf))) / LN2

    cons = [{"type": "eq", "fun": lambda af: np.array([af.sum() - mass]), "jac": lambda af: np.ones((1, af.size))}]
    if bounded:
        cons.append(
            {"type": "ineq", "fun": lambda af: np.array([budget - metric_of(af)]), "jac": lambda af: -slope[None, :]}
        )

    def feasible(af, tol=1e-9):
        if abs(np.clip(af, 0.0, qf).sum() - mass) > tol:
            return False
        return not bounded or metric_of(af) <= budget + tol

    a_start = a_w[free]
    rng = np.random.default_rng(seed)
    candidates = [a_start, P0 * qf * mass / (P0 * qf.sum())]
    for _ in range(max(0, starts - 2)):
        lam = rng.uniform()
        r = np.minimum(rng.dirichlet(np.ones(qf.size)) * mass, qf)
        candidates.append(lam * a_start + (1.0 - lam) * r)

    results = [(objective(a_start), a_start)]
    for x0 in candidates:
        try:
            with warnings.catch_warnings():
                # SLSQP may step marginally outside the box; feasible() re-checks
                warnings.simplefilter("ignore", RuntimeWarning)
                res = optimize.minimize(
                    objective,
                    x0,
                    jac=grad,
                    method="SLSQP",
                    bounds=list(zip(np.zeros_like(qf), qf)),
                    constraints=cons,
                    options={"ftol": 1e-15, "maxiter": 500},
                )
        except (ValueError, FloatingPointError):
            continue
        if feasible(res.x):
            results.append((objective(res.x), res.x))
    _, af = min(results, key=lambda r: r[0])
    return result(af)


def _kl_terms(a, b, q, P0, P1):
    """``I(P, W')`` in bits from joint masses ``a`` (input 0) and ``b`` (input 1)."""
    m0 = a > 0
    m1 = b > 0
    t0 = np.sum(a[m0] * np.log2(a[m0] / (P0 * q[m0])))
    t1 = np.sum(b[m1] * np.log2(b[m1] / (P1 * q[m1])))
    return float(t0 + t1)


def _wprime(a, q, keep, P0, P1, L):
    W = np.zeros((2, L))
    W[0][keep] = a / P0
    W[1][keep] = (q - a) / P1
    return Channel(W)


def _oracle_1d(qf, mass, slope, budget, metric_of, objective):
    """Exact search when two free coordinates remain (one degree of freedom)."""
    lo = max(0.0, mass - qf[1])
    hi = min(qf[0], mass)
    if slope is not None:
        # metric is affine in a0 along a = (a0, mass - a0)
        m_lo = metric_of(np.array([lo, mass - lo]))
        m_hi = metric_of(np.array([hi, mass - hi]))
        if m_hi != m_lo:
            t = (budget - m_lo) / (m_hi - m_lo)
            cut = lo + t * (hi - lo)
            if m_hi > m_lo:
                hi = min(hi, max(lo, cut))
            else:
                lo = max(lo, min(hi, cut))
    if hi <= lo:
        af = np.array([lo, mass - lo])
        return objective(af), af
    f = lambda a0: objective(np.array([a0, mass - a0]))  # noqa: E731
    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    cands = [(res.fun, res.x), (f(lo), lo), (f(hi), hi)]
    val, a0 = min(cands, key=lambda c: c[0])
    return float(val), np.array([a0, mass - a0])


def general_d_capacity(w, metric, step: float = 1e-3, starts: int = 2):
    """``C_d(W) = max_P I_d(P, W)`` by a dense grid over ``p0`` followed by a
    golden-section refinement around the best grid point.

    Returns ``(capacity, p0_argmax)``.
    """
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    vals = np.array([id_oracle(p, w, metric, starts=starts).value for p in grid])
    k = int(np.argmax(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    f = lambda p: id_oracle(p, w, metric, starts=starts).value  # noqa: E731
    best_p, best_v = grid[k], vals[k]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, e = b - invphi * (b - a), a + invphi * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(40):
        if fc > fe:
            b, e, fe = e, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + invphi * (b - a)
            fe = f(e)
        if b - a < 1e-9:
            break
    for p, v in ((c, fc), (e, fe)):
        if v > best_v:
            best_p, best_v = p, v
    return float(best_v), float(best_p)


# --------------------------------------------------------------------------
# bounds and one-step improvement


@dataclass(frozen=True)
class BoundProfile:
    """``per_depth_bounds[k] = 2**-k * sum_{|s|=k} max(I(W^s, V^s), 0)``."""

    depth: int
    per_depth_bounds: list
    branch_info: dict = field(default_factory=dict, repr=False)


def positive_part(x: float) -> float:
    return x if x > 0 else 0.0


def bound_profile(pair: SymmetricPair, n: int, cap: int = DEFAULT_ALPHABET_CAP, max_depth: int = DEFAULT_MAX_DEPTH, bins=None) -> BoundProfile:
    """Positive-part bounds on the probability of a good polarized channel."""
    if n < 0:
        raise ValueError("depth must be non-negative")
    if n > max_depth:
        raise ValueError(f"depth {n} exceeds the configured maximum {max_depth}")
    bounds = []
    info = {}
    for k, level in depth_levels(pair, n, cap=cap, bins=bins):
        vals = [mismatched_info(p) for _, p in level]
        info[k] = dict(zip((s for s, _ in level), vals))
        bounds.append(math.fsum(positive_part(v) for v in vals) / 2**k)
    return BoundProfile(n, bounds, info)


@dataclass(frozen=True)
class DeltaResult:
    C_WV: float
    C_minus: float
    C_plus: float

    @property
    def delta(self) -> float:
        return self.C_plus + self.C_minus - 2.0 * self.C_WV


def delta_components(pair: SymmetricPair) -> DeltaResult:
    return DeltaResult(
        mismatched_capacity(pair),
        mismatched_capacity(minus_transform(pair)),
        mismatched_capacity(plus_transform(pair)),
    )


def delta(pair: SymmetricPair) -> float:
    """``C(W+, V+) + C(W-, V-) - 2 C(W, V)``."""
    return delta_components(pair).delta
