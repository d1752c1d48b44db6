"""Binary-input channels, symmetric channel pairs and output merging.

A channel is stored as a ``2 x L`` row-stochastic matrix ``probs`` with
``probs[x, y] = W(y|x)``.  A :class:`SymmetricPair` bundles the true channel
``w`` with the decoding channel ``v`` and an involution ``pi`` on the output
alphabet such that ``W(y|0) = W(pi(y)|1)`` and likewise for ``V``.

All logarithms are base 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PairFormatError

ROW_TOL = 1e-12
SYM_TOL = 1e-12
MERGE_TOL = 1e-10


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Channel:
    """Binary-input DMC with transition matrix ``probs[x, y] = W(y|x)``.

    Construction only checks the shape; use :func:`channel_problems` or
    :func:`validate_pair` for the stochastic invariants.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 2 or probs.shape[0] != 2 or probs.shape[1] < 1:
            raise PairFormatError(f"channel matrix must have shape (2, L), got {probs.shape}")
        object.__setattr__(self, "probs", probs)

    @property
    def num_outputs(self) -> int:
        return self.probs.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return self.probs.shape == other.probs.shape and bool(np.array_equal(self.probs, other.probs))

    def __hash__(self):
        return hash(self.probs.tobytes())

    def allclose(self, other: "Channel", atol=1e-12) -> bool:
        return self.probs.shape == other.probs.shape and bool(
            np.allclose(self.probs, other.probs, rtol=0.0, atol=atol)
        )


def bsc(eps: float) -> Channel:
    """Binary symmetric channel with crossover probability ``eps``."""
    return Channel([[1.0 - eps, eps], [eps, 1.0 - eps]])


@dataclass(frozen=True, eq=False)
class SymmetricPair:
    """True channel ``w`` and decoding channel ``v`` sharing the involution ``pi``."""

    w: Channel
    v: Channel
    pi: np.ndarray = field(default=None)

    def __post_init__(self):
        if not isinstance(self.w, Channel):
            object.__setattr__(self, "w", Channel(self.w))
        if not isinstance(self.v, Channel):
            object.__setattr__(self, "v", Channel(self.v))
        pi = self.pi
        if pi is None:
            pi = reversal(self.w.num_outputs)
        object.__setattr__(self, "pi", _frozen(pi, dtype=np.int64))

    @property
    def L(self) -> int:
        return self.w.num_outputs

    @classmethod
    def from_rows(cls, w_row, v_row) -> "SymmetricPair":
        """Build a reversal-symmetric pair from the first rows of ``W`` and ``V``."""
        w_row = np.asarray(w_row, dtype=float)
        v_row = np.asarray(v_row, dtype=float)
        return cls(Channel([w_row, w_row[::-1]]), Channel([v_row, v_row[::-1]]), reversal(len(w_row)))

    def matched(self) -> "SymmetricPair":
        """The pair ``(W, W)``."""
        return SymmetricPair(self.w, self.w, self.pi)

    def __eq__(self, other):
        if not isinstance(other, SymmetricPair):
            return NotImplemented
        return self.w == other.w and self.v == other.v and np.array_equal(self.pi, other.pi)

    def __hash__(self):
        return hash((self.w, self.v, self.pi.tobytes()))


def bsc_pair(eps_w: float, eps_v: float) -> SymmetricPair:
    return SymmetricPair(bsc(eps_w), bsc(eps_v), np.array([1, 0]))


def reversal(L: int) -> np.ndarray:
    return np.arange(L - 1, -1, -1, dtype=np.int64)


def is_reversal(pi) -> bool:
    pi = np.asarray(pi)
    return bool(np.array_equal(pi, reversal(len(pi))))


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "valid" if self.ok else "; ".join(self.problems)


def channel_problems(ch: Channel, name: str = "W") -> list:
    out = []
    p = ch.probs
    if not np.all(np.isfinite(p)):
        bad = np.argwhere(~np.isfinite(p))[0]
        out.append(f"{name}: non-finite entry at row {bad[0]}, column {bad[1]}")
        return out
    neg = np.argwhere(p < 0)
    if len(neg):
        out.append(f"{name}: negative entry at row {neg[0][0]}, column {neg[0][1]}")
    for x in range(2):
        s = p[x].sum()
        if abs(s - 1.0) > ROW_TOL:
            out.append(f"{name}: row {x} sums to {float(s):.12g}, not 1")
    return out


def validate_pair(pair: SymmetricPair) -> ValidationReport:
    """Check every :class:`SymmetricPair` invariant; never raises."""
    rep = ValidationReport()
    rep.problems += channel_problems(pair.w, "W")
    rep.problems += channel_problems(pair.v, "V")
    L = pair.w.num_outputs
    if pair.v.num_outputs != L:
        rep.problems.append(f"W has {L} outputs but V has {pair.v.num_outputs}")
        return rep
    pi = pair.pi
    if pi.shape != (L,):
        rep.problems.append(f"pi has length {pi.size}, expected {L}")
        return rep
    if np.any(pi < 0) or np.any(pi >= L) or len(set(pi.tolist())) != L:
        rep.problems.append("pi is not a permutation of 0..L-1")
        return rep
    bad = np.flatnonzero(pi[pi] != np.arange(L))
    if bad.size:
        rep.problems.append(f"pi is not an involution: pi(pi({bad[0]})) = {pi[pi[bad[0]]]}")
    for name, ch in (("W", pair.w), ("V", pair.v)):
        gap = np.abs(ch.probs[0] - ch.probs[1][pi])
        if gap.size and np.nanmax(gap) > SYM_TOL:
            y = int(np.nanargmax(gap))
            rep.problems.append(f"{name} is not symmetrized by pi at output {y}")
    return rep


def require_valid(pair: SymmetricPair) -> None:
    rep = validate_pair(pair)
    if not rep.ok:
        raise PairFormatError(str(rep))


# --------------------------------------------------------------------------
# metrics


def metric_from_channel(v: Channel) -> np.ndarray:
    """Mismatched decoding metric ``d[x, y] = -log2 V(y|x)`` (``+inf`` at zeros)."""
    with np.errstate(divide="ignore"):
        d = -np.log2(v.probs)
    d[v.probs == 0] = np.inf
    return d


def metric_is_symmetric(d, pi) -> bool:
    d = np.asarray(d, dtype=float)
    return bool(np.all((d[0] == d[1][pi]) | np.isclose(d[0], d[1][pi], rtol=1e-12, atol=1e-12)))


def decision_statistic(v0, v1) -> np.ndarray:
    """``delta(y) = d(0,y) - d(1,y) = log2 V(y|1) - log2 V(y|0)``.

    ``NaN`` marks outputs impossible under both inputs of ``V``.
    """
    v0 = np.asarray(v0, dtype=float)
    v1 = np.asarray(v1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.log2(v1) - np.log2(v0)
    delta[(v0 == 0) & (v1 == 0)] = np.nan
    return delta


# --------------------------------------------------------------------------
# relabeling and merging


def canonicalize(pair: SymmetricPair):
    """Relabel outputs so that ``pi`` becomes ``y -> L-1-y``.

    Returns ``(canonical_pair, mapping)`` where ``mapping[y_old] = y_new``.
    Pairs that are already in reversal form are returned unchanged.

    Output orbits ``{y, pi(y)}`` keep their order of first appearance and fill
    the outer positions.  Fixed points of ``pi`` are pure-noise outputs
    (``W(y|0) = W(y|1)``); they are pooled into a single central symbol, with
    fixed points where ``V`` vanishes pooled separately.  Pooling only occurs
    when ``pi`` has more than one fixed point.
    """
    pi = pair.pi
    L = pair.L
    fixed = [y for y in range(L) if pi[y] == y]
    if is_reversal(pi) and len(fixed) <= 1:
        return pair, np.arange(L)

    orbits = [(y, int(pi[y])) for y in range(L) if y < pi[y]]
    v = pair.v.probs
    void = [y for y in fixed if v[0, y] == 0]
    live = [y for y in fixed if v[0, y] != 0]
    centers = [grp for grp in (live, void) if grp]
    n_new = 2 * len(orbits) + len(centers)
    mapping = np.empty(L, dtype=np.int64)
    for k, (a, b) in enumerate(orbits):
        mapping[a] = k
        mapping[b] = n_new - 1 - k
    for j, grp in enumerate(centers):
        mapping[grp] = len(orbits) + j

    new_pi = reversal(n_new)
    if len(centers) == 2:
        c = len(orbits)
        new_pi[c], new_pi[c + 1] = c, c + 1

    def relabel(probs):
        out = np.zeros((2, n_new))
        for x in range(2):
            np.add.at(out[x], mapping, probs[x])
        return out

    return SymmetricPair(Channel(relabel(pair.w.probs)), Channel(relabel(pair.v.probs)), new_pi), mapping


def _levels(delta, tol, bins):
    """Signed integer level per output; mirrored outputs get opposite levels.

    Returns ``(levels, nan_mask)``.  Level 0 is the zero-statistic class.
    """
    delta = np.asarray(delta, dtype=float)
    nan_mask = np.isnan(delta)
    levels = np.zeros(delta.shape, dtype=np.int64)
    fin = np.isfinite(delta)
    mag = np.abs(delta[fin])
    top = 0
    if mag.size:
        if bins:
            width = 2.0 * mag.max() / bins if mag.max() > 0 else 1.0
            grp = np.floor(mag / width + 0.5).astype(np.int64)
        else:
            order = np.argsort(mag, kind="stable")
            srt = mag[order]
            gaps = np.diff(srt) > tol * np.maximum(1.0, srt[:-1])
            grp_sorted = np.concatenate(([0], np.cumsum(gaps)))
            if srt[0] > tol:
                grp_sorted += 1
            grp = np.empty_like(grp_sorted)
            grp[order] = grp_sorted
        top = int(grp.max())
        levels[fin] = np.sign(delta[fin]).astype(np.int64) * grp
    inf = np.isinf(delta)
    levels[inf] = np.sign(delta[inf]).astype(np.int64) * (top + 1)
    return levels, nan_mask


def _merge_rows(w0, v0, v1, tol=MERGE_TOL, bins=None):
    """Merge outputs given only row 0 of ``W`` and both rows of ``V``.

    Relies on the input being symmetric: the mirror class of each merged
    class is recovered from the sign of the statistic, and row 1 of each
    merged channel is rebuilt from row 0 through that mirror.
    """
    delta = decision_statistic(v0, v1)
    levels, nan_mask = _levels(delta, tol, bins)
    uniq = np.unique(levels[~nan_mask])
    has_nan = bool(nan_mask.any())
    # Order: negative levels ascending, zero, NaN class, positive levels.
    keys = [int(u) for u in uniq if u <= 0]
    if has_nan:
        keys.append(None)
    keys += [int(u) for u in uniq if u > 0]
    pos = {k: i for i, k in enumerate(keys)}
    lut_vals = np.array([pos[int(u)] for u in uniq], dtype=np.int64)
    idx = np.empty(levels.shape, dtype=np.int64)
    if (~nan_mask).any():
        idx[~nan_mask] = lut_vals[np.searchsorted(uniq, levels[~nan_mask])]
    if has_nan:
        idx[nan_mask] = pos[None]
    K = len(keys)
    mirror = np.array([pos[None] if k is None else pos[-k] for k in keys], dtype=np.int64)

    w_row = np.bincount(idx, weights=w0, minlength=K)
    v_row = np.bincount(idx, weights=v0, minlength=K)

    keep = (w_row > 0) | (w_row[mirror] > 0)
    if not v_row[keep].any():
        # V lives only where W does not; keep everything so V stays normalizable
        keep[:] = True
    if not keep.all():
        new_index = np.cumsum(keep) - 1
        mirror = new_index[mirror[keep]]
        w_row = w_row[keep]
        v_row = v_row[keep]
    w_row = w_row / (w_row.sum() if w_row.sum() > 0 else 1.0)
    vs = v_row.sum()
    if vs > 0:
        v_row = v_row / vs
    w = Channel(np.vstack([w_row, w_row[mirror]]))
    v = Channel(np.vstack([v_row, v_row[mirror]]))
    return SymmetricPair(w, v, mirror)


def merge_outputs(pair: SymmetricPair, tol: float = MERGE_TOL, bins: int | None = None) -> SymmetricPair:
    """Merge outputs sharing the same decision statistic of ``V``.

    Outputs are grouped by ``delta(y) = d(0,y) - d(1,y)``: sorted magnitudes
    separated by at most ``tol * max(1, |delta|)`` share a group, so
    statistics below ``tol`` in magnitude count as ties at zero.  The
    ``+inf``, ``-inf`` and both-zero classes are kept apart.  Within a group the probabilities of ``W`` and ``V`` are
    summed.  Outputs never produced by ``W`` are dropped and ``V`` is
    renormalized, which leaves every decision of a ``V``-metric decoder
    unchanged.  A reduced result is ordered by increasing statistic, so its
    ``pi`` is the reversal whenever at most one class is self-mirrored.

    ``bins`` enables lossy uniform binning of the statistic instead of exact
    grouping.  A pair with nothing to merge or drop is returned as is.
    """
    m = _merge_rows(pair.w.probs[0], pair.v.probs[0], pair.v.probs[1], tol=tol, bins=bins)
    return pair if m.L == pair.L else m


def pairs_equal(pair: SymmetricPair, atol: float = 1e-12) -> bool:
    """Whether ``W`` and ``V`` coincide after merging."""
    m = merge_outputs(pair)
    return m.w.allclose(m.v, atol=atol)


# --------------------------------------------------------------------------
# file format


def pair_to_dict(pair: SymmetricPair) -> dict:
    return {
        "L": int(pair.L),
        "W": pair.w.probs.tolist(),
        "V": pair.v.probs.tolist(),
        "pi": [int(p) for p in pair.pi],
    }


def pair_from_dict(obj) -> SymmetricPair:
    """Parse the channel-pair JSON object; raises :class:`PairFormatError`."""
    if not isinstance(obj, dict):
        raise PairFormatError("top level: expected a JSON object")
    for key in ("L", "W", "V", "pi"):
        if key not in obj:
            raise PairFormatError(f"field '{key}': missing")
    L = obj["L"]
    if isinstance(L, bool) or not isinstance(L, int) or L < 1:
        raise PairFormatError("field 'L': must be a positive integer")
    mats = {}
    for key in ("W", "V"):
        m = obj[key]
        if (
            not isinstance(m, list)
            or len(m) != 2
            or any(not isinstance(r, list) or len(r) != L for r in m)
        ):
            raise PairFormatError(f"field '{key}': must be a 2 x {L} array")
        try:
            mats[key] = np.array(m, dtype=float)
        except (TypeError, ValueError) as exc:
            raise PairFormatError(f"field '{key}': non-numeric entry") from exc
    pi = obj["pi"]
    if not isinstance(pi, list) or len(pi) != L or any(isinstance(p, bool) or not isinstance(p, int) for p in pi):
        raise PairFormatError(f"field 'pi': must be a list of {L} integers")
    pair = SymmetricPair(Channel(mats["W"]), Channel(mats["V"]), np.array(pi, dtype=np.int64))
    rep = validate_pair(pair)
    if not rep.ok:
        raise PairFormatError(f"invalid pair: {rep}")
    return pair


def load_pair(path) -> SymmetricPair:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PairFormatError(f"not valid JSON: {exc}") from exc
    return pair_from_dict(obj)


def dump_pair(pair: SymmetricPair) -> str:
    return json.dumps(pair_to_dict(pair), indent=2) + "\n"


def save_pair(pair: SymmetricPair, path) -> None:
    Path(path).write_text(dump_pair(pair))
