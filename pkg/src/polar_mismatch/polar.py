"""Arikan's 2x2 polar transforms applied jointly to a channel pair.

Raw output layouts, before merging:

* minus: ``(y1, y2)`` at index ``y1 * L + y2``, symmetrized by
  ``(y1, y2) -> (pi(y1), y2)``;
* plus: ``(y1, y2, u1)`` at index ``(y1 * L + y2) * 2 + u1``, symmetrized by
  ``(y1, y2, u1) -> (pi(y1), pi(y2), u1)``.

Every step is followed by :func:`~polar_mismatch.channels.merge_outputs`, so
``W`` and ``V`` always share one output alphabet.
"""

from __future__ import annotations

import itertools

import numpy as np

from .channels import Channel, SymmetricPair, _merge_rows, merge_outputs
from .errors import AlphabetCapError

MINUS = "-"
PLUS = "+"
DEFAULT_ALPHABET_CAP = 4096
DEFAULT_MAX_DEPTH = 4
# Raw (pre-merge) plus-transform size guard; 2 * 2048**2 outputs.
MAX_RAW_OUTPUTS = 2 * 2048 * 2048


def parse_signs(seq) -> str:
    """Normalize a sign sequence given as a string or iterable of '+'/'-'."""
    if isinstance(seq, str):
        s = seq.replace("−", "-").replace(" ", "")
    else:
        s = "".join(seq)
    bad = set(s) - {MINUS, PLUS}
    if bad:
        raise ValueError(f"sign sequence may only contain '+' and '-', got {sorted(bad)}")
    return s


def raw_minus(pair: SymmetricPair) -> SymmetricPair:
    """Unmerged ``(W^-, V^-)`` over ``Y x Y``."""
    pi = pair.pi
    L = pair.L

    def minus(p):
        row0 = 0.5 * (np.outer(p[0], p[0]) + np.outer(p[1], p[1])).ravel()
        row1 = 0.5 * (np.outer(p[1], p[0]) + np.outer(p[0], p[1])).ravel()
        return Channel(np.vstack([row0, row1]))

    y1, y2 = np.divmod(np.arange(L * L), L)
    return SymmetricPair(minus(pair.w.probs), minus(pair.v.probs), pi[y1] * L + y2)


def raw_plus(pair: SymmetricPair) -> SymmetricPair:
    """Unmerged ``(W^+, V^+)`` over ``Y x Y x {0,1}``."""
    pi = pair.pi
    L = pair.L

    def plus(p):
        out = np.empty((2, L, L, 2))
        for u2 in range(2):
            for u1 in range(2):
                out[u2, :, :, u1] = 0.5 * np.outer(p[u1 ^ u2], p[u2])
        return Channel(out.reshape(2, -1))

    y12, u1 = np.divmod(np.arange(2 * L * L), 2)
    y1, y2 = np.divmod(y12, L)
    return SymmetricPair(plus(pair.w.probs), plus(pair.v.probs), (pi[y1] * L + pi[y2]) * 2 + u1)


def _minus_rows(pair):
    w, v = pair.w.probs, pair.v.probs
    w0 = 0.5 * (np.outer(w[0], w[0]) + np.outer(w[1], w[1])).ravel()
    v0 = 0.5 * (np.outer(v[0], v[0]) + np.outer(v[1], v[1])).ravel()
    v1 = 0.5 * (np.outer(v[1], v[0]) + np.outer(v[0], v[1])).ravel()
    return w0, v0, v1


def _plus_rows(pair):
    w, v = pair.w.probs, pair.v.probs
    L = pair.L
    # index (y1 * L + y2) * 2 + u1; input u2 = 0 gives W(y1|u1) W(y2|0)
    w0 = 0.5 * np.stack([np.outer(w[0], w[0]), np.outer(w[1], w[0])], axis=-1).reshape(-1)
    v0 = 0.5 * np.stack([np.outer(v[0], v[0]), np.outer(v[1], v[0])], axis=-1).reshape(-1)
    v1 = 0.5 * np.stack([np.outer(v[1], v[1]), np.outer(v[0], v[1])], axis=-1).reshape(-1)
    assert w0.size == 2 * L * L
    return w0, v0, v1


def _apply(pair, sign, bins=None, step=None):
    raw = pair.L * pair.L * (2 if sign == PLUS else 1)
    if raw > MAX_RAW_OUTPUTS:
        raise AlphabetCapError(
            f"step {step}: raw alphabet {raw} exceeds the {MAX_RAW_OUTPUTS} raw-output guard",
            step=step,
            size=raw,
        )
    rows = _plus_rows(pair) if sign == PLUS else _minus_rows(pair)
    return _merge_rows(*rows, bins=bins)


def minus_transform(pair: SymmetricPair, bins: int | None = None) -> SymmetricPair:
    """Merged ``(W^-, V^-)``."""
    return _apply(pair, MINUS, bins)


def plus_transform(pair: SymmetricPair, bins: int | None = None) -> SymmetricPair:
    """Merged ``(W^+, V^+)``."""
    return _apply(pair, PLUS, bins)


def transform_steps(pair, seq, cap=DEFAULT_ALPHABET_CAP, bins=None):
    """Yield ``(step, sign, raw_size, merged_pair)`` while folding ``seq``."""
    signs = parse_signs(seq)
    for k, sign in enumerate(signs, start=1):
        raw = pair.L * pair.L * (2 if sign == PLUS else 1)
        pair = _apply(pair, sign, bins, step=k)
        if pair.L > cap:
            raise AlphabetCapError(
                f"step {k} ('{sign}'): merged alphabet {pair.L} exceeds cap {cap}", step=k, size=pair.L
            )
        yield k, sign, raw, pair


def transform_by_sequence(pair: SymmetricPair, seq, cap: int = DEFAULT_ALPHABET_CAP, bins=None) -> SymmetricPair:
    """Apply the transforms in ``seq`` left to right (first sign acts on ``W``).

    The empty sequence returns ``pair`` itself.
    """
    for _, _, _, pair in transform_steps(pair, seq, cap=cap, bins=bins):
        pass
    return pair


def sign_sequences(n: int):
    """All ``2**n`` sign strings of length ``n`` in lexicographic order, ``-`` before ``+``."""
    return ["".join(s) for s in itertools.product((MINUS, PLUS), repeat=n)]


def index_to_signs(i: int, n: int) -> str:
    """Sign string of the synthetic channel at 0-based natural-order index ``i``.

    Bit ``j`` of ``i`` (most significant first) selects ``-`` for 0, ``+`` for 1.
    """
    return "".join(PLUS if (i >> (n - 1 - j)) & 1 else MINUS for j in range(n))


def enumerate_depth(pair: SymmetricPair, n: int, cap: int = DEFAULT_ALPHABET_CAP, bins=None):
    """All ``(signs, pair^signs)`` of length ``n`` in lexicographic order.

    Shared prefixes are transformed once.
    """
    if n < 0:
        raise ValueError("depth must be non-negative")
    for _, level in depth_levels(pair, n, cap=cap, bins=bins):
        pass
    return level


def depth_levels(pair: SymmetricPair, n: int, cap: int = DEFAULT_ALPHABET_CAP, bins=None):
    """Yield the enumeration at every depth ``0..n`` (reusing each level)."""
    level = [("", pair)]
    yield 0, level
    for depth in range(1, n + 1):
        nxt = []
        for s, p in level:
            for sign in (MINUS, PLUS):
                q = _apply(p, sign, bins, step=depth)
                if q.L > cap:
                    raise AlphabetCapError(
                        f"step {depth} of '{s + sign}': merged alphabet {q.L} exceeds cap {cap}",
                        step=depth,
                        size=q.L,
                    )
                nxt.append((s + sign, q))
        level = nxt
        yield depth, level


__all__ = [
    "MINUS",
    "PLUS",
    "DEFAULT_ALPHABET_CAP",
    "DEFAULT_MAX_DEPTH",
    "parse_signs",
    "raw_minus",
    "raw_plus",
    "minus_transform",
    "plus_transform",
    "transform_steps",
    "transform_by_sequence",
    "sign_sequences",
    "index_to_signs",
    "enumerate_depth",
    "depth_levels",
    "merge_outputs",
]
