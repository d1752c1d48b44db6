"""Hypothesis strategies and brute-force oracles written independently of
the package internals (plain loops over the defining sums)."""

import math
from collections import defaultdict

import numpy as np
from hypothesis import strategies as st

from polar_mismatch.channels import SymmetricPair
from polar_mismatch.experiments import random_symmetric_pair


def h2(e):
    return 0.0 if e in (0.0, 1.0) else -e * math.log2(e) - (1 - e) * math.log2(1 - e)


def _row(draw, L, zeros):
    # integer weights: likelihood ratios either tie exactly or differ clearly
    raw = draw(st.lists(st.integers(0 if zeros else 1, 40), min_size=L, max_size=L))
    r = np.asarray(raw, dtype=float)
    if r.sum() <= 0:
        r = np.ones(L)
    return r / r.sum()


@st.composite
def pairs(draw, min_L=2, max_L=5, zeros=False):
    """Reversal-symmetric pairs; ``zeros=True`` lets entries vanish exactly."""
    L = draw(st.integers(min_L, max_L))
    return SymmetricPair.from_rows(_row(draw, L, zeros), _row(draw, L, zeros))


@st.composite
def seeded_pairs(draw, min_L=2, max_L=4):
    L = draw(st.integers(min_L, max_L))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_symmetric_pair(L, np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# definitions by loops


def brute_info(W, V):
    """sum_x sum_y 1/2 W(y|x) log2(V(y|x) / (V(y|0)/2 + V(y|1)/2))."""
    total = 0.0
    for x in range(2):
        for y in range(len(W[0])):
            if W[x][y] == 0:
                continue
            if V[x][y] == 0:
                return -math.inf
            total += 0.5 * W[x][y] * math.log2(V[x][y] / (0.5 * V[0][y] + 0.5 * V[1][y]))
    return total


def brute_mi(p0, W):
    P = (p0, 1 - p0)
    L = len(W[0])
    total = 0.0
    for y in range(L):
        q = P[0] * W[0][y] + P[1] * W[1][y]
        for x in range(2):
            if P[x] * W[x][y] > 0:
                total += P[x] * W[x][y] * math.log2(W[x][y] / q)
    return total


def brute_minus(W):
    """W-(y1 y2 | u1) = sum_u2 1/2 W(y1|u1^u2) W(y2|u2), index y1*L + y2."""
    L = len(W[0])
    out = np.zeros((2, L * L))
    for u1 in range(2):
        for y1 in range(L):
            for y2 in range(L):
                out[u1, y1 * L + y2] = sum(0.5 * W[u1 ^ u2][y1] * W[u2][y2] for u2 in range(2))
    return out


def brute_plus(W):
    """W+(y1 y2 u1 | u2) = 1/2 W(y1|u1^u2) W(y2|u2), index (y1*L + y2)*2 + u1."""
    L = len(W[0])
    out = np.zeros((2, 2 * L * L))
    for u2 in range(2):
        for y1 in range(L):
            for y2 in range(L):
                for u1 in range(2):
                    out[u2, (y1 * L + y2) * 2 + u1] = 0.5 * W[u1 ^ u2][y1] * W[u2][y2]
    return out


def generator_matrix(n):
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    G = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        G = np.kron(G, F)
    return G


# ---------------------------------------------------------------------------
# log-ratio density evolution for symmetric pairs


def _box(a, b):
    """Exact check-node combination in high precision."""
    if math.isinf(a) and math.isinf(b):
        return math.copysign(math.inf, a * b)
    ta = 1.0 if math.isinf(a) else math.tanh(a / 2)
    tb = 1.0 if math.isinf(b) else math.tanh(b / 2)
    ta = math.copysign(abs(ta), a)
    tb = math.copysign(abs(tb), b)
    p = ta * tb
    if abs(p) >= 1.0:
        return math.copysign(math.inf, p)
    return 2 * math.atanh(p)


def _lr(p0, p1):
    # difference of logs is exactly antisymmetric under swapping the inputs
    if p0 == 0 and p1 == 0:
        return 0.0
    if p1 == 0:
        return math.inf
    if p0 == 0:
        return -math.inf
    return math.log(p0) - math.log(p1)


def _key(x):
    return x if math.isinf(x) else float(f"{x:.12g}")


class LLRPair:
    """Joint law of (log-ratio of W, log-ratio of V) at the all-zero input."""

    def __init__(self, atoms):
        # group on rounded keys, keep the first exact value as representative
        rep = {}
        acc = defaultdict(float)
        for (a, b), p in atoms:
            if p > 0:
                k = (_key(a), _key(b))
                rep.setdefault(k, (a, b))
                acc[k] += p
        self.atoms = {rep[k]: p for k, p in acc.items()}

    @classmethod
    def from_pair(cls, pair):
        W = pair.w.probs
        V = pair.v.probs
        atoms = []
        for y in range(pair.L):
            a = _lr(W[0][y], W[1][y])
            b = _lr(V[0][y], V[1][y])
            atoms.append(((a, b), W[0][y]))
        return cls(atoms)

    def minus(self):
        it = list(self.atoms.items())
        return LLRPair([((_box(a1, a2), _box(b1, b2)), p1 * p2) for (a1, b1), p1 in it for (a2, b2), p2 in it])

    def plus(self):
        it = list(self.atoms.items())
        return LLRPair([((a1 + a2, b1 + b2), p1 * p2) for (a1, b1), p1 in it for (a2, b2), p2 in it])

    def apply(self, seq):
        out = self
        for s in seq:
            out = out.minus() if s == "-" else out.plus()
        return out

    def info(self):
        """E[log2(2 / (1 + exp(-b)))] = I(W, V) for a symmetric pair."""
        total = 0.0
        for (_, b), p in self.atoms.items():
            if b == -math.inf:
                return -math.inf
            total += p * (1.0 - (math.log1p(math.exp(-b)) / math.log(2) if b > -700 else -b / math.log(2)))
        return total

    def error(self):
        """Genie error of the V decision (0 iff V log-ratio >= 0), uniform input.

        Ties are wrong only when 1 was sent, hence the half weight.
        """
        return sum(p if b < 0 else 0.5 * p for (_, b), p in self.atoms.items() if b <= 0)


# acceptance criterion lines, printed in the terminal summary
ACCEPTANCE = []
