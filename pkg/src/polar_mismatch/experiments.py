"""Random symmetric pairs, one-step improvement sweeps and the bound check.

Rows of ``W`` and ``V`` are drawn independently and uniformly from the
probability simplex (flat Dirichlet), floored at ``1e-6`` and renormalized.
Statistics of ``Delta`` depend on this sampling law.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .capacity import bound_profile, delta_components
from .channels import SymmetricPair, pair_to_dict
from .polar import DEFAULT_ALPHABET_CAP

ENTRY_FLOOR = 1e-6
ZERO_TOL = 1e-9
CONJECTURE_MIN_C = 1e-6
CONJECTURE_TOL = 1e-8


def random_symmetric_pair(L: int, rng, floor: float = ENTRY_FLOOR) -> SymmetricPair:
    """Reversal-symmetric pair with flat-Dirichlet rows for ``W`` and ``V``."""
    if L < 2:
        raise ValueError("L must be at least 2")

    def row():
        r = np.maximum(rng.dirichlet(np.ones(L)), floor)
        return r / r.sum()

    return SymmetricPair.from_rows(row(), row())


def record_seed(seed: int, index: int) -> int:
    """Per-record seed; ``random_symmetric_pair(L, default_rng(it))`` rebuilds the pair."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def pair_for_seed(L: int, rseed: int) -> SymmetricPair:
    return random_symmetric_pair(L, np.random.default_rng(rseed))


@dataclass
class ExperimentRecord:
    seed: int
    L: int
    C_WV: float
    C_minus: float
    C_plus: float
    delta: float
    bound_profile: list = field(default_factory=list)

    @property
    def C_WV_zero(self) -> bool:
        return self.C_WV < ZERO_TOL

    @property
    def improvement(self) -> bool:
        return self.delta > ZERO_TOL

    @property
    def loss(self) -> bool:
        return self.delta < -ZERO_TOL


def evaluate_pair(pair: SymmetricPair, rseed: int, depth: int, cap: int = DEFAULT_ALPHABET_CAP) -> ExperimentRecord:
    comp = delta_components(pair)
    prof = bound_profile(pair, depth, cap=cap, max_depth=max(depth, 0)).per_depth_bounds
    return ExperimentRecord(rseed, pair.L, comp.C_WV, comp.C_minus, comp.C_plus, comp.delta, list(prof))


def _eval_span(args):
    L, seed, lo, hi, depth, cap = args
    out = []
    for i in range(lo, hi):
        rs = record_seed(seed, i)
        out.append(evaluate_pair(pair_for_seed(L, rs), rs, depth, cap))
    return out


def _run(L, trials, depth, seed, cap, workers, chunk=64):
    spans = [(L, seed, a, min(a + chunk, trials), depth, cap) for a in range(0, trials, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_eval_span, spans))
    else:
        parts = [_eval_span(s) for s in spans]
    return [r for part in parts for r in part]


@dataclass
class SweepSummary:
    trials: int
    max_delta: float
    min_delta: float
    improvement: int
    loss: int
    neutral: int
    conjecture_violations: int

    def lines(self):
        return [
            f"trials: {self.trials}",
            f"max delta: {self.max_delta:.12g}",
            f"min delta: {self.min_delta:.12g}",
            f"improvement (delta > {ZERO_TOL:g}): {self.improvement}",
            f"loss (delta < -{ZERO_TOL:g}): {self.loss}",
            f"neutral: {self.neutral}",
            f"conjecture violations: {self.conjecture_violations}",
        ]


def violates_conjecture(rec: ExperimentRecord) -> bool:
    return rec.C_WV > CONJECTURE_MIN_C and any(b > rec.C_WV + CONJECTURE_TOL for b in rec.bound_profile)


def summarize(records) -> SweepSummary:
    deltas = [r.delta for r in records]
    imp = sum(r.improvement for r in records)
    loss = sum(r.loss for r in records)
    return SweepSummary(
        len(records),
        max(deltas) if deltas else math.nan,
        min(deltas) if deltas else math.nan,
        imp,
        loss,
        len(records) - imp - loss,
        sum(violates_conjecture(r) for r in records),
    )


def sweep(L: int, trials: int, depth: int = 1, seed: int = 0, cap: int = DEFAULT_ALPHABET_CAP, workers: int = 1):
    """Evaluate ``trials`` random pairs; returns ``(records, summary)``.

    Records come back sorted by ``C_WV`` (then by seed) regardless of
    ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    records = _run(L, trials, depth, seed, cap, workers)
    records.sort(key=lambda r: (r.C_WV, r.seed))
    return records, summarize(records)


# --------------------------------------------------------------------------
# CSV


def csv_header(depth: int):
    return ["seed", "L", "C_WV", "C_minus", "C_plus", "delta"] + [f"bound{k}" for k in range(depth + 1)]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def records_to_csv(records, depth: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(depth))
    for r in records:
        w.writerow([r.seed, r.L] + [_fmt(v) for v in (r.C_WV, r.C_minus, r.C_plus, r.delta, *r.bound_profile)])
    return buf.getvalue()


def records_from_csv(text: str):
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    nb = len(header) - 6
    out = []
    for row in body:
        vals = [float(v) for v in row[2:]]
        out.append(ExperimentRecord(int(row[0]), int(row[1]), *vals[:4], bound_profile=vals[4 : 4 + nb]))
    return out


def rounded(rec: ExperimentRecord) -> ExperimentRecord:
    """The record as it reads back from CSV (12 significant digits)."""
    r = lambda x: float(_fmt(x))  # noqa: E731
    return ExperimentRecord(rec.seed, rec.L, r(rec.C_WV), r(rec.C_minus), r(rec.C_plus), r(rec.delta),
                            [r(b) for b in rec.bound_profile])


# --------------------------------------------------------------------------
# bound-versus-capacity check


@dataclass
class ConjectureReport:
    L: int
    max_depth: int
    trials: int
    checked: int
    skipped: int
    max_excess: float
    counterexamples: list

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def lines(self):
        return [
            f"L={self.L} depth<={self.max_depth}: {self.checked} pairs checked, {self.skipped} skipped (C(W,V) <= {CONJECTURE_MIN_C:g})",
            f"max excess of bound over C(W,V): {self.max_excess:.3e}",
            f"counterexamples: {len(self.counterexamples)}",
        ]


def conjecture_check(L: int, trials: int, max_depth: int = 3, seed: int = 0, cap: int = DEFAULT_ALPHABET_CAP,
                     workers: int = 1) -> ConjectureReport:
    """Test ``bound_profile[n] <= C(W, V) + 1e-8`` for ``n <= max_depth`` on
    random pairs with ``C(W, V) > 1e-6``.

    Violations are collected with the full pair data, not raised.
    """
    if max_depth > 3:
        raise ValueError("max_depth is limited to 3")
    records = _run(L, trials, max_depth, seed, cap, workers)
    checked = [r for r in records if r.C_WV > CONJECTURE_MIN_C]
    excess = [max(b - r.C_WV for b in r.bound_profile) for r in checked]
    bad = []
    for r in checked:
        if violates_conjecture(r):
            bad.append({"record": r, "pair": pair_to_dict(pair_for_seed(L, r.seed))})
    return ConjectureReport(L, max_depth, trials, len(checked), len(records) - len(checked),
                            max(excess) if excess else -math.inf, bad)
