import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polar_mismatch.capacity import bound_profile, mismatched_capacity
from polar_mismatch.channels import is_reversal, validate_pair
from polar_mismatch.experiments import (
    ZERO_TOL,
    conjecture_check,
    csv_header,
    evaluate_pair,
    pair_for_seed,
    random_symmetric_pair,
    record_seed,
    records_from_csv,
    records_to_csv,
    rounded,
    summarize,
    sweep,
    violates_conjecture,
)


def test_binary_draw_is_a_bsc_pair():
    pair = random_symmetric_pair(2, np.random.default_rng(0))
    assert pair.L == 2 and is_reversal(pair.pi)
    for ch in (pair.w, pair.v):
        assert ch.probs[0, 0] == ch.probs[1, 1] and ch.probs[0, 1] == ch.probs[1, 0]


def test_draws_are_reproducible():
    a = random_symmetric_pair(4, np.random.default_rng(42))
    b = random_symmetric_pair(4, np.random.default_rng(42))
    assert a == b
    assert pair_for_seed(3, 7) == pair_for_seed(3, 7)
    assert record_seed(0, 1) != record_seed(0, 2) != record_seed(1, 1)


def test_bulk_draws_are_valid_and_floored():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        pair = random_symmetric_pair(3, rng)
        assert validate_pair(pair).ok
        assert pair.w.probs.min() > 0 and pair.v.probs.min() > 0
        assert pair.w.probs.min() >= 1e-6 / (1 + 3e-6)


def test_small_alphabet_rejected():
    with pytest.raises(ValueError):
        random_symmetric_pair(1, np.random.default_rng(0))


@pytest.fixture(scope="module")
def sweep3():
    return sweep(3, 500, depth=2, seed=5)


def test_records_are_consistent(sweep3):
    records, _ = sweep3
    for r in records:
        assert abs(r.delta - (r.C_plus + r.C_minus - 2 * r.C_WV)) <= 1e-12
        assert r.C_WV_zero == (r.C_WV < ZERO_TOL)
        assert r.improvement == (r.delta > ZERO_TOL)
        assert r.loss == (r.delta < -ZERO_TOL)
        assert not (r.improvement and r.loss)
        assert len(r.bound_profile) == 3
        assert r.bound_profile == sorted(r.bound_profile) or all(
            b >= a - 1e-12 for a, b in zip(r.bound_profile, r.bound_profile[1:])
        )


def test_records_sorted_and_reproducible(sweep3):
    records, summary = sweep3
    keys = [(r.C_WV, r.seed) for r in records]
    assert keys == sorted(keys)
    r0 = records[0]
    again = evaluate_pair(pair_for_seed(3, r0.seed), r0.seed, 2)
    assert again == r0
    assert summary.trials == 500
    assert summary.improvement + summary.loss + summary.neutral == 500
    assert summary.max_delta == max(r.delta for r in records)


def test_sweep_is_independent_of_workers():
    a, sa = sweep(4, 70, depth=1, seed=9)
    b, sb = sweep(4, 70, depth=1, seed=9, workers=2)
    assert a == b and sa == sb
    assert records_to_csv(a, 1) == records_to_csv(b, 1)


def test_csv_round_trip(sweep3):
    records, _ = sweep3
    text = records_to_csv(records, 2)
    assert text.splitlines()[0] == ",".join(csv_header(2))
    assert csv_header(2) == ["seed", "L", "C_WV", "C_minus", "C_plus", "delta", "bound0", "bound1", "bound2"]
    back = records_from_csv(text)
    assert back == [rounded(r) for r in records]
    assert records_to_csv(back, 2) == text


@given(st.floats(-10, 10, allow_nan=False), st.floats(0, 1), st.integers(0, 2**32 - 1))
@settings(max_examples=500)
def test_csv_fixed_point_for_any_values(x, y, seed):
    from polar_mismatch.experiments import ExperimentRecord

    rec = ExperimentRecord(seed, 3, y, x, y / 3, x - y, [y, x])
    text = records_to_csv([rec], 1)
    back = records_from_csv(text)
    assert back == [rounded(rec)]
    assert records_to_csv(back, 1) == text


def test_summary_lines_mention_counts(sweep3):
    lines = sweep3[1].lines()
    assert any(line.startswith("max delta") for line in lines)
    assert any("conjecture violations" in line for line in lines)
    assert summarize([]).trials == 0


def test_matched_pairs_meet_the_bound_with_equality():
    rng = np.random.default_rng(11)
    for _ in range(20):
        pair = random_symmetric_pair(3, rng).matched()
        c = mismatched_capacity(pair)
        prof = bound_profile(pair, 3).per_depth_bounds
        assert np.allclose(prof, c, atol=1e-8)


def test_zero_capacity_pairs_are_excluded(bsc_mismatch):
    rec = evaluate_pair(bsc_mismatch, 0, 3)
    assert rec.C_WV == 0.0
    assert rec.bound_profile[3] > 0
    assert not violates_conjecture(rec)


def test_conjecture_check_reports():
    rep = conjecture_check(3, 60, max_depth=2, seed=1)
    assert rep.checked + rep.skipped == 60
    assert rep.holds
    assert rep.max_excess <= 1e-8
    assert len(rep.lines()) == 3
    with pytest.raises(ValueError):
        conjecture_check(3, 10, max_depth=4)
