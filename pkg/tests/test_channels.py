import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_info, brute_mi, pairs
from polar_mismatch.capacity import mismatched_capacity, mismatched_info, mutual_information
from polar_mismatch.channels import (
    Channel,
    SymmetricPair,
    bsc,
    bsc_pair,
    canonicalize,
    decision_statistic,
    dump_pair,
    is_reversal,
    load_pair,
    merge_outputs,
    metric_from_channel,
    metric_is_symmetric,
    pair_from_dict,
    pair_to_dict,
    save_pair,
    validate_pair,
)
from polar_mismatch.errors import PairFormatError
from polar_mismatch.polar import minus_transform, plus_transform, raw_minus


def test_bsc_pair_is_valid(bsc_mismatch):
    assert validate_pair(bsc_mismatch).ok


def test_row_sum_violation_names_row_zero():
    w = Channel([[0.5, 0.49], [0.49, 0.5]])
    rep = validate_pair(SymmetricPair(w, bsc(0.1), [1, 0]))
    assert not rep.ok
    assert any("W: row 0" in p for p in rep.problems)


def test_three_cycle_is_not_an_involution():
    w = Channel([[1 / 3] * 3] * 2)
    rep = validate_pair(SymmetricPair(w, w, [1, 2, 0]))
    assert not rep.ok
    assert any("involution" in p for p in rep.problems)


def test_non_permutation_and_asymmetry_reported():
    w = Channel([[0.5, 0.5], [0.5, 0.5]])
    assert not validate_pair(SymmetricPair(w, w, [0, 0]))
    asym = Channel([[0.7, 0.3], [0.4, 0.6]])
    rep = validate_pair(SymmetricPair(asym, asym, [1, 0]))
    assert any("not symmetrized" in p for p in rep.problems)


def test_negative_entry_and_mismatched_sizes():
    w = Channel([[1.2, -0.2], [-0.2, 1.2]])
    assert any("negative" in p for p in validate_pair(SymmetricPair(w, w, [1, 0])).problems)
    v = Channel([[0.5, 0.25, 0.25], [0.25, 0.25, 0.5]])
    assert any("outputs" in p for p in validate_pair(SymmetricPair(bsc(0.1), v, [1, 0])).problems)


def test_metric_examples():
    d = metric_from_channel(Channel([[0.5, 0.5], [0.5, 0.5]]))
    assert np.allclose(d, 1.0)
    d = metric_from_channel(Channel([[0.89, 0.11], [0.11, 0.89]]))
    assert d[0] == pytest.approx([-math.log2(0.89), -math.log2(0.11)], rel=1e-15)
    assert d[0, 0] == pytest.approx(0.16812275880832692)
    assert d[0, 1] == pytest.approx(3.184424571137428)
    d = metric_from_channel(Channel([[1.0, 0.0], [0.0, 1.0]]))
    assert d[0, 0] == 0.0 and d[0, 1] == math.inf


def test_decision_statistic_conventions():
    s = decision_statistic([0.5, 0.0, 0.0, 0.2], [0.5, 0.3, 0.0, 0.0])
    assert s[0] == 0.0 and s[1] == math.inf and math.isnan(s[2]) and s[3] == -math.inf


# --------------------------------------------------------------------------
# canonicalize


def test_canonicalize_leaves_reversal_form_alone(bsc_mismatch):
    out, mapping = canonicalize(bsc_mismatch)
    assert out == bsc_mismatch
    assert mapping.tolist() == [0, 1]
    w = SymmetricPair.from_rows([0.5, 0.3, 0.2], [0.4, 0.4, 0.2])
    assert canonicalize(w)[0] == w


def _ternary_with_fixed_last():
    # pi swaps 0 and 1, fixes 2
    w = Channel([[0.6, 0.1, 0.3], [0.1, 0.6, 0.3]])
    v = Channel([[0.5, 0.2, 0.3], [0.2, 0.5, 0.3]])
    return SymmetricPair(w, v, [1, 0, 2])


def test_canonicalize_moves_swapped_symbols_to_the_ends():
    pair = _ternary_with_fixed_last()
    assert validate_pair(pair).ok
    out, mapping = canonicalize(pair)
    assert is_reversal(out.pi)
    assert sorted([mapping[0], mapping[1]]) == [0, 2]
    assert mapping[2] == 1
    assert validate_pair(out).ok
    for f in (lambda p: mutual_information(0.5, p.w), mismatched_info, mismatched_capacity):
        assert f(out) == pytest.approx(f(pair), abs=1e-12)
    assert brute_mi(0.5, out.w.probs) == pytest.approx(brute_mi(0.5, pair.w.probs), abs=1e-12)
    assert brute_info(out.w.probs, out.v.probs) == pytest.approx(brute_info(pair.w.probs, pair.v.probs), abs=1e-12)


def _random_involution(rng, L):
    perm = rng.permutation(L)
    pi = np.arange(L)
    k = rng.integers(0, L // 2 + 1)
    for j in range(k):
        a, b = perm[2 * j], perm[2 * j + 1]
        pi[a], pi[b] = b, a
    return pi


def _pair_for_pi(rng, pi):
    L = len(pi)
    out = []
    for _ in range(2):
        r0 = rng.random(L) + 0.05
        # fixed points must satisfy W(y|0) = W(y|1): enforce by symmetrizing
        r0 = r0 / r0.sum()
        r1 = r0[pi]
        out.append(Channel(np.vstack([r0, r1])))
    return SymmetricPair(out[0], out[1], pi)


@given(st.integers(0, 2**31 - 1), st.integers(2, 7))
@settings(max_examples=500)
def test_canonicalize_preserves_functionals(seed, L):
    rng = np.random.default_rng(seed)
    pair = _pair_for_pi(rng, _random_involution(rng, L))
    assert validate_pair(pair).ok
    out, mapping = canonicalize(pair)
    assert validate_pair(out).ok
    assert np.allclose(out.pi[out.pi], np.arange(out.L))
    assert mutual_information(0.5, out.w) == pytest.approx(mutual_information(0.5, pair.w), abs=1e-12)
    assert mismatched_info(out) == pytest.approx(mismatched_info(pair), abs=1e-12)
    assert mismatched_capacity(out) == pytest.approx(mismatched_capacity(pair), abs=1e-12)


# --------------------------------------------------------------------------
# merging


def test_equal_likelihood_ratios_merge_into_one_symbol():
    # V(y|1)/V(y|0) = 1/2, 1, 1, 2: the two middle outputs coincide
    pair = SymmetricPair.from_rows([0.1, 0.3, 0.2, 0.4], [0.4, 0.2, 0.2, 0.2])
    m = merge_outputs(pair)
    assert m.L == 3
    assert mismatched_info(m) == pytest.approx(brute_info(pair.w.probs, pair.v.probs), abs=1e-12)
    assert brute_info(m.w.probs, m.v.probs) == pytest.approx(mismatched_info(pair), abs=1e-12)


def test_distinct_ratios_are_kept():
    pair = SymmetricPair.from_rows([0.1, 0.2, 0.3, 0.4], [0.1, 0.3, 0.4, 0.2])
    assert merge_outputs(pair).L == 4


def test_bsc_pair_is_not_reduced(bsc_mismatch):
    m = merge_outputs(bsc_mismatch)
    assert m.L == 2
    assert np.allclose(m.w.probs, bsc_mismatch.w.probs)


def test_raw_minus_of_bsc_merges_to_bsc():
    raw = raw_minus(bsc_pair(0.11, 0.89))
    assert raw.L == 4
    assert validate_pair(raw).ok
    m = merge_outputs(raw)
    assert m.L == 2
    e = 2 * 0.11 * 0.89
    assert np.allclose(np.sort(m.w.probs[0]), [e, 1 - e], atol=1e-15)


def test_zero_w_outputs_are_dropped_and_v_renormalized():
    pair = SymmetricPair.from_rows([0.5, 0.0, 0.0, 0.5], [0.4, 0.05, 0.05, 0.5])
    m = merge_outputs(pair)
    assert m.L == 2
    assert np.allclose(m.v.probs.sum(axis=1), 1.0)
    assert validate_pair(m).ok


def test_infinite_and_void_classes_are_kept_apart():
    # V(y|1) = 0 at y=0, V(y|0) = 0 at y=3; the centre has V = 0 in both rows
    pair = SymmetricPair(
        Channel([[0.3, 0.2, 0.1, 0.2, 0.2], [0.2, 0.2, 0.1, 0.2, 0.3]]),
        Channel([[0.5, 0.3, 0.0, 0.2, 0.0], [0.0, 0.2, 0.0, 0.3, 0.5]]),
        [4, 3, 2, 1, 0],
    )
    assert validate_pair(pair).ok
    m = merge_outputs(pair)
    assert m.L == 5
    assert validate_pair(m).ok
    assert mismatched_info(m) == mismatched_info(pair) == -math.inf


@given(pairs(max_L=6))
@settings(max_examples=500)
def test_merge_preserves_info_and_capacity(pair):
    m = merge_outputs(pair)
    assert validate_pair(m).ok
    assert mismatched_info(m) == pytest.approx(mismatched_info(pair), abs=1e-10)
    assert mismatched_capacity(m) == pytest.approx(mismatched_capacity(pair), abs=1e-8)


@given(pairs(max_L=6, zeros=True))
@settings(max_examples=500)
def test_merge_is_idempotent_and_valid_with_zeros(pair):
    m = merge_outputs(pair)
    assert validate_pair(m).ok
    mm = merge_outputs(m)
    assert mm.L == m.L
    assert np.allclose(mm.w.probs, m.w.probs, atol=1e-15)
    assert np.allclose(mm.v.probs, m.v.probs, atol=1e-15)
    i0, i1 = mismatched_info(pair), mismatched_info(m)
    if math.isinf(i0):
        assert i1 == i0
    else:
        assert i1 == pytest.approx(i0, abs=1e-10)
    assert mismatched_capacity(m) == pytest.approx(mismatched_capacity(pair), abs=1e-8)


@given(pairs(max_L=4, zeros=True))
@settings(max_examples=500)
def test_constructors_and_transforms_are_valid(pair):
    assert validate_pair(pair).ok
    for q in (minus_transform(pair), plus_transform(pair), canonicalize(pair)[0], pair.matched()):
        assert validate_pair(q).ok
        assert metric_is_symmetric(metric_from_channel(q.v), q.pi)


# --------------------------------------------------------------------------
# file format


@given(pairs(max_L=6, zeros=True))
@settings(max_examples=500)
def test_json_round_trip_is_exact(pair):
    back = pair_from_dict(json.loads(dump_pair(pair)))
    assert back == pair


def test_file_round_trip(tmp_path, bsc_mismatch):
    path = tmp_path / "p.json"
    save_pair(bsc_mismatch, path)
    assert load_pair(path) == bsc_mismatch
    assert json.loads(path.read_text()) == pair_to_dict(bsc_mismatch)


@pytest.mark.parametrize(
    "obj, field",
    [
        ({"W": [[1, 0], [0, 1]], "V": [[1, 0], [0, 1]], "pi": [1, 0]}, "'L'"),
        ({"L": 2, "W": [[1, 0]], "V": [[1, 0], [0, 1]], "pi": [1, 0]}, "'W'"),
        ({"L": 2, "W": [[1, 0], [0, 1]], "V": [[1, "x"], [0, 1]], "pi": [1, 0]}, "'V'"),
        ({"L": 2, "W": [[1, 0], [0, 1]], "V": [[1, 0], [0, 1]], "pi": [1]}, "'pi'"),
        ({"L": 2, "W": [[0.6, 0.6], [0.6, 0.6]], "V": [[1, 0], [0, 1]], "pi": [1, 0]}, "W: row 0"),
        ({"L": 0, "W": [], "V": [], "pi": []}, "'L'"),
    ],
)
def test_malformed_pairs_name_the_field(obj, field):
    with pytest.raises(PairFormatError, match=field):
        pair_from_dict(obj)


def test_load_pair_rejects_bad_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(PairFormatError):
        load_pair(p)
