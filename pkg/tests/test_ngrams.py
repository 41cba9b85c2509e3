import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tonalgrams.ngrams import (
    combination_bound, contiguous_token_total, count_contiguous, count_skipgrams, cumulative, enumerate_skipgrams,
    merge_skip_vectors, skip_count_vectors, skip_token_total,
)

from oracles import exact_skip_counts, skipgram_oracle


def _random_corpus(rng, movements=5, max_len=15, alphabet="abcd"):
    return [[rng.choice(alphabet) for _ in range(rng.randrange(0, max_len))] for _ in range(movements)]


def test_contiguous_five_events():
    assert count_contiguous(["abcde"], 2).total == 4


def test_contiguous_clamped():
    assert count_contiguous(["abc"], 5).total == 0


def test_contiguous_n_zero():
    with pytest.raises(ValueError):
        count_contiguous(["abc"], 0)


def test_contiguous_matches_windows():
    rng = random.Random(1)
    for _ in range(100):
        corpus = _random_corpus(rng)
        n = rng.randrange(1, 5)
        table = count_contiguous(corpus, n)
        windows = Counter(tuple(s[i:i + n]) for s in corpus for i in range(len(s) - n + 1))
        assert table.counts == windows
        assert table.total == contiguous_token_total(map(len, corpus), n)


def test_no_cross_movement_tokens():
    table = count_contiguous([["a"], ["b"]], 2)
    assert table.total == 0
    assert count_skipgrams([["a", "x"], ["b"]], 2, 5).counts == Counter({("a", "x"): 1})


@pytest.mark.parametrize("k, n, expected", [(5, 2, 10), (20, 2, 190), (7, 0, 1), (3, 5, 0), (10, 10, 1)])
def test_combination_bound(k, n, expected):
    assert combination_bound(k, n) == expected


def test_skipgrams_five_event_t3():
    tokens = list(enumerate_skipgrams("abcde", 2, 3))
    assert len(tokens) == 10 == combination_bound(5, 2)


def test_skipgram_figure_examples():
    idx = {ix for _, ix in enumerate_skipgrams("abcde", 2, 2)}
    # ac, bd are one-skip tokens; ad, be are two-skip tokens
    assert {(0, 2), (1, 3), (0, 3), (1, 4)} <= idx
    assert (0, 4) not in idx


def test_zero_skip_is_contiguous():
    rng = random.Random(2)
    for _ in range(50):
        corpus = _random_corpus(rng)
        for n in (1, 2, 3, 4):
            assert count_skipgrams(corpus, n, 0).counts == count_contiguous(corpus, n).counts


def test_trigram_total_budget_matches_brute_force():
    rng = random.Random(3)
    for _ in range(200):
        seq = [rng.choice("abc") for _ in range(8)]
        got = sorted(enumerate_skipgrams(seq, 3, 2), key=lambda x: x[1])
        assert got == sorted(skipgram_oracle(seq, 3, 2), key=lambda x: x[1])


@given(st.lists(st.sampled_from("xyz"), max_size=12), st.integers(1, 4), st.integers(0, 6))
def test_enumeration_matches_oracle(seq, n, t):
    got = sorted(ix for _, ix in enumerate_skipgrams(seq, n, t))
    assert got == sorted(ix for _, ix in skipgram_oracle(seq, n, t))
    assert Counter(typ for typ, _ in enumerate_skipgrams(seq, n, t)) == count_skipgrams([seq], n, t).counts


def test_skip_vectors_hand_example():
    vecs = skip_count_vectors(["abab"], 3)
    assert vecs[("a", "b")][:2] == [2, 0]
    assert vecs[("a", "a")][1] == 1
    assert vecs[("a", "b")] == [2, 0, 1, 0]
    assert vecs[("b", "a")] == [1, 0, 0, 0]
    assert vecs[("b", "b")] == [0, 1, 0, 0]


def test_skip_vectors_against_oracle_and_closed_form():
    rng = random.Random(4)
    for _ in range(50):
        corpus = _random_corpus(rng, max_len=25)
        t_max = rng.randrange(0, 12)
        vecs = skip_count_vectors(corpus, t_max)
        assert vecs == exact_skip_counts(corpus, t_max)
        assert sum(map(sum, vecs.values())) == skip_token_total(map(len, corpus), t_max)
        contiguous = count_contiguous(corpus, 2).counts
        assert {k: v[0] for k, v in vecs.items() if v[0]} == dict(contiguous)
        for t in range(t_max + 1):
            tokens = Counter(typ for s in corpus for typ, _ in enumerate_skipgrams(s, 2, t))
            assert {k: cumulative(v)[t] for k, v in vecs.items() if cumulative(v)[t]} == dict(tokens)


def test_cumulative_reaches_all_pairs():
    seq = list("abcabcab")
    vecs = skip_count_vectors([seq], len(seq))
    total = sum(cumulative(v)[len(seq) - 2] for v in vecs.values())
    assert total == combination_bound(len(seq), 2)
    prev = 0
    for t in range(len(seq)):
        cur = sum(cumulative(v)[t] for v in vecs.values())
        assert cur >= prev
        prev = cur


def test_merge_is_order_independent():
    rng = random.Random(5)
    corpus = _random_corpus(rng, movements=8)
    parts = [skip_count_vectors([s], 10) for s in corpus]
    a = merge_skip_vectors(parts)
    b = merge_skip_vectors(reversed(parts))
    assert a == b == skip_count_vectors(corpus, 10)
    assert list(a) == list(b)


def test_table_ranking_order():
    table = count_contiguous(["abab", "ba"], 2)
    assert table.ranked() == [(("a", "b"), 2), (("b", "a"), 2)]
