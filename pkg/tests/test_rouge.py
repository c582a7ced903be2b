"""ROUGE scoring tests, including brute-force oracle comparisons."""

import itertools
import random

import pytest

from factsum.rouge import (
    RougeVariant,
    rouge_l,
    rouge_n,
    rouge_score,
    rouge_tokenize,
)


def test_tokenize_rules():
    assert rouge_tokenize("A fire broke out.") == ["a", "fire", "broke", "out"]
    assert rouge_tokenize("") == []
    assert rouge_tokenize("co-pilot's 2nd") == ["co", "pilot", "s", "2nd"]
    assert rouge_tokenize("  --  ") == []
    # Unicode letters count as alphanumeric; underscore does not.
    assert rouge_tokenize("Zürich's café_bar") == ["zürich", "s", "café", "bar"]


def test_rouge_n_examples():
    assert rouge_n("same text here", "same text here", 1).f1 == 1.0
    assert rouge_n("alpha beta", "gamma delta", 1).f1 == 0.0
    score = rouge_n("the cat sat", "the cat ran", 1)
    assert score.precision == score.recall == pytest.approx(2 / 3)
    assert score.f1 == pytest.approx(2 / 3)


def test_rouge_n_clipping():
    # candidate repeats "a" three times, reference has it twice: clipped to 2.
    score = rouge_n("a a a", "a a b", 1)
    assert score.precision == pytest.approx(2 / 3)
    assert score.recall == pytest.approx(2 / 3)


def test_rouge_n_empty_sides():
    assert rouge_n("", "words here", 1).f1 == 0.0
    assert rouge_n("words here", "", 1).f1 == 0.0
    # A one-token text has no bigrams.
    assert rouge_n("one", "one", 2).f1 == 0.0


def test_rouge_l_examples():
    assert rouge_l("a b c", "a b c").f1 == 1.0
    assert rouge_l("", "a b").f1 == 0.0
    score = rouge_l("a b c d", "a c b d")
    assert score.precision == pytest.approx(3 / 4)
    assert score.recall == pytest.approx(3 / 4)


def test_rouge_n_rejects_bad_n():
    with pytest.raises(ValueError):
        rouge_n("a", "a", 3)


def test_variant_dispatch():
    assert rouge_score("a b", "a b", RougeVariant.R1).f1 == 1.0
    assert rouge_score("a b", "a b", RougeVariant.R2).f1 == 1.0
    assert rouge_score("a b", "a b", RougeVariant.RL).f1 == 1.0


# ---------------------------------------------------------------------------
# Brute-force oracles (kept deliberately naive and independent)
# ---------------------------------------------------------------------------

def oracle_ngram_overlap(cand: list[str], ref: list[str], n: int):
    cand_grams = [tuple(cand[i : i + n]) for i in range(len(cand) - n + 1)]
    ref_grams = [tuple(ref[i : i + n]) for i in range(len(ref) - n + 1)]
    overlap = 0
    for gram in set(cand_grams):
        overlap += min(cand_grams.count(gram), ref_grams.count(gram))
    return overlap, len(cand_grams), len(ref_grams)


def oracle_lcs(a: list[str], b: list[str]) -> int:
    # Exhaustive: every subsequence of a checked for being a subsequence of b.
    subseqs_b = set()
    for r in range(len(b) + 1):
        subseqs_b.update(itertools.combinations(b, r))
    best = 0
    for r in range(len(a) + 1):
        for sub in itertools.combinations(a, r):
            if sub in subseqs_b:
                best = max(best, r)
    return best


def oracle_f1(overlap, n_cand, n_ref):
    if n_cand == 0 or n_ref == 0:
        return 0.0, 0.0, 0.0
    p, r = overlap / n_cand, overlap / n_ref
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def random_pairs(count, max_len=6, alphabet="xyz", seed=20):
    rng = random.Random(seed)

    def seq():
        return [rng.choice(alphabet) for _ in range(rng.randint(0, max_len))]

    return [(seq(), seq()) for _ in range(count)]


@pytest.mark.parametrize("n", [1, 2])
def test_rouge_n_matches_oracle(n):
    for cand, ref in random_pairs(800, seed=21 + n):
        got = rouge_n(" ".join(cand), " ".join(ref), n)
        want = oracle_f1(*oracle_ngram_overlap(cand, ref, n))
        assert got.precision == pytest.approx(want[0], abs=1e-12)
        assert got.recall == pytest.approx(want[1], abs=1e-12)
        assert got.f1 == pytest.approx(want[2], abs=1e-12)


def test_rouge_l_matches_oracle():
    for cand, ref in random_pairs(400, seed=23):
        got = rouge_l(" ".join(cand), " ".join(ref))
        lcs = oracle_lcs(cand, ref)
        want = oracle_f1(lcs, len(cand), len(ref))
        assert got.precision == pytest.approx(want[0], abs=1e-12)
        assert got.f1 == pytest.approx(want[2], abs=1e-12)


def test_f1_symmetry():
    for cand, ref in random_pairs(300, seed=29):
        for fn in (lambda a, b: rouge_n(a, b, 1), lambda a, b: rouge_n(a, b, 2), rouge_l):
            ab = fn(" ".join(cand), " ".join(ref))
            ba = fn(" ".join(ref), " ".join(cand))
            assert ab.precision == pytest.approx(ba.recall, abs=1e-12)
            assert ab.recall == pytest.approx(ba.precision, abs=1e-12)
            assert ab.f1 == pytest.approx(ba.f1, abs=1e-12)


def test_appending_reference_token_never_lowers_overlap():
    rng = random.Random(31)
    for _ in range(300):
        ref = [rng.choice("xyz") for _ in range(rng.randint(1, 6))]
        cand = [rng.choice("xyz") for _ in range(rng.randint(0, 6))]
        before, _, _ = oracle_ngram_overlap(cand, ref, 1)
        grown = cand + [rng.choice(ref)]
        after, _, _ = oracle_ngram_overlap(grown, ref, 1)
        assert after >= before
        got = rouge_n(" ".join(grown), " ".join(ref), 1)
        n_ref = len(ref)
        assert got.recall == pytest.approx(after / n_ref, abs=1e-12)


def test_scores_bounded():
    for cand, ref in random_pairs(200, seed=37):
        for score in (rouge_n(" ".join(cand), " ".join(ref), 1), rouge_l(" ".join(cand), " ".join(ref))):
            assert 0.0 <= score.precision <= 1.0
            assert 0.0 <= score.recall <= 1.0
            assert 0.0 <= score.f1 <= 1.0
