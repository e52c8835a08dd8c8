"""TF-IDF embedding, thresholded retrieval and article aggregation."""

import math
import random

import numpy as np
import pytest

import complygraph as cg
from complygraph import retrieval
from complygraph.errors import EmptyCorpus


def _chunks(texts):
    return [
        cg.ArticleChunk(f"ART{i}-P1", i, 1, text)
        for i, text in enumerate(texts, start=1)
    ]


def test_tokenize_lowercase_alphanumeric_runs():
    assert retrieval.tokenize("Data, SHARED with 3rd-parties!") == [
        "data", "shared", "with", "3rd", "parties",
    ]


def test_hand_computed_idf_two_text_corpus():
    # corpus ["alpha beta", "alpha gamma"]: df(alpha)=2, df(beta)=df(gamma)=1
    # idf = ln((1+2)/(1+df)) + 1 -> alpha: ln(1)+1 = 1.0, others: ln(1.5)+1
    vocab = retrieval.build_vocabulary(["alpha beta", "alpha gamma"])
    idf = {t: vocab.idf[i] for t, i in vocab.token_index.items()}
    assert idf["alpha"] == pytest.approx(1.0, abs=1e-12)
    expected = math.log(3 / 2) + 1.0
    assert idf["beta"] == pytest.approx(expected, abs=1e-12)
    assert idf["gamma"] == pytest.approx(expected, abs=1e-12)


def test_hand_computed_embedding_weights():
    vocab = retrieval.build_vocabulary(["alpha beta", "alpha gamma"])
    vec = retrieval.embed(vocab, "alpha beta")
    w_alpha = 1.0
    w_beta = math.log(3 / 2) + 1.0
    norm = math.hypot(w_alpha, w_beta)
    assert vec[vocab.token_index["alpha"]] == pytest.approx(w_alpha / norm, abs=1e-12)
    assert vec[vocab.token_index["beta"]] == pytest.approx(w_beta / norm, abs=1e-12)
    assert vec[vocab.token_index["gamma"]] == 0.0


def test_embed_indexed_chunk_equals_its_record_vector():
    chunks = _chunks(["users may request erasure", "we retain data for a year"])
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=1.0))
    rec = index.record("ART1-P1")
    again = retrieval.embed(index.vocabulary, chunks[0].text)
    assert np.array_equal(rec.vector, again)


def test_embed_blank_text_zero_vector():
    vocab = retrieval.build_vocabulary(["alpha beta"])
    assert not retrieval.embed(vocab, "").any()
    assert not retrieval.embed(vocab, "zzz qqq").any()


def test_build_index_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        cg.build_index([], cg.RetrieverConfig(threshold=1.0))


def test_config_validation():
    with pytest.raises(ValueError):
        cg.RetrieverConfig(threshold=0.0)
    with pytest.raises(ValueError):
        cg.RetrieverConfig(threshold=0.5, top_k=0)


def test_self_match_scores_exactly_zero():
    chunks = _chunks(["erasure on request", "retention for a year", "sharing with vendors"])
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=1.0))
    hits = cg.retrieve(index, "retention for a year", cg.RetrieverConfig(threshold=1.0))
    assert hits[0].chunk_id == "ART2-P1"
    assert hits[0].score == 0.0


def test_threshold_zero_point_boundary_keeps_only_exact_direction():
    chunks = _chunks(["alpha beta", "alpha gamma"])
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=1.0))
    # threshold must be > 0 by contract; use a tiny epsilon threshold instead
    hits = cg.retrieve(index, "alpha beta", cg.RetrieverConfig(threshold=1e-9))
    assert [h.chunk_id for h in hits] == ["ART1-P1"]


def test_zero_overlap_query_scores_exactly_one():
    chunks = _chunks(["alpha beta", "alpha gamma"])
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=2.0))
    hits = cg.retrieve(index, "zebra quokka", cg.RetrieverConfig(threshold=2.0))
    assert [h.score for h in hits] == [1.0, 1.0]


def _random_corpus(rng, n_chunks, vocab_size=40):
    words = [f"w{i}" for i in range(vocab_size)]
    texts = [
        " ".join(rng.choices(words, k=rng.randint(3, 12))) for _ in range(n_chunks)
    ]
    return _chunks(texts)


def test_retrieve_equals_exhaustive_scan_random_corpus():
    rng = random.Random(777)
    chunks = _random_corpus(rng, 50)
    config = cg.RetrieverConfig(threshold=0.8)
    index = cg.build_index(chunks, config)
    query = " ".join(rng.choices([f"w{i}" for i in range(40)], k=8))
    got = cg.retrieve(index, query, config)

    qv = retrieval.embed(index.vocabulary, query)
    expected = []
    for rec in index.records:
        score = round(min(max(1.0 - float(np.dot(qv, rec.vector)), 0.0), 2.0), 12)
        if score <= config.threshold:
            expected.append((score, rec.chunk.article_number, rec.chunk.chunk_id))
    expected.sort()
    assert [(h.score, h.article_number, h.chunk_id) for h in got] == expected


def test_threshold_monotonic_nesting():
    rng = random.Random(42)
    chunks = _random_corpus(rng, 30)
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=2.0))
    query = "w1 w2 w3 w4"
    previous: set = set()
    for threshold in (0.2, 0.5, 0.8, 1.1, 1.4):
        ids = {h.chunk_id for h in cg.retrieve(index, query, cg.RetrieverConfig(threshold=threshold))}
        assert previous <= ids
        previous = ids


def test_top_k_truncates_after_filter():
    chunks = _chunks(["alpha beta", "alpha gamma", "alpha delta"])
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=2.0))
    hits = cg.retrieve(index, "alpha", cg.RetrieverConfig(threshold=2.0, top_k=2))
    assert len(hits) == 2


def test_scores_within_bounds_and_under_threshold():
    rng = random.Random(5)
    chunks = _random_corpus(rng, 25)
    config = cg.RetrieverConfig(threshold=1.2)
    index = cg.build_index(chunks, config)
    for _ in range(10):
        query = " ".join(rng.choices([f"w{i}" for i in range(40)], k=6))
        for h in cg.retrieve(index, query, config):
            assert 0.0 <= h.score <= 2.0
            assert h.score <= config.threshold


def test_rank_invariant_under_corpus_permutation():
    rng = random.Random(31)
    chunks = _random_corpus(rng, 20)
    shuffled = chunks[:]
    rng.shuffle(shuffled)
    config = cg.RetrieverConfig(threshold=1.0)
    q = "w0 w5 w9"
    a = cg.retrieve(cg.build_index(chunks, config), q, config)
    b = cg.retrieve(cg.build_index(shuffled, config), q, config)
    assert a == b


def test_aggregate_min_per_article():
    hits = [
        cg.RetrievalHit("ART5-P1", 5, 0.3),
        cg.RetrievalHit("ART5-P2", 5, 0.7),
        cg.RetrievalHit("ART21-P1", 21, 0.4),
    ]
    assert cg.aggregate_articles(hits) == {5: 0.3, 21: 0.4}


def test_aggregate_empty():
    assert cg.aggregate_articles([]) == {}


def test_aggregate_equals_group_by_min_random():
    rng = random.Random(88)
    hits = [
        cg.RetrievalHit(f"ART{a}-P{i}", a, round(rng.random(), 6))
        for i in range(50)
        for a in [rng.randint(1, 8)]
    ]
    expected: dict = {}
    for h in hits:
        expected[h.article_number] = min(expected.get(h.article_number, 9.9), h.score)
    assert cg.aggregate_articles(hits) == expected


def test_dump_index_one_line_per_chunk():
    chunks = _chunks(["alpha beta", "alpha gamma"])
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=1.0))
    dump = retrieval.dump_index(index)
    lines = dump.strip().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("ART1-P1\t1\t")
