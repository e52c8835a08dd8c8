"""Micro-averaged correctness scoring and threshold sweeps."""

import pytest

import complygraph as cg
from complygraph import evaluation, rag
from complygraph.errors import NoOverlap


def _predictions(segment_articles):
    providers: dict = {}
    for (pid, _), arts in segment_articles.items():
        providers[pid] = providers.get(pid, frozenset()) | frozenset(n for n, _ in arts)
    return rag.PolicyArticleMap(providers, dict(segment_articles))


def test_micro_f1_hand_example():
    # three segments with (tp, fp, fn) = (2,1,0), (1,0,1), (0,1,1)
    # totals tp=3 fp=2 fn=2 -> P = R = F1 = 0.6
    truth = cg.GroundTruth({
        ("p", "s1"): frozenset({1, 2}),
        ("p", "s2"): frozenset({3, 4}),
        ("p", "s3"): frozenset({5}),
    })
    predictions = _predictions({
        ("p", "s1"): ((1, 0.1), (2, 0.2), (9, 0.3)),
        ("p", "s2"): ((3, 0.1),),
        ("p", "s3"): ((8, 0.2),),
    })
    result = cg.correctness_at(predictions, truth, threshold=0.5)
    assert result.precision == pytest.approx(0.6, abs=1e-12)
    assert result.recall == pytest.approx(0.6, abs=1e-12)
    assert result.f1 == pytest.approx(0.6, abs=1e-12)
    assert result.n_segments == 3


def test_perfect_predictions_score_one():
    truth = cg.GroundTruth({("p", "s1"): frozenset({4}), ("p", "s2"): frozenset({5, 6})})
    predictions = _predictions({
        ("p", "s1"): ((4, 0.0),),
        ("p", "s2"): ((5, 0.0), (6, 0.1)),
    })
    result = cg.correctness_at(predictions, truth)
    assert (result.precision, result.recall, result.f1) == (1.0, 1.0, 1.0)


def test_labeled_segment_missing_from_predictions_counts_as_empty():
    truth = cg.GroundTruth({("p", "s1"): frozenset({4}), ("p", "s2"): frozenset({5})})
    predictions = _predictions({("p", "s1"): ((4, 0.0),)})
    result = cg.correctness_at(predictions, truth)
    # s2 predicted nothing: fn=1 -> recall 0.5, precision 1.0
    assert result.recall == pytest.approx(0.5)
    assert result.precision == pytest.approx(1.0)
    assert result.n_segments == 2


def test_unlabeled_provider_predictions_ignored():
    truth = cg.GroundTruth({("p", "s1"): frozenset({4})})
    predictions = _predictions({
        ("p", "s1"): ((4, 0.0),),
        ("other", "s1"): ((9, 0.0),),
    })
    result = cg.correctness_at(predictions, truth)
    assert result.precision == 1.0
    assert result.n_segments == 1


def test_no_overlap_raises():
    truth = cg.GroundTruth({("p", "s1"): frozenset({4})})
    predictions = _predictions({("other", "s1"): ((4, 0.0),)})
    with pytest.raises(NoOverlap):
        cg.correctness_at(predictions, truth)


def test_zero_denominators_give_zero_scores():
    truth = cg.GroundTruth({("p", "s1"): frozenset({4})})
    predictions = _predictions({("p", "s1"): ()})
    result = cg.correctness_at(predictions, truth)
    assert (result.precision, result.recall, result.f1) == (0.0, 0.0, 0.0)


def test_correctness_result_bounds_validated():
    with pytest.raises(ValueError):
        evaluation.CorrectnessResult(0.5, 1.2, 0.0, 0.0, 1)


@pytest.mark.parametrize(
    "thresholds",
    [(), (0.5, 0.5), (0.8, 0.5), (-0.1, 0.5)],
)
def test_sweep_config_rejects_bad_thresholds(thresholds):
    with pytest.raises(ValueError):
        evaluation.SweepConfig(thresholds=thresholds)


def test_sweep_config_rejects_bad_min_tokens():
    with pytest.raises(ValueError):
        evaluation.SweepConfig(thresholds=(0.5,), min_tokens=0)


def test_sweep_over_mini_fixture_matches_brute_force(data_dir, mini_regulation):
    chunks = cg.chunk_regulation(mini_regulation)
    docs = cg.load_policies((data_dir / "mini_policies.txt").read_text())
    truth = cg.load_ground_truth((data_dir / "mini_truth.csv").read_text(), docs)
    thresholds = (0.3, 0.7, 1.1)
    results = cg.sweep(chunks, docs, truth, evaluation.SweepConfig(thresholds=thresholds))
    assert [r.threshold for r in results] == list(thresholds)

    # brute force: rebuild predictions per threshold with module primitives
    index = cg.build_index(chunks, cg.RetrieverConfig(threshold=thresholds[-1]))
    kept = cg.filter_short_segments(docs, 10)
    for result in results:
        tp = fp = fn = 0
        config = cg.RetrieverConfig(threshold=result.threshold)
        for (pid, sid), expected in truth.entries.items():
            doc = next(d for d in kept if d.provider_id == pid)
            seg = next(s for s in doc.segments if s.segment_id == sid)
            predicted = set(cg.aggregate_articles(cg.retrieve(index, seg.text, config)))
            tp += len(predicted & expected)
            fp += len(predicted - expected)
            fn += len(expected - predicted)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        assert result.precision == pytest.approx(precision, abs=1e-12)
        assert result.recall == pytest.approx(recall, abs=1e-12)


def test_sweep_recall_non_decreasing(data_dir, mini_regulation):
    chunks = cg.chunk_regulation(mini_regulation)
    docs = cg.load_policies((data_dir / "mini_policies.txt").read_text())
    truth = cg.load_ground_truth((data_dir / "mini_truth.csv").read_text(), docs)
    results = cg.sweep(
        chunks, docs, truth, evaluation.SweepConfig(thresholds=(0.2, 0.5, 0.8, 1.1, 1.4))
    )
    recalls = [r.recall for r in results]
    assert recalls == sorted(recalls)


def test_render_sweep_table_layout():
    results = [evaluation.CorrectnessResult(0.9, 1.0, 0.5, 2 / 3, 14)]
    text = cg.render_sweep_table(results)
    lines = text.splitlines()
    assert lines[0].split() == ["threshold", "precision", "recall", "f1", "n_segments"]
    assert lines[1].split() == ["0.90", "1.0000", "0.5000", "0.6667", "14"]
    assert "reference correctness (external LLM embedder, for comparison only):" in text
    assert "0.9 -> 0.66" in text and "1.5 -> 0.90" in text
    assert text.endswith("\n")


def test_reference_sweep_values_fixed():
    assert evaluation.REFERENCE_SWEEP == (
        (0.9, 0.66), (1.0, 0.74), (1.1, 0.82), (1.2, 0.84),
        (1.3, 0.89), (1.4, 0.88), (1.5, 0.90),
    )
