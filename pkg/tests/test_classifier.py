import numpy as np
import pytest

from helpers import DESK_CONFIG
from sadl import (
    DataError,
    Model,
    SynthSpec,
    TrainConfig,
    build_targets,
    encode,
    evaluate,
    generate_synthetic,
    make_dataset,
    precompute_scorer,
    predict,
    train,
)
from sadl.classifier import report_from_csv, report_table, report_to_csv


def _model(omega, q, w, c):
    return Model(omega=omega, q=q, w=w, config=TrainConfig(dict_size=omega.shape[0]),
                 class_count=c)


def _identity_model(n):
    return _model(np.eye(n), np.eye(n), np.eye(n), n)


def test_encode_identity_dictionary():
    x = np.array([0.3, -1.2, 4.0])
    np.testing.assert_array_equal(encode(_identity_model(3), x), x)


def test_encode_zero_vector():
    rng = np.random.default_rng(0)
    model = _model(rng.normal(size=(4, 3)), rng.normal(size=(5, 4)),
                   rng.normal(size=(2, 5)), 2)
    np.testing.assert_array_equal(encode(model, np.zeros(3)), np.zeros(4))


def test_encode_matches_scalar_loop():
    rng = np.random.default_rng(1)
    omega = rng.normal(size=(6, 4))
    x = rng.normal(size=4)
    model = _model(omega, np.eye(6), np.eye(6), 6)
    want = [sum(omega[i, k] * x[k] for k in range(4)) for i in range(6)]
    np.testing.assert_allclose(encode(model, x), want, rtol=1e-15)


def test_encode_dimension_mismatch():
    with pytest.raises(DataError):
        encode(_identity_model(3), np.zeros(4))


def test_predict_argmax():
    assert predict(_identity_model(2), [0.2, 0.9]) == 1


def test_predict_tie_breaks_low():
    assert predict(_identity_model(2), [0.5, 0.5]) == 0


def test_predict_scale_equivariant():
    rng = np.random.default_rng(2)
    model = _model(rng.normal(size=(5, 4)), rng.normal(size=(6, 5)),
                   rng.normal(size=(3, 6)), 3)
    for _ in range(50):
        x = rng.normal(size=4)
        base = predict(model, x)
        for alpha in (0.01, 3.0, 1e4):
            assert predict(model, alpha * x) == base


def test_precomputed_scorer_agrees_with_chain():
    rng = np.random.default_rng(3)
    model = _model(rng.normal(size=(7, 5)), rng.normal(size=(9, 7)),
                   rng.normal(size=(4, 9)), 4)
    scorer = precompute_scorer(model)
    assert scorer.shape == (4, 5)
    for _ in range(1000):
        x = rng.normal(size=5)
        assert predict(model, x, scorer=scorer) == predict(model, x)


def test_zero_dictionary_predicts_class_zero():
    model = _model(np.zeros((3, 4)), np.eye(3), np.eye(3), 3)
    scorer = precompute_scorer(model)
    np.testing.assert_array_equal(scorer, 0.0)
    assert predict(model, np.ones(4), scorer=scorer) == 0


def test_evaluate_perfect_classifier():
    data = make_dataset(np.eye(3), [0, 1, 2], 3)
    report = evaluate(_identity_model(3), data)
    assert report.accuracy == 1.0
    np.testing.assert_array_equal(report.confusion, np.eye(3, dtype=int))


def test_evaluate_constant_prediction_is_chance():
    rng = np.random.default_rng(4)
    x = np.abs(rng.normal(size=(4, 40))) + 0.1
    data = make_dataset(x, np.repeat(np.arange(4), 10), 4)
    # All-zero scores: ties resolve to class 0 for every sample.
    model = _model(np.zeros((4, 4)), np.eye(4), np.eye(4), 4)
    report = evaluate(model, data)
    assert report.accuracy == 0.25
    assert report.confusion[:, 0].sum() == 40


def test_evaluate_accuracy_matches_confusion_recount():
    train_set, test_set = generate_synthetic(SynthSpec(seed=6))
    targets = build_targets(train_set.labels, train_set.class_count)
    model, _ = train(train_set, targets, DESK_CONFIG.replace(max_iter=60, seed=6))
    report = evaluate(model, test_set, timing_reps=3)
    recount = np.trace(report.confusion) / report.confusion.sum()
    assert report.accuracy == pytest.approx(recount, abs=0)
    assert report.confusion.sum() == report.n_test


def test_evaluate_rejects_dim_mismatch():
    data = make_dataset(np.eye(4), [0, 1, 2, 0], 3)
    with pytest.raises(DataError, match="dim"):
        evaluate(_identity_model(3), data)


def test_evaluate_rejects_label_beyond_model():
    data = make_dataset(np.eye(3), [0, 1, 2], 3)
    model = _model(np.eye(3), np.eye(3), np.eye(2, 3), 2)
    with pytest.raises(DataError, match="class count"):
        evaluate(model, data)


def test_report_table_layout():
    data = make_dataset(np.eye(3), [0, 1, 2], 3)
    report = evaluate(_identity_model(3), data, train_seconds=1.5)
    table = report_table(report, method="sadl")
    assert "Accuracy (%)" in table and "Training (s)" in table
    assert "100.00" in table


def test_timing_harness_median_not_above_mean():
    # Loop timings are floor-limited with slow outliers, so the median
    # should not exceed the mean; the reported figure is the median.
    _, test_set = generate_synthetic(SynthSpec(seed=7))
    model = _model(np.eye(32)[:8], np.eye(8), np.eye(4, 8), 4)
    scorer = precompute_scorer(model)
    from sadl.classifier import timed_prediction_loop

    _, times = timed_prediction_loop(scorer, test_set.x, 10)
    assert len(times) == 10
    assert np.median(times) <= np.mean(times)
    report = evaluate(model, test_set, timing_reps=10)
    assert report.test_seconds_per_sample > 0.0


def test_report_csv_round_trip():
    data = make_dataset(np.eye(3), [0, 1, 2], 3)
    report = evaluate(_identity_model(3), data, timing_reps=2, train_seconds=0.125)
    back = report_from_csv(report_to_csv(report))
    assert back.accuracy == report.accuracy
    assert back.train_seconds == report.train_seconds
    assert back.test_seconds_per_sample == report.test_seconds_per_sample
    assert back.n_test == report.n_test
    np.testing.assert_array_equal(back.confusion, report.confusion)
