import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from doctax.errors import CorruptFile, DegenerateClass, SchemaMismatch, VersionMismatch
from doctax.features import N_FEATURES
from doctax.model import (ALL_CLASSES, BINARY_CLASSES, KnowledgeClass, TrainConfig, decide, from_json,
                          load_model, pegasos, platt_fit, platt_probability, predict, predict_many,
                          save_model, to_json, train_binary, train_ensemble)

K = KnowledgeClass
FAST = TrainConfig(min_steps=3000)


def blobs(per_class=12, seed=0, spread=0.3):
    """Twelve separated clusters on the first 11 axes, NonInformation at the origin.

    The remaining dimensions are constant, as many feature columns are in practice.
    """
    rng = np.random.default_rng(seed)
    X, labels = [], []
    for k, klass in enumerate(ALL_CLASSES):
        centre = np.zeros(N_FEATURES)
        if k < 11:
            centre[k] = 4.0
        noise = np.zeros((per_class, N_FEATURES))
        noise[:, :11] = rng.normal(0, spread, (per_class, 11))
        X.append(centre + noise)
        labels += [klass] * per_class
    return np.vstack(X), labels


@pytest.fixture(scope="module")
def trained():
    X, labels = blobs()
    return X, labels, train_ensemble(X, labels, TrainConfig(), seed=7)


def test_class_order():
    assert [k.index for k in ALL_CLASSES] == list(range(12))
    assert ALL_CLASSES[-1] == K.NonInformation and len(BINARY_CLASSES) == 11
    assert K.parse("ControlFlow") == K.ControlFlow


def test_max_margin_four_points():
    # analytic separator: x + y = 0, unit normal (1, 1) / sqrt(2)
    X = np.array([[1.0, 1.0], [2.0, 2.0], [-1.0, -1.0], [-2.0, -2.0]])
    y = np.array([1.0, 1.0, -1.0, -1.0])
    w, b = pegasos(X, y, lam=1e-4, epochs=50, rng=np.random.default_rng(0), min_steps=50_000)
    normal = w / np.linalg.norm(w)
    assert np.dot(normal, np.array([1, 1]) / math.sqrt(2)) > 0.999
    assert abs(b) / np.linalg.norm(w) < 0.05
    assert np.all(np.sign(X @ w + b) == y)


def test_separable_toy_has_no_training_errors():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(3, 0.5, (20, 3)), rng.normal(-3, 0.5, (20, 3))])
    labels = [K.Concepts] * 20 + [K.Patterns] * 20
    m = train_binary(X, labels, K.Concepts, seed=2)
    assert np.all((m.margin(X) > 0) == np.array([l == K.Concepts for l in labels]))


def test_identical_vectors_follow_majority():
    X = np.zeros((6, 4))
    m = train_binary(X, [K.Concepts] * 4 + [K.Patterns] * 2, K.Concepts)
    assert m.score(np.zeros(4)) > 0.5
    m = train_binary(X, [K.Concepts] * 2 + [K.Patterns] * 4, K.Concepts)
    assert m.score(np.zeros(4)) < 0.5


def test_ensemble_training_accuracy(trained):
    X, labels, ens = trained
    Z = ens.standardize(X)
    for m in ens.models:
        truth = np.array([l == m.klass for l in labels])
        acc = np.mean((m.score(Z) >= 0.5) == truth)
        assert acc >= 0.95, (m.klass, acc)
    pred, _ = predict_many(ens, X)
    assert np.mean([p == l for p, l in zip(pred, labels)]) >= 0.95


def test_missing_class_is_degenerate():
    X, labels = blobs(per_class=4)
    keep = [i for i, l in enumerate(labels) if l != K.ControlFlow]
    with pytest.raises(DegenerateClass) as err:
        train_ensemble(X[keep], [labels[i] for i in keep], FAST)
    assert err.value.klass == "ControlFlow"


def test_determinism(trained):
    X, labels, ens = trained
    again = train_ensemble(X, labels, TrainConfig(), seed=7)
    assert to_json(again) == to_json(ens)
    assert predict_many(again, X)[0] == predict_many(ens, X)[0]


def test_decide():
    assert decide([0.2] * 11) == K.NonInformation
    s = [0.1] * 11
    s[4] = 0.9
    assert decide(s) == BINARY_CLASSES[4]
    s[2] = s[7] = 0.95
    assert decide(s) == BINARY_CLASSES[2]
    assert decide([0.5] + [0.0] * 10) == BINARY_CLASSES[0]


def test_predict_contract(trained):
    X, labels, ens = trained
    label, scores = predict(ens, X[0])
    assert label in ALL_CLASSES and len(scores) == 11
    assert all(0 < s < 1 for s in scores)
    far = np.full(N_FEATURES, -50.0)
    label, scores = predict(ens, far)
    if max(scores) < 0.5:
        assert label == K.NonInformation


def test_json_round_trip(trained, tmp_path):
    X, _, ens = trained
    path = tmp_path / "m.json"
    save_model(ens, path)
    back = load_model(path)
    assert to_json(back) == to_json(ens)
    assert np.array_equal(predict_many(back, X)[1], predict_many(ens, X)[1])
    for a, b in zip(back.models, ens.models):
        assert np.max(np.abs(a.weights - b.weights)) <= 1e-12 and abs(a.A - b.A) <= 1e-12


def test_bad_model_files(trained):
    text = to_json(trained[2])
    with pytest.raises(CorruptFile):
        from_json(text[: len(text) // 2])
    doc = json.loads(text)
    doc["classes"] = doc["classes"][:10]
    with pytest.raises(SchemaMismatch):
        from_json(json.dumps(doc))
    doc = json.loads(text)
    doc["schema_version"] = 99
    with pytest.raises(VersionMismatch):
        from_json(json.dumps(doc))


def test_platt_fit_recovers_sigmoid():
    rng = np.random.default_rng(0)
    f = rng.normal(0, 2, 4000)
    p_true = 1 / (1 + np.exp(-1.5 * f + 0.3))
    y = rng.random(4000) < p_true
    A, B = platt_fit(f, y)
    assert A == pytest.approx(-1.5, abs=0.15) and B == pytest.approx(0.3, abs=0.15)


@given(st.floats(-20, -0.01), st.floats(-5, 5), st.floats(-30, 30), st.floats(0.01, 10))
def test_calibration_strictly_increasing(A, B, m, delta):
    assert platt_probability(m + delta, A, B) > platt_probability(m, A, B) or \
        platt_probability(m, A, B) == 1.0


@settings(max_examples=5, deadline=None)
@given(st.integers(0, N_FEATURES - 1), st.floats(-1e3, 1e3), st.integers(0, 50))
def test_standardization_absorbs_shift(dim, shift, seed):
    X, labels = blobs(per_class=6, seed=seed)
    base = train_ensemble(X, labels, FAST, seed=seed)
    Xs = X.copy()
    Xs[:, dim] += shift
    moved = train_ensemble(Xs, labels, FAST, seed=seed)
    probe = X[::5]
    assert predict_many(base, probe)[0] == predict_many(moved, probe + np.eye(N_FEATURES)[dim] * shift)[0]


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100))
def test_margin_argmax_scale_invariant(trained, c):
    X, _, ens = trained
    Z = ens.standardize(X[:20])
    margins = np.column_stack([m.margin(Z) for m in ens.models])
    assert np.array_equal(np.argmax(margins, axis=1), np.argmax(margins * c, axis=1))
