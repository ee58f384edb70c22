"""One-vs-all linear classifiers with sigmoid calibration.

Each binary model is a soft-margin linear classifier trained by Pegasos-style
stochastic subgradient descent on the class-weighted hinge loss. The model is
fitted on part of the data and its margins are mapped to positive scores by
Platt scaling on the stratified held-out rest. A unit receives the class with the highest positive score,
or ``NonInformation`` when every score is below the threshold.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import write_atomic
from .errors import CorruptFile, DegenerateClass, SchemaMismatch, VersionMismatch
from .features import FEATURE_NAMES, N_FEATURES, FeatureVector
from .features import SCHEMA_VERSION as FEATURE_SCHEMA
from .parallel import pmap

SCHEMA_VERSION = 1


class KnowledgeClass(str, enum.Enum):
    FunctionalityAndBehavior = "FunctionalityAndBehavior"
    Concepts = "Concepts"
    Directives = "Directives"
    PurposeAndRationale = "PurposeAndRationale"
    QualityAttributesAndInternal = "QualityAttributesAndInternal"
    ControlFlow = "ControlFlow"
    Structure = "Structure"
    Patterns = "Patterns"
    CodeExamples = "CodeExamples"
    Environment = "Environment"
    References = "References"
    NonInformation = "NonInformation"

    @property
    def index(self):
        return ALL_CLASSES.index(self)

    @classmethod
    def parse(cls, name):
        try:
            return cls(name)
        except ValueError:
            raise SchemaMismatch(f"unknown knowledge class {name!r}") from None


ALL_CLASSES = tuple(KnowledgeClass)
BINARY_CLASSES = ALL_CLASSES[:11]


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 1e-4
    epochs: int = 50
    min_steps: int = 50_000
    calibration_fraction: float = 0.2
    threshold: float = 0.5


@dataclass
class BinaryModel:
    klass: KnowledgeClass
    weights: np.ndarray
    bias: float
    A: float
    B: float
    calibration_note: str = "holdout"

    def margin(self, z):
        return np.asarray(z, dtype=float) @ self.weights + self.bias

    def score(self, z):
        return platt_probability(self.margin(z), self.A, self.B)


@dataclass
class Ensemble:
    models: list
    mean: np.ndarray
    scale: np.ndarray
    feature_names: tuple = FEATURE_NAMES
    metadata: dict = field(default_factory=dict)
    threshold: float = 0.5

    def standardize(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.mean):
            raise SchemaMismatch(f"expected {len(self.mean)} features, got {X.shape[1]}")
        return (X - self.mean) * self.scale


# ---------------------------------------------------------------------------
# Training


def pegasos(X, y, lam=1e-4, epochs=50, sample_weight=None, rng=None, min_steps=0):
    """Weighted hinge-loss SGD with a constant bias feature.

    Small data sets get extra epochs until ``min_steps`` updates are made.
    Returns ``(weights, bias)``: the average of the epoch-end iterates over
    the second half of training.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    epochs = max(epochs, -(-min_steps // n))
    Xb = np.hstack([X, np.ones((n, 1))])
    c = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    rng = np.random.default_rng(0) if rng is None else rng
    radius = math.sqrt(c.max() / lam)
    sq = np.einsum("ij,ij->i", Xb, Xb)
    # w = a * v keeps the shrink step O(1)
    v = np.zeros(d + 1)
    a = 1.0
    vnorm2 = 0.0
    avg = np.zeros(d + 1)
    n_avg = 0
    t = 0
    start_avg = epochs // 2
    for epoch in range(epochs):
        order = rng.permutation(n)
        for i in order:
            t += 1
            eta = 1.0 / (lam * t)
            xi = Xb[i]
            vx = float(v @ xi)
            margin = a * vx
            shrink = 1.0 - eta * lam
            if shrink <= 0.0:
                v[:] = 0.0
                a, vnorm2, vx = 1.0, 0.0, 0.0
            else:
                a *= shrink
            if y[i] * margin < 1.0:
                step = eta * c[i] * y[i] / a
                vnorm2 += 2.0 * step * vx + step * step * sq[i]
                v += step * xi
            norm = a * math.sqrt(max(vnorm2, 0.0))
            if norm > radius:
                a *= radius / norm
            if a < 1e-100:
                v *= a
                vnorm2 *= a * a
                a = 1.0
        if epoch >= start_avg:
            avg += a * v
            n_avg += 1
    w = avg / max(n_avg, 1)
    return w[:d], float(w[d])


def platt_fit(margins, labels, max_iter=100, min_step=1e-10, sigma=1e-12):
    """Sigmoid ``1 / (1 + exp(A f + B))`` by a guarded Newton method.

    Targets are the smoothed Bayesian estimates of the positive and
    negative label rates. Returns ``(A, B)``.
    """
    f = np.asarray(margins, dtype=float)
    y = np.asarray(labels) > 0
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    t = np.where(y, hi, lo)
    A, B = 0.0, math.log((n_neg + 1.0) / (n_pos + 1.0))

    def objective(A, B):
        fab = f * A + B
        return float(np.sum(np.where(fab >= 0, t * fab + np.log1p(np.exp(-fab)),
                                     (t - 1) * fab + np.log1p(np.exp(fab)))))

    fval = objective(A, B)
    for _ in range(max_iter):
        fab = f * A + B
        e = np.exp(-np.abs(fab))
        p = np.where(fab >= 0, e / (1 + e), 1 / (1 + e))
        q = 1 - p
        d2 = p * q
        h11 = sigma + float(np.sum(f * f * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(f * d2))
        d1 = t - p
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            nA, nB = A + step * dA, B + step * dB
            nval = objective(nA, nB)
            if nval < fval + 1e-4 * step * gd:
                A, B, fval = nA, nB, nval
                break
            step /= 2.0
        else:
            break
    return float(A), float(B)


def platt_probability(margin, A, B):
    fab = np.asarray(margin, dtype=float) * A + B
    out = np.where(fab >= 0, np.exp(-np.abs(fab)) / (1 + np.exp(-np.abs(fab))),
                   1 / (1 + np.exp(-np.abs(fab))))
    return float(out) if np.ndim(out) == 0 else out


def _calibration_split(y, fraction, rng):
    """Stratified held-out indices (about ``fraction`` of each side)."""
    held = []
    for side in (True, False):
        idx = np.flatnonzero(y == side)
        idx = idx[rng.permutation(len(idx))]
        k = int(round(len(idx) * fraction))
        held.extend(idx[:k].tolist())
    return np.array(sorted(held), dtype=int)


def train_binary(X, labels, target, config=TrainConfig(), seed=0):
    """Fit and calibrate the binary model for ``target`` against all others."""
    target = KnowledgeClass(target)
    X = np.asarray(X, dtype=float)
    y = np.array([KnowledgeClass(l) == target for l in labels])
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClass(target.value)
    ys = np.where(y, 1.0, -1.0)
    rng = np.random.default_rng([seed, target.index])

    def fit(idx):
        pos = int(y[idx].sum())
        weight = np.where(y[idx], (len(idx) - pos) / pos, 1.0)
        return pegasos(X[idx], ys[idx], config.lam, config.epochs, weight, rng, config.min_steps)

    held = _calibration_split(y, config.calibration_fraction, rng)
    mask = np.zeros(len(y), dtype=bool)
    mask[held] = True
    train_idx = np.flatnonzero(~mask)
    if len(held) and y[held].any() and (~y[held]).any() and y[train_idx].any() and (~y[train_idx]).any():
        # the calibrated model is the one that produced the held-out margins
        w, b = fit(train_idx)
        A, B = platt_fit(X[held] @ w + b, y[held])
        if A < 0:
            return BinaryModel(target, w, b, A, B, "holdout")
    w, b = fit(np.arange(len(y)))
    note = "full-data"
    margins = X @ w + b
    A, B = platt_fit(margins, y)
    if not A < 0:
        # unit slope, centred so the mean margin maps to the positive rate
        note = "fallback"
        A, B = -1.0, float(margins.mean()) + math.log(n_neg / n_pos)
    return BinaryModel(target, w, b, A, B, note)


def _fit_standardization(X):
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # exact test: std of a shifted constant column is rounding noise, not zero
    varies = (X.max(axis=0) > X.min(axis=0)) & (std > 0)
    scale = np.where(varies, 1.0 / np.where(varies, std, 1.0), 0.0)
    return mean, scale


def _train_job(args):
    Z, labels, klass, config, seed = args
    return train_binary(Z, labels, klass, config, seed)


def train_ensemble(X, labels, config=TrainConfig(), seed=0):
    """Standardize, then train the eleven binary models in class order."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != N_FEATURES:
        raise SchemaMismatch(f"expected {N_FEATURES} features, got {X.shape[1]}")
    labels = [KnowledgeClass(l).value for l in labels]
    for klass in BINARY_CLASSES:
        n_pos = labels.count(klass.value)
        if n_pos == 0 or n_pos == len(labels):
            raise DegenerateClass(klass.value)
    mean, scale = _fit_standardization(X)
    Z = (X - mean) * scale
    jobs = [(Z, labels, k, config, seed) for k in BINARY_CLASSES]
    models = pmap(_train_job, jobs)
    meta = {"feature_schema": FEATURE_SCHEMA, "seed": seed, "lambda": config.lam, "epochs": config.epochs,
            "calibration": f"platt-newton, stratified holdout {config.calibration_fraction}",
            "n_train": int(X.shape[0])}
    return Ensemble(models, mean, scale, FEATURE_NAMES, meta, config.threshold)


# ---------------------------------------------------------------------------
# Prediction


def decide(scores, threshold=0.5):
    """Class for 11 positive scores: argmax, or NonInformation when all are low."""
    scores = np.asarray(scores, dtype=float)
    if not (scores >= threshold).any():
        return KnowledgeClass.NonInformation
    return BINARY_CLASSES[int(np.argmax(scores))]


def predict_scores(ensemble, X):
    Z = ensemble.standardize(X)
    return np.column_stack([m.score(Z) for m in ensemble.models])


def predict(ensemble, fv):
    """``(label, scores)`` for one feature vector (or raw value sequence)."""
    values = fv.values if isinstance(fv, FeatureVector) else fv
    if isinstance(fv, FeatureVector) and fv.schema_version != ensemble.metadata.get("feature_schema"):
        raise SchemaMismatch("feature schema version differs from the model")
    scores = predict_scores(ensemble, [values])[0]
    return decide(scores, ensemble.threshold), tuple(float(s) for s in scores)


def predict_many(ensemble, X):
    scores = predict_scores(ensemble, X)
    return [decide(s, ensemble.threshold) for s in scores], scores


# ---------------------------------------------------------------------------
# Persistence


def to_json(ensemble):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "feature_names": list(ensemble.feature_names),
        "standardization": {"mean": [float(x) for x in ensemble.mean],
                            "scale": [float(x) for x in ensemble.scale]},
        "threshold": ensemble.threshold,
        "metadata": ensemble.metadata,
        "classes": [{"name": m.klass.value, "weights": [float(x) for x in m.weights],
                     "bias": m.bias, "calibration": {"A": m.A, "B": m.B, "fit": m.calibration_note}}
                    for m in ensemble.models],
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def from_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"model is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise CorruptFile("model document lacks schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise VersionMismatch(f"model schema {doc['schema_version']}, expected {SCHEMA_VERSION}")
    try:
        names = tuple(doc["feature_names"])
        mean = np.array(doc["standardization"]["mean"], dtype=float)
        scale = np.array(doc["standardization"]["scale"], dtype=float)
        classes = doc["classes"]
        models = []
        for k, entry in enumerate(classes):
            klass = KnowledgeClass.parse(entry["name"])
            cal = entry["calibration"]
            models.append(BinaryModel(klass, np.array(entry["weights"], dtype=float), float(entry["bias"]),
                                      float(cal["A"]), float(cal["B"]), cal.get("fit", "holdout")))
        threshold = float(doc.get("threshold", 0.5))
        meta = dict(doc.get("metadata", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFile(f"model document is malformed: {exc}") from None
    if names != FEATURE_NAMES or len(mean) != N_FEATURES or len(scale) != N_FEATURES:
        raise SchemaMismatch("model feature schema does not match")
    if [m.klass for m in models] != list(BINARY_CLASSES):
        raise SchemaMismatch(f"model must hold one binary per class C1..C11, found {len(models)}")
    if any(len(m.weights) != N_FEATURES for m in models):
        raise SchemaMismatch("binary model has the wrong number of weights")
    return Ensemble(models, mean, scale, names, meta, threshold)


def save_model(ensemble, path):
    write_atomic(path, to_json(ensemble))


def load_model(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise CorruptFile(f"{path}: not UTF-8 text") from None
    return from_json(text)
