"""Repeated stratified hold-out evaluation and the statistics around it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import ClassTooSmall, DoctaxError, InvalidCounts
from .model import ALL_CLASSES, KnowledgeClass, TrainConfig, predict_many, train_ensemble


def split_repeated(labels, fraction=0.5, repeats=5, seed=0):
    """Stratified ``(train, test)`` index arrays, one pair per repetition.

    Each class is shuffled and its first ``ceil(n * fraction)`` items go to
    training. Classes are visited in canonical order so a seed fixes every
    split.
    """
    labels = [KnowledgeClass(l) for l in labels]
    by_class = {}
    for i, l in enumerate(labels):
        by_class.setdefault(l, []).append(i)
    for klass, idx in by_class.items():
        if len(idx) < 2:
            raise ClassTooSmall(f"class {klass.value} has {len(idx)} item(s); at least 2 are needed")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(repeats):
        train, test = [], []
        for klass in ALL_CLASSES:
            idx = np.array(by_class.get(klass, []), dtype=int)
            if not len(idx):
                continue
            idx = idx[rng.permutation(len(idx))]
            k = math.ceil(len(idx) * fraction)
            train.extend(idx[:k].tolist())
            test.extend(idx[k:].tolist())
        out.append((np.array(sorted(train), dtype=int), np.array(sorted(test), dtype=int)))
    return out


def f_score(p, r):
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def prf(correct, labeled, true):
    p = correct / labeled if labeled else 0.0
    r = correct / true if true else 0.0
    return p, r, f_score(p, r)


@dataclass(frozen=True)
class ClassCounts:
    true: int
    labeled: int
    correct: int

    @property
    def precision(self):
        return prf(self.correct, self.labeled, self.true)[0]

    @property
    def recall(self):
        return prf(self.correct, self.labeled, self.true)[1]

    @property
    def f(self):
        return prf(self.correct, self.labeled, self.true)[2]


def classification_metrics(predictions, truth):
    """Per-class counts and P/R/F for every one of the twelve classes."""
    pred = [KnowledgeClass(p) for p in predictions]
    gold = [KnowledgeClass(t) for t in truth]
    if len(pred) != len(gold):
        raise InvalidCounts("predictions and truth differ in length")
    out = {}
    for k in ALL_CLASSES:
        out[k] = ClassCounts(
            true=sum(1 for g in gold if g == k),
            labeled=sum(1 for p in pred if p == k),
            correct=sum(1 for p, g in zip(pred, gold) if p == g == k),
        )
    return out


def _phrase_key(item):
    if hasattr(item, "category"):
        return (item.unit_id, item.sentence, getattr(item.category, "value", item.category), item.start, item.end)
    return tuple(item)


def extraction_metrics(gold, predicted):
    """Exact-match precision, recall and F of predicted against gold phrases.

    Phrases are :class:`~doctax.keyphrase.KeyPhrase` objects or tuples such
    as ``(unit, sentence, category, start, end)``.
    """
    g = {_phrase_key(x) for x in gold}
    p = {_phrase_key(x) for x in predicted}
    return prf(len(g & p), len(p), len(g))


def _log_comb(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def hypergeom_pvalue(N, K, n, k):
    """``P[X >= k]`` for ``X ~ Hypergeometric(N, K, n)`` via log-gamma terms."""
    for name, v in (("N", N), ("K", K), ("n", n), ("k", k)):
        if int(v) != v or v < 0:
            raise InvalidCounts(f"{name} must be a non-negative integer, got {v!r}")
    N, K, n, k = int(N), int(K), int(n), int(k)
    if K > N or n > N or k > min(n, K):
        raise InvalidCounts(f"impossible counts N={N} K={K} n={n} k={k}")
    lo = max(0, n - (N - K))
    if k <= lo:
        return 1.0
    denom = _log_comb(N, n)
    logs = [_log_comb(K, x) + _log_comb(N - K, n - x) - denom for x in range(k, min(n, K) + 1)]
    top = max(logs)
    total = math.exp(top) * sum(math.exp(v - top) for v in logs)
    return min(1.0, total)


def _ranks(values):
    return sps.rankdata(np.asarray(values, dtype=float), method="average")


def spearman_rho(x, y):
    """Rank correlation with average ranks for ties; ``nan`` for constant input."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be equal-length sequences")
    n = len(x)
    if n < 2:
        return float("nan")
    rx, ry = _ranks(x), _ranks(y)
    if len(set(rx)) == n and len(set(ry)) == n:
        d2 = float(np.sum((rx - ry) ** 2))
        return 1.0 - 6.0 * d2 / (n * (n * n - 1))
    sx, sy = rx - rx.mean(), ry - ry.mean()
    denom = math.sqrt(float(sx @ sx) * float(sy @ sy))
    if denom == 0:
        return float("nan")
    return max(-1.0, min(1.0, float(sx @ sy) / denom))


def spearman_test(x, y):
    """``(rho, two-sided p)`` using the t approximation."""
    rho = spearman_rho(x, y)
    n = len(x)
    if math.isnan(rho) or n < 3:
        return rho, float("nan")
    if abs(rho) >= 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return rho, float(2 * sps.t.sf(abs(t), n - 2))


# ---------------------------------------------------------------------------
# Full protocol


@dataclass
class ClassRow:
    klass: KnowledgeClass
    test_true: float
    train_size: float
    labeled_mean: float
    labeled_sd: float
    correct_mean: float
    correct_sd: float
    precision: float
    recall: float
    f: float
    p_value: float


@dataclass
class EvalReport:
    rows: list
    repetitions: int
    seed: int
    fraction: float
    n_test: float
    spearman: tuple = (float("nan"), float("nan"))
    per_repetition: list = field(default_factory=list)

    @property
    def macro_f(self):
        rows = [r for r in self.rows if r.test_true > 0]
        return sum(r.f for r in rows) / len(rows) if rows else 0.0

    def totals(self):
        rows = [r for r in self.rows if r.test_true > 0]
        k = len(rows) or 1
        return {
            "test_true": sum(r.test_true for r in self.rows),
            "labeled_mean": sum(r.labeled_mean for r in self.rows),
            "correct_mean": sum(r.correct_mean for r in self.rows),
            "precision": sum(r.precision for r in rows) / k,
            "recall": sum(r.recall for r in rows) / k,
            "f": self.macro_f,
        }


def _sd(values):
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def run_evaluation(X, labels, config=TrainConfig(), seed=0, repeats=5, fraction=0.5):
    """Train and test on ``repeats`` fresh stratified splits and summarise."""
    X = np.asarray(X, dtype=float)
    labels = [KnowledgeClass(l) for l in labels]
    splits = split_repeated(labels, fraction, repeats, seed)
    per_rep = []
    for r, (train, test) in enumerate(splits):
        try:
            ens = train_ensemble(X[train], [labels[i] for i in train], config, seed + r)
        except DoctaxError as exc:
            exc.args = (f"repetition {r}: {exc}",)
            raise
        pred, _ = predict_many(ens, X[test])
        counts = classification_metrics(pred, [labels[i] for i in test])
        train_sizes = {k: sum(1 for i in train if labels[i] == k) for k in ALL_CLASSES}
        per_rep.append((counts, train_sizes, len(test)))

    rows = []
    for k in ALL_CLASSES:
        true = [c[k].true for c, _, _ in per_rep]
        lab = [c[k].labeled for c, _, _ in per_rep]
        cor = [c[k].correct for c, _, _ in per_rep]
        p = float(np.mean([c[k].precision for c, _, _ in per_rep]))
        rc = float(np.mean([c[k].recall for c, _, _ in per_rep]))
        n_test = float(np.mean([n for _, _, n in per_rep]))
        t_mean, l_mean, c_mean = float(np.mean(true)), float(np.mean(lab)), float(np.mean(cor))
        K_, n_, k_ = round(t_mean), round(l_mean), round(c_mean)
        pval = hypergeom_pvalue(round(n_test), K_, n_, min(k_, n_, K_)) if K_ else 1.0
        rows.append(ClassRow(k, t_mean, float(np.mean([s[k] for _, s, _ in per_rep])),
                             l_mean, _sd(lab), c_mean, _sd(cor), p, rc, f_score(p, rc), pval))
    present = [row for row in rows if row.test_true > 0]
    spear = spearman_test([row.train_size for row in present], [row.f for row in present])
    return EvalReport(rows, repeats, seed, fraction, float(np.mean([n for _, _, n in per_rep])), spear,
                      [{k.value: (c[k].true, c[k].labeled, c[k].correct) for k in ALL_CLASSES}
                       for c, _, _ in per_rep])


TSV_COLUMNS = ("class", "test_true", "train_size", "labeled_mean", "labeled_sd", "correct_mean",
               "correct_sd", "precision", "recall", "f", "p_value")


def _fmt(v):
    return repr(float(v))


def report_tsv(report):
    lines = ["\t".join(TSV_COLUMNS)]
    for r in report.rows:
        lines.append("\t".join([r.klass.value] + [_fmt(getattr(r, c)) for c in TSV_COLUMNS[1:]]))
    t = report.totals()
    lines.append("\t".join(["Total", _fmt(t["test_true"]), "", _fmt(t["labeled_mean"]), "",
                            _fmt(t["correct_mean"]), "", _fmt(t["precision"]), _fmt(t["recall"]),
                            _fmt(t["f"]), ""]))
    rho, p = report.spearman
    lines.append(f"#spearman_train_size_vs_f\t{_fmt(rho)}\t{_fmt(p)}")
    lines.append(f"#repetitions\t{report.repetitions}\tseed\t{report.seed}\tsplit\t{report.fraction!r}")
    return "\n".join(lines) + "\n"


def _pstr(p):
    if p < 0.001:
        return "<0.001"
    return f"{p:.3f}"


def report_table(report):
    head = ("Knowledge class", "Test", "Labeled (avg) ±SD", "Correct (avg) ±SD",
            "Precision", "Recall", "F-score", "p-value")
    body = []
    for r in report.rows:
        body.append((r.klass.value, f"{r.test_true:.0f}", f"{r.labeled_mean:.1f} ±{r.labeled_sd:.1f}",
                     f"{r.correct_mean:.1f} ±{r.correct_sd:.1f}", f"{r.precision:.2f}", f"{r.recall:.2f}",
                     f"{r.f:.2f}", _pstr(r.p_value)))
    t = report.totals()
    body.append(("Total (macro P/R/F)", f"{t['test_true']:.0f}", f"{t['labeled_mean']:.1f}",
                 f"{t['correct_mean']:.1f}", f"{t['precision']:.2f}", f"{t['recall']:.2f}", f"{t['f']:.2f}", ""))
    widths = [max(len(row[i]) for row in [head] + body) for i in range(len(head))]
    fmt = lambda row: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))
    lines = [fmt(head), "  ".join("-" * w for w in widths)] + [fmt(row) for row in body]
    rho, p = report.spearman
    lines.append("")
    lines.append(f"Spearman rho (training size vs F) = {rho:.3f}, p = {p:.3g}")
    lines.append(f"{report.repetitions} repetitions, split {report.fraction}, seed {report.seed}")
    return "\n".join(lines) + "\n"
