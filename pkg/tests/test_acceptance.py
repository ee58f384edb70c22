"""The ten acceptance criteria, one test each.

Every test prints ``PASS criterion N: ...`` or ``FAIL criterion N: ...``;
the lines are repeated in the terminal summary.
"""

import contextlib
import copy
import itertools
import math
import random
import time

import numpy as np

from doctax.cli import main
from doctax.corpus import PosTag as P, make_unit
from doctax.dataset import Row, dumps_dataset, load_dataset, loads_dataset, save_dataset
from doctax.evaluation import extraction_metrics, hypergeom_pvalue, spearman_rho
from doctax.features import WordGraph, assemble, graph_entropy, word_importance
from doctax.keyphrase import Category, extract_all, extract_vc, unit_candidates
from doctax.model import (ALL_CLASSES, KnowledgeClass, TrainConfig, decide, load_model, predict,
                          predict_many, save_model, to_json, train_ensemble)
from doctax.stats import build_stats_from_streams, dumps_stats, load_stats, npmi, save_stats

from conftest import ACCEPTANCE_LINES, CONCEPT_SENTENCE, COOKIE_SENTENCE, TASK_SENTENCE, ZIPINFO
from oracles import brute_force_counts, brute_importance, hypergeom_enumeration, npmi_formula
from test_features import random_graph
from test_model import blobs
from test_stats import random_streams


@contextlib.contextmanager
def criterion(n, summary):
    try:
        yield
    except BaseException as exc:
        line = f"FAIL criterion {n}: {summary} ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        print(line)
        ACCEPTANCE_LINES.append(line)
        raise
    line = f"PASS criterion {n}: {summary}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def test_criterion_01_npmi_oracle():
    with criterion(1, "NPMI statistics match brute-force window enumeration on 20 corpora"):
        t0 = time.perf_counter()
        for seed in range(20):
            rng = random.Random(1000 + seed)
            streams = random_streams(rng, 1000)
            assert sum(map(len, streams)) <= 1000
            k = (3, 5, 7)[seed % 3]
            s = build_stats_from_streams(streams, k)
            terms, pairs, windows = brute_force_counts(streams, k)
            assert s.term_count == dict(terms) and s.pair_count == dict(pairs) and s.total_positions == windows
            total = sum(terms.values())
            for a, b in itertools.combinations(sorted(terms), 2):
                want = npmi_formula(terms[a], terms[b], pairs.get((a, b), 0), total, windows)
                assert abs(npmi(s, a, b) - want) <= 1e-12
        assert time.perf_counter() - t0 < 10


def test_criterion_02_npmi_boundaries():
    with criterion(2, "NPMI is -1 without co-occurrence, +1 at joint probability 1, in range on 1e5 queries"):
        s = build_stats_from_streams([["a", "b", "x", "y", "z", "c"]], 3)
        assert npmi(s, "a", "c") == -1.0
        assert npmi(build_stats_from_streams([["a", "b"]], 3), "a", "b") == 1.0
        rng = random.Random(7)
        corpora = [build_stats_from_streams(random_streams(rng, 600), rng.choice([3, 5, 7])) for _ in range(10)]
        n = 0
        while n < 100_000:
            st = corpora[n % 10]
            vocab = sorted(st.term_count)
            v = npmi(st, rng.choice(vocab), rng.choice(vocab))
            assert -1.0 <= v <= 1.0
            n += 1


def test_criterion_03_worked_examples(zip_stats, phrase_stats, vc_model, gazetteers, cookie):
    with criterion(3, "worked examples: breadth/intensity, concept, tasks, version control, PoS sequence"):
        fv = assemble(make_unit(ZIPINFO), zip_stats)
        assert (fv["breadth"], fv["intensity"]) == (2.0, 0.5)
        phrases, _ = extract_all(make_unit(CONCEPT_SENTENCE), phrase_stats, None, gazetteers)
        assert [p.lemma_text for p in phrases if p.category == Category.CONCEPT] == ["core built-in type"]
        phrases, _ = extract_all(make_unit(TASK_SENTENCE), phrase_stats, None, gazetteers)
        assert {p.text for p in phrases if p.category == Category.TASK} == {"find a library", "return a pathname"}
        found = set()
        for text in ("This requires the C Version of the library.", "It offers distributed locking version control."):
            u = make_unit(text)
            found |= {p.text for _, a, b in unit_candidates(u) for p in extract_vc(u, (a, b), vc_model)}
        assert found == {"C Version", "distributed locking version"}
        assert [t.surface for t in cookie.tokens] == COOKIE_SENTENCE.split()
        assert [t.pos for t in cookie.tokens] == [P.PRON, P.VERB, P.NOUN, P.PREP, P.PROPER_NOUN, P.NOUN]


def test_criterion_04_graph_entropy():
    with criterion(4, "graph entropy identities and brute-force importance on 100 random graphs"):
        single = WordGraph(("a", "b"), {("a", "b"): 0.3})
        assert graph_entropy(single) == 0.0
        tri = WordGraph(("a", "b", "c"), {("a", "b"): 1.0, ("b", "c"): 1.0, ("a", "c"): 1.0})
        assert all(abs(word_importance(tri, n) - math.log(3)) <= 1e-12 for n in "abc")
        for seed in range(100):
            g = random_graph(random.Random(5000 + seed))
            assert len(g.nodes) <= 12
            for n in g.nodes:
                want = brute_importance(g.raw, n) if any(n in e for e in g.raw) else 0.0
                assert abs(word_importance(g, n) - want) <= 1e-9


def test_criterion_05_hypergeometric():
    with criterion(5, "hypergeometric tail equals exhaustive enumeration for N <= 12"):
        for N in range(13):
            for K, n in itertools.product(range(N + 1), repeat=2):
                tail = [hypergeom_pvalue(N, K, n, k) for k in range(min(n, K) + 1)]
                for k, v in enumerate(tail):
                    assert abs(v - hypergeom_enumeration(N, K, n, k)) <= 1e-9
                assert all(a >= b for a, b in zip(tail, tail[1:]))
        assert abs(hypergeom_pvalue(10, 5, 5, 5) - 1 / 252) <= 1e-15


def test_criterion_06_spearman():
    with criterion(6, "Spearman rho identities and the four-point example"):
        x = [-1.0, 0.3, 2.0, 4.0, 8.5, 11.0]
        assert spearman_rho(x, x) == 1.0
        assert spearman_rho(x, x[::-1]) == -1.0
        shuffled = [0.3, 8.5, -1.0, 11.0, 2.0, 4.0]
        assert spearman_rho(shuffled, [-v for v in shuffled]) == -1.0
        assert spearman_rho([1, 2, 3, 4], [1, 3, 2, 4]) == 0.8


def test_criterion_07_classifier_contract():
    with criterion(7, "deterministic training, one label per unit, low scores give NonInformation"):
        X, labels = blobs(per_class=10, seed=2)
        a = train_ensemble(X, labels, TrainConfig(), seed=11)
        b = train_ensemble(X, labels, TrainConfig(), seed=11)
        assert to_json(a).encode() == to_json(b).encode()
        pa, sa = predict_many(a, X)
        pb, sb = predict_many(b, X)
        assert pa == pb and np.array_equal(sa, sb)
        assert len(pa) == len(X) and all(p in ALL_CLASSES for p in pa)
        assert decide([0.49] * 11) == KnowledgeClass.NonInformation
        low = copy.deepcopy(a)
        for m in low.models:
            m.B = 1e3  # pushes every calibrated score towards 0
        for x in X[::7]:
            label, scores = predict(low, x)
            assert max(scores) < 0.5 and label == KnowledgeClass.NonInformation


def test_criterion_08_synthetic_benchmark(tmp_path, capsys):
    with criterion(8, "synthetic benchmark: macro F >= 0.80, p < 0.001 for classes with >= 50 test items"):
        t0 = time.perf_counter()
        assert main(["synth", "--out", str(tmp_path), "--per-class", "150", "--seed", "0"]) == 0
        data = load_dataset(tmp_path / "data.tsv")
        counts = {k: sum(r.klass == k for r in data) for k in ALL_CLASSES}
        assert min(counts.values()) >= 150
        assert main(["vc", "build", "--snapshot", str(tmp_path / "snapshot"), "--root", "root.html",
                     "--out", str(tmp_path / "vc.model")]) == 0
        report = tmp_path / "report.txt"
        assert main(["eval", "--data", str(tmp_path / "data.tsv"), "--vc", str(tmp_path / "vc.model"),
                     "--repeats", "5", "--split", "0.5", "--seed", "0", "--report", str(report)]) == 0
        elapsed = time.perf_counter() - t0
        with capsys.disabled():
            print("\n" + report.read_text() + f"elapsed {elapsed:.1f} s")
        rows = {}
        for line in (tmp_path / "report.txt.tsv").read_text().splitlines()[1:]:
            cells = line.split("\t")
            if cells[0] in {k.value for k in ALL_CLASSES}:
                rows[cells[0]] = (float(cells[1]), float(cells[9]), float(cells[10]))
            elif cells[0] == "Total":
                macro_f = float(cells[9])
        assert macro_f >= 0.80, macro_f
        for name, (test_true, _, p) in rows.items():
            if test_true >= 50:
                assert p < 0.001, (name, p)
        assert elapsed < 300


def test_criterion_09_extraction_harness():
    with criterion(9, "extraction metrics on 135 gold / 131 predicted / 123 correct round to 0.94/0.91/0.92"):
        gold = [("u", 0, "Task", i, i + 1) for i in range(135)]
        predicted = gold[:123] + [("v", 0, "Task", i, i + 1) for i in range(8)]
        p, r, f = extraction_metrics(gold, predicted)
        print(f"P={p:.2f} R={r:.2f} F={f:.2f}")
        assert (f"{p:.2f}", f"{r:.2f}", f"{f:.2f}") == ("0.94", "0.91", "0.92")


def test_criterion_10_round_trips(tmp_path):
    with criterion(10, "stats, model and dataset files reload to identical state"):
        s = build_stats_from_streams(random_streams(random.Random(2), 800), 5)
        save_stats(s, tmp_path / "c.stats")
        t = load_stats(tmp_path / "c.stats")
        assert t == s and dumps_stats(t) == dumps_stats(s)
        for a, b in list(s.pair_count)[:200]:
            assert abs(npmi(t, a, b) - npmi(s, a, b)) <= 1e-12

        X, labels = blobs(per_class=6, seed=4)
        ens = train_ensemble(X, labels, TrainConfig(min_steps=3000), seed=1)
        save_model(ens, tmp_path / "m.json")
        back = load_model(tmp_path / "m.json")
        for m1, m2 in zip(ens.models, back.models):
            assert np.max(np.abs(m1.weights - m2.weights)) <= 1e-12
            assert abs(m1.bias - m2.bias) <= 1e-12 and abs(m1.A - m2.A) <= 1e-12 and abs(m1.B - m2.B) <= 1e-12
        assert np.max(np.abs(predict_many(ens, X)[1] - predict_many(back, X)[1])) <= 1e-12

        text = "tabs\tand\nnewlines\r\n, a backslash \\ and \\n as literal text, unicode é–\U0001f600"
        rows = [Row("u1", KnowledgeClass.Concepts, text), Row("u2", KnowledgeClass.NonInformation, "")]
        save_dataset(rows, tmp_path / "d.tsv")
        raw = (tmp_path / "d.tsv").read_bytes()
        loaded = load_dataset(tmp_path / "d.tsv")
        assert list(loaded) == rows
        assert dumps_dataset(loaded).encode() == raw
        assert list(loads_dataset(raw.decode())) == rows
