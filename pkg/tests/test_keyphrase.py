from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from doctax.corpus import PosTag, content_words, make_unit
from doctax.gazetteer import Gazetteer, vc_model_from_seeds
from doctax.keyphrase import (CONCEPT_TAGS, Category, candidate_phrases, dump_rows, extract_all,
                              extract_code_elements, extract_concepts, extract_directives,
                              extract_domain_tags, extract_tasks, extract_vc, unit_candidates)
from doctax.model import KnowledgeClass
from doctax.stats import build_stats, npmi
from doctax.synth import generate
from doctax.syntax import unit_dependencies

from conftest import ADD_SENTENCE, CONCEPT_SENTENCE, TASK_SENTENCE, fixture_stats

C = Category


def texts(phrases, category=None):
    return [p.text for p in phrases if category is None or p.category == category]


def test_candidates():
    u = make_unit(TASK_SENTENCE)
    assert unit_candidates(u) == [(0, 0, len(u.tokens))]
    assert candidate_phrases(make_unit("Hello.").tokens) == [(0, 1)]
    assert candidate_phrases(make_unit("... !").tokens) == []
    u = make_unit(CONCEPT_SENTENCE)
    spans = [" ".join(t.surface for t in u.tokens[a:b]) for _, a, b in unit_candidates(u)]
    assert spans == ["core built-in types for manipulating binary data", "bytes and byte-array"]


def test_concept_example(phrase_stats, gazetteers):
    phrases, counts = extract_all(make_unit(CONCEPT_SENTENCE), phrase_stats, None, gazetteers)
    concepts = [p for p in phrases if p.category == C.CONCEPT]
    assert [p.lemma_text for p in concepts] == ["core built-in type"]
    assert concepts[0].text == "core built-in types"


def test_concept_rules():
    s = fixture_stats(["red", "apple", "pear"], [])
    u = make_unit("apple pear")
    assert extract_concepts(u, (0, 2), s) == []
    u = make_unit("apple")
    assert extract_concepts(u, (0, 1), fixture_stats(["apple"], [])) == []


def test_task_example(phrase_stats, gazetteers):
    phrases, counts = extract_all(make_unit(TASK_SENTENCE), phrase_stats, None, gazetteers)
    assert set(texts(phrases, C.TASK)) == {"find a library", "return a pathname"}
    assert counts[0] >= 2


def test_add_item(phrase_stats):
    u = make_unit(ADD_SENTENCE)
    tasks = extract_tasks(u, (0, len(u.tokens)), unit_dependencies(u), phrase_stats)
    assert "add an item" in [p.lemma_text for p in tasks]


def test_verbless_span_has_no_task(phrase_stats):
    u = make_unit("core built-in types")
    assert extract_tasks(u, (0, len(u.tokens)), unit_dependencies(u), phrase_stats) == []


@pytest.mark.parametrize("text,want", [
    ("This requires the C Version of the library.", "C Version"),
    ("It offers distributed locking version control.", "distributed locking version"),
])
def test_vc_examples(vc_model, text, want):
    u = make_unit(text)
    found = [p.text for _, a, b in unit_candidates(u) for p in extract_vc(u, (a, b), vc_model)]
    assert found == [want]


def test_vc_without_seed(vc_model):
    u = make_unit("It offers distributed locking.")
    assert [p for _, a, b in unit_candidates(u) for p in extract_vc(u, (a, b), vc_model)] == []


def test_code_elements():
    u = make_unit(b"<p>Call <code>sys.exit()</code> now</p>", "html")
    assert texts(extract_code_elements(u)) == ["sys.exit()"]
    assert extract_code_elements(make_unit("Nothing technical at all.")) == []
    assert texts(extract_code_elements(make_unit("Use zipfile.ZipInfo for members."))) == ["zipfile.ZipInfo"]


def test_gazetteer_lookups(gazetteers):
    keywords = Gazetteer.from_terms("kw", ["import", "return", "global"])
    assert texts(extract_directives(make_unit("use the import statement"), keywords)) == ["import"]
    domain = Gazetteer.from_terms("dt", ["list comprehension", "list"])
    assert texts(extract_domain_tags(make_unit("the list comprehension idiom"), domain)) == ["list comprehension"]
    assert extract_domain_tags(make_unit("nothing relevant"), domain) == []
    # a verb use of a keyword is not a directive
    assert extract_directives(make_unit("It returns the value."), keywords) == []


def test_one_of_each(phrase_stats, vc_model, gazetteers):
    u = make_unit("Find a library; core built-in types need the C Version, zipfile.ZipInfo, "
                  "the import statement and a list comprehension.")
    phrases, counts = extract_all(u, phrase_stats, vc_model, gazetteers)
    assert counts == (1, 1, 1, 1, 1, 1)
    assert len({p.category for p in phrases}) == 6


def test_nothing_extractable(phrase_stats, gazetteers):
    assert extract_all(make_unit("Nothing about it here."), phrase_stats, None, gazetteers)[1] == (0,) * 6


def test_dump_rows(phrase_stats):
    phrases, _ = extract_all(make_unit(TASK_SENTENCE), phrase_stats)
    rows = list(dump_rows(phrases))
    assert rows[0].split("\t") == ["unit_id", "sentence_idx", "category", "start_token", "end_token", "surface"]
    assert rows[1].split("\t")[2:] == ["Task", "2", "5", "find a library"]


WORDS = ["returns", "the", "file", "buffer", "reads", "a", "socket", "to", "open", "and", "of",
         "binary", "data", "x.y()", "version", "commit", "quickly", ",", "."]


@settings(max_examples=120, deadline=None)
@given(st.lists(st.lists(st.sampled_from(WORDS), min_size=1, max_size=14), min_size=1, max_size=3))
def test_category_soundness(sentences):
    units = [make_unit(" ".join(s)) for s in sentences]
    units = [u for u in units if u.tokens]
    if not units:
        return
    if not any(content_words(u) for u in units):
        return
    stats = build_stats(units, 3)
    vc = None
    if "version" in stats:
        vc = vc_model_from_seeds(["version"], stats)
    for u in units:
        first, _ = extract_all(u, stats, vc)
        again, _ = extract_all(u, stats, vc)
        assert first == again
        for p in first:
            toks = u.tokens[p.start:p.end]
            assert p.end > p.start
            if p.category == C.TASK:
                assert any(t.pos == PosTag.VERB for t in toks)
            elif p.category == C.CONCEPT:
                assert len(toks) >= 2 and all(t.pos in CONCEPT_TAGS for t in toks)
                for a, b in zip(toks, toks[1:]):
                    assert npmi(stats, a.lemma, b.lemma) > 0
            elif p.category == C.VERSION_CONTROL:
                assert any(t.lemma.lower() == "version" for t in toks)


def test_dominant_categories_on_synthetic_corpus(gazetteers):
    rows = generate(per_class=25, seed=3)
    units = {r.unit_id: make_unit(r.text, unit_id=r.unit_id) for r in rows}
    stats = build_stats(units.values())
    totals = {}
    for r in rows:
        _, counts = extract_all(units[r.unit_id], stats, None, gazetteers)
        totals.setdefault(r.klass, Counter()).update(dict(zip(C, counts)))
    dominant = {k: c.most_common(1)[0][0] for k, c in totals.items()}
    assert dominant[KnowledgeClass.FunctionalityAndBehavior] == C.TASK
    assert dominant[KnowledgeClass.CodeExamples] == C.CODE_ELEMENT
    assert dominant[KnowledgeClass.Concepts] == C.CONCEPT
    assert dominant[KnowledgeClass.Directives] == C.DIRECTIVE
