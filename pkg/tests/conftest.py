import pytest

from doctax.corpus import make_unit
from doctax.gazetteer import load_gazetteers, vc_model_from_seeds
from doctax.stats import CorpusStats, pair_key

ZIPINFO = ("Note When passing a ZipInfo instance as the zinfo_or_arcname parameter, the compression "
           "method used will be that specified in the compress_type member of the given ZipInfo "
           "instance. By default, the ZipInfo constructor sets this member to ZIP_STORED.")
ZIP_G1 = ["pass", "zipinfo", "ZIP_STORED", "zinfo_or_arcname", "compression", "compress_type", "given", "default"]
ZIP_G2 = ["instance", "parameter", "method", "use", "specify", "member", "constructor", "set"]

CONCEPT_SENTENCE = "The core built-in types for manipulating binary data are bytes and byte-array."
TASK_SENTENCE = "Try to find a library and return a pathname"
ADD_SENTENCE = "Add an item to the end of the list"
COOKIE_SENTENCE = "It extracts cookies from HTTP requests"


def fixture_stats(terms, pairs, total=10_000, window_k=5):
    """Stats where listed terms occur 10 times, listed pairs 5 times, all else never.

    With these numbers every listed pair gets npmi > 0 and every other pair -1.
    """
    tc = {t: 10 for t in terms}
    tc["zzfill"] = total - 10 * len(terms)
    return CorpusStats(window_k, total, tc, {pair_key(a, b): 5 for a, b in pairs})


def group_pairs(group):
    return [(a, b) for i, a in enumerate(group) for b in group[i + 1:]]


@pytest.fixture(scope="session")
def gazetteers():
    return load_gazetteers()


@pytest.fixture(scope="session")
def zip_stats():
    return fixture_stats(ZIP_G1 + ZIP_G2, group_pairs(ZIP_G1) + group_pairs(ZIP_G2))


@pytest.fixture(scope="session")
def phrase_stats():
    return fixture_stats(
        ["core", "built-in", "type", "find", "library", "return", "pathname", "try", "add", "item",
         "end", "list", "binary", "data", "manipulating"],
        [("core", "built-in"), ("built-in", "type"), ("find", "library"), ("return", "pathname"),
         ("add", "item")])


@pytest.fixture(scope="session")
def vc_model():
    st = fixture_stats(["c", "version", "distribute", "lock", "control", "offer"],
                       [("c", "version"), ("distribute", "lock"), ("lock", "version")])
    return vc_model_from_seeds(["version"], st)


@pytest.fixture
def cookie():
    return make_unit(COOKIE_SENTENCE)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
