"""Seeded synthetic benchmark: labeled units per knowledge class plus a
small version-control snapshot.

Each class draws from templates whose key-phrase make-up differs, e.g.
two task phrases for functionality, noun compounds for concepts, several
inline code elements for code examples and version-control vocabulary for
environment notes.
"""

from __future__ import annotations

import random
from pathlib import Path

from ._io import write_atomic
from .dataset import Row, dumps_dataset
from .model import KnowledgeClass as K

NOUNS = ["buffer", "socket", "file", "stream", "record", "header", "cursor", "archive", "array",
         "string", "thread", "queue", "table", "entry", "value", "key", "mapping", "pipe",
         "channel", "widget", "handler", "message", "packet", "field", "row", "image", "token"]
VERBS = ["returns", "removes", "inserts", "reads", "writes", "closes", "opens", "creates",
         "deletes", "updates", "appends", "parses", "encodes", "decodes", "compresses", "sends",
         "receives", "flushes", "resets", "loads", "stores", "sorts", "copies", "extracts", "converts"]
BASE_VERBS = ["return", "remove", "insert", "read", "write", "close", "open", "create", "delete",
              "update", "append", "parse", "encode", "decode", "compress", "send", "receive",
              "flush", "reset", "load", "store", "sort", "copy", "extract", "convert"]
ADJS = ["binary", "default", "empty", "temporary", "compressed", "cached", "optional", "unique",
        "raw", "nested", "shared", "secure", "native", "partial"]
COMPOUND_HEADS = ["object", "type", "protocol", "interface", "format", "container", "structure"]
TAGS = ["context manager", "decorator", "generator expression", "list comprehension",
        "duck typing", "garbage collection", "metaclass", "coroutine", "event loop", "unicode",
        "regular expression", "standard library", "virtual environment", "keyword argument",
        "abstract base class", "namespace", "descriptor", "numpy", "pickle", "asyncio"]
DIRECTIVE_TERMS = ["global statement", "yield statement", "import statement", "raise statement",
                   "assert statement", "with statement", "nonlocal statement", "del statement",
                   "pass statement", "return statement", "future statement", "coding declaration"]
SHELL = ["chmod", "grep", "sudo", "tar", "gzip", "wget", "crontab", "mkdir", "ssh", "xargs"]
PLATFORMS = ["Unix", "Windows", "Linux", "macOS", "FreeBSD", "Solaris"]
VC_WORDS = ["commit", "branch", "checkout", "merge", "revision", "repository", "release"]
BOILER = ["See above.", "Changed.", "Deprecated alias.", "New.", "Ditto.", "Not documented.",
          "Same as above.", "Removed.", "Undocumented.", "Added.", "See also.", "Reserved."]


def _ident(rng):
    a, b = rng.sample(NOUNS, 2)
    return rng.choice([f"{a}_{b}", f"{a}.{b}()", f"get_{a}", f"{a}.{b}", f"set_{a}_{b}"])


def _np(rng):
    return f"the {rng.choice(NOUNS)}"


def functionality(rng):
    v1, v2 = rng.sample(VERBS, 2)
    n1, n2 = rng.sample(NOUNS, 2)
    return rng.choice([
        f"{v1.capitalize()} the {n1} and {v2} the {n2}.",
        f"This function {v1} the {n1} and then {v2} a {n2}.",
        f"It {v1} each {n1}, {v2} the {n2} afterwards.",
        f"{v1.capitalize()} a {n1} from the {rng.choice(NOUNS)} and {v2} the {n2}.",
    ])


def concepts(rng):
    a1, a2 = rng.sample(ADJS, 2)
    n1, n2, n3 = rng.sample(NOUNS, 3)
    h1, h2 = rng.sample(COMPOUND_HEADS, 2)
    return rng.choice([
        f"A {a1} {n1} {h1} is a {a2} {n2} {h2}.",
        f"{a1.capitalize()} {n1} {h1}s are {n2} {h2}s with {a2} {n3} semantics.",
        f"The {n1} {h1} is a {a1} {n2} {h2}, unlike a {a2} {n3} {h1}.",
        f"Every {a1} {n1} {h1} is also a {n2} {h2}.",
    ])


def directives(rng):
    d1, d2 = rng.sample(DIRECTIVE_TERMS, 2)
    return rng.choice([
        f"The {d1} must not be placed after the {d2}.",
        f"A {d1} should be avoided here; the {d2} is preferred.",
        f"Never use a {d1} at this point.",
        f"The {d1} is only allowed at the top, before any {d2}.",
    ])


def purpose(rng):
    v = rng.choice(BASE_VERBS)
    n = rng.choice(NOUNS)
    tag = rng.choice(TAGS)
    return rng.choice([
        f"This is primarily used to {v} the {n} in a {tag}.",
        f"The purpose is to {v} a {n} so that a {tag} can be used.",
        f"It exists in order to {v} the {n} of the {tag}.",
    ])


def quality(rng):
    ident = _ident(rng)
    d = rng.choice(DIRECTIVE_TERMS + SHELL)
    return rng.choice([
        f"Internally {ident} is implemented without the {d}, so it is fast.",
        f"The {ident} implementation is thread safe and avoids {d}.",
        f"Performance of {ident} is poor if {d} is involved.",
    ])


def control_flow(rng):
    v1 = rng.choice(VERBS)
    n = rng.choice(NOUNS)
    d = rng.choice(DIRECTIVE_TERMS)
    return rng.choice([
        f"When finished, it {v1} the {n}, then the {d} runs.",
        f"After the {d} completes, the interpreter {v1} the {n}.",
        f"First it {v1} the {n}; the {d} is evaluated next.",
    ])


def structure(rng):
    a = rng.choice(ADJS)
    n1, n2 = rng.sample(NOUNS, 2)
    h = rng.choice(COMPOUND_HEADS)
    tag = rng.choice(TAGS)
    return rng.choice([
        f"The {a} {n1} {h} also contains a {tag}.",
        f"Each {n1} {h} holds a {n2} {h} and a {tag}.",
        f"The {tag} is nested inside the {a} {n1} {h}.",
    ])


def patterns(rng):
    v = rng.choice(BASE_VERBS)
    n = rng.choice(NOUNS)
    ident = _ident(rng)
    return rng.choice([
        f"To {v} a {n}, use {ident}.",
        f"To {v} the {n} call {ident} instead.",
        f"In order to {v} a {n} quickly, use {ident}.",
    ])


def code_examples(rng):
    idents = [_ident(rng) for _ in range(rng.randint(3, 4))]
    var = rng.choice(NOUNS)
    return rng.choice([
        f"{var} = {idents[0]} ; {idents[1]} ; {idents[2]}",
        f"for {var} in {idents[0]}: {idents[1]} ; {idents[2]}",
        " ; ".join(idents),
        f">>> {idents[0]} >>> {idents[1]} >>> {idents[2]}",
    ])


def environment(rng):
    plat = rng.choice(PLATFORMS)
    w = rng.choice(VC_WORDS)
    major, minor = rng.randint(2, 3), rng.randint(0, 12)
    return rng.choice([
        f"This is not the C version of the library; it needs {plat}.",
        f"Available on {plat} since version {major}.{minor}.",
        f"Changed in version {major}.{minor}: the {w} was merged for {plat}.",
        f"New in version {major}.{minor} of the release on {plat}.",
        f"Requires the latest {w} on {plat}, version {major}.{minor} or later.",
    ])


def references(rng):
    tag = rng.choice(TAGS)
    site = rng.choice(["www.python.org", "docs.python.org", "peps.python.org", "wiki.python.org"])
    num = rng.randint(200, 700)
    return rng.choice([
        f"See http://{site}/{num} for more information about the {tag}.",
        f"See PEP {num} for details on the {tag}.",
        f"More about the {tag} is at https://{site}/{tag.replace(' ', '-')}.",
        f"For background on the {tag}, refer to the tutorial.",
    ])


def non_information(rng):
    return rng.choice(BOILER)


GENERATORS = {
    K.FunctionalityAndBehavior: functionality, K.Concepts: concepts, K.Directives: directives,
    K.PurposeAndRationale: purpose, K.QualityAttributesAndInternal: quality, K.ControlFlow: control_flow,
    K.Structure: structure, K.Patterns: patterns, K.CodeExamples: code_examples,
    K.Environment: environment, K.References: references, K.NonInformation: non_information,
}


def generate(per_class=150, seed=0):
    """Shuffled labeled rows, ``per_class`` per knowledge class."""
    rng = random.Random(seed)
    rows = []
    for klass, gen in GENERATORS.items():
        for i in range(per_class):
            rows.append(Row(f"{klass.value}-{i:04d}", klass, gen(rng)))
    rng.shuffle(rows)
    return rows


# ---------------------------------------------------------------------------
# Version-control snapshot

ROOT_HTML = """<html><head><title>Version control</title></head><body>
<h1>Version control</h1>
<p>Version control is the management of changes to source code. Each commit records a revision
in the repository, and a branch lets developers work on a version in isolation. A checkout
copies a version from the repository; a merge joins a branch back.</p>
<p>Release engineering builds a release from a tagged version of the repository.</p>
<h2>Common operations</h2>
<ul><li><a href="commit.html">Commit</a></li><li><a href="branch.html">Branch</a></li>
<li><a href="checkout.html">Checkout</a></li><li><a href="merge.html">Merge</a></li>
<li><a href="revision.html">Revision</a></li><li><a href="repository.html">Repository</a></li>
<li><a href="release.html">Release engineering</a></li><li><a href="cooking.html">Cooking</a></li>
<li><a href="version.html">Version</a></li></ul>
</body></html>
"""

PAGES = {
    "commit.html": ("Commit", "A commit stores a new revision of the source code in the repository. "
                    "Each commit of a version control system has an author and a message."),
    "branch.html": ("Branch", "A branch is a parallel version of the source code in a repository. "
                    "Developers merge a branch after each commit is reviewed."),
    "checkout.html": ("Checkout", "A checkout copies a revision of the repository into a working copy. "
                      "The checkout selects a branch or a version."),
    "merge.html": ("Merge", "A merge combines the changes of two branches in version control. "
                   "A merge commit records the merged revision."),
    "revision.html": ("Revision", "A revision identifies a version of the repository. "
                      "Each commit creates a revision."),
    "repository.html": ("Repository", "A repository stores every revision, branch and commit of the source code "
                        "under version control."),
    "release.html": ("Release engineering", "Release engineering builds a release from a version tag in the "
                     "repository, usually after a merge of the release branch."),
    "version.html": ("Version", "A version number such as version 3.4 names a release. "
                     "The C version and the distributed locking version of a tool differ."),
    "cooking.html": ("Cooking", "Cooking is the art of preparing food with heat. Recipes describe "
                     "ingredients, ovens and spices for a tasty dinner."),
}


def write_snapshot(directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = ["root.html\tVersion control"]
    write_atomic(directory / "root.html", ROOT_HTML)
    for name, (title, body) in PAGES.items():
        write_atomic(directory / name, f"<html><body><h1>{title}</h1><p>{body}</p></body></html>\n")
        manifest.append(f"{name}\t{title}")
    write_atomic(directory / "manifest.tsv", "\n".join(manifest) + "\n")
    return directory


def write_benchmark(directory, per_class=150, seed=0):
    """Write ``data.tsv`` and ``snapshot/`` under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_atomic(directory / "data.tsv", dumps_dataset(generate(per_class, seed)))
    write_snapshot(directory / "snapshot")
    return directory
