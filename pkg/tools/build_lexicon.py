"""Regenerate src/doctax/data/lexicon.tsv.

Takes the English lexicon shipped with the ``pattern3`` sdist (Brill's
tagger lexicon), keeps lowercase open-class entries, ranks them by
``wordfreq`` Zipf frequency, keeps the top N and maps Penn tags onto the
coarse tag set. API verbs from tools/api_verbs.txt are merged on top.

Usage: python tools/build_lexicon.py path/to/en-lexicon.txt [--size 20000]
"""

import argparse
import re
from pathlib import Path

from wordfreq import zipf_frequency

PENN_TO_COARSE = {
    "NN": "NOUN", "NNS": "NOUN",
    "VB": "VERB", "VBD": "VERB", "VBG": "VERB", "VBN": "VERB", "VBP": "VERB", "VBZ": "VERB",
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ",
    "RB": "ADV", "RBR": "ADV", "RBS": "ADV",
}
WORD = re.compile(r"^[a-z][a-z'-]*[a-z]$|^[a-z]$")
HERE = Path(__file__).resolve().parent
OUT = HERE.parent / "src" / "doctax" / "data" / "lexicon.tsv"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("brill")
    ap.add_argument("--size", type=int, default=20000)
    args = ap.parse_args()

    entries = {}
    for line in Path(args.brill).read_text(encoding="utf-8").splitlines():
        if line.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) != 2:
            continue
        word, tag = parts
        coarse = PENN_TO_COARSE.get(tag)
        if coarse and WORD.match(word) and word not in entries:
            entries[word] = coarse

    ranked = sorted(entries, key=lambda w: (-zipf_frequency(w, "en"), w))[: args.size]
    lexicon = {w: entries[w] for w in ranked}
    for line in (HERE / "api_verbs.txt").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lexicon[line] = "VERB"

    with OUT.open("w", encoding="utf-8") as fh:
        fh.write("# word<TAB>coarse tag; derived from the Brill tagger lexicon (MIT licence)\n")
        fh.write("# via the pattern3 distribution, ranked by wordfreq; see tools/build_lexicon.py\n")
        for word in sorted(lexicon):
            fh.write(f"{word}\t{lexicon[word]}\n")
    print(f"wrote {len(lexicon)} entries to {OUT}")


if __name__ == "__main__":
    main()
