"""``doctax`` command-line interface.

Exit status is 0 on success, 2 for input and I/O problems and 3 for data
problems; failures print ``ERROR <code>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ._io import write_atomic
from .dataset import load_dataset
from .errors import DoctaxError, EmptyInput, IOFailure
from .evaluation import report_table, report_tsv, run_evaluation
from .features import analyze, dump_features
from .gazetteer import DEFAULT_THRESHOLD, build_vc_model, load_gazetteers, load_vc, save_vc
from .keyphrase import dump_rows
from .model import BINARY_CLASSES, TrainConfig, load_model, predict, save_model, train_ensemble
from .pipeline import featurize, to_unit
from .stats import DEFAULT_WINDOW, build_stats, load_stats, save_stats
from .synth import write_benchmark

TEXT_SUFFIXES = (".txt", ".html", ".htm")


def _format_of(path):
    return "html" if str(path).lower().endswith((".html", ".htm")) else "plain"


def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror or exc}") from None


def _corpus_texts(path):
    """``(unit_id, text_or_bytes, format)`` from a directory tree or a dataset TSV."""
    path = Path(path)
    if path.is_file() and path.suffix == ".tsv":
        return [(r.unit_id, r.text, "plain") for r in load_dataset(path)]
    if not path.is_dir():
        raise IOFailure(f"input directory {path} does not exist")
    files = sorted(p for p in path.rglob("*") if p.is_file() and p.suffix.lower() in TEXT_SUFFIXES)
    return [(str(p.relative_to(path)), _read_bytes(p), _format_of(p)) for p in files]


def _units(items):
    units = []
    for uid, data, fmt in items:
        unit = to_unit(data, uid, fmt)
        if unit.tokens:
            units.append(unit)
    return units


def _resources(args, data_items=None):
    if getattr(args, "stats", None):
        stats = load_stats(args.stats)
    elif data_items is not None:
        stats = build_stats(_units(data_items), getattr(args, "window", DEFAULT_WINDOW))
    else:
        raise IOFailure("--stats is required")
    vc = load_vc(args.vc) if getattr(args, "vc", None) else None
    gaz = load_gazetteers(args.gazetteers) if getattr(args, "gazetteers", None) else load_gazetteers()
    return stats, vc, gaz


def _write(path, text):
    try:
        write_atomic(path, text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror or exc}") from None


# ---------------------------------------------------------------------------


def cmd_stats_build(args):
    units = _units(_corpus_texts(args.input))
    if not units:
        raise EmptyInput(f"no non-empty units under {args.input}")
    stats = build_stats(units, args.window)
    try:
        save_stats(stats, args.out)
    except OSError as exc:
        raise IOFailure(f"cannot write {args.out}: {exc.strerror or exc}") from None
    print(f"units {len(units)}\tvocabulary {stats.vocab_size}\twindows {stats.total_positions}")


def cmd_vc_build(args):
    if not Path(args.snapshot).is_dir():
        raise IOFailure(f"snapshot directory {args.snapshot} does not exist")
    model = build_vc_model(args.snapshot, args.root, args.threshold, args.window)
    try:
        save_vc(model, args.out)
    except OSError as exc:
        raise IOFailure(f"cannot write {args.out}: {exc.strerror or exc}") from None
    print(f"accepted pages {len(model.accepted)}\tseeds {len(model.seeds)}\tvocabulary {model.stats.vocab_size}")


def cmd_extract(args):
    stats, vc, gaz = _resources(args)
    phrases = []
    for name in args.inputs:
        data = _read_bytes(name)
        unit = to_unit(data, Path(name).name, _format_of(name))
        if unit.tokens:
            phrases += analyze(unit, stats, vc, gaz).phrases
    _write(args.out, "\n".join(dump_rows(phrases)) + "\n")
    print(f"phrases {len(phrases)}")


def _dataset_features(args):
    rows = load_dataset(args.data)
    items = [(r.unit_id, r.text) for r in rows]
    stats, vc, gaz = _resources(args, [(u, t, "plain") for u, t in items])
    vectors = featurize(items, stats, vc, gaz)
    return rows, vectors


def cmd_featurize(args):
    rows, vectors = _dataset_features(args)
    _write(args.out, dump_features(vectors, [r.klass.value for r in rows]))
    print(f"units {len(rows)}")


def cmd_train(args):
    rows, vectors = _dataset_features(args)
    X = np.array([v.values for v in vectors])
    ens = train_ensemble(X, [r.klass for r in rows], TrainConfig(lam=args.lam, epochs=args.epochs), args.seed)
    try:
        save_model(ens, args.out)
    except OSError as exc:
        raise IOFailure(f"cannot write {args.out}: {exc.strerror or exc}") from None
    print(f"trained {len(ens.models)} binary models on {len(rows)} units")


def cmd_classify(args):
    ens = load_model(args.model)
    stats, vc, gaz = _resources(args)
    out = []
    if args.format == "tsv":
        out.append("\t".join(["input", "label"] + [k.value for k in BINARY_CLASSES]))
    for item in args.inputs:
        path = Path(item)
        if path.is_file():
            data, fmt, name = _read_bytes(path), _format_of(path), str(path)
        else:
            data, fmt, name = item, "plain", item
        vec = analyze(to_unit(data, name, fmt), stats, vc, gaz).vector
        label, scores = predict(ens, vec)
        if args.format == "label":
            out.append(label.value)
        elif args.format == "scores":
            out.append("\t".join(repr(s) for s in scores))
        else:
            out.append("\t".join([name.replace("\t", " ").replace("\n", " "), label.value]
                                 + [repr(s) for s in scores]))
    sys.stdout.write("\n".join(out) + "\n")


def cmd_eval(args):
    rows, vectors = _dataset_features(args)
    X = np.array([v.values for v in vectors])
    report = run_evaluation(X, [r.klass for r in rows], TrainConfig(lam=args.lam, epochs=args.epochs),
                            args.seed, args.repeats, args.split)
    table = report_table(report)
    _write(args.report, table)
    _write(args.report_tsv or f"{args.report}.tsv", report_tsv(report))
    sys.stdout.write(table)
    print(f"macro F {report.macro_f:.4f}")


def cmd_synth(args):
    out = write_benchmark(args.out, args.per_class, args.seed)
    print(f"wrote {out / 'data.tsv'} and {out / 'snapshot'}")


# ---------------------------------------------------------------------------


def _add_resources(p, stats_required=True):
    p.add_argument("--stats", required=stats_required, help="corpus statistics file")
    p.add_argument("--vc", help="version-control domain model")
    p.add_argument("--gazetteers", help="directory with directives.txt and domain_tags.txt")


def _add_training(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lam", type=float, default=TrainConfig.lam, help="regularization strength")
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)


def build_parser():
    parser = argparse.ArgumentParser(prog="doctax", description="Knowledge-type classification of API documentation")
    sub = parser.add_subparsers(dest="command", required=True)

    stats = sub.add_parser("stats", help="corpus statistics").add_subparsers(dest="action", required=True)
    p = stats.add_parser("build", help="count windowed co-occurrences")
    p.add_argument("--input", required=True, help="directory of .txt/.html units or a dataset .tsv")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats_build)

    vc = sub.add_parser("vc", help="version-control domain model").add_subparsers(dest="action", required=True)
    p = vc.add_parser("build", help="filter a snapshot and build the model")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--root", required=True, help="root page filename or title")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_vc_build)

    p = sub.add_parser("extract", help="dump key-phrases of unit files")
    _add_resources(p)
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("featurize", help="write the feature TSV of a labeled dataset")
    _add_resources(p, stats_required=False)
    p.add_argument("--data", required=True)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train the one-vs-all ensemble")
    _add_resources(p, stats_required=False)
    p.add_argument("--data", required=True)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    _add_training(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="label texts or files")
    p.add_argument("--model", required=True)
    _add_resources(p)
    p.add_argument("--in", dest="inputs", nargs="+", required=True, help="file paths or literal text")
    p.add_argument("--format", choices=("label", "scores", "tsv"), default="label")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="repeated stratified hold-out evaluation")
    _add_resources(p, stats_required=False)
    p.add_argument("--data", required=True)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--split", type=float, default=0.5)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    _add_training(p)
    p.add_argument("--report", required=True, help="path of the aligned text report")
    p.add_argument("--report-tsv", help="path of the TSV report (default: <report>.tsv)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write the synthetic benchmark corpus and snapshot")
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=150)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except DoctaxError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"ERROR IOError: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
