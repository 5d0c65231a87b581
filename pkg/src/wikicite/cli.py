"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from . import __version__
from .errors import WikiciteError
from .lexicon import bundled_lexicon_path, load_lexicon
from .matrix import build_matrix, matrix_stats, save_matrix
from .pipeline import (
    MULTIDISCIPLINARY,
    ConfigError,
    PipelineConfig,
    StageError,
    extract_to_jsonl,
    fit_models,
    load_config_file,
    read_citations,
    render_bush_file,
    run_pipeline,
    write_report_files,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("wikicite")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _excludes(values):
    out = []
    for v in values or ():
        out += [s.strip() for s in v.split(",") if s.strip()]
    return out


def build_parser():
    p = _Parser(prog="wikicite", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("extract", help="dump cite journal instances as JSON lines")
    e.add_argument("dump")
    e.add_argument("--out", default="-", help="output file, '-' for stdout")
    e.add_argument("--compression", choices=("auto", "none", "bzip2"), default="auto")

    m = sub.add_parser("matrix", help="build the article x journal matrix")
    m.add_argument("--citations", required=True, help="JSON lines from 'extract'")
    m.add_argument("--lexicon", default=None, help="journal lexicon XML (default: bundled)")
    m.add_argument("--out", required=True, help="matrix directory")

    n = sub.add_parser("nmf", help="NMF sweep over k")
    n.add_argument("--matrix-dir", required=True)
    n.add_argument("--out", "--models-dir", dest="out", required=True)
    n.add_argument("--k-min", type=int, default=1)
    n.add_argument("--k-max", type=int, default=20)
    n.add_argument("--iterations", type=int, default=50_000)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--exclude", action="append", metavar="NAMES",
                   help="journal column(s) to drop; repeat or comma-separate")
    n.add_argument("--eps", type=float, default=1e-12)
    n.add_argument("--jobs", type=int, default=1)

    b = sub.add_parser("bush", help="render the cluster bush SVG")
    b.add_argument("--models-dir", required=True)
    b.add_argument("--out", default="bush.svg")
    b.add_argument("--min-overlap", type=float, default=0.1)
    b.add_argument("--labels-per-node", type=int, default=1, choices=(1, 2, 3))

    r = sub.add_parser("report", help="write the HTML report and growth CSV")
    r.add_argument("--matrix-dir", required=True, action="append",
                   help="repeat for several dumps; the first feeds the top-cited table")
    r.add_argument("--models-dir", default=None)
    r.add_argument("--out", default="report.html")
    r.add_argument("--growth-csv", default=None)
    r.add_argument("--top-n", type=int, default=12)

    u = sub.add_parser("run", help="full pipeline with resumable stages")
    u.add_argument("dump", nargs="?")
    u.add_argument("--config", help="TOML file of key = value settings; flags override it")
    u.add_argument("--lexicon", dest="lexicon_path")
    u.add_argument("--output-dir", dest="output_dir",
                   help="default: $WIKICITE_OUTPUT_DIR or ./wikicite-out")
    u.add_argument("--exclude", action="append", metavar="NAMES")
    u.add_argument("--exclude-multidisciplinary", action="store_true",
                   help="exclude the multidisciplinary journals Nature, Science and PNAS")
    u.add_argument("--k-min", type=int)
    u.add_argument("--k-max", type=int)
    u.add_argument("--iterations", type=int)
    u.add_argument("--seed", type=int)
    u.add_argument("--min-overlap", type=float)
    u.add_argument("--eps", type=float)
    u.add_argument("--jobs", type=int)
    u.add_argument("--top-n", type=int)
    u.add_argument("--labels-per-node", type=int)
    u.add_argument("--compression", choices=("auto", "none", "bzip2"))
    u.add_argument("--dump-id")
    return p


def _cmd_extract(args):
    if args.out == "-":
        diag = extract_to_jsonl(args.dump, sys.stdout, args.compression)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            diag = extract_to_jsonl(args.dump, fh, args.compression)
    log.info("extract: %s", dict(diag))


def _cmd_matrix(args):
    lexicon = load_lexicon(args.lexicon or bundled_lexicon_path())
    m = build_matrix(read_citations(args.citations), lexicon)
    save_matrix(m, args.out)
    print(json.dumps(matrix_stats(m), sort_keys=True))


def _cmd_nmf(args):
    if not 1 <= args.k_min <= args.k_max or args.iterations < 1 or args.jobs < 1:
        raise UsageError("need 1 <= k-min <= k-max, iterations >= 1, jobs >= 1")
    models = fit_models(args.matrix_dir, args.out, args.k_min, args.k_max, args.iterations,
                        args.seed, _excludes(args.exclude), args.eps, args.jobs)
    for model in models:
        print(f"k={model.k} error={model.final_error:.6g}")


def _cmd_bush(args):
    if not 0.0 <= args.min_overlap <= 1.0:
        raise UsageError("--min-overlap must lie in [0, 1]")
    bush = render_bush_file(args.models_dir, args.out, args.min_overlap, args.labels_per_node)
    log.info("bush: %d nodes, %d edges", len(bush.nodes), len(bush.edges))


def _cmd_report(args):
    if args.top_n < 1:
        raise UsageError("--top-n must be >= 1")
    write_report_files(args.matrix_dir, args.models_dir, args.out, args.growth_csv, args.top_n)


def config_from_args(args):
    values = load_config_file(args.config) if args.config else {}
    if args.dump:
        values["dump_path"] = args.dump
    for f in dataclasses.fields(PipelineConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name not in ("dump_path", "exclude_journals"):
            values[f.name] = v
    excludes = _excludes(args.exclude)
    if args.exclude_multidisciplinary:
        excludes = list(dict.fromkeys([*MULTIDISCIPLINARY, *excludes]))
    if excludes:
        values["exclude_journals"] = excludes
    try:
        return PipelineConfig(**values).resolved().validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_run(args):
    cfg = config_from_args(args)
    record = run_pipeline(cfg)
    for s in record["stages"]:
        state = "skipped" if s["skipped"] else f"{s['seconds']:.2f}s"
        print(f"{s['stage']:8s} {state}")


COMMANDS = {
    "extract": _cmd_extract,
    "matrix": _cmd_matrix,
    "nmf": _cmd_nmf,
    "bush": _cmd_bush,
    "report": _cmd_report,
    "run": _cmd_run,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"wikicite {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        code = EXIT_DATA if isinstance(exc.cause, (WikiciteError, OSError, ValueError)) \
            else EXIT_INTERNAL
        print(f"wikicite run: stage {exc.stage} failed: {exc.cause}", file=sys.stderr)
        return code
    except (WikiciteError, OSError, ValueError) as exc:
        print(f"wikicite {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"wikicite {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
