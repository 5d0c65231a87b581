"""End-to-end pipeline: dump -> citations -> matrix -> NMF sweep -> bush -> report.

Every stage records a content hash of its inputs and settings under
``<output_dir>/.stamps``; a rerun skips a stage whose hash is unchanged
and whose outputs are all present.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import shutil
import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .bush import BushStyle, build_bush, render_bush_svg
from .dump import open_dump_stream
from .lexicon import bundled_lexicon_path, load_lexicon
from .matrix import build_matrix, exclude_journals, load_matrix, save_matrix
from .nmf import DEFAULT_ITERATIONS, EPS, load_models, save_models, sweep_model_sizes
from .report import render_html_report, summarize_dump, write_growth_csv
from .wikitext import CitationInstance, extract_citations

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "WIKICITE_OUTPUT_DIR"
# journals cited across all fields; excluding them sharpens the topic clusters
MULTIDISCIPLINARY = ("Nature", "Science", "PNAS")


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class PipelineConfig:
    dump_path: str = None
    lexicon_path: str = None
    exclude_journals: list = field(default_factory=list)
    k_min: int = 1
    k_max: int = 20
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    min_overlap: float = 0.1
    output_dir: str = None
    eps: float = EPS
    jobs: int = 1
    top_n: int = 12
    labels_per_node: int = 1
    compression: str = "auto"
    dump_id: str = None

    def validate(self):
        if not self.dump_path:
            raise ConfigError("dump_path is required")
        if not 1 <= self.k_min <= self.k_max:
            raise ConfigError(f"need 1 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if not 0.0 <= self.min_overlap <= 1.0:
            raise ConfigError("min_overlap must lie in [0, 1]")
        if self.jobs < 1 or self.top_n < 1 or not 1 <= self.labels_per_node <= 3:
            raise ConfigError("jobs, top_n >= 1 and labels_per_node in 1..3 required")
        if self.eps < 0:
            raise ConfigError("eps must be >= 0")
        return self

    def resolved(self):
        """Copy with defaults filled in from the environment and bundled data."""
        cfg = dataclasses.replace(self, exclude_journals=list(self.exclude_journals))
        if cfg.output_dir is None:
            cfg.output_dir = os.environ.get(OUTPUT_DIR_ENV, "wikicite-out")
        if cfg.lexicon_path is None:
            cfg.lexicon_path = str(bundled_lexicon_path())
        if cfg.dump_id is None and cfg.dump_path:
            cfg.dump_id = dump_id_from_path(cfg.dump_path)
        return cfg


def dump_id_from_path(path):
    name = Path(path).name
    for suffix in (".bz2", ".xml"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name


def load_config_file(path):
    """Read ``key = value`` settings (TOML) into a dict of PipelineConfig fields."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


# -- stage bodies, shared with the CLI subcommands ----------------------------

def extract_to_jsonl(dump_path, out, compression="auto", diagnostics=None):
    """Write one JSON object per citation to the text stream ``out``."""
    if diagnostics is None:
        diagnostics = Counter()
    n = 0
    with open_dump_stream(dump_path, compression) as stream:
        for page in stream:
            diagnostics["pages"] += 1
            for cit in extract_citations(page, diagnostics):
                out.write(json.dumps(cit.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
                n += 1
        diagnostics.update(stream.diagnostics)
    diagnostics["citations"] += n
    return diagnostics


def read_citations(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                yield CitationInstance(d["article"], d.get("journal_raw", ""), d["dedup_key"])
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad citation record ({exc})") from exc


def fit_models(matrix_dir, models_dir, k_min, k_max, iterations, seed, exclude=(),
               eps=EPS, jobs=1):
    m = exclude_journals(load_matrix(matrix_dir), list(exclude))
    models = sweep_model_sizes(m, (k_min, k_max), iterations, seed, jobs=jobs, eps=eps)
    models_dir = Path(models_dir)
    if models_dir.exists():
        shutil.rmtree(models_dir)
    save_models(models, models_dir)
    return models


def render_bush_file(models_dir, out_path, min_overlap=0.1, labels_per_node=1):
    models = load_models(models_dir)
    bush = build_bush(models, top_n_label=labels_per_node, min_overlap=min_overlap)
    Path(out_path).write_text(render_bush_svg(bush, BushStyle()), encoding="utf-8")
    return bush


def write_report_files(matrix_dirs, models_dir, out_html, out_csv=None, top_n=12, dump_ids=None):
    matrix_dirs = [Path(d) for d in matrix_dirs]
    matrices = [load_matrix(d) for d in matrix_dirs]
    if dump_ids is None:
        dump_ids = [d.name for d in matrix_dirs]
    summaries = [summarize_dump(m, i) for m, i in zip(matrices, dump_ids)]
    models = load_models(models_dir) if models_dir and Path(models_dir).is_dir() else []
    html = render_html_report(models, matrices[0] if matrices else None, summaries, top_n)
    Path(out_html).write_text(html, encoding="utf-8")
    if out_csv:
        with open(out_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(write_growth_csv(summaries))
    return summaries


# -- orchestration ------------------------------------------------------------

def _hash_paths(h, paths):
    for p in paths:
        p = Path(p)
        files = sorted(x for x in p.rglob("*") if x.is_file()) if p.is_dir() else [p]
        for f in files:
            h.update(str(f.relative_to(p) if p.is_dir() else f.name).encode())
            with open(f, "rb") as fh:
                for block in iter(lambda: fh.read(1 << 20), b""):
                    h.update(block)


def stage_hash(inputs, settings):
    h = hashlib.sha256()
    h.update(json.dumps(settings, sort_keys=True).encode())
    _hash_paths(h, inputs)
    return h.hexdigest()


class _Stages:
    def __init__(self, out):
        self.out = out
        self.stamps = out / ".stamps"
        self.record = []

    def run(self, name, inputs, settings, outputs, body):
        t0 = time.perf_counter()
        try:
            fresh = self._run(name, inputs, settings, outputs, body)
        except Exception as exc:
            raise StageError(name, exc) from exc
        self.record.append({"stage": name, "skipped": fresh,
                            "seconds": round(time.perf_counter() - t0, 6)})
        return not fresh

    def _run(self, name, inputs, settings, outputs, body):
        digest = stage_hash(inputs, settings)
        stamp = self.stamps / f"{name}.json"
        if (stamp.exists() and all(Path(o).exists() for o in outputs)
                and json.loads(stamp.read_text()).get("hash") == digest):
            log.info("%s: up to date", name)
            return True
        log.info("%s: running", name)
        stamp.unlink(missing_ok=True)
        body()
        self.stamps.mkdir(parents=True, exist_ok=True)
        stamp.write_text(json.dumps({"hash": digest}) + "\n")
        return False


def run_pipeline(config):
    """Run every stage under ``config.output_dir``; returns the run record."""
    cfg = config.resolved().validate()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    citations = out / "citations.jsonl"
    matrix_dir = out / "matrix"
    models_dir = out / "models"
    bush_svg = out / "bush.svg"
    report_html = out / "report.html"
    growth_csv = out / "growth.csv"
    stages = _Stages(out)
    diagnostics = Counter()

    def do_extract():
        tmp = citations.with_suffix(".jsonl.part")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            extract_to_jsonl(cfg.dump_path, fh, cfg.compression, diagnostics)
        tmp.replace(citations)

    def do_matrix():
        m = build_matrix(read_citations(citations), load_lexicon(cfg.lexicon_path), diagnostics)
        if matrix_dir.exists():
            shutil.rmtree(matrix_dir)
        save_matrix(m, matrix_dir)

    def do_nmf():
        fit_models(matrix_dir, models_dir, cfg.k_min, cfg.k_max, cfg.iterations, cfg.seed,
                   cfg.exclude_journals, cfg.eps, cfg.jobs)

    def do_bush():
        render_bush_file(models_dir, bush_svg, cfg.min_overlap, cfg.labels_per_node)

    def do_report():
        write_report_files([matrix_dir], models_dir, report_html, growth_csv, cfg.top_n,
                           [cfg.dump_id])

    stages.run("extract", [cfg.dump_path], {"compression": cfg.compression},
               [citations], do_extract)
    stages.run("matrix", [citations, cfg.lexicon_path], {}, [matrix_dir], do_matrix)
    stages.run("nmf", [matrix_dir], {
        "k": [cfg.k_min, cfg.k_max], "iterations": cfg.iterations, "seed": cfg.seed,
        "exclude": cfg.exclude_journals, "eps": cfg.eps}, [models_dir], do_nmf)
    stages.run("bush", [models_dir], {"min_overlap": cfg.min_overlap,
                                      "labels": cfg.labels_per_node}, [bush_svg], do_bush)
    stages.run("report", [matrix_dir, models_dir], {"top_n": cfg.top_n, "dump_id": cfg.dump_id},
               [report_html, growth_csv], do_report)

    record = {
        "config": dataclasses.asdict(cfg),
        "stages": stages.record,
        "diagnostics": dict(sorted(diagnostics.items())),
    }
    (out / "run.json").write_text(json.dumps(record, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")
    return record
