"""Static HTML overview and growth CSV."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from html import escape

from .matrix import matrix_stats, top_cited_journals
from .nmf import top_loadings

GROWTH_HEADER = ("dump_id", "total_citations", "n_articles", "n_journal_columns")

_CSS = """
body { font-family: sans-serif; margin: 2em auto; max-width: 64em; color: #222; }
table { border-collapse: collapse; margin: 0.5em 0 1.5em; }
th, td { border: 1px solid #ccc; padding: 0.25em 0.6em; text-align: left; }
th { background: #f0f0f0; }
td.num { text-align: right; }
section.model { margin-top: 2em; }
p.empty { color: #888; font-style: italic; }
""".strip()


@dataclass(frozen=True)
class DumpSummary:
    dump_id: str
    total_citations: int
    n_articles: int
    n_journal_columns: int


def summarize_dump(m, dump_id):
    s = matrix_stats(m)
    return DumpSummary(str(dump_id), s["total_count"], s["n_rows"], s["n_cols"])


def write_growth_csv(summaries):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(GROWTH_HEADER)
    for s in summaries:
        writer.writerow((s.dump_id, s.total_citations, s.n_articles, s.n_journal_columns))
    return buf.getvalue()


def _table(header, rows, numeric=()):
    out = ["<table>", "<tr>" + "".join(f"<th>{escape(h)}</th>" for h in header) + "</tr>"]
    for row in rows:
        cells = []
        for i, v in enumerate(row):
            cls = ' class="num"' if i in numeric else ""
            cells.append(f"<td{cls}>{escape(str(v))}</td>")
        out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</table>")
    return "\n".join(out)


def _fmt(x):
    return f"{x:.4g}"


def _cluster_table(model, cluster, top_n):
    hubs = top_loadings(model, cluster, "articles", top_n)
    auths = top_loadings(model, cluster, "journals", top_n)
    rows = []
    for r in range(max(len(hubs), len(auths))):
        hub = hubs[r] if r < len(hubs) else ("", None)
        auth = auths[r] if r < len(auths) else ("", None)
        rows.append((
            hub[0], "" if hub[1] is None else _fmt(hub[1]),
            auth[0], "" if auth[1] is None else _fmt(auth[1]),
        ))
    head = f'<h3>Cluster {cluster + 1}</h3>\n<div class="cluster" data-k="{model.k}" data-cluster="{cluster}">'
    body = _table(("Hub article", "Loading", "Authoritative journal", "Loading"), rows,
                  numeric=(1, 3))
    return head + "\n" + body + "\n</div>"


def render_html_report(models, m=None, summaries=(), top_n=12, title="Scientific citations from Wikipedia"):
    """Single self-contained HTML page; all data strings are escaped."""
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>{escape(title)}</title>",
        f"<style>\n{_CSS}\n</style>",
        "</head>",
        "<body>",
        f"<h1>{escape(title)}</h1>",
        "<h2>Dumps</h2>",
    ]
    if summaries:
        parts.append(_table(
            ("Dump", "Citations", "Articles", "Journal columns"),
            [(s.dump_id, s.total_citations, s.n_articles, s.n_journal_columns) for s in summaries],
            numeric=(1, 2, 3)))
    else:
        parts.append('<p class="empty">No data.</p>')

    parts.append("<h2>Most cited journals</h2>")
    if m is not None and m.nnz:
        parts.append(_table(("Citations", "Journal name"),
                            [(c, j) for j, c in top_cited_journals(m, top_n)], numeric=(0,)))
    else:
        parts.append('<p class="empty">No data.</p>')

    parts.append("<h2>Clusters</h2>")
    if not models:
        parts.append('<p class="empty">No data.</p>')
    for model in models:
        parts.append(f'<section class="model" id="k{model.k}">')
        parts.append(f"<h2>NMF with {model.k} cluster{'s' if model.k != 1 else ''}</h2>")
        parts.append(f"<p>Reconstruction error {_fmt(model.final_error)} after "
                     f"{model.iterations_run} iterations (seed {model.seed}).</p>")
        for c in range(model.k):
            parts.append(_cluster_table(model, c, top_n))
        parts.append("</section>")
    parts += ["</body>", "</html>"]
    return "\n".join(parts) + "\n"
