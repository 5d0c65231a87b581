"""Cluster bush: clusters of NMF runs with k = 1, 2, ... stacked in rows.

Each cluster becomes a circle sized by its total article loading; clusters
in runs with consecutive k are joined by lines whose width grows with their
overlap, the cosine similarity of their article-loading columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .errors import AxisMismatch, NonConsecutiveK

DEFAULT_MIN_OVERLAP = 0.1


@dataclass(frozen=True)
class BushNode:
    run_k: int
    cluster: int
    labels: tuple
    mass: float

    @property
    def label(self):
        return self.labels[0] if self.labels else ""


@dataclass(frozen=True)
class BushEdge:
    a: int
    b: int
    overlap: float


@dataclass
class ClusterBush:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def node_index(self, run_k, cluster):
        for i, n in enumerate(self.nodes):
            if n.run_k == run_k and n.cluster == cluster:
                return i
        raise KeyError((run_k, cluster))


def _cosine(a, b):
    # rescale so tiny loadings do not underflow in the squared norms
    sa, sb = float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0))
    if sa == 0.0 or sb == 0.0:
        return 0.0
    a, b = a / sa, b / sb
    denom = math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    if denom == 0.0:
        return 0.0
    return min(1.0, max(0.0, float(np.dot(a, b)) / denom))


def _top_set(col, n):
    order = sorted(range(len(col)), key=lambda i: (-col[i], i))
    return {i for i in order[:n] if col[i] > 0}


def _jaccard(a, b, n):
    sa, sb = _top_set(a, n), _top_set(b, n)
    union = sa | sb
    return len(sa & sb) / len(union) if union else 0.0


def cluster_overlap(model_a, i, model_b, j, method="cosine", top_n=10):
    """Overlap in [0, 1] of cluster ``i`` of one model and ``j`` of another.

    ``method="cosine"`` compares the article-loading columns of W;
    ``method="jaccard"`` compares their top-``top_n`` hub sets.
    """
    if model_a.W.shape[0] != model_b.W.shape[0] or (
            model_a.row_labels is not None and model_b.row_labels is not None
            and tuple(model_a.row_labels) != tuple(model_b.row_labels)):
        raise AxisMismatch("models do not share an article axis")
    if not 0 <= i < model_a.k or not 0 <= j < model_b.k:
        raise IndexError(f"cluster index out of range ({i}, {j})")
    a, b = model_a.W[:, i], model_b.W[:, j]
    if method == "cosine":
        return _cosine(a, b)
    if method == "jaccard":
        return _jaccard(a, b, top_n)
    raise ValueError(f"unknown overlap method {method!r}")


def build_bush(models, row_labels=None, top_n_label=1, min_overlap=DEFAULT_MIN_OVERLAP,
               method="cosine"):
    """Nodes for every cluster of every run, edges between consecutive runs."""
    models = list(models)
    if not models:
        return ClusterBush()
    for prev, cur in zip(models, models[1:]):
        if cur.k != prev.k + 1:
            raise NonConsecutiveK(f"run k={cur.k} follows k={prev.k}")
        if cur.W.shape[0] != prev.W.shape[0]:
            raise AxisMismatch(f"runs k={prev.k} and k={cur.k} have different article axes")
    if row_labels is None:
        row_labels = models[0].row_labels
    if row_labels is None:
        row_labels = [str(i) for i in range(models[0].W.shape[0])]
    if len(row_labels) != models[0].W.shape[0]:
        raise AxisMismatch("row_labels length does not match the article axis")

    bush = ClusterBush()
    first = {}
    for m in models:
        first[m.k] = len(bush.nodes)
        for c in range(m.k):
            col = m.W[:, c]
            ranked = sorted(zip(row_labels, col.tolist()), key=lambda t: (-t[1], t[0]))
            labels = tuple(t[0] for t in ranked[:top_n_label])
            bush.nodes.append(BushNode(m.k, c, labels, float(col.sum())))
    for lo, hi in zip(models, models[1:]):
        for i in range(lo.k):
            for j in range(hi.k):
                ov = cluster_overlap(lo, i, hi, j, method=method)
                if ov >= min_overlap:
                    bush.edges.append(BushEdge(first[lo.k] + i, first[hi.k] + j, ov))
    return bush


@dataclass(frozen=True)
class BushStyle:
    width: int = 960
    row_height: int = 110
    margin: int = 60
    min_radius: float = 6.0
    max_radius: float = 28.0
    min_stroke: float = 0.5
    max_stroke: float = 12.0
    font_size: int = 11
    max_label_chars: int = 28


def layout(bush, style=BushStyle()):
    """(x, y) per node. Rows go bottom-up by k; within a row, nodes are
    ordered by the overlap-weighted barycenter of their neighbours below."""
    by_k = {}
    for idx, node in enumerate(bush.nodes):
        by_k.setdefault(node.run_k, []).append(idx)
    ks = sorted(by_k)
    height = 2 * style.margin + style.row_height * max(len(ks) - 1, 0)
    inner = style.width - 2 * style.margin
    below = {}
    for e in bush.edges:
        below.setdefault(e.b, []).append((e.a, e.overlap))
    pos = {}
    for r, k in enumerate(ks):
        members = by_k[k]
        if r:
            def barycenter(idx, slot):
                links = below.get(idx, [])
                total = sum(w for _, w in links)
                if total > 0:
                    # rounded so float noise cannot reorder exact ties
                    return round(sum(pos[a][0] * w for a, w in links) / total, 6)
                return style.margin + inner * (slot + 0.5) / len(members)
            keyed = [(barycenter(idx, s), bush.nodes[idx].cluster, idx)
                     for s, idx in enumerate(members)]
            members = [idx for _, _, idx in sorted(keyed)]
        y = height - style.margin - r * style.row_height
        for slot, idx in enumerate(members):
            pos[idx] = (style.margin + inner * (slot + 0.5) / len(members), y)
    return pos, height


def _affine(value, lo, hi, out_lo, out_hi):
    if hi <= lo:
        return (out_lo + out_hi) / 2.0
    return out_lo + (out_hi - out_lo) * (value - lo) / (hi - lo)


def node_radius(mass, masses, style=BushStyle()):
    roots = [math.sqrt(max(m, 0.0)) for m in masses]
    return _affine(math.sqrt(max(mass, 0.0)), min(roots), max(roots),
                   style.min_radius, style.max_radius)


def edge_width(overlap, style=BushStyle()):
    return style.min_stroke + (style.max_stroke - style.min_stroke) * overlap


def _short(label, n):
    return label if len(label) <= n else label[: n - 1] + "…"


def render_bush_svg(bush, style=BushStyle()):
    """Standalone SVG 1.1 document for ``bush``; identical input gives identical bytes."""
    pos, height = layout(bush, style)
    masses = [n.mass for n in bush.nodes]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{style.width}" '
        f'height="{height}" viewBox="0 0 {style.width} {height}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>',
        '<g id="edges" stroke="#4a6fa5" stroke-opacity="0.6" stroke-linecap="round">',
    ]
    for e in bush.edges:
        (x1, y1), (x2, y2) = pos[e.a], pos[e.b]
        out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                   f'stroke-width="{edge_width(e.overlap, style):.3f}">'
                   f'<title>{e.overlap:.3f}</title></line>')
    out.append('</g>')
    out.append('<g id="nodes" fill="#f6c85f" stroke="#333333" stroke-width="1">')
    for idx, node in enumerate(bush.nodes):
        x, y = pos[idx]
        r = node_radius(node.mass, masses, style)
        title = escape(f"k={node.run_k} cluster {node.cluster + 1}: " + "; ".join(node.labels))
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}"><title>{title}</title></circle>')
    out.append('</g>')
    out.append(f'<g id="labels" font-family="sans-serif" font-size="{style.font_size}" '
               'text-anchor="middle" fill="#111111">')
    for idx, node in enumerate(bush.nodes):
        x, y = pos[idx]
        r = node_radius(node.mass, masses, style)
        for line, label in enumerate(node.labels):
            ty = y + r + style.font_size * (line + 1.1)
            out.append(f'<text x="{x:.2f}" y="{ty:.2f}">'
                       f'{escape(_short(label, style.max_label_chars))}</text>')
    out.append('</g>')
    for r, k in enumerate(sorted({n.run_k for n in bush.nodes})):
        y = height - style.margin - r * style.row_height
        out.append(f'<text x="8" y="{y + 4:.2f}" font-family="sans-serif" '
                   f'font-size="{style.font_size}" fill="#666666">k={k}</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"
