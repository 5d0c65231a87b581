"""Template parsing and ``cite journal`` extraction from raw wikitext.

The parser is deliberately small: it pairs ``{{`` with ``}}`` using a stack,
then splits each template body on pipes that are not inside a nested
template or a ``[[...]]`` link. Parsing never fails; unmatched openers are
skipped and counted.
"""

from __future__ import annotations

import bisect
import re
from collections import Counter
from dataclasses import dataclass

CITE_JOURNAL = "cite journal"

_BRACES = re.compile(r"\{\{|\}\}")
_BODY_TOKENS = re.compile(r"\{\{|\}\}|\[\[|\]\]|\|")
_COMMENT = re.compile(r"<!--.*?(?:-->|\Z)", re.S)
_REF_TAG = re.compile(r"<ref\b([^>]*?)(/?)>|</ref\s*>", re.I)
_REF_NAME = re.compile(r"""\bname\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s"'/>]+))""", re.I)
_LINK = re.compile(r"\[\[([^\[\]|]*)(?:\|([^\[\]]*))?\]\]")
_QUOTES = re.compile(r"'{2,}")


def normalize_template_name(name):
    """Case-fold and collapse whitespace/underscores, as MediaWiki titles do."""
    return " ".join(name.replace("_", " ").split()).casefold()


@dataclass(frozen=True)
class TemplateInstance:
    name: str
    params: tuple
    source_span: tuple

    @property
    def key(self):
        return normalize_template_name(self.name)

    def get(self, key, default=None):
        """Value of the named parameter ``key``; the last occurrence wins."""
        value = default
        for k, v in self.params:
            if k is not None and k == key:
                value = v
        return value


@dataclass(frozen=True)
class CitationInstance:
    article_title: str
    raw_journal: str
    dedup_key: str

    def to_json(self):
        return {"article": self.article_title, "journal_raw": self.raw_journal,
                "dedup_key": self.dedup_key}


def _template_spans(text, diagnostics):
    stack = []
    spans = []
    for m in _BRACES.finditer(text):
        if m.group() == "{{":
            stack.append(m.start())
        elif stack:
            spans.append((stack.pop(), m.end()))
    if stack:
        diagnostics["unbalanced_braces"] += len(stack)
    spans.sort()
    return spans


def _split_body(body):
    parts = []
    braces = links = 0
    last = 0
    for m in _BODY_TOKENS.finditer(body):
        tok = m.group()
        if tok == "{{":
            braces += 1
        elif tok == "}}":
            braces = max(braces - 1, 0)
        elif tok == "[[":
            links += 1
        elif tok == "]]":
            links = max(links - 1, 0)
        elif braces == 0 and links == 0:
            parts.append(body[last:m.start()])
            last = m.end()
    parts.append(body[last:])
    return parts


def _top_level_eq(segment):
    braces = links = 0
    for m in re.finditer(r"\{\{|\}\}|\[\[|\]\]|=", segment):
        tok = m.group()
        if tok == "{{":
            braces += 1
        elif tok == "}}":
            braces = max(braces - 1, 0)
        elif tok == "[[":
            links += 1
        elif tok == "]]":
            links = max(links - 1, 0)
        elif braces == 0 and links == 0:
            return m.start()
    return -1


def _parse_params(segments):
    params = []
    for seg in segments:
        eq = _top_level_eq(seg)
        key = seg[:eq].strip() if eq >= 0 else ""
        if key:
            params.append((key, seg[eq + 1:].strip()))
        else:
            params.append((None, seg))
    return tuple(params)


def parse_templates(wikitext, diagnostics=None):
    """All template instances in ``wikitext``, outer before inner.

    Nested templates are reported on their own and also stay verbatim inside
    the parent's parameter values. ``source_span`` is a (start, end) pair of
    string indices with ``wikitext[start:end]`` running from ``{{`` to ``}}``.
    """
    if diagnostics is None:
        diagnostics = Counter()
    out = []
    for start, end in _template_spans(wikitext, diagnostics):
        name, *rest = _split_body(wikitext[start + 2:end - 2])
        out.append(TemplateInstance(name.strip(), _parse_params(rest), (start, end)))
    return out


def clean_field_value(value):
    """Strip link/quote markup and whitespace from a template field value.

    >>> clean_field_value("''[[Nature (journal)|Nature]].''")
    'Nature'
    """
    value = _LINK.sub(lambda m: m.group(1) if m.group(2) is None else m.group(2), value)
    value = _QUOTES.sub("", value)
    value = " ".join(value.split())
    if value.endswith("."):
        value = value[:-1].rstrip()
    return value


def strip_comments(wikitext):
    return _COMMENT.sub("", wikitext)


def _named_ref_regions(text):
    """(start, end, name) for each ``<ref name=...>...</ref>`` body."""
    regions = []
    open_at = None
    open_name = None
    for m in _REF_TAG.finditer(text):
        if m.group(0).startswith("</"):
            if open_at is not None and open_name is not None:
                regions.append((open_at, m.start(), open_name))
            open_at = None
        elif m.group(2):
            continue
        else:
            open_at = m.end()
            nm = _REF_NAME.search(m.group(1))
            open_name = None if nm is None else next(g for g in nm.groups() if g is not None)
    return regions


def extract_citations(page, diagnostics=None):
    """``cite journal`` citations of one article, with named refs counted once.

    Non-article namespaces yield nothing. Citations inside ``<ref name=X>``
    share the dedup key ``ref:X``; bare citations each get their own key.
    """
    if diagnostics is None:
        diagnostics = Counter()
    if page.namespace != 0:
        diagnostics["skipped_namespace"] += 1
        return []
    text = strip_comments(page.wikitext)
    regions = _named_ref_regions(text)
    starts = [r[0] for r in regions]
    seen = set()
    out = []
    for tpl in parse_templates(text, diagnostics):
        if tpl.key != CITE_JOURNAL:
            continue
        pos = tpl.source_span[0]
        idx = bisect.bisect_right(starts, pos) - 1
        if idx >= 0 and pos < regions[idx][1]:
            key = "ref:" + regions[idx][2]
        else:
            key = f"@{pos}"
        if key in seen:
            diagnostics["duplicate_refs"] += 1
            continue
        seen.add(key)
        out.append(CitationInstance(page.title, clean_field_value(tpl.get("journal", "")), key))
    return out
