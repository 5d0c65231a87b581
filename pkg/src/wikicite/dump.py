"""Streaming reader for MediaWiki XML exports, plain or bzip2-compressed.

Pages are produced one at a time from an incremental XML parser; every
finished ``<page>`` element is detached from the tree, so memory stays
bounded by the largest page rather than the dump size.
"""

from __future__ import annotations

import bz2
import codecs
import threading
import xml.etree.ElementTree as ET
from collections import Counter, deque
from dataclasses import dataclass
from pathlib import Path

from .errors import DecompressionError, XmlError

CHUNK_SIZE = 1 << 16
BZIP2_MAGIC = b"BZh"

_tally = threading.local()


def _replace_and_count(exc):
    _tally.bad = getattr(_tally, "bad", 0) + 1
    return "�", exc.end


codecs.register_error("wikicite-replace", _replace_and_count)


@dataclass(frozen=True)
class WikiPage:
    title: str
    namespace: int
    wikitext: str


def _local(tag):
    return tag.rpartition("}")[2]


def _child(elem, name):
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


class PageStream:
    """Single-consumer iterator of :class:`WikiPage` values.

    Iterate it directly, or call :meth:`next_page`, which returns ``None`` at
    the end (repeatedly, once exhausted). ``diagnostics`` counts invalid UTF-8
    sequences replaced and pages skipped for lacking a title.
    """

    def __init__(self, raw, source="<stream>", compressed=False, chunk_size=CHUNK_SIZE):
        self.source = str(source)
        self.diagnostics = Counter()
        self._raw = raw
        self._reader = bz2.BZ2File(raw) if compressed else raw
        self._chunk_size = chunk_size
        self._decoder = codecs.getincrementaldecoder("utf-8")(errors="wikicite-replace")
        self._parser = ET.XMLPullParser(events=("start", "end"))
        self._pending = deque()
        self._root = None
        self._offset = 0
        self._last_title = None
        self._done = False

    def __iter__(self):
        return self

    def __next__(self):
        page = self.next_page()
        if page is None:
            raise StopIteration
        return page

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        self._done = True
        if self._reader is not self._raw:
            self._reader.close()
        self._raw.close()

    def next_page(self):
        while not self._pending:
            if self._done:
                return None
            self._pump()
        return self._pending.popleft()

    def _read(self):
        try:
            return self._reader.read(self._chunk_size)
        except (OSError, EOFError) as exc:
            offset = self._raw.tell() if not self._raw.closed else None
            self.close()
            raise DecompressionError(f"{self.source}: {exc}", offset) from exc

    def _pump(self):
        data = self._read()
        final = not data
        _tally.bad = 0
        text = self._decoder.decode(data, final=final)
        self.diagnostics["invalid_utf8"] += _tally.bad
        try:
            if text:
                self._parser.feed(text)
            if final:
                self._parser.close()
            self._collect()
        except ET.ParseError as exc:
            offset = self._offset + len(data)
            self.close()
            raise XmlError(f"{self.source}: {exc}", offset, self._last_title) from exc
        self._offset += len(data)
        if final:
            if self._root is None:
                self.close()
                raise XmlError(f"{self.source}: no document element", self._offset)
            self.close()

    def _collect(self):
        for event, elem in self._parser.read_events():
            if event == "start":
                if self._root is None:
                    self._root = elem
                continue
            name = _local(elem.tag)
            if name == "title":
                self._last_title = elem.text
            elif name == "page":
                page = self._to_page(elem)
                if page is not None:
                    self._pending.append(page)
                elem.clear()
                if self._root is not None and elem is not self._root:
                    try:
                        self._root.remove(elem)
                    except ValueError:
                        pass

    def _to_page(self, elem):
        title_el = _child(elem, "title")
        title = (title_el.text or "").strip() if title_el is not None else ""
        if not title:
            self.diagnostics["untitled_pages"] += 1
            return None
        ns_el = _child(elem, "ns")
        try:
            ns = int((ns_el.text or "0").strip()) if ns_el is not None else 0
        except ValueError:
            raise XmlError(f"{self.source}: bad namespace {ns_el.text!r}", self._offset, title)
        if ns < 0:
            raise XmlError(f"{self.source}: negative namespace {ns}", self._offset, title)
        text = ""
        revisions = [c for c in elem if _local(c.tag) == "revision"]
        if revisions:
            text_el = _child(revisions[-1], "text")
            if text_el is not None and text_el.text:
                text = text_el.text
        if not text:
            self.diagnostics["empty_pages"] += 1
        return WikiPage(title, ns, text)


def _sniff_bzip2(path):
    with open(path, "rb") as fh:
        return fh.read(3) == BZIP2_MAGIC


def open_dump_stream(path, compression="auto", chunk_size=CHUNK_SIZE):
    """Open ``path`` and return a lazy :class:`PageStream`.

    ``compression`` is ``"none"``, ``"bzip2"`` or ``"auto"`` (sniffs the
    ``BZh`` magic). Raises ``FileNotFoundError`` for a missing path.
    """
    path = Path(path)
    if compression not in ("none", "bzip2", "auto"):
        raise ValueError(f"unknown compression {compression!r}")
    if compression == "auto":
        compressed = _sniff_bzip2(path)
    else:
        compressed = compression == "bzip2"
    raw = open(path, "rb")
    return PageStream(raw, source=path, compressed=compressed, chunk_size=chunk_size)


def next_page(stream):
    return stream.next_page()
