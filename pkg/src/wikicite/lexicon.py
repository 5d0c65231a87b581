"""Canonical journal names and their variants.

The lexicon file looks like::

    <journals>
      <journal>
        <canonical>The Journal of Biological Chemistry</canonical>
        <variant>J Biol Chem</variant>
        <variant>J. Biol. Chem.</variant>
      </journal>
    </journals>

Lookups use a normalized key (case-fold, whitespace collapse, trailing
periods dropped). There is no fuzzy matching: unknown names pass through
as their own column.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import CollisionError, XmlError

_TRAILING = re.compile(r"[\s.]+$")


def clean_journal_name(raw):
    """Collapse whitespace and drop trailing periods, keeping the casing."""
    return _TRAILING.sub("", " ".join(raw.split()))


def journal_key(raw):
    return clean_journal_name(clean_journal_name(raw).casefold())


@dataclass(frozen=True)
class NormalizedJournal:
    name: str
    matched: bool


@dataclass
class JournalLexicon:
    entries: list = field(default_factory=list)
    lookup: dict = field(default_factory=dict)

    @classmethod
    def from_entries(cls, entries):
        """Build from ``(canonical, [variants...])`` pairs, checking collisions."""
        lex = cls()
        for canonical, variants in entries:
            canonical = " ".join(canonical.split())
            lex.entries.append((canonical, list(variants)))
            for name in (canonical, *variants):
                key = journal_key(name)
                if not key:
                    continue
                owner = lex.lookup.setdefault(key, canonical)
                if owner != canonical:
                    raise CollisionError(key, owner, canonical)
        return lex

    def __len__(self):
        return len(self.entries)

    def canonical_names(self):
        return [c for c, _ in self.entries]


def load_lexicon(path):
    path = Path(path)
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise XmlError(f"{path}: {exc}") from exc
    if root.tag != "journals":
        raise XmlError(f"{path}: expected <journals> root, got <{root.tag}>")
    entries = []
    for j in root.iter("journal"):
        canonical = (j.findtext("canonical") or "").strip()
        if not canonical:
            raise XmlError(f"{path}: <journal> without <canonical>")
        variants = [" ".join((v.text or "").split()) for v in j.findall("variant")]
        entries.append((canonical, [v for v in variants if v]))
    return JournalLexicon.from_entries(entries)


def bundled_lexicon_path():
    return Path(str(resources.files("wikicite") / "data" / "journals.xml"))


def normalize_journal(raw, lexicon):
    cleaned = clean_journal_name(raw)
    canonical = lexicon.lookup.get(journal_key(cleaned))
    if canonical is not None:
        return NormalizedJournal(canonical, True)
    return NormalizedJournal(cleaned, False)
