import random
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wikicite.dump import WikiPage
from wikicite.wikitext import (
    clean_field_value,
    extract_citations,
    parse_templates,
)
from wikigen import gen_wikitext


def balanced(s):
    """Independent check: greedy left-to-right {{ / }} tokens never go below zero and end at zero."""
    depth = 0
    for tok in re.findall(r"\{\{|\}\}", s):
        depth += 1 if tok == "{{" else -1
        if depth < 0:
            return False
    return depth == 0


def page(text, title="Article", ns=0):
    return WikiPage(title, ns, text)


def journals(text):
    return [c.raw_journal for c in extract_citations(page(text))]


# -- parse_templates ---------------------------------------------------------

def test_simple_template():
    (t,) = parse_templates("{{cite journal | journal = Nature | year=2005}}")
    assert t.name == "cite journal"
    assert t.params == (("journal", "Nature"), ("year", "2005"))


def test_pipe_inside_link_is_kept():
    (t,) = parse_templates("{{cite journal|journal=[[Nature (journal)|Nature]]}}")
    assert t.get("journal") == "[[Nature (journal)|Nature]]"


def test_no_templates():
    assert parse_templates("no templates here") == []


def test_nested_template_reported_twice():
    text = "{{Infobox|ref={{cite journal|journal=Cell}}|x=1}}"
    outer, inner = parse_templates(text)
    assert outer.name == "Infobox"
    assert outer.get("ref") == "{{cite journal|journal=Cell}}"
    assert inner.name == "cite journal"
    assert text[inner.source_span[0]:inner.source_span[1]] == "{{cite journal|journal=Cell}}"


def test_positional_params_have_no_key():
    (t,) = parse_templates("{{convert|12|km| =x}}")
    assert t.params == ((None, "12"), (None, "km"), (None, " =x"))


def test_unbalanced_opener_is_skipped_and_counted():
    from collections import Counter
    diag = Counter()
    ts = parse_templates("{{ {{cite journal|journal=Gene}}", diag)
    assert [t.name for t in ts] == ["cite journal"]
    assert diag["unbalanced_braces"] == 1


@given(st.text(alphabet="{}[]|=ab <>/'\n", max_size=80))
def test_spans_are_sound(text):
    for t in parse_templates(text):
        s, e = t.source_span
        frag = text[s:e]
        assert frag.startswith("{{") and frag.endswith("}}")
        assert balanced(frag)


@given(st.binary(max_size=200))
def test_total_on_random_bytes(data):
    text = data.decode("utf-8", errors="replace")
    parse_templates(text)
    extract_citations(page(text))


# -- clean_field_value -------------------------------------------------------

@pytest.mark.parametrize("raw, clean", [
    ("  The Lancet ", "The Lancet"),
    ("[[Nature (journal)|Nature]]", "Nature"),
    ("''Proc R Soc Lond B Biol Sci.''", "Proc R Soc Lond B Biol Sci"),
    ("[[Genomics]]", "Genomics"),
    ("'''Cell'''", "Cell"),
    ("J.  Biol.\n Chem.", "J. Biol. Chem"),
    ("", ""),
])
def test_clean_field_value(raw, clean):
    assert clean_field_value(raw) == clean


# -- extract_citations -------------------------------------------------------

def test_named_ref_counted_once():
    text = ('A<ref name="a">{{cite journal|journal=Cell}}</ref> B<ref name="a"/>')
    cits = extract_citations(page(text))
    assert [c.raw_journal for c in cits] == ["Cell"]
    assert cits[0].dedup_key == "ref:a"


def test_bare_duplicates_are_distinct():
    assert journals("{{cite journal|journal=Cell}} {{cite journal|journal=Cell}}") == ["Cell", "Cell"]


def test_name_match_case_insensitive():
    assert journals("{{Cite Journal|journal=Gene}}") == ["Gene"]
    assert journals("{{cite_journal|journal=Gene}}") == ["Gene"]


def test_other_templates_ignored():
    assert journals("{{citation|journal=Gene}} {{cite book|journal=Gene}}") == []


def test_ref_name_quoting_styles():
    text = ("<ref name=a>{{cite journal|journal=X}}</ref><ref name='a'>{{cite journal|journal=Y}}</ref>"
            '<ref name="b">{{cite journal|journal=Z}}</ref><ref name="a">{{cite journal|journal=W}}</ref>')
    assert journals(text) == ["X", "Z"]


def test_ref_name_compared_exactly():
    text = '<ref name="a">{{cite journal|journal=X}}</ref><ref name="A">{{cite journal|journal=Y}}</ref>'
    assert journals(text) == ["X", "Y"]


def test_comments_removed_first():
    assert journals("<!-- {{cite journal|journal=Hidden}} -->{{cite journal|journal=Shown}}") == ["Shown"]


def test_missing_journal_field_gives_empty():
    assert journals("{{cite journal|title=T}}") == [""]


def test_citation_inside_infobox_counts():
    assert journals("{{Infobox gene|ref={{cite journal|journal=Gene}}}}") == ["Gene"]


def test_non_article_namespace_skipped():
    from collections import Counter
    diag = Counter()
    assert extract_citations(page("{{cite journal|journal=Cell}}", ns=1), diag) == []
    assert diag["skipped_namespace"] == 1


def test_article_title_carried():
    (c,) = extract_citations(page("{{cite journal|journal=Cell}}", title="RBL2"))
    assert c.article_title == "RBL2"


@given(st.integers(0, 2**32 - 1), st.lists(st.sampled_from(["a", "b", "x", "zz"]), max_size=4))
def test_appending_self_closing_refs_changes_nothing(seed, names):
    text = gen_wikitext(random.Random(seed))
    extra = "".join(f'<ref name="{n}"/>' for n in names)
    assert extract_citations(page(text + extra)) == extract_citations(page(text))


@given(st.integers(0, 2**32 - 1))
def test_citations_never_exceed_templates(seed):
    text = gen_wikitext(random.Random(seed))
    cits = extract_citations(page(text))
    from wikicite.wikitext import strip_comments
    n_templates = sum(t.key == "cite journal" for t in parse_templates(strip_comments(text)))
    assert len(cits) <= n_templates
    keys = [c.dedup_key for c in cits]
    assert len(keys) == len(set(keys))
