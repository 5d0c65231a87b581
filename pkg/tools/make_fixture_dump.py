"""Regenerate src/wikicite/data/fixture_dump.xml (about 100 KB, deterministic).

The citation markup of each page is written out literally below; the prose
around it is filler so the file has a realistic size.
"""

import random
from pathlib import Path
from xml.sax.saxutils import escape

OUT = Path(__file__).resolve().parents[1] / "src" / "wikicite" / "data" / "fixture_dump.xml"

PAGES = [
    ("Extinction (astronomy)", 0, [
        "Interstellar extinction was characterised early.{{cite journal |journal=The Astrophysical Journal |year=2001 |volume=548}}",
        "A later survey refined the curve.<ref>{{cite journal|journal=[[Astrophysical Journal|ApJ]]|title=Dust}}</ref>",
        "Reddening laws<!-- {{cite journal|journal=Nature}} hidden -->differ by sightline.{{Cite journal|journal=''Astronomy and Astrophysics''|year=2003}}",
        "Solar system dust is also relevant.{{cite journal|journal=Icarus|year=1999}}",
    ]),
    ("List of molecules in interstellar space", 0, [
        'The first detection used radio lines.<ref name="apj1">{{cite journal|journal=Astrophys. J.|volume=1}}</ref>',
        'Hydroxyl followed soon after.<ref name="apj1"/> Ammonia too.<ref name="apj1" />',
        'The same reference defined twice.<ref name="apj1">{{cite journal|journal=Astrophys. J.}}</ref>',
        "Complex organics were reported.<ref name=aa>{{cite journal|journal=Astron. Astrophys.|year=2005}}</ref>",
        "Fullerenes were detected.<ref>{{cite journal|journal=Nature|year=2010}}</ref>",
    ]),
    ("Myocardial infarction", 0, [
        "Early reperfusion improves outcome.{{cite journal|journal=N Engl J Med.|year=1986}}",
        "Aspirin reduces mortality.{{cite journal|journal=New England Journal of Medicine}}",
        "Risk scores were validated.<ref name='lancet'>{{cite journal|journal=Lancet|year=2004}}</ref> Again.<ref name='lancet' />",
        "Statins were trialled.{{cite journal | journal = The Lancet | year = 1994 }}",
        "Biomarkers were compared.{{cite journal|journal=Circulation}}",
        "Genetics plays a role.{{cite journal|journal=Science|year=2007}}",
    ]),
    ("Papillomavirus", 0, [
        "The capsid has 72 pentamers.{{cite journal|journal=J. Virol.|year=1991}}",
        "E6 degrades p53.{{cite journal|journal=Journal of Virology}}",
        "Classification follows the L1 gene.{{cite journal|journal=Virology|year=2004}}",
        "{{Infobox virus|name=Papillomavirus|ref={{cite journal|journal=Virology|year=2010}}}}",
        "Vaccines are effective.{{cite journal|journal=Proc. Natl. Acad. Sci. U.S.A.|year=1992}}",
    ]),
    ("RBL2", 0, [
        "RBL2 binds E2F4.{{cite journal|journal=J Biol Chem|year=1998}}",
        "It is phosphorylated by CDKs.{{cite journal|journal=The Journal of Biological Chemistry}}",
        "Loss is seen in tumours.{{cite journal|journal=Oncogene|year=2000}}",
        "Comparative work in birds.{{cite journal|journal=Proc R Soc Lond B Biol Sci|year=1997}}",
        "And in mammals.{{cite journal|journal=proc r soc lond b biol sci.}}",
        "Expression in cancer lines.{{cite journal|journal=Cancer Res.|year=2001}}",
        "A citation without a journal field.{{cite journal|title=Unpublished notes|year=2002}}",
        "A different template.{{citation|journal=Nature|year=2003}}",
    ]),
    ("Uranus", 0, [
        "The rings were found by occultation.{{cite journal|journal=Icarus|year=1978}}",
        "Voyager 2 imaged the moons.{{cite journal|journal=Icarus|year=1987}}",
        "The tilt remains unexplained.{{cite journal|journal=Nature|year=1986}}",
        "Its magnetosphere is offset.{{cite journal|journal=The Astrophysical Journal}}",
    ]),
    ("Talk:Uranus", 1, [
        "Should we cite this?{{cite journal|journal=Icarus|year=2000}}",
    ]),
    ("Acute myeloid leukemia", 0, [
        "FLT3 mutations are common.{{cite journal|journal=Blood|year=2002}}",
        "Induction uses cytarabine.{{cite journal|journal=[[Blood (journal)|Blood]]}}",
        "CEBPA signalling matters.{{cite journal|journal=J. Biol. Chem.|year=2003}}",
        "Fusion oncogenes drive it.{{cite journal|journal=''[[Oncogene]]''}}",
    ]),
    ("Empty stub", 0, None),
]

WORDS = ("the of and in to a is was for on as by with from that at are this which "
         "spectrum cluster galaxy protein gene receptor cell patient trial orbit moon "
         "journal citation dust cloud virus capsid kinase domain binding expression").split()


def filler(rng, n_paragraphs):
    paras = []
    for _ in range(n_paragraphs):
        words = [rng.choice(WORDS) for _ in range(rng.randint(60, 90))]
        for _ in range(3):
            i = rng.randrange(len(words))
            words[i] = f"[[{words[i]}|{words[i].upper()}]]"
        if rng.random() < 0.5:
            words.insert(rng.randrange(len(words)), "{{convert|12|km|mi}}")
        if rng.random() < 0.3:
            words.insert(rng.randrange(len(words)), "{{citation needed|date=March 2008}}")
        paras.append(" ".join(words).capitalize() + ".")
    return paras


def build():
    rng = random.Random(20080312)
    out = [
        '<?xml version="1.0" encoding="utf-8"?>',
        '<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.3/" version="0.3" xml:lang="en">',
        "  <siteinfo>",
        "    <sitename>Wikipedia</sitename>",
        "    <base>http://en.wikipedia.org/wiki/Main_Page</base>",
        "  </siteinfo>",
    ]
    for pid, (title, ns, cites) in enumerate(PAGES, 1):
        out += ["  <page>", f"    <title>{escape(title)}</title>", f"    <ns>{ns}</ns>",
                f"    <id>{pid}</id>", "    <revision>", f"      <id>{1000 + pid}</id>",
                "      <timestamp>2008-03-12T00:00:00Z</timestamp>"]
        if cites is None:
            out.append('      <text xml:space="preserve" />')
        else:
            body = []
            for line in cites:
                body += filler(rng, 5)
                body.append(line)
            body += filler(rng, 3)
            body.append("== References ==\n<references/>\n[[Category:Fixture pages]] Pflügers Archiv mention.")
            out.append('      <text xml:space="preserve">' + escape("\n\n".join(body)) + "</text>")
        out += ["    </revision>", "  </page>"]
    out.append("</mediawiki>")
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    text = build()
    OUT.write_text(text, encoding="utf-8")
    print(OUT, len(text.encode("utf-8")), "bytes")
