#!/usr/bin/env python3
"""Regenerates the synthetic corpus, abbreviation dictionary and QA datasets
under data/. Output is deterministic; the generated files are checked in.

Corpus layout (one short document per file, so one chunk each at the
default chunk size):

  cmds/    20 command pages. Each names a rare compound command token such as
           ess::probe_net_17 and says what it reports. The cmds questions
           quote that token, so BM25 finds the page exactly.
  alias/   60 short retirement notes for near-miss aliases
           (ess::probe_net_17-legacy ...). The token differs for BM25 but
           shares its pieces with the question under the hashing embedder,
           so dense retrieval prefers these notes over the long command page.
  params/  20 parameter notes written in prose ("the halo margin bias ...").
           The q2a questions name the parameter in dotted form
           (halo.margin.bias), which is a single unseen BM25 term but splits
           into the same words for the embedder.
  abbr/    20 notes that use dictionary abbreviations without expanding them.
  notes/   filler documents in txt, md, csv and json.

Words from dictionary full names never appear in the corpus, so with ADH
off nothing in retrieved context can reveal an expansion.
"""

import csv
import io
import json
import random
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

DICTIONARY = [
    ("RAT", "Required Arrival Time", "the latest moment a signal may reach a path endpoint"),
    ("AAT", "Actual Arrival Time", None),
    ("DRC", "Design Rule Check", "a geometric verification of layout shapes against foundry rules"),
    ("LVS", "Layout Versus Schematic", "a comparison of extracted layout connectivity with the netlist"),
    ("PDK", "Process Design Kit", None),
    ("STA", "Static Timing Analysis", "a vectorless method for verifying path timing"),
    ("CTS", "Clock Tree Synthesis", None),
    ("OCV", "On-Chip Variation", "a derating model for local process spread"),
    ("DEF", "Design Exchange Format", None),
    ("LEF", "Library Exchange Format", None),
    ("SPEF", "Standard Parasitic Exchange Format", None),
    ("ECO", "Engineering Change Order", "a late incremental edit to a nearly finished netlist"),
    ("RTL", "Register Transfer Level", None),
    ("DFT", "Design For Testability", None),
    ("WNS", "Worst Negative Slack", "the most negative slack among all timing endpoints"),
    ("TNS", "Total Negative Slack", None),
    ("CDC", "Clock Domain Crossing", None),
    ("PVT", "Process Voltage Temperature", None),
    ("MMMC", "Multi-Mode Multi-Corner", None),
    ("EM", "Electromigration", "metal atom transport caused by sustained current density"),
    ("SDF", "Standard Delay Format", None),
    ("HDL", "Hardware Description Language", None),
    ("PLL", "Phase Locked Loop", None),
    ("ESD", "Electrostatic Discharge", None),
    ("FEOL", "Front End Of Line", None),
    ("BEOL", "Back End Of Line", None),
]

WORD = re.compile(r"[0-9A-Za-z_]+")


def plain_tokens(text):
    return [t.lower() for t in WORD.findall(text)]


FORBIDDEN = {t for _, name, _ in DICTIONARY for t in plain_tokens(name)}
QUESTION_ONLY = {"what", "does", "describe", "explain", "summarize", "clarify", "outline", "stand"}

FILLER_NOUNS = """net pin cell wire buffer placement router metal via layer macro block floorplan netlist port
instance script option flag value setting command tool flow stage run job queue farm license user team directory
path file log warning message output input table column row area power density congestion utilization grid rail
shield spacing width track pitch site fanout load driver receiver signal bus memory array compiler vendor release
patch ticket owner review branch repository build regression test coverage waiver note guide channel region
boundary partition hierarchy module wrapper deck rulefile cache snapshot database session workspace queue""".split()
FILLER_VERBS = """uses needs sets runs writes reads stores keeps moves adds removes updates lists prints loads saves
skips splits merges tracks limits raises lowers copies tags flags caches""".split()
FILLER_ADJS = """new old large small fast slow shared local global default custom final early late upper lower
inner outer nightly weekly stale fresh quiet noisy dense sparse""".split()
FILLER_LINKS = ["and", "with", "to", "in", "by", "from", "after", "before", "into", "per", "at", "as"]

TOPIC_WORDS = """halo margin bias antenna dummy fill tap endcap decap spare tie well guard ring seal bump pad
scribe notch jog stub spur taper bevel chamfer fringe ridge dent crest trough ripple jitter glitch droop sag surge
spike leak drain sink gate fin poly oxide nitride silicide contact plug liner barrier cap stack strap stripe mesh
finger comb serpentine spiral ladder""".split()
CMD_VERBS = ["probe", "trace", "scan", "audit", "sweep", "query", "fetch", "gather", "dump", "tally"]
CMD_NOUNS = ["net", "pin", "cell", "wire", "port", "bus", "via", "rail", "grid", "macro"]
ATTRS = [("pin", "capacitance"), ("fanout", "load"), ("wire", "resistance"), ("cell", "leakage"),
         ("driver", "strength"), ("net", "toggle"), ("via", "count"), ("rail", "current"),
         ("grid", "drop"), ("bus", "width"), ("port", "direction"), ("macro", "orientation"),
         ("track", "usage"), ("pitch", "deviation"), ("site", "occupancy"), ("shield", "ratio"),
         ("buffer", "depth"), ("layer", "density"), ("region", "congestion"), ("signal", "swing")]
ALIAS_SUFFIXES = ["legacy", "old", "beta"]
INTERROGATIVES = ["Describe", "Explain", "Summarize", "Clarify", "Outline"]
PARAM_EFFECTS = ["how far apart the {a} and {b} stay", "the spread between each {a} and {b}",
                 "how much headroom the {a} gives the {b}", "the share each {a} keeps as {b}",
                 "how often the {a} is refreshed by the {b}"]

rng = random.Random(20240501)


def filler_sentence():
    a, b = rng.sample(FILLER_NOUNS, 2)
    c = rng.choice(FILLER_NOUNS)
    return (f"The {rng.choice(FILLER_ADJS)} {a} {rng.choice(FILLER_VERBS)} the {b} "
            f"{rng.choice(FILLER_LINKS)} the {rng.choice(FILLER_ADJS)} {c}.")


def filler(n):
    return " ".join(filler_sentence() for _ in range(n))


def check_text(text, allow=()):
    toks = set(plain_tokens(text))
    bad = (toks & FORBIDDEN) | ((toks & QUESTION_ONLY) - set(allow))
    assert not bad, f"forbidden words {sorted(bad)} in: {text!r}"
    if "report" not in allow:
        assert "report" not in toks, f"'report' outside a command page: {text!r}"


def write(rel, text):
    path = DATA / "corpus" / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def main():
    for w in TOPIC_WORDS:
        assert w not in FILLER_NOUNS and w not in FORBIDDEN, w
    manifest = []

    cmds = []
    for i in range(20):
        verb = CMD_VERBS[i % len(CMD_VERBS)]
        noun = CMD_NOUNS[(i * 3 + i // len(CMD_VERBS)) % len(CMD_NOUNS)]
        name = f"{verb}_{noun}_{11 + i * 7}"
        a1, a2 = ATTRS[i]
        answer = f"ess::{name} will report the {a1} {a2} values."
        body = (f"Command page {i + 1}\n\n{answer}\n\n{filler(5)}\n\n"
                f"Options\n\n-scope limits the run to a hierarchy. {filler(2)}\n")
        check_text(body, allow={"report"})
        rel = f"cmds/cmd_{i:02d}.txt"
        write(rel, body)
        manifest.append({"uri": rel})
        cmds.append({"question": f"What does ess::{name} report?", "answer": answer})
        for k, suffix in enumerate(ALIAS_SUFFIXES):
            note = f"ess::{name}-{suffix} was retired in release {3 + k}.\n"
            check_text(note)
            rel = f"alias/{name}_{suffix}.txt"
            write(rel, note)
            manifest.append({"uri": rel})

    topics = TOPIC_WORDS[:]
    rng.shuffle(topics)
    q2a = []
    for i in range(20):
        w1, w2, w3 = topics[3 * i:3 * i + 3]
        a, b = rng.sample(FILLER_NOUNS, 2)
        effect = PARAM_EFFECTS[i % len(PARAM_EFFECTS)].format(a=a, b=b)
        answer = f"The {w1} {w2} {w3} value sets {effect}."
        body = f"{answer} {filler(1)}\n"
        check_text(body)
        rel = f"params/{w1}_{w2}_{w3}.md" if i % 4 == 0 else f"params/{w1}_{w2}_{w3}.txt"
        write(rel, body)
        manifest.append({"uri": rel})
        q2a.append({"question": f"{INTERROGATIVES[i % len(INTERROGATIVES)]} {w1}.{w2}.{w3}.", "answer": answer})

    abbrs = [a for a, _, _ in DICTIONARY]
    for i in range(20):
        x, y = abbrs[i % len(abbrs)], abbrs[(i * 5 + 3) % len(abbrs)]
        body = f"Run {x} with the {y} deck from the shared directory. {filler(2)}\n"
        check_text(body)
        rel = f"abbr/usage_{i:02d}.txt"
        write(rel, body)
        manifest.append({"uri": rel})

    for i in range(112):
        body = f"{filler(4)}\n\n{filler(3)}\n"
        check_text(body)
        if i % 8 == 0:
            rel = f"notes/note_{i:03d}.md"
            body = f"# Note {i}\n\n{body}"
        else:
            rel = f"notes/note_{i:03d}.txt"
        write(rel, body)
        manifest.append({"uri": rel})

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["topic", "guidance"])
    for i in range(6):
        w.writerow([f"queue {i}", filler(1)])
    check_text(buf.getvalue())
    write("notes/farm_faq.csv", buf.getvalue())
    manifest.append({"uri": "notes/farm_faq.csv"})

    tsv = "setting\tguidance\n" + "".join(f"cache {i}\t{filler(1)}\n" for i in range(4))
    check_text(tsv)
    write("notes/cache_settings.tsv", tsv)
    manifest.append({"uri": "notes/cache_settings.tsv"})

    records = [{"tool": f"router {i}", "owner": "team", "note": filler(1)} for i in range(5)]
    text = json.dumps(records, indent=2) + "\n"
    check_text(text)
    write("notes/tool_owners.json", text)
    manifest.append({"uri": "notes/tool_owners.json"})

    (DATA / "corpus" / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")

    dictionary = []
    for abbr, name, desc in DICTIONARY:
        e = {"abbr": abbr, "name": name}
        if desc:
            e["desc"] = desc
        dictionary.append(e)
    (DATA / "abbreviations.json").write_text(json.dumps(dictionary, indent=1) + "\n", encoding="utf-8")

    def jsonl(path, rows):
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")

    jsonl(DATA / "datasets" / "cmds.jsonl", cmds)
    jsonl(DATA / "datasets" / "q2a.jsonl", q2a)
    jsonl(DATA / "datasets" / "abbr.jsonl",
          [{"question": f"What does {a} stand for?", "answer": n} for a, n, _ in DICTIONARY])
    print(f"{len(manifest)} documents, {len(cmds)} cmds, {len(q2a)} q2a, {len(DICTIONARY)} abbr")


if __name__ == "__main__":
    main()
