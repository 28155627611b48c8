#!/usr/bin/env python3
# Copyright 2026 The Curator Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the data fixtures under fixtures/ (except golden transcripts)."""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def write(path, text, mode="w"):
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        path.write_text(text, encoding="utf-8")


PARAGRAPHS = [
    "Grid frequency in large interconnected power systems is held near its nominal value by "
    "primary control reserves. When a generator trips, rotating inertia slows the initial "
    "decline, governors raise output within seconds, and secondary control restores the "
    "scheduled frequency and tie-line flows over several minutes.",
    "Photovoltaic modules convert sunlight into direct current through the photoelectric effect "
    "in doped silicon junctions. Module efficiency falls as cell temperature rises, so array "
    "designers account for irradiance, ambient temperature, wind cooling and mounting geometry "
    "when they estimate annual energy yield.",
    "Lithium-ion battery cells age through calendar and cycling mechanisms. Growth of the solid "
    "electrolyte interphase consumes cyclable lithium, while high charge rates at low "
    "temperature promote lithium plating. State-of-health estimators track capacity fade and "
    "rising internal resistance over the service life.",
    "Wind turbine power output scales with the cube of wind speed between cut-in and rated "
    "speed. Above rated speed, blade pitch control sheds aerodynamic load to hold power "
    "constant, and at cut-out speed the rotor is feathered and braked to protect the drivetrain.",
    "Proton exchange membrane electrolysers split water into hydrogen and oxygen using a "
    "perfluorinated membrane and platinum-group catalysts. They respond quickly to changing "
    "power input, which suits coupling with variable renewable generation, but iridium "
    "loading on the anode remains a cost concern.",
    "Reservoir simulation solves coupled mass-balance equations for oil, gas and water phases "
    "on a discretised geological model. History matching adjusts permeability and porosity "
    "fields until simulated well rates and pressures agree with production records.",
    "Small modular reactors aim to reduce construction risk through factory fabrication of "
    "standardised modules. Passive safety systems rely on natural circulation and gravity-fed "
    "cooling, removing decay heat without operator action or external power for extended periods.",
    "Electricity markets clear day-ahead energy offers against forecast demand to set locational "
    "marginal prices. Congestion on transmission lines separates prices between nodes, and "
    "financial transmission rights let participants hedge that congestion cost.",
    "District heating networks distribute hot water from combined heat and power plants, waste "
    "incinerators or large heat pumps to buildings. Lowering supply temperatures cuts pipe "
    "losses and lets low-grade heat sources such as data centres feed the network.",
    "Carbon capture with amine solvents absorbs carbon dioxide from flue gas in a packed column. "
    "The rich solvent is regenerated by steam stripping, and that reboiler heat duty is the "
    "dominant energy penalty of post-combustion capture.",
    "Power transformers age mainly through thermal degradation of cellulose insulation. "
    "Dissolved gas analysis of the insulating oil detects partial discharge, arcing and "
    "overheating before they develop into failures.",
    "Demand response programmes pay industrial and residential consumers to shift or curtail "
    "load during peak periods. Aggregators pool many small flexible loads so they can bid into "
    "capacity and balancing markets alongside conventional generators.",
    "Geothermal power plants extract heat from hot brine or steam reservoirs. Binary cycle "
    "plants pass moderate temperature brine through a heat exchanger to vaporise an organic "
    "working fluid, which then drives a turbine in a closed loop.",
    "Pumped hydro storage moves water between an upper and a lower reservoir. It provides bulk "
    "energy shifting, spinning reserve and black-start capability with round-trip efficiency "
    "typically between seventy and eighty percent.",
    "High-voltage direct current links transmit bulk power over long distances with lower "
    "losses than alternating current lines. Voltage source converters allow independent "
    "control of active and reactive power and can connect weak grids or offshore wind farms.",
]

# One-word edits that keep a paraphrase within the dedup radius.
PLANTED = [
    (0, "slows", "damps"),
    (2, "track", "follow"),
    (5, "adjusts", "tunes"),
    (9, "dominant", "main"),
    (13, "moves", "pumps"),
]

SUBDOMAINS = [
    "power_systems", "renewables", "storage", "renewables", "hydrogen", "oil_gas", "nuclear",
    "markets", "heating", "ccus", "power_systems", "markets", "geothermal", "storage",
    "power_systems",
]


def dedup_corpus():
    docs = []
    for i, text in enumerate(PARAGRAPHS):
        docs.append({"id": f"doc-{i:02d}", "source": "OAP", "subdomain": SUBDOMAINS[i],
                     "text": text, "token_count": len(text.split()), "meta": {}})
    for k, (i, old, new) in enumerate(PLANTED):
        text = PARAGRAPHS[i].replace(old, new, 1)
        assert text != PARAGRAPHS[i]
        docs.append({"id": f"doc-{i:02d}-para", "source": "OAP", "subdomain": SUBDOMAINS[i],
                     "text": text, "token_count": len(text.split()), "meta": {}})
    write_jsonl(ROOT / "dedup" / "corpus.jsonl", docs)


def docs_tree():
    d = ROOT / "docs"
    write(d / "power_systems" / "grid_frequency.md",
          "# Frequency control\n\n"
          + PARAGRAPHS[0] + "\n\n"
          "![](figures/frequency_nadir.png)\n"
          "Figure 1: Frequency nadir after a 1 GW generation loss.\n\n"
          "The swing equation \\( 2H \\frac{d\\Delta f}{dt} = \\Delta P_m - \\Delta P_e \\) links the rate of "
          "change of frequency to the power imbalance \\cite[p. 128]{kundur1994}.\n\n"
          "<table><tr><th>Reserve</th><th>Activation</th></tr>"
          "<tr><td>Primary</td><td>0-30 s</td></tr>"
          "<tr><td>Secondary</td><td>30 s-15 min</td></tr></table>\n")
    write(d / "power_systems" / "grid_frequency.md.meta.json",
          json.dumps({"title": "Frequency control", "bibliography": {"kundur1994": "128"}},
                     indent=2) + "\n")
    write(d / "power_systems" / "grid_frequency_mirror.md",
          "# Frequency control\n\n"
          + PARAGRAPHS[0].replace("slows", "damps") + "\n\n"
          "![](figures/frequency_nadir.png)\n"
          "Figure 1: Frequency nadir after a 1 GW generation loss.\n\n"
          "The swing equation \\( 2H \\frac{d\\Delta f}{dt} = \\Delta P_m - \\Delta P_e \\) links the rate of "
          "change of frequency to the power imbalance \\cite[p. 128]{kundur1994}.\n\n"
          "<table><tr><th>Reserve</th><th>Activation</th></tr>"
          "<tr><td>Primary</td><td>0-30 s</td></tr>"
          "<tr><td>Secondary</td><td>30 s-15 min</td></tr></table>\n")
    write(d / "renewables" / "solar_pv.md",
          "# PV yield\n\n" + PARAGRAPHS[1] + "\n\n"
          "![Cell temperature rises with irradiance](figures/cell_temp.png)\n\n"
          "Module power follows\n\n"
          "\\[ P = P_{STC} \\frac{G}{1000} \\left(1 + \\gamma (T_c - 25)\\right) \\]\n\n"
          "Site\tIrradiance (kWh/m2)\tYield (kWh/kWp)\n"
          "Seville\t2010\t1650\n"
          "Munich\t1180\t1020\n")
    write(d / "renewables" / "wind_turbines.txt", PARAGRAPHS[3] + "\n")
    write(d / "storage" / "batteries.md",
          "# Cell ageing\n\n" + PARAGRAPHS[2] + "\n\n"
          "\\begin{equation}\nQ_{loss} = A \\exp\\left(-\\frac{E_a}{R T}\\right) t^{z}\n\\end{equation}\n\n"
          "Calendar ageing models follow this form [@wang2011; @schmalstieg2014].\n")
    write(d / "hydrogen" / "electrolysis.md",
          "# PEM electrolysis\n\n" + PARAGRAPHS[4] + "\n\n"
          "<img src=\"data:image/png;base64,iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8z8BQDwAEhQGAhKmMIQAAAABJRU5ErkJggg==\" alt=\"\">\n\n"
          "```python\n# code fences are left alone: $x$ \\cite{none}\nprint('stack voltage')\n```\n")
    write(d / "nuclear" / "smr.md", "# Small modular reactors\n\n" + PARAGRAPHS[6] + "\n")
    write(d / "markets" / "clearing.md", "# Market clearing\n\n" + PARAGRAPHS[7] + "\n")
    write(d / "markets" / "contact_list.md",
          "# Trading desk contacts\n\n"
          "Desk lead: alice.trader@example.com, +44 20 7946 0958\n"
          "Backup: bob.settle@example.com, (212) 555-0147\n"
          "Night shift: carol.ops@example.org, +1 415 555 0199\n")
    write(d / "markets" / "sabotage.md",
          "# Forum scrape\n\nA post explained how to make a bomb from fertiliser near a substation. "
          "This text must never reach the corpus.\n")
    write(d / "misc" / "garbled.txt",
          "%%$#@!~~^^&&**(()){{}}[[]]<<>>||\\\\//??.,;:'\"`~ ###$$$%%%^^^&&&***((()))\n" * 4)
    write(d / "misc" / "scan_nul.md", b"# Scanned page\n\n\x00\x00\x01binary payload\x00\n")
    write(d / "misc" / "legacy_latin1.txt", "Caf\u00e9 heat demand survey\n".encode("latin-1"))


def citation_graph(seed=7):
    rng = random.Random(seed)
    nodes = [f"P{i:03d}" for i in range(80)]
    core_a, core_b = nodes[:8], nodes[8:16]
    edges = set()
    for citer in nodes[16:48]:
        for c in rng.sample(core_a, rng.randint(5, 7)):
            edges.add((citer, c))
    for citer in nodes[48:80]:
        for c in rng.sample(core_b, rng.randint(5, 7)):
            edges.add((citer, c))
    # Background citations among the periphery.
    for _ in range(60):
        a, b = rng.sample(nodes[16:], 2)
        edges.add((a, b))
    rows = [{"node": n} for n in nodes]
    rows += [{"citer": a, "cited": b} for a, b in sorted(edges)]
    write_jsonl(ROOT / "graph.jsonl", rows)


TASK_SAMPLES = [
    ("FV", "Decide whether the claim is supported by the passage.",
     "Claim: pumped hydro has no role in black start.", "Not supported. Pumped hydro units are commonly used for black start."),
    ("Res", "Explain the reasoning step by step.",
     "Why does a transformer's load rating drop in hot weather?",
     "Cooling depends on the temperature gap to ambient air, so hot weather reduces the heat that can be shed and the rating falls."),
    ("NER", "List the energy technologies mentioned.",
     "The utility paired a 50 MW PV plant with a 20 MWh lithium-ion battery and an HVDC link.",
     "PV plant; lithium-ion battery; HVDC link"),
    ("Sum", "Summarise the paragraph in one sentence.", PARAGRAPHS[8],
     "District heating moves heat from central sources to buildings, and lower supply temperatures cut losses."),
    ("WS", "Write a short paragraph for a general audience.", "Topic: demand response",
     "Demand response pays people and businesses to use less power at peak times, which keeps the grid stable without building new plants."),
    ("QA", "Answer the question.", "What limits post-combustion carbon capture efficiency?",
     "The steam needed to regenerate the amine solvent."),
    ("TC", "Classify the text into one energy subdomain.", PARAGRAPHS[12], "geothermal"),
    ("Exp", "Explain the concept.", "Locational marginal price",
     "The cost of serving one more megawatt-hour at a specific node, including energy, congestion and losses."),
    ("ESM", "Write a model formulation.", "Economic dispatch of two thermal units",
     "minimise c1*p1 + c2*p2 subject to p1 + p2 = D, pmin_i <= p_i <= pmax_i"),
    ("SC", "Choose the correct option.", "Which gas signals arcing in transformer oil? A) acetylene B) nitrogen",
     "A"),
    ("MC", "Choose all correct options.", "Which help frequency stability? A) inertia B) governor response C) tap changers",
     "A, B"),
]


def instruction_samples():
    rows = []
    for k in range(2):
        for i, (task, instruction, inp, out) in enumerate(TASK_SAMPLES):
            rows.append({"id": f"s-{task}-{k}", "instruction": instruction, "input": inp,
                         "output": out if k == 0 else out + " See the literature for detail.",
                         "task": task, "subdomain": SUBDOMAINS[i % len(SUBDOMAINS)],
                         "provenance": "agent_generated"})
    write_jsonl(ROOT / "samples.jsonl", rows)


QUESTIONS = [
    ("q-01", "Why do inverter-based resources reduce system inertia?", "power_systems"),
    ("q-02", "How does temperature affect lithium-ion cycle life?", "storage"),
    ("q-03", "What drives the levelised cost of green hydrogen?", "hydrogen"),
    ("q-04", "When is a binary cycle preferred for geothermal plants?", "geothermal"),
    ("q-05", "How do financial transmission rights hedge congestion?", "markets"),
    ("q-06", "What are the main failure modes of power transformers?", "power_systems"),
    ("q-07", "Why does wind turbine output follow a cubic law below rated speed?", "renewables"),
    ("q-08", "What is the round-trip efficiency of pumped hydro storage?", "storage"),
]


def rlhf_fixtures(seed=11):
    rng = random.Random(seed)
    write_jsonl(ROOT / "questions.jsonl",
                [{"id": q, "question": t, "subdomain": s} for q, t, s in QUESTIONS])
    tiers = ["Expert", "WriteLikeHuman", "StrongModel", "WeakModel"]
    sets = []
    for q, t, _ in QUESTIONS[:6]:
        sets.append({"question_id": q, "question": t, "tiered_answers": [
            {"tier": tier, "text": f"{tier} answer to {q}: " + rng.choice(PARAGRAPHS)[:120]}
            for tier in tiers]})
    write_jsonl(ROOT / "ranked_sets.jsonl", sets)
    cands = []
    for q, t, _ in QUESTIONS:
        pool = rng.sample(PARAGRAPHS, 5)
        cands.append({"question_id": q, "question": t,
                      "candidates": [f"Candidate {j} for {q}. " + p for j, p in enumerate(pool)]})
    write_jsonl(ROOT / "candidates.jsonl", cands)


def bench_fixtures():
    items = [
        {"id": "sc-1", "kind": "SingleChoice", "stem": "Which gas indicates arcing in transformer oil?",
         "options": [{"label": "A", "text": "Acetylene"}, {"label": "B", "text": "Nitrogen"},
                     {"label": "C", "text": "Argon"}, {"label": "D", "text": "Helium"}], "gold": ["A"]},
        {"id": "sc-2", "kind": "SingleChoice", "stem": "Nominal grid frequency in Europe?",
         "options": [{"label": "A", "text": "60 Hz"}, {"label": "B", "text": "50 Hz"},
                     {"label": "C", "text": "400 Hz"}, {"label": "D", "text": "16.7 Hz"}], "gold": ["B"]},
        {"id": "sc-3", "kind": "SingleChoice", "stem": "Which storage has the largest installed capacity worldwide?",
         "options": [{"label": "A", "text": "Flywheels"}, {"label": "B", "text": "Lithium-ion"},
                     {"label": "C", "text": "Pumped hydro"}, {"label": "D", "text": "Compressed air"}], "gold": ["C"]},
        {"id": "sc-4", "kind": "SingleChoice", "stem": "PV module efficiency as cell temperature rises:",
         "options": [{"label": "A", "text": "increases"}, {"label": "B", "text": "decreases"},
                     {"label": "C", "text": "is unchanged"}, {"label": "D", "text": "oscillates"}], "gold": ["B"]},
        {"id": "mc-1", "kind": "MultipleChoice", "stem": "Which provide frequency support?",
         "options": [{"label": "A", "text": "Inertia"}, {"label": "B", "text": "Governor response"},
                     {"label": "C", "text": "Tap changers"}, {"label": "D", "text": "Fast frequency response"}],
         "gold": ["A", "B", "D"]},
        {"id": "mc-2", "kind": "MultipleChoice", "stem": "Which are lithium-ion ageing mechanisms?",
         "options": [{"label": "A", "text": "SEI growth"}, {"label": "B", "text": "Lithium plating"},
                     {"label": "C", "text": "Sulfation"}, {"label": "D", "text": "Electrolyte freezing"}],
         "gold": ["A", "B"]},
        {"id": "mc-3", "kind": "MultipleChoice", "stem": "Which are renewable sources?",
         "options": [{"label": "A", "text": "Wind"}, {"label": "B", "text": "Coal"},
                     {"label": "C", "text": "Geothermal"}, {"label": "D", "text": "Solar"}],
         "gold": ["A", "C", "D"]},
        {"id": "fc-1", "kind": "FactCheck", "stem": "HVDC links have lower losses than AC over long distances.", "gold": True},
        {"id": "fc-2", "kind": "FactCheck", "stem": "Pumped hydro cannot provide black start.", "gold": False},
        {"id": "fc-3", "kind": "FactCheck", "stem": "Binary cycle plants use an organic working fluid.", "gold": True},
        {"id": "qa-1", "kind": "QA", "stem": "What limits post-combustion capture efficiency?",
         "gold": "The reboiler heat needed to regenerate the solvent."},
        {"id": "qa-2", "kind": "QA", "stem": "Why do SMRs use passive safety?",
         "gold": "To remove decay heat without operator action or external power."},
        {"id": "exp-1", "kind": "Explanation", "stem": "Explain locational marginal pricing.",
         "gold": "Price of serving an extra MWh at a node, including congestion and losses."},
        {"id": "esm-1", "kind": "ESM", "stem": "Formulate economic dispatch for two units.",
         "gold": "min c1 p1 + c2 p2 s.t. p1 + p2 = D and unit limits."},
    ]
    answers = [
        {"item_id": "sc-1", "answer": "A"},
        {"item_id": "sc-2", "answer": "B"},
        {"item_id": "sc-3", "answer": "B"},
        {"item_id": "sc-4", "answer": "E"},
        {"item_id": "mc-1", "answer": ["A", "B", "D"]},
        {"item_id": "mc-2", "answer": "A"},
        {"item_id": "mc-3", "answer": "A, B"},
        {"item_id": "fc-1", "answer": "true"},
        {"item_id": "fc-2", "answer": "yes"},
        {"item_id": "fc-3", "answer": "maybe"},
        {"item_id": "qa-1", "answer": "Mostly the steam used to strip the solvent."},
        {"item_id": "qa-2", "answer": "So the reactor cools itself after shutdown."},
        {"item_id": "exp-1", "answer": "It is the marginal cost of energy at a location."},
        {"item_id": "esm-1", "answer": "Minimise total cost subject to balance and limits."},
    ]
    write_jsonl(ROOT / "bench" / "items.jsonl", items)
    write_jsonl(ROOT / "bench" / "answers.jsonl", answers)


if __name__ == "__main__":
    dedup_corpus()
    docs_tree()
    citation_graph()
    instruction_samples()
    rlhf_fixtures()
    bench_fixtures()
