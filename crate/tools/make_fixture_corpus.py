#!/usr/bin/env python3
"""Builds fixtures/corpus.jsonl with exact char offsets for the span records."""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "corpus.jsonl"


def span_record(rid, writer, parts):
    text = " ".join(p for p, _ in parts)
    spans = []
    cursor = 0
    for part, tactic in parts:
        start = text.index(part, cursor)
        end = start + len(part)
        spans.append({"start": start, "end": end, "tactic": tactic})
        cursor = end
    return {"id": rid, "writer": writer, "text": text, "spans": spans}


def seq_record(rid, writer, sequence, word_count=None):
    rec = {"id": rid, "writer": writer, "sequence": sequence}
    if word_count is not None:
        rec["word_count"] = word_count
    return rec


human = {"study": 1, "source": "human"}
model = {"study": 1, "source": "model-a"}

records = [
    span_record(
        "f01",
        human,
        [
            ("It sounds like the move left you drained.", "P"),
            ("Feeling homesick after a change this big is completely normal.", "V"),
            ("Maybe set up one corner of the flat the way your old room was?", "A"),
            ("The city runs free newcomer meetups every Thursday.", "I"),
            ("Missing home never means you made the wrong call.", "V"),
        ],
    ),
    seq_record("f02", human, "XPVEAIP", word_count=118),
    seq_record("f03", human, "QPV"),
    seq_record("f04", human, "PVA", word_count=47),
    seq_record("f05", human, "PVAV"),
    seq_record("f06", human, ""),
    seq_record("f07", model, "PAVAVA"),
    seq_record("f08", model, "VPAIRIA"),
    span_record(
        "f09",
        model,
        [
            ("Oh no, I'm so sorry 😢.", "X"),
            ("You are stronger than you give yourself credit for.", "E"),
            ("It sounds like your boss ignored months of your work.", "P"),
            ("Anyone would be furious about that.", "V"),
            ("Try writing down what you want to say before the meeting.", "A"),
        ],
    ),
    seq_record("f10", model, "PVXAIE", word_count=131),
    seq_record("f11", model, "AVA"),
    seq_record("f12", model, "PV"),
]

with OUT.open("w", encoding="utf-8") as fh:
    for rec in records:
        fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
print(f"wrote {OUT} ({len(records)} records)")
