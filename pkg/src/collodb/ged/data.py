"""Labeled verb-usage instances: file format and target-token resolution.

The dataset is JSON Lines: one object per instance with fields `text`,
optional `correction`, `verb`, `begin-offset`, `end-offset` (character
span of the verb inside `text`), and `label` (correct | error).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from ..errors import InputError, ParseError
from ..ingest import DependencyTree

log = logging.getLogger(__name__)

LABELS = ("correct", "error")


@dataclass(frozen=True)
class GedInstance:
    text: str
    verb: str
    begin: int
    end: int
    label: str
    correction: str | None = None


def load_ged_dataset(path: str) -> list[GedInstance]:
    instances: list[GedInstance] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc}", line_no) from None
            try:
                inst = GedInstance(
                    text=doc["text"],
                    verb=doc["verb"],
                    begin=int(doc["begin-offset"]),
                    end=int(doc["end-offset"]),
                    label=doc["label"],
                    correction=doc.get("correction"),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad instance record: {exc!r}", line_no) from None
            if inst.label not in LABELS:
                raise ParseError(f"label must be one of {LABELS}, got {inst.label!r}", line_no)
            if not 0 <= inst.begin < inst.end <= len(inst.text):
                raise ParseError(
                    f"offsets [{inst.begin}, {inst.end}) outside text of length {len(inst.text)}",
                    line_no,
                )
            instances.append(inst)
    return instances


def save_ged_dataset(instances: list[GedInstance], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            doc = {
                "text": inst.text,
                "verb": inst.verb,
                "begin-offset": inst.begin,
                "end-offset": inst.end,
                "label": inst.label,
            }
            if inst.correction is not None:
                doc["correction"] = inst.correction
            fh.write(json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n")


def _token_spans(tree: DependencyTree, text: str) -> dict[int, tuple[int, int]]:
    """Character span of each token inside `text`, by greedy left-to-right scan."""
    spans: dict[int, tuple[int, int]] = {}
    cursor = 0
    for token in tree.tokens:
        pos = text.find(token.form, cursor)
        if pos < 0:
            return {}  # tokenization does not line up with the raw text
        spans[token.id] = (pos, pos + len(token.form))
        cursor = pos + len(token.form)
    return spans


def resolve_target(tree: DependencyTree, instance: GedInstance) -> int:
    """Locate the instance's verb token in its parsed tree.

    Prefers an exact character-span match against the instance offsets;
    falls back to the first token whose form equals the annotated verb.
    """
    text = instance.text or tree.text
    if text:
        spans = _token_spans(tree, text)
        for tid, (b, e) in spans.items():
            if (b, e) == (instance.begin, instance.end):
                return tid
        for tid, (b, e) in spans.items():
            if b <= instance.begin < e and tree.token(tid).form == instance.verb:
                return tid
    matches = [t.id for t in tree.tokens if t.form == instance.verb or t.word == instance.verb]
    if matches:
        if text:
            log.warning(
                "%s: offsets [%d, %d) did not match a token; fell back to form lookup",
                tree.sent_id,
                instance.begin,
                instance.end,
            )
        return matches[0]
    raise InputError(
        f"{tree.sent_id}: cannot locate verb {instance.verb!r} at offsets "
        f"[{instance.begin}, {instance.end})"
    )
