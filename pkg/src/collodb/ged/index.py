"""Inverted indices over collostructions, and candidate retrieval.

Four pattern families are indexed per verb, all derived from the linear
slot order: (word, deprel) bigrams, word bigrams and unigrams, deprel
bigrams, and (word, deprel) unigrams.  The focus slot's relation label
gets a "-focus" suffix so focus adjacency patterns stay distinct.  A
query clause contributes the same pattern families computed over its
nodes; the top three candidates per family (most matching units, then
higher support, then lower id) are pooled into at most twelve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..clause import ClauseStructure
from ..colgen import FOCUS, Collostruction
from ..db import Database

CATEGORIES = ("word_dep_bigram", "word_grams", "dep_bigram", "word_dep_unigram")
TOP_PER_CATEGORY = 3

Unit = tuple


def _slot_words(colo: Collostruction, i: int) -> list[str]:
    return [c.word for c in colo.slots[i].collexemes]


def _slot_rel(colo: Collostruction, i: int) -> str:
    key = colo.slots[i].key
    return f"{key.deprel}-focus" if key.side == FOCUS else key.deprel


def collostruction_units(colo: Collostruction) -> dict[str, set[Unit]]:
    """Pattern units of one collostruction, per category."""
    n = len(colo.slots)
    rels = [_slot_rel(colo, i) for i in range(n)]
    words = [_slot_words(colo, i) for i in range(n)]
    units: dict[str, set[Unit]] = {c: set() for c in CATEGORIES}
    for i in range(n):
        for w in words[i]:
            units["word_grams"].add((w,))
            units["word_dep_unigram"].add((w, rels[i]))
    for i in range(n - 1):
        units["dep_bigram"].add((rels[i], rels[i + 1]))
        for wa in words[i]:
            for wb in words[i + 1]:
                units["word_grams"].add((wa, wb))
                units["word_dep_bigram"].add(((wa, rels[i]), (wb, rels[i + 1])))
    return units


def clause_units(clause: ClauseStructure) -> dict[str, set[Unit]]:
    """Pattern units of one clause, mirroring collostruction_units."""
    nodes = clause.nodes
    rels = [
        f"{n.deprel}-focus" if n.token_id == clause.target_id else n.deprel for n in nodes
    ]
    words = [n.dep_form for n in nodes]
    units: dict[str, set[Unit]] = {c: set() for c in CATEGORIES}
    for i in range(len(nodes)):
        units["word_grams"].add((words[i],))
        units["word_dep_unigram"].add((words[i], rels[i]))
    for i in range(len(nodes) - 1):
        units["dep_bigram"].add((rels[i], rels[i + 1]))
        units["word_grams"].add((words[i], words[i + 1]))
        units["word_dep_bigram"].add(((words[i], rels[i]), (words[i + 1], rels[i + 1])))
    return units


@dataclass
class CollostructionIndex:
    # verb -> category -> unit -> ids of collostructions containing it
    postings: dict[str, dict[str, dict[Unit, list[int]]]] = field(default_factory=dict)
    colos: dict[int, Collostruction] = field(default_factory=dict)

    def verbs(self) -> list[str]:
        return sorted(self.postings)


def build_index(db: Database) -> CollostructionIndex:
    index = CollostructionIndex()
    for colo in db.all_collostructions():
        index.colos[colo.colo_id] = colo
        verb_postings = index.postings.setdefault(
            colo.verb, {c: {} for c in CATEGORIES}
        )
        for category, units in collostruction_units(colo).items():
            for unit in units:
                verb_postings[category].setdefault(unit, []).append(colo.colo_id)
    for verb_postings in index.postings.values():
        for category in verb_postings:
            for ids in verb_postings[category].values():
                ids.sort()
    return index


def heuristic_search(
    clause: ClauseStructure, index: CollostructionIndex
) -> list[Collostruction]:
    """Candidate collostructions for a clause's verb, at most twelve.

    For each pattern family, candidates are ranked by number of matching
    units (ties: higher support, then lower id) and the top three kept;
    the four shortlists are pooled and deduplicated.  A verb absent from
    the index yields no candidates.
    """
    verb = clause.focus.dep_form
    if verb not in index.postings:
        return []
    verb_postings = index.postings[verb]
    query = clause_units(clause)
    chosen: list[int] = []
    for category in CATEGORIES:
        matches: dict[int, int] = {}
        for unit in query[category]:
            for colo_id in verb_postings[category].get(unit, ()):
                matches[colo_id] = matches.get(colo_id, 0) + 1
        ranked = sorted(
            matches.items(),
            key=lambda kv: (-kv[1], -index.colos[kv[0]].support, kv[0]),
        )
        for colo_id, _count in ranked[:TOP_PER_CATEGORY]:
            if colo_id not in chosen:
                chosen.append(colo_id)
    return [index.colos[colo_id] for colo_id in sorted(chosen)]
