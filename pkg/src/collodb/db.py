"""Collostruction database: an on-disk JSON document per verb.

The file layout is a single UTF-8 JSON document with a schema version, a
build manifest, and one entry per verb holding its sampled instance count
and collostruction records.  Serialization is canonical (sorted keys,
fixed indentation, raw unicode) so identical databases are byte-identical.
The JSON schema ships in docs/database.schema.json.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .colgen import Collexeme, Collostruction, Edge, Slot, SlotKey, validate_collostruction
from .errors import InputError, InvariantError, ValidationError

SCHEMA_VERSION = "1"


@dataclass
class VerbEntry:
    verb: str
    total_instances: int
    collostructions: list[Collostruction]


@dataclass
class Database:
    verbs: dict[str, VerbEntry] = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)

    def add_verb(self, verb: str, total_instances: int, collostructions: list[Collostruction]) -> None:
        if verb in self.verbs:
            raise ValidationError(f"verb {verb!r} already present")
        self.verbs[verb] = VerbEntry(verb, total_instances, collostructions)
        self._assign_ids()

    def _assign_ids(self) -> None:
        next_id = 0
        for verb in sorted(self.verbs):
            for colo in self.verbs[verb].collostructions:
                colo.colo_id = next_id
                next_id += 1

    def all_collostructions(self) -> list[Collostruction]:
        out = []
        for verb in sorted(self.verbs):
            out.extend(self.verbs[verb].collostructions)
        return out

    def by_id(self, colo_id: int) -> Collostruction:
        for colo in self.all_collostructions():
            if colo.colo_id == colo_id:
                return colo
        raise InputError(f"no collostruction with id {colo_id}")


def _slot_to_doc(slot: Slot) -> dict:
    return {
        "key": str(slot.key),
        "collexemes": [[c.word, c.count, c.p_lex] for c in slot.collexemes],
        "head_words": slot.head_words,
    }


def _colo_to_doc(colo: Collostruction) -> dict:
    return {
        "id": colo.colo_id,
        "sense_cluster_id": colo.sense_cluster_id,
        "stage": colo.stage,
        "p_col": colo.p_col,
        "support": colo.support,
        "score": colo.score,
        "slots": [_slot_to_doc(s) for s in colo.slots],
        "edges": [[str(e.dependent), str(e.head), e.deprel, e.p_slot] for e in colo.edges],
        "example_sent_ids": colo.example_sent_ids,
    }


def _colo_from_doc(verb: str, doc: dict) -> Collostruction:
    slots = [
        Slot(
            key=SlotKey.parse(s["key"]),
            collexemes=[Collexeme(w, int(n), float(p)) for w, n, p in s["collexemes"]],
            head_words=list(s.get("head_words", [])),
        )
        for s in doc["slots"]
    ]
    edges = [
        Edge(SlotKey.parse(d), SlotKey.parse(h), r, float(p)) for d, h, r, p in doc["edges"]
    ]
    return Collostruction(
        verb=verb,
        sense_cluster_id=int(doc["sense_cluster_id"]),
        stage=doc["stage"],
        p_col=float(doc["p_col"]),
        support=int(doc["support"]),
        slots=slots,
        edges=edges,
        example_sent_ids=list(doc["example_sent_ids"]),
        score=float(doc.get("score", 0.0)),
        colo_id=int(doc["id"]),
    )


def save_database(db: Database, path: str) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "manifest": db.manifest,
        "verbs": [
            {
                "verb": verb,
                "total_instances": db.verbs[verb].total_instances,
                "collostructions": [_colo_to_doc(c) for c in db.verbs[verb].collostructions],
            }
            for verb in sorted(db.verbs)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, sort_keys=True, indent=1)
        fh.write("\n")


def load_database(path: str) -> Database:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "verbs" not in doc:
        raise InputError(f"{path}: not a collostruction database document")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError(
            f"{path}: schema_version {doc.get('schema_version')!r} unsupported "
            f"(expected {SCHEMA_VERSION!r})"
        )
    db = Database(manifest=doc.get("manifest", {}))
    try:
        for entry in doc["verbs"]:
            verb = entry["verb"]
            colos = [_colo_from_doc(verb, c) for c in entry["collostructions"]]
            db.verbs[verb] = VerbEntry(verb, int(entry["total_instances"]), colos)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed database record: {exc!r}") from None
    validate_database(db)
    return db


def validate_database(db: Database) -> None:
    """Every record passes the collostruction validator; per-verb mass <= 1."""
    seen_ids: set[int] = set()
    for verb in sorted(db.verbs):
        entry = db.verbs[verb]
        mass = 0.0
        for colo in entry.collostructions:
            if colo.verb != verb:
                raise InvariantError(f"collostruction under {verb!r} claims verb {colo.verb!r}")
            if colo.colo_id in seen_ids:
                raise InvariantError(f"duplicate collostruction id {colo.colo_id}")
            seen_ids.add(colo.colo_id)
            if colo.support > entry.total_instances:
                raise InvariantError(
                    f"{verb}: cluster support {colo.support} exceeds "
                    f"total instances {entry.total_instances}"
                )
            validate_collostruction(colo)
            mass += colo.p_col
        if mass > 1.0 + 1e-9:
            raise InvariantError(f"{verb}: collostruction probabilities sum to {mass} > 1")


def query(
    db: Database,
    verb: str,
    deprel: str | None = None,
    collexeme: str | None = None,
) -> list[Collostruction]:
    """Collostructions of a verb, most probable first, optionally filtered.

    `deprel` keeps records with a slot of that relation; `collexeme`
    keeps records where some collexeme contains the given substring.
    """
    if verb not in db.verbs:
        raise InputError(f"unknown verb {verb!r}")
    out = []
    for colo in db.verbs[verb].collostructions:
        if deprel is not None and not any(s.key.deprel == deprel for s in colo.slots):
            continue
        if collexeme is not None and not any(
            collexeme in c.word for s in colo.slots for c in s.collexemes
        ):
            continue
        out.append(colo)
    out.sort(key=lambda c: (-c.p_col, c.colo_id))
    return out
