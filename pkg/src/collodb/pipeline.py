"""End-to-end mining: sample instances, split senses, cluster usages, emit the database.

The flow per verb is: collect one instance per sentence, cap the sample,
group instances into sense clusters by sentence embedding, and within
each kept sense run density clustering over clause structures twice
(first with word semantics, then relation-only over the leftovers).
Every dense cluster becomes one collostruction.  Identical inputs, seed
and config give a byte-identical database; the manifest records the
config fingerprint and all counts, never wall-clock state.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .clause import DEFAULT_VERB_POS, ClauseStructure, is_verb, retrieve_clause
from .colgen import Collostruction, generate_collostruction
from .db import SCHEMA_VERSION, Database
from .depcluster import (
    SimilarityParams,
    depcluster_dbscan,
    embedding_word_sim,
    hashing_word_sim,
)
from .errors import ConfigError, InputError, InvariantError
from .ingest import DependencyTree, EmbeddingStore, fallback_embed, load_embeddings, parse_conllu
from .sense import cluster_sentences

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    """Flat mining configuration; every field maps to one config-file key."""

    corpus: str = ""
    sentence_embeddings: str = ""  # optional; empty means derive from text
    word_embeddings: str = ""  # optional; empty means hashed word vectors
    verbs: tuple[str, ...] = ()  # empty means mine every verb found
    max_instances: int = 40000
    seed: int = 13
    sense_threshold: float = 0.5
    min_cluster_size: int = 5
    min_pts: int = 3
    alpha: float = 0.5
    beta: float = 0.5
    alpha_w: float = 0.5
    beta_w: float = 0.5
    sim_floor: float = 0.05
    strength_mode: str = "conditional"
    exhaustive_paths: bool = False
    embedding_dim: int = 64
    use_lemma: bool = True
    verb_pos: tuple[str, ...] = tuple(sorted(DEFAULT_VERB_POS))
    jobs: int = 1

    def __post_init__(self):
        if self.max_instances < 1:
            raise ConfigError(f"max_instances must be positive, got {self.max_instances}")
        if self.min_cluster_size < 1:
            raise ConfigError(f"min_cluster_size must be positive, got {self.min_cluster_size}")
        if self.min_pts < 1:
            raise ConfigError(f"min_pts must be positive, got {self.min_pts}")
        if not 0.0 < self.sense_threshold <= 1.0:
            raise ConfigError(f"sense_threshold must be in (0, 1], got {self.sense_threshold}")
        if self.strength_mode not in ("conditional", "literal"):
            raise ConfigError(f"unknown strength_mode {self.strength_mode!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be positive, got {self.jobs}")
        if not self.verb_pos:
            raise ConfigError("verb_pos must name at least one part-of-speech tag")

    def similarity_params(self, mode: str) -> SimilarityParams:
        return SimilarityParams(
            alpha=self.alpha,
            beta=self.beta,
            alpha_w=self.alpha_w,
            beta_w=self.beta_w,
            mode=mode,
            sim_floor=self.sim_floor,
        )


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def parse_config_file(path: str) -> dict[str, str]:
    """Read `key = value` lines; `#` starts a comment, blanks are skipped."""
    raw: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                stripped = line.split("#", 1)[0].strip()
                if not stripped:
                    continue
                if "=" not in stripped:
                    raise ConfigError(f"{path}:{line_no}: expected key = value, got {stripped!r}")
                key, value = stripped.split("=", 1)
                key = key.strip()
                if key in raw:
                    raise ConfigError(f"{path}:{line_no}: duplicate key {key!r}")
                raw[key] = value.strip()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    return raw


def config_from_mapping(
    raw: dict[str, str], base: PipelineConfig | None = None
) -> PipelineConfig:
    """Apply string key/value overrides to a config, coercing by field type."""
    base = base if base is not None else PipelineConfig()
    by_name = {f.name: f for f in fields(PipelineConfig)}
    updates = {}
    for key, value in raw.items():
        if key not in by_name:
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(base, key)
        if isinstance(current, bool):
            low = value.lower()
            if low not in _BOOL_WORDS:
                raise ConfigError(f"config key {key!r}: expected a boolean, got {value!r}")
            updates[key] = _BOOL_WORDS[low]
        elif isinstance(current, int):
            try:
                updates[key] = int(value)
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: expected an integer, got {value!r}") from exc
        elif isinstance(current, float):
            try:
                updates[key] = float(value)
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: expected a number, got {value!r}") from exc
        elif isinstance(current, tuple):
            parts = [p.strip() for p in value.split(",") if p.strip()]
            updates[key] = tuple(parts)
        else:
            updates[key] = value
    return replace(base, **updates)


def config_document(config: PipelineConfig) -> dict:
    """Config as recorded in the manifest.

    `jobs` only affects execution, never results, so it is left out; the
    same mine at any parallelism yields the same bytes.
    """
    doc = asdict(config)
    del doc["jobs"]
    return doc


def config_fingerprint(config: PipelineConfig) -> str:
    canonical = json.dumps(config_document(config), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class VerbInstance:
    sent_id: str
    target_id: int


def collect_instances(
    trees: list[DependencyTree], config: PipelineConfig
) -> dict[str, list[VerbInstance]]:
    """One instance per (sentence, verb): the first predicate occurrence.

    With an explicit verb list only those verbs are kept; otherwise every
    verb-tagged word found in the corpus gets an entry.
    """
    wanted = set(config.verbs)
    pos = frozenset(config.verb_pos)
    out: dict[str, list[VerbInstance]] = {v: [] for v in sorted(wanted)}
    for tree in trees:
        seen: set[str] = set()
        for tok in tree.tokens:
            if not is_verb(tok, pos):
                continue
            word = tok.word if config.use_lemma else tok.form
            if word in seen:
                continue
            seen.add(word)
            if wanted and word not in wanted:
                continue
            out.setdefault(word, []).append(VerbInstance(tree.sent_id, tok.id))
    return out


def sample_instances(
    instances: list[VerbInstance], cap: int, seed: int, verb: str
) -> list[VerbInstance]:
    """Reservoir sample to at most `cap`, then sort for stable downstream order.

    The RNG is keyed on (seed, verb) so adding a verb to the config does
    not disturb another verb's sample.
    """
    if len(instances) > cap:
        digest = hashlib.blake2b(
            verb.encode("utf-8"), digest_size=8, key=str(seed).encode("utf-8")
        ).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        kept = list(instances[:cap])
        for i in range(cap, len(instances)):
            j = int(rng.integers(0, i + 1))
            if j < cap:
                kept[j] = instances[i]
    else:
        kept = list(instances)
    kept.sort(key=lambda inst: (inst.sent_id, inst.target_id))
    return kept


def sentence_vector(
    tree: DependencyTree, store: EmbeddingStore | None, dim: int, seed: int
) -> np.ndarray:
    if store is not None:
        vec = store.get(tree.sent_id)
        if vec is None:
            raise InputError(f"no sentence embedding for {tree.sent_id!r}")
        return vec
    text = tree.text or " ".join(tok.form for tok in tree.tokens)
    return fallback_embed(text, dim=dim, seed=seed)


def mine_verb(
    verb: str,
    instances: list[VerbInstance],
    trees_by_id: dict[str, DependencyTree],
    sent_vecs: dict[str, np.ndarray],
    word_store: EmbeddingStore | None,
    config: PipelineConfig,
) -> tuple[str, int, list[Collostruction], dict]:
    """Mine one verb.  Module-level so worker processes can import it."""
    total = len(instances)
    if total == 0:
        report = {"sampled": 0, "kept_sense_sizes": [], "discarded": 0, "collostructions": 0}
        return verb, 0, [], report

    items = [(inst.sent_id, sent_vecs[inst.sent_id]) for inst in instances]
    senses = cluster_sentences(items, config.sense_threshold)
    target_by_sent = {inst.sent_id: inst.target_id for inst in instances}
    if word_store is not None:
        word_sim = embedding_word_sim(word_store)
    else:
        word_sim = hashing_word_sim(config.embedding_dim, config.seed)
    params_synsem = config.similarity_params("synsem")
    params_syntactic = config.similarity_params("syntactic")
    pos = frozenset(config.verb_pos)

    colos: list[Collostruction] = []
    kept_sizes: list[int] = []
    discarded = 0
    for sense in senses:
        if sense.size < config.min_cluster_size:
            discarded += sense.size
            continue
        kept_sizes.append(sense.size)
        clauses = [
            retrieve_clause(
                trees_by_id[sid], target_by_sent[sid], verb_pos=pos, use_lemma=config.use_lemma
            )
            for sid in sense.sent_ids
        ]
        first = depcluster_dbscan(clauses, params_synsem, word_sim, config.min_pts)
        stages: list[tuple[str, list[ClauseStructure], list[list[int]]]] = [
            ("synsem", clauses, first.clusters)
        ]
        leftovers = [clauses[i] for i in first.outliers]
        if leftovers:
            second = depcluster_dbscan(leftovers, params_syntactic, word_sim, config.min_pts)
            stages.append(("syntactic", leftovers, second.clusters))
        for stage, pool, groups in stages:
            for group in groups:
                colo = generate_collostruction(
                    [pool[i] for i in group],
                    verb,
                    total,
                    sense_cluster_id=sense.cluster_id,
                    stage=stage,
                    strength_mode=config.strength_mode,
                    exhaustive_paths=config.exhaustive_paths,
                )
                if colo is not None:
                    colos.append(colo)

    if sum(kept_sizes) + discarded != total:
        raise InvariantError(
            f"verb {verb!r}: sense sizes {sum(kept_sizes)} + discarded {discarded} != {total}"
        )
    report = {
        "sampled": total,
        "kept_sense_sizes": kept_sizes,
        "discarded": discarded,
        "collostructions": len(colos),
    }
    return verb, total, colos, report


def _mine_task(args) -> tuple[str, int, list[Collostruction], dict]:
    return mine_verb(*args)


def run_mine(config: PipelineConfig) -> Database:
    """Execute the full mining flow and return the assembled database."""
    if not config.corpus:
        raise ConfigError("config key 'corpus' is required")
    try:
        trees = parse_conllu(config.corpus)
    except OSError as exc:
        raise InputError(f"cannot read corpus {config.corpus}: {exc}") from exc
    if not trees:
        raise InputError(f"corpus {config.corpus} contains no sentences")
    trees_by_id: dict[str, DependencyTree] = {}
    for tree in trees:
        if tree.sent_id in trees_by_id:
            raise InputError(f"duplicate sent_id {tree.sent_id!r} in corpus")
        trees_by_id[tree.sent_id] = tree

    sent_store = load_embeddings(config.sentence_embeddings) if config.sentence_embeddings else None
    word_store = load_embeddings(config.word_embeddings) if config.word_embeddings else None

    instances = collect_instances(trees, config)
    tasks = []
    for verb in sorted(instances):
        sampled = sample_instances(instances[verb], config.max_instances, config.seed, verb)
        vecs = {
            inst.sent_id: sentence_vector(
                trees_by_id[inst.sent_id], sent_store, config.embedding_dim, config.seed
            )
            for inst in sampled
        }
        subset = {inst.sent_id: trees_by_id[inst.sent_id] for inst in sampled}
        tasks.append((verb, sampled, subset, vecs, word_store, config))

    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_mine_task, tasks))
    else:
        results = [_mine_task(t) for t in tasks]

    db = Database()
    verb_reports = {}
    warnings = []
    for verb, total, colos, report in results:
        db.add_verb(verb, total, colos)
        verb_reports[verb] = report
        if total == 0:
            warnings.append(f"verb {verb!r} has no instances in the corpus")
        elif report["collostructions"] == 0:
            warnings.append(f"verb {verb!r} produced no collostructions")
    db.manifest = {
        "schema_version": SCHEMA_VERSION,
        "config": config_document(config),
        "config_sha256": config_fingerprint(config),
        "n_sentences": len(trees),
        "n_verbs": len(verb_reports),
        "verbs": verb_reports,
        "warnings": sorted(warnings),
    }
    log.info(
        "mined %d verbs from %d sentences (%d collostructions)",
        len(verb_reports),
        len(trees),
        sum(r["collostructions"] for r in verb_reports.values()),
    )
    return db
