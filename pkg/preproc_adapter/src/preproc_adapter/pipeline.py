"""The preprocessing run: read text, parse, embed, sample, emit."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .config import AdapterConfig
from .embed import make_embedder
from .emit import atomic_write, conllu_text, embedding_text, samples_text
from .errors import AdapterError
from .parsers import Parse, make_parser, tokenize

log = logging.getLogger("preproc_adapter")


@dataclass
class Report:
    sentences_read: int = 0
    sentences_kept: int = 0
    sentences_skipped: int = 0
    tokens: int = 0
    vocabulary: int = 0
    samples: dict[str, int] = field(default_factory=dict)


def read_sentences(paths: list[str]) -> list[str]:
    """One sentence per non-blank line, in file order."""
    out: list[str] = []
    for path in paths:
        try:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        out.append(line)
        except OSError as exc:
            raise AdapterError(f"cannot read input {path}: {exc}") from None
    return out


def preprocess(config: AdapterConfig) -> Report:
    """Run the full conversion described by `config`.

    Emits the parsed corpus, a sentence-embedding table keyed by sent_id,
    a word-embedding table over the corpus vocabulary, and (when requested)
    per-verb sample sentences.  Sentences longer than max_tokens are skipped
    with a log line; sentences without any target verb stay in the corpus
    but never appear in the samples.
    """
    config.validate()
    parser = make_parser(config.parser, extra_verbs=config.verbs, model=config.model)
    embedder = make_embedder(config.embedder, dim=config.dim, seed=config.seed, model=config.model)

    report = Report()
    parsed: list[tuple[str, Parse]] = []
    for raw in read_sentences(config.inputs):
        report.sentences_read += 1
        if len(tokenize(raw)) > config.max_tokens:
            report.sentences_skipped += 1
            log.warning("skipping sentence over %d tokens: %.60s...", config.max_tokens, raw)
            continue
        parse = parser.parse(raw)
        if not parse.tokens:
            report.sentences_skipped += 1
            continue
        sent_id = f"s{len(parsed) + 1:04d}"
        parsed.append((sent_id, parse))
    report.sentences_kept = len(parsed)
    report.tokens = sum(len(p.tokens) for _, p in parsed)

    # vocabulary covers both surface forms and lemmas so downstream lookups
    # succeed whichever identity the consumer keys on
    vocab: set[str] = set()
    for _, parse in parsed:
        for t in parse.tokens:
            vocab.add(t.form.lower())
            if t.lemma:
                vocab.add(t.lemma)
    report.vocabulary = len(vocab)

    sentence_rows = [
        (sent_id, embedder.sentence_vector([t.form for t in parse.tokens]))
        for sent_id, parse in parsed
    ]
    word_rows = [(word, embedder.word_vector(word)) for word in sorted(vocab)]

    verbs = [v.lower() for v in config.verbs]
    samples: dict[str, list[dict[str, str]]] = {v: [] for v in verbs}
    for sent_id, parse in parsed:
        words = {t.lemma or t.form.lower() for t in parse.tokens}
        words.update(t.form.lower() for t in parse.tokens)
        for verb in verbs:
            if verb in words and len(samples[verb]) < config.sample_cap:
                samples[verb].append({"sent_id": sent_id, "text": parse.text})
    report.samples = {v: len(rows) for v, rows in samples.items()}

    atomic_write(config.corpus_out, conllu_text(parsed))
    atomic_write(config.sentence_vectors_out, embedding_text(embedder.dim, sentence_rows))
    atomic_write(config.word_vectors_out, embedding_text(embedder.dim, word_rows))
    if config.samples_out:
        atomic_write(config.samples_out, samples_text(samples))
    return report
