"""Corpus and embedding ingestion.

Reads dependency-parsed sentences from CoNLL-U files, loads precomputed
embedding tables, and provides a deterministic hashing embedder used as a
fallback when no embedding file is supplied.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Token:
    """One syntactic word of a sentence."""

    id: int  # 1-based position
    form: str
    lemma: str
    pos: str  # universal POS tag
    head: int  # 0 for the root token
    deprel: str  # lower-cased dependency relation

    @property
    def word(self) -> str:
        """Lexical identity: lemma when annotated, surface form otherwise."""
        return self.lemma if self.lemma else self.form


@dataclass
class DependencyTree:
    """A parsed sentence: tokens in linear order plus sentence metadata."""

    sent_id: str
    tokens: list[Token]
    text: str = ""

    def __post_init__(self):
        self._by_id = {t.id: t for t in self.tokens}

    def token(self, token_id: int) -> Token:
        return self._by_id[token_id]

    def has_token(self, token_id: int) -> bool:
        return token_id in self._by_id

    def children(self, token_id: int) -> list[Token]:
        return [t for t in self.tokens if t.head == token_id]

    def governor(self, token_id: int) -> Token | None:
        head = self.token(token_id).head
        return self._by_id.get(head) if head != 0 else None

    @property
    def root(self) -> Token:
        return next(t for t in self.tokens if t.head == 0)


def _validate_tree(tree: DependencyTree) -> None:
    n = len(tree.tokens)
    ids = [t.id for t in tree.tokens]
    if ids != list(range(1, n + 1)):
        raise ValidationError(f"{tree.sent_id}: token ids must be contiguous from 1")
    roots = [t for t in tree.tokens if t.head == 0]
    if len(roots) != 1:
        raise ValidationError(f"{tree.sent_id}: expected exactly one root, found {len(roots)}")
    for t in tree.tokens:
        if t.head == t.id:
            raise ValidationError(f"{tree.sent_id}: token {t.id} heads itself (cycle)")
        if t.head < 0 or t.head > n:
            raise ValidationError(f"{tree.sent_id}: token {t.id} has head {t.head} outside sentence")
    # connectivity from the root implies acyclicity in a single-root graph
    seen = {roots[0].id}
    frontier = [roots[0].id]
    while frontier:
        nxt = [t.id for t in tree.tokens if t.head in frontier and t.id not in seen]
        seen.update(nxt)
        frontier = nxt
    if len(seen) != n:
        raise ValidationError(f"{tree.sent_id}: tree is not connected (cycle or orphan)")


def parse_conllu(path_or_text: str, *, is_text: bool = False) -> list[DependencyTree]:
    """Parse a CoNLL-U file (or raw text with is_text=True) into trees.

    Multiword-token and empty-node lines are skipped.  Every sentence is
    structurally validated: contiguous ids, a single root, acyclic and
    connected.  Dependency relations are lower-cased on read.
    """
    if is_text:
        lines = path_or_text.splitlines()
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            lines = fh.read().splitlines()

    trees: list[DependencyTree] = []
    tokens: list[Token] = []
    sent_id = ""
    text = ""

    def flush(line_no: int) -> None:
        nonlocal tokens, sent_id, text
        if not tokens:
            sent_id, text = "", ""
            return
        tree = DependencyTree(sent_id or f"s{len(trees) + 1}", tokens, text)
        _validate_tree(tree)
        trees.append(tree)
        tokens, sent_id, text = [], "", ""

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush(line_no)
            continue
        if line.startswith("#"):
            if tokens:
                raise ParseError("comment after token lines (missing blank line between sentences?)", line_no)
            body = line[1:].strip()
            if body.startswith("sent_id"):
                _, _, value = body.partition("=")
                sent_id = value.strip()
            elif body.startswith("text"):
                _, _, value = body.partition("=")
                text = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ParseError(f"expected 10 tab-separated columns, got {len(cols)}", line_no)
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            continue  # multiword token ranges and empty nodes carry no tree structure
        try:
            idx = int(tok_id)
            head = int(cols[6])
        except ValueError as exc:
            raise ParseError(f"non-integer ID or HEAD field: {exc}", line_no) from None
        lemma = cols[2] if cols[2] != "_" else ""
        tokens.append(
            Token(
                id=idx,
                form=cols[1],
                lemma=lemma,
                pos=cols[3],
                head=head,
                deprel=cols[7].lower(),
            )
        )
    flush(len(lines) + 1)
    return trees


def tree_to_conllu(tree: DependencyTree) -> str:
    """Serialize one tree back to CoNLL-U; inverse of parse_conllu."""
    out = [f"# sent_id = {tree.sent_id}"]
    if tree.text:
        out.append(f"# text = {tree.text}")
    for t in tree.tokens:
        lemma = t.lemma if t.lemma else "_"
        out.append(
            "\t".join([str(t.id), t.form, lemma, t.pos, "_", "_", str(t.head), t.deprel, "_", "_"])
        )
    out.append("")
    return "\n".join(out) + "\n"


def trees_to_conllu(trees: list[DependencyTree]) -> str:
    return "".join(tree_to_conllu(t) for t in trees)


class EmbeddingStore:
    """Unit-normalized vectors keyed by string id."""

    def __init__(self, dim: int):
        self.dim = dim
        self._vecs: dict[str, np.ndarray] = {}

    def __contains__(self, key: str) -> bool:
        return key in self._vecs

    def __len__(self) -> int:
        return len(self._vecs)

    def keys(self):
        return self._vecs.keys()

    def get(self, key: str) -> np.ndarray | None:
        return self._vecs.get(key)

    def add(self, key: str, vector: np.ndarray) -> None:
        if key in self._vecs:
            raise ValidationError(f"duplicate embedding id {key!r}")
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ValidationError(f"embedding {key!r} has dimension {vec.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(vec)):
            raise ValidationError(f"embedding {key!r} contains non-finite values")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValidationError(f"embedding {key!r} is the zero vector")
        self._vecs[key] = vec / norm


def load_embeddings(path: str, expected_dim: int | None = None) -> EmbeddingStore:
    """Load an embedding file: `dim <N>` header, then one `<id>\\t<floats>` row per line.

    Vectors are L2-normalized on load; after loading, every stored norm is
    within 1e-6 of 1.  Duplicate ids, zero vectors, non-finite values and
    dimension mismatches are rejected.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if len(parts) != 2 or parts[0] != "dim":
            raise ParseError(f"expected header 'dim <N>', got {header!r}", 1)
        try:
            dim = int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer dimension in header: {header!r}", 1) from None
        if dim <= 0:
            raise ParseError(f"dimension must be positive, got {dim}", 1)
        if expected_dim is not None and dim != expected_dim:
            raise ValidationError(f"embedding file has dim {dim}, expected {expected_dim}")
        store = EmbeddingStore(dim)
        for line_no, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            key, sep, rest = line.partition("\t")
            if not sep:
                raise ParseError("expected '<id>\\t<values>'", line_no)
            values = rest.split()
            if len(values) != dim:
                raise ParseError(f"expected {dim} values, got {len(values)}", line_no)
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"bad float: {exc}", line_no) from None
            try:
                store.add(key, vec)
            except ValidationError as exc:
                raise ValidationError(f"line {line_no}: {exc}") from None
    return store


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1]; zero-norm inputs are an error."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("cosine undefined for zero-norm vector")
    value = float(np.dot(u, v)) / (nu * nv)
    return max(-1.0, min(1.0, value))


def fallback_embed(text: str, dim: int = 64, seed: int = 13) -> np.ndarray:
    """Deterministic embedding from character n-gram counts (n = 1..3).

    Each n-gram is hashed into one of `dim` buckets with a seeded, platform
    independent hash; the bucket-count vector is L2-normalized.  Meant as a
    stand-in when no pretrained embedding file is available.
    """
    if not text:
        raise ValidationError("cannot embed empty text")
    if dim < 8:
        raise ValidationError(f"fallback embedding dim must be >= 8, got {dim}")
    counts = np.zeros(dim, dtype=np.float64)
    for n in (1, 2, 3):
        for i in range(len(text) - n + 1):
            gram = f"{n}:{text[i : i + n]}"
            digest = hashlib.blake2b(
                gram.encode("utf-8"), digest_size=8, key=str(seed).encode("ascii")
            ).digest()
            counts[int.from_bytes(digest, "big") % dim] += 1.0
    norm = float(np.linalg.norm(counts))
    return counts / norm
