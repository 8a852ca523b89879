"""Fuzzy alignment between a clause and a collostruction, and match scoring.

Node-to-slot similarity blends three signals: edit similarity of the
relation labels, embedding similarity of the governor words, and
embedding similarity of the dependent words, scaled by how well attested
the slot is.  The best monotone alignment then yields asymmetric
similarities, coverage, and density terms that are combined into one
match score; the same alignment feeds the downstream classifier's
feature vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..clause import ClauseStructure, EdgeCategory, classify_edge
from ..colgen import FOCUS, Collostruction, Slot, SlotKey
from ..depcluster import EXACT_MATCH, SimilarityParams, WordSim
from ..errors import ConfigError, ValidationError


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance over characters."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        row = [i]
        for j, cb in enumerate(b, start=1):
            row.append(min(prev[j] + 1, row[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = row
    return prev[-1]


def relation_similarity(r1: str, r2: str) -> float:
    """1 - normalized edit distance between relation labels."""
    if not r1 and not r2:
        return 1.0
    return 1.0 - levenshtein(r1, r2) / max(len(r1), len(r2))


def fuzzy_node_sim(
    node,
    slot: Slot,
    p_slot: float,
    params: SimilarityParams,
    word_sim: WordSim = EXACT_MATCH,
) -> float:
    """Similarity of one clause node to one collostruction slot.

    head and dependent word scores each take the best match over the
    slot's attested candidates; the total is scaled by the slot's
    attestation probability, so never-attested slots contribute nothing.
    """
    if not 0.0 <= p_slot <= 1.0:
        raise ValidationError(f"p_slot must be in [0, 1], got {p_slot}")
    rel = relation_similarity(node.deprel, slot.key.deprel)
    head = max((word_sim(node.head_form, w) for w in slot.head_words), default=0.0)
    dep = max((word_sim(node.dep_form, c.word) for c in slot.collexemes), default=0.0)
    return p_slot * rel * (params.alpha_w * head + params.beta_w * dep)


@dataclass
class Alignment:
    """Monotone one-to-one node/slot pairs with their similarities."""

    pairs: list[tuple[int, int, float]]  # (clause index, slot index, similarity)
    total: float  # sum of pair similarities (Z)

    @property
    def clause_indices(self) -> set[int]:
        return {i for i, _, _ in self.pairs}

    @property
    def slot_indices(self) -> set[int]:
        return {j for _, j, _ in self.pairs}


def align(
    clause: ClauseStructure,
    colo: Collostruction,
    params: SimilarityParams | None = None,
    word_sim: WordSim = EXACT_MATCH,
) -> Alignment:
    """Best monotone alignment of clause nodes to collostruction slots.

    Maximizes total fuzzy similarity by dynamic programming; pairs with
    zero similarity are left out of the result.
    """
    if params is None:
        params = SimilarityParams()
    nodes = clause.nodes
    slots = colo.slots
    m, n = len(nodes), len(slots)
    sims = [
        [
            fuzzy_node_sim(nodes[i], slots[j], slots[j].support / colo.support, params, word_sim)
            for j in range(n)
        ]
        for i in range(m)
    ]
    dp = [[0.0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            dp[i][j] = max(dp[i - 1][j], dp[i][j - 1], dp[i - 1][j - 1] + sims[i - 1][j - 1])
    pairs: list[tuple[int, int, float]] = []
    i, j = m, n
    while i > 0 and j > 0:
        if dp[i][j] == dp[i - 1][j - 1] + sims[i - 1][j - 1] and sims[i - 1][j - 1] > 0.0:
            pairs.append((i - 1, j - 1, sims[i - 1][j - 1]))
            i, j = i - 1, j - 1
        elif dp[i][j] == dp[i - 1][j]:
            i -= 1
        else:
            j -= 1
    pairs.reverse()
    return Alignment(pairs=pairs, total=sum(s for _, _, s in pairs))


def asym_similarities(z: float, m: int, n: int) -> tuple[float, float]:
    """Asymmetric overlap scores (sim2col, sim2clause) from alignment mass Z.

    Unmatched collostruction slots weigh heavily against sim2col;
    unmatched clause nodes weigh heavily against sim2clause.
    """
    if m <= 0 and n <= 0:
        raise ValidationError("both sequences are empty")
    if z < 0.0:
        raise ValidationError(f"negative alignment mass {z}")
    if z == 0.0:
        return 0.0, 0.0
    sim2col = z / (z + 0.1 * (m - z) + 0.9 * (n - z))
    sim2clause = z / (z + 0.9 * (m - z) + 0.1 * (n - z))
    return sim2col, sim2clause


def coverage_density(
    alignment: Alignment, clause_len: int, colo_len: int
) -> tuple[float, float, float]:
    """Coverage of the clause plus adjacency densities on both sides."""
    if clause_len <= 0 or colo_len <= 0:
        raise ValidationError("lengths must be positive")
    matched_clause = alignment.clause_indices
    matched_colo = alignment.slot_indices
    cov_clause = len(alignment.pairs) / clause_len
    den_clause = (
        sum(1 for i in range(clause_len - 1) if i in matched_clause and i + 1 in matched_clause)
        / clause_len
    )
    den_col = (
        sum(1 for j in range(colo_len - 1) if j in matched_colo and j + 1 in matched_colo)
        / colo_len
    )
    return cov_clause, den_clause, den_col


@dataclass(frozen=True)
class MatchWeights:
    """Mixing weights for the combined match score; must sum to 1."""

    sim2clause: float = 0.2
    sim2col: float = 0.2
    cov_clause: float = 0.2
    den_clause: float = 0.2
    den_col: float = 0.2

    def __post_init__(self):
        total = self.sim2clause + self.sim2col + self.cov_clause + self.den_clause + self.den_col
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"match weights must sum to 1, got {total}")


@dataclass
class MatchScore:
    sim2clause: float
    sim2col: float
    cov_clause: float
    den_clause: float
    den_col: float
    combined: float


def score_match(
    alignment: Alignment, clause_len: int, colo_len: int, weights: MatchWeights
) -> MatchScore:
    sim2col, sim2clause = asym_similarities(alignment.total, clause_len, colo_len)
    cov_clause, den_clause, den_col = coverage_density(alignment, clause_len, colo_len)
    combined = (
        weights.sim2clause * sim2clause
        + weights.sim2col * sim2col
        + weights.cov_clause * cov_clause
        + weights.den_clause * den_clause
        + weights.den_col * den_col
    )
    return MatchScore(sim2clause, sim2col, cov_clause, den_clause, den_col, combined)


def select_top(
    clause: ClauseStructure,
    candidates: Sequence[Collostruction],
    params: SimilarityParams | None = None,
    word_sim: WordSim = EXACT_MATCH,
    weights: MatchWeights | None = None,
) -> tuple[Collostruction, Alignment, MatchScore] | None:
    """Best-matching candidate by combined score; ties prefer higher
    support, then lower id.  None when there are no candidates."""
    if weights is None:
        weights = MatchWeights()
    best = None
    for colo in candidates:
        alignment = align(clause, colo, params, word_sim)
        score = score_match(alignment, len(clause.nodes), len(colo.slots), weights)
        rank = (-score.combined, -colo.support, colo.colo_id)
        if best is None or rank < best[0]:
            best = (rank, colo, alignment, score)
    if best is None:
        return None
    return best[1], best[2], best[3]


@dataclass
class FeatureVector:
    """Classifier input: focus relations plus aligned-similarity profiles
    of the slots and nodes immediately tied to the focus."""

    core_dep_col: str
    core_dep_cls: str
    deps_col: list[tuple[str, float]]
    deps_cls: list[tuple[str, float]]


def _colo_focus_linked(colo: Collostruction) -> list[tuple[int, str]]:
    """Indices of slots in the focus's own dependency neighborhood.

    Slots whose dependent->head chain reaches the focus count as its
    children; the slot the focus itself depends on is its head.
    """
    focus_key = colo.slots[colo.focus_index].key
    head_of: dict[SlotKey, list[SlotKey]] = {}
    for e in colo.edges:
        head_of.setdefault(e.dependent, []).append(e.head)
    out: list[tuple[int, str]] = []
    for idx, slot in enumerate(colo.slots):
        if slot.key.side == FOCUS:
            continue
        # child side: walk up from the slot
        cur, seen, is_child = [slot.key], {slot.key}, False
        while cur and not is_child:
            nxt = []
            for k in cur:
                for h in head_of.get(k, ()):
                    if h == focus_key:
                        is_child = True
                        break
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            cur = nxt
        if is_child:
            out.append((idx, slot.key.deprel))
            continue
        if any(e.dependent == focus_key and e.head == slot.key for e in colo.edges):
            out.append((idx, slot.key.deprel))
    return out


def extract_features(
    clause: ClauseStructure, colo: Collostruction, alignment: Alignment
) -> FeatureVector:
    """Build the classifier features from the selected match.

    Both relation lists are restricted to the focus's direct dependency
    neighborhood (its children and its governor); unaligned entries get
    similarity 0.
    """
    sim_by_node = {i: s for i, _, s in alignment.pairs}
    sim_by_slot = {j: s for _, j, s in alignment.pairs}

    deps_col = [
        (deprel, sim_by_slot.get(idx, 0.0)) for idx, deprel in _colo_focus_linked(colo)
    ]

    nodes = clause.nodes
    deps_cls = []
    for i, node in enumerate(nodes):
        if node.token_id == clause.target_id:
            continue
        category = classify_edge(clause, node)
        if category in (EdgeCategory.FOCUS_CHILD, EdgeCategory.HEAD_FOCUS):
            deps_cls.append((node.deprel, sim_by_node.get(i, 0.0)))
    return FeatureVector(
        core_dep_col=colo.core_deprel,
        core_dep_cls=clause.focus.deprel,
        deps_col=deps_col,
        deps_cls=deps_cls,
    )
