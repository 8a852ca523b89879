"""Similarity between clause structures and density clustering over them.

Similarity is computed bottom-up: word pairs, then nodes, then ordered
node sets (best monotone one-to-one alignment), then whole clauses as a
weighted combination of the child-side and ancestor-side set scores.
Similarities are discretized into integer distances on a logarithmic
scale and fed to a DBSCAN variant with per-point neighborhood radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .clause import ClauseNode, ClauseStructure
from .errors import ConfigError, InputError
from .ingest import EmbeddingStore, cosine, fallback_embed

WordSim = Callable[[str, str], float]

# guards log(0) for totally dissimilar clauses; far below any meaningful score
MIN_SIMILARITY = 1e-12


@dataclass(frozen=True)
class SimilarityParams:
    """Weights and mode for clause similarity.

    mode "synsem" scores node pairs by word similarity of heads and
    dependents; mode "syntactic" only requires matching relation labels.
    """

    alpha: float = 0.5  # child-set weight
    beta: float = 0.5  # ancestor-set weight
    alpha_w: float = 0.5  # head-word weight inside a node pair
    beta_w: float = 0.5  # dependent-word weight inside a node pair
    mode: str = "synsem"
    sim_floor: float = 0.05  # base of the distance scale

    def __post_init__(self):
        if self.mode not in ("synsem", "syntactic"):
            raise ConfigError(f"unknown similarity mode {self.mode!r}")
        if not 0.0 < self.sim_floor < 1.0:
            raise ConfigError(f"sim_floor must be in (0, 1), got {self.sim_floor}")


def embedding_word_sim(store: EmbeddingStore | None) -> WordSim:
    """Word similarity from an embedding table: non-negative cosine.

    Pairs with an out-of-vocabulary member fall back to exact match.
    With no store at all, every pair is scored by exact match.
    """

    def sim(w1: str, w2: str) -> float:
        if store is not None:
            v1, v2 = store.get(w1), store.get(w2)
            if v1 is not None and v2 is not None:
                return max(0.0, cosine(v1, v2))
        return 1.0 if w1 == w2 else 0.0

    return sim


def hashing_word_sim(dim: int = 64, seed: int = 13) -> WordSim:
    """Word similarity over deterministic character n-gram embeddings."""
    cache: dict[str, object] = {}

    def vec(w: str):
        if w not in cache:
            cache[w] = fallback_embed(w, dim=dim, seed=seed)
        return cache[w]

    def sim(w1: str, w2: str) -> float:
        if not w1 or not w2:
            return 1.0 if w1 == w2 else 0.0
        return max(0.0, cosine(vec(w1), vec(w2)))

    return sim


EXACT_MATCH: WordSim = embedding_word_sim(None)


def node_similarity(
    n1: ClauseNode, n2: ClauseNode, params: SimilarityParams, word_sim: WordSim = EXACT_MATCH
) -> float:
    """Similarity of two clause nodes; zero unless the relations match."""
    if n1.deprel != n2.deprel:
        return 0.0
    if params.mode == "syntactic":
        return 1.0
    return params.alpha_w * word_sim(n1.head_form, n2.head_form) + params.beta_w * word_sim(
        n1.dep_form, n2.dep_form
    )


def set_similarity(
    v1: Sequence[ClauseNode],
    v2: Sequence[ClauseNode],
    params: SimilarityParams,
    word_sim: WordSim = EXACT_MATCH,
) -> float:
    """Best monotone one-to-one alignment score, normalized by the longer list.

    Two empty lists are perfectly similar; empty versus non-empty is 0.
    """
    if not v1 and not v2:
        return 1.0
    if not v1 or not v2:
        return 0.0
    m, n = len(v1), len(v2)
    # dp[i][j] = best total over v1[:i] x v2[:j]
    dp = [[0.0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            pair = dp[i - 1][j - 1] + node_similarity(v1[i - 1], v2[j - 1], params, word_sim)
            dp[i][j] = max(dp[i - 1][j], dp[i][j - 1], pair)
    return dp[m][n] / max(m, n)


def clause_similarity(
    c1: ClauseStructure,
    c2: ClauseStructure,
    params: SimilarityParams,
    word_sim: WordSim = EXACT_MATCH,
) -> float:
    return params.alpha * set_similarity(c1.v_child, c2.v_child, params, word_sim) + (
        params.beta * set_similarity(c1.v_ancestor, c2.v_ancestor, params, word_sim)
    )


def similarity_to_distance(sim: float, sim_floor: float = 0.05) -> int:
    """Discretize a similarity into an integer distance: ceil(ln sim / ln floor).

    Identical structures land at 0; every factor of `sim_floor` adds one
    step.  Similarities at or below zero are treated as a tiny positive
    constant so the distance stays finite.
    """
    sim = max(MIN_SIMILARITY, min(1.0, sim))
    return math.ceil(math.log(sim) / math.log(sim_floor))


def clause_distance(
    c1: ClauseStructure,
    c2: ClauseStructure,
    params: SimilarityParams,
    word_sim: WordSim = EXACT_MATCH,
) -> int:
    return similarity_to_distance(clause_similarity(c1, c2, params, word_sim), params.sim_floor)


@dataclass
class ClusterResult:
    """Clusters as index lists into the input, plus outliers and radii."""

    clusters: list[list[int]]
    outliers: list[int]
    epsilons: list[int | None]  # per-point nearest-neighbor distance; None if alone


def depcluster_dbscan(
    clauses: Sequence[ClauseStructure],
    params: SimilarityParams | None = None,
    word_sim: WordSim = EXACT_MATCH,
    min_pts: int = 3,
) -> ClusterResult:
    """Density clustering with per-point radii and mutual admission.

    Every point's radius (epsilon) is the distance to its nearest other
    point, zero included.  A neighborhood grows from a seed; a candidate
    is admitted only if its distance to EVERY current member is within
    that member's own radius.  Seeds are tried in ascending input order;
    admission also scans in ascending order, restarting after each
    admission.  Neighborhoods that reach min_pts become clusters; all
    remaining points are outliers.
    """
    if params is None:
        params = SimilarityParams()
    if min_pts < 1:
        raise ConfigError(f"min_pts must be >= 1, got {min_pts}")
    n = len(clauses)
    if n == 0:
        raise InputError("no clauses to cluster")

    dist = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = clause_distance(clauses[i], clauses[j], params, word_sim)
            dist[i][j] = dist[j][i] = d
    epsilons: list[int | None] = [
        min(dist[i][j] for j in range(n) if j != i) if n > 1 else None for i in range(n)
    ]

    assigned = [False] * n
    clusters: list[list[int]] = []
    for seed in range(n):
        if assigned[seed]:
            continue
        members = [seed]
        member_set = {seed}
        while True:
            admitted = None
            for q in range(n):
                if assigned[q] or q in member_set:
                    continue
                if all(dist[q][m] <= epsilons[m] for m in members):
                    admitted = q
                    break
            if admitted is None:
                break
            members.append(admitted)
            member_set.add(admitted)
        if len(members) >= min_pts:
            for m in members:
                assigned[m] = True
            clusters.append(sorted(members))
    outliers = [i for i in range(n) if not assigned[i]]
    return ClusterResult(clusters, outliers, epsilons)
