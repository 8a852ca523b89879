"""Verb sense grouping over sentence embeddings.

Bottom-up agglomerative clustering with average linkage over cosine
distance.  Merging is fully deterministic: items are canonicalized by
sentence id before clustering and distance ties are broken by the
smallest member ids, so any permutation of the input yields the same
partition.  Intended corpus scale is moderate (the implementation is
quadratic in memory); sampling caps uploads of very frequent verbs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError


@dataclass
class SenseCluster:
    cluster_id: int
    sent_ids: list[str]

    @property
    def size(self) -> int:
        return len(self.sent_ids)


def cluster_sentences(
    items: Sequence[tuple[str, np.ndarray]], sim_threshold: float = 0.5
) -> list[SenseCluster]:
    """Group sentences whose embeddings are mutually similar.

    Clusters are merged (average linkage) while the smallest inter-cluster
    cosine distance stays within 1 - sim_threshold; clusters come back in
    descending size order, ties broken by the smallest member sent_id.
    """
    if not 0.0 < sim_threshold <= 1.0:
        raise ValidationError(f"sim_threshold must be in (0, 1], got {sim_threshold}")
    ids = [sid for sid, _ in items]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate sent_id in clustering input")
    if not items:
        return []

    order = sorted(range(len(items)), key=lambda i: ids[i])
    labels = [ids[i] for i in order]
    mat = np.stack([np.asarray(items[i][1], dtype=np.float64) for i in order])
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0.0):
        raise ValidationError("zero-norm embedding in clustering input")
    unit = mat / norms[:, None]

    n = len(labels)
    dist = 1.0 - np.clip(unit @ unit.T, -1.0, 1.0)
    np.fill_diagonal(dist, np.inf)
    active = np.ones(n, dtype=bool)
    sizes = np.ones(n, dtype=np.int64)
    members: list[list[int]] = [[i] for i in range(n)]
    cutoff = 1.0 - sim_threshold

    while active.sum() > 1:
        masked = np.where(active[:, None] & active[None, :], dist, np.inf)
        best = masked.min()
        if best > cutoff:
            break
        # ties: the row-major scan order equals (smallest rep, smallest rep) order,
        # because the cluster stored at index i always contains original item i
        # as its smallest member
        i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
        if i > j:
            i, j = j, i
        # average linkage (Lance-Williams): weighted mean of the two old rows
        wi, wj = sizes[i], sizes[j]
        merged_row = (wi * dist[i] + wj * dist[j]) / (wi + wj)
        dist[i, :] = merged_row
        dist[:, i] = merged_row
        dist[i, i] = np.inf
        active[j] = False
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        sizes[i] = wi + wj
        members[i] = members[i] + members[j]
        members[j] = []

    groups = [sorted(labels[k] for k in members[i]) for i in range(n) if active[i]]
    groups.sort(key=lambda g: (-len(g), g[0]))
    return [SenseCluster(cluster_id=k, sent_ids=g) for k, g in enumerate(groups)]
