"""Error/correct classifier over match features.

Relation labels are embedded with a fixed, seeded Gaussian table (no
gradient flows into it), pooled per side, and concatenated with summary
statistics of the aligned similarities.  A small two-hidden-layer
network trained with minibatch SGD produces the verdict.  Class balance
is kept by pairing every correct instance with an equal-size sample of
error instances, redrawn on a fixed schedule; each drawn sample is
fingerprinted so runs can be audited for determinism.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, InputError, ValidationError
from .data import LABELS
from .matching import FeatureVector

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 1e-3
    resample_every: int = 50
    seed: int = 7
    hidden: tuple[int, int] = (64, 32)
    emb_dim: int = 32

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.resample_every < 1:
            raise ConfigError("epochs, batch_size and resample_every must be positive")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")
        if self.emb_dim < 1 or any(h < 1 for h in self.hidden):
            raise ConfigError("layer sizes must be positive")


def deprel_embedding(deprel: str, dim: int, seed: int) -> np.ndarray:
    """Fixed Gaussian vector for a relation label.

    Derived from a keyed digest of the label so the table never depends
    on vocabulary order or training history.
    """
    digest = hashlib.blake2b(
        deprel.encode("utf-8"), digest_size=8, key=str(seed).encode("utf-8")
    ).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    return rng.standard_normal(dim) / np.sqrt(dim)


def _pool(entries: list[tuple[str, float]], dim: int, seed: int) -> np.ndarray:
    """Mean-pooled label embeddings plus (mean, max, 0.1*count) of sims."""
    if not entries:
        return np.zeros(dim + 3)
    vecs = np.stack([deprel_embedding(d, dim, seed) for d, _ in entries])
    sims = np.array([s for _, s in entries], dtype=float)
    stats = np.array([sims.mean(), sims.max(), 0.1 * len(sims)])
    return np.concatenate([vecs.mean(axis=0), stats])


def featurize(fv: FeatureVector, dim: int, seed: int) -> np.ndarray:
    parts = [
        deprel_embedding(fv.core_dep_col, dim, seed),
        deprel_embedding(fv.core_dep_cls, dim, seed),
        _pool(fv.deps_col, dim, seed),
        _pool(fv.deps_cls, dim, seed),
    ]
    return np.concatenate(parts)


def feature_dim(emb_dim: int) -> int:
    return 4 * emb_dim + 6


@dataclass
class ClassifierParams:
    """Learned weights plus everything needed to reproduce the features."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    emb_dim: int
    emb_seed: int
    prior: tuple[float, float]  # training fractions of (correct, error)
    sample_hashes: list[tuple[int, str]] = field(default_factory=list)

    @property
    def prior_label(self) -> str:
        return LABELS[0] if self.prior[0] >= self.prior[1] else LABELS[1]


@dataclass(frozen=True)
class Verdict:
    label: str
    p_correct: float
    p_error: float


def _forward(params: ClassifierParams, x: np.ndarray):
    z1 = x @ params.w1 + params.b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ params.w2 + params.b2
    h2 = np.maximum(z2, 0.0)
    logits = h2 @ params.w3 + params.b3
    logits = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(logits)
    probs = exp / exp.sum(axis=1, keepdims=True)
    return h1, h2, probs


def _sample_fingerprint(indices: np.ndarray) -> str:
    return hashlib.sha256(",".join(map(str, sorted(indices))).encode("ascii")).hexdigest()


def train(
    features: list[FeatureVector],
    labels: list[str],
    config: TrainConfig | None = None,
) -> ClassifierParams:
    """Fit the network with seeded minibatch SGD.

    Every `resample_every` epochs the error side is redrawn to match the
    correct side in size (without replacement when the pool allows).
    """
    if config is None:
        config = TrainConfig()
    if len(features) != len(labels):
        raise InputError(f"{len(features)} features but {len(labels)} labels")
    bad = sorted(set(labels) - set(LABELS))
    if bad:
        raise ValidationError(f"unknown labels: {bad}")
    correct_idx = np.array([i for i, lab in enumerate(labels) if lab == LABELS[0]])
    error_idx = np.array([i for i, lab in enumerate(labels) if lab == LABELS[1]])
    if len(correct_idx) == 0 or len(error_idx) == 0:
        raise InputError("training data must contain both labels")

    x = np.stack([featurize(fv, config.emb_dim, config.seed) for fv in features])
    y = np.array([LABELS.index(lab) for lab in labels])
    d = feature_dim(config.emb_dim)
    h1, h2 = config.hidden

    rng = np.random.default_rng(config.seed)
    params = ClassifierParams(
        w1=rng.standard_normal((d, h1)) * np.sqrt(2.0 / d),
        b1=np.zeros(h1),
        w2=rng.standard_normal((h1, h2)) * np.sqrt(2.0 / h1),
        b2=np.zeros(h2),
        w3=rng.standard_normal((h2, 2)) * np.sqrt(2.0 / h2),
        b3=np.zeros(2),
        emb_dim=config.emb_dim,
        emb_seed=config.seed,
        prior=(len(correct_idx) / len(labels), len(error_idx) / len(labels)),
    )

    epoch_pool = np.array([], dtype=int)
    for epoch in range(config.epochs):
        if epoch % config.resample_every == 0:
            replace = len(error_idx) < len(correct_idx)
            drawn = rng.choice(error_idx, size=len(correct_idx), replace=replace)
            epoch_pool = np.concatenate([correct_idx, drawn])
            digest = _sample_fingerprint(drawn)
            params.sample_hashes.append((epoch, digest))
            log.info("epoch %d: error sample %s", epoch, digest[:12])
        order = rng.permutation(len(epoch_pool))
        for start in range(0, len(order), config.batch_size):
            batch = epoch_pool[order[start : start + config.batch_size]]
            xb, yb = x[batch], y[batch]
            a1, a2, probs = _forward(params, xb)
            grad = probs.copy()
            grad[np.arange(len(batch)), yb] -= 1.0
            grad /= len(batch)
            dw3 = a2.T @ grad
            db3 = grad.sum(axis=0)
            da2 = grad @ params.w3.T
            da2[a2 <= 0.0] = 0.0
            dw2 = a1.T @ da2
            db2 = da2.sum(axis=0)
            da1 = da2 @ params.w2.T
            da1[a1 <= 0.0] = 0.0
            dw1 = xb.T @ da1
            db1 = da1.sum(axis=0)
            lr = config.learning_rate
            params.w3 -= lr * dw3
            params.b3 -= lr * db3
            params.w2 -= lr * dw2
            params.b2 -= lr * db2
            params.w1 -= lr * dw1
            params.b1 -= lr * db1
    return params


def classify(params: ClassifierParams, fv: FeatureVector | None) -> Verdict:
    """Verdict for one instance; the training prior stands in when no
    features could be built (e.g. verb absent from the database)."""
    if fv is None:
        return Verdict(params.prior_label, params.prior[0], params.prior[1])
    x = featurize(fv, params.emb_dim, params.emb_seed)[None, :]
    _, _, probs = _forward(params, x)
    p_correct, p_error = float(probs[0, 0]), float(probs[0, 1])
    label = LABELS[1] if p_correct - p_error < 0.0 else LABELS[0]
    return Verdict(label, p_correct, p_error)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    accuracy: float
    per_class: dict[str, ClassMetrics]
    n: int

    def table(self) -> str:
        lines = [f"{'label':<10}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"]
        for label in LABELS:
            m = self.per_class[label]
            lines.append(
                f"{label:<10}{m.precision:>10.4f}{m.recall:>10.4f}{m.f1:>10.4f}{m.support:>10d}"
            )
        lines.append(f"{'accuracy':<10}{'':>10}{'':>10}{self.accuracy:>10.4f}{self.n:>10d}")
        return "\n".join(lines)


def evaluate(predicted: list[str], gold: list[str]) -> EvalReport:
    if len(predicted) != len(gold):
        raise InputError(f"{len(predicted)} predictions but {len(gold)} gold labels")
    if not gold:
        raise InputError("nothing to evaluate")
    bad = sorted((set(predicted) | set(gold)) - set(LABELS))
    if bad:
        raise ValidationError(f"unknown labels: {bad}")
    per_class = {}
    for label in LABELS:
        tp = sum(1 for p, g in zip(predicted, gold) if p == label and g == label)
        fp = sum(1 for p, g in zip(predicted, gold) if p == label and g != label)
        fn = sum(1 for p, g in zip(predicted, gold) if p != label and g == label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = ClassMetrics(precision, recall, f1, tp + fn)
    accuracy = sum(1 for p, g in zip(predicted, gold) if p == g) / len(gold)
    return EvalReport(accuracy=accuracy, per_class=per_class, n=len(gold))


def save_model(params: ClassifierParams, path) -> None:
    """Persist weights and metadata; arrays go through numpy's format."""
    np.savez(
        path,
        w1=params.w1,
        b1=params.b1,
        w2=params.w2,
        b2=params.b2,
        w3=params.w3,
        b3=params.b3,
        emb_dim=np.array(params.emb_dim),
        emb_seed=np.array(params.emb_seed),
        prior=np.array(params.prior),
        sample_epochs=np.array([e for e, _ in params.sample_hashes], dtype=int),
        sample_digests=np.array([h for _, h in params.sample_hashes]),
    )


def load_model(path) -> ClassifierParams:
    try:
        blob = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from exc
    try:
        return ClassifierParams(
            w1=blob["w1"],
            b1=blob["b1"],
            w2=blob["w2"],
            b2=blob["b2"],
            w3=blob["w3"],
            b3=blob["b3"],
            emb_dim=int(blob["emb_dim"]),
            emb_seed=int(blob["emb_seed"]),
            prior=tuple(float(v) for v in blob["prior"]),
            sample_hashes=list(
                zip((int(e) for e in blob["sample_epochs"]), (str(h) for h in blob["sample_digests"]))
            ),
        )
    except KeyError as exc:
        raise InputError(f"model file {path} is missing field {exc}") from exc
