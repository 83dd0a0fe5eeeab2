"""Full-graph training with early stopping, plus diagnostics.

The loop minimises masked negative log-likelihood with Adam, applies
decoupled L2 decay split between the encoder/decoder group and the
convolution group, keeps the best-validation parameter snapshot in
memory, and stops after ``patience`` epochs without improvement. The
returned result carries the loss curves, the test accuracy of the best
checkpoint, per-layer smoothness reports of the final model, and
(optionally) the per-epoch Frobenius norms of the Jacobian of the model
output with respect to each layer's features.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, InputError, TrainingError
from .generators import sbm_graph
from .graphs import Graph, build_propagation_operator, eigenbasis
from .models import Model, ModelConfig
from .optim import Adam, apply_weight_decay
from .rng import stream
from .smoothness import smoothness_report

nll_loss = ad.nll_loss


@dataclass
class Dataset:
    graph: Graph
    features: np.ndarray  # d x n
    labels: np.ndarray
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray
    num_classes: int

    def __post_init__(self):
        n = self.graph.n
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.shape[1] != n:
            raise InputError(f"features cover {self.features.shape[1]} nodes, graph has {n}")
        if self.labels.shape != (n,):
            raise InputError(f"need one label per node, got {self.labels.shape}")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise InputError("labels out of range for the declared class count")
        masks = [np.asarray(m, dtype=np.int64) for m in (self.train_idx, self.val_idx, self.test_idx)]
        self.train_idx, self.val_idx, self.test_idx = masks
        combined = np.concatenate(masks)
        if combined.size and (combined.min() < 0 or combined.max() >= n):
            raise InputError("split indices out of range")
        if len(set(combined.tolist())) != combined.size:
            raise InputError("train/val/test splits must be disjoint")


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    weight_decay_fc: float = 5e-4
    weight_decay_conv: float = 5e-4
    max_epochs: int = 1500
    patience: int = 100
    seed: int = 0
    grad_norm_every: int = 0  # 0 disables the Jacobian diagnostics

    def __post_init__(self):
        if self.patience > self.max_epochs:
            raise ConfigError(
                f"patience {self.patience} exceeds max_epochs {self.max_epochs}"
            )
        if self.max_epochs < 1:
            raise ConfigError("need at least one epoch")

    @classmethod
    def from_json_dict(cls, data: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class RunResult:
    best_epoch: int
    test_accuracy: float
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)
    grad_norm_epochs: list[int] = field(default_factory=list)
    grad_norms: list[list[float]] = field(default_factory=list)
    layer_smoothness: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "best_epoch": self.best_epoch,
            "test_accuracy": self.test_accuracy,
            "train_losses": self.train_losses,
            "val_losses": self.val_losses,
            "grad_norm_epochs": self.grad_norm_epochs,
            "grad_norms": self.grad_norms,
            "layer_smoothness": self.layer_smoothness,
        }


def accuracy(logits: np.ndarray, labels: np.ndarray, idx: np.ndarray) -> float:
    predicted = np.argmax(logits[:, idx], axis=0)
    return float(np.mean(predicted == labels[idx]))


def jacobian_layer_norms(pass_: "object") -> list[float]:
    """Frobenius norm of d(logits)/d(H^l) for every retained layer.

    Exact: one reverse sweep per logit entry, accumulating the squared
    gradient norm at each feature node.
    """
    logits = pass_.logits
    feats = pass_.features
    order = ad.topological_order(logits)
    totals = [0.0] * len(feats)
    rows, cols = logits.shape
    seed = np.zeros((rows, cols))
    for r in range(rows):
        for c in range(cols):
            for node in order:
                node.grad[...] = 0.0
            seed[r, c] = 1.0
            logits.grad += seed
            for node in reversed(order):
                if node._pull is not None:
                    node._pull()
            seed[r, c] = 0.0
            for i, f in enumerate(feats):
                totals[i] += float(np.sum(f.grad * f.grad))
    for node in order:
        node.grad[...] = 0.0
    return [math.sqrt(t) for t in totals]


def train(model: Model, dataset: Dataset, config: TrainConfig) -> RunResult:
    """Run the full training loop; deterministic under ``config.seed``."""
    names = list(model.params)
    decays = [
        config.weight_decay_fc if model.parameter_group(n) == "fc" else config.weight_decay_conv
        for n in names
    ]
    adam = Adam([model.params[n].shape for n in names], lr=config.learning_rate)
    dropout_rng = stream(config.seed, 1)
    x = dataset.features

    best_val = math.inf
    best_epoch = -1
    best_snapshot = {n: model.params[n].copy() for n in names}
    since_best = 0
    result = RunResult(best_epoch=0, test_accuracy=0.0)

    for epoch in range(config.max_epochs):
        fp = model.forward(x, training=True, dropout_rng=dropout_rng)
        loss = ad.nll_loss(fp.logits, dataset.labels, dataset.train_idx)
        penalty = model.regularization(fp.leaves)
        if penalty is not None:
            loss = ad.add(loss, penalty)
        train_loss = float(loss.value[0, 0])
        if not math.isfinite(train_loss):
            raise TrainingError(f"training loss diverged at epoch {epoch}")
        ad.backward(loss)
        params = [model.params[n] for n in names]
        grads = [fp.leaves[n].grad for n in names]
        adam.step(params, grads)
        apply_weight_decay(params, decays, config.learning_rate)

        eval_fp = model.forward(x, training=False)
        val_loss = float(
            ad.nll_loss(eval_fp.logits, dataset.labels, dataset.val_idx).value[0, 0]
        )
        if not math.isfinite(val_loss):
            raise TrainingError(f"validation loss diverged at epoch {epoch}")
        result.train_losses.append(train_loss)
        result.val_losses.append(val_loss)
        if config.grad_norm_every and epoch % config.grad_norm_every == 0:
            result.grad_norm_epochs.append(epoch)
            result.grad_norms.append(jacobian_layer_norms(eval_fp))

        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            for n in names:
                best_snapshot[n][...] = model.params[n]
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                break

    for n in names:
        model.params[n][...] = best_snapshot[n]
    final = model.forward(x, training=False)
    result.best_epoch = best_epoch
    result.test_accuracy = accuracy(final.logits.value, dataset.labels, dataset.test_idx)
    result.layer_smoothness = [
        smoothness_report(f.value, model.op, model.basis).to_json_dict()
        for f in final.features
    ]
    return result


def layer_gradient_norms(model: Model, dataset: Dataset, config: TrainConfig) -> np.ndarray:
    """Train while recording the per-layer Jacobian norms every epoch;
    returns the (recorded epochs) x (layers + 1) matrix."""
    cfg = TrainConfig(
        learning_rate=config.learning_rate,
        weight_decay_fc=config.weight_decay_fc,
        weight_decay_conv=config.weight_decay_conv,
        max_epochs=config.max_epochs,
        patience=config.patience,
        seed=config.seed,
        grad_norm_every=1,
    )
    result = train(model, dataset, cfg)
    return np.asarray(result.grad_norms)


def t_score(mean1: float, std1: float, mean2: float, std2: float, n: int) -> float:
    """Welch-style score (mean1 - mean2) / sqrt(std1^2/n + std2^2/n)."""
    if n < 2:
        raise InputError(f"need at least two runs per group, got n={n}")
    if std1 < 0.0 or std2 < 0.0:
        raise InputError("standard deviations must be nonnegative")
    if std1 == 0.0 and std2 == 0.0:
        raise InputError("t score is undefined when both deviations are zero")
    return (mean1 - mean2) / math.sqrt((std1 * std1 + std2 * std2) / n)


def sbm_dataset(
    seed: int,
    block_size: int = 30,
    p_in: float = 0.2,
    p_out: float = 0.02,
    feature_dim: int = 8,
    mean_scale: float = 0.75,
    per_class_split: tuple[int, int, int] = (10, 10, 10),
) -> Dataset:
    """Two-block community graph with Gaussian class features.

    Each block is one class; features are the class mean (+-mean_scale in
    every coordinate) plus unit Gaussian noise. Splits are stratified.
    """
    if sum(per_class_split) > block_size:
        raise InputError(
            f"per-class split {per_class_split} does not fit block size {block_size}"
        )
    rng = stream(seed, 2)
    graph, blocks = sbm_graph(rng, [block_size, block_size], p_in, p_out)
    n = graph.n
    means = np.where(blocks[None, :] == 0, mean_scale, -mean_scale) * np.ones((feature_dim, 1))
    features = means + rng.standard_normal((feature_dim, n))
    n_train, n_val, n_test = per_class_split
    train_idx, val_idx, test_idx = [], [], []
    for cls in (0, 1):
        members = rng.permutation(np.flatnonzero(blocks == cls))
        train_idx.extend(members[:n_train])
        val_idx.extend(members[n_train : n_train + n_val])
        test_idx.extend(members[n_train + n_val : n_train + n_val + n_test])
    return Dataset(
        graph=graph,
        features=features,
        labels=blocks.astype(np.int64),
        train_idx=np.array(sorted(train_idx)),
        val_idx=np.array(sorted(val_idx)),
        test_idx=np.array(sorted(test_idx)),
        num_classes=2,
    )


def load_features_csv(path) -> np.ndarray:
    """One row per node of comma-separated reals; returned transposed d x n."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise InputError(f"no feature rows in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"feature rows have inconsistent widths {sorted(widths)}")
    return np.asarray(rows, dtype=np.float64).T


def load_labels(path) -> np.ndarray:
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            labels.append(int(line))
    if not labels:
        raise InputError(f"no labels in {path}")
    return np.asarray(labels, dtype=np.int64)


def load_splits(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        return (
            np.asarray(data["train"], dtype=np.int64),
            np.asarray(data["val"], dtype=np.int64),
            np.asarray(data["test"], dtype=np.int64),
        )
    except KeyError as exc:
        raise InputError(f"splits file must define train/val/test, missing {exc}") from exc


def dataset_from_files(graph_path, features_path, labels_path, splits_path) -> Dataset:
    from .graphs import load_graph

    graph = load_graph(graph_path)
    features = load_features_csv(features_path)
    labels = load_labels(labels_path)
    train_idx, val_idx, test_idx = load_splits(splits_path)
    return Dataset(
        graph=graph,
        features=features,
        labels=labels,
        train_idx=train_idx,
        val_idx=val_idx,
        test_idx=test_idx,
        num_classes=int(labels.max()) + 1,
    )


def build_model(config: ModelConfig, dataset: Dataset) -> Model:
    op = build_propagation_operator(dataset.graph)
    basis = eigenbasis(dataset.graph, op)
    return Model(config, dataset.features.shape[0], dataset.num_classes, op, basis)
