"""Patient-specific training of the reconstruction models, plus scoring.

Models are trained exclusively on normalized baseline (inter-ictal) feature
tensors; the anomaly score of any segment is the MSE between its features
and the model's reconstruction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError, NumericError
from ..features import NormalizationStats, apply_normalization
from ..nn import AdamState, Sequential, adam_step, dump_arrays, load_arrays, make_rng, mse_loss
from .architectures import ArchitectureSpec, build, instantiate, to_model_input


@dataclass(frozen=True)
class TrainPlan:
    epochs: int = 50
    batch_size: int = 32
    patience: int = 5          # early stop after this many epochs without improvement
    min_delta: float = 1e-5
    seed: int = 0
    min_baseline_segments: int = 60
    holdout_fraction: float = 0.1   # tail of the baseline used only for early stopping

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.patience < 1:
            raise ConfigError("epochs, batch_size and patience must all be >= 1")
        if not 0 <= self.holdout_fraction < 1:
            raise ConfigError("holdout_fraction must be in [0, 1)")


@dataclass
class TrainedModel:
    spec: ArchitectureSpec
    model: Sequential
    stats: NormalizationStats
    plan: TrainPlan
    loss_history: list[float] = field(default_factory=list)

    @property
    def initial_loss(self) -> float:
        return self.loss_history[0]

    @property
    def final_loss(self) -> float:
        return min(self.loss_history)


def _epoch_loss(model: Sequential, inputs: np.ndarray, batch_size: int) -> float:
    """Inference-mode mean reconstruction MSE over a stacked input tensor."""
    total = 0.0
    for lo in range(0, len(inputs), batch_size):
        batch = inputs[lo:lo + batch_size]
        out = model.forward(batch, training=False)
        total += float(np.sum((out - batch) ** 2))
    return total / inputs.size


def train(spec: ArchitectureSpec, train_features: np.ndarray, stats: NormalizationStats,
          plan: TrainPlan = TrainPlan()) -> TrainedModel:
    """Train on normalized baseline features; deterministic for a fixed seed.

    train_features must already be normalized with stats fit on themselves.
    The tail holdout_fraction of the baseline is kept out of the optimizer
    and drives early stopping: the checkpoint with the lowest holdout loss
    is returned, so the model is frozen before it starts memorizing noise
    and its training-error statistics transfer to unseen data.  The loss
    history records the monitored (holdout) inference-mode MSE per epoch;
    entry 0 is the untrained model.
    """
    if len(train_features) == 0:
        raise DataError("empty training set")
    inputs = to_model_input(np.asarray(train_features, dtype=np.float64), spec.representation)
    if inputs.shape[1:] != (spec.steps, spec.features):
        raise DataError(
            f"training input {inputs.shape[1:]} does not match architecture "
            f"layout ({spec.steps}, {spec.features})"
        )

    n_fit = len(inputs) - int(plan.holdout_fraction * len(inputs))
    fit_set = inputs[:n_fit]
    monitor_set = inputs[n_fit:] if n_fit < len(inputs) else inputs

    model = instantiate(spec, plan.seed)
    shuffle_rng = make_rng(plan.seed + 1)
    optimizer = AdamState()

    history = [_epoch_loss(model, monitor_set, plan.batch_size)]
    best_loss = history[0]
    best_params = {name: arr.copy() for name, arr in model.named_arrays()}
    stall = 0

    for epoch in range(plan.epochs):
        order = shuffle_rng.permutation(len(fit_set))
        for lo in range(0, len(fit_set), plan.batch_size):
            batch = fit_set[order[lo:lo + plan.batch_size]]
            out = model.forward(batch, training=True)
            loss, grad = mse_loss(out, batch)
            if not np.isfinite(loss):
                raise NumericError(f"training diverged (loss {loss}) at epoch {epoch}")
            model.zero_grads()
            model.backward(grad)
            adam_step(model.named_params(), optimizer)

        epoch_loss = _epoch_loss(model, monitor_set, plan.batch_size)
        if not np.isfinite(epoch_loss):
            raise NumericError(f"training diverged (loss {epoch_loss}) at epoch {epoch}")
        history.append(epoch_loss)
        if epoch_loss < best_loss - plan.min_delta:
            stall = 0
        else:
            stall += 1
        if epoch_loss < best_loss:
            best_loss = epoch_loss
            best_params = {name: arr.copy() for name, arr in model.named_arrays()}
        if stall >= plan.patience:
            break

    for name, arr in model.named_arrays():
        arr[...] = best_params[name]
    return TrainedModel(spec=spec, model=model, stats=stats, plan=plan, loss_history=history)


def score(trained: TrainedModel, features_normalized: np.ndarray,
          batch_size: int = 256) -> np.ndarray:
    """Per-segment reconstruction MSE, in segment order (inference mode)."""
    feats = np.asarray(features_normalized, dtype=np.float64)
    inputs = to_model_input(feats, trained.spec.representation)
    if inputs.shape[1:] != (trained.spec.steps, trained.spec.features):
        raise DataError(
            f"feature layout {inputs.shape[1:]} does not match the model's "
            f"({trained.spec.steps}, {trained.spec.features})"
        )
    errors = np.empty(len(inputs))
    per = trained.spec.steps * trained.spec.features
    for lo in range(0, len(inputs), batch_size):
        batch = inputs[lo:lo + batch_size]
        out = trained.model.forward(batch, training=False)
        errors[lo:lo + len(batch)] = np.sum((out - batch) ** 2, axis=(1, 2)) / per
    return errors


def score_segments(trained: TrainedModel, raw_features: np.ndarray) -> np.ndarray:
    """Convenience wrapper: normalize with the model's stored stats, then score."""
    return score(trained, apply_normalization(raw_features, trained.stats))


MODEL_FORMAT_VERSION = 1


def dump_trained(trained: TrainedModel) -> tuple[bytes, str]:
    """(parameter file bytes, sidecar manifest JSON) for one trained model."""
    arrays = dict(trained.model.named_arrays())
    blob = dump_arrays(arrays, trained.spec.tag)
    stats_digest = _stats_digest(trained.stats)
    manifest = json.dumps({
        "format_version": MODEL_FORMAT_VERSION,
        "architecture": trained.spec.kind,
        "representation": trained.spec.representation,
        "steps": trained.spec.steps,
        "features": trained.spec.features,
        "hyper": trained.spec.hyper,
        "seed": trained.plan.seed,
        "epochs": trained.plan.epochs,
        "batch_size": trained.plan.batch_size,
        "patience": trained.plan.patience,
        "min_delta": trained.plan.min_delta,
        "holdout_fraction": trained.plan.holdout_fraction,
        "normalization_digest": stats_digest,
        "loss_history": trained.loss_history,
    }, indent=2, sort_keys=True)
    return blob, manifest


def load_trained(blob: bytes, manifest_json: str, stats: NormalizationStats) -> TrainedModel:
    meta = json.loads(manifest_json)
    if meta.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model manifest version {meta.get('format_version')}")
    if _stats_digest(stats) != meta["normalization_digest"]:
        raise DataError("normalization stats do not match the model manifest digest")
    spec = build(meta["architecture"], meta["representation"],
                 _window_from_layout(meta), hyper=meta["hyper"])
    plan = TrainPlan(epochs=meta["epochs"], batch_size=meta["batch_size"],
                     patience=meta["patience"], min_delta=meta["min_delta"],
                     seed=meta["seed"],
                     holdout_fraction=meta.get("holdout_fraction", 0.1))
    model = instantiate(spec, plan.seed)
    tag, arrays = load_arrays(blob)
    if tag != spec.tag:
        raise DataError(f"parameter file tag {tag!r} does not match manifest ({spec.tag!r})")
    for name, arr in model.named_arrays():
        if name not in arrays:
            raise DataError(f"parameter file missing array {name!r}")
        if arrays[name].shape != arr.shape:
            raise DataError(f"array {name!r} has shape {arrays[name].shape}, expected {arr.shape}")
        arr[...] = arrays[name]
    return TrainedModel(spec=spec, model=model, stats=stats, plan=plan,
                        loss_history=list(meta["loss_history"]))


def _stats_digest(stats: NormalizationStats) -> str:
    import hashlib
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(stats.mean, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(stats.std, dtype="<f8").tobytes())
    return h.hexdigest()


def _window_from_layout(meta: dict) -> int:
    """Recover window_samples from the stored layout."""
    rep, steps, features = meta["representation"], meta["steps"], meta["features"]
    if rep == "dwt":
        return steps * features
    if rep == "scalogram":
        # steps = ceil(N/4); stored layout is exact for N divisible by 4
        return steps * 4
    from ..features import HOP_SAMPLES
    return (steps - 1) * HOP_SAMPLES
