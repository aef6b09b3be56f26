"""Regression models mapping scaled feature vectors to price differences.

Two built-in families:

* ``ridge`` - closed-form solution of the regularized normal equations,
  intercept unpenalized.  Deterministic and independently checkable, so it
  doubles as the test oracle for everything downstream.
* ``linear_svr`` - linear epsilon-insensitive regression fitted by
  deterministic epoch-ordered subgradient descent (see kernels.svr_epochs).

Neither the decay schedule nor the hyperparameter defaults are tuned; they
are documented, CLI-overridable values.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DimensionMismatch, SingularSystem, TooFewRows
from .features import Scaler

KINDS = ("ridge", "linear_svr")


@dataclass(frozen=True)
class RegressorSpec:
    kind: str = "ridge"
    ridge_lambda: float = 1.0
    svr_c: float = 1.0
    svr_epsilon: float = 0.1
    svr_epochs: int = 200
    svr_learning_rate: float = 1e-3
    svr_tolerance: float = 0.0
    seed: int = 42

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regressor kind {self.kind!r}")
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be >= 0")
        if self.svr_c <= 0:
            raise ValueError("svr_c must be > 0")
        if self.svr_epsilon < 0:
            raise ValueError("svr_epsilon must be >= 0")
        if self.svr_epochs < 1 or self.svr_learning_rate <= 0:
            raise ValueError("bad optimizer controls")


@dataclass
class FittedModel:
    weights: np.ndarray
    bias: float
    spec: RegressorSpec
    train_range: tuple[dt.date, dt.date] | None = None
    epoch_losses: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[0]


def _fit_ridge(x: np.ndarray, y: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    n, d = x.shape
    a = np.hstack([x, np.ones((n, 1))])
    gram = a.T @ a
    penalty = np.full(d + 1, lam)
    penalty[d] = 0.0          # intercept is never regularized
    gram[np.diag_indices(d + 1)] += penalty
    if lam == 0.0 and np.linalg.matrix_rank(gram) < d + 1:
        raise SingularSystem(
            "rank-deficient design with zero regularization; increase lambda"
        )
    try:
        wb = np.linalg.solve(gram, a.T @ y)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    return wb[:d], float(wb[d])


def fit(
    spec: RegressorSpec,
    x: np.ndarray,
    y: np.ndarray,
    train_range: tuple[dt.date, dt.date] | None = None,
) -> FittedModel:
    """Fit one model on scaled features x (n, d) and targets y (n,)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DimensionMismatch("x must be (n, d) with matching y")
    if x.shape[0] < 2:
        raise TooFewRows(f"need at least 2 training rows, got {x.shape[0]}")
    if np.isnan(y).any():
        raise ValueError("training targets contain missing values")
    losses = np.empty(0)
    if spec.kind == "ridge":
        w, b = _fit_ridge(x, y, spec.ridge_lambda)
    else:
        w, b, losses = kernels.svr_epochs(
            x, y, spec.svr_c, spec.svr_epsilon,
            spec.svr_epochs, spec.svr_learning_rate, spec.svr_tolerance,
        )
    return FittedModel(w, b, spec, train_range, losses)


def predict(model: FittedModel, x: np.ndarray) -> float:
    """Predicted price difference w.x + b for a single scaled vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise DimensionMismatch(
            f"feature length {x.shape} does not match model {model.weights.shape}"
        )
    return float(x @ model.weights) + model.bias


def predict_batch(model: FittedModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[1] != model.feature_dim:
        raise DimensionMismatch(
            f"feature dim {x.shape[1]} does not match model {model.feature_dim}"
        )
    return x @ model.weights + model.bias


MODEL_SCHEMA_VERSION = 1


def save_model(
    path: str | Path, model: FittedModel, scaler: Scaler, horizon: int
) -> None:
    """Persist model + scaler as versioned JSON (loadable by load_model)."""
    spec = model.spec
    payload = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": spec.kind,
        "params": {
            "ridge_lambda": spec.ridge_lambda,
            "svr_c": spec.svr_c,
            "svr_epsilon": spec.svr_epsilon,
            "svr_epochs": spec.svr_epochs,
            "svr_learning_rate": spec.svr_learning_rate,
            "svr_tolerance": spec.svr_tolerance,
            "seed": spec.seed,
        },
        "horizon": horizon,
        "feature_dim": model.feature_dim,
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "scaler_mean": scaler.mean.tolist(),
        "scaler_std": scaler.std.tolist(),
        "train_range": (
            [model.train_range[0].isoformat(), model.train_range[1].isoformat()]
            if model.train_range
            else None
        ),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_model(path: str | Path) -> tuple[FittedModel, Scaler, int]:
    payload = json.loads(Path(path).read_text())
    if payload.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema: {payload.get('schema_version')}")
    weights = np.array(payload["weights"], dtype=np.float64)
    if weights.shape[0] != payload["feature_dim"]:
        raise DimensionMismatch("stored weights do not match declared feature_dim")
    mean = np.array(payload["scaler_mean"], dtype=np.float64)
    std = np.array(payload["scaler_std"], dtype=np.float64)
    if mean.shape != weights.shape or std.shape != weights.shape:
        raise DimensionMismatch("stored scaler does not match feature_dim")
    spec = RegressorSpec(kind=payload["kind"], **payload["params"])
    train_range = None
    if payload["train_range"]:
        train_range = (
            dt.date.fromisoformat(payload["train_range"][0]),
            dt.date.fromisoformat(payload["train_range"][1]),
        )
    model = FittedModel(weights, float(payload["bias"]), spec, train_range)
    return model, Scaler(mean, std), int(payload["horizon"])
