"""Combining per-offset price estimates with geometric decay weights.

A window of size w integrates w independent models, one per history offset:
the offset-j model sees the day that lies j days behind the target and adds
its predicted diff to that day's price.  The weight vector is produced by a
growth recurrence: starting from [1.0], each step keeps the prefix, splits
the last weight into last*r and last*(1-r), and appends.  Weight mass
therefore decays toward deeper history, the first weight attaching to the
nearest offset, and the weights always sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDecay, BadWindow, LengthMismatch, MissingOffset
from .features import Scaler, apply_scaler
from .regress import FittedModel, predict


@dataclass(frozen=True)
class EnsembleWeights:
    r: float
    window: int
    alphas: np.ndarray


@dataclass
class HorizonEnsemble:
    models: list[tuple[int, FittedModel, Scaler]]  # (offset, model, scaler)
    weights: EnsembleWeights

    @property
    def offsets(self) -> list[int]:
        return [offset for offset, _, _ in self.models]


def decay_weights(r: float, window: int) -> EnsembleWeights:
    """Weight vector [a_1..a_window] from the split-the-last recurrence."""
    if not (0.0 < r < 1.0):
        raise BadDecay(f"decay must lie in (0, 1), got {r}")
    if window < 1:
        raise BadWindow(f"window must be >= 1, got {window}")
    alphas = [1.0]
    for _ in range(window - 1):
        last = alphas[-1]
        alphas[-1] = last * r
        alphas.append(last * (1.0 - r))
    return EnsembleWeights(r, window, np.array(alphas, dtype=np.float64))


def integrate(estimates, weights: EnsembleWeights) -> float:
    """Convex combination sum(a_j * estimate_j).

    Evaluated anchored on the first estimate so that equal estimates come
    back unchanged and a single estimate passes through bit-exactly."""
    est = np.asarray(estimates, dtype=np.float64)
    if est.shape[0] != weights.alphas.shape[0]:
        raise LengthMismatch(
            f"{est.shape[0]} estimates vs {weights.alphas.shape[0]} weights"
        )
    anchor = float(est[0])
    return anchor + float(weights.alphas @ (est - anchor))


def predict_price(
    ensemble: HorizonEnsemble,
    day_features: dict[int, np.ndarray],
    base_prices: dict[int, float],
) -> float:
    """Integrated price estimate from per-offset features and base prices."""
    estimates = []
    for offset, model, scaler in ensemble.models:
        if offset not in day_features or offset not in base_prices:
            raise MissingOffset(offset)
        diff = predict(model, apply_scaler(scaler, day_features[offset]))
        estimates.append(base_prices[offset] + diff)
    return integrate(estimates, ensemble.weights)
