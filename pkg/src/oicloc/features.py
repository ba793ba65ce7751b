"""Deterministic snippet features for corpora that ship activations only.

The manifest format carries no backbone feature files, so the regressor input
is a fixed random lift of the CAS: the K class rows plus their per-snippet
maximum, projected to feature_dim channels and squashed. The projection seed
is a package constant so that training and inference always agree.
"""
from __future__ import annotations

import numpy as np

from .cas import Cas

_EMBED_SEED = 180907


def cas_to_features(cas: Cas, feature_dim: int) -> np.ndarray:
    """Lift a K x T CAS to a feature_dim x T feature map, deterministically."""
    aug = np.vstack([cas.act, cas.act.max(axis=0, keepdims=True)])
    rng = np.random.default_rng(_EMBED_SEED + cas.num_classes)
    proj = rng.standard_normal((feature_dim, aug.shape[0])) / np.sqrt(aug.shape[0])
    return np.tanh(proj @ aug)
