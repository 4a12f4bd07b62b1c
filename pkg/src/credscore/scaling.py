"""Min-max feature scaling fitted on training data.

The downstream linear rankers are scale sensitive, and bounded inputs make
the display-bin fit stable, so features are mapped to [0, 1] by the
training min/max. Constant features map to 0; out-of-range values clamp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, SchemaMismatch
from .features import FeatureVector, matrix_from_vectors


@dataclass(frozen=True)
class ScalerParams:
    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    schema_version: str

    def __post_init__(self):
        if len(self.mins) != len(self.maxs):
            raise ValueError("mins/maxs length mismatch")
        if any(lo > hi for lo, hi in zip(self.mins, self.maxs)):
            raise ValueError("scaler has min > max")


def fit_scaler(vectors: list[FeatureVector]) -> ScalerParams:
    if len(vectors) < 2:
        raise InsufficientData(f"need >= 2 rows to fit a scaler, got {len(vectors)}")
    matrix = matrix_from_vectors(vectors)
    return ScalerParams(
        mins=tuple(np.min(matrix, axis=0).tolist()),
        maxs=tuple(np.max(matrix, axis=0).tolist()),
        schema_version=vectors[0].schema_version,
    )


def scale_array(matrix: np.ndarray, scaler: ScalerParams) -> np.ndarray:
    """Vectorized (x - min) / (max - min) with clamping; constant columns -> 0."""
    mins = np.asarray(scaler.mins)
    spans = np.asarray(scaler.maxs) - mins
    safe = np.where(spans > 0, spans, 1.0)
    scaled = (matrix - mins) / safe
    scaled = np.where(spans > 0, scaled, 0.0)
    return np.clip(scaled, 0.0, 1.0)


def apply_scaler(vector: FeatureVector, scaler: ScalerParams) -> FeatureVector:
    if vector.schema_version != scaler.schema_version:
        raise SchemaMismatch(
            f"vector schema {vector.schema_version!r} != scaler schema {scaler.schema_version!r}"
        )
    row = scale_array(vector.as_array()[None, :], scaler)[0]
    return FeatureVector(values=tuple(row.tolist()), schema_version=vector.schema_version)
