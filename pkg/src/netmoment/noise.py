"""Additive measurement noise and the backward linear drift correction.

Noise draws come from a counter-based generator keyed by (seed, stream), so
results do not depend on evaluation order.  The noise amplitude follows the
SNR convention sigma = sqrt(10^(-SNR/10) * Var(B3)) with Var taken as the
quadrature-weighted population variance over the disk (a plain-variance
toggle exists for comparison).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quad import FieldMap, Provenance

__all__ = [
    "NoiseSpec",
    "DetrendPoint",
    "add_noise",
    "noise_sigma",
    "detrend_backward",
]


@dataclass(frozen=True)
class NoiseSpec:
    """snr_db may be math.inf for a pass-through; seed feeds a Philox key.

    stream separates independent draws sharing one seed (e.g. sweep cells);
    weighted_variance selects the quadrature-weighted Var(B3) (default) or
    the plain per-node sample variance.
    """

    snr_db: float
    seed: int
    stream: int = 0
    weighted_variance: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.snr_db) or self.snr_db == math.inf):
            raise ValueError("snr_db must be finite or +inf")
        if self.seed < 0 or self.stream < 0:
            raise ValueError("seed and stream must be nonnegative")


def _generator(spec: NoiseSpec) -> np.random.Generator:
    key = (int(spec.seed) & (2**64 - 1)) | (int(spec.stream) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def noise_sigma(field_map: FieldMap, spec: NoiseSpec) -> float:
    """Per-node noise standard deviation implied by the SNR."""
    if spec.snr_db == math.inf:
        return 0.0
    s = field_map.samples
    if spec.weighted_variance:
        w = field_map.grid.weights
        mean = float(np.sum(w * s) / np.sum(w))
        var = float(np.sum(w * (s - mean) ** 2) / np.sum(w))
    else:
        var = float(s.var())
    return math.sqrt(10.0 ** (-spec.snr_db / 10.0) * var)


def add_noise(field_map: FieldMap, spec: NoiseSpec) -> FieldMap:
    """Independent Gaussian draws per node, in node-index order."""
    if field_map.provenance.kind != "clean":
        raise ValueError("map already carries noise")
    if spec.snr_db == math.inf:
        return FieldMap(grid=field_map.grid, samples=field_map.samples,
                        unit_system=field_map.unit_system,
                        provenance=Provenance("noisy", snr_db=math.inf, seed=spec.seed))
    sigma = noise_sigma(field_map, spec)
    draws = _generator(spec).standard_normal(len(field_map.samples))
    return FieldMap(grid=field_map.grid,
                    samples=field_map.samples + sigma * draws,
                    unit_system=field_map.unit_system,
                    provenance=Provenance("noisy", snr_db=spec.snr_db, seed=spec.seed))


@dataclass(frozen=True)
class DetrendPoint:
    radius: float
    value: float
    fitted: bool  # False where the backward window had too little history


def detrend_backward(series: Sequence[tuple[float, float]],
                     window: int = 11) -> list[DetrendPoint]:
    """Backward linear regression drift correction over a radius sweep.

    For each point with at least window-1 predecessors, fit value = b0 + b1*A
    over the current and nearest smaller-radius points and report the
    intercept b0, i.e. the local line extrapolated to A = 0.  Earlier points
    keep their raw value, flagged fitted=False.
    """
    if window < 3:
        raise ValueError(f"window must be at least 3, got {window}")
    pts = [(float(a), float(v)) for a, v in series]
    radii = [a for a, _ in pts]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("series must be sorted by strictly ascending radius")
    if len(pts) < window:
        raise ValueError(
            f"series of length {len(pts)} has no index with {window - 1} predecessors"
        )
    out = []
    for i, (a, v) in enumerate(pts):
        if i < window - 1:
            out.append(DetrendPoint(a, v, False))
            continue
        chunk = pts[i - window + 1:i + 1]
        xs = np.array([c[0] for c in chunk])
        ys = np.array([c[1] for c in chunk])
        xbar = xs.mean()
        ybar = ys.mean()
        sxx = float(np.sum((xs - xbar) ** 2))
        b1 = float(np.sum((xs - xbar) * (ys - ybar))) / sxx
        out.append(DetrendPoint(a, float(ybar - b1 * xbar), True))
    return out
