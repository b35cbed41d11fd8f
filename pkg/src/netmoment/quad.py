"""Disk quadrature grids and sampled field maps.

The grid is a Gauss-Legendre rule in radius (Jacobian folded into the
weights) crossed with a uniform angular rule, so any disk integral of a
sampled field is a plain weighted dot product.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .field import b3
from .scene import DipoleScene

__all__ = [
    "DiskGrid",
    "Provenance",
    "FieldMap",
    "build_grid",
    "sample_field",
    "integrate_weighted",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class DiskGrid:
    """Quadrature nodes and weights covering the disk |x| <= radius."""

    radius: float
    n_radial: int
    n_angular: int
    nodes: np.ndarray      # (M, 2)
    weights: np.ndarray    # (M,)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2 or len(weights) != len(nodes):
            raise ValueError("grid nodes must be (M, 2) with matching weights")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        area = math.pi * self.radius**2
        if abs(weights.sum() - area) > 1e-12 * area:
            raise ValueError("grid weights do not sum to the disk area")
        r2 = (nodes**2).sum(axis=1)
        if np.any(r2 > self.radius**2 * (1 + 1e-12)):
            raise ValueError("grid contains nodes outside the disk")


@dataclass(frozen=True)
class Provenance:
    kind: str                       # "clean" | "noisy"
    snr_db: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("clean", "noisy"):
            raise ValueError(f"provenance kind must be clean or noisy, got {self.kind!r}")


@dataclass(frozen=True)
class FieldMap:
    """Per-node field samples on a disk grid (tesla when unit_system is si)."""

    grid: DiskGrid
    samples: np.ndarray
    unit_system: str = "si"
    provenance: Provenance = Provenance("clean")

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.shape != (len(self.grid.nodes),):
            raise ValueError("sample count must match the grid node count")
        if not np.all(np.isfinite(samples)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def radius(self) -> float:
        return self.grid.radius


def build_grid(radius: float, n_radial: int = 200, n_angular: int = 256) -> DiskGrid:
    """Gauss-Legendre x uniform-angle tensor rule on the disk of given radius."""
    radius = float(radius)
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    if n_radial < 4:
        raise ValueError(f"n_radial must be at least 4, got {n_radial}")
    if n_angular < 8 or n_angular % 2:
        raise ValueError(f"n_angular must be even and at least 8, got {n_angular}")
    xg, wg = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * radius * (xg + 1.0)
    wr = 0.5 * radius * wg * r                       # radial weight with Jacobian r
    theta = 2.0 * math.pi * np.arange(n_angular) / n_angular
    nodes = np.stack(
        [np.outer(r, np.cos(theta)).ravel(), np.outer(r, np.sin(theta)).ravel()],
        axis=-1,
    )
    weights = np.repeat(wr, n_angular) * (2.0 * math.pi / n_angular)
    return DiskGrid(radius, n_radial, n_angular, nodes, weights)


def sample_field(scene: DipoleScene, grid: DiskGrid) -> FieldMap:
    """Evaluate the scene's normal field at every node, in node order."""
    return FieldMap(grid=grid, samples=b3(scene, grid.nodes),
                    unit_system=scene.unit_system, provenance=Provenance("clean"))


def integrate_weighted(field_map: FieldMap, weight: Callable[[np.ndarray], np.ndarray]) -> float:
    """sum over nodes of weight(x) * sample * node_weight."""
    w = np.asarray(weight(field_map.grid.nodes), dtype=float)
    return float(np.dot(w * field_map.grid.weights, field_map.samples))


def write_field_csv(field_map: FieldMap, path: str) -> None:
    """Field map CSV: header x1,x2,weight,b3; SI units; full float round trip."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "weight", "b3"])
        for (x1, x2), w, s in zip(field_map.grid.nodes, field_map.grid.weights,
                                  field_map.samples):
            writer.writerow([repr(float(x1)), repr(float(x2)),
                             repr(float(w)), repr(float(s))])


def read_field_csv(path: str, unit_system: str = "si") -> FieldMap:
    """Read a field-map CSV back; the disk radius is recovered from the weights."""
    nodes, weights, samples = [], [], []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x1", "x2", "weight", "b3"]:
            raise ValueError(f"unexpected field CSV header {header!r} in {path}")
        for row in reader:
            x1, x2, w, s = map(float, row)
            nodes.append((x1, x2))
            weights.append(w)
            samples.append(s)
    if not nodes:
        raise ValueError(f"field CSV {path} contains no nodes")
    nodes_arr = np.array(nodes)
    weights_arr = np.array(weights)
    radius = math.sqrt(weights_arr.sum() / math.pi)
    n_radial = len(np.unique(np.round((nodes_arr**2).sum(axis=1), 24)))
    grid = DiskGrid(radius, n_radial, max(len(nodes) // max(n_radial, 1), 8),
                    nodes_arr, weights_arr)
    return FieldMap(grid=grid, samples=np.array(samples), unit_system=unit_system)
