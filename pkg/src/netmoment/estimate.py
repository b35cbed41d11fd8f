"""Moment estimators of increasing asymptotic order and their diagnostics.

Tangential components support orders 1..5, the normal component orders 2..4
(with a free axis choice at orders >= 3).  Alongside the estimators live the
Fourier-side Taylor coefficients (d's), the data-side T quantities whose
exact linear dependences raise the estimator order, closed-form leading
error terms, far-field coefficient recovery from data, and radius sweeps
with log-log convergence slopes.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .field import AsymptCoeffs, asympt_coefficients, asympt_condition_margin, b3
from .noise import NoiseSpec, add_noise
from .quad import FieldMap, build_grid, integrate_weighted, sample_field
from .scene import MU0, DipoleScene, height_moment, net_moment

__all__ = [
    "EstimatorSpec",
    "DCoefficients",
    "TQuantities",
    "RecoveredCoeffs",
    "GridParams",
    "SweepRow",
    "SweepResult",
    "estimator_weight",
    "estimate_moment",
    "d_coefficients",
    "t_quantities",
    "t_quantities_analytic",
    "predicted_leading_error",
    "recovered_coefficients",
    "sweep",
    "convergence_slope",
    "raster_m3_drift_series",
    "all_specs",
]

_PI = math.pi

_COMPONENTS = ("m1", "m2", "m3")
_AXES = ("x1", "x2")


@dataclass(frozen=True)
class EstimatorSpec:
    """Which moment component, at which asymptotic order, along which axis.

    The axis matters only for the normal component at order >= 3, where the
    data enter through powers of either x1 or x2.
    """

    component: str
    order: int
    axis: str = "x1"

    def __post_init__(self):
        if self.component not in _COMPONENTS:
            raise ValueError(f"component must be one of {_COMPONENTS}, got {self.component!r}")
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {self.axis!r}")
        valid = range(1, 6) if self.component in ("m1", "m2") else range(2, 5)
        if self.order not in valid:
            raise ValueError(
                f"order {self.order} not available for {self.component}; "
                f"supported: {list(valid)}"
            )

    def label(self) -> str:
        if self.component == "m3" and self.order >= 3:
            return f"{self.component}:{self.order}:{self.axis}"
        return f"{self.component}:{self.order}"

    @classmethod
    def parse(cls, text: str) -> "EstimatorSpec":
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"spec must look like component:order[:axis], got {text!r}")
        comp = parts[0]
        try:
            order = int(parts[1])
        except ValueError as exc:
            raise ValueError(f"order in {text!r} must be an integer") from exc
        axis = parts[2] if len(parts) == 3 else "x1"
        return cls(comp, order, axis)


def all_specs() -> list[EstimatorSpec]:
    """Every implemented estimator, both axes for the higher normal orders."""
    specs = [EstimatorSpec(c, o) for c in ("m1", "m2") for o in range(1, 6)]
    specs.append(EstimatorSpec("m3", 2))
    specs.extend(EstimatorSpec("m3", o, ax) for o in (3, 4) for ax in _AXES)
    return specs


def estimator_weight(spec: EstimatorSpec, radius: float) -> Callable[[np.ndarray], np.ndarray]:
    """The weight polynomial w(x) of the estimator, as a callable on (..., 2) points.

    The moment estimate is (1/mu0) iint w * B3 over the disk of the given radius.
    """
    radius = float(radius)
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    comp, order = spec.component, spec.order
    axis_idx = 0 if (comp == "m1" or (comp == "m3" and spec.axis == "x1")) else 1
    if comp == "m2":
        axis_idx = 1

    def weight(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xj = x[..., axis_idx]
        u = xj / radius
        if comp in ("m1", "m2"):
            if order == 1:
                return 2.0 * xj
            if order == 2:
                return 2.0 * (1.0 + 4.0 * u**2 / 3.0) * xj
            if order == 3:
                return 0.4 * (5.0 + 24.0 * u**4) * xj
            if order == 4:
                return (2.0 / 105.0) * (105.0 - 2016.0 * u**4 + 19200.0 * u**6
                                        - 22400.0 * u**8) * xj
            # order 5; the u^8 coefficient follows from the exact T-ladder
            return (2.0 / 693.0) * (693.0 - 158400.0 * u**6 + 739200.0 * u**8
                                    - 677376.0 * u**10) * xj
        if order == 2:
            return np.full_like(xj, 2.0 * radius)
        if order == 3:
            return (radius / 4.0) * (5.0 + 40.0 * u**4 - 128.0 * u**6)
        return (radius / 24.0) * (35.0 + 1792.0 * u**6 - 3200.0 * u**8)

    return weight


def estimate_moment(field_map: FieldMap, spec: EstimatorSpec) -> float:
    """Weighted disk integral of the sampled field, in A*m^2."""
    value = integrate_weighted(field_map, estimator_weight(spec, field_map.radius))
    return value / MU0 if field_map.unit_system == "si" else value


@dataclass(frozen=True)
class DCoefficients:
    """Taylor coefficients at k1 = 0+ of the field's planar Fourier transform.

    Odd entries scale Im B3-hat along the k1 axis, even entries Re B3-hat.
    d1 equals pi*m1 identically.
    """

    d1: float
    d3: float
    d5: float
    d7: float
    d9: float
    d11: float
    d2: float
    d4: float
    d6: float
    d8: float
    d10: float


def d_coefficients(scene: DipoleScene) -> DCoefficients:
    def hm(p, q, n):
        return height_moment(scene, p, q, 0, n)

    d1 = _PI * hm(0, 0, 1)
    d3 = 2 * _PI**3 * (hm(2, 0, 1) - hm(0, 2, 1) - 2 * hm(1, 1, 3))
    d5 = (2 * _PI**5 / 3) * (hm(4, 0, 1) - 6 * hm(2, 2, 1) + hm(0, 4, 1)
                             - 4 * hm(3, 1, 3) + 4 * hm(1, 3, 3))
    d7 = (4 * _PI**7 / 45) * (hm(6, 0, 1) - 15 * hm(4, 2, 1) + 15 * hm(2, 4, 1)
                              - hm(0, 6, 1) - 6 * hm(5, 1, 3) + 20 * hm(3, 3, 3)
                              - 6 * hm(1, 5, 3))
    d9 = (2 * _PI**9 / 315) * (hm(8, 0, 1) - 28 * hm(6, 2, 1) + 70 * hm(4, 4, 1)
                               - 28 * hm(2, 6, 1) + hm(0, 8, 1) - 8 * hm(7, 1, 3)
                               + 56 * hm(5, 3, 3) - 56 * hm(3, 5, 3) + 8 * hm(1, 7, 3))
    d11 = (4 * _PI**11 / 14175) * (hm(10, 0, 1) - 45 * hm(8, 2, 1) + 210 * hm(6, 4, 1)
                                   - 210 * hm(4, 6, 1) + 45 * hm(2, 8, 1) - hm(0, 10, 1)
                                   - 10 * hm(9, 1, 3) + 120 * hm(7, 3, 3)
                                   - 252 * hm(5, 5, 3) + 120 * hm(3, 7, 3)
                                   - 10 * hm(1, 9, 3))
    d2 = -2 * _PI**2 * (hm(0, 1, 1) + hm(1, 0, 3))
    d4 = -(4 * _PI**4 / 3) * (3 * hm(2, 1, 1) - hm(0, 3, 1) + hm(3, 0, 3)
                              - 3 * hm(1, 2, 3))
    d6 = -(4 * _PI**6 / 15) * (5 * hm(4, 1, 1) - 10 * hm(2, 3, 1) + hm(0, 5, 1)
                               + hm(5, 0, 3) - 10 * hm(3, 2, 3) + 5 * hm(1, 4, 3))
    d8 = -(8 * _PI**8 / 315) * (7 * hm(6, 1, 1) - 35 * hm(4, 3, 1) + 21 * hm(2, 5, 1)
                                - hm(0, 7, 1) + hm(7, 0, 3) - 21 * hm(5, 2, 3)
                                + 35 * hm(3, 4, 3) - 7 * hm(1, 6, 3))
    d10 = -(4 * _PI**10 / 2835) * (9 * hm(8, 1, 1) - 84 * hm(6, 3, 1) + 126 * hm(4, 5, 1)
                                   - 36 * hm(2, 7, 1) + hm(0, 9, 1) + hm(9, 0, 3)
                                   - 36 * hm(7, 2, 3) + 126 * hm(5, 4, 3)
                                   - 84 * hm(3, 6, 3) + 9 * hm(1, 8, 3))
    mu = scene.mu0
    return DCoefficients(d1=mu * d1, d3=mu * d3, d5=mu * d5, d7=mu * d7, d9=mu * d9,
                         d11=mu * d11, d2=mu * d2, d4=mu * d4, d6=mu * d6,
                         d8=mu * d8, d10=mu * d10)


@dataclass(frozen=True)
class TQuantities:
    """The nine T quantities.

    Odd indices estimate (q+3) a4~ + (q+2) a5~ + a54~ from the tangential
    data moments, even indices (q+2) a2~ + (q+1) a31~ + a32~ from the normal
    ones (tilded coefficients are a/A^3).  Exact dependences:
    (t5 + t9)/2 = t7, (t7 + t11)/2 = t9, t0 = 3 t4 - 2 t6, t0 = 4 t6 - 3 t8.
    """

    t5: float
    t7: float
    t9: float
    t11: float
    t0: float
    t2: float
    t4: float
    t6: float
    t8: float


def _disk_moment(field_map: FieldMap, power: int, axis_idx: int) -> float:
    """iint x_j^power B3 over the disk (natural field units)."""
    val = integrate_weighted(field_map, lambda x: x[..., axis_idx] ** power)
    return val / MU0 if field_map.unit_system == "si" else val


def t_quantities(field_map: FieldMap, coeffs: AsymptCoeffs,
                 axis: str = "x1") -> TQuantities:
    """Data-side T quantities from a field map plus the a1~/m3 closures.

    The tangential rows need a1^(1)/A and the normal rows m3 = -4 pi a0; both
    are taken from the supplied coefficient set (analytic or recovered).
    When the map is SI the coefficients must carry the mu0 factor too.
    """
    a = field_map.radius
    axis_idx = 0 if axis == "x1" else 1
    scale = MU0 if field_map.unit_system == "si" else 1.0
    a1_t = coeffs.a1[axis_idx] / scale / a
    m3 = -4.0 * _PI * coeffs.a0 / scale
    u = {q: _disk_moment(field_map, q, axis_idx) for q in (0, 2, 4, 5, 6, 7, 8, 9, 11)}
    t5 = 64 * u[5] / (5 * _PI * a**4) - 8 * a1_t / 3
    t7 = 384 * u[7] / (7 * _PI * a**6) - 6 * a1_t
    t9 = 2560 * u[9] / (21 * _PI * a**8) - 60 * a1_t / 7
    t11 = 64512 * u[11] / (297 * _PI * a**10) - 98 * a1_t / 9
    t0 = (3 / _PI) * (m3 / (2 * a) - u[0]) / a
    t2 = -(4 / (_PI * a)) * (u[2] / a + m3 / 4) / a
    t4 = (8 / (_PI * a)) * (u[4] / a**3 + m3 / 16) / a
    t6 = (192 / (5 * _PI * a)) * (u[6] / a**5 + m3 / 32) / a
    t8 = (640 / (7 * _PI * a)) * (u[8] / a**7 + 5 * m3 / 256) / a
    return TQuantities(t5=t5, t7=t7, t9=t9, t11=t11, t0=t0, t2=t2, t4=t4, t6=t6, t8=t8)


def t_quantities_analytic(coeffs: AsymptCoeffs, radius: float) -> TQuantities:
    """The algebraic left sides of the T quantities from exact coefficients."""
    a3 = float(radius) ** 3
    a4t = coeffs.a4[0] / a3
    a51t = coeffs.a5[0] / a3
    a54t = coeffs.a5[3] / a3
    a2t = coeffs.a2 / a3
    a31t = coeffs.a3[0] / a3
    a32t = coeffs.a3[1] / a3
    return TQuantities(
        t5=8 * a4t + 7 * a51t + a54t,
        t7=10 * a4t + 9 * a51t + a54t,
        t9=12 * a4t + 11 * a51t + a54t,
        t11=14 * a4t + 13 * a51t + a54t,
        t0=2 * a2t + a31t + a32t,
        t2=4 * a2t + 3 * a31t + a32t,
        t4=6 * a2t + 5 * a31t + a32t,
        t6=8 * a2t + 7 * a31t + a32t,
        t8=10 * a2t + 9 * a31t + a32t,
    )


_PREDICTED_SPECS = {("m1", 1), ("m2", 1), ("m3", 2)}


def predicted_leading_error(scene: DipoleScene, spec: EstimatorSpec,
                            radius: float) -> float:
    """Closed-form leading term of (true moment - estimate), in A*m^2.

    Available only where a closed leading term exists: first-order tangential
    estimates and the second-order normal estimate.
    """
    if (spec.component, spec.order) not in _PREDICTED_SPECS:
        raise ValueError(
            f"no closed-form leading error for {spec.label()}; "
            "supported: m1:1, m2:1, m3:2"
        )
    radius = float(radius)
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = asympt_coefficients(scene)
    scale = scene.mu0
    if spec.component == "m1":
        combo = 4 * c.a4[0] + 3 * c.a5[0] + c.a5[3]
        return 2 * _PI * (c.a1[0] / radius + combo / (12 * radius**3)) / scale
    if spec.component == "m2":
        combo = 4 * c.a4[1] + 3 * c.a5[1] + c.a5[2]
        return 2 * _PI * (c.a1[1] / radius + combo / (12 * radius**3)) / scale
    return (2 * _PI / 3) * (2 * c.a2 + c.a3[0] + c.a3[1]) / radius**2 / scale


@dataclass(frozen=True)
class RecoveredCoeffs:
    """Far-field quantities recovered from disk data alone, per axis and order.

    a1_over_radius[(axis, order)] approximates a1^(axis)/A at asymptotic
    order 4 or 5; combo[(axis, order)] the (4 a4 + 3 a5 + a5-cross)/A^3
    combination entering the leading error term.  Values are in the map's
    field units (mu0 included for SI maps).
    """

    a1_over_radius: dict
    combo: dict


def recovered_coefficients(field_map: FieldMap) -> RecoveredCoeffs:
    a = field_map.radius
    a1 = {}
    combo = {}
    for axis, axis_idx in (("x1", 0), ("x2", 1)):
        def wint(poly: Callable[[np.ndarray], np.ndarray]) -> float:
            def w(x: np.ndarray) -> np.ndarray:
                u = x[..., axis_idx] / a
                return poly(u) * x[..., axis_idx]
            return integrate_weighted(field_map, w)

        a1_4 = -(4 / _PI) * wint(lambda u: 4.2 * u**4 - 36.0 * u**6 + 40.0 * u**8)
        a1_5 = (24 / _PI) * wint(lambda u: -9.0 * u**6 + 40.0 * u**8
                                 - (392.0 / 11.0) * u**10)
        combo_4 = (256 / _PI) * wint(lambda u: 0.2 * u**4 - (6.0 / 7.0) * u**6
                                     + (10.0 / 21.0) * u**8) + (100.0 / 21.0) * a1_4
        combo_5 = (128 / _PI) * wint(lambda u: (15.0 / 7.0) * u**6 - (100.0 / 21.0) * u**8
                                     + (56.0 / 33.0) * u**10) + (124.0 / 63.0) * a1_5
        a1[(axis, 4)] = a1_4
        a1[(axis, 5)] = a1_5
        combo[(axis, 4)] = combo_4
        combo[(axis, 5)] = combo_5
    return RecoveredCoeffs(a1_over_radius=a1, combo=combo)


@dataclass(frozen=True)
class GridParams:
    n_radial: int = 200
    n_angular: int = 256


@dataclass(frozen=True)
class SweepRow:
    radius: float
    spec: EstimatorSpec
    estimate: float
    true_value: float
    predicted_error: Optional[float] = None

    @property
    def abs_error(self) -> float:
        return abs(self.true_value - self.estimate)


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def for_spec(self, spec: EstimatorSpec) -> list[SweepRow]:
        rows = [r for r in self.rows if r.spec == spec]
        return sorted(rows, key=lambda r: r.radius)


def _sweep_cell(scene: DipoleScene, radius: float, specs: Sequence[EstimatorSpec],
                grid_params: GridParams, noise: Optional[NoiseSpec],
                stream: int, truth) -> list[SweepRow]:
    grid = build_grid(radius, grid_params.n_radial, grid_params.n_angular)
    fmap = sample_field(scene, grid)
    if noise is not None and noise.snr_db != math.inf:
        cell_spec = NoiseSpec(noise.snr_db, noise.seed, stream=stream,
                              weighted_variance=noise.weighted_variance)
        fmap = add_noise(fmap, cell_spec)
    rows = []
    for spec in specs:
        est = estimate_moment(fmap, spec)
        pred = None
        if (spec.component, spec.order) in _PREDICTED_SPECS:
            pred = predicted_leading_error(scene, spec, radius)
        comp_idx = {"m1": 0, "m2": 1, "m3": 2}[spec.component]
        rows.append(SweepRow(radius, spec, est, truth[comp_idx], pred))
    return rows


def sweep(scene: DipoleScene, radii: Sequence[float], specs: Sequence[EstimatorSpec],
          grid_params: GridParams = GridParams(), noise: Optional[NoiseSpec] = None,
          max_workers: int = 1) -> SweepResult:
    """Estimate every spec on every radius; rows sorted by radius within spec.

    Noise draws are keyed by (seed, radius index), so parallel execution
    cannot change the result.  A margin >= 1 at the smallest radius only
    warns: small radii outside the asymptotic regime are still useful data.
    """
    radii = [float(a) for a in radii]
    if any(a <= 0 for a in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly ascending")
    margin = asympt_condition_margin(scene, radii[0])
    if margin >= 1.0:
        warnings.warn(
            f"asymptotic condition fails at the smallest radius "
            f"(margin {margin:.3f} >= 1); small-radius rows are pre-asymptotic",
            stacklevel=2,
        )
    truth = net_moment(scene)
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(_sweep_cell, scene, a, specs, grid_params,
                                   noise, i, truth) for i, a in enumerate(radii)]
            chunks = [f.result() for f in futures]
    else:
        chunks = [_sweep_cell(scene, a, specs, grid_params, noise, i, truth)
                  for i, a in enumerate(radii)]
    rows = tuple(row for chunk in chunks for row in chunk)
    return SweepResult(rows=rows)


def convergence_slope(result: SweepResult, spec: EstimatorSpec,
                      top_fraction: float = 0.5) -> float:
    """Least-squares slope of log|error| against log radius.

    top_fraction selects the upper part of the log-radius range: with 0.5 on
    a one-decade sweep this is the classic top half-decade.
    """
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError("top_fraction must lie in (0, 1]")
    rows = result.for_spec(spec)
    if not rows:
        raise ValueError(f"no rows for spec {spec.label()}")
    radii = np.array([r.radius for r in rows])
    errors = np.array([r.abs_error for r in rows])
    cutoff = radii[-1] * (radii[0] / radii[-1]) ** top_fraction
    sel = radii >= cutoff * (1 - 1e-12)
    if sel.sum() < 4:
        raise ValueError("need at least 4 rows in the selected top fraction")
    if np.any(errors[sel] == 0.0):
        raise ValueError("zero error rows make the log-log fit degenerate")
    return float(np.polyfit(np.log(radii[sel]), np.log(errors[sel]), 1)[0])


def raster_m3_drift_series(scene: DipoleScene, radii: Sequence[float],
                           spec: EstimatorSpec, noise: Optional[NoiseSpec],
                           n_pixels: int = 256) -> list[tuple[float, float]]:
    """Normal-moment estimates over nested subdisks of one noisy raster.

    Mirrors the single-measurement protocol: a uniform Cartesian raster over
    the largest disk, one noise realization on it, then each radius estimate
    integrates the same pixels inside that subdisk.  Cumulative moment sums
    over radius-sorted pixels make the whole sweep one pass.
    """
    if spec.component != "m3":
        raise ValueError("drift series is defined for the normal component")
    radii = [float(a) for a in radii]
    r_max = radii[-1]
    step = 2.0 * r_max / n_pixels
    centers = -r_max + step * (np.arange(n_pixels) + 0.5)
    gx, gy = np.meshgrid(centers, centers, indexing="ij")
    r2 = (gx**2 + gy**2).ravel()
    inside = r2 <= r_max**2
    pts = np.stack([gx.ravel()[inside], gy.ravel()[inside]], axis=-1)
    samples = b3(scene, pts)
    if noise is not None and noise.snr_db != math.inf:
        sigma = math.sqrt(10.0 ** (-noise.snr_db / 10.0) * samples.var())
        key = (int(noise.seed) & (2**64 - 1)) | (int(noise.stream) << 64)
        rng = np.random.Generator(np.random.Philox(key=key))
        samples = samples + sigma * rng.standard_normal(len(samples))
    order = np.argsort(r2[inside])
    r_sorted = np.sqrt(r2[inside][order])
    axis_idx = 0 if spec.axis == "x1" else 1
    xj = pts[order, axis_idx]
    sv = samples[order] * step * step
    powers = {2: (0,), 3: (0, 4, 6), 4: (0, 6, 8)}[spec.order]
    cums = {k: np.cumsum(xj**k * sv) for k in powers}
    idx = np.searchsorted(r_sorted, radii, side="right") - 1
    scale = MU0 if scene.unit_system == "si" else 1.0
    out = []
    for a, p in zip(radii, idx):
        s = {k: cums[k][p] for k in powers}
        if spec.order == 2:
            est = 2.0 * a * s[0]
        elif spec.order == 3:
            est = (a / 4.0) * (5.0 * s[0] + 40.0 * s[4] / a**4 - 128.0 * s[6] / a**6)
        else:
            est = (a / 24.0) * (35.0 * s[0] + 1792.0 * s[6] / a**6 - 3200.0 * s[8] / a**8)
        out.append((a, est / scale))
    return out
