"""Normal field of a dipole scene and its far-field expansion.

b3 is the exact closed-form field on the measurement plane.  The thirteen
far-field coefficients are fixed linear combinations of the scene's
monomial moments; b3_asympt evaluates the corresponding 1/|x|^3 ... 1/|x|^9
expansion, and asympt_condition_margin gives the exact supremum of the
large-disk applicability condition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import DipoleScene, height_moment

__all__ = [
    "AsymptCoeffs",
    "b3",
    "asympt_coefficients",
    "b3_asympt",
    "asympt_condition_margin",
    "condition_margin_bruteforce",
]

_PI = math.pi


@dataclass(frozen=True)
class AsymptCoeffs:
    """Far-field expansion coefficients, in field units.

    a0 scales 1/|x|^3; a1 the odd 1/|x|^5 pair; a2 the even 1/|x|^5 term;
    a3 the quadratic 1/|x|^7 triple; a4 the odd 1/|x|^7 pair; a5 the cubic
    1/|x|^9 quadruple.  When the source scene is SI the mu0 factor is folded
    in, matching tesla-valued fields.
    """

    a0: float
    a1: tuple[float, float]
    a2: float
    a3: tuple[float, float, float]
    a4: tuple[float, float]
    a5: tuple[float, float, float, float]

    def scaled(self, factor: float) -> "AsymptCoeffs":
        return AsymptCoeffs(
            a0=self.a0 * factor,
            a1=tuple(v * factor for v in self.a1),
            a2=self.a2 * factor,
            a3=tuple(v * factor for v in self.a3),
            a4=tuple(v * factor for v in self.a4),
            a5=tuple(v * factor for v in self.a5),
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, *self.a1, self.a2, *self.a3, *self.a4, *self.a5])


def b3(scene: DipoleScene, x) -> np.ndarray | float:
    """Exact normal field on the plane x3 = height at planar points x.

    x may be a single 2-vector or an (..., 2) array; the return matches.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[-1] != 2:
        raise ValueError("evaluation points must have 2 components")
    if not len(scene.dipoles):
        out = np.zeros(pts.shape[:-1])
        return float(out[0]) if scalar else out.reshape(x.shape[:-1])
    pos = scene.positions
    mom = scene.moments
    u = scene.height - pos[:, 2]                      # h - t3 > 0 per scene invariant
    dx1 = pts[..., 0, None] - pos[:, 0]
    dx2 = pts[..., 1, None] - pos[:, 1]
    r2 = dx1**2 + dx2**2
    num = 3.0 * u * (dx1 * mom[:, 0] + dx2 * mom[:, 1]) + (2.0 * u**2 - r2) * mom[:, 2]
    vals = (scene.mu0 / (4.0 * _PI)) * np.sum(num / (r2 + u**2) ** 2.5, axis=-1)
    return float(vals[0]) if scalar else vals.reshape(x.shape[:-1])


def asympt_coefficients(scene: DipoleScene) -> AsymptCoeffs:
    """The thirteen far-field coefficients from the scene moments."""
    def hm(p, q, r, n):
        return height_moment(scene, p, q, r, n)

    m3 = hm(0, 0, 0, 3)
    a0 = -m3 / (4 * _PI)
    a1 = (
        3 / (4 * _PI) * (hm(1, 0, 0, 1) - hm(0, 1, 0, 3)),
        3 / (4 * _PI) * (hm(1, 0, 0, 2) - hm(0, 0, 1, 3)),
    )
    a2 = -3 / (8 * _PI) * (
        2 * hm(1, 1, 0, 1) + 2 * hm(1, 0, 1, 2)
        - 3 * hm(2, 0, 0, 3) - hm(0, 2, 0, 3) - hm(0, 0, 2, 3)
    )
    a3 = (
        15 / (8 * _PI) * (2 * hm(1, 1, 0, 1) - hm(0, 2, 0, 3)),
        15 / (8 * _PI) * (2 * hm(1, 0, 1, 2) - hm(0, 0, 2, 3)),
        15 / (4 * _PI) * (hm(1, 0, 1, 1) + hm(1, 1, 0, 2) - hm(0, 1, 1, 3)),
    )
    a4 = (
        -15 / (8 * _PI) * (
            3 * hm(1, 2, 0, 1) + hm(1, 0, 2, 1) + hm(3, 0, 0, 1) + 2 * hm(1, 1, 1, 2)
            - hm(0, 3, 0, 3) - hm(0, 1, 2, 3) - 3 * hm(2, 1, 0, 3)
        ),
        -15 / (8 * _PI) * (
            3 * hm(1, 0, 2, 2) + hm(1, 2, 0, 2) + hm(3, 0, 0, 2) + 2 * hm(1, 1, 1, 1)
            - hm(0, 0, 3, 3) - hm(0, 2, 1, 3) - 3 * hm(2, 0, 1, 3)
        ),
    )
    a5 = (
        35 / (8 * _PI) * (3 * hm(1, 2, 0, 1) - hm(0, 3, 0, 3)),
        35 / (8 * _PI) * (3 * hm(1, 0, 2, 2) - hm(0, 0, 3, 3)),
        105 / (8 * _PI) * (hm(1, 2, 0, 2) + 2 * hm(1, 1, 1, 1) - hm(0, 2, 1, 3)),
        105 / (8 * _PI) * (hm(1, 0, 2, 1) + 2 * hm(1, 1, 1, 2) - hm(0, 1, 2, 3)),
    )
    coeffs = AsymptCoeffs(a0=a0, a1=a1, a2=a2, a3=a3, a4=a4, a5=a5)
    return coeffs.scaled(scene.mu0) if scene.unit_system == "si" else coeffs


def b3_asympt(coeffs: AsymptCoeffs, x) -> np.ndarray | float:
    """Far-field expansion at planar points x (|x| > 0 required)."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    pts = np.atleast_2d(x)
    x1 = pts[..., 0]
    x2 = pts[..., 1]
    r2 = x1**2 + x2**2
    if np.any(r2 == 0.0):
        raise ValueError("b3_asympt is singular at x = (0, 0)")
    r = np.sqrt(r2)
    vals = (
        coeffs.a0 / r**3
        + (coeffs.a1[0] * x1 + coeffs.a1[1] * x2) / r**5
        + coeffs.a2 / r**5
        + (coeffs.a3[0] * x1**2 + coeffs.a3[1] * x2**2 + coeffs.a3[2] * x1 * x2) / r**7
        + (coeffs.a4[0] * x1 + coeffs.a4[1] * x2) / r**7
        + (coeffs.a5[0] * x1**3 + coeffs.a5[1] * x2**3
           + coeffs.a5[2] * x1**2 * x2 + coeffs.a5[3] * x1 * x2**2) / r**9
    )
    return float(vals[0]) if scalar else vals.reshape(x.shape[:-1])


def asympt_condition_margin(scene: DipoleScene, radius: float) -> float:
    """Exact sup of the large-disk condition over |x| >= radius and the dipoles.

    Per dipole the sup is attained on |x| = radius with x antiparallel to the
    horizontal offset, giving (t1^2 + t2^2 + (h-t3)^2 + 2 A sqrt(t1^2+t2^2))/A^2.
    The expansion machinery applies iff the returned margin is < 1.
    """
    radius = float(radius)
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    if not len(scene.dipoles):
        return 0.0
    p = scene.positions
    u = scene.height - p[:, 2]
    tperp2 = p[:, 0]**2 + p[:, 1]**2
    vals = (tperp2 + u**2 + 2.0 * radius * np.sqrt(tperp2)) / radius**2
    return float(vals.max())


def condition_margin_bruteforce(scene: DipoleScene, radius: float,
                                n_angles: int = 720, n_radii: int = 400,
                                r_max_factor: float = 50.0) -> float:
    """Dense-grid maximisation of the condition expression (testing aid)."""
    if not len(scene.dipoles):
        return 0.0
    best = 0.0
    angles = 2 * _PI * np.arange(n_angles) / n_angles
    radii = radius * np.exp(np.linspace(0.0, math.log(r_max_factor), n_radii))
    x1 = np.outer(radii, np.cos(angles)).ravel()
    x2 = np.outer(radii, np.sin(angles)).ravel()
    rr = x1**2 + x2**2
    for dip, u in zip(scene.positions, scene.height - scene.positions[:, 2]):
        t1, t2 = dip[0], dip[1]
        expr = np.abs((t1 * t1 + t2 * t2 + u * u) / rr - 2 * (x1 * t1 + x2 * t2) / rr)
        best = max(best, float(expr.max()))
    return best
