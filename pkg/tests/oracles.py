"""Independent oracles used by the test suite.

Each oracle reaches a tested quantity by a different route than the library:
exact Taylor coefficients of the dipole Fourier transform, harmonic-resolved
ring fits of the raw field, high-precision one-sided differences of the ring
integrals, closed-form polynomial disk integrals.
"""
from __future__ import annotations

import math

import numpy as np

from netmoment import DipoleScene, b3


def ft_series_coefficient(scene: DipoleScene, q: int) -> tuple[float, float]:
    """Coefficient of k1^q in (Im, Re) of the planar Fourier transform.

    For a dipole ensemble the transform along the k1 axis is, for k1 > 0,

        pi * sum_d k1 e^(-2 pi u k1) [ (m1 cos + m3 sin)(2 pi t1 k1) ]   (Im)
        pi * sum_d k1 e^(-2 pi u k1) [ (m3 cos - m1 sin)(2 pi t1 k1) ]   (Re)

    whose power series follows from multiplying the exponential and trig
    series; this never touches the moment-combination formulas under test.
    """
    im = 0.0
    re = 0.0
    p = q - 1
    if p < 0:
        return 0.0, 0.0
    for pos, mom in zip(scene.positions, scene.moments):
        u = scene.height - pos[2]
        t1 = pos[0]
        cos_part = math.fsum(
            (-2 * math.pi * u) ** i / math.factorial(i)
            * (-1) ** (j // 2) * (2 * math.pi * t1) ** j / math.factorial(j)
            for i in range(p + 1) for j in (p - i,) if j % 2 == 0
        )
        sin_part = math.fsum(
            (-2 * math.pi * u) ** i / math.factorial(i)
            * (-1) ** ((j - 1) // 2) * (2 * math.pi * t1) ** j / math.factorial(j)
            for i in range(p + 1) for j in (p - i,) if j % 2 == 1
        )
        im += math.pi * (mom[0] * cos_part + mom[2] * sin_part)
        re += math.pi * (mom[2] * cos_part - mom[0] * sin_part)
    return im * scene.mu0, re * scene.mu0


def ft_im_direct(scene: DipoleScene, k1: float) -> float:
    """Im of the transform at a finite k1 > 0 from the same closed form."""
    total = 0.0
    for pos, mom in zip(scene.positions, scene.moments):
        u = scene.height - pos[2]
        total += math.pi * k1 * math.exp(-2 * math.pi * u * k1) * (
            mom[0] * math.cos(2 * math.pi * pos[0] * k1)
            + mom[2] * math.sin(2 * math.pi * pos[0] * k1)
        )
    return total * scene.mu0


def ring_harmonic_fit(scene: DipoleScene, r_lo: float, r_hi: float,
                      n_radii: int = 24, n_theta: int = 256) -> dict[str, float]:
    """Identifiable far-field functionals fitted from raw field samples.

    Samples the exact field on a far ring, resolves angular harmonics by FFT,
    and fits each harmonic against its radial power ladder (with one nuisance
    power absorbing the next expansion order).  The thirteen expansion
    coefficients are only identifiable through ten functionals:

        a0 | a1_1, a1_2 | s0 = a2 + (a3_1 + a3_2)/2 | c2 = (a3_1 - a3_2)/2
        s2 = a3_3/2 | c13 = a4_1 + (3 a5_1 + a5_4)/4
        s13 = a4_2 + (3 a5_2 + a5_3)/4 | c33 = (a5_1 - a5_4)/4
        s33 = (a5_3 - a5_2)/4
    """
    radii = np.geomspace(r_lo, r_hi, n_radii)
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    pts = np.stack([np.outer(radii, np.cos(theta)), np.outer(radii, np.sin(theta))],
                   axis=-1)
    vals = b3(scene, pts) * radii[:, None] ** 3
    spec = np.fft.rfft(vals, axis=1) / n_theta
    harm = {
        (0, "c"): spec[:, 0].real,
        (1, "c"): 2 * spec[:, 1].real,
        (1, "s"): -2 * spec[:, 1].imag,
        (2, "c"): 2 * spec[:, 2].real,
        (2, "s"): -2 * spec[:, 2].imag,
        (3, "c"): 2 * spec[:, 3].real,
        (3, "s"): -2 * spec[:, 3].imag,
    }

    def fit(y: np.ndarray, powers: tuple[int, ...]) -> np.ndarray:
        cols = np.stack([radii ** (-p) for p in powers], axis=1)
        scale = np.abs(cols).max(axis=0)
        sol, *_ = np.linalg.lstsq(cols / scale, y, rcond=None)
        return sol / scale

    out = {}
    out["a0"], out["s0"], _ = fit(harm[(0, "c")], (0, 2, 4))
    out["a1_1"], out["c13"], _ = fit(harm[(1, "c")], (1, 3, 5))
    out["a1_2"], out["s13"], _ = fit(harm[(1, "s")], (1, 3, 5))
    out["c2"], _ = fit(harm[(2, "c")], (2, 4))
    out["s2"], _ = fit(harm[(2, "s")], (2, 4))
    out["c33"], _ = fit(harm[(3, "c")], (3, 5))
    out["s33"], _ = fit(harm[(3, "s")], (3, 5))
    return out


def identifiable_functionals(coeffs) -> dict[str, float]:
    """The same ten functionals computed from an exact coefficient set."""
    a3_1, a3_2, a3_3 = coeffs.a3
    a5_1, a5_2, a5_3, a5_4 = coeffs.a5
    return {
        "a0": coeffs.a0,
        "a1_1": coeffs.a1[0],
        "a1_2": coeffs.a1[1],
        "s0": coeffs.a2 + (a3_1 + a3_2) / 2,
        "c2": (a3_1 - a3_2) / 2,
        "s2": a3_3 / 2,
        "c13": coeffs.a4[0] + (3 * a5_1 + a5_4) / 4,
        "s13": coeffs.a4[1] + (3 * a5_2 + a5_3) / 4,
        "c33": (a5_1 - a5_4) / 4,
        "s33": (a5_3 - a5_2) / 4,
    }


def disk_monomial_integral(radius: float, a: int, b: int) -> float:
    """Exact iint over the disk of x1^a x2^b."""
    if a % 2 or b % 2:
        return 0.0

    def half_fact(n):  # (n-1)!! for even n entering the angular average
        out = 1
        for k in range(1, n, 2):
            out *= k
        return out

    n = a + b
    # angular integral of cos^a sin^b over the full circle
    ang = 2 * math.pi * half_fact(a) * half_fact(b) / math.prod(range(2, n + 2, 2))
    return radius ** (n + 2) / (n + 2) * ang


def high_precision_ring_fd(radius: float, coeff_sets, dps: int = 60):
    """One-sided derivatives of the ring integrals at k1 = 0+, via mpmath.

    Evaluates the closed forms at high precision on a geometric ladder of
    tiny k1 values, then solves the odd/even Vandermonde systems so the
    derivative extraction itself is independent of the Taylor table.
    Returns ({order: value} for the sin side, {order: value} for cos),
    contracted with the given (sin-groups, cos-groups) coefficient tuples.
    """
    import mpmath as mp

    sin_coeffs, cos_coeffs = coeff_sets
    with mp.workdps(dps):
        A = mp.mpf(radius)
        two_pi = 2 * mp.pi
        h = mp.mpf("1e-4") / A

        def components(k1):
            rho = two_pi * k1 * A
            j0 = mp.besselj(0, rho)
            j1 = mp.besselj(1, rho)
            j1p = j0 - j1 / rho
            h0 = mp.struveh(0, rho)
            h1 = mp.struveh(1, rho)
            g = mp.pi * rho * (j0 * h1 - j1 * h0)
            t1 = (j1 / rho**2 + j1p / rho - j0 / rho + 1 + j1 - rho * j0 + g / 2)
            t3 = (j0 / (3 * rho) + j1 / (3 * rho**2) - mp.mpf(1) / 3 - j1 / 3
                  + rho * j0 / 3 - g / 6)
            t5 = (4 * j1 / (15 * rho**4) + j1p / (15 * rho**3) - j0 / (45 * rho)
                  - j1 / (45 * rho**2) + mp.mpf(1) / 45 + j1 / 45 - rho * j0 / 45 + g / 90)
            t7 = (6 * j1 / (35 * rho**6) + j1p / (35 * rho**5) - 4 * j1 / (525 * rho**4)
                  - j1p / (525 * rho**3) + j0 / (1575 * rho) + j1 / (1575 * rho**2)
                  - mp.mpf(1) / 1575 - j1 / 1575 + rho * j0 / 1575 - g / 3150)
            ps1 = two_pi**2 * k1 / A
            ps3 = two_pi**2 * k1 / A**3
            i_sin = (ps1 * rho * t3,
                     ps3 * rho**3 * t5,
                     ps3 * (5 * j1 / rho**3 + j1p / rho**2 - 30 * rho**3 * t7),
                     -ps3 * (5 * j1 / rho**3 + j1p / rho**2 - rho**3 * t5
                             - 30 * rho**3 * t7))
            pc1 = two_pi / A
            pc3 = two_pi / A**3
            i_cos = (pc1 * (j0 - rho * t1),
                     pc3 * (j0 - rho**3 * t3) / 3,
                     pc3 * (-j1 / rho + 4 * rho**3 * t5),
                     pc3 * (j0 / 3 + j1 / rho - rho**3 * t3 / 3 - 4 * rho**3 * t5))
            f_sin = mp.fsum(c * v for c, v in zip(sin_coeffs, i_sin))
            f_cos = mp.fsum(c * v for c, v in zip(cos_coeffs, i_cos))
            return f_sin, f_cos

        # The integrals are analytic in rho = 2 pi k1 radius for k1 > 0 with
        # every integer power present (the even powers are the |k1| part), so
        # fit the full ladder k1^p and read the orders of interest.  Scaled
        # unknowns d_p = c_p h^p keep the Vandermonde in integer powers.
        n_pts = 16
        sin_vals = mp.matrix(n_pts, 1)
        cos_vals = mp.matrix(n_pts, 1)
        for j in range(1, n_pts + 1):
            f_sin, f_cos = components(j * h)
            sin_vals[j - 1] = f_sin
            cos_vals[j - 1] = f_cos
        m_sin = mp.matrix(n_pts, n_pts)
        m_cos = mp.matrix(n_pts, n_pts)
        for j in range(1, n_pts + 1):
            for i in range(n_pts):
                m_sin[j - 1, i] = mp.mpf(j) ** (i + 1)   # powers 1..n
                m_cos[j - 1, i] = mp.mpf(j) ** i         # powers 0..n-1
        c_sin = mp.lu_solve(m_sin, sin_vals)
        c_cos = mp.lu_solve(m_cos, cos_vals)
        sin_out = {q: float(c_sin[q - 1] / h**q * mp.factorial(q))
                   for q in (1, 3, 5, 7, 9, 11)}
        cos_out = {q: float(c_cos[q] / h**q * mp.factorial(q))
                   for q in (0, 2, 4, 6, 8, 10)}
    return sin_out, cos_out
