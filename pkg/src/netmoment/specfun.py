"""Bessel/Struve evaluation and the oscillatory ring-integral machinery.

Everything here feeds the far-field moment estimators: J0/J1 (series for
moderate arguments, Hankel big-argument form beyond), Struve H0/H1 by exact
rational series, closed forms for the semi-infinite Bessel tail integrals,
an oscillation-aware quadrature that can independently confirm each closed
form, and the small-frequency Taylor tables of the exterior sin/cos ring
integrals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable

import numpy as np

__all__ = [
    "DomainError",
    "STRUVE_MAX_ARG",
    "TailIntegralKind",
    "SinCosComponents",
    "bessel_j0",
    "bessel_j1",
    "bessel_j1_prime",
    "bessel_j2",
    "struve_h0",
    "struve_h1",
    "tail_integral",
    "tail_integral_quadrature",
    "tail_recursion_rhs",
    "ring_trig_integral",
    "sin_cos_components",
    "sin_cos_components_quadrature",
    "sin_cos_taylor",
]


class DomainError(ValueError):
    """Argument outside the supported numerical domain."""


# Struve series in double-rational arithmetic stays exact; beyond this the
# consumers (rho = 2*pi*k1*A) have no business anyway.
STRUVE_MAX_ARG = 50.0

_SERIES_CUTOFF = 18.0


def _bessel_series_frac(x: Fraction, n: int, tol_exp: int = 30) -> Fraction:
    """J_n by the ascending series in exact rational arithmetic.

    The terms grow to ~1e19 near x = 50 before cancelling; rationals keep the
    cancellation exact.
    """
    half = x / 2
    z = half * half
    term = half**n / math.factorial(n)
    total = term
    k = 1
    tol = Fraction(1, 10**tol_exp)
    while True:
        term = -term * z / (k * (n + k))
        total += term
        if abs(term) < tol:
            break
        k += 1
    return total


def _bessel_series(x: float, n: int) -> float:
    return float(_bessel_series_frac(Fraction(x), n, tol_exp=22))


def _hankel_pq(x: float, n: int) -> tuple[float, float]:
    """P and Q of the large-argument form, truncated at the smallest term."""
    mu = 4 * n * n
    p, q = 1.0, 0.0
    term = 1.0
    k = 0
    eight_x = 8.0 * x
    prev = math.inf
    while True:
        term *= (mu - (2 * k + 1) ** 2) / ((k + 1) * eight_x)
        mag = abs(term)
        if mag >= prev:
            break
        if k % 2 == 0:
            q += term if k % 4 == 0 else -term
        else:
            p += -term if k % 4 == 1 else term
        prev = mag
        k += 1
        if k > 60:
            break
    return p, q


def _bessel_asympt(x: float, n: int) -> float:
    p, q = _hankel_pq(x, n)
    chi = x - (0.5 * n + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j0(x: float) -> float:
    """Bessel J0, absolute accuracy ~1e-13 on |x| <= 50."""
    x = abs(float(x))
    if x <= _SERIES_CUTOFF:
        return _bessel_series(x, 0)
    return _bessel_asympt(x, 0)


def bessel_j1(x: float) -> float:
    """Bessel J1 (odd), absolute accuracy ~1e-13 on |x| <= 50."""
    xf = float(x)
    ax = abs(xf)
    val = _bessel_series(ax, 1) if ax <= _SERIES_CUTOFF else _bessel_asympt(ax, 1)
    return -val if xf < 0 else val


def bessel_j1_prime(x: float) -> float:
    """J1'(x) = J0(x) - J1(x)/x, with the x -> 0 limit 1/2."""
    xf = float(x)
    if xf == 0.0:
        return 0.5
    return bessel_j0(xf) - bessel_j1(xf) / xf


def bessel_j2(x: float) -> float:
    """J2 via the recurrence 2*J1/x - J0, series near zero."""
    xf = float(x)
    if abs(xf) <= 1e-2:
        return _bessel_series(abs(xf), 2)
    return 2.0 * bessel_j1(xf) / xf - bessel_j0(xf)


def _struve_series_frac(z: Fraction, n: int, tol_exp: int = 30) -> Fraction:
    """(pi/2) H_n(z) as an exact rational: sum (-1)^k z^(2k+n+1)/((2k+1)!!(2k+2n+1)!!)."""
    z2 = z * z
    term = z ** (n + 1) / math.prod(range(1, 2 * n + 2, 2))
    total = term
    k = 1
    tol = Fraction(1, 10**tol_exp)
    while True:
        term = -term * z2 / ((2 * k + 1) * (2 * k + 2 * n + 1))
        total += term
        if abs(term) < tol:
            break
        k += 1
    return total


def _struve_series(x: float, n: int) -> float:
    return 2.0 * float(_struve_series_frac(Fraction(x), n, tol_exp=22)) / math.pi


def struve_h0(x: float) -> float:
    """Struve H0 on [0, 50], absolute accuracy ~1e-14."""
    xf = float(x)
    if not 0.0 <= xf <= STRUVE_MAX_ARG:
        raise DomainError(f"struve_h0 defined on [0, {STRUVE_MAX_ARG}], got {x}")
    return _struve_series(xf, 0)


def struve_h1(x: float) -> float:
    """Struve H1 on [0, 50], absolute accuracy ~1e-14."""
    xf = float(x)
    if not 0.0 <= xf <= STRUVE_MAX_ARG:
        raise DomainError(f"struve_h1 defined on [0, {STRUVE_MAX_ARG}], got {x}")
    return _struve_series(xf, 1)


class TailIntegralKind(Enum):
    """Semi-infinite Bessel integrals with closed forms."""

    J1_OVER_X_P1 = "j1_over_x_p1"     # int_rho^inf J1(x)/x dx
    J1_OVER_X_P3 = "j1_over_x_p3"     # int_rho^inf J1(x)/x^3 dx
    J1_OVER_X_P5 = "j1_over_x_p5"     # int_rho^inf J1(x)/x^5 dx
    J1_OVER_X_P7 = "j1_over_x_p7"     # int_rho^inf J1(x)/x^7 dx
    J0_OVER_X_P2 = "j0_over_x_p2"     # int_rho^inf J0(x)/x^2 dx
    J0_TOTAL = "j0_total"             # int_rho^inf J0(x) dx
    J2_TOTAL = "j2_total"             # int_rho^inf J2(x) dx


def _tail_integral_frac(kind: TailIntegralKind, rho: Fraction) -> Fraction:
    """The closed forms assembled wholly in rational arithmetic.

    Everything is rational once Struve enters through the combination
    pi*rho*(J0 H1 - J1 H0) = 2 rho (J0 * (pi/2)H1 - J1 * (pi/2)H0), so the
    heavy cancellation in e.g. the 1/x^7 tail at large rho costs nothing.
    """
    j0 = _bessel_series_frac(rho, 0)
    j1 = _bessel_series_frac(rho, 1)
    j1p = j0 - j1 / rho
    h0s = _struve_series_frac(rho, 0)
    h1s = _struve_series_frac(rho, 1)
    g = 2 * rho * (j0 * h1s - j1 * h0s)  # = pi*rho*(J0 H1 - J1 H0), exactly
    one = Fraction(1)
    if kind is TailIntegralKind.J1_OVER_X_P1:
        return j1 / rho**2 + j1p / rho - j0 / rho + one + j1 - rho * j0 + g / 2
    if kind is TailIntegralKind.J1_OVER_X_P3:
        return (j0 / (3 * rho) + j1 / (3 * rho**2) - Fraction(1, 3) - j1 / 3
                + rho * j0 / 3 - g / 6)
    if kind is TailIntegralKind.J1_OVER_X_P5:
        return (4 * j1 / (15 * rho**4) + j1p / (15 * rho**3) - j0 / (45 * rho)
                - j1 / (45 * rho**2) + Fraction(1, 45) + j1 / 45 - rho * j0 / 45 + g / 90)
    if kind is TailIntegralKind.J1_OVER_X_P7:
        return (6 * j1 / (35 * rho**6) + j1p / (35 * rho**5) - 4 * j1 / (525 * rho**4)
                - j1p / (525 * rho**3) + j0 / (1575 * rho) + j1 / (1575 * rho**2)
                - Fraction(1, 1575) - j1 / 1575 + rho * j0 / 1575 - g / 3150)
    if kind is TailIntegralKind.J0_OVER_X_P2:
        return j0 / rho - j1 - one + rho * j0 - g / 2
    if kind is TailIntegralKind.J0_TOTAL:
        return one - rho * j0 + g / 2
    if kind is TailIntegralKind.J2_TOTAL:
        return one + 2 * j1 - rho * j0 + g / 2
    raise DomainError(f"unknown tail integral kind {kind!r}")


def tail_integral(kind: TailIntegralKind, rho: float) -> float:
    """Closed form of the selected tail integral at lower limit rho."""
    rho = float(rho)
    if rho <= 0.0:
        raise DomainError(f"tail_integral needs rho > 0, got {rho}")
    if rho > STRUVE_MAX_ARG:
        raise DomainError(
            f"tail_integral closed forms use Struve functions, capped at rho <= {STRUVE_MAX_ARG}"
        )
    return float(_tail_integral_frac(kind, Fraction(rho)))


def tail_recursion_rhs(n: int, rho: float) -> float:
    """Right side of the reduction identity for int_rho^inf J1/x^(2n+1).

    (2n J1(rho)/rho^(2n) + J1'(rho)/rho^(2n-1) - int_rho^inf J1/x^(2n-1)) / (4n^2 - 1)
    """
    if n not in (1, 2, 3):
        raise DomainError("recursion exposed for n in {1, 2, 3}")
    lower = {1: TailIntegralKind.J1_OVER_X_P1,
             2: TailIntegralKind.J1_OVER_X_P3,
             3: TailIntegralKind.J1_OVER_X_P5}[n]
    r = Fraction(float(rho))
    j1 = _bessel_series_frac(r, 1)
    j1p = _bessel_series_frac(r, 0) - j1 / r
    return float((2 * n * j1 / r ** (2 * n) + j1p / r ** (2 * n - 1)
                  - _tail_integral_frac(lower, r)) / (4 * n * n - 1))


# ---------------------------------------------------------------------------
# oscillation-aware quadrature (independent route for the identities above)
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _euler_sum(panels: list[float]) -> float:
    """Euler transform of an (eventually) alternating panel series."""
    size = min(len(panels), 40)
    row = np.array(panels[-size:], dtype=float)
    total = float(np.sum(panels[:-size])) if len(panels) > size else 0.0
    # repeated averaging of partial sums
    s = np.cumsum(row)
    while len(s) > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return total + float(s[0])


def _integrate_panels(f: Callable[[np.ndarray], np.ndarray], a: float,
                      period: float, tol: float, max_panels: int = 400) -> float:
    """Integrate f on (a, inf): half-period panels + Euler acceleration."""
    panels: list[float] = []
    lo = a
    prev = math.inf
    stable = 0
    for i in range(max_panels):
        hi = lo + period
        x = 0.5 * (hi - lo) * (_GL_NODES + 1.0) + lo
        panels.append(float(np.sum(f(x) * _GL_WEIGHTS)) * 0.5 * (hi - lo))
        lo = hi
        if i >= 16 and i % 2 == 0:
            cur = _euler_sum(panels)
            if abs(cur - prev) < tol * abs(cur) + 1e-300:
                stable += 1
                if stable >= 2:
                    return cur
            else:
                stable = 0
            prev = cur
    return _euler_sum(panels)


def _j0_arr(x: np.ndarray) -> np.ndarray:
    return np.array([bessel_j0(v) for v in np.atleast_1d(x)])


def _j1_arr(x: np.ndarray) -> np.ndarray:
    return np.array([bessel_j1(v) for v in np.atleast_1d(x)])


def _j2_arr(x: np.ndarray) -> np.ndarray:
    return np.array([bessel_j2(v) for v in np.atleast_1d(x)])


def tail_integral_quadrature(kind: TailIntegralKind, rho: float,
                             tol: float = 1e-14) -> float:
    """The defining integral evaluated numerically, closed forms untouched."""
    rho = float(rho)
    if rho <= 0.0:
        raise DomainError(f"tail_integral_quadrature needs rho > 0, got {rho}")
    integrands = {
        TailIntegralKind.J1_OVER_X_P1: lambda x: _j1_arr(x) / x,
        TailIntegralKind.J1_OVER_X_P3: lambda x: _j1_arr(x) / x**3,
        TailIntegralKind.J1_OVER_X_P5: lambda x: _j1_arr(x) / x**5,
        TailIntegralKind.J1_OVER_X_P7: lambda x: _j1_arr(x) / x**7,
        TailIntegralKind.J0_OVER_X_P2: lambda x: _j0_arr(x) / x**2,
        TailIntegralKind.J0_TOTAL: _j0_arr,
        TailIntegralKind.J2_TOTAL: _j2_arr,
    }
    return _integrate_panels(integrands[kind], rho, math.pi, tol)


# ---------------------------------------------------------------------------
# exterior ring integrals of the far-field expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SinCosComponents:
    """The four sin-type and four cos-type exterior ring integrals.

    i_sin pairs with the coefficient groups (a1^(1), a4^(1), a5^(1), a5^(4)),
    i_cos with (a0, a2, a3^(1), a3^(2)).
    """

    i_sin: tuple[float, float, float, float]
    i_cos: tuple[float, float, float, float]


def sin_cos_components(k1: float, radius: float) -> SinCosComponents:
    """Closed-form values at rho = 2*pi*k1*radius (requires rho <= 50)."""
    k1 = float(k1)
    radius = float(radius)
    if k1 <= 0.0 or radius <= 0.0:
        raise DomainError("sin_cos_components needs k1 > 0 and radius > 0")
    rho = 2.0 * math.pi * k1 * radius
    if rho > STRUVE_MAX_ARG:
        raise DomainError(
            f"2*pi*k1*radius = {rho:.3g} beyond the special-function domain {STRUVE_MAX_ARG}"
        )
    j0 = bessel_j0(rho)
    j1 = bessel_j1(rho)
    j1p = bessel_j1_prime(rho)
    t1 = tail_integral(TailIntegralKind.J1_OVER_X_P1, rho)
    t3 = tail_integral(TailIntegralKind.J1_OVER_X_P3, rho)
    t5 = tail_integral(TailIntegralKind.J1_OVER_X_P5, rho)
    t7 = tail_integral(TailIntegralKind.J1_OVER_X_P7, rho)
    two_pi = 2.0 * math.pi
    pre_s1 = two_pi**2 * k1 / radius
    pre_s3 = two_pi**2 * k1 / radius**3
    i_sin = (
        pre_s1 * rho * t3,
        pre_s3 * rho**3 * t5,
        pre_s3 * (5 * j1 / rho**3 + j1p / rho**2 - 30 * rho**3 * t7),
        -pre_s3 * (5 * j1 / rho**3 + j1p / rho**2 - rho**3 * t5 - 30 * rho**3 * t7),
    )
    pre_c1 = two_pi / radius
    pre_c3 = two_pi / radius**3
    i_cos = (
        pre_c1 * (j0 - rho * t1),
        pre_c3 * (j0 - rho**3 * t3) / 3.0,
        pre_c3 * (-j1 / rho + 4 * rho**3 * t5),
        pre_c3 * (j0 / 3.0 + j1 / rho - rho**3 * t3 / 3.0 - 4 * rho**3 * t5),
    )
    return SinCosComponents(i_sin=i_sin, i_cos=i_cos)


_RING_SPECS = {
    # component -> (trig, cos power, sin power, radial inverse power)
    ("sin", 1): ("sin", 1, 0, 3),
    ("sin", 2): ("sin", 1, 0, 5),
    ("sin", 3): ("sin", 3, 0, 5),
    ("sin", 4): ("sin", 1, 2, 5),
    ("cos", 1): ("cos", 0, 0, 2),
    ("cos", 2): ("cos", 0, 0, 4),
    ("cos", 3): ("cos", 2, 0, 4),
    ("cos", 4): ("cos", 0, 2, 4),
}


def ring_trig_integral(trig: str, cos_pow: int, sin_pow: int, inv_pow: int,
                       k1: float, radius: float, n_theta: int = 256,
                       tol: float = 1e-12) -> float:
    """Direct quadrature of

        int_radius^inf int_0^2pi trig(2 pi k1 r cos t) cos^a t sin^b t dt dr / r^p

    with a periodic trapezoid in angle and accelerated half-period panels in r.
    """
    k1 = float(k1)
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    ang = np.cos(theta) ** cos_pow * np.sin(theta) ** sin_pow
    ct = np.cos(theta)
    fun = np.sin if trig == "sin" else np.cos

    def g(r: np.ndarray) -> np.ndarray:
        phase = 2.0 * math.pi * k1 * np.outer(r, ct)
        vals = fun(phase) @ ang * (2.0 * math.pi / n_theta)
        return vals / r**inv_pow

    period = 0.5 / k1  # half period of the fastest angular ray
    return _integrate_panels(g, float(radius), period, tol)


def sin_cos_components_quadrature(k1: float, radius: float,
                                  tol: float = 1e-12) -> SinCosComponents:
    """Defining double integrals of the eight components, quadrature route."""
    i_sin = tuple(ring_trig_integral(*_RING_SPECS[("sin", j)], k1, radius, tol=tol)
                  for j in (1, 2, 3, 4))
    i_cos = tuple(ring_trig_integral(*_RING_SPECS[("cos", j)], k1, radius, tol=tol)
                  for j in (1, 2, 3, 4))
    return SinCosComponents(i_sin=i_sin, i_cos=i_cos)


# Exact per-group Taylor data of the exterior ring integrals about k1 = 0+.
# Row q of the sin table: the q-th one-sided k1-derivative of the sin integral
# equals  q! (2 pi)^(q+1) [ c1 a1 A^(q-2) + (c2 a4 + c3 a5 + c4 a54) A^(q-4) ];
# cos rows analogously with groups (a0, a2, a3^(1), a3^(2)) and powers
# (q-1, q-3).  Derived symbolically from the closed forms; the finite-
# difference tests pin them against sin_cos_components.
_SIN_TAYLOR_ROWS: dict[int, tuple[Fraction, ...]] = {
    1: (Fraction(1, 2), Fraction(1, 6), Fraction(1, 8), Fraction(1, 24)),
    3: (Fraction(1, 16), Fraction(-1, 16), Fraction(-5, 96), Fraction(-1, 96)),
    5: (Fraction(-1, 1152), Fraction(-1, 384), Fraction(-7, 3072), Fraction(-1, 3072)),
    7: (Fraction(1, 92160), Fraction(1, 55296), Fraction(1, 61440), Fraction(1, 552960)),
    9: (Fraction(-1, 10321920), Fraction(-1, 7372800), Fraction(-11, 88473600),
        Fraction(-1, 88473600)),
    11: (Fraction(1, 1592524800), Fraction(1, 1238630400), Fraction(13, 17340825600),
         Fraction(1, 17340825600)),
}
_COS_TAYLOR_ROWS: dict[int, tuple[Fraction, ...]] = {
    0: (Fraction(1), Fraction(1, 3), Fraction(1, 6), Fraction(1, 6)),
    2: (Fraction(1, 4), Fraction(-1, 4), Fraction(-3, 16), Fraction(-1, 16)),
    4: (Fraction(-1, 192), Fraction(-1, 64), Fraction(-5, 384), Fraction(-1, 384)),
    6: (Fraction(1, 11520), Fraction(1, 6912), Fraction(7, 55296), Fraction(1, 55296)),
    8: (Fraction(-1, 1032192), Fraction(-1, 737280), Fraction(-1, 819200),
        Fraction(-1, 7372800)),
    10: (Fraction(1, 132710400), Fraction(1, 103219200), Fraction(11, 1238630400),
         Fraction(1, 1238630400)),
}


def sin_cos_taylor(radius: float) -> dict[str, dict[int, tuple[float, ...]]]:
    """Per-coefficient-group one-sided derivatives of the ring integrals at k1 = 0+.

    Returns {"sin": {order: (per-group derivative coefficients)},
             "cos": {...}} so a caller contracts each row with an actual
    coefficient set.  Sin orders 1..11 odd pair with (a1^(1), a4^(1), a5^(1),
    a5^(4)); cos orders 0..10 even pair with (a0, a2, a3^(1), a3^(2)).
    """
    radius = float(radius)
    if radius <= 0.0:
        raise DomainError("sin_cos_taylor needs radius > 0")
    two_pi = 2.0 * math.pi
    sin_rows = {}
    for q, row in _SIN_TAYLOR_ROWS.items():
        base = math.factorial(q) * two_pi ** (q + 1)
        sin_rows[q] = (base * float(row[0]) * radius ** (q - 2),
                       *(base * float(c) * radius ** (q - 4) for c in row[1:]))
    cos_rows = {}
    for q, row in _COS_TAYLOR_ROWS.items():
        base = math.factorial(q) * two_pi ** (q + 1)
        cos_rows[q] = (base * float(row[0]) * radius ** (q - 1),
                       *(base * float(c) * radius ** (q - 3) for c in row[1:]))
    return {"sin": sin_rows, "cos": cos_rows}
