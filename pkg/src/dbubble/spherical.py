"""Ball, sphere, cap and zone measures in R^n.

Polar angles are measured from a fixed axis.  Every measure that reduces
to an integral of a power of sine is available two ways: by adaptive
quadrature and by the exact integer-exponent reduction formula, so the
two routes can be compared.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .quadrature import integrate

_ANGLE_SLACK = 1e-14


def check_dimension(n: int) -> int:
    if int(n) != n or n < 3:
        raise DomainError(f"dimension must be an integer >= 3, got {n!r}")
    return int(n)


def _check_angle(t: float, name: str = "angle") -> float:
    if not (-_ANGLE_SLACK <= t <= math.pi + _ANGLE_SLACK):
        raise DomainError(f"{name} must lie in [0, pi], got {t!r}")
    return min(max(t, 0.0), math.pi)


def unit_ball_volume(k: int) -> float:
    """Volume of the unit k-ball, by the recursion a_k = a_{k-2} * 2pi / k."""
    if int(k) != k or k < 1:
        raise DomainError(f"ball dimension must be a positive integer, got {k!r}")
    k = int(k)
    value = math.pi if k % 2 == 0 else 2.0
    for j in range(4 - k % 2, k + 1, 2):
        value *= 2.0 * math.pi / j
    return value


def sphere_area(k: int, r: float) -> float:
    """Measure of the (k-1)-sphere of radius r bounding a k-ball."""
    if int(k) != k or k < 1:
        raise DomainError(f"sphere dimension must be >= 1, got {k!r}")
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r!r}")
    return k * unit_ball_volume(k) * r ** (k - 1)


def ball_radius(n: int, volume: float) -> float:
    """Radius of the n-ball with the given volume."""
    if volume < 0:
        raise DomainError(f"volume must be nonnegative, got {volume!r}")
    return (volume / unit_ball_volume(n)) ** (1.0 / n)


def sin_power_antiderivative(k: int, x: float) -> float:
    """F_k(x) with F_k' = sin^k and F_k(0) = 0, via the reduction formula."""
    if int(k) != k or k < 0:
        raise DomainError(f"exponent must be a nonnegative integer, got {k!r}")
    s, c = math.sin(x), math.cos(x)
    if k % 2 == 0:
        value, j = x, 0
    else:
        value, j = 1.0 - c, 1
    while j < k:
        j += 2
        value = -(s ** (j - 1)) * c / j + (j - 1) / j * value
    return value


def sin_power_integral(k: int, lower: float, upper: float) -> float:
    """Exact value of the integral of sin^k over [lower, upper]."""
    return sin_power_antiderivative(k, upper) - sin_power_antiderivative(k, lower)


def sin_power_quad(k: int, lower: float, upper: float, atol: float = 1e-12) -> float:
    """Same integral as :func:`sin_power_integral`, by adaptive quadrature."""
    return integrate(lambda t: np.sin(t) ** k, lower, upper, atol=atol)


def cap_volume(n: int, r: float, theta: float) -> float:
    """Volume of the part of an n-ball of radius r within polar angle theta
    of a pole, cut off by the hyperplane at that angle (slab decomposition).

    ``theta = pi`` gives the full ball.
    """
    n = check_dimension(n)
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r!r}")
    theta = _check_angle(theta, "theta")
    return unit_ball_volume(n - 1) * r ** n * sin_power_integral(n, 0.0, theta)


def latitude_measure(n: int, t, exponent: int | None = None):
    """Measure of the latitude (n-2)-sphere at polar angle t on the unit
    (n-1)-sphere: (n-1) a_{n-1} sin^{n-2} t.

    ``exponent`` overrides the sine power (the measure is then only a
    weight function, used to test exponent-robust monotonicity claims).
    """
    n = check_dimension(n)
    p = n - 2 if exponent is None else exponent
    return (n - 1) * unit_ball_volume(n - 1) * np.sin(t) ** p


def _check_zone(t1: float, t2: float) -> tuple[float, float]:
    t1 = _check_angle(t1, "t1")
    t2 = _check_angle(t2, "t2")
    if t2 < t1:
        raise DomainError(f"zone angles reversed: t1={t1!r} > t2={t2!r}")
    return t1, t2


def zone_area(n: int, t1: float, t2: float, exponent: int | None = None,
              atol: float = 1e-12) -> float:
    """Area of the zone t1 <= polar angle <= t2 of the unit (n-1)-sphere,
    integrating the latitude measure by adaptive quadrature."""
    n = check_dimension(n)
    t1, t2 = _check_zone(t1, t2)
    return integrate(lambda t: latitude_measure(n, t, exponent), t1, t2, atol=atol)


def zone_area_exact(n: int, t1: float, t2: float, exponent: int | None = None) -> float:
    """Closed-form twin of :func:`zone_area`."""
    n = check_dimension(n)
    t1, t2 = _check_zone(t1, t2)
    p = n - 2 if exponent is None else exponent
    return (n - 1) * unit_ball_volume(n - 1) * sin_power_integral(p, t1, t2)


def cap_area(n: int, r: float, theta: float) -> float:
    """Area of a spherical cap of angular radius theta on the sphere of radius r."""
    return r ** (n - 1) * zone_area_exact(n, 0.0, theta)
