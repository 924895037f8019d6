"""Integration domains on the unit Korányi sphere and on gauge balls.

A :class:`SphereRegion` is a rectangle in the ``(theta, phi)`` parameter plane,
optionally cut down by a predicate.  Theta intervals may run past ``pi``
(e.g. ``(pi/2, 3pi/2)`` for ``{x < 0}``); only the span is restricted to 2 pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class SphereRegion:
    theta_range: tuple[float, float] = (-np.pi, np.pi)
    phi_range: tuple[float, float] = (0.0, np.pi)
    predicate: Optional[Callable] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        ta, tb = map(float, self.theta_range)
        pa, pb = map(float, self.phi_range)
        if not tb >= ta or tb - ta > TWO_PI * (1 + 1e-14):
            raise InvalidArgumentError(f"bad theta range {self.theta_range}")
        if not (0.0 <= pa <= pb <= np.pi * (1 + 1e-15)):
            raise InvalidArgumentError(f"bad phi range {self.phi_range}")
        object.__setattr__(self, "theta_range", (ta, tb))
        object.__setattr__(self, "phi_range", (pa, min(pb, np.pi)))

    @property
    def is_empty(self) -> bool:
        return self.theta_range[0] == self.theta_range[1] or self.phi_range[0] == self.phi_range[1]

    @property
    def periodic_theta(self) -> bool:
        ta, tb = self.theta_range
        return abs((tb - ta) - TWO_PI) <= 1e-12

    @property
    def touches_north_pole(self) -> bool:
        return self.phi_range[0] == 0.0

    @property
    def touches_south_pole(self) -> bool:
        return self.phi_range[1] == np.pi

    def contains(self, theta, phi):
        """Membership of parameter points (theta is compared modulo 2 pi)."""
        ta, tb = self.theta_range
        th = ta + np.mod(np.asarray(theta, dtype=float) - ta, TWO_PI)
        phi = np.asarray(phi, dtype=float)
        inside = (th > ta) & (th < tb) & (phi > self.phi_range[0]) & (phi < self.phi_range[1])
        if self.periodic_theta:
            inside = (phi > self.phi_range[0]) & (phi < self.phi_range[1])
        if self.predicate is not None:
            inside = inside & np.asarray(self.predicate(th, phi), dtype=bool)
        return inside


@dataclass(frozen=True)
class BallRegion:
    rho_range: tuple[float, float]
    angular: SphereRegion = SphereRegion()

    def __post_init__(self):
        a, b = map(float, self.rho_range)
        if not 0.0 <= a <= b:
            raise InvalidArgumentError(f"bad rho range {self.rho_range}")
        object.__setattr__(self, "rho_range", (a, b))

    @property
    def is_empty(self) -> bool:
        return self.rho_range[0] == self.rho_range[1] or self.angular.is_empty


FULL_SPHERE = SphereRegion(name="sphere")


def half_x_pos() -> SphereRegion:
    return SphereRegion((-np.pi / 2, np.pi / 2), (0.0, np.pi), name="x>0")


def half_x_neg() -> SphereRegion:
    return SphereRegion((np.pi / 2, 3 * np.pi / 2), (0.0, np.pi), name="x<0")


def half_plane(a: float, b: float, sign: int = 1) -> SphereRegion:
    """``{sign * (a x + b y) > 0}`` on the sphere."""
    if a == 0 and b == 0:
        raise InvalidArgumentError("(a, b) must be nonzero")
    c = float(np.arctan2(b, a)) + (0.0 if sign > 0 else np.pi)
    return SphereRegion((c - np.pi / 2, c + np.pi / 2), (0.0, np.pi), name=f"{'+' if sign > 0 else '-'}({a}x+{b}y)>0")


def cap(phi0: float) -> SphereRegion:
    """``{phi < phi0}``: a cap around the positive t-axis."""
    return SphereRegion((-np.pi, np.pi), (0.0, phi0), name=f"phi<{phi0:.12g}")


def cocap(phi0: float) -> SphereRegion:
    """``{phi > phi0}``: the complement of :func:`cap`."""
    return SphereRegion((-np.pi, np.pi), (phi0, np.pi), name=f"phi>{phi0:.12g}")


def upper_half() -> SphereRegion:
    return SphereRegion((-np.pi, np.pi), (0.0, np.pi / 2), name="t>0")


def lower_half() -> SphereRegion:
    return SphereRegion((-np.pi, np.pi), (np.pi / 2, np.pi), name="t<0")
