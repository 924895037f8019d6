"""Group structure of the first Heisenberg group and its spherical-coordinate calculus.

Coordinates are ``(x, y, t)``; the horizontal frame is

    X = d/dx + 2y d/dt,    Y = d/dy - 2x d/dt,

and the gauge ("Korányi") spherical coordinates ``(rho, theta, phi)`` satisfy

    x = rho sqrt(sin phi) cos theta,  y = rho sqrt(sin phi) sin theta,  t = rho**2 cos phi.

Every routine here accepts scalars or broadcastable numpy arrays.  The small
dataclasses are convenience wrappers for single points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CharacteristicPointError,
    InvalidArgumentError,
    PoleError,
    UndefinedCoordinatesError,
)

#: homogeneous dimension of H^1
Q = 4

#: relative guard for the characteristic locus, x**2 + y**2 <= EPS_CHAR * rho**2
EPS_CHAR = 1e-12


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float
    t: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.x, self.y, self.t])):
            raise InvalidArgumentError(f"non-finite coordinates {self!r}")

    def as_tuple(self):
        return (self.x, self.y, self.t)


@dataclass(frozen=True)
class SphericalPoint:
    rho: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.rho < 0:
            raise InvalidArgumentError("rho must be non-negative")
        if not 0.0 <= self.phi <= np.pi:
            raise InvalidArgumentError("phi must lie in [0, pi]")
        object.__setattr__(self, "theta", float(wrap_theta(self.theta)))


@dataclass(frozen=True)
class HorizontalVec:
    """Coefficients of a horizontal vector in the orthonormal frame {X, Y}."""

    a: float
    b: float

    @property
    def norm2(self):
        return self.a * self.a + self.b * self.b

    def dot(self, other: "HorizontalVec"):
        return self.a * other.a + self.b * other.b


@dataclass(frozen=True)
class FrameData:
    grad_rho: HorizontalVec
    grad_phi: HorizontalVec
    grad_theta: HorizontalVec
    norm2_rho: float
    norm2_phi: float
    norm2_theta: float
    ip_phi_rho: float
    ip_rho_theta: float
    ip_phi_theta: float
    lap_rho: float
    lap_phi: float
    lap_theta: float
    e_rho: HorizontalVec
    e_phi: HorizontalVec


def wrap_theta(theta):
    """Map angles into (-pi, pi]."""
    w = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    return w if np.ndim(w) else float(w)


# --- group structure -------------------------------------------------------


def group_mul(p: HPoint, q: HPoint) -> HPoint:
    return HPoint(*mul_arrays(p.x, p.y, p.t, q.x, q.y, q.t))


def mul_arrays(x1, y1, t1, x2, y2, t2):
    return x1 + x2, y1 + y2, t1 + t2 + 2 * (x2 * y1 - x1 * y2)


def group_inverse(p: HPoint) -> HPoint:
    return HPoint(-p.x, -p.y, -p.t)


def dilate(r: float, p: HPoint) -> HPoint:
    if not r > 0:
        raise InvalidArgumentError(f"dilation factor must be positive, got {r}")
    return HPoint(r * p.x, r * p.y, r * r * p.t)


def gauge(x, y, t):
    r2 = x * x + y * y
    return np.sqrt(np.sqrt(r2 * r2 + t * t))


def gauge_norm(p: HPoint) -> float:
    return float(gauge(p.x, p.y, p.t))


# --- coordinates -----------------------------------------------------------


def cartesian_to_spherical(x, y, t):
    """Array version of :func:`to_spherical`; the origin maps to ``rho = 0``."""
    x, y, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    rho = gauge(x, y, t)
    # sin(phi) = r**2 / rho**2 and cos(phi) = t / rho**2; arctan2 stays accurate near the poles
    phi = np.arctan2(x * x + y * y, t)
    phi = np.where(rho > 0, phi, 0.0)
    theta = np.arctan2(y, x)
    theta = np.where(theta == -np.pi, np.pi, theta)
    return rho, theta, phi


def at_pole(phi):
    """True where phi is 0 or pi (or outside [0, pi]); sin(pi) is not exactly zero in floating point."""
    phi = np.asarray(phi, dtype=float)
    return (phi <= 0.0) | (phi >= np.pi)


def spherical_to_cartesian(rho, theta, phi):
    s = np.sqrt(np.where(at_pole(phi), 0.0, np.sin(phi)))
    return rho * s * np.cos(theta), rho * s * np.sin(theta), rho * rho * np.cos(phi)


def to_spherical(p: HPoint) -> SphericalPoint:
    if p.x == 0 and p.y == 0 and p.t == 0:
        raise UndefinedCoordinatesError("spherical coordinates are undefined at the origin")
    rho, theta, phi = cartesian_to_spherical(p.x, p.y, p.t)
    return SphericalPoint(float(rho), float(theta), float(phi))


def from_spherical(s: SphericalPoint) -> HPoint:
    return HPoint(*(float(v) for v in spherical_to_cartesian(s.rho, s.theta, s.phi)))


# --- closed-form frame -----------------------------------------------------


def _check_frame(r2, rho, eps_char):
    bad = r2 <= eps_char * rho * rho
    if np.any(bad) or np.any(rho == 0):
        raise CharacteristicPointError(
            "horizontal frame undefined where x**2 + y**2 = 0 (characteristic locus)"
        )


def frame_arrays(x, y, t, eps_char=EPS_CHAR):
    """All closed-form frame quantities as a dict of arrays."""
    x, y, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    r2 = x * x + y * y
    rho = gauge(x, y, t)
    _check_frame(r2, rho, eps_char)
    rho2 = rho * rho
    cos_phi = t / rho2
    rho3 = rho2 * rho

    grho = ((r2 * x + t * y) / rho3, (r2 * y - t * x) / rho3)
    gtheta = (-y / r2, x / r2)
    k = 2.0 / (rho * r2)
    gphi = (k * (t * grho[0] - rho * y), k * (t * grho[1] + rho * x))

    n_rho = np.sqrt(r2) / rho
    n_phi = 2 * np.sqrt(r2) / rho2
    return {
        "grad_rho": grho,
        "grad_phi": gphi,
        "grad_theta": gtheta,
        "norm2_rho": r2 / rho2,
        "norm2_phi": 4 * r2 / (rho2 * rho2),
        "norm2_theta": 1 / r2,
        # the phi/rho inner product vanishes identically; it is exactly zero in closed form
        "ip_phi_rho": np.zeros_like(r2),
        "ip_rho_theta": -cos_phi / rho,
        "ip_phi_theta": 2 * r2 / (rho2 * rho2),
        "lap_rho": 3 * r2 / rho3,
        "lap_phi": 4 * cos_phi / rho2,
        "lap_theta": np.zeros_like(r2),
        "e_rho": (grho[0] / n_rho, grho[1] / n_rho),
        "e_phi": (gphi[0] / n_phi, gphi[1] / n_phi),
    }


def frame_at(p: HPoint, eps_char: float = EPS_CHAR) -> FrameData:
    d = frame_arrays(p.x, p.y, p.t, eps_char)
    vec = lambda ab: HorizontalVec(float(ab[0]), float(ab[1]))  # noqa: E731
    return FrameData(
        **{k: vec(v) if isinstance(v, tuple) else float(v) for k, v in d.items()}
    )


def radial_laplacian(f1, f2, x, y, t):
    """Kohn Laplacian of a radial function g(rho) given g' and g'' evaluated at rho."""
    rho = gauge(x, y, t)
    return (x * x + y * y) / rho**2 * (f2 + (Q - 1) / rho * f1)


# --- finite-difference oracles ---------------------------------------------


def _default_step(x, y, t, base):
    return base * np.maximum(1.0, gauge(x, y, t))


def _flow_x(x, y, t, s):
    return x + s, y, t + 2 * y * s


def _flow_y(x, y, t, s):
    return x, y + s, t - 2 * x * s


def hgrad_fd_arrays(u, x, y, t, h=None):
    """Central differences of ``u(x, y, t)`` along the integral curves of X and Y."""
    if h is None:
        h = _default_step(x, y, t, 1e-5)
    ux = (u(*_flow_x(x, y, t, h)) - u(*_flow_x(x, y, t, -h))) / (2 * h)
    uy = (u(*_flow_y(x, y, t, h)) - u(*_flow_y(x, y, t, -h))) / (2 * h)
    return ux, uy


def _second_difference(u, x, y, t, h):
    u0 = u(x, y, t)
    xx = u(*_flow_x(x, y, t, h)) - 2 * u0 + u(*_flow_x(x, y, t, -h))
    yy = u(*_flow_y(x, y, t, h)) - 2 * u0 + u(*_flow_y(x, y, t, -h))
    return (xx + yy) / (h * h)


def kohn_laplacian_fd_arrays(u, x, y, t, h=None, richardson=False):
    """Second differences along the X and Y flows, i.e. X**2 u + Y**2 u.

    The flows of X and Y are straight lines, so the three-point rule along
    each of them is an O(h**2) approximation of X**2 u (resp. Y**2 u).  With
    ``richardson`` the steps h and h/2 are combined into an O(h**4) rule.
    """
    if h is None:
        h = _default_step(x, y, t, 1e-3 if richardson else 1e-4)
    if not richardson:
        return _second_difference(u, x, y, t, h)
    return (4 * _second_difference(u, x, y, t, h / 2) - _second_difference(u, x, y, t, h)) / 3


def _callable(u):
    return u.eval if hasattr(u, "eval") else u


def hgrad_fd(u, p: HPoint, h: float | None = None) -> HorizontalVec:
    if h is not None and not h > 0:
        raise InvalidArgumentError("step must be positive")
    a, b = hgrad_fd_arrays(_callable(u), p.x, p.y, p.t, h)
    return HorizontalVec(float(a), float(b))


def kohn_laplacian_fd(u, p: HPoint, h: float | None = None, richardson: bool = False) -> float:
    if h is not None and not h > 0:
        raise InvalidArgumentError("step must be positive")
    return float(kohn_laplacian_fd_arrays(_callable(u), p.x, p.y, p.t, h, richardson))


# --- separable functions rho**alpha f(theta, phi) --------------------------


def laplacian_separable_arrays(alpha, f, f_th, f_ph, f_thth, f_thph, f_phph, rho, phi):
    """Kohn Laplacian of rho**alpha f(theta, phi) from the values of f and its partials."""
    s = np.sin(phi)
    c = np.cos(phi)
    if np.any(at_pole(phi)):
        raise PoleError("separable Laplacian has a 1/sin(phi) term; phi must avoid 0 and pi")
    bracket = (
        alpha * (alpha + 2) * s * f
        - 2 * alpha * c * f_th
        + f_thth / s
        + 4 * s * f_thph
        + 4 * s * f_phph
        + 4 * c * f_ph
    )
    return rho ** (alpha - 2) * bracket


def laplacian_separable(u, s: SphericalPoint) -> float:
    sep = getattr(u, "separable", None)
    if sep is None:
        raise InvalidArgumentError(f"field {getattr(u, 'name', u)!r} has no separable form")
    th, ph = s.theta, s.phi
    return float(
        laplacian_separable_arrays(
            sep.alpha,
            sep.f(th, ph),
            sep.f_theta(th, ph),
            sep.f_phi(th, ph),
            sep.f_thth(th, ph),
            sep.f_thph(th, ph),
            sep.f_phph(th, ph),
            s.rho,
            ph,
        )
    )


def phi_component_sq_separable(alpha, f_theta, f_phi, s: SphericalPoint):
    """Squared e_phi-component of the horizontal gradient of rho**alpha f."""
    sin_phi = np.sin(s.phi)
    if np.any(at_pole(s.phi)):
        raise PoleError("phi component requires sin(phi) > 0")
    return s.rho ** (2 * (alpha - 1)) * sin_phi * (f_theta + 2 * f_phi) ** 2


def grad_components_arrays(ga, gb, x, y, t, eps_char=EPS_CHAR):
    """Project a horizontal gradient (ga, gb) on the frame (e_rho, e_phi)."""
    fr = frame_arrays(x, y, t, eps_char)
    er, ep = fr["e_rho"], fr["e_phi"]
    return ga * er[0] + gb * er[1], ga * ep[0] + gb * ep[1]


def grad_components(u, p: HPoint, eps_char: float = EPS_CHAR):
    """(radial, angular) components of the horizontal gradient of ``u`` at ``p``."""
    hg = getattr(u, "hgrad_arrays", None) or u.hgrad
    ga, gb = hg(p.x, p.y, p.t)
    radial, angular = grad_components_arrays(ga, gb, p.x, p.y, p.t, eps_char)
    return float(radial), float(angular)
