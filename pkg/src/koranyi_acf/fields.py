"""Scalar fields on H^1 and the named catalog used by the CLI and the test pairs."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import heis
from .errors import InvalidArgumentError, MissingGradientError
from .regions import SphereRegion, half_plane, lower_half, upper_half


@dataclass(frozen=True)
class Separable:
    """``u = rho**alpha f(theta, phi)`` with the partials of f up to order two."""

    alpha: float
    f: Callable
    f_theta: Callable
    f_phi: Callable
    f_thth: Callable
    f_thph: Callable
    f_phph: Callable

    def scaled(self, c: float) -> "Separable":
        g = lambda fn: (lambda th, ph: c * fn(th, ph))  # noqa: E731
        return Separable(
            self.alpha,
            g(self.f),
            g(self.f_theta),
            g(self.f_phi),
            g(self.f_thth),
            g(self.f_thph),
            g(self.f_phph),
        )


@dataclass(frozen=True)
class ScalarField:
    """An evaluable function on H^1.

    ``eval`` and ``hgrad`` take ``(x, y, t)`` arrays.  ``support`` is the open
    angular region where the field may be nonzero; integrators restrict to it
    so one-sided functions such as ``x+`` are smooth on every panel.
    ``homogeneity`` is the dilation degree of u (``u(delta_r p) = r**k u(p)``).
    """

    name: str
    eval: Callable
    hgrad: Optional[Callable] = None
    separable: Optional[Separable] = None
    support: Optional[SphereRegion] = None
    homogeneity: Optional[float] = None

    def __call__(self, p: heis.HPoint) -> float:
        return float(self.eval(p.x, p.y, p.t))

    def hgrad_arrays(self, x, y, t):
        if self.hgrad is not None:
            return self.hgrad(x, y, t)
        if self.separable is not None:
            return _separable_hgrad(self.separable, x, y, t)
        raise MissingGradientError(f"field {self.name!r} carries no gradient data")

    @property
    def has_gradient(self) -> bool:
        return self.hgrad is not None or self.separable is not None

    def scaled(self, c: float, name: str | None = None) -> "ScalarField":
        if not c > 0:
            raise InvalidArgumentError("only positive rescaling keeps the support")
        hg = self.hgrad
        return replace(
            self,
            name=name or f"{c:g}*{self.name}",
            eval=lambda x, y, t: c * self.eval(x, y, t),
            hgrad=None if hg is None else (lambda x, y, t: tuple(c * g for g in hg(x, y, t))),
            separable=None if self.separable is None else self.separable.scaled(c),
        )


def _separable_hgrad(sep: Separable, x, y, t):
    fr = heis.frame_arrays(x, y, t)
    rho, theta, phi = heis.cartesian_to_spherical(x, y, t)
    f = sep.f(theta, phi)
    ft = sep.f_theta(theta, phi)
    fp = sep.f_phi(theta, phi)
    a = sep.alpha
    ra = rho**a
    out = []
    for i in range(2):
        out.append(
            a * rho ** (a - 1) * f * fr["grad_rho"][i]
            + ra * (ft * fr["grad_theta"][i] + fp * fr["grad_phi"][i])
        )
    return tuple(out)


def _const(c):
    return lambda th, ph: np.full(np.broadcast(th, ph).shape, float(c))


# --- angular profiles ------------------------------------------------------


def _sqrt_sin_linear(a: float, b: float) -> Separable:
    """f = sqrt(sin phi) (a cos theta + b sin theta); rho f = a x + b y."""
    lin = lambda th: a * np.cos(th) + b * np.sin(th)  # noqa: E731
    dlin = lambda th: -a * np.sin(th) + b * np.cos(th)  # noqa: E731
    g = lambda ph: np.sqrt(np.sin(ph))  # noqa: E731
    g1 = lambda ph: np.cos(ph) / (2 * np.sqrt(np.sin(ph)))  # noqa: E731
    g2 = lambda ph: -np.sqrt(np.sin(ph)) / 2 - np.cos(ph) ** 2 / (4 * np.sin(ph) ** 1.5)  # noqa: E731
    return Separable(
        1.0,
        lambda th, ph: g(ph) * lin(th),
        lambda th, ph: g(ph) * dlin(th),
        lambda th, ph: g1(ph) * lin(th),
        lambda th, ph: -g(ph) * lin(th),
        lambda th, ph: g1(ph) * dlin(th),
        lambda th, ph: g2(ph) * lin(th),
    )


PROFILES: dict[str, Callable[[], tuple[float, Separable]]] = {}


def _profile(name):
    def deco(fn):
        PROFILES[name] = fn
        return fn

    return deco


@_profile("cos_phi")
def _cos_phi(alpha=2.0):
    return Separable(
        alpha,
        lambda th, ph: np.cos(ph) + 0 * th,
        _const(0.0),
        lambda th, ph: -np.sin(ph) + 0 * th,
        _const(0.0),
        _const(0.0),
        lambda th, ph: -np.cos(ph) + 0 * th,
    )


@_profile("sqrt_sin_cos_theta")
def _sqrt_sin_cos_theta(alpha=1.0):
    return replace(_sqrt_sin_linear(1.0, 0.0), alpha=alpha)


@_profile("sqrt_sin_sin_theta")
def _sqrt_sin_sin_theta(alpha=1.0):
    return replace(_sqrt_sin_linear(0.0, 1.0), alpha=alpha)


@_profile("sin_phi_sin_theta")
def _sin_phi_sin_theta(alpha=3.0):
    return Separable(
        alpha,
        lambda th, ph: np.sin(ph) * np.sin(th),
        lambda th, ph: np.sin(ph) * np.cos(th),
        lambda th, ph: np.cos(ph) * np.sin(th),
        lambda th, ph: -np.sin(ph) * np.sin(th),
        lambda th, ph: np.cos(ph) * np.cos(th),
        lambda th, ph: -np.sin(ph) * np.sin(th),
    )


@_profile("one")
def _one(alpha=1.0):
    return Separable(alpha, _const(1.0), _const(0.0), _const(0.0), _const(0.0), _const(0.0), _const(0.0))


# --- builders ----------------------------------------------------------------


def separable_field(alpha: float, profile: str, support: SphereRegion | None = None) -> ScalarField:
    if profile not in PROFILES:
        raise InvalidArgumentError(f"unknown profile {profile!r}; known: {sorted(PROFILES)}")
    sep = PROFILES[profile](alpha)

    def ev(x, y, t):
        rho, theta, phi = heis.cartesian_to_spherical(x, y, t)
        val = rho**alpha * sep.f(theta, phi)
        if support is not None:
            val = np.where(support.contains(theta, phi), val, 0.0)
        return val

    return ScalarField(
        f"separable({alpha:g},{profile})", ev, None, sep, support, homogeneity=alpha
    )


def linear_part(a: float, b: float, sign: int = 1) -> ScalarField:
    """``(sign (a x + b y))+``, the positive part of a horizontal linear function."""
    sgn = 1.0 if sign > 0 else -1.0

    def ev(x, y, t):
        return np.maximum(sgn * (a * x + b * y), 0.0)

    def hg(x, y, t):
        shape = np.broadcast(x, y, t).shape
        return np.full(shape, sgn * a), np.full(shape, sgn * b)

    name = f"({'' if sgn > 0 else '-'}({a:g}x+{b:g}y))+"
    return ScalarField(
        name, ev, hg, _sqrt_sin_linear(sgn * a, sgn * b), half_plane(a, b, int(sgn)), homogeneity=1.0
    )


def xplus() -> ScalarField:
    return replace(linear_part(1.0, 0.0, +1), name="x+")


def xminus() -> ScalarField:
    return replace(linear_part(1.0, 0.0, -1), name="x-")


def t_part(sign: int = 1, coef: float = 1.0) -> ScalarField:
    """``coef * (sign t)+``; the gradient of t is (2y, -2x)."""
    sgn = 1.0 if sign > 0 else -1.0
    k = sgn * coef

    def ev(x, y, t):
        return coef * np.maximum(sgn * t, 0.0)

    def hg(x, y, t):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return 2 * k * y, -2 * k * x

    sep = _cos_phi(2.0).scaled(k)
    name = ("t+" if sgn > 0 else "t-") if coef == 1.0 else f"{coef:g}*{'t+' if sgn > 0 else 't-'}"
    return ScalarField(name, ev, hg, sep, upper_half() if sgn > 0 else lower_half(), homogeneity=2.0)


def tplus() -> ScalarField:
    return t_part(+1)


def tminus() -> ScalarField:
    return t_part(-1)


def rho2cos() -> ScalarField:
    """``rho**2 cos(phi)``, which equals t identically."""

    def hg(x, y, t):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return 2 * y, -2 * x

    return ScalarField("rho2cos", lambda x, y, t: t + 0 * x, hg, _cos_phi(2.0), None, homogeneity=2.0)


def t_scaled(a: float, b: float) -> ScalarField:
    """``a t+ - b t-``."""

    def ev(x, y, t):
        return a * np.maximum(t, 0.0) - b * np.maximum(-t, 0.0)

    def hg(x, y, t):
        x, y, t = np.broadcast_arrays(*(np.asarray(v, float) for v in (x, y, t)))
        k = np.where(t > 0, a, b)
        return 2 * k * y, -2 * k * x

    return ScalarField(f"t-scaled({a:g},{b:g})", ev, hg, None, None, homogeneity=2.0)


_NUM = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"


def field_from_name(spec: str) -> ScalarField:
    """Build a catalog field from its textual name.

    Accepted: ``xplus``, ``xminus``, ``tplus``, ``tminus``, ``rho2cos``,
    ``t-scaled(a,b)``, ``x-linear(a,b)`` (optionally ``x-linear(a,b,-)`` for
    the negative part) and ``separable(alpha,profile)``.
    """
    s = spec.replace(" ", "")
    simple = {"xplus": xplus, "xminus": xminus, "tplus": tplus, "tminus": tminus, "rho2cos": rho2cos}
    if s in simple:
        return simple[s]()
    m = re.fullmatch(rf"t-scaled\({_NUM},{_NUM}\)", s)
    if m:
        return t_scaled(float(m[1]), float(m[2]))
    m = re.fullmatch(rf"x-linear\({_NUM},{_NUM}(?:,([+-]))?\)", s)
    if m:
        return linear_part(float(m[1]), float(m[2]), -1 if m[3] == "-" else 1)
    m = re.fullmatch(rf"separable\({_NUM},([a-z_]+)\)", s)
    if m:
        return separable_field(float(m[1]), m[2])
    raise InvalidArgumentError(f"unknown field {spec!r}")
