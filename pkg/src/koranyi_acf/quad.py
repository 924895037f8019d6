"""Composite tensor Gauss-Legendre quadrature on gauge balls and the unit Korányi sphere.

Volume element in spherical coordinates is ``rho**3 drho dtheta dphi``; the
H-perimeter on the unit sphere is ``sqrt(sin phi) dtheta dphi``.  Gauss nodes
are interior to every panel, so ``phi in {0, pi}`` and ``rho = 0`` are never
sampled and the singular weights of the energies need no regularisation.

Reductions are deterministic: per-panel partial sums are produced in a fixed
order (whatever the worker count) and combined with :func:`math.fsum`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import heis
from .errors import DegenerateError, InvalidArgumentError, MissingGradientError, PropagatedNaNError
from .fields import ScalarField
from .regions import FULL_SPHERE, BallRegion, SphereRegion

THREADS_ENV = "KORANYI_ACF_THREADS"


@dataclass(frozen=True)
class QuadSpec:
    panels_rho: int = 8
    panels_theta: int = 8
    panels_phi: int = 8
    nodes_per_panel: int = 16
    refine: bool = True

    def __post_init__(self):
        if min(self.panels_rho, self.panels_theta, self.panels_phi) < 1:
            raise InvalidArgumentError("panel counts must be positive")
        if self.nodes_per_panel < 2:
            raise InvalidArgumentError("nodes_per_panel must be at least 2")

    def doubled(self) -> "QuadSpec":
        return QuadSpec(
            2 * self.panels_rho, 2 * self.panels_theta, 2 * self.panels_phi, self.nodes_per_panel, False
        )


@dataclass(frozen=True)
class IntegralResult:
    value: float
    err_estimate: float
    nodes_used: int

    def to_dict(self):
        return {"value": self.value, "err_estimate": self.err_estimate, "nodes_used": self.nodes_used}


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise InvalidArgumentError(f"{THREADS_ENV} must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _ordered_map(fn, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@lru_cache(maxsize=None)
def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(a: float, b: float, panels: int, nodes: int):
    """Nodes and weights of the composite Gauss-Legendre rule on (a, b)."""
    x, w = _gauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def _check(vals):
    if np.any(np.isnan(vals)):
        raise PropagatedNaNError("integrand produced NaN")
    return vals


def _sphere_grid(region: SphereRegion, spec: QuadSpec):
    th, wt = composite_rule(*region.theta_range, spec.panels_theta, spec.nodes_per_panel)
    ph, wp = composite_rule(*region.phi_range, spec.panels_phi, spec.nodes_per_panel)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    W = wt[:, None] * wp[None, :]
    if region.predicate is not None:
        W = W * region.contains(TH, PH)
    return TH, PH, W


def _sphere_sum(g, region, spec, weight):
    TH, PH, W = _sphere_grid(region, spec)
    vals = _check(np.asarray(g(TH, PH), dtype=float) * weight(PH))
    # one partial sum per theta panel, in panel order
    per = (vals * W).reshape(spec.panels_theta, -1).sum(axis=1)
    return math.fsum(per.tolist()), TH.size


def _ball_sum(g, region: BallRegion, spec: QuadSpec):
    TH, PH, W = _sphere_grid(region.angular, spec)
    rho, wr = composite_rule(*region.rho_range, spec.panels_rho, spec.nodes_per_panel)
    n = spec.nodes_per_panel

    def slab(i):
        r = rho[i * n : (i + 1) * n][:, None, None]
        w = (wr[i * n : (i + 1) * n] * rho[i * n : (i + 1) * n] ** 3)[:, None, None]
        vals = _check(np.asarray(g(r, TH[None], PH[None]), dtype=float))
        return float(np.sum(vals * w * W[None]))

    parts = _ordered_map(slab, range(spec.panels_rho))
    return math.fsum(parts), rho.size * TH.size


def _with_refinement(compute, spec: QuadSpec, empty: bool = False) -> IntegralResult:
    if empty:
        return IntegralResult(0.0, 0.0, 0)
    value, nodes = compute(spec)
    err = 0.0
    if spec.refine:
        fine, fine_nodes = compute(spec.doubled())
        err = abs(fine - value)
        nodes += fine_nodes
    return IntegralResult(float(value), float(err), int(nodes))


def integrate_ball(g, region: BallRegion, spec: QuadSpec = QuadSpec()) -> IntegralResult:
    """Integral of ``g(rho, theta, phi)`` against the volume ``rho**3 drho dtheta dphi``."""
    return _with_refinement(lambda s: _ball_sum(g, region, s), spec, region.is_empty)


def integrate_sphere_H(g, region: SphereRegion, spec: QuadSpec = QuadSpec()) -> IntegralResult:
    """Integral of ``g(theta, phi)`` against the H-perimeter ``sqrt(sin phi) dtheta dphi``."""
    return _with_refinement(lambda s: _sphere_sum(g, region, s, lambda ph: np.sqrt(np.sin(ph))), spec, region.is_empty)


def integrate_sphere_param(g, region: SphereRegion, spec: QuadSpec = QuadSpec()) -> IntegralResult:
    """Plain parameter-plane integral of ``g(theta, phi) dtheta dphi``."""
    return _with_refinement(lambda s: _sphere_sum(g, region, s, lambda ph: 1.0), spec, region.is_empty)


# --- surface measure ---------------------------------------------------------


def _euclid_grad_rho_norm(phi):
    s, c = np.sin(phi), np.cos(phi)
    return 0.5 * np.sqrt(4 * s**3 + c**2)


def _param_cross_norm(theta, phi):
    s, c = np.sin(phi), np.cos(phi)
    rs = np.sqrt(s)
    k_th = np.stack([-rs * np.sin(theta), rs * np.cos(theta), np.zeros_like(theta)], axis=-1)
    k_ph = np.stack([c * np.cos(theta) / (2 * rs), c * np.sin(theta) / (2 * rs), -s + 0 * theta], axis=-1)
    return np.linalg.norm(np.cross(k_th, k_ph), axis=-1)


def surface_measure_crosscheck(sample_count: int, seed: int = 0, phi=None) -> float:
    """Max deviation of ``|grad_H rho| / |grad rho| * |K_theta x K_phi|`` from sqrt(sin phi).

    The left side is assembled from the Euclidean parametrisation ``K`` of the
    unit sphere and the Euclidean gradient of the gauge; the right side is the
    closed-form H-perimeter density.
    """
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-np.pi, np.pi, sample_count)
    if phi is None:
        phi = rng.uniform(0.0, np.pi, sample_count)
    phi = np.broadcast_to(np.asarray(phi, dtype=float), theta.shape)
    x, y, t = heis.spherical_to_cartesian(1.0, theta, phi)
    h_grad = np.sqrt(heis.frame_arrays(x, y, t, eps_char=0.0)["norm2_rho"])
    lhs = h_grad / _euclid_grad_rho_norm(phi) * _param_cross_norm(theta, phi)
    return float(np.max(np.abs(lhs - np.sqrt(np.sin(phi)))))


# --- energies ------------------------------------------------------------------


def _support(u: ScalarField) -> SphereRegion:
    return u.support if u.support is not None else FULL_SPHERE


def _require_gradient(u: ScalarField):
    if not u.has_gradient:
        raise MissingGradientError(f"field {u.name!r} has neither an analytic gradient nor a separable form")


def _grad_norm2_spherical(u: ScalarField, rho, theta, phi):
    x, y, t = heis.spherical_to_cartesian(rho, theta, phi)
    ga, gb = u.hgrad_arrays(x, y, t)
    return ga * ga + gb * gb


def energy_bulk(u: ScalarField, r: float = 1.0, spec: QuadSpec = QuadSpec()) -> IntegralResult:
    """``int_{B_r} |grad_H u|**2 / |xi|**2``, restricted to the support of ``u``."""
    _require_gradient(u)
    if not r > 0:
        raise InvalidArgumentError("radius must be positive")
    region = BallRegion((0.0, r), _support(u))
    return integrate_ball(lambda rho, th, ph: _grad_norm2_spherical(u, rho, th, ph) / rho**2, region, spec)


def energy_boundary(u: ScalarField, spec: QuadSpec = QuadSpec()) -> IntegralResult:
    """``int_{dB_1} |grad_H u|**2 / sqrt(x**2 + y**2) dsigma_H``.

    On the unit sphere sqrt(x**2 + y**2) = sqrt(sin phi) cancels the perimeter
    density, leaving a plain parameter integral.
    """
    _require_gradient(u)
    return integrate_sphere_param(lambda th, ph: _grad_norm2_spherical(u, 1.0, th, ph), _support(u), spec)


def A_quantities(u: ScalarField, region: SphereRegion | None = None, spec: QuadSpec = QuadSpec()):
    """``(A_rho, A_phi, A_u)``: radial and angular boundary energies and the weighted mass."""
    _require_gradient(u)
    region = region if region is not None else _support(u)

    def comps(th, ph):
        x, y, t = heis.spherical_to_cartesian(1.0, th, ph)
        ga, gb = u.hgrad_arrays(x, y, t)
        return heis.grad_components_arrays(ga, gb, x, y, t)

    a_rho = integrate_sphere_param(lambda th, ph: comps(th, ph)[0] ** 2, region, spec)
    a_phi = integrate_sphere_param(lambda th, ph: comps(th, ph)[1] ** 2, region, spec)

    def mass(th, ph):
        x, y, t = heis.spherical_to_cartesian(1.0, th, ph)
        return u.eval(x, y, t) ** 2 * np.sin(ph)

    a_u = integrate_sphere_param(mass, region, spec)
    return a_rho.value, a_phi.value, a_u.value


def integral_u2_shell(u: ScalarField, r_in: float, r_out: float, spec: QuadSpec = QuadSpec()) -> IntegralResult:
    region = BallRegion((r_in, r_out), _support(u))

    def g(rho, th, ph):
        x, y, t = heis.spherical_to_cartesian(rho, th, ph)
        return u.eval(x, y, t) ** 2

    return integrate_ball(g, region, spec)


def limitato_ratio(u: ScalarField, rho: float, spec: QuadSpec = QuadSpec()) -> float:
    """Bulk energy on ``B_rho`` over ``rho**-4 int_{B_2rho \\ B_rho} u**2``.

    For dilation-homogeneous ``u`` both sides scale identically, so the ratio
    does not depend on ``rho``.
    """
    if not 0 < rho <= 0.5:
        raise InvalidArgumentError("rho must lie in (0, 1/2]")
    num = energy_bulk(u, rho, spec).value
    den = rho ** (-heis.Q) * integral_u2_shell(u, rho, 2 * rho, spec).value
    if den == 0:
        raise DegenerateError(f"field {u.name!r} vanishes on the shell")
    return num / den
