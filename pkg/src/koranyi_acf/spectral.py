"""Cap eigenvalue problems on the Korányi sphere and the angular Rayleigh quotients.

Eigenvalues follow the Rayleigh convention

    lambda = 4 int sin(phi) f'**2 / int sin(phi) f**2,

for which the half-sphere cap ``{phi < pi/2}`` has ``lambda = 8`` with
eigenfunction ``cos(phi)``, and ``alpha(alpha + 2) = lambda`` gives the
homogeneity ``alpha`` of the associated harmonic function ``rho**alpha f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import solve_banded

from . import heis
from .errors import ConvergenceError, DegenerateError, InvalidArgumentError, PoleError
from .fields import Separable
from .quad import QuadSpec, integrate_sphere_param
from .regions import SphereRegion

# --- characteristic constants -----------------------------------------------


def char_alpha(lam: float) -> float:
    """Positive root of alpha**2 + 2 alpha - lam = 0."""
    if lam < 0:
        raise InvalidArgumentError(f"eigenvalue must be non-negative, got {lam}")
    # lam / (1 + sqrt(1 + lam)) avoids cancellation for small lam
    return lam / (1.0 + math.sqrt(1.0 + lam))


def acf_term(lam: float) -> float:
    return 2.0 * char_alpha(lam)


def F(s, lam):
    """``(s + lam) / (1 + sqrt(s))``; its minimum over s > 0 is ``acf_term(lam)``."""
    return (s + lam) / (1.0 + np.sqrt(s))


def F_argmin(lam: float) -> float:
    return char_alpha(lam) ** 2


def beta_split(lam: float) -> float:
    """The ``beta`` in (0, 1) balancing ``(1 - beta) lam`` against ``2 sqrt(beta lam)``."""
    if not lam > 0:
        raise InvalidArgumentError("beta split needs lam > 0")
    return (char_alpha(lam) / math.sqrt(lam)) ** 2


# --- 1-D cap problem ---------------------------------------------------------


@dataclass(frozen=True)
class CapProblem:
    phi0: float
    bc_inner: str = "natural"
    grid_n: int = 2000

    def __post_init__(self):
        if not 0 < self.phi0 < math.pi:
            raise InvalidArgumentError("phi0 must lie in (0, pi)")
        if self.bc_inner not in ("natural", "dirichlet"):
            raise InvalidArgumentError("bc_inner must be 'natural' or 'dirichlet'")
        if self.grid_n < 50:
            raise InvalidArgumentError("grid_n must be at least 50")


@dataclass
class EigenResult:
    lam: float
    alpha: float
    eigenfunction: np.ndarray
    phi: np.ndarray
    converged: bool
    grid_n: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"lambda": self.lam, "alpha": self.alpha, "converged": self.converged, "grid_n": self.grid_n}


def _cap_system(phi0: float, n: int, bc_inner: str):
    """Finite-volume stiffness (tridiagonal) and lumped mass on nodes i*h, h = phi0/n.

    Stiffness uses midpoint weights 4 sin(phi_{i+1/2}) / h; the mass of node i
    is the exact integral of sin over its dual cell, which stays positive at
    the degenerate endpoint phi = 0.
    """
    h = phi0 / n
    nodes = np.arange(n + 1) * h
    k = 4.0 * np.sin(nodes[:-1] + h / 2) / h
    lo = np.clip(nodes - h / 2, 0.0, phi0)
    hi = np.clip(nodes + h / 2, 0.0, phi0)
    mass = np.cos(lo) - np.cos(hi)
    diag = np.zeros(n + 1)
    diag[:-1] += k
    diag[1:] += k
    off = -k
    first = 1 if bc_inner == "dirichlet" else 0
    sl = slice(first, n)  # node n carries the Dirichlet condition
    return nodes[sl], diag[sl], off[first : n - 1], mass[sl], (k, first)


def _edge_energy(v, edges):
    # sum of k (v_{i+1} - v_i)**2 over all edges; no cancellation, unlike v.Kv
    k, first = edges
    full = np.zeros(k.size + 1)
    full[first : k.size] = v
    return float(np.dot(k, np.diff(full) ** 2))


def _inverse_iteration(diag, off, mass, edges, tol=1e-12, max_iter=500):
    """Smallest eigenpair of K v = lam M v, K symmetric tridiagonal SPD, M diagonal."""
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    v = np.ones(n)
    v /= math.sqrt(float(np.dot(v * mass, v)))
    lam_old = math.inf
    for it in range(1, max_iter + 1):
        w = solve_banded((1, 1), ab, mass * v)
        w /= math.sqrt(float(np.dot(w * mass, w)))
        # the vector converges at the square root of the eigenvalue rate
        dv = math.sqrt(float(np.dot((w - v) * mass, w - v)))
        v = w
        lam = _edge_energy(v, edges)
        if abs(lam - lam_old) <= tol * abs(lam) and dv <= math.sqrt(tol) * 1e-3:
            return lam, v, it, True
        lam_old = lam
    return lam, v, max_iter, False


def _solve_on_grid(p: CapProblem, n: int):
    nodes, diag, off, mass, edges = _cap_system(p.phi0, n, p.bc_inner)
    lam, v, iters, ok = _inverse_iteration(diag, off, mass, edges)
    if not ok:
        raise ConvergenceError(
            f"inverse iteration did not converge for phi0={p.phi0}, n={n}",
            {"iterations": iters, "lambda": lam},
        )
    if v.sum() < 0:
        v = -v
    return lam, v, nodes, mass, iters


def solve_cap(p: CapProblem) -> EigenResult:
    """Ground state of the cap ``{phi < phi0}`` with Dirichlet data on ``phi = phi0``.

    Solved on ``grid_n`` and ``2 grid_n`` cells; the reported eigenvalue is the
    Richardson extrapolation ``(4 lam_fine - lam_coarse) / 3`` and the
    eigenfunction is the fine-grid vector normalised to ``int sin f**2 = 1``.
    """
    lam_c, _, _, _, it_c = _solve_on_grid(p, p.grid_n)
    lam_f, v, nodes, mass, it_f = _solve_on_grid(p, 2 * p.grid_n)
    lam = (4.0 * lam_f - lam_c) / 3.0
    sign_changes = int(np.count_nonzero(np.diff(np.sign(v[np.abs(v) > 1e-12 * np.abs(v).max()]))))
    return EigenResult(
        lam=lam,
        alpha=char_alpha(max(lam, 0.0)),
        eigenfunction=v,
        phi=nodes,
        converged=True,
        grid_n=p.grid_n,
        diagnostics={
            "lambda_coarse": lam_c,
            "lambda_fine": lam_f,
            "richardson_correction": lam - lam_f,
            "iterations": [it_c, it_f],
            "sign_changes": sign_changes,
            "mass_weights": mass,
        },
    )


@lru_cache(maxsize=4096)
def _lambda0_cached(phi: float, grid_n: int) -> float:
    return solve_cap(CapProblem(phi, "natural", grid_n)).lam


def lambda0(phi: float, grid_n: int = 2000) -> float:
    """Ground-state eigenvalue of the cap of half-opening ``phi`` around the t-axis."""
    if not 0 < phi < math.pi:
        raise InvalidArgumentError("phi must lie in (0, pi)")
    return _lambda0_cached(float(phi), int(grid_n))


def h_value(phi: float, grid_n: int = 2000) -> float:
    """Lower bound obtained by splitting the sphere into ``{phi' < phi}`` and its complement."""
    return acf_term(lambda0(phi, grid_n)) + acf_term(lambda0(math.pi - phi, grid_n))


def weighted_l2_distance(result: EigenResult, reference) -> float:
    """Distance in L2(sin phi dphi) between the normalised eigenfunction and ``reference``."""
    m = result.diagnostics["mass_weights"]
    g = np.asarray(reference(result.phi), dtype=float)
    g = g / math.sqrt(float(np.dot(g * m, g)))
    if np.dot(g * m, result.eigenfunction) < 0:
        g = -g
    d = result.eigenfunction - g
    return math.sqrt(float(np.dot(d * m, d)))


# --- angular Rayleigh quotients ----------------------------------------------


def rayleigh_phi(f: Separable, region: SphereRegion, spec: QuadSpec = QuadSpec()) -> float:
    """``int sin (f_theta + 2 f_phi)**2 / int sin f**2`` over ``region``."""
    num = integrate_sphere_param(
        lambda th, ph: np.sin(ph) * (f.f_theta(th, ph) + 2 * f.f_phi(th, ph)) ** 2, region, spec
    ).value
    den = integrate_sphere_param(lambda th, ph: np.sin(ph) * f.f(th, ph) ** 2, region, spec).value
    if den == 0:
        raise DegenerateError("trial function vanishes on the region")
    return num / den


def rayleigh_full(f: Separable, region: SphereRegion, spec: QuadSpec = QuadSpec()) -> float:
    """Quotient of the full angular form ``<A_sym grad f, grad f>`` over ``int sin f**2``."""

    def form(th, ph):
        s = np.sin(ph)
        ft, fp = f.f_theta(th, ph), f.f_phi(th, ph)
        return ft * ft / s + 4 * s * ft * fp + 4 * s * fp * fp

    num = integrate_sphere_param(form, region, spec).value
    den = integrate_sphere_param(lambda th, ph: np.sin(ph) * f.f(th, ph) ** 2, region, spec).value
    if den == 0:
        raise DegenerateError("trial function vanishes on the region")
    return num / den


def divergence_matrix(alpha: float, phi: float):
    """The (non-symmetric) divergence-form matrix of the angular operator and its symmetric part."""
    s = math.sin(phi)
    if heis.at_pole(phi):
        raise PoleError("the divergence matrix has a 1/sin(phi) entry")
    a = np.array([[1 / s, (4 + 2 * alpha) * s], [-2 * alpha * s, 4 * s]])
    a_sym = np.array([[1 / s, 2 * s], [2 * s, 4 * s]])
    return a, a_sym


# --- 2-D degenerate quotient -------------------------------------------------


@dataclass(frozen=True)
class Grid2D:
    theta_n: int
    phi_n: int
    region: SphereRegion

    def __post_init__(self):
        if self.theta_n < 2 or self.phi_n < 2:
            raise InvalidArgumentError("grid needs at least two cells per axis")


def _q1_system(g: Grid2D, quad_nodes: int = 3):
    """Bilinear finite-element matrices of ``int sin (v_theta + 2 v_phi)**2`` and ``int sin v**2``.

    Boundary treatment: theta is periodic when the region spans 2 pi, otherwise
    the theta edges are Dirichlet; a phi edge is Dirichlet unless it is a pole
    (phi = 0 or pi), where the weight vanishes and no condition is imposed.
    Nodes outside the region predicate are fixed to zero.
    """
    reg = g.region
    (ta, tb), (pa, pb) = reg.theta_range, reg.phi_range
    nt, nphi = g.theta_n, g.phi_n
    ht, hp = (tb - ta) / nt, (pb - pa) / nphi
    periodic = reg.periodic_theta
    n_tnodes = nt if periodic else nt + 1
    n_pnodes = nphi + 1

    x, w = np.polynomial.legendre.leggauss(quad_nodes)
    q = 0.5 * (x + 1.0)
    w = 0.5 * w
    # local bilinear basis on the unit square, corners (0,0),(1,0),(0,1),(1,1)
    corners = [(0, 0), (1, 0), (0, 1), (1, 1)]
    QA, QB = np.meshgrid(q, q, indexing="ij")
    WQ = np.outer(w, w)

    def basis(a, b, ca, cb):
        return (a if ca else 1 - a) * (b if cb else 1 - b)

    def dbasis(a, b, ca, cb):
        da = (1 if ca else -1) * (b if cb else 1 - b)
        db = (a if ca else 1 - a) * (1 if cb else -1)
        return da, db

    # element matrices depend on the cell's phi row through sin(phi) only
    ci, cj = np.meshgrid(np.arange(nt), np.arange(nphi), indexing="ij")
    rows, cols, kvals, mvals = [], [], [], []
    phi_q = pa + (np.arange(nphi)[:, None, None] + QB[None]) * hp  # (nphi, nq, nq)
    sin_q = np.sin(phi_q)
    vals_b = [basis(QA, QB, *c) for c in corners]
    dvals = [dbasis(QA, QB, *c) for c in corners]
    dirs = [da / ht + 2 * db / hp for (da, db) in dvals]
    area = ht * hp
    for i, ci_ in enumerate(corners):
        for j, cj_ in enumerate(corners):
            ke = np.einsum("pab,ab->p", sin_q, dirs[i] * dirs[j] * WQ) * area
            me = np.einsum("pab,ab->p", sin_q, vals_b[i] * vals_b[j] * WQ) * area
            ti = (ci + ci_[0]) % n_tnodes if periodic else ci + ci_[0]
            tj = (ci + cj_[0]) % n_tnodes if periodic else ci + cj_[0]
            rows.append((ti * n_pnodes + cj + ci_[1]).ravel())
            cols.append((tj * n_pnodes + cj + cj_[1]).ravel())
            kvals.append(np.broadcast_to(ke[None, :], ci.shape).ravel())
            mvals.append(np.broadcast_to(me[None, :], ci.shape).ravel())
    size = n_tnodes * n_pnodes
    K = sp.coo_matrix((np.concatenate(kvals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)).tocsr()
    M = sp.coo_matrix((np.concatenate(mvals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)).tocsr()

    th_nodes = ta + np.arange(n_tnodes) * ht
    ph_nodes = pa + np.arange(n_pnodes) * hp
    TH, PH = np.meshgrid(th_nodes, ph_nodes, indexing="ij")
    free = np.ones(TH.shape, dtype=bool)
    if not periodic:
        free[0, :] = free[-1, :] = False
    if not reg.touches_north_pole:
        free[:, 0] = False
    if not reg.touches_south_pole:
        free[:, -1] = False
    if reg.predicate is not None:
        free &= np.asarray(reg.predicate(TH, PH), dtype=bool)
    idx = np.flatnonzero(free.ravel())
    return K[idx][:, idx], M[idx][:, idx], TH.ravel()[idx], PH.ravel()[idx]


def _q1_rayleigh(K, M, v):
    return float(v @ (K @ v)) / float(v @ (M @ v))


def min_rayleigh_phi(region: SphereRegion, g: Grid2D | None = None, eps_reg: float = 1e-12,
                     tol: float = 1e-12, max_iter: int = 2000) -> EigenResult:
    """Smallest generalised eigenvalue of the discretised degenerate angular form.

    The form ``int sin (v_theta + 2 v_phi)**2`` only controls derivatives along
    the lines ``phi - 2 theta = const``.  A conforming bilinear Ritz space keeps
    the discrete value an upper bound of the continuous infimum; the solve is
    shift-invert inverse iteration on ``K + eps_reg M``.  Diagnostics include a
    half-resolution value so callers can judge the trend under refinement.
    """
    if g is None:
        g = Grid2D(128, 128, region)
    elif g.region != region:
        g = Grid2D(g.theta_n, g.phi_n, region)
    K, M, TH, PH = _q1_system(g)
    if K.shape[0] < 4:
        raise InvalidArgumentError("interior grid has fewer than four free nodes")
    lam, v, iters, ok = _sparse_inverse_iteration(K, M, eps_reg, tol, max_iter)
    if not ok:
        raise ConvergenceError("2-D inverse iteration did not converge", {"iterations": iters, "lambda": lam})
    diag = {"iterations": iters, "eps_reg": eps_reg, "n_free": int(K.shape[0])}
    lam_shifted, *_ = _sparse_inverse_iteration(K, M, 1e3 * eps_reg, tol, max_iter)
    diag["eps_sensitivity"] = abs(lam_shifted - lam)
    if g.theta_n >= 8 and g.phi_n >= 8:
        Kc, Mc, *_ = _q1_system(Grid2D(g.theta_n // 2, g.phi_n // 2, region))
        diag["lambda_half_grid"] = _sparse_inverse_iteration(Kc, Mc, eps_reg, tol, max_iter)[0]
        # Ritz values decrease toward the infimum; a positive limit is suggested
        # when halving the mesh size changes the value by a small fraction of it
        diag["refinement_drop"] = diag["lambda_half_grid"] - lam
        diag["positive_limit_likely"] = bool(lam > 0 and diag["refinement_drop"] < 0.25 * lam)
    if v.sum() < 0:
        v = -v
    return EigenResult(
        lam=lam,
        alpha=char_alpha(max(lam, 0.0)),
        eigenfunction=v,
        phi=np.stack([TH, PH]),
        converged=ok,
        grid_n=g.theta_n * g.phi_n,
        diagnostics=diag,
    )


def _sparse_inverse_iteration(K, M, eps_reg, tol, max_iter):
    lu = spla.splu((K + eps_reg * M).tocsc())
    v = np.ones(K.shape[0])
    v /= math.sqrt(float(v @ (M @ v)))
    lam_old = math.inf
    lam = math.inf
    for it in range(1, max_iter + 1):
        w = lu.solve(M @ v)
        v = w / math.sqrt(float(w @ (M @ w)))
        lam = float(v @ (K @ v))
        if abs(lam - lam_old) <= tol * max(abs(lam), 1e-300):
            return lam, v, it, True
        lam_old = lam
    return lam, v, max_iter, False


def q1_trial_quotient(f, g: Grid2D) -> float:
    """Discrete quotient of the nodal interpolant of ``f(theta, phi)`` on the same Ritz space."""
    K, M, TH, PH = _q1_system(g)
    return _q1_rayleigh(K, M, np.asarray(f(TH, PH), dtype=float))
