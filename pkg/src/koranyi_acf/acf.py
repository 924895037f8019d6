"""Alt-Caffarelli-Friedman type functional on H^1 and its monotonicity diagnostics.

    J_beta(r) = r**-beta * E(u1, r) * E(u2, r),   E(u, r) = int_{B_r} |grad_H u|**2 / |xi|**2.

By dilation, ``J'(r) / J(r)`` at r = 1 equals ``ratio(u1) + ratio(u2) - beta``
where ``ratio(u)`` is the boundary energy of u over its bulk energy.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import quad, spectral
from .errors import DegenerateError, InvalidArgumentError
from .fields import ScalarField, t_part, tminus, tplus, xminus, xplus
from .quad import QuadSpec
from .regions import SphereRegion


@dataclass(frozen=True)
class TestPair:
    u1: ScalarField
    u2: ScalarField
    name: str
    homogeneity: Optional[tuple[float, float]] = None

    # keep pytest from collecting this class
    __test__ = False


@dataclass
class JResult:
    r: float
    beta: float
    bulk1: float
    bulk2: float
    value: float
    ratio1: Optional[float] = None
    ratio2: Optional[float] = None

    def to_dict(self):
        return {k: getattr(self, k) for k in ("r", "beta", "bulk1", "bulk2", "value", "ratio1", "ratio2")}


def _bulk_degree(u: ScalarField) -> Optional[float]:
    # |grad_H u|**2 has degree 2k - 2 and the weighted volume |xi|**-2 dxi degree 2
    return None if u.homogeneity is None else 2 * u.homogeneity


def make_pair(u1: ScalarField, u2: ScalarField, name: str) -> TestPair:
    g1, g2 = _bulk_degree(u1), _bulk_degree(u2)
    return TestPair(u1, u2, name, None if g1 is None or g2 is None else (g1, g2))


def xpair() -> TestPair:
    return make_pair(xplus(), xminus(), "xpair")


def tpair(a: float = 1.0, b: float = 1.0) -> TestPair:
    name = "tpair" if (a, b) == (1.0, 1.0) else f"tpair({a:g},{b:g})"
    if (a, b) == (1.0, 1.0):
        return make_pair(tplus(), tminus(), name)
    return make_pair(t_part(+1, a), t_part(-1, b), name)


PAIRS = {"xpair": xpair, "tpair": tpair}


def pair_from_name(name: str) -> TestPair:
    m = re.fullmatch(r"tpair\(([^,]+),([^)]+)\)", name.replace(" ", ""))
    if m:
        return tpair(float(m[1]), float(m[2]))
    if name not in PAIRS:
        raise InvalidArgumentError(f"unknown pair {name!r}; known: {sorted(PAIRS)} or tpair(a,b)")
    return PAIRS[name]()


def check_disjoint(pair: TestPair, n: int = 1000, seed: int = 0) -> bool:
    """Sampled check of ``u1 u2 = 0`` in B_1 and ``u1(0) = u2(0) = 0``."""
    rng = np.random.default_rng(seed)
    p = rng.uniform(-1.0, 1.0, (3, n))
    prod = pair.u1.eval(*p) * pair.u2.eval(*p)
    at0 = (pair.u1.eval(0.0, 0.0, 0.0), pair.u2.eval(0.0, 0.0, 0.0))
    return bool(np.all(prod == 0) and at0 == (0.0, 0.0))


def j_beta(pair: TestPair, beta: float, r: float, spec: QuadSpec = QuadSpec()) -> JResult:
    if not 0 < r <= 1:
        raise InvalidArgumentError("r must lie in (0, 1]")
    if not beta >= 0:
        raise InvalidArgumentError("beta must be non-negative")
    b1 = quad.energy_bulk(pair.u1, r, spec).value
    b2 = quad.energy_bulk(pair.u2, r, spec).value
    return JResult(r, beta, b1, b2, r ** (-beta) * b1 * b2)


def boundary_bulk_ratio(u: ScalarField, spec: QuadSpec = QuadSpec()) -> float:
    bulk = quad.energy_bulk(u, 1.0, spec).value
    if bulk <= 0:
        raise DegenerateError(f"bulk energy of {u.name!r} vanishes")
    return quad.energy_boundary(u, spec).value / bulk


def j_derivative_ratio(pair: TestPair, beta: float, spec: QuadSpec = QuadSpec()) -> float:
    """``J'(1) / J(1)``; non-negative exactly when the monotonicity criterion holds."""
    return boundary_bulk_ratio(pair.u1, spec) + boundary_bulk_ratio(pair.u2, spec) - beta


def acf_lower_bound(s1: SphereRegion, s2: SphereRegion, grid: Optional[spectral.Grid2D] = None) -> float:
    """Sum of ``2 (sqrt(1 + lambda_phi(S_i)) - 1)`` over the two regions."""
    total = 0.0
    for s in (s1, s2):
        g = None if grid is None else spectral.Grid2D(grid.theta_n, grid.phi_n, s)
        total += spectral.acf_term(max(spectral.min_rayleigh_phi(s, g).lam, 0.0))
    return total


@dataclass
class ScanReport:
    pair: str
    betas: list
    radii: list
    table: list = field(default_factory=list)  # rows of (beta, r, J)
    verdicts: dict = field(default_factory=dict)  # beta -> "monotone" | "non-monotone"


def monotonicity_scan(pair: TestPair, betas, radii, spec: QuadSpec = QuadSpec(), tol: float = 1e-9) -> ScanReport:
    """Tabulate J_beta on a radius grid and classify each beta.

    A beta is "monotone" when successive values never drop by more than
    ``tol`` relative to the larger of the two.
    """
    betas = [float(b) for b in betas]
    radii = [float(r) for r in radii]
    if not betas or not radii:
        raise InvalidArgumentError("beta and r grids must be nonempty")
    if any(b <= a for a, b in zip(radii, radii[1:])) or not (0 < radii[0] and radii[-1] <= 1):
        raise InvalidArgumentError("r grid must be strictly ascending in (0, 1]")
    # bulk energies do not depend on beta
    bulks = {r: (quad.energy_bulk(pair.u1, r, spec).value, quad.energy_bulk(pair.u2, r, spec).value) for r in radii}
    rep = ScanReport(pair.name, betas, radii)
    for b in betas:
        vals = [r ** (-b) * bulks[r][0] * bulks[r][1] for r in radii]
        rep.table.extend((b, r, v) for r, v in zip(radii, vals))
        ok = all(v2 - v1 >= -tol * max(abs(v1), abs(v2)) for v1, v2 in zip(vals, vals[1:]))
        rep.verdicts[b] = "monotone" if ok else "non-monotone"
    return rep


@dataclass
class CapSplitResult:
    argmin: float
    min_h: float
    table: list  # rows of (phi, lambda0, lambda0_mirror, lambda_sum, h)


def cap_split_search(phi_grid, grid_n: int = 2000) -> CapSplitResult:
    rows = []
    for phi in phi_grid:
        phi = float(phi)
        if not 0 < phi < math.pi:
            raise InvalidArgumentError("phi grid must lie in (0, pi)")
        l1 = spectral.lambda0(phi, grid_n)
        l2 = spectral.lambda0(math.pi - phi, grid_n)
        rows.append((phi, l1, l2, l1 + l2, spectral.acf_term(l1) + spectral.acf_term(l2)))
    best = min(rows, key=lambda row: row[4])
    return CapSplitResult(best[0], best[4], rows)
