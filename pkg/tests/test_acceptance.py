"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances.

Run directly (``python3 tests/test_acceptance.py``) for the summary alone, or
through pytest, which prints the same lines and fails on any FAIL.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from koranyi_acf import acf, quad, report, spectral
from koranyi_acf.fields import PROFILES, tplus, xplus
from koranyi_acf.quad import QuadSpec
from koranyi_acf.regions import BallRegion, SphereRegion, half_x_pos, upper_half

PI = math.pi
SPEC = QuadSpec()  # 8 panels x 16 nodes with refinement


def rel(a, b):
    return abs(a - b) / abs(b)


def crit_identities():
    t0 = time.perf_counter()
    rep = report.verify_identities(seed=42, tol=1e-5, n=1000)
    dt = time.perf_counter() - t0
    wanted = ["grad_rho", "grad_phi", "grad_theta", "norm2_rho", "norm2_phi", "norm2_theta",
              "ip_phi_rho", "ip_rho_theta", "ip_phi_theta", "lap_theta", "lap_rho", "lap_phi"]
    worst = max(c.error for c in rep.checks if c.name in wanted)
    return worst < 1e-5 and dt < 5.0, f"max abs error {worst:.2e} over 1000 points, {dt:.3f} s"


def crit_lemma_integrals():
    t0 = time.perf_counter()
    items = [
        (quad.energy_bulk(xplus(), 1.0, SPEC).value, PI**2 / 2),
        (quad.integrate_sphere_H(lambda th, ph: 1 / np.sqrt(np.sin(ph)), half_x_pos(), SPEC).value, PI**2),
        (quad.energy_bulk(tplus(), 1.0, SPEC).value, 2 * PI),
        (quad.integrate_sphere_H(lambda th, ph: 4 * np.sqrt(np.sin(ph)), upper_half(), SPEC).value, 8 * PI),
    ]
    for R in (0.5, 1.0):
        v = quad.integrate_ball(lambda rho, th, ph: np.sin(ph) + 0 * rho, BallRegion((0, R), upper_half()), SPEC)
        items.append((v.value, PI * R**4 / 2))
    dt = time.perf_counter() - t0
    worst = max(rel(a, b) for a, b in items)
    return worst < 1e-9 and dt < 10.0, f"max rel error {worst:.2e} over {len(items)} integrals, {dt:.2f} s"


def crit_ratios():
    box = SphereRegion((0.0, PI), (0.0, PI))
    items = [
        (acf.boundary_bulk_ratio(xplus(), SPEC), 2.0),
        (acf.boundary_bulk_ratio(tplus(), SPEC), 4.0),
        (spectral.rayleigh_phi(PROFILES["sqrt_sin_cos_theta"](), half_x_pos(), SPEC), 2.0),
        (spectral.rayleigh_phi(PROFILES["cos_phi"](), upper_half(), SPEC), 8.0),
        (spectral.rayleigh_full(PROFILES["sqrt_sin_cos_theta"](), box, SPEC), 3.0),
    ]
    worst = max(abs(a - b) for a, b in items)
    return worst < 1e-8, f"max abs error {worst:.2e} over {len(items)} quotients"


def crit_eigen():
    t0 = time.perf_counter()
    res = spectral.solve_cap(spectral.CapProblem(PI / 2, "natural", 2000))
    dt = time.perf_counter() - t0
    err = abs(res.lam - 8.0)
    dist = spectral.weighted_l2_distance(res, np.cos)
    return err < 1e-5 and dist < 1e-5 and dt < 10.0, f"|lambda - 8| = {err:.2e}, cos distance {dist:.2e}, {dt:.3f} s"


def crit_acf_zeros():
    zt = acf.j_derivative_ratio(acf.tpair(), 8.0, SPEC)
    zx = acf.j_derivative_ratio(acf.xpair(), 4.0, SPEC)
    radii = [0.25, 0.5, 1.0]
    sx = acf.monotonicity_scan(acf.xpair(), [4.0, 5.0], radii, SPEC).verdicts
    st = acf.monotonicity_scan(acf.tpair(), [8.0, 9.0], radii, SPEC).verdicts
    flips = (sx[4.0], sx[5.0], st[8.0], st[9.0]) == ("monotone", "non-monotone", "monotone", "non-monotone")
    ok = abs(zt) < 1e-8 and abs(zx) < 1e-8 and flips
    return ok, f"ratios {zt:.1e}, {zx:.1e}; verdict flips at 4|5 and 8|9: {flips}"


def crit_product():
    errs = [rel(acf.j_beta(acf.tpair(a, b), 8.0, 1.0, SPEC).value, 4 * PI**2 * a * a * b * b) for a, b in ((1, 1), (2, 3))]
    return max(errs) < 1e-9, f"max rel error {max(errs):.2e}"


def crit_h_suite():
    grid = np.linspace(0.1, PI - 0.1, 21)
    res = acf.cap_split_search(grid, 2000)
    hs = np.array([row[4] for row in res.table])
    sym = float(np.max(np.abs(hs - hs[::-1])))
    lam_sum = 2 * spectral.lambda0(PI / 2)
    bound = all(row[4] >= 2 * (math.sqrt(2 + row[3]) - 2) for row in res.table)
    ok = sym < 1e-8 and abs(lam_sum - 16) < 1e-4 and bound
    return ok, f"symmetry {sym:.1e}, lambda sum {lam_sum:.8f}, sqrt bound holds: {bound}"


def crit_F():
    from scipy.optimize import minimize_scalar

    errs, splits = [], []
    for lam in (0.5, 2.0, 8.0):
        s_star = spectral.F_argmin(lam)
        num = minimize_scalar(lambda s: spectral.F(s, lam), bounds=(0.0, 4 * s_star + 4), method="bounded",
                              options={"xatol": 1e-12})
        errs.append(abs(num.fun - spectral.acf_term(lam)))
        b = spectral.beta_split(lam)
        splits.append(0 < b < 1 and abs((1 - b) * lam - 2 * math.sqrt(b * lam)) < 1e-10)
    return max(errs) < 1e-8 and all(splits), f"max F error {max(errs):.1e}, beta splits valid: {all(splits)}"


def crit_scaling():
    spreads = []
    for u in (xplus(), tplus()):
        v = [quad.limitato_ratio(u, r, SPEC) for r in (0.1, 0.2, 0.4)]
        spreads.append((max(v) - min(v)) / abs(np.mean(v)))
    return max(spreads) < 1e-6, f"rel spreads x+ {spreads[0]:.1e}, t+ {spreads[1]:.1e}"


def _report_bytes(threads):
    env = dict(os.environ, KORANYI_ACF_THREADS=str(threads))
    out = subprocess.run(
        [sys.executable, "-m", "koranyi_acf.cli", "report", "--seed", "42", "--output", "json"],
        capture_output=True, env=env, check=False,
    )
    return out.returncode, out.stdout


def crit_determinism():
    (c1, a), (c2, b) = _report_bytes(1), _report_bytes(3)
    return a == b and len(a) > 0 and c1 == c2 == 0, f"{len(a)} bytes, identical: {a == b}, exit codes {c1}/{c2}"


CRITERIA = [
    ("1 identity suite", crit_identities),
    ("2 lemma integrals", crit_lemma_integrals),
    ("3 ratios and quotients", crit_ratios),
    ("4 cap eigen solver", crit_eigen),
    ("5 ACF zeros and verdict flips", crit_acf_zeros),
    ("6 scaled t pair product", crit_product),
    ("7 h suite", crit_h_suite),
    ("8 F minimum and beta split", crit_F),
    ("9 scaling of limitato ratio", crit_scaling),
    ("10 determinism across thread caps", crit_determinism),
]


def line(name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}"


@pytest.mark.parametrize("name, fn", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + line(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [(name, *fn()) for name, fn in CRITERIA]
    for name, ok, detail in results:
        print(line(name, ok, detail))
    sys.exit(0 if all(ok for _, ok, _ in results) else 1)
