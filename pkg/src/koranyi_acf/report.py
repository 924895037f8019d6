"""Verification suites and report serialisation (JSON, CSV, aligned text).

Every suite returns a :class:`Report`: a list of checks (computed value,
reference, error, tolerance, verdict) plus named tables.  Reports contain no
timings or environment data, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import acf, heis, quad, spectral
from .fields import PROFILES, rho2cos, separable_field, tplus, xplus
from .quad import QuadSpec
from .regions import BallRegion, SphereRegion, half_x_neg, half_x_pos, lower_half, upper_half

SCHEMA_VERSION = "1"
PI = math.pi


@dataclass
class Check:
    name: str
    value: float
    expected: Optional[float]
    error: float
    tol: float
    passed: bool
    note: str = ""

    def as_row(self):
        return [self.name, self.value, self.expected, self.error, self.tol, "pass" if self.passed else "FAIL", self.note]


CHECK_COLUMNS = ["check", "value", "expected", "error", "tol", "verdict", "note"]


@dataclass
class Table:
    columns: list
    rows: list


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, value, expected=None, tol=0.0, *, rel=False, error=None, passed=None, note=""):
        value = float(value)
        if error is None:
            if expected is None:
                error = 0.0
            else:
                error = abs(value - expected)
                if rel and expected != 0:
                    error /= abs(expected)
        if passed is None:
            passed = bool(error < tol) if tol > 0 else bool(error == 0)
        c = Check(name, value, None if expected is None else float(expected), float(error), float(tol), bool(passed), note)
        self.checks.append(c)
        return c

    def merge(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.value, c.expected, c.error, c.tol, c.passed, c.note))
        for k, t in other.tables.items():
            self.tables[prefix + k] = t
        for k, v in other.results.items():
            self.results[prefix + k] = v

    # --- serialisation -------------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "passed": self.ok,
            **self.results,
            "checks": [
                {"name": c.name, "value": c.value, "expected": c.expected, "error": c.error,
                 "tol": c.tol, "passed": c.passed, "note": c.note}
                for c in self.checks
            ],
            "tables": {k: {"columns": t.columns, "rows": t.rows} for k, t in self.tables.items()},
        }
        return json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        """The report's main table as CSV; the check list when there is no table."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.tables:
            for i, (name, t) in enumerate(self.tables.items()):
                if len(self.tables) > 1:
                    if i:
                        w.writerow([])
                    w.writerow([f"# {name}"])
                w.writerow(t.columns)
                w.writerows([_fmt_csv(v) for v in row] for row in t.rows)
        else:
            w.writerow(CHECK_COLUMNS)
            w.writerows([_fmt_csv(v) for v in c.as_row()] for c in self.checks)
        return buf.getvalue()

    def to_text(self) -> str:
        out = [f"{self.command}: {'PASS' if self.ok else 'FAIL'} ({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)"]
        if self.checks:
            out.append("")
            out.append(_aligned(CHECK_COLUMNS, [c.as_row() for c in self.checks]))
        for name, t in self.tables.items():
            out.append("")
            out.append(f"[{name}]")
            out.append(_aligned(t.columns, t.rows))
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        return {"json": self.to_json, "csv": self.to_csv, "text": self.to_text}[fmt]()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _fmt_csv(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _fmt_text(v):
    if v is None:
        return "-"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _aligned(columns, rows):
    cells = [list(map(str, columns))] + [[_fmt_text(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# --- suites ------------------------------------------------------------------


def sample_points(n: int, seed: int):
    """Seeded non-characteristic sample: rho in [0.5, 2], phi in [0.25, pi - 0.25]."""
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.5, 2.0, n)
    theta = rng.uniform(-PI, PI, n)
    phi = rng.uniform(0.25, PI - 0.25, n)
    return rho, theta, phi


def _theta_relative(theta0):
    """theta measured from theta0, continuous across the branch cut near theta0."""

    def u(x, y, t):
        c, s = np.cos(theta0), np.sin(theta0)
        return np.arctan2(y * c - x * s, x * c + y * s)

    return u


def _rho(x, y, t):
    return heis.gauge(x, y, t)


def _phi(x, y, t):
    return heis.cartesian_to_spherical(x, y, t)[2]


def verify_identities(seed: int = 42, tol: float = 1e-6, n: int = 1000) -> Report:
    """Closed-form frame identities against finite-difference oracles at seeded points."""
    rep = Report("verify-identities", {"seed": seed, "tol": tol, "points": n})
    rho, theta, phi = sample_points(n, seed)
    x, y, t = heis.spherical_to_cartesian(rho, theta, phi)
    fr = heis.frame_arrays(x, y, t)
    th_u = _theta_relative(theta)

    fd = {
        "rho": heis.hgrad_fd_arrays(_rho, x, y, t),
        "phi": heis.hgrad_fd_arrays(_phi, x, y, t),
        "theta": heis.hgrad_fd_arrays(th_u, x, y, t),
    }
    for k in ("rho", "phi", "theta"):
        a = fr[f"grad_{k}"]
        err = max(np.max(np.abs(a[0] - fd[k][0])), np.max(np.abs(a[1] - fd[k][1])))
        rep.add(f"grad_{k}", err, 0.0, tol, error=err)
    for k in ("rho", "phi", "theta"):
        g = fd[k]
        err = np.max(np.abs(fr[f"norm2_{k}"] - (g[0] ** 2 + g[1] ** 2)))
        rep.add(f"norm2_{k}", err, 0.0, tol, error=err)
    dot = lambda p, q: p[0] * q[0] + p[1] * q[1]  # noqa: E731
    for name, (a, b) in {"ip_phi_rho": ("phi", "rho"), "ip_rho_theta": ("rho", "theta"),
                         "ip_phi_theta": ("phi", "theta")}.items():
        err = np.max(np.abs(fr[name] - dot(fd[a], fd[b])))
        rep.add(name, err, 0.0, tol, error=err)
    closed_ip = np.max(np.abs(dot(fr["grad_phi"], fr["grad_rho"])))
    rep.add("ip_phi_rho_closed_form", closed_ip, 0.0, 1e-12, error=closed_ip,
            note="orthogonality from the closed-form gradients")
    lap = {
        "lap_rho": heis.kohn_laplacian_fd_arrays(_rho, x, y, t, richardson=True),
        "lap_phi": heis.kohn_laplacian_fd_arrays(_phi, x, y, t, richardson=True),
        "lap_theta": heis.kohn_laplacian_fd_arrays(th_u, x, y, t, richardson=True),
    }
    for k, v in lap.items():
        err = np.max(np.abs(fr[k] - v))
        rep.add(k, err, 0.0, tol, error=err)

    # radial formula on rho**4 and harmonic functions
    err = np.max(np.abs(heis.kohn_laplacian_fd_arrays(lambda x, y, t: heis.gauge(x, y, t) ** 4, x, y, t, richardson=True)
                        - heis.radial_laplacian(4 * rho**3, 12 * rho**2, x, y, t)))
    rep.add("radial_formula_rho4", err, 0.0, tol, error=err)
    u = rho2cos()
    err = np.max(np.abs(heis.kohn_laplacian_fd_arrays(u.eval, x, y, t, richardson=True)))
    rep.add("harmonic_rho2cos_fd", err, 0.0, tol, error=err)
    sep = u.separable
    err = np.max(np.abs(_sep_lap(sep, rho, theta, phi)))
    rep.add("harmonic_rho2cos_separable", err, 0.0, tol, error=err)
    fs = separable_field(1.0, "sqrt_sin_cos_theta")
    err = np.max(np.abs(_sep_lap(fs.separable, 1.0, theta, phi)))
    rep.add("harmonic_x_separable_on_sphere", err, 0.0, tol, error=err)
    f3 = separable_field(3.0, "sin_phi_sin_theta")
    err = np.max(np.abs(_sep_lap(f3.separable, rho, theta, phi) - heis.kohn_laplacian_fd_arrays(f3.eval, x, y, t, richardson=True)))
    rep.add("separable_laplacian_vs_fd", err, 0.0, tol, error=err)
    err = np.max(np.abs(heis.kohn_laplacian_fd_arrays(lambda x, y, t: heis.gauge(x, y, t) ** -2, x, y, t, richardson=True)))
    rep.add("fundamental_solution_harmonic", err, 0.0, tol, error=err)

    # decomposition of the gradient into e_rho and e_phi components
    for field_ in (xplus(), f3):
        ga, gb = field_.hgrad_arrays(x, y, t)
        r_c, a_c = heis.grad_components_arrays(ga, gb, x, y, t)
        err = np.max(np.abs(r_c**2 + a_c**2 - (ga**2 + gb**2)))
        rep.add(f"pythagoras[{field_.name}]", err, 0.0, 1e-10, error=err)
    ga, gb = f3.hgrad_arrays(x, y, t)
    _, a_c = heis.grad_components_arrays(ga, gb, x, y, t)
    closed = rho ** (2 * (3.0 - 1)) * np.sin(phi) * (f3.separable.f_theta(theta, phi) + 2 * f3.separable.f_phi(theta, phi)) ** 2
    err = np.max(np.abs(a_c**2 - closed) / np.maximum(1.0, closed))
    rep.add("phi_component_separable", err, 0.0, 1e-8, error=err)

    # group law and coordinates
    rng = np.random.default_rng(seed + 1)
    p, q, s = (rng.uniform(-2, 2, (3, n)) for _ in range(3))
    lhs = heis.mul_arrays(*heis.mul_arrays(*p, *q), *s)
    rhs = heis.mul_arrays(*p, *heis.mul_arrays(*q, *s))
    err = max(np.max(np.abs(a - b)) for a, b in zip(lhs, rhs))
    rep.add("associativity", err, 0.0, 1e-12, error=err)
    r = rng.uniform(0.1, 10, n)
    pt = rng.uniform(-2, 2, (3, n))
    g0 = heis.gauge(*pt)
    g1 = heis.gauge(r * pt[0], r * pt[1], r * r * pt[2])
    err = np.max(np.abs(g1 - r * g0) / (r * g0))
    rep.add("gauge_homogeneity", err, 0.0, 1e-12, error=err)
    back = heis.spherical_to_cartesian(*heis.cartesian_to_spherical(*pt))
    err = max(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))) for a, b in zip(back, pt))
    rep.add("spherical_round_trip", err, 0.0, 1e-12, error=err)
    return rep


def _sep_lap(sep, rho, theta, phi):
    return heis.laplacian_separable_arrays(
        sep.alpha, sep.f(theta, phi), sep.f_theta(theta, phi), sep.f_phi(theta, phi),
        sep.f_thth(theta, phi), sep.f_thph(theta, phi), sep.f_phph(theta, phi), rho, phi,
    )


def lemma_integrals(tol: float = 1e-9, spec: QuadSpec = QuadSpec()) -> Report:
    """Closed-form integrals, ratios and quotients (relative error against ``tol``)."""
    rep = Report("lemma-integrals", {"tol": tol, "panels": [spec.panels_rho, spec.panels_theta, spec.panels_phi],
                                     "nodes_per_panel": spec.nodes_per_panel})
    rows = []

    def row(name, res, exact):
        val = res.value if hasattr(res, "value") else float(res)
        c = rep.add(name, val, exact, tol, rel=True)
        rows.append([name, val, exact, abs(val - exact), c.error])

    xp, tp = xplus(), tplus()
    row("bulk x+ : int_{B1, x>0} rho^-2", quad.energy_bulk(xp, 1.0, spec), PI**2 / 2)
    row("boundary x+ : int_{dB1, x>0} (x^2+y^2)^-1/2 dsigma_H",
        quad.integrate_sphere_H(lambda th, ph: 1 / np.sqrt(np.sin(ph)), half_x_pos(), spec), PI**2)
    row("bulk t+ : int_{B1, t>0} 4(x^2+y^2) rho^-2", quad.energy_bulk(tp, 1.0, spec), 2 * PI)
    row("boundary t+ : int_{dB1, t>0} 4 sqrt(x^2+y^2) dsigma_H",
        quad.integrate_sphere_H(lambda th, ph: 4 * np.sqrt(np.sin(ph)), upper_half(), spec), 8 * PI)
    for R in (0.5, 1.0):
        row(f"int_{{B_{R:g}, t>0}} (x^2+y^2) rho^-2",
            quad.integrate_ball(lambda rho, th, ph: np.sin(ph) + 0 * rho, BallRegion((0.0, R), upper_half()), spec),
            PI * R**4 / 2)
    row("J(1) for (t+, t-) : 4 pi^2", acf.j_beta(acf.tpair(), 8.0, 1.0, spec).value, 4 * PI**2)
    a_rho, a_phi, a_u = quad.A_quantities(xp, None, spec)
    row("A_u for x+ : pi^2/4", a_u, PI**2 / 4)
    row("A_rho + A_phi for x+ : pi^2", a_rho + a_phi, PI**2)
    sep = PROFILES["sqrt_sin_cos_theta"](1.0)
    box = SphereRegion((0.0, PI), (0.0, PI))
    num = quad.integrate_sphere_param(
        lambda th, ph: sep.f_theta(th, ph) ** 2 / np.sin(ph) + 4 * np.sin(ph) * sep.f_theta(th, ph) * sep.f_phi(th, ph)
        + 4 * np.sin(ph) * sep.f_phi(th, ph) ** 2, box, spec)
    row("full angular form numerator : 3 pi^2/4", num, 3 * PI**2 / 4)
    row("boundary/bulk ratio x+ : 2", acf.boundary_bulk_ratio(xp, spec), 2.0)
    row("boundary/bulk ratio t+ : 4", acf.boundary_bulk_ratio(tp, spec), 4.0)
    row("rayleigh_phi x-half : 2", spectral.rayleigh_phi(xp.separable, half_x_pos(), spec), 2.0)
    row("rayleigh_phi t-cap : 8", spectral.rayleigh_phi(tp.separable, upper_half(), spec), 8.0)
    row("rayleigh_full sqrt(sin)cos on (0,pi)^2 : 3", spectral.rayleigh_full(sep, box, spec), 3.0)
    rep.tables["lemma_integrals"] = Table(["quantity", "computed", "exact", "abs_error", "rel_error"], rows)
    return rep


def eig(phi: float, grid_n: int = 2000, bc_inner: str = "natural") -> Report:
    res = spectral.solve_cap(spectral.CapProblem(phi, bc_inner, grid_n))
    rep = Report("eig", {"phi": phi, "grid": grid_n, "bc_inner": bc_inner})
    rep.results.update(res.to_dict())
    rep.results["lambda_coarse"] = res.diagnostics["lambda_coarse"]
    rep.results["lambda_fine"] = res.diagnostics["lambda_fine"]
    # same eigenpair with the operator normalised without the factor 4
    rep.results["lambda_unit_weight"] = res.lam / 4.0
    rep.add("converged", float(res.converged), 1.0, 0.5, passed=res.converged)
    rep.add("ground_state_sign", res.diagnostics["sign_changes"], 0.0, 0.5,
            passed=res.diagnostics["sign_changes"] == 0)
    rep.add("alpha_relation", res.alpha * (res.alpha + 2), res.lam, 1e-12, rel=True)
    rep.tables["eigenfunction"] = Table(["phi", "f"], [[float(a), float(b)] for a, b in zip(res.phi, res.eigenfunction)])
    return rep


def default_phi_grid(n: int = 21, margin: float = 0.1):
    return np.linspace(margin, PI - margin, n).tolist()


def h_scan(grid_n: int = 2000, phi_grid=None, tol: float = 1e-6) -> Report:
    phi_grid = default_phi_grid() if phi_grid is None else list(phi_grid)
    rep = Report("h-scan", {"grid": grid_n, "phi": phi_grid, "tol": tol})
    res = acf.cap_split_search(phi_grid, grid_n)
    rep.tables["h_scan"] = Table(["phi", "lambda0", "lambda0_mirror", "lambda_sum", "h"], [list(r) for r in res.table])
    rep.results.update({"argmin": res.argmin, "min_h": res.min_h})
    hs = {round(r[0], 12): r[4] for r in res.table}
    sym = 0.0
    for p in phi_grid:
        key = round(PI - p, 12)
        if key in hs:
            sym = max(sym, abs(hs[round(p, 12)] - hs[key]))
    rep.add("h_symmetry", sym, 0.0, tol, error=sym)
    worst = min(r[4] - 2 * (math.sqrt(2 + r[3]) - 2) for r in res.table)
    rep.add("sqrt_sum_lower_bound", worst, None, 0.0, error=max(0.0, -worst), passed=worst >= 0,
            note="min over grid of h - 2(sqrt(2 + lambda_sum) - 2)")
    lam_half = spectral.lambda0(PI / 2, grid_n)
    rep.add("lambda_sum(pi/2)", 2 * lam_half, 16.0, max(tol, 1e-4))
    rep.add("h(pi/2)", spectral.h_value(PI / 2, grid_n), 8.0, max(tol, 1e-4),
            note="cap/co-cap split at the equator")
    return rep


def acf_scan(pair_name: str, betas, radii, spec: QuadSpec = QuadSpec(), tol: float = 1e-6) -> Report:
    pair = acf.pair_from_name(pair_name)
    rep = Report("acf-scan", {"pair": pair.name, "beta": list(betas), "r": list(radii), "tol": tol,
                              "panels": [spec.panels_rho, spec.panels_theta, spec.panels_phi]})
    scan = acf.monotonicity_scan(pair, betas, radii, spec)
    ratio = acf.boundary_bulk_ratio(pair.u1, spec) + acf.boundary_bulk_ratio(pair.u2, spec)
    rep.results["ratio_sum"] = ratio
    rep.add("disjoint_supports", float(acf.check_disjoint(pair)), 1.0, 0.5, passed=acf.check_disjoint(pair))
    rows = []
    for b, r, j in scan.table:
        rows.append([b, r, j, scan.verdicts[b]])
    rep.tables["acf_scan"] = Table(["beta", "r", "J", "verdict"], rows)
    for b in scan.betas:
        d = ratio - b
        expect_mono = d >= -tol
        rep.add(f"verdict_consistent[beta={b:g}]", d, None, tol, error=0.0,
                passed=(scan.verdicts[b] == "monotone") == expect_mono,
                note=f"{scan.verdicts[b]}; J'(1)/J(1) = {d:.12g}")
    return rep


def full_report(seed: int = 42, tol: float = 1e-6, spec: QuadSpec = QuadSpec(), grid_n: int = 2000,
                grid2d: tuple = (128, 128)) -> Report:
    """Every verification suite plus the criterion-level checks, in a fixed order."""
    rep = Report("report", {"seed": seed, "tol": tol, "grid": grid_n, "grid2d": list(grid2d),
                            "panels": [spec.panels_rho, spec.panels_theta, spec.panels_phi]})
    rep.merge(verify_identities(seed, max(tol, 1e-6)), "identities/")
    rep.merge(lemma_integrals(1e-9, spec), "lemmas/")
    e = eig(PI / 2, grid_n)
    res = spectral.solve_cap(spectral.CapProblem(PI / 2, "natural", grid_n))
    rep.add("eig/lambda0(pi/2)", res.lam, 8.0, 1e-5)
    rep.add("eig/alpha(pi/2)", res.alpha, 2.0, 1e-5)
    rep.add("eig/cos_phi_distance", spectral.weighted_l2_distance(res, np.cos), 0.0, 1e-5,
            error=spectral.weighted_l2_distance(res, np.cos))
    rep.results["eig"] = e.results

    for pair, beta in ((acf.tpair(), 8.0), (acf.xpair(), 4.0)):
        d = acf.j_derivative_ratio(pair, beta, spec)
        rep.add(f"acf/derivative_ratio[{pair.name},beta={beta:g}]", d, 0.0, 1e-8)
    for name, betas, flip in (("xpair", [3.0, 4.0, 5.0], (4.0, 5.0)), ("tpair", [7.0, 8.0, 9.0], (8.0, 9.0))):
        s = acf_scan(name, betas, [0.25, 0.5, 1.0], spec)
        rep.merge(s, f"scan[{name}]/")
        v = dict(zip(betas, [s.tables["acf_scan"].rows[i * 3][3] for i in range(len(betas))]))
        flipped = v[flip[0]] == "monotone" and v[flip[1]] == "non-monotone"
        rep.add(f"acf/verdict_flip[{name}]", float(flipped), 1.0, 0.5, passed=flipped,
                note=f"monotone at beta={flip[0]:g}, not at beta={flip[1]:g}")
    for a, b in ((1.0, 1.0), (2.0, 3.0)):
        j = acf.j_beta(acf.tpair(a, b), 8.0, 1.0, spec).value
        rep.add(f"acf/J_product[{a:g},{b:g}]", j, 4 * PI**2 * a * a * b * b, 1e-9, rel=True)

    rep.merge(h_scan(grid_n, default_phi_grid(), 1e-8), "h/")

    for lam in (0.5, 2.0, 8.0):
        rep.merge(f_minimisation(lam), f"F[{lam:g}]/")

    for u in (xplus(), tplus()):
        vals = [quad.limitato_ratio(u, r, spec) for r in (0.1, 0.2, 0.4)]
        spread = (max(vals) - min(vals)) / abs(np.mean(vals))
        rep.add(f"limitato/spread[{u.name}]", spread, 0.0, 1e-6, error=spread)

    g = spectral.Grid2D(*grid2d, upper_half())
    lam_cap = spectral.min_rayleigh_phi(upper_half(), g)
    lam_xh = spectral.min_rayleigh_phi(half_x_pos(), spectral.Grid2D(*grid2d, half_x_pos()))
    rep.results["lambda_phi"] = {
        "t>0": {"lambda": lam_cap.lam, **_scalar_diag(lam_cap.diagnostics)},
        "x>0": {"lambda": lam_xh.lam, **_scalar_diag(lam_xh.diagnostics)},
    }
    trial = spectral.q1_trial_quotient(lambda th, ph: np.cos(ph), g)
    rep.add("lambda_phi/cap_le_trial", lam_cap.lam, None, 0.0, error=max(0.0, lam_cap.lam - trial),
            passed=lam_cap.lam <= trial + 1e-10, note=f"discrete cos(phi) quotient {trial:.12g}")
    rep.add("lambda_phi/x_half_le_2", lam_xh.lam, None, 0.0, error=max(0.0, lam_xh.lam - 2.0),
            passed=lam_xh.lam <= 2.0)
    bound_x = spectral.acf_term(lam_xh.lam) + spectral.acf_term(
        spectral.min_rayleigh_phi(half_x_neg(), spectral.Grid2D(*grid2d, half_x_neg())).lam)
    bound_t = spectral.acf_term(lam_cap.lam) + spectral.acf_term(
        spectral.min_rayleigh_phi(lower_half(), spectral.Grid2D(*grid2d, lower_half())).lam)
    grid_tol = 4 * abs(lam_cap.diagnostics.get("refinement_drop", 0.0))
    rx = acf.boundary_bulk_ratio(xplus(), spec) * 2
    rt = acf.boundary_bulk_ratio(tplus(), spec) * 2
    rep.add("acf/lower_bound[xpair]", bound_x, None, 0.0, error=max(0.0, bound_x - rx), passed=rx >= bound_x,
            note=f"ratio sum {rx:.12g}")
    rep.add("acf/lower_bound[tpair]", bound_t, None, grid_tol, error=max(0.0, bound_t - rt),
            passed=rt >= bound_t - grid_tol, note=f"ratio sum {rt:.12g}; grid tolerance {grid_tol:.3g}")
    return rep


def _scalar_diag(d):
    return {k: v for k, v in d.items() if isinstance(v, (int, float, bool, np.floating))}


def f_minimisation(lam: float) -> Report:
    """Closed-form minimum of F(s) against a numeric minimisation, and the beta split."""
    from scipy.optimize import minimize_scalar

    rep = Report("F", {"lambda": lam})
    closed = spectral.acf_term(lam)
    s_star = spectral.F_argmin(lam)
    grid = np.linspace(1e-6, 4 * max(s_star, 1.0), 20001)
    i = int(np.argmin(spectral.F(grid, lam)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda s: spectral.F(s, lam), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    rep.add("F_min", float(res.fun), closed, 1e-8)
    beta = spectral.beta_split(lam)
    rep.add("beta_in_unit_interval", beta, None, 0.0, passed=0 < beta < 1)
    b1 = (1 - beta) * lam
    b2 = 2 * math.sqrt(beta * lam)
    rep.add("beta_branches_equal", b1, b2, 1e-10)
    rep.add("beta_branch_value", min(b1, b2), closed, 1e-10)
    return rep
