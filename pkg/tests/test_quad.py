import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koranyi_acf import quad
from koranyi_acf.errors import DegenerateError, InvalidArgumentError, MissingGradientError, PropagatedNaNError
from koranyi_acf.fields import ScalarField, field_from_name, linear_part, separable_field, tminus, tplus, xplus
from koranyi_acf.quad import QuadSpec
from koranyi_acf.regions import FULL_SPHERE, BallRegion, SphereRegion, half_x_pos, upper_half

PI = math.pi


def test_composite_rule_integrates_polynomials():
    x, w = quad.composite_rule(0.0, 2.0, 3, 5)
    assert w.sum() == pytest.approx(2.0)
    assert np.dot(w, x**9) == pytest.approx(2.0**10 / 10, rel=1e-13)
    assert x.min() > 0 and x.max() < 2  # open nodes


def test_ball_volume_closed_form(fast_spec):
    # |B_1| = 1/4 * 2 pi * pi
    res = quad.integrate_ball(lambda rho, th, ph: 1.0 + 0 * rho, BallRegion((0.0, 1.0)), fast_spec)
    assert res.value == pytest.approx(PI**2 / 2, rel=1e-14)


@pytest.mark.parametrize(
    "g, region, expected",
    [
        (lambda rho, th, ph: rho**-2, BallRegion((0, 1), half_x_pos()), PI**2 / 2),
        (lambda rho, th, ph: np.sin(ph) + 0 * rho, BallRegion((0, 0.5), upper_half()), PI * 0.5**4 / 2),
        (lambda rho, th, ph: np.sin(ph) + 0 * rho, BallRegion((0, 1), upper_half()), PI / 2),
        (lambda rho, th, ph: 0 * rho, BallRegion((0, 1)), 0.0),
    ],
)
def test_integrate_ball_examples(g, region, expected, fast_spec):
    assert quad.integrate_ball(g, region, fast_spec).value == pytest.approx(expected, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize(
    "g, region, expected",
    [
        (lambda th, ph: 1 / np.sqrt(np.sin(ph)), half_x_pos(), PI**2),
        (lambda th, ph: 4 * np.sqrt(np.sin(ph)), upper_half(), 8 * PI),
        (lambda th, ph: 0 * ph, FULL_SPHERE, 0.0),
    ],
)
def test_integrate_sphere_examples(g, region, expected, fast_spec):
    assert quad.integrate_sphere_H(g, region, fast_spec).value == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_default_spec_reports_error_estimate():
    res = quad.integrate_ball(lambda rho, th, ph: rho**-2, BallRegion((0, 1), half_x_pos()))
    assert res.err_estimate < 1e-12
    assert res.nodes_used == (8 * 16) ** 3 + (16 * 16) ** 3
    assert set(res.to_dict()) == {"value", "err_estimate", "nodes_used"}


def test_empty_region_gives_zero(fast_spec):
    res = quad.integrate_sphere_H(lambda th, ph: 1 + 0 * ph, SphereRegion((0.0, 0.0), (0.0, PI)), fast_spec)
    assert res.value == 0.0 and res.err_estimate == 0.0
    res = quad.integrate_ball(lambda rho, th, ph: 1 + 0 * ph, BallRegion((0.5, 0.5)), fast_spec)
    assert res.value == 0.0 and res.err_estimate == 0.0


def test_nan_propagates(fast_spec):
    with pytest.raises(PropagatedNaNError):
        quad.integrate_sphere_H(lambda th, ph: np.full_like(ph, np.nan), FULL_SPHERE, fast_spec)


def test_predicate_region(fast_spec):
    # predicate masks cells; the integral of a masked constant converges slowly, so only check bounds
    r = SphereRegion(predicate=lambda th, ph: np.cos(th) > 0, name="x>0 by predicate")
    v = quad.integrate_sphere_param(lambda th, ph: 1 + 0 * ph, r, QuadSpec(8, 8, 8, 16, False)).value
    assert v == pytest.approx(PI**2, rel=1e-2)


@pytest.mark.parametrize("args", [(0, 1, 1), (1, 1, 1, 1)], ids=["panels", "nodes"])
def test_quadspec_rejects_bad_values(args):
    with pytest.raises(InvalidArgumentError):
        QuadSpec(*args)


# --- surface measure -------------------------------------------------------------


def test_surface_crosscheck_random():
    assert quad.surface_measure_crosscheck(10_000, seed=3) < 1e-12


def test_surface_crosscheck_equator_and_pole():
    assert quad.surface_measure_crosscheck(10, phi=PI / 2) < 1e-15
    assert quad.surface_measure_crosscheck(10, phi=1e-6) < 1e-12


# --- energies --------------------------------------------------------------------


@pytest.mark.parametrize(
    "u, r, expected",
    [(xplus(), 1.0, PI**2 / 2), (tplus(), 1.0, 2 * PI), (xplus(), 2.0, 2 * PI**2), (tminus(), 1.0, 2 * PI)],
)
def test_energy_bulk(u, r, expected, fast_spec):
    assert quad.energy_bulk(u, r, fast_spec).value == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("u, expected", [(xplus(), PI**2), (tplus(), 8 * PI)])
def test_energy_boundary(u, expected, fast_spec):
    assert quad.energy_boundary(u, fast_spec).value == pytest.approx(expected, rel=1e-12)


def test_energy_boundary_of_constant_is_zero(fast_spec):
    assert quad.energy_boundary(separable_field(0.0, "one"), fast_spec).value == 0.0


def test_missing_gradient():
    u = ScalarField("opaque", lambda x, y, t: x * y)
    with pytest.raises(MissingGradientError):
        quad.energy_bulk(u)


def test_A_quantities_xplus(fast_spec):
    a_rho, a_phi, a_u = quad.A_quantities(xplus(), None, fast_spec)
    assert a_u == pytest.approx(PI**2 / 4, rel=1e-12)
    assert a_rho + a_phi == pytest.approx(quad.energy_boundary(xplus(), fast_spec).value, rel=1e-12)


def test_A_quantities_explicit_region(fast_spec):
    u = separable_field(1.0, "sqrt_sin_cos_theta")
    zero = ScalarField("zero", lambda x, y, t: 0 * x, hgrad=lambda x, y, t: (0 * x, 0 * x))
    assert quad.A_quantities(zero, half_x_pos(), fast_spec) == (0.0, 0.0, 0.0)
    assert quad.A_quantities(u, half_x_pos(), fast_spec)[2] == pytest.approx(PI**2 / 4)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 1.0))
def test_linear_part_energy_rotation_invariant(a, b, r):
    n2 = a * a + b * b
    if n2 < 1e-2:
        return
    spec = QuadSpec(2, 2, 2, 16, False)
    e = quad.energy_bulk(linear_part(a, b), r, spec).value
    assert e == pytest.approx(n2 * PI**2 / 2 * r * r, rel=1e-10)


@pytest.mark.parametrize("u", [xplus(), tplus()], ids=["x+", "t+"])
def test_limitato_ratio_constant(u, fast_spec):
    vals = [quad.limitato_ratio(u, r, fast_spec) for r in (0.1, 0.2, 0.4)]
    assert max(vals) - min(vals) < 1e-6 * abs(np.mean(vals))
    assert all(0 < v < np.inf for v in vals)


@pytest.mark.parametrize("rho", [0.0, 0.6])
def test_limitato_ratio_domain(rho):
    with pytest.raises(InvalidArgumentError):
        quad.limitato_ratio(xplus(), rho)


def test_limitato_ratio_degenerate(fast_spec):
    zero = ScalarField("zero", lambda x, y, t: 0 * x, hgrad=lambda x, y, t: (0 * x, 0 * x))
    with pytest.raises(DegenerateError):
        quad.limitato_ratio(zero, 0.2, fast_spec)


def test_field_catalog_names():
    assert field_from_name("t-scaled(2,3)").name.startswith("t-scaled")
    assert field_from_name("x-linear(1,2)").support is not None
    with pytest.raises(InvalidArgumentError):
        field_from_name("nope")


@pytest.mark.parametrize("threads", ["1", "3"])
def test_thread_cap_does_not_change_sums(monkeypatch, threads):
    monkeypatch.setenv(quad.THREADS_ENV, "1")
    ref = quad.energy_bulk(tplus(), 1.0, QuadSpec(4, 4, 4, 16, False)).value
    monkeypatch.setenv(quad.THREADS_ENV, threads)
    assert quad.energy_bulk(tplus(), 1.0, QuadSpec(4, 4, 4, 16, False)).value == ref


def test_thread_env_validation(monkeypatch):
    monkeypatch.setenv(quad.THREADS_ENV, "-2")
    with pytest.raises(InvalidArgumentError):
        quad.worker_count()
