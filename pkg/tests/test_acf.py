import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koranyi_acf import acf, spectral
from koranyi_acf.errors import DegenerateError, InvalidArgumentError
from koranyi_acf.fields import ScalarField, xplus
from koranyi_acf.quad import QuadSpec
from koranyi_acf.regions import half_x_neg, half_x_pos, lower_half, upper_half

PI = math.pi
FAST = QuadSpec(2, 2, 2, 16, refine=False)


@pytest.mark.parametrize("beta", [0.0, 4.0, 8.0, 11.5])
def test_tpair_J_at_unit_radius(beta):
    assert acf.j_beta(acf.tpair(), beta, 1.0, FAST).value == pytest.approx(4 * PI**2, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5))
def test_scaled_tpair_product(a, b):
    j = acf.j_beta(acf.tpair(a, b), 8.0, 1.0, FAST).value
    assert j == pytest.approx(4 * PI**2 * a * a * b * b, rel=1e-10)


def test_J_equals_bulk_product_at_unit_radius():
    res = acf.j_beta(acf.xpair(), 3.3, 1.0, FAST)
    assert res.value == pytest.approx(res.bulk1 * res.bulk2, rel=1e-15)


def test_xpair_constant_at_beta_four():
    vals = [acf.j_beta(acf.xpair(), 4.0, r, FAST).value for r in (0.25, 0.5, 1.0)]
    assert max(vals) - min(vals) < 1e-8 * max(vals)


@pytest.mark.parametrize("pair", [acf.xpair(), acf.tpair(), acf.tpair(2, 3)], ids=lambda p: p.name)
def test_homogeneity_record(pair):
    g1, g2 = pair.homogeneity
    scaled = [acf.j_beta(pair, 6.0, r, FAST).value * r ** (6.0 - g1 - g2) for r in (0.25, 0.5, 1.0)]
    assert np.ptp(scaled) < 1e-8 * max(scaled)


@pytest.mark.parametrize("kwargs", [dict(r=0.0), dict(r=1.5), dict(beta=-1.0)])
def test_j_beta_validation(kwargs):
    args = dict(pair=acf.xpair(), beta=4.0, r=1.0, spec=FAST) | kwargs
    with pytest.raises(InvalidArgumentError):
        acf.j_beta(**args)


@pytest.mark.parametrize("u, expected", [(xplus(), 2.0), (xplus().scaled(7.0), 2.0), (acf.tpair().u1, 4.0)])
def test_boundary_bulk_ratio(u, expected):
    assert acf.boundary_bulk_ratio(u, FAST) == pytest.approx(expected, rel=1e-12)


def test_boundary_bulk_ratio_degenerate():
    zero = ScalarField("zero", lambda x, y, t: 0 * x, hgrad=lambda x, y, t: (0 * x, 0 * x))
    with pytest.raises(DegenerateError):
        acf.boundary_bulk_ratio(zero, FAST)


@pytest.mark.parametrize(
    "pair, beta, expected",
    [(acf.tpair(), 8.0, 0.0), (acf.xpair(), 4.0, 0.0), (acf.xpair(), 5.0, -1.0), (acf.tpair(), 9.0, -1.0)],
)
def test_derivative_ratio(pair, beta, expected):
    assert acf.j_derivative_ratio(pair, beta, FAST) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize(
    "pair, betas, verdicts",
    [
        (acf.xpair(), [0.0, 3.0, 4.0, 5.0], ["monotone", "monotone", "monotone", "non-monotone"]),
        (acf.tpair(), [0.0, 8.0, 9.0], ["monotone", "monotone", "non-monotone"]),
    ],
    ids=["xpair", "tpair"],
)
def test_monotonicity_scan(pair, betas, verdicts):
    rep = acf.monotonicity_scan(pair, betas, [0.25, 0.5, 1.0], FAST)
    assert [rep.verdicts[b] for b in betas] == verdicts
    assert len(rep.table) == len(betas) * 3


def test_scan_strictly_decreasing_beyond_threshold():
    rep = acf.monotonicity_scan(acf.xpair(), [5.0], [0.25, 0.5, 1.0], FAST)
    vals = [row[2] for row in rep.table]
    assert vals[0] > vals[1] > vals[2]


@pytest.mark.parametrize("radii", [[], [0.5, 0.25], [0.5, 1.5]])
def test_scan_validation(radii):
    with pytest.raises(InvalidArgumentError):
        acf.monotonicity_scan(acf.xpair(), [4.0], radii, FAST)


def test_pair_catalog():
    assert acf.pair_from_name("xpair").name == "xpair"
    assert acf.pair_from_name("tpair(2, 3)").name == "tpair(2,3)"
    with pytest.raises(InvalidArgumentError):
        acf.pair_from_name("ypair")


@pytest.mark.parametrize("pair", [acf.xpair(), acf.tpair(), acf.tpair(0.5, 4)], ids=lambda p: p.name)
def test_disjoint_supports(pair):
    assert acf.check_disjoint(pair)


def test_overlapping_pair_detected():
    assert not acf.check_disjoint(acf.make_pair(xplus(), xplus(), "same"))


# --- lower bound ----------------------------------------------------------------------


def test_lower_bound_zero_eigenvalues(monkeypatch):
    monkeypatch.setattr(spectral, "min_rayleigh_phi", lambda s, g=None: spectral.EigenResult(0.0, 0.0, None, None, True, 0))
    assert acf.acf_lower_bound(upper_half(), lower_half()) == 0.0


def test_lower_bound_halves():
    g = spectral.Grid2D(32, 32, half_x_pos())
    bound = acf.acf_lower_bound(half_x_pos(), half_x_neg(), g)
    assert 0 <= bound <= 4 * (math.sqrt(3) - 1)
    assert 4.0 >= bound  # ratio sum of the x pair


def test_lower_bound_caps():
    g = spectral.Grid2D(64, 64, upper_half())
    bound = acf.acf_lower_bound(upper_half(), lower_half(), g)
    # Ritz values sit slightly above 8 on each cap
    assert bound == pytest.approx(8.0, abs=1e-3)
    assert 8.0 >= bound - 1e-3


# --- cap splits -----------------------------------------------------------------------


def test_cap_split_search():
    grid = np.linspace(0.1, PI - 0.1, 21)
    res = acf.cap_split_search(grid, 1000)
    hs = [row[4] for row in res.table]
    assert np.allclose(hs, hs[::-1], atol=1e-8)
    mid = res.table[10]
    assert mid[3] == pytest.approx(16.0, abs=1e-4)
    assert res.min_h <= mid[4] + 1e-12
    assert res.argmin == pytest.approx(PI / 2)


def test_cap_split_validation():
    with pytest.raises(InvalidArgumentError):
        acf.cap_split_search([0.0, 1.0])
