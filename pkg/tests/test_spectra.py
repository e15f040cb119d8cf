import json
import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from hedgehog_dirac.operators import delta_ell, kinetic_f0, r_op, rayleigh, sector_L
from hedgehog_dirac.profile import Hedgehog, constant_profile, gap_paper, gap_pointwise_svd
from hedgehog_dirac.radial import RadialGrid, f0
from hedgehog_dirac.spectra import (
    SpectralReport,
    E0_R,
    default_k2_range,
    eig_lowest,
    energy_summary,
    richardson,
    scan_sectors,
    sector_report,
    sturm_count,
)

J01, J02, J11 = 2.404825557695773, 5.520078110286311, 3.831705970207512


def test_diagonal_example():
    assert eig_lowest(np.diag([3.0, 1.0, 2.0]))[0] == pytest.approx(1.0, abs=1e-10 * 3)
    assert np.allclose(eig_lowest(np.diag([3.0, 1.0, 2.0]), 3), [1, 2, 3], rtol=0, atol=3e-10)


def test_bad_input():
    with pytest.raises(ValueError):
        eig_lowest(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        eig_lowest(np.eye(3), 4)
    with pytest.raises(ValueError):
        eig_lowest(np.eye(3), 0)
    with pytest.raises(ValueError):
        eig_lowest(np.ones((2, 3)))


@pytest.mark.parametrize("ell,expected", [(0, (J01**2, J02**2)), (1, (J11**2,))])
def test_bessel_oracle(ell, expected):
    vals = eig_lowest(delta_ell(RadialGrid(4000, 1.0), ell), len(expected))
    for v, e in zip(vals, expected):
        assert v == pytest.approx(e, rel=5e-3)
        assert v >= e  # Rayleigh-Ritz values lie above


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_tridiagonal_matches_dense(seed):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal(200) * 5
    e = rng.standard_normal(199)
    a = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    got = eig_lowest(a, 3)
    ref = np.linalg.eigvalsh(a)[:3]
    assert np.allclose(got, ref, rtol=0, atol=1e-9 * np.abs(a).max())


def test_generalized_tridiagonal_matches_dense(rational):
    A = r_op(RadialGrid(200, 10.0), 0, 1, Hedgehog(rational, 1, 21.23))
    ref = sla.eigh(A.stiffness.toarray(), A.mass.toarray(), eigvals_only=True)[:3]
    assert np.allclose(eig_lowest(A, 3), ref, rtol=0, atol=1e-9 * abs(A.stiffness).max())


def test_multichannel_paths_agree(rational):
    h = Hedgehog(rational, 1, 22.0)
    small = sector_L(RadialGrid(80, 20.0), 0, h)
    big = sector_L(RadialGrid(120, 20.0), 0, h)
    assert small.dim <= 400 < big.dim
    ref = sla.eigh(big.stiffness.toarray(), big.mass.toarray(), eigvals_only=True)[:2]
    assert np.allclose(eig_lowest(big, 2), ref, rtol=0, atol=1e-8 * abs(big.stiffness).max())


def test_sturm_count_simple():
    kd, ke = np.array([2.0, 2.0, 2.0]), np.array([-1.0, -1.0])
    vals = np.linalg.eigvalsh(np.diag(kd) + np.diag(ke, 1) + np.diag(ke, -1))
    for lam in (0.0, 1.0, 2.5, 4.0):
        assert sturm_count(kd, ke, 1.0, 0.0, lam) == int(np.sum(vals < lam))


def test_richardson_exact_on_quadratic():
    ladder = (100, 200, 400)
    vals = [1.0 + 3.0 / n**2 for n in ladder]
    value, tol = richardson(vals, ladder)
    assert value == pytest.approx(1.0, abs=1e-14)
    assert tol == pytest.approx(vals[-1] - 1.0, rel=1e-9)
    assert richardson([2.0], (10,))[0] == 2.0


@pytest.mark.parametrize("ell,t", [(0, 1), (1, 1), (0, -1)])
def test_ladder_monotone(rational, ell, t):
    rep = E0_R(Hedgehog(rational, 1, 21.23), ell, t, ladder=(256, 512, 1024), r_max=20.0)
    v = rep.ladder_values
    assert all(b <= a + 1e-10 for a, b in zip(v, v[1:]))
    assert rep.extrapolated <= rep.finest + rep.tolerance


def test_example_value_negative(example_hedgehog):
    rep = E0_R(example_hedgehog, 0, 1)
    assert rep.extrapolated < 0
    assert rep.finest == pytest.approx(-16.51, abs=0.02)
    assert rep.tolerance < 0.01
    assert rep.essential_edge == 0.0


def test_discrete_below_trial(example_hedgehog):
    ladder = (512, 1024)
    rep = E0_R(example_hedgehog, 0, 1, ladder=ladder, r_max=40.0)
    A = r_op(RadialGrid(ladder[-1], 40.0), 0, 1, example_hedgehog)
    assert rep.finest <= rayleigh(A, f0) + 1e-6


def test_reflection_exact(example_hedgehog):
    a = E0_R(example_hedgehog, 1, 1, ladder=(256, 512), r_max=20.0)
    b = E0_R(example_hedgehog, -2, 1, ladder=(256, 512), r_max=20.0)
    assert a.ladder_values == b.ladder_values


def test_t_ordering(rational):
    h = Hedgehog(rational, 1, 10.0)
    for ell in (0, 1, 2):
        up = E0_R(h, ell, 1, ladder=(512,), r_max=20.0).finest
        down = E0_R(h, ell, -1, ladder=(512,), r_max=20.0).finest
        assert up <= down


def test_monotone_concave_in_m(rational):
    ms = [5.0, 10.0, 15.0, 20.0, 25.0]
    vals = [E0_R(Hedgehog(rational, 1, m), 0, 1, ladder=(1024,), r_max=20.0).finest for m in ms]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    second = [vals[i - 1] - 2 * vals[i] + vals[i + 1] for i in range(1, len(vals) - 1)]
    assert max(second) <= 1e-9


def test_small_mass_witness_positive_but_bound_state_exists(rational):
    # the f0 trial value is positive at m=1, while the discrete infimum
    # sits just below zero and does not move as the box grows
    h = Hedgehog(rational, 1, 1.0)
    assert kinetic_f0(0) + rayleigh(r_op(RadialGrid(2048, 2.0), 0, 1, h), f0) > 0
    vals = [E0_R(h, 0, 1, ladder=(1024, 2048), r_max=rm).finest for rm in (80.0, 160.0)]
    assert vals[0] < 0 and vals[1] < 0
    assert vals[1] == pytest.approx(vals[0], rel=0.05)


def test_tiny_mass_positive(rational):
    rep = E0_R(Hedgehog(rational, 1, 0.1), 0, 1)
    assert rep.finest > 0
    assert rep.finest < 0.1  # only the box level, ~ 1 / r_max^2


def test_report_json_roundtrip(example_hedgehog):
    rep = E0_R(example_hedgehog, 0, 1, ladder=(128, 256), r_max=10.0, count=2)
    again = SpectralReport.from_dict(json.loads(rep.to_json()))
    assert again.to_json() == rep.to_json()
    vals = [p[0] for p in rep.lowest_eigenvalues]
    assert vals == sorted(vals)


def test_ladder_validation(example_hedgehog):
    with pytest.raises(ValueError):
        E0_R(example_hedgehog, 0, 1, ladder=())
    with pytest.raises(ValueError):
        E0_R(example_hedgehog, 0, 1, ladder=(512, 256))


def test_default_k2_range():
    assert list(default_k2_range(1)) == list(range(-10, 11, 2))
    assert list(default_k2_range(-2)) == list(range(-11, 12, 2))


def test_zero_mass_sector_is_free(rational):
    h = Hedgehog(rational, 1, 0.0)
    small = sector_report(h, 0, ladder=(256,), r_max=10.0).finest
    large = sector_report(h, 0, ladder=(512,), r_max=20.0).finest
    assert 0 < large < small
    assert small == pytest.approx(J01**2 / 100, rel=1e-2)


@pytest.fixture(scope="module")
def scan22():
    from hedgehog_dirac.profile import rational_profile

    h = Hedgehog(rational_profile(), 1, 22.0)
    return h, scan_sectors(h, k2_values=range(-6, 7))


def test_scan_finds_negative_sector(scan22):
    h, scan = scan22
    assert sorted(scan) == [-6, -4, -2, 0, 2, 4, 6]
    assert min(r.finest for r in scan.values()) < 0
    r0 = E0_R(h, 0, 1).finest
    assert scan[0].finest <= r0 + 1e-6


def test_scan_respects_norm_floor(scan22):
    h, scan = scan22
    floor = -h.m * gap_pointwise_svd(h)
    assert all(r.finest >= floor for r in scan.values())


def test_scan_is_symmetric(scan22):
    _, scan = scan22
    for k in (2, 4, 6):
        assert scan[k].finest == pytest.approx(scan[-k].finest, rel=1e-8)


def test_energy_summary_m22(scan22):
    h, scan = scan22
    s = energy_summary(h, scan)
    assert s.E0_L_upper < 0
    assert s.discrete_flag
    assert s.min_energy_magnitude < 22
    assert s.min_energy_magnitude >= math.sqrt(484 - 22 * gap_pointwise_svd(h))
    assert s.E0_H2_lower_svd == pytest.approx(484 - 22 * gap_pointwise_svd(h))
    assert s.E0_H2_lower_paper == pytest.approx(484 - 22 * gap_paper(h))
    assert not s.on_range_boundary
    assert json.loads(json.dumps(s.to_dict()))["argmin_k2"] == 0


def test_energy_summary_free_stub():
    h = Hedgehog(constant_profile(0.0), 1, 1.0)
    ups = []
    for r_max in (10.0, 20.0):
        scan = scan_sectors(h, k2_values=(-2, 0, 2), ladder=(256,), r_max=r_max)
        s = energy_summary(h, scan)
        assert not s.discrete_flag and s.min_energy_magnitude is None
        ups.append(s.E0_H2_upper)
    assert 1.0 < ups[1] < ups[0]
    assert ups[1] - 1.0 < 0.02


def test_energy_summary_empty(example_hedgehog):
    with pytest.raises(ValueError):
        energy_summary(example_hedgehog, {})


def test_scan_empty_range(example_hedgehog):
    with pytest.raises(ValueError):
        scan_sectors(example_hedgehog, k2_values=(1, 3))
