import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hedgehog_dirac.certify import (
    NO_WITNESS,
    Certificate,
    certify,
    certify_gap,
    certify_ground_state,
    example55,
    witness_value,
)
from hedgehog_dirac.operators import kinetic_f0, potential_f0
from hedgehog_dirac.profile import Hedgehog, Profile, builtin_profile, rational_profile

SMALL_LADDER = (256, 512)


def test_potential_integral(rational):
    assert potential_f0(rational) == pytest.approx(-1.1501, rel=1e-2)
    assert potential_f0(rational) == pytest.approx(-math.pi * 270.23 * 0.00135476, rel=5e-3)


@pytest.mark.parametrize("ell", range(-3, 4))
def test_kinetic_below_quadratic_bound(ell):
    assert 0 < kinetic_f0(ell) <= 15 + 3 * ell**2 + 3 * (ell + 1) ** 2


def test_witness_sign_at_example_mass(example_hedgehog):
    assert witness_value(example_hedgehog, 0, 1) < 0
    assert witness_value(example_hedgehog, 0, -1) > 0
    with pytest.raises(ValueError):
        witness_value(example_hedgehog, 0, 0)


def test_witness_threshold_arithmetic(rational):
    # bounds at ell = 0: 15 + 0 + 3 = 18 and P <= -27 pi / 100, zero at m = 200 / (3 pi)
    p_bound = -27 * math.pi / 100
    assert potential_f0(rational) <= p_bound
    assert 18 + p_bound * (200 / (3 * math.pi)) == pytest.approx(0.0, abs=1e-12)
    sharp = kinetic_f0(0) / -potential_f0(rational)
    assert 13.0 < sharp < 14.5
    assert witness_value(Hedgehog(rational, 1, sharp * 0.999), 0, 1) > 0
    assert witness_value(Hedgehog(rational, 1, sharp * 1.001), 0, 1) < 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 50.0), st.floats(0.01, 50.0), st.integers(-3, 3))
def test_witness_monotone_in_mass(m1, m2, ell):
    m1, m2 = sorted((m1, m2))
    p = rational_profile()
    assert witness_value(Hedgehog(p, 1, m2), ell, 1) <= witness_value(Hedgehog(p, 1, m1), ell, 1)


def test_ground_state_example(example_hedgehog):
    gs = certify_ground_state(example_hedgehog, ell_max=2, ladder=SMALL_LADDER, r_max=20.0)
    assert gs["exists"]
    assert (gs["witness_ell"], gs["witness_t"]) in {(0, 1), (-1, 1)}
    assert gs["routes"] == ["mollifier", "discrete"]
    assert gs["discrete_min_estimate"] < gs["witness_value_f0"] + gs["discrete_tolerance"]
    assert len(gs["scan"]) == 10


def test_tiny_mass_has_no_witness(rational):
    h = Hedgehog(rational, 1, 0.1)
    gs = certify_ground_state(h, ell_max=2)
    assert not gs["exists"]
    assert gs["message"] == NO_WITNESS
    assert gs["witness_value_f0"] > 0
    assert gs["discrete_min_estimate"] > -gs["discrete_tolerance"]


def test_routes_never_contradict(rational):
    for m in (5.0, 14.0, 21.23, 30.0):
        gs = certify_ground_state(Hedgehog(rational, 1, m), ell_max=1, ladder=SMALL_LADDER, r_max=20.0)
        if gs["witness_value_f0"] < 0:
            assert gs["discrete_min_estimate"] < gs["witness_value_f0"] + gs["discrete_tolerance"]
            assert "discrete" in gs["routes"]


def test_verdict_monotone_in_ell_max(rational):
    h = Hedgehog(rational, 1, 14.0)
    verdicts = [certify_ground_state(h, L, discrete=False)["exists"] for L in range(4)]
    assert verdicts == sorted(verdicts)
    values = [certify_ground_state(h, L, discrete=False)["witness_value_f0"] for L in range(4)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_both_t_are_scanned():
    # F -> pi - F flips the sign of F' sin F, so the witness moves to t = -1
    flipped = Profile(
        "reflected", lambda r: math.pi - math.pi / (np.asarray(r) + 1), lambda r: math.pi / (np.asarray(r) + 1) ** 2, {}
    )
    gs = certify_ground_state(Hedgehog(flipped, 1, 21.23), ell_max=1, discrete=False)
    assert gs["exists"] and gs["witness_t"] == -1


def test_ground_state_validation(example_hedgehog):
    with pytest.raises(ValueError):
        certify_ground_state(example_hedgehog, ell_max=-1)
    with pytest.raises(ValueError):
        certify_ground_state(Hedgehog(rational_profile(), 1, 0.0))


def test_gap_verdicts(rational):
    g = certify_gap(Hedgehog(rational, 1, 1.23), ground_state_exists=True)
    assert g["limsup_ok"]
    assert g["gap_paper"] == pytest.approx(1.223, abs=0.01)
    assert 6.1 <= g["gap_svd"] <= 2 * math.pi
    assert g["nonzero_energy_paper"] and not g["nonzero_energy_svd"]
    g = certify_gap(Hedgehog(rational, 1, 1.23), ground_state_exists=False)
    assert not g["nonzero_energy_paper"] and g["message"] == NO_WITNESS
    g = certify_gap(Hedgehog(rational, 1, 7.0), ground_state_exists=True)
    assert g["nonzero_energy_paper"] and g["nonzero_energy_svd"]


def test_gap_trivial_winding():
    g = certify_gap(Hedgehog(builtin_profile("exponential"), 0, 1.0))
    assert g["gap_paper"] == pytest.approx(g["gap_svd"], rel=1e-6)


def test_gap_limsup_failure():
    bad = Profile("kink", lambda r: np.pi / 2 + 0 * r, lambda r: 0 * r, {})
    g = certify_gap(Hedgehog(bad, 1, 5.0), ground_state_exists=True)
    assert not g["limsup_ok"]
    assert g["gap_paper"] is None
    assert not g["nonzero_energy_paper"]


@pytest.fixture(scope="module")
def cert():
    return certify(Hedgehog(rational_profile(), 1, 21.23), ell_max=2, ladder=SMALL_LADDER, r_max=20.0)


def test_certificate_fields(cert):
    doc = json.loads(cert.to_json())
    c = doc["certificate"]
    assert set(c) == {"schema", "inputs", "fcal_membership", "ground_state", "gap", "energy"}
    assert {"exists", "witness_ell", "witness_t", "witness_value_f0", "discrete_min_estimate"} <= set(c["ground_state"])
    assert {"limsup_ok", "gap_paper", "gap_svd", "nonzero_energy_paper", "nonzero_energy_svd"} <= set(c["gap"])
    assert "timestamp" in doc["provenance"] and "timestamp" not in json.dumps(c)
    assert cert.certified


def test_certificate_invariants(cert):
    gs, gap = cert.ground_state, cert.gap
    assert gs["exists"] == (gs["witness_value_f0"] < 0 or gs["discrete_min_estimate"] < -gs["discrete_tolerance"])
    m = cert.inputs["m"]
    assert gap["nonzero_energy_paper"] == (m > gap["gap_paper"] and gap["limsup_ok"] and gs["exists"])
    assert gap["nonzero_energy_svd"] == (m > gap["gap_svd"] and gap["limsup_ok"] and gs["exists"])


def test_certificate_roundtrip(cert):
    text = cert.to_json()
    again = Certificate.from_json(text)
    assert again.to_json() == text
    assert Certificate.from_json(again.to_json()).to_json() == text


def test_certificate_payload_deterministic():
    h = Hedgehog(rational_profile(), 1, 21.23)
    a = certify(h, ell_max=1, ladder=SMALL_LADDER, r_max=20.0)
    b = certify(h, ell_max=1, ladder=SMALL_LADDER, r_max=20.0)
    assert json.dumps(a.payload(), sort_keys=True) == json.dumps(b.payload(), sort_keys=True)


def test_certificate_schema_check(cert):
    doc = json.loads(cert.to_json())
    doc["certificate"]["schema"] = "other"
    with pytest.raises(ValueError):
        Certificate.from_json(json.dumps(doc))


def test_certify_with_energy():
    h = Hedgehog(rational_profile(), 1, 22.0)
    c = certify(h, ell_max=0, ladder=SMALL_LADDER, r_max=20.0, energy=True, k2_values=(-2, 0, 2))
    e = c.energy
    assert e["discrete_flag"] and e["min_energy_magnitude"] < 22
    assert set(e["sectors"]) == {"-2", "0", "2"}


def test_example55_table():
    cert, table = example55()
    refs = {row["reference"]: row for row in table}
    assert {"1.223", "270.23", "0.00135476", "21.22", "true"} == set(refs)
    for row in table:
        assert row["ok"], row
    assert refs["270.23"]["rel_error"] <= 0.005
    assert refs["0.00135476"]["rel_error"] <= 0.005
    assert refs["21.22"]["computed"] == pytest.approx(200 / (3 * math.pi))
    assert cert.ground_state["exists"] and cert.gap["nonzero_energy_paper"]
