"""
Decision procedures for the two sufficient conditions.

* Ground state: some R(ell, t) has negative infimum. Two routes are checked,
  the closed-form mollifier witness <f0, R(ell, t) f0>_2 and the discrete
  Rayleigh-Ritz ladder of R(ell, t).
* Non-vanishing energies: m exceeds the gap supremum. Both the gap formula
  sup sqrt|F'^2 - (N sin F / r)^2| and the pointwise operator norm
  sup (|F'| + |N sin F| / r) are evaluated and reported.

Both conditions are sufficient only. A negative verdict means that no
witness was found within the configured search.
"""

import json
import math
import os
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
import scipy

from . import __version__
from .errors import PreconditionError
from .operators import kinetic_f0, potential_f0
from .profile import gap_paper, gap_pointwise_svd, limsup_audit, membership_report, rational_profile, Hedgehog
from .radial import integrate_gl, mollifier_integral
from .spectra import DEFAULT_LADDER, DEFAULT_R_MAX, E0_R, energy_summary, scan_sectors

__all__ = [
    "Certificate",
    "witness_value",
    "certify_ground_state",
    "certify_gap",
    "certify",
    "example55",
    "EXAMPLE_MASS",
    "NO_WITNESS",
]

DEFAULT_ELL_MAX = 5
EXAMPLE_MASS = 21.23
NO_WITNESS = "no witness found within configured search"
SCHEMA = "hedgehog-dirac/certificate/1"


def _plain(obj):
    """Convert numpy scalars and tuples so the JSON encoding is canonical."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _require_mass(h):
    if not h.m > 0:
        raise ValueError(f"certification needs m > 0, got {h.m}")


def witness_value(h, ell, t):
    """
    <f0, R(ell, t) f0>_2 = Kin(ell) + m t <f0, F' sin F f0>_2.

    Both integrals use composite Gauss-Legendre quadrature of closed forms.
    """
    if t not in (1, -1):
        raise ValueError(f"t must be +1 or -1, got {t}")
    return kinetic_f0(ell) + h.m * t * potential_f0(h.profile)


def _canonical_ell(ell):
    # R(ell, t) and R(-ell-1, t) are the same operator
    return ell if ell >= 0 else -ell - 1


def certify_ground_state(h, ell_max=DEFAULT_ELL_MAX, ladder=DEFAULT_LADDER, r_max=DEFAULT_R_MAX, discrete=True):
    """
    Scan ell in [-ell_max, ell_max] and t = +-1 for a negative R(ell, t).

    Returns
    -------
    dict
        The ``ground_state`` block of a certificate. ``exists`` is true when
        a mollifier witness is negative or a discrete ladder value is below
        minus its tolerance max(1e-8, 2 |finest - extrapolated|).
    """
    _require_mass(h)
    ell_max = int(ell_max)
    if ell_max < 0:
        raise ValueError(f"ell_max must be nonnegative, got {ell_max}")
    potential = potential_f0(h.profile)
    reports = {}
    scan = []
    for ell in range(-ell_max, ell_max + 1):
        kin = kinetic_f0(ell)
        for t in (1, -1):
            entry = {"ell": ell, "t": t, "witness_value_f0": kin + h.m * t * potential}
            if discrete:
                key = (_canonical_ell(ell), t)
                if key not in reports:
                    reports[key] = E0_R(h, key[0], t, ladder, r_max)
                rep = reports[key]
                entry.update(
                    E0_R_finest=rep.finest,
                    E0_R_extrapolated=rep.extrapolated,
                    tolerance=max(1e-8, 2.0 * rep.tolerance),
                )
            scan.append(entry)
    best = min(scan, key=lambda e: e["witness_value_f0"])
    witness_ok = best["witness_value_f0"] < 0
    block = {
        "exists": False,
        "routes": [],
        "witness_ell": best["ell"],
        "witness_t": best["t"],
        "witness_value_f0": best["witness_value_f0"],
        "discrete_min_estimate": None,
        "discrete_min_upper": None,
        "discrete_tolerance": None,
        "discrete_ell": None,
        "discrete_t": None,
        "ell_max": ell_max,
        "scan": scan,
    }
    if witness_ok:
        block["routes"].append("mollifier")
    if discrete:
        low = min(scan, key=lambda e: e["E0_R_extrapolated"])
        block.update(
            discrete_min_estimate=low["E0_R_extrapolated"],
            discrete_min_upper=low["E0_R_finest"],
            discrete_tolerance=low["tolerance"],
            discrete_ell=low["ell"],
            discrete_t=low["t"],
        )
        if any(e["E0_R_extrapolated"] < -e["tolerance"] for e in scan):
            block["routes"].append("discrete")
    block["exists"] = bool(block["routes"])
    block["message"] = "negative R(ell, t) found" if block["exists"] else NO_WITNESS
    return block


def certify_gap(h, ground_state_exists=None):
    """
    The ``gap`` block: limsup audit, both gap suprema and the two verdicts.

    ``ground_state_exists`` enters the verdicts; ``None`` evaluates the
    mass condition alone.
    """
    _require_mass(h)
    audit = limsup_audit(h.profile)
    g_paper = g_svd = None
    if audit["ok"]:
        try:
            g_paper = gap_paper(h)
            g_svd = gap_pointwise_svd(h)
        except PreconditionError:
            audit = dict(audit, ok=False)
    gs = True if ground_state_exists is None else bool(ground_state_exists)
    ok = audit["ok"]
    paper = bool(ok and gs and g_paper is not None and h.m > g_paper)
    svd = bool(ok and gs and g_svd is not None and h.m > g_svd)
    return {
        "limsup_ok": bool(ok),
        "limsup_audit": audit,
        "gap_paper": g_paper,
        "gap_svd": g_svd,
        "nonzero_energy_paper": paper,
        "nonzero_energy_svd": svd,
        "message": "mass exceeds gap" if paper or svd else NO_WITNESS,
    }


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def provenance():
    return {
        "tool": "hedgehog-dirac",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "seeds": {"power_iteration": 0, "lanczos_start": "ones"},
        "timestamp": _timestamp(),
    }


@dataclass
class Certificate:
    """
    Machine-readable verdict with its inputs and witnesses.

    Everything except ``provenance`` is a deterministic function of the
    inputs.
    """

    inputs: dict
    fcal_membership: dict
    ground_state: dict
    gap: dict
    energy: dict = None
    provenance: dict = field(default_factory=dict)

    def payload(self):
        return _plain(
            {
                "schema": SCHEMA,
                "inputs": self.inputs,
                "fcal_membership": self.fcal_membership,
                "ground_state": self.ground_state,
                "gap": self.gap,
                "energy": self.energy,
            }
        )

    def to_json(self):
        doc = {"certificate": self.payload(), "provenance": _plain(self.provenance)}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        cert = doc["certificate"]
        if cert.get("schema") != SCHEMA:
            raise ValueError(f"unknown certificate schema {cert.get('schema')!r}")
        return cls(
            inputs=cert["inputs"],
            fcal_membership=cert["fcal_membership"],
            ground_state=cert["ground_state"],
            gap=cert["gap"],
            energy=cert["energy"],
            provenance=doc.get("provenance", {}),
        )

    @property
    def certified(self):
        return bool(self.ground_state["exists"])


def certify(
    h,
    ell_max=DEFAULT_ELL_MAX,
    ladder=DEFAULT_LADDER,
    r_max=DEFAULT_R_MAX,
    discrete=True,
    energy=False,
    k2_values=None,
):
    """
    Full certificate for one hedgehog.

    ``energy=True`` adds the sector scan and :func:`energy_summary`.
    """
    _require_mass(h)
    gs = certify_ground_state(h, ell_max, ladder, r_max, discrete)
    gap = certify_gap(h, gs["exists"])
    summary = None
    if energy:
        scan = scan_sectors(h, k2_values, ladder, r_max)
        summary = energy_summary(h, scan).to_dict()
        summary["sectors"] = {str(k): rep.to_dict() for k, rep in scan.items()}
    inputs = {
        "profile": h.profile.name,
        "profile_params": dict(h.profile.params),
        "N": h.N,
        "m": h.m,
        "ladder": list(ladder),
        "r_max": float(r_max),
        "ell_max": int(ell_max),
        "discrete": bool(discrete),
        "k2_values": None if k2_values is None else sorted(int(k) for k in k2_values),
    }
    return Certificate(
        inputs=inputs,
        fcal_membership=membership_report(h.profile),
        ground_state=gs,
        gap=gap,
        energy=summary,
        provenance=provenance(),
    )


def _example_integrand(r):
    return r**3 / (r + 1.0) ** 2 * np.sin(np.pi / (r + 1.0)) * np.exp(-2.0 / (1.0 - r * r))


def example55(discrete=False):
    """
    Reproduce the worked example for F(r) = pi / (r + 1), N = 1.

    Returns
    -------
    (Certificate, list of dict)
        The certificate at m = 21.23 and comparison rows with keys
        ``quantity``, ``reference`` (reference text), ``reference_value``,
        ``computed``, ``rel_error`` and ``tolerance``.
    """
    h = Hedgehog(rational_profile(1.0), 1, EXAMPLE_MASS)
    cert = certify(h, ell_max=2, discrete=discrete)
    c2 = 1.0 / mollifier_integral()
    i2 = integrate_gl(_example_integrand, 0.0, 1.0, 128, 16)
    # the f0 bound 15 + 3 ell^2 + 3 (ell+1)^2 - (27 pi / 100) m is negative at ell = 0 iff m > 200 / (3 pi)
    threshold = 18.0 / (0.27 * math.pi)
    rows = [
        ("gap sup sqrt|F'^2 - (N sinF/r)^2|", "1.223", cert.gap["gap_paper"], 0.01),
        ("C^2 = (int r^3 exp(-2/(1-r^2)))^-1", "270.23", c2, 0.005),
        ("int r^3 sin(pi/(r+1)) exp(-2/(1-r^2)) / (r+1)^2", "0.00135476", i2, 0.005),
        ("mass threshold 200/(3 pi)", "21.22", threshold, 0.001),
    ]
    table = []
    for name, ref, value, tol in rows:
        ref_value = float(ref)
        rel = abs(value - ref_value) / abs(ref_value)
        table.append(
            {
                "quantity": name,
                "reference": ref,
                "reference_value": ref_value,
                "computed": value,
                "rel_error": rel,
                "tolerance": tol,
                "ok": rel <= tol,
            }
        )
    verdict = bool(cert.ground_state["exists"] and cert.gap["nonzero_energy_paper"])
    table.append(
        {
            "quantity": "verdict at m = 21.23 (ground state and nonzero energy)",
            "reference": "true",
            "reference_value": 1.0,
            "computed": 1.0 if verdict else 0.0,
            "rel_error": 0.0 if verdict else 1.0,
            "tolerance": 0.0,
            "ok": verdict,
        }
    )
    return cert, table
