"""
Lowest eigenvalues, grid ladders and energy bounds.

Single-channel operators are tridiagonal pencils (K, M) and are solved by
Sturm-sequence bisection; multichannel sector operators go through sparse
shift-invert Lanczos with a shift below the proven spectral lower bound,
so the requested eigenvalues are exactly the ones closest to the shift.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import PreconditionError
from .operators import SectorOperator, r_op, sector_L, sector_channels
from .profile import gap_paper, gap_pointwise_svd
from .radial import RadialGrid

__all__ = [
    "DEFAULT_LADDER",
    "DEFAULT_R_MAX",
    "SpectralReport",
    "EnergySummary",
    "sturm_count",
    "eig_lowest",
    "richardson",
    "E0_R",
    "sector_report",
    "default_k2_range",
    "scan_sectors",
    "energy_summary",
]

DEFAULT_LADDER = (512, 1024, 2048)
DEFAULT_R_MAX = 40.0
DENSE_LIMIT = 400
SYMMETRY_TOL = 1e-12


def sturm_count(kd, ke, md, me, lam):
    """
    Number of eigenvalues of the tridiagonal pencil (K, M) below ``lam``.

    Counts negative pivots of the LDL^T factorisation of K - lam M
    (Sylvester's law of inertia). ``md``/``me`` may be scalars 1/0 for the
    standard problem.
    """
    n = len(kd)
    a = (np.asarray(kd) - lam * np.asarray(md)).tolist() if np.ndim(md) else (np.asarray(kd) - lam * md).tolist()
    b = (np.asarray(ke) - lam * np.asarray(me)).tolist() if np.ndim(me) else (np.asarray(ke) - lam * me).tolist()
    scale = max(1.0, max(abs(x) for x in a))
    pivmin = 1e-300 * scale
    count = 0
    d = a[0]
    if abs(d) < pivmin:
        d = -pivmin
    if d < 0:
        count += 1
    for i in range(1, n):
        e = b[i - 1]
        d = a[i] - e * e / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0:
            count += 1
    return count


def _bisect_tridiagonal(kd, ke, md, me, count, lower, rtol=1e-13):
    """
    Bisection on the Sturm count. ``lower`` must have no eigenvalue below it;
    each eigenvalue is bracketed to ``rtol * max(1, |lambda|)``.
    """
    hi = max(abs(lower), 1.0)
    while sturm_count(kd, ke, md, me, hi) < count:
        hi *= 2.0
        if hi > 1e300:
            raise RuntimeError("could not bracket the requested eigenvalues")
    out = []
    for j in range(count):
        lo_j, hi_j = (out[-1] if out else lower), hi
        if out:
            lo_j = min(lo_j, hi_j) - rtol * max(1.0, abs(lo_j))
        while hi_j - lo_j > rtol * max(1.0, abs(lo_j), abs(hi_j)):
            mid = 0.5 * (lo_j + hi_j)
            if mid in (lo_j, hi_j):
                break
            if sturm_count(kd, ke, md, me, mid) > j:
                hi_j = mid
            else:
                lo_j = mid
        out.append(0.5 * (lo_j + hi_j))
    return out


def _check_symmetric(k):
    scale = abs(k).max() if sp.issparse(k) else np.max(np.abs(k))
    if scale == 0:
        return
    diff = abs(k - k.T).max() if sp.issparse(k) else np.max(np.abs(k - k.T))
    if diff > SYMMETRY_TOL * scale:
        raise ValueError(f"matrix is not symmetric: max |A - A^T| = {diff:.3e}")


def _is_tridiagonal(a):
    i, j = np.nonzero(a)
    return bool(np.all(np.abs(i - j) <= 1))


def eig_lowest(A, count=1):
    """
    The ``count`` smallest eigenvalues, ascending.

    Parameters
    ----------
    A : SectorOperator or array_like
        A discrete operator (generalised problem K x = lambda M x) or a
        dense real symmetric matrix.
    count : int

    Returns
    -------
    list of float
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be at least 1")
    if isinstance(A, SectorOperator):
        k, m = A.stiffness, A.mass
        _check_symmetric(k)
        _check_symmetric(m)
        if count > A.dim:
            raise ValueError(f"count {count} exceeds dimension {A.dim}")
        lower = -A.potential_bound - 1.0
        if len(A.channels) == 1:
            return _bisect_tridiagonal(*A.bands(), count, lower)
        if A.dim <= DENSE_LIMIT or count >= A.dim - 1:
            vals = sla.eigh(k.toarray(), m.toarray(), eigvals_only=True, subset_by_index=[0, count - 1])
            return [float(v) for v in vals]
        v0 = np.ones(A.dim)
        vals = eigsh(k.tocsc(), k=count, M=m.tocsc(), sigma=lower, which="LM", v0=v0, return_eigenvectors=False)
        return sorted(float(v) for v in vals)
    a = np.asarray(A.toarray() if sp.issparse(A) else A)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag)) > 0:
            raise ValueError("matrix must be real symmetric")
        a = a.real
    _check_symmetric(a)
    if count > a.shape[0]:
        raise ValueError(f"count {count} exceeds dimension {a.shape[0]}")
    if _is_tridiagonal(a):
        kd, ke = np.diag(a).copy(), np.diag(a, 1).copy()
        radius = np.abs(kd) + np.r_[np.abs(ke), 0.0] + np.r_[0.0, np.abs(ke)]
        lower = float(np.min(kd - (radius - np.abs(kd)))) - 1.0
        return _bisect_tridiagonal(kd, ke, 1.0, 0.0, count, lower)
    vals = sla.eigh(a, eigvals_only=True, subset_by_index=[0, count - 1])
    return [float(v) for v in vals]


def richardson(values, ladder, order=2):
    """
    Extrapolate the last two rungs assuming error ~ h^order.

    Returns ``(extrapolated, tolerance)`` with tolerance |finest - extrapolated|;
    a single rung gives tolerance 0.
    """
    if len(values) < 2:
        return float(values[-1]), 0.0
    ratio = (ladder[-1] / ladder[-2]) ** order
    fine, coarse = values[-1], values[-2]
    extrap = fine + (fine - coarse) / (ratio - 1.0)
    return float(extrap), float(abs(fine - extrap))


@dataclass
class SpectralReport:
    """
    Lowest eigenvalues of one operator along a grid ladder.

    ``lowest_eigenvalues`` holds (finest value, |finest - previous rung|)
    pairs; ``ladder_values[i]`` is the lowest value on rung ``ladder[i]``.
    """

    operator: dict
    ladder: list
    r_max: float
    ladder_values: list
    lowest_eigenvalues: list
    extrapolated: float
    tolerance: float
    essential_edge: float = 0.0
    on_range_boundary: bool = False

    @property
    def finest(self):
        return self.ladder_values[-1]

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _check_ladder(ladder):
    ladder = [int(n) for n in ladder]
    if not ladder:
        raise ValueError("ladder must not be empty")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError(f"ladder must be strictly increasing, got {ladder}")
    return ladder


def _ladder_report(build, ladder, r_max, count, meta):
    ladder = _check_ladder(ladder)
    per_rung = []
    for n in ladder:
        per_rung.append(eig_lowest(build(RadialGrid(n, r_max)), count))
    lowest = [v[0] for v in per_rung]
    extrap, tol = richardson(lowest, ladder)
    pairs = []
    for j in range(count):
        fine = per_rung[-1][j]
        prev = per_rung[-2][j] if len(per_rung) > 1 else fine
        pairs.append([fine, abs(fine - prev)])
    return SpectralReport(
        operator=meta,
        ladder=ladder,
        r_max=float(r_max),
        ladder_values=lowest,
        lowest_eigenvalues=pairs,
        extrapolated=extrap,
        tolerance=tol,
    )


def E0_R(h, ell, t, ladder=DEFAULT_LADDER, r_max=DEFAULT_R_MAX, count=1):
    """
    Ladder of lowest eigenvalues of R(ell, t) with Richardson extrapolation.

    Each rung is a Rayleigh-Ritz value, so the finest one bounds the
    Dirichlet-truncated infimum from above.
    """
    meta = {"kind": "R", "ell": int(ell), "t": int(t), "m": h.m, "N": h.N, "profile": h.profile.name}
    return _ladder_report(lambda g: r_op(g, ell, t, h), ladder, r_max, count, meta)


def sector_report(h, k2, ladder=DEFAULT_LADDER, r_max=DEFAULT_R_MAX, count=1):
    """Ladder report for the sector operator L(k), k = k2 / 2."""
    channels = sector_channels(int(k2), h.N)
    meta = {
        "kind": "L",
        "k2": int(k2),
        "m": h.m,
        "N": h.N,
        "profile": h.profile.name,
        "channels": [c.as_dict() for c in channels],
    }
    return _ladder_report(lambda g: sector_L(g, k2, h), ladder, r_max, count, meta)


def default_k2_range(N):
    """Every nonempty sector with |2k| <= 2 (|N| + 4)."""
    bound = 2 * (abs(N) + 4)
    return [k2 for k2 in range(-bound, bound + 1) if sector_channels(k2, N)]


def scan_sectors(h, k2_values=None, ladder=DEFAULT_LADDER, r_max=DEFAULT_R_MAX, count=1):
    """
    Sector reports keyed by k2 = 2k; empty sectors in ``k2_values`` are skipped.

    The report holding the smallest finest-grid value is flagged
    ``on_range_boundary`` when its k2 is the smallest or largest scanned.
    """
    if k2_values is None:
        k2_values = default_k2_range(h.N)
    k2_values = sorted({int(k) for k in k2_values if sector_channels(int(k), h.N)})
    if not k2_values:
        raise ValueError("no nonempty grand-spin sector in the requested range")
    out = {k2: sector_report(h, k2, ladder, r_max, count) for k2 in k2_values}
    best = min(out, key=lambda k: out[k].finest)
    if len(k2_values) > 1 and best in (k2_values[0], k2_values[-1]):
        out[best].on_range_boundary = True
    return out


@dataclass
class EnergySummary:
    """
    Bounds on E0(H^2) = E0(L) + m^2 and on min{E0+, |E0-|}.

    ``E0_H2_upper`` comes from the finest-grid Rayleigh-Ritz values and is a
    genuine upper bound up to domain truncation. ``min_energy_magnitude`` is
    set only when a discrete ground state is certified (E0(L) < 0); then it
    is sqrt(E0_H2_upper), an upper estimate. Otherwise
    ``min_energy_lower_svd`` carries only the norm bound.
    """

    m: float
    E0_L_upper: float
    E0_L_extrapolated: float
    argmin_k2: int
    E0_H2_upper: float
    E0_H2_lower_paper: Optional[float]
    E0_H2_lower_svd: Optional[float]
    min_energy_magnitude: Optional[float]
    min_energy_lower_svd: Optional[float]
    discrete_flag: bool
    on_range_boundary: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def energy_summary(h, scan):
    """
    Combine a sector scan with the two norm bounds.

    Parameters
    ----------
    h : Hedgehog
    scan : dict
        Output of :func:`scan_sectors`.
    """
    if not scan:
        raise ValueError("scan must not be empty")
    k_best = min(scan, key=lambda k: scan[k].finest)
    e_up = float(scan[k_best].finest)
    e_ex = float(min(r.extrapolated for r in scan.values()))
    m2 = h.m * h.m
    notes = []
    try:
        g_paper = gap_paper(h)
        g_svd = gap_pointwise_svd(h)
        low_paper = m2 - h.m * g_paper
        low_svd = m2 - h.m * g_svd
    except PreconditionError as exc:
        low_paper = low_svd = None
        notes.append(f"norm bounds unavailable: {exc}")
    h2_up = e_up + m2
    certified = e_up < 0.0
    magnitude = math.sqrt(max(h2_up, 0.0)) if certified else None
    mag_low = math.sqrt(max(low_svd, 0.0)) if low_svd is not None else None
    if not certified:
        notes.append("no negative sector value found; only the norm bound is reported")
    return EnergySummary(
        m=h.m,
        E0_L_upper=e_up,
        E0_L_extrapolated=e_ex,
        argmin_k2=int(k_best),
        E0_H2_upper=h2_up,
        E0_H2_lower_paper=low_paper,
        E0_H2_lower_svd=low_svd,
        min_energy_magnitude=magnitude,
        min_energy_lower_svd=mag_low,
        discrete_flag=bool(magnitude is not None and magnitude < h.m),
        on_range_boundary=bool(scan[k_best].on_range_boundary),
        notes=notes,
    )
