"""
Profile functions, the hedgehog field built from them, and the two
supremum-type gap quantities used by the non-zero-energy criterion.

A profile is a map F: (0, inf) -> [0, pi]. The hedgehog field in polar
coordinates is

    n~(r, phi) = (sin F(r) cos(N phi), sin F(r) sin(N phi), cos F(r)).

Membership of F in the admissible class (continuity of F', bounded F',
F' not identically zero, F' -> 0 at infinity) is audited on samples only.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.interpolate import PchipInterpolator

from .algebra import spectral_norm_2x2
from .errors import DomainError, PreconditionError

__all__ = [
    "Profile",
    "Hedgehog",
    "rational_profile",
    "exponential_profile",
    "constant_profile",
    "tabulated_profile",
    "load_profile_table",
    "builtin_profile",
    "BUILTIN_PROFILES",
    "membership_report",
    "unit_norm_deviation",
    "ntilde",
    "ntilde_partials",
    "n_cartesian",
    "grad_n",
    "limsup_audit",
    "gap_integrand_paper",
    "gap_integrand_svd",
    "radial_coupling_matrix",
    "gap_paper",
    "gap_pointwise_svd",
    "supremum",
]

SAMPLE_R_MIN = 1e-6
SAMPLE_R_MAX = 1e6
SAMPLE_COUNT = 4096
R_FLOOR = 1e-12


@dataclass(frozen=True)
class Profile:
    """
    A profile function with its derivative.

    ``F`` and ``Fprime`` must accept numpy arrays of positive radii and be
    pure. ``params`` records whatever parameters produced the profile.
    """

    name: str
    F: Callable[[np.ndarray], np.ndarray]
    Fprime: Callable[[np.ndarray], np.ndarray]
    params: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_callable(cls, name, F, Fprime=None, **params):
        """Wrap ``F``; without ``Fprime`` the derivative uses centered differences."""
        if Fprime is None:

            def Fprime(r):
                r = np.asarray(r, dtype=float)
                step = np.minimum(1e-6 * np.maximum(r, 1.0), 0.5 * r)
                return (F(r + step) - F(r - step)) / (2.0 * step)

        return cls(name, F, Fprime, dict(params))

    def __call__(self, r):
        return self.F(np.asarray(r, dtype=float))

    def derivative(self, r):
        return self.Fprime(np.asarray(r, dtype=float))


def rational_profile(scale=1.0):
    """F(r) = pi / (r/scale + 1); ``scale=1`` is the worked example profile."""
    a = float(scale)
    return Profile(
        "rational",
        lambda r: np.pi / (r / a + 1.0),
        lambda r: -np.pi / (a * (r / a + 1.0) ** 2),
        {"scale": a},
    )


def exponential_profile(scale=1.0):
    """F(r) = pi exp(-r/scale)."""
    a = float(scale)
    return Profile(
        "exponential",
        lambda r: np.pi * np.exp(-r / a),
        lambda r: -(np.pi / a) * np.exp(-r / a),
        {"scale": a},
    )


def constant_profile(value=0.0):
    """F = const. F' vanishes identically, so this is a free-field stub, not admissible."""
    c = float(value)
    return Profile(
        "constant",
        lambda r: np.full(np.shape(r), c),
        lambda r: np.zeros(np.shape(r)),
        {"value": c},
    )


BUILTIN_PROFILES = {
    "rational": rational_profile,
    "exponential": exponential_profile,
    "constant": constant_profile,
}


def builtin_profile(name, **params):
    try:
        factory = BUILTIN_PROFILES[name]
    except KeyError:
        raise ValueError(
            f"unknown profile {name!r}; builtins are {sorted(BUILTIN_PROFILES)}"
        ) from None
    return factory(**params)


def load_profile_table(path):
    """
    Read a two-column ``r F`` table.

    Blank lines and ``#`` comments are skipped. Radii must be positive and
    strictly increasing, values must lie in [0, pi], and at least four rows
    are required.
    """
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns 'r F', got {line.strip()!r}")
            try:
                r, f = float(parts[0]), float(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric entry {line.strip()!r}") from None
            if not (math.isfinite(r) and math.isfinite(f)):
                raise ValueError(f"{path}:{lineno}: non-finite entry")
            rows.append((r, f))
    if len(rows) < 4:
        raise ValueError(f"{path}: need at least 4 rows, got {len(rows)}")
    table = np.array(rows)
    r, f = table[:, 0], table[:, 1]
    if r[0] <= 0:
        raise ValueError(f"{path}: radii must be positive")
    if np.any(np.diff(r) <= 0):
        raise ValueError(f"{path}: radii must be strictly increasing")
    if np.any(f < 0) or np.any(f > np.pi):
        raise ValueError(f"{path}: profile values must lie in [0, pi]")
    return r, f


def tabulated_profile(r, values, name="table"):
    """
    Monotone cubic (PCHIP) interpolant through tabulated samples.

    Below the first radius the end cubic is extrapolated and clipped to
    [0, pi]; beyond the last radius F is held at its final value.
    """
    r = np.asarray(r, dtype=float)
    values = np.asarray(values, dtype=float)
    spline = PchipInterpolator(r, values, extrapolate=True)
    dspline = spline.derivative()
    r_last = r[-1]

    def F(x):
        x = np.asarray(x, dtype=float)
        out = np.clip(spline(np.minimum(x, r_last)), 0.0, np.pi)
        return out

    def Fprime(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > r_last, 0.0, dspline(np.minimum(x, r_last)))

    return Profile(name, F, Fprime, {"r_min": float(r[0]), "r_max": float(r_last), "rows": float(r.size)})


def _sample_radii(count=SAMPLE_COUNT, r_min=SAMPLE_R_MIN, r_max=SAMPLE_R_MAX):
    return np.logspace(math.log10(r_min), math.log10(r_max), count)


def membership_report(profile):
    """
    Sampled audit of the admissible-profile conditions.

    Returns
    -------
    dict
        ``status`` is always ``"sampled"``; ``ok`` is the conjunction of the
        individual checks.
    """
    r = _sample_radii()
    F = np.asarray(profile(r), dtype=float)
    dF = np.asarray(profile.derivative(r), dtype=float)
    finite = bool(np.all(np.isfinite(F)) and np.all(np.isfinite(dF)))
    in_range = bool(finite and np.all(F >= -1e-12) and np.all(F <= np.pi + 1e-12))
    max_dF = float(np.max(np.abs(dF))) if finite else float("inf")
    tail_r = np.array([1e2, 1e3, 1e4])
    tail = np.abs(np.asarray(profile.derivative(tail_r), dtype=float))
    decreasing = bool(tail[1] <= tail[0] and tail[2] <= tail[1] and (tail[2] < tail[0] or tail[0] == 0.0))
    nonzero = bool(np.any(np.abs(dF) > 0.0))
    return {
        "status": "sampled",
        "samples": int(r.size),
        "range": [SAMPLE_R_MIN, SAMPLE_R_MAX],
        "F_in_range": in_range,
        "max_abs_Fprime": max_dF,
        "Fprime_bounded": bool(finite and math.isfinite(max_dF)),
        "tail_abs_Fprime": [float(t) for t in tail],
        "tail_decreasing": decreasing,
        "Fprime_not_identically_zero": nonzero,
        "ok": bool(in_range and finite and decreasing and nonzero),
    }


@dataclass(frozen=True)
class Hedgehog:
    """
    A profile with winding number ``N`` and mass ``m``.

    ``m = 0`` is accepted so that free operators can be assembled; the
    certification routines require ``m > 0``.
    """

    profile: Profile
    N: int
    m: float

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ValueError(f"winding number must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        m = float(self.m)
        if not math.isfinite(m) or m < 0:
            raise ValueError(f"mass must be finite and nonnegative, got {self.m!r}")
        object.__setattr__(self, "m", m)

    def with_mass(self, m):
        return Hedgehog(self.profile, self.N, m)


def _positive_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("radius must be positive")
    return r


def ntilde(h, r, phi):
    """Hedgehog field (n1, n2, n3) at polar points; broadcasts over r and phi."""
    r = _positive_radius(r)
    phi = np.asarray(phi, dtype=float)
    F = h.profile(r)
    s = np.sin(F)
    n1, n2, n3 = np.broadcast_arrays(s * np.cos(h.N * phi), s * np.sin(h.N * phi), np.cos(F))
    return np.array(n1), np.array(n2), np.array(n3)


def ntilde_partials(h, r, phi):
    """
    Polar partial derivatives of the hedgehog field.

    Returns
    -------
    ndarray, shape broadcast(r, phi) + (3, 2)
        ``out[..., j, 0]`` is d n~_j / dr and ``out[..., j, 1]`` is d n~_j / dphi.
    """
    r = _positive_radius(r)
    phi = np.asarray(phi, dtype=float)
    r, phi = np.broadcast_arrays(r, phi)
    F = h.profile(r)
    dF = h.profile.derivative(r)
    s, c = np.sin(F), np.cos(F)
    cn, sn = np.cos(h.N * phi), np.sin(h.N * phi)
    out = np.empty(r.shape + (3, 2))
    out[..., 0, 0] = dF * c * cn
    out[..., 0, 1] = -h.N * s * sn
    out[..., 1, 0] = dF * c * sn
    out[..., 1, 1] = h.N * s * cn
    out[..., 2, 0] = -dF * s
    out[..., 2, 1] = 0.0
    return out


def _cartesian_polar(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(x1 == 0.0):
        raise DomainError("the line x1 = 0 is excluded")
    # full-angle arctangent: the principal branch flips n1, n2 on x1 < 0 for odd N
    return np.hypot(x1, x2), np.arctan2(x2, x1)


def n_cartesian(h, x1, x2):
    """Hedgehog field in Cartesian coordinates."""
    r, phi = _cartesian_polar(x1, x2)
    return ntilde(h, r, phi)


def grad_n(h, x1, x2):
    """
    Cartesian derivatives D_k n_j by the chain rule.

    Returns
    -------
    ndarray, shape broadcast(x1, x2) + (3, 2)
        ``out[..., j, k]`` is D_{k+1} n_{j+1}.
    """
    r, phi = _cartesian_polar(x1, x2)
    p = ntilde_partials(h, r, phi)
    c, s = np.cos(phi)[..., None], np.sin(phi)[..., None]
    rr = r[..., None]
    out = np.empty_like(p)
    out[..., 0] = p[..., 0] * c - p[..., 1] * s / rr
    out[..., 1] = p[..., 0] * s + p[..., 1] * c / rr
    return out


def unit_norm_deviation(h, r, phi):
    """max | ||n~(r, phi)|| - 1 | over the given points."""
    n1, n2, n3 = ntilde(h, r, phi)
    return float(np.max(np.abs(np.sqrt(n1**2 + n2**2 + n3**2) - 1.0)))


def limsup_audit(profile, kmax=40):
    """
    Audit limsup_{r -> 0+} |sin F(r) / r| on r = 2^-k, k = 1..kmax.

    The audit fails when a sample is non-finite or when the samples on the
    last quarter of the range exceed twice the largest sample on the
    preceding quarter (geometric growth signals divergence).
    """
    k = np.arange(1, kmax + 1)
    r = 2.0 ** (-k.astype(float))
    vals = np.abs(np.sin(np.asarray(profile(r), dtype=float)) / r)
    q = max(kmax // 4, 1)
    finite = bool(np.all(np.isfinite(vals)))
    tail, before = vals[-q:], vals[-2 * q : -q]
    ok = finite and float(np.max(tail)) <= 2.0 * float(np.max(before)) + 1e-12
    return {
        "ok": bool(ok),
        "max_sample": float(np.max(vals)) if finite else float("inf"),
        "last_sample": float(vals[-1]),
        "kmax": int(kmax),
    }


def _uv(h, r):
    r = np.maximum(np.asarray(r, dtype=float), R_FLOOR)
    F = h.profile(r)
    u = np.abs(h.profile.derivative(r))
    v = abs(h.N) * np.abs(np.sin(F)) / r
    return u, v


def gap_integrand_paper(h, r):
    """sqrt | F'(r)^2 - (N sin F(r) / r)^2 |."""
    u, v = _uv(h, r)
    return np.sqrt(np.abs(u * u - v * v))


def radial_coupling_matrix(h, r):
    """
    Radial parts of the isospin coupling matrix, with the phases removed.

    Returns
    -------
    ndarray, shape r.shape + (2, 2)
        [[-F' sin F, F' cos F + w], [F' cos F - w, F' sin F]] with w = N sin F / r.
    """
    r = np.maximum(np.asarray(r, dtype=float), R_FLOOR)
    F = h.profile(r)
    dF = h.profile.derivative(r)
    s, c = np.sin(F), np.cos(F)
    w = h.N * s / r
    out = np.empty(r.shape + (2, 2))
    out[..., 0, 0] = -dF * s
    out[..., 0, 1] = dF * c + w
    out[..., 1, 0] = dF * c - w
    out[..., 1, 1] = dF * s
    return out


def gap_integrand_svd(h, r):
    """Largest singular value of :func:`radial_coupling_matrix` at each r."""
    return spectral_norm_2x2(radial_coupling_matrix(h, np.atleast_1d(r)))


def _golden_max(g, a, b, tol):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - inv * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + inv * (b - a)
            gd = g(d)
    return max(gc, gd)


def supremum(g, r_min=SAMPLE_R_MIN, r_max=SAMPLE_R_MAX, count=SAMPLE_COUNT, tol=1e-10):
    """
    sup of ``g`` over [r_min, r_max]: log-spaced samples, then golden-section
    refinement between the neighbours of the three best samples.
    """
    r = _sample_radii(count, r_min, r_max)
    vals = np.asarray(g(r), dtype=float)
    best = float(np.max(vals))
    scalar = lambda x: float(np.asarray(g(np.array([x]))).ravel()[0])  # noqa: E731
    for i in np.argsort(vals)[::-1][:3]:
        lo, hi = r[max(i - 1, 0)], r[min(i + 1, r.size - 1)]
        best = max(best, _golden_max(scalar, lo, hi, tol))
    return best


def _require_limsup(h):
    audit = limsup_audit(h.profile)
    if not audit["ok"]:
        raise PreconditionError(
            f"|sin F(r)/r| appears to diverge as r -> 0+ (last sample {audit['last_sample']:.3g})"
        )


def gap_paper(h, **kw):
    """sup_r sqrt|F'^2 - (N sin F / r)^2|, without the factor m."""
    _require_limsup(h)
    return supremum(lambda r: gap_integrand_paper(h, r), **kw)


def gap_pointwise_svd(h, **kw):
    """sup_r of the pointwise coupling norm, |F'| + |N sin F / r|, without the factor m."""
    _require_limsup(h)
    return supremum(lambda r: gap_integrand_svd(h, r), **kw)
