"""
Independent discretisations of the two-dimensional operators.

These are used to cross-check the radial reductions in
:mod:`hedgehog_dirac.operators` and share none of its channel bookkeeping.

Four-component fields are stored as arrays of shape ``(4, ...)`` with
component index ``2 * spin + iso``: spin 0 is the upper (s = +1) spinor
entry and iso 0 the tau_3 = +1 entry.

* The polar oracle works on (r, phi) with a vertex grid r_j = j h,
  j = 1..nr-1 (zero ghosts at r = 0 and r = r_max), second-order finite
  differences in r and exact Fourier differentiation in phi. The potential
  V = [[0, W^*], [W, 0]] with W = -m e^{i phi} sum_j (d_r n_j + (i/r) d_phi n_j) tau_j
  is assembled pointwise from :func:`~hedgehog_dirac.profile.ntilde_partials`.
* The Cartesian oracle applies H = (-i sigma_2 D_1 + i sigma_1 D_2) (x) 1
  - m sum_j sigma_3 n_j (x) tau_j on a cell-centred square grid with central
  differences, for the identity H^2 = -Delta + m^2 + V.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import pauli
from .profile import grad_n, n_cartesian, ntilde_partials

__all__ = [
    "PolarGrid",
    "polar_potential",
    "polar_oracle_apply",
    "polar_inner",
    "psi_f",
    "embed_channels",
    "project_channels",
    "CartesianGrid",
    "cartesian_potential",
    "cartesian_H_oracle",
    "h2_identity_residual",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _component(s, t):
    return 2 * (0 if s == 1 else 1) + (0 if t == 1 else 1)


# -- polar oracle --------------------------------------------------------------


@dataclass(frozen=True)
class PolarGrid:
    """Interior radial vertices j h (j = 1..nr-1) times nphi uniform angles."""

    nr: int
    nphi: int
    r_max: float

    def __post_init__(self):
        if int(self.nr) != self.nr or self.nr < 3:
            raise ValueError(f"nr must be an integer >= 3, got {self.nr!r}")
        if int(self.nphi) != self.nphi or self.nphi < 1:
            raise ValueError(f"nphi must be a positive integer, got {self.nphi!r}")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be positive, got {self.r_max!r}")

    @property
    def h(self):
        return self.r_max / self.nr

    @cached_property
    def r(self):
        return np.arange(1, self.nr) * self.h

    @cached_property
    def phi(self):
        return 2.0 * math.pi * np.arange(self.nphi) / self.nphi

    @property
    def shape(self):
        return (4, self.nr - 1, self.nphi)


def _check_resolution(h, nphi):
    need = 8 * (abs(h.N) + 2)
    if nphi < need:
        raise ValueError(f"nphi = {nphi} does not resolve the coupled modes; need nphi >= {need}")


def polar_potential(h, grid):
    """
    Pointwise W(r, phi) as an array of shape (nr-1, nphi, 2, 2).
    """
    rr, pp = np.meshgrid(grid.r, grid.phi, indexing="ij")
    d = ntilde_partials(h, rr, pp)  # (..., 3, 2): [d_r, d_phi]
    comb = d[..., 0] + 1j * d[..., 1] / rr[..., None]
    tau = np.stack([pauli(j) for j in (1, 2, 3)])
    w = np.einsum("abj,jkl->abkl", comb, tau)
    return -h.m * np.exp(1j * pp)[..., None, None] * w


def _minus_laplacian_polar(psi, grid):
    hr = grid.h
    r = grid.r[:, None]
    pad = np.zeros(psi.shape[:-2] + (psi.shape[-2] + 2, psi.shape[-1]), dtype=psi.dtype)
    pad[..., 1:-1, :] = psi
    up, mid, dn = pad[..., 2:, :], pad[..., 1:-1, :], pad[..., :-2, :]
    radial = -(up - 2.0 * mid + dn) / hr**2 - (up - dn) / (2.0 * hr * r)
    q = np.fft.fftfreq(grid.nphi, d=1.0 / grid.nphi)
    angular = np.fft.ifft(np.fft.fft(psi, axis=-1) * (q * q), axis=-1) / (r * r)
    return radial + angular


def polar_oracle_apply(h, nr, nphi, psi, r_max=2.0):
    """
    Apply L = -Delta + V in polar coordinates to a four-component field.

    Parameters
    ----------
    h : Hedgehog
    nr, nphi : int
        Radial cells and angular points; ``psi`` lives on the nr-1 interior
        radial vertices.
    psi : ndarray, shape (4, nr-1, nphi)
    r_max : float

    Returns
    -------
    ndarray, complex, same shape as ``psi``
    """
    _check_resolution(h, nphi)
    grid = PolarGrid(nr, nphi, r_max)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != grid.shape:
        raise ValueError(f"psi must have shape {grid.shape}, got {psi.shape}")
    out = _minus_laplacian_polar(psi, grid)
    if h.m != 0:
        w = polar_potential(h, grid)
        up, down = psi[:2], psi[2:]
        out[:2] += np.einsum("abkl,kab->lab", w.conj(), down)
        out[2:] += np.einsum("abkl,lab->kab", w, up)
    return out


def polar_inner(grid, a, b):
    """sum conj(a) b r h dphi over the polar grid."""
    w = grid.r[:, None] * grid.h * (2.0 * math.pi / grid.nphi)
    return complex(np.sum(np.conj(a) * b * w))


def psi_f(grid, f, ell1, ell2, t):
    """
    (v_ell1(f) u_t, v_ell2(f) u_t) / sqrt(2) with v_ell(f) = f e^{i ell phi} / sqrt(2 pi).

    The 1/sqrt(2 pi) makes ||Psi|| = ||f||_2.
    """
    return embed_channels(grid, [(ell1, 1, t, f), (ell2, -1, t, f)]) / math.sqrt(2.0)


def embed_channels(grid, parts):
    """
    Sum of f(r) e^{i ell phi} / sqrt(2 pi) placed in component (s, t).

    ``parts`` is a sequence of (ell, s, t, f) with ``f`` a callable or an
    array of values on ``grid.r``.
    """
    psi = np.zeros(grid.shape, dtype=complex)
    for ell, s, t, f in parts:
        vals = f(grid.r) if callable(f) else np.asarray(f)
        psi[_component(s, t)] += np.outer(vals, np.exp(1j * ell * grid.phi)) / SQRT_2PI
    return psi


def project_channels(grid, psi, channels):
    """
    Radial coefficients of e^{i ell phi} / sqrt(2 pi) in component (s, t)
    for every (ell, s, t) in ``channels``.
    """
    dphi = 2.0 * math.pi / grid.nphi
    out = []
    for ell, s, t in channels:
        comp = psi[_component(s, t)]
        out.append(comp @ np.exp(-1j * ell * grid.phi) * dphi / SQRT_2PI)
    return out


# -- Cartesian oracle ----------------------------------------------------------


@dataclass(frozen=True)
class CartesianGrid:
    """Cell-centred points on [-box, box]^2; an even side keeps nodes off the axes."""

    n_side: int
    box: float

    def __post_init__(self):
        if int(self.n_side) != self.n_side or self.n_side < 4 or self.n_side % 2:
            raise ValueError(f"n_side must be an even integer >= 4, got {self.n_side!r}")
        if not (math.isfinite(self.box) and self.box > 0):
            raise ValueError(f"box must be positive, got {self.box!r}")

    @property
    def h(self):
        return 2.0 * self.box / self.n_side

    @cached_property
    def axis(self):
        return -self.box + (np.arange(self.n_side) + 0.5) * self.h

    @cached_property
    def mesh(self):
        return np.meshgrid(self.axis, self.axis, indexing="ij")


def _d(u, axis, h):
    """Central difference with zero values outside the box."""
    pad = [(0, 0)] * u.ndim
    pad[axis] = (1, 1)
    p = np.pad(u, pad)
    hi = [slice(None)] * u.ndim
    lo = [slice(None)] * u.ndim
    hi[axis] = slice(2, None)
    lo[axis] = slice(None, -2)
    return (p[tuple(hi)] - p[tuple(lo)]) / (2.0 * h)


def _five_point(u, h):
    p = np.pad(u, [(0, 0)] * (u.ndim - 2) + [(1, 1), (1, 1)])
    c = p[..., 1:-1, 1:-1]
    return (4.0 * c - p[..., 2:, 1:-1] - p[..., :-2, 1:-1] - p[..., 1:-1, 2:] - p[..., 1:-1, :-2]) / (h * h)


def _apply_local(mat, psi):
    """Pointwise 4x4 matrix field (..., 4, 4) applied to psi (4, ...)."""
    return np.einsum("...kl,l...->k...", mat, psi)


def _mass_term(h, grid):
    x1, x2 = grid.mesh
    n = np.stack(n_cartesian(h, x1, x2), axis=-1)
    tau = np.stack([pauli(j) for j in (1, 2, 3)])
    ntau = np.einsum("...j,jkl->...kl", n, tau)
    s3 = pauli(3)
    return -h.m * np.einsum("ab,...kl->...akbl", s3, ntau).reshape(n.shape[:-1] + (4, 4))


def cartesian_potential(h, grid):
    """
    Pointwise V(x) = -m sum_j (sigma_1 D_1 n_j + sigma_2 D_2 n_j) (x) tau_j, shape (n, n, 4, 4).
    """
    x1, x2 = grid.mesh
    g = grad_n(h, x1, x2)  # (..., 3, 2)
    tau = np.stack([pauli(j) for j in (1, 2, 3)])
    s1, s2 = pauli(1), pauli(2)
    a = np.einsum("...j,jkl->...kl", g[..., 0], tau)
    b = np.einsum("...j,jkl->...kl", g[..., 1], tau)
    v = np.einsum("ab,...kl->...akbl", s1, a) + np.einsum("ab,...kl->...akbl", s2, b)
    return -h.m * v.reshape(x1.shape + (4, 4))


def cartesian_H_oracle(h, n_side, box):
    """
    Return ``apply(psi)`` for H on the cell-centred grid, psi of shape (4, n, n).
    """
    grid = CartesianGrid(n_side, box)
    mass = _mass_term(h, grid)
    s1, s2 = pauli(1), pauli(2)
    k1 = np.kron(-1j * s2, np.eye(2))
    k2 = np.kron(1j * s1, np.eye(2))

    def apply(psi):
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (4, n_side, n_side):
            raise ValueError(f"psi must have shape {(4, n_side, n_side)}, got {psi.shape}")
        d1 = _d(psi, 1, grid.h)
        d2 = _d(psi, 2, grid.h)
        out = np.einsum("kl,l...->k...", k1, d1) + np.einsum("kl,l...->k...", k2, d2)
        return out + _apply_local(mass, psi)

    apply.grid = grid
    return apply


def h2_identity_residual(h, n_side, box, psi_func):
    """
    ||H(H psi) - (-Delta psi + m^2 psi + V psi)|| / ||psi|| on the grid.

    ``psi_func(x1, x2)`` returns the (4, n, n) field; Delta is the five-point
    Laplacian.
    """
    apply = cartesian_H_oracle(h, n_side, box)
    grid = apply.grid
    x1, x2 = grid.mesh
    psi = np.asarray(psi_func(x1, x2), dtype=complex)
    lhs = apply(apply(psi))
    rhs = _five_point(psi, grid.h) + h.m**2 * psi + _apply_local(cartesian_potential(h, grid), psi)
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(psi))
