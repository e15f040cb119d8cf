"""
Radial operators of the grand-spin reduction.

Operators act on L^2((0, r_max), r dr) with a Dirichlet condition at r_max
and are discretised by continuous piecewise-linear finite elements on the
cell faces of a :class:`~hedgehog_dirac.radial.RadialGrid`. A discrete
operator is the pair (K, M) of its quadratic form and the exact weighted
mass matrix, so every discrete eigenvalue is a Rayleigh-Ritz value: it
bounds the continuum infimum from above and decreases under refinement on
nested grids (n -> 2n).

The origin node is kept only for channels with ell = 0; every other
channel vanishes at r = 0, where its ell^2 / r^2 term is not integrable.

Channel couplings in a grand-spin sector. Write the channel basis function
as f(r) e^{i ell phi} / sqrt(2 pi) (x) e_s (x) u_t. The potential is
V = [[0, W^*], [W, 0]] in spin, with the isospin matrix

    W = -m [[R1 e^{i phi},  R2 e^{-i(N-1) phi}],
            [R3 e^{i(N+1) phi}, -R1 e^{i phi}]],

    R1 = -F' sin F,  R2 = F' cos F + (N/r) sin F,  R3 = F' cos F - (N/r) sin F,

obtained from (D1 + i D2) = e^{i phi}(d_r + (i/r) d_phi) acting on n3 and on
n1 -/+ i n2 = sin F e^{-/+ i N phi}. W maps spin-up channels to spin-down
channels and shifts ell by the phase exponent, which is exactly the
difference of the ell values assigned by :func:`sector_channels`. The
angular integrals are 1, so the reduced couplings are the real radial
functions above; the block (s=-1, t') <- (s=+1, t) is -m [[R1, R2], [R3, -R1]][t', t].
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .algebra import spectral_norm_2x2
from .errors import DomainError
from .profile import radial_coupling_matrix
from .radial import f0, gauss_legendre, integrate_gl

__all__ = [
    "Channel",
    "SectorOperator",
    "sector_channels",
    "delta_ell",
    "r_op",
    "sector_L",
    "rayleigh",
    "apply_R_analytic_f0",
    "kinetic_f0",
    "potential_f0",
]

ELEMENT_ORDER = 8

# (s, t) order within a sector
SPIN_ISO_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class Channel:
    """
    Angular momentum ell with spin sign s and isospin sign t.

    ``s`` or ``t`` is ``None`` for operators that do not fix it (a bare
    -Delta_ell, or R(ell, t) which mixes s = +1 at ell with s = -1 at ell + 1).
    """

    ell: int
    s: Optional[int] = None
    t: Optional[int] = None

    def k2(self, N):
        """Twice the grand-spin eigenvalue, 2 ell + s + N t."""
        if self.s is None or self.t is None:
            raise ValueError("grand spin needs both s and t")
        return 2 * self.ell + self.s + N * self.t

    def as_dict(self):
        return {"ell": self.ell, "s": self.s, "t": self.t}


def sector_channels(k2, N):
    """
    All channels with ell + s/2 + N t/2 = k2/2 and integer ell.

    The parity of k2 - 1 - N decides whether all four (s, t) combinations
    admit an integer ell or none does.
    """
    out = []
    for s, t in SPIN_ISO_ORDER:
        twice_ell = k2 - s - N * t
        if twice_ell % 2 == 0:
            out.append(Channel(twice_ell // 2, s, t))
    return tuple(out)


# -- element integrals --------------------------------------------------------


def _element_points(grid):
    x, w = gauss_legendre(ELEMENT_ORDER)
    v = grid.vertices
    pts = v[:-1, None] + grid.h * x[None, :]
    return pts, x, w * grid.h


def _weighted_mass_bands(grid, g):
    """
    Bands of int g(r) phi_i phi_j r dr over all n + 1 vertices.

    ``g`` receives the (n, q) array of element quadrature points; ``None``
    means g = 1.
    """
    pts, x, w = _element_points(grid)
    gw = pts * w[None, :]
    if g is not None:
        gw = gw * np.asarray(g(pts), dtype=float)
    pa, pb = 1.0 - x, x
    aa = gw @ (pa * pa)
    bb = gw @ (pb * pb)
    ab = gw @ (pa * pb)
    diag = np.zeros(grid.n + 1)
    diag[:-1] += aa
    diag[1:] += bb
    return diag, ab


def _stiffness_bands(grid):
    """Bands of int phi_i' phi_j' r dr (exact)."""
    v = grid.vertices
    el = (v[:-1] + v[1:]) / (2.0 * grid.h)
    diag = np.zeros(grid.n + 1)
    diag[:-1] += el
    diag[1:] += el
    return diag, -el


def _inv_r2(pts):
    return 1.0 / (pts * pts)


def _tridiag(bands):
    d, e = bands
    return sp.diags([e, d, e], [-1, 0, 1], format="csr")


def _restrict(full, start_row, start_col, n):
    return full[start_row:n, start_col:n]


@dataclass(frozen=True, eq=False)
class SectorOperator:
    """
    A discrete radial operator as a quadratic form ``stiffness`` over the
    weighted mass matrix ``mass``.

    The degrees of freedom are vertex values, channel after channel;
    channel ``c`` owns vertices ``starts[c] .. n-1`` of the grid.
    ``potential_bound`` bounds |<f, V f>| / <f, f> for the zeroth-order part,
    so ``-potential_bound`` is a lower bound of the spectrum.
    """

    grid: object
    channels: tuple
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    starts: tuple
    potential_bound: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.stiffness.shape[0]

    @cached_property
    def offsets(self):
        sizes = [self.grid.n - s for s in self.starts]
        return tuple(int(o) for o in np.concatenate([[0], np.cumsum(sizes)]))

    def channel_nodes(self, c):
        return self.grid.vertices[self.starts[c] : self.grid.n]

    def split(self, x):
        x = np.asarray(x)
        return [x[self.offsets[c] : self.offsets[c + 1]] for c in range(len(self.channels))]

    def join(self, parts):
        return np.concatenate([np.asarray(p) for p in parts])

    def interpolate(self, funcs):
        """
        Vertex values of one callable (every channel) or one callable per channel.
        """
        if callable(funcs):
            funcs = [funcs] * len(self.channels)
        if len(funcs) != len(self.channels):
            raise ValueError(f"need {len(self.channels)} functions, got {len(funcs)}")
        return self.join([np.asarray(f(self.channel_nodes(c)), dtype=float) for c, f in enumerate(funcs)])

    def form(self, x, y=None):
        """Discrete <x, A y>; ``y`` defaults to ``x``."""
        y = x if y is None else y
        return float(np.real(np.vdot(x, self.stiffness @ y)))

    def inner(self, x, y=None):
        """Discrete weighted inner product <x, y>_2."""
        y = x if y is None else y
        return complex(np.vdot(x, self.mass @ y))

    @cached_property
    def _mass_lu(self):
        return splu(self.mass.tocsc())

    def apply(self, x):
        """Strong form M^{-1} K x of the operator on vertex values."""
        y = self.stiffness @ np.asarray(x)
        if np.iscomplexobj(y):
            return self._mass_lu.solve(y.real) + 1j * self._mass_lu.solve(y.imag)
        return self._mass_lu.solve(y)

    def bands(self):
        """(K diag, K off, M diag, M off) of a single-channel operator."""
        if len(self.channels) != 1:
            raise ValueError("bands are defined for single-channel operators only")
        k, m = self.stiffness, self.mass
        return (
            np.asarray(k.diagonal(0)),
            np.asarray(k.diagonal(1)),
            np.asarray(m.diagonal(0)),
            np.asarray(m.diagonal(1)),
        )

    def symmetry_error(self):
        """max |K - K^T| relative to max |K|."""
        k = self.stiffness
        scale = abs(k).max()
        if scale == 0:
            return 0.0
        return float(abs(k - k.T).max() / scale)

    def write_triplets(self, path):
        """Write ``i j value`` lines for the stiffness and then the mass matrix."""
        with open(path, "w") as fh:
            for name, mat in (("stiffness", self.stiffness), ("mass", self.mass)):
                coo = mat.tocoo()
                fh.write(f"# {name} {mat.shape[0]} {mat.shape[1]} {coo.nnz}\n")
                for i, j, v in zip(coo.row, coo.col, coo.data):
                    fh.write(f"{int(i)} {int(j)} {float(v)!r}\n")


# -- assembly -----------------------------------------------------------------


def _laplacian_full(grid, ell):
    kd, ke = _stiffness_bands(grid)
    if ell != 0:
        md, me = _weighted_mass_bands(grid, _inv_r2)
        kd = kd + ell * ell * md
        ke = ke + ell * ell * me
    return _tridiag((kd, ke))


def delta_ell(grid, ell, dirichlet_origin=None):
    """
    -Delta_ell = -d^2/dr^2 - (1/r) d/dr + ell^2 / r^2 on L^2((0, r_max), r dr).

    ``dirichlet_origin`` defaults to ``ell != 0``.
    """
    ell = int(ell)
    if dirichlet_origin is None:
        dirichlet_origin = ell != 0
    start = 1 if dirichlet_origin else 0
    n = grid.n
    k = _restrict(_laplacian_full(grid, ell), start, start, n)
    m = _restrict(_tridiag(_weighted_mass_bands(grid, None)), start, start, n)
    return SectorOperator(grid, (Channel(ell),), k.tocsr(), m.tocsr(), (start,), 0.0, {"kind": "minus_laplacian", "ell": ell})


def r_op(grid, ell, t, h):
    """
    R(ell, t) = -Delta_ell / 2 - Delta_{ell+1} / 2 + m t F' sin F.
    """
    ell, t = int(ell), int(t)
    if t not in (1, -1):
        raise ValueError(f"t must be +1 or -1, got {t}")
    n = grid.n
    kin = 0.5 * _laplacian_full(grid, ell) + 0.5 * _laplacian_full(grid, ell + 1)
    prof = h.profile

    def pot(r):
        return h.m * t * prof.derivative(r) * np.sin(prof(r))

    k = kin + _tridiag(_weighted_mass_bands(grid, pot))
    m = _tridiag(_weighted_mass_bands(grid, None))
    pts, _, _ = _element_points(grid)
    bound = float(np.max(np.abs(pot(pts))))
    meta = {"kind": "R", "ell": ell, "t": t, "m": h.m, "N": h.N, "profile": prof.name}
    return SectorOperator(
        grid,
        (Channel(ell, None, t),),
        _restrict(k, 1, 1, n).tocsr(),
        _restrict(m, 1, 1, n).tocsr(),
        (1,),
        bound,
        meta,
    )


def _coupling_functions(h):
    """Radial couplings between spin-up column channel and spin-down row channel."""
    m = h.m

    def entry(i, j, sign):
        def g(r):
            return sign * m * radial_coupling_matrix(h, r)[..., i, j]

        return g

    # rows: (s=-1, t=+1), (s=-1, t=-1); cols: (s=+1, t=+1), (s=+1, t=-1)
    return {
        ((-1, 1), (1, 1)): entry(0, 0, -1.0),
        ((-1, 1), (1, -1)): entry(0, 1, -1.0),
        ((-1, -1), (1, 1)): entry(1, 0, -1.0),
        ((-1, -1), (1, -1)): entry(1, 1, -1.0),
    }


def sector_L(grid, k2, h):
    """
    L = -Delta + V reduced to the grand-spin sector with eigenvalue k2 / 2.
    """
    channels = sector_channels(int(k2), h.N)
    if not channels:
        raise ValueError(f"grand-spin sector k = {k2}/2 is empty for N = {h.N}")
    n = grid.n
    starts = tuple(0 if c.ell == 0 else 1 for c in channels)
    mass_full = _tridiag(_weighted_mass_bands(grid, None))
    couplings = _coupling_functions(h) if h.m != 0 else {}
    index = {(c.s, c.t): i for i, c in enumerate(channels)}
    kblocks = [[None] * len(channels) for _ in channels]
    mblocks = [[None] * len(channels) for _ in channels]
    for i, c in enumerate(channels):
        kblocks[i][i] = _restrict(_laplacian_full(grid, c.ell), starts[i], starts[i], n)
        mblocks[i][i] = _restrict(mass_full, starts[i], starts[i], n)
    for (row_st, col_st), g in couplings.items():
        if row_st not in index or col_st not in index:
            continue
        i, j = index[row_st], index[col_st]
        full = _tridiag(_weighted_mass_bands(grid, g))
        kblocks[i][j] = _restrict(full, starts[i], starts[j], n)
        kblocks[j][i] = _restrict(full, starts[j], starts[i], n)
    k = sp.bmat(kblocks, format="csr")
    m = sp.bmat(mblocks, format="csr")
    bound = 0.0
    if h.m != 0:
        pts, _, _ = _element_points(grid)
        bound = float(h.m * np.max(spectral_norm_2x2(radial_coupling_matrix(h, pts))))
    meta = {"kind": "L", "k2": int(k2), "m": h.m, "N": h.N, "profile": h.profile.name}
    return SectorOperator(grid, channels, k, m, starts, bound, meta)


def rayleigh(A, f):
    """
    Rayleigh quotient <f, A f> / <f, f>.

    ``A`` is a :class:`SectorOperator` (weighted inner product; ``f`` is a
    vertex-value vector or callable(s) to interpolate) or a symmetric
    matrix (flat inner product).
    """
    if isinstance(A, SectorOperator):
        if callable(f) or (isinstance(f, (list, tuple)) and all(callable(g) for g in f)):
            x = A.interpolate(f)
        else:
            x = np.asarray(f, dtype=float)
        if x.shape != (A.dim,):
            raise ValueError(f"vector of length {A.dim} expected, got shape {x.shape}")
        den = A.inner(x).real
        if den <= 0:
            raise ValueError("Rayleigh quotient of the zero vector")
        return A.form(x) / den
    a = np.asarray(A)
    x = np.asarray(f)
    if a.ndim != 2 or x.shape != (a.shape[1],):
        raise ValueError(f"shape mismatch: matrix {a.shape}, vector {x.shape}")
    den = float(np.real(np.vdot(x, x)))
    if den <= 0:
        raise ValueError("Rayleigh quotient of the zero vector")
    return float(np.real(np.vdot(x, a @ x))) / den


# -- closed forms for the mollifier -------------------------------------------


def apply_R_analytic_f0(ell):
    """
    Multiplier q with (-Delta_ell / 2 - Delta_{ell+1} / 2) f0 = q f0 on (0, 1):

        q(r) = -4 (3 r^2 - 2) / (1 - r^2)^4 + (ell^2 + (ell+1)^2 - 2) / (2 r^2).
    """
    ell = int(ell)
    c = ell * ell + (ell + 1) ** 2 - 2

    def multiplier(r):
        r = np.asarray(r, dtype=float)
        if np.any(~((r > 0) & (r < 1))):
            raise DomainError("the multiplier is defined on 0 < r < 1 only")
        return -4.0 * (3.0 * r * r - 2.0) / (1.0 - r * r) ** 4 + c / (2.0 * r * r)

    return multiplier


def kinetic_f0(ell, panels=128, order=16):
    """<f0, (-Delta_ell / 2 - Delta_{ell+1} / 2) f0>_2 by Gauss-Legendre quadrature."""
    q = apply_R_analytic_f0(ell)
    return integrate_gl(lambda r: q(r) * f0(r) ** 2 * r, 0.0, 1.0, panels, order)


def potential_f0(profile, panels=128, order=16):
    """<f0, F' sin F f0>_2 by Gauss-Legendre quadrature."""
    return integrate_gl(
        lambda r: profile.derivative(r) * np.sin(profile(r)) * f0(r) ** 2 * r, 0.0, 1.0, panels, order
    )
