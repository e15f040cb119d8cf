"""
Discretisation of L^2((0, inf), r dr).

``RadialGrid`` is a cell-centred (midpoint) grid on [0, r_max]; no sample
sits at r = 0. Its cell faces ``vertices`` carry the piecewise-linear trial
spaces used by :mod:`hedgehog_dirac.operators`.
"""

import csv
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

__all__ = [
    "RadialGrid",
    "RadialVec",
    "inner2",
    "norm2",
    "gauss_legendre",
    "integrate_gl",
    "mollifier_integral",
    "mollifier_constant",
    "f0",
    "mollifier_f0",
    "write_csv",
]

GL_ORDERS = (8, 16)


@dataclass(frozen=True)
class RadialGrid:
    """
    Midpoint grid r_i = (i + 1/2) h, h = r_max / n, with weights w_i = r_i h.

    The weights integrate r dr exactly for piecewise-linear integrands, so
    sum(w) = r_max^2 / 2.
    """

    n: int
    r_max: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need an integer n >= 2, got {self.n!r}")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be positive, got {self.r_max!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r_max", float(self.r_max))

    @property
    def h(self):
        return self.r_max / self.n

    @cached_property
    def nodes(self):
        return (np.arange(self.n) + 0.5) * self.h

    @cached_property
    def weights(self):
        return self.nodes * self.h

    @cached_property
    def vertices(self):
        """Cell faces j h, j = 0..n."""
        return np.arange(self.n + 1) * self.h

    def sample(self, func):
        """A :class:`RadialVec` of ``func`` evaluated at the nodes."""
        return RadialVec(self, np.asarray(func(self.nodes)))


@dataclass(frozen=True, eq=False)
class RadialVec:
    grid: RadialGrid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {samples.shape}")
        object.__setattr__(self, "samples", samples)


def inner2(u, v):
    """<u, v>_2 = sum conj(u_i) v_i w_i."""
    if u.grid != v.grid:
        raise ValueError("vectors live on different grids")
    return complex(np.sum(np.conj(u.samples) * v.samples * u.grid.weights))


def norm2(u):
    return math.sqrt(max(inner2(u, u).real, 0.0))


@lru_cache(maxsize=None)
def gauss_legendre(order):
    """Nodes and weights on [0, 1] for the supported orders."""
    if order not in GL_ORDERS:
        raise ValueError(f"order must be one of {GL_ORDERS}, got {order!r}")
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def integrate_gl(f, a, b, panels=64, order=16):
    """
    Composite Gauss-Legendre quadrature of ``f`` over [a, b].

    ``f`` is called once on the array of all quadrature points; it never
    sees the endpoints.
    """
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError(f"need finite bounds a < b, got [{a}, {b}]")
    if isinstance(panels, bool) or int(panels) != panels or panels < 1:
        raise ValueError(f"panels must be a positive integer, got {panels!r}")
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, int(panels) + 1)
    width = np.diff(edges)[:, None]
    pts = edges[:-1, None] + width * x[None, :]
    vals = np.asarray(f(pts), dtype=float)
    return float(np.sum(vals * width * w[None, :]))


def _bump(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = (r > 0) & (r < 1)
    ri = r[inside]
    out[inside] = ri * np.exp(-1.0 / (1.0 - ri * ri))
    return out


def mollifier_integral(panels=128, order=16):
    """int_0^1 r^3 exp(-2 / (1 - r^2)) dr."""
    return integrate_gl(lambda r: r**3 * np.exp(-2.0 / (1.0 - r * r)), 0.0, 1.0, panels, order)


@lru_cache(maxsize=None)
def mollifier_constant():
    """Normalisation C of the bump, so that ||f0||_2 = 1."""
    return mollifier_integral() ** -0.5


def f0(r):
    """C r exp(-1 / (1 - r^2)) on (0, 1), zero elsewhere."""
    return mollifier_constant() * _bump(r)


def mollifier_f0(grid):
    if grid.r_max < 1.0:
        raise ValueError(f"the bump is supported on (0, 1); need r_max >= 1, got {grid.r_max}")
    return grid.sample(f0)


def write_csv(vec, path):
    """Write ``r,value`` rows; complex samples get separate real/imag columns."""
    samples = vec.samples
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        if np.iscomplexobj(samples):
            out.writerow(["r", "real", "imag"])
            for r, v in zip(vec.grid.nodes, samples):
                out.writerow([repr(float(r)), repr(float(v.real)), repr(float(v.imag))])
        else:
            out.writerow(["r", "value"])
            for r, v in zip(vec.grid.nodes, samples):
                out.writerow([repr(float(r)), repr(float(v))])
