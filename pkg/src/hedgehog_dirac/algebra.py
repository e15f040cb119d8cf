"""
Pauli and spin matrices, Kronecker products and small-matrix norms.

Every object here is a dense complex ``numpy`` array. Entries of the Pauli
and spin matrices lie in {0, +-1, +-i}, so all products and anticommutators
among them are computed without rounding and the identity checks below are
exact comparisons.
"""

import numpy as np

__all__ = [
    "identity",
    "zeros",
    "pauli",
    "gamma",
    "kron",
    "commutator",
    "anticommutator",
    "spectral_norm_2x2",
    "power_norm",
    "random_block_pair",
    "identity_deviations",
    "algebra_check",
]

_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def _as_matrix(a, name="a"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D matrix, got shape {a.shape}")
    return a


def _check_index(j):
    if isinstance(j, bool) or not isinstance(j, (int, np.integer)) or j not in (1, 2, 3):
        raise ValueError(f"index must be one of 1, 2, 3, got {j!r}")
    return int(j)


def identity(d):
    """The d x d identity ``1_d``."""
    return np.eye(d, dtype=complex)


def zeros(d):
    """The d x d zero matrix ``0_d``."""
    return np.zeros((d, d), dtype=complex)


def pauli(j):
    """Return the Pauli matrix sigma_j (equal to tau_j) for j in {1, 2, 3}."""
    return _PAULI[_check_index(j)].copy()


def gamma(j):
    """
    Return the 4 x 4 spin matrix gamma_j.

    gamma_1 and gamma_2 are (i sigma_j) (x) 1_2, gamma_3 is (-sigma_3) (x) 1_2.
    """
    j = _check_index(j)
    if j == 3:
        return kron(-pauli(3), identity(2))
    return kron(1j * pauli(j), identity(2))


def kron(a, b):
    """Kronecker product; the row and column counts multiply."""
    return np.kron(_as_matrix(a, "a"), _as_matrix(b, "b"))


def _square_pair(a, b):
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"need square matrices of equal size, got {a.shape} and {b.shape}")
    return a, b


def anticommutator(a, b):
    """{a, b} = ab + ba."""
    a, b = _square_pair(a, b)
    return a @ b + b @ a


def commutator(a, b):
    """[a, b] = ab - ba."""
    a, b = _square_pair(a, b)
    return a @ b - b @ a


def spectral_norm_2x2(a):
    """
    Largest singular value of a 2 x 2 matrix (or a stack of them).

    Uses the closed form s_max^2 = (|a|_F^2 + sqrt(|a|_F^4 - 4 |det a|^2)) / 2.

    Parameters
    ----------
    a : array_like, shape (..., 2, 2)

    Returns
    -------
    float or ndarray
        Nonnegative norms with the leading shape of ``a``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-2:] != (2, 2):
        raise ValueError(f"expected shape (..., 2, 2), got {a.shape}")
    fro2 = np.sum(np.abs(a) ** 2, axis=(-2, -1))
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    disc = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * np.abs(det) ** 2, 0.0))
    out = np.sqrt(0.5 * (fro2 + disc))
    return float(out) if out.ndim == 0 else out


def power_norm(a, seed=0, max_iter=10_000, rtol=1e-14):
    """
    Spectral norm of ``a`` by power iteration on a^H a.

    The start vector comes from ``numpy.random.default_rng(seed)`` so the
    result is deterministic. Iteration stops when the norm estimate changes
    by less than ``rtol`` relative, or after ``max_iter`` steps.
    """
    a = _as_matrix(a)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = a @ x
        new = np.linalg.norm(y)
        if new == 0.0:
            return 0.0
        z = a.conj().T @ y
        x = z / np.linalg.norm(z)
        if abs(new - est) <= rtol * new:
            return float(new)
        est = new
    return float(est)


def random_block_pair(n, seed):
    """
    Seeded random complex W0 (n x n) and V0 = [[0, W0^*], [W0, 0]].

    Returns
    -------
    (W0, V0) : tuple of ndarray
    """
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    v = np.zeros((2 * n, 2 * n), dtype=complex)
    v[:n, n:] = w.conj().T
    v[n:, :n] = w
    return w, v


def identity_deviations():
    """
    Max-abs deviation of every Pauli/spin identity, keyed by a readable label.

    All deviations are exactly zero in IEEE arithmetic. With
    gamma_j = (i sigma_j) (x) 1_2 the squares of gamma_1 and gamma_2 are -1_4;
    a set with every gamma_j^2 = +1_4 cannot also satisfy both
    gamma_1 gamma_2 = i gamma_3 and gamma_2 gamma_3 = -i gamma_1.
    """
    s = {j: pauli(j) for j in (1, 2, 3)}
    g = {j: gamma(j) for j in (1, 2, 3)}
    one2, one4 = identity(2), identity(4)
    checks = {}
    for j in (1, 2, 3):
        checks[f"sigma{j}^2 = 1"] = s[j] @ s[j] - one2
    # (i sigma_j)^2 = -1, so gamma_1 and gamma_2 square to -1_4
    checks["gamma1^2 = -1"] = g[1] @ g[1] + one4
    checks["gamma2^2 = -1"] = g[2] @ g[2] + one4
    checks["gamma3^2 = 1"] = g[3] @ g[3] - one4
    checks["sigma1 sigma2 = i sigma3"] = s[1] @ s[2] - 1j * s[3]
    checks["sigma2 sigma3 = i sigma1"] = s[2] @ s[3] - 1j * s[1]
    checks["sigma3 sigma1 = i sigma2"] = s[3] @ s[1] - 1j * s[2]
    checks["gamma1 gamma2 = i gamma3"] = g[1] @ g[2] - 1j * g[3]
    checks["gamma2 gamma3 = -i gamma1"] = g[2] @ g[3] + 1j * g[1]
    checks["gamma3 gamma1 = -i gamma2"] = g[3] @ g[1] + 1j * g[2]
    for j in (1, 2, 3):
        for k in (1, 2, 3):
            if j < k:
                checks[f"{{sigma{j}, sigma{k}}} = 0"] = anticommutator(s[j], s[k])
                checks[f"{{gamma{j}, gamma{k}}} = 0"] = anticommutator(g[j], g[k])
    return {name: float(np.max(np.abs(m))) for name, m in checks.items()}


def algebra_check(instances=50, block=3):
    """
    Run the full identity suite plus the block-norm equality ||V0|| = ||W0||.

    Returns
    -------
    dict
        ``max_identity_deviation`` (exact, expected 0.0),
        ``max_block_norm_rel_error`` over ``instances`` seeded draws and the
        per-identity deviations.
    """
    devs = identity_deviations()
    worst = 0.0
    for seed in range(instances):
        w, v = random_block_pair(block, seed)
        nw = power_norm(w, seed=seed)
        nv = power_norm(v, seed=seed)
        worst = max(worst, abs(nv - nw) / nw)
    return {
        "max_identity_deviation": max(devs.values()),
        "max_block_norm_rel_error": worst,
        "identities": devs,
    }
