"""Independent numerical oracles used only by the test suite.

Each routine reaches the quantity under test by a different numerical route
than the library (generic ODE integration, a dense matrix eigensolver, or a
scalar transcendental solve), so agreement is meaningful evidence.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

PI = math.pi


def phase_ode_terminal(q_func, mu, alpha, rtol=1e-11, atol=1e-12):
    """Terminal phase from direct integration of the scalar phase equation
    theta' = cos(theta)**2 + (mu - q) sin(theta)**2, theta(0) = pi - alpha."""

    def rhs(x, th):
        c, s = math.cos(th[0]), math.sin(th[0])
        return [c * c + (mu - q_func(x)) * s * s]

    sol = solve_ivp(rhs, (0.0, PI), [PI - alpha], rtol=rtol, atol=atol)
    assert sol.success
    return float(sol.y[0, -1])


def dirichlet_matrix_eigenvalues(q_func, count, m=20000):
    """Lowest eigenvalues of the Dirichlet-Dirichlet problem from a dense
    three-point finite-difference matrix on m interior grid points."""
    h = PI / (m + 1)
    xs = h * np.arange(1, m + 1)
    diag = 2.0 / h**2 + np.array([q_func(x) for x in xs])
    off = np.full(m - 1, -1.0 / h**2)
    return eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))


def dirichlet_matrix_eigenvector(q_func, n, m=4000):
    """(grid, eigenvector) of the n-th Dirichlet-Dirichlet eigenfunction."""
    from scipy.linalg import eigh_tridiagonal

    h = PI / (m + 1)
    xs = h * np.arange(1, m + 1)
    diag = 2.0 / h**2 + np.array([q_func(x) for x in xs])
    off = np.full(m - 1, -1.0 / h**2)
    _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(n, n))
    return xs, vecs[:, 0]


def _cc(mu):
    # cos(sqrt(mu) pi) continued through mu <= 0
    if mu >= 0.0:
        return math.cos(math.sqrt(mu) * PI)
    return math.cosh(math.sqrt(-mu) * PI)


def _ss(mu):
    # sin(sqrt(mu) pi)/sqrt(mu) continued through mu <= 0
    if abs(mu) < 1e-12:
        return PI * (1.0 - mu * PI * PI / 6.0)
    if mu > 0.0:
        r = math.sqrt(mu)
        return math.sin(r * PI) / r
    r = math.sqrt(-mu)
    return math.sinh(r * PI) / r


def flat_characteristic(mu, alpha, beta):
    """Boundary determinant for q = 0, entire in mu (valid for mu <= 0 too)."""
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    y_pi = sa * _cc(mu) - ca * _ss(mu)
    yp_pi = -sa * mu * _ss(mu) - ca * _cc(mu)
    return y_pi * cb + yp_pi * sb


def flat_eigenvalue(n, alpha, beta, mu_min=-60.0):
    """n-th eigenvalue of the q = 0 problem by scanning the characteristic
    for sign changes and polishing with a scalar root solver."""
    mu_max = (n + 3) ** 2 + 1.0
    grid = np.linspace(mu_min, mu_max, 200_000)
    vals = np.array([flat_characteristic(m, alpha, beta) for m in grid])
    signs = np.sign(vals)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    assert len(flips) > n, "scan window too small"
    i = flips[n]
    return brentq(flat_characteristic, grid[i], grid[i + 1],
                  args=(alpha, beta), xtol=1e-13, rtol=1e-15)
