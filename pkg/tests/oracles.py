"""Independent reference computations the tests check the package against.

Nothing here calls into the routines under test: eigenvalues are probed
through the tridiagonal determinant recurrence and shifted inverse
iteration (LU solves only), transfer matrices through direct integration
of the wave equation, and single slabs through the textbook closed form.
"""

import cmath

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp


def charpoly_newton_step(h: np.ndarray, lam: complex) -> float:
    """Size of one Newton step of det(H - x I) at x = lam.

    Uses the three-term determinant recurrence for tridiagonal H; the
    returned step is roughly the distance to the nearest simple root.
    """
    n = h.shape[0]
    d_prev, d = 1.0 + 0j, h[0, 0] - lam
    dp_prev, dp = 0.0 + 0j, -1.0 + 0j
    for k in range(1, n):
        off = h[k - 1, k] * h[k, k - 1]
        d_new = (h[k, k] - lam) * d - off * d_prev
        dp_new = -d + (h[k, k] - lam) * dp - off * dp_prev
        d_prev, d, dp_prev, dp = d, d_new, dp, dp_new
        scale = max(abs(d), abs(dp))
        if scale > 1e100:
            d_prev /= scale
            d /= scale
            dp_prev /= scale
            dp /= scale
    if dp == 0:
        return abs(d)
    return abs(d / dp)


def inverse_iteration_eigenvalue(h: np.ndarray, shift: complex, rng,
                                 iters: int = 10) -> complex:
    """Eigenvalue nearest ``shift`` via shifted inverse iteration."""
    n = h.shape[0]
    lu = scipy.linalg.lu_factor(h - shift * np.eye(n))
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    for _ in range(iters):
        x = scipy.linalg.lu_solve(lu, x)
        x /= np.linalg.norm(x)
    return (np.conj(x) @ (h @ x)) / (np.conj(x) @ x)


def ode_stack_transfer(stack, energy: float) -> np.ndarray:
    """Transfer matrix by integrating psi'' = (V - E) psi across the stack.

    The product convention puts the rightmost factor first, so the
    integration walks the slab list in reverse.
    """
    pots = stack.potentials[::-1]
    lens = stack.lengths[::-1]

    def rhs_factory(v):
        def rhs(x, y):
            # y = [psi_re, psi_im, phi_re, phi_im] with phi = psi'
            psi = y[0] + 1j * y[1]
            phi = y[2] + 1j * y[3]
            dphi = (v - energy) * psi
            return [phi.real, phi.imag, dphi.real, dphi.imag]
        return rhs

    phi_mat = np.eye(2, dtype=complex)
    for v, length in zip(pots, lens):
        cols = []
        for y0 in (np.array([1, 0, 0, 0.0]), np.array([0, 0, 1, 0.0])):
            sol = solve_ivp(rhs_factory(v), (0, length), y0, rtol=1e-12,
                            atol=1e-14, method="DOP853")
            yf = sol.y[:, -1]
            cols.append([yf[0] + 1j * yf[1], yf[2] + 1j * yf[3]])
        phi_mat = np.array(cols).T @ phi_mat

    c = np.diag([1.0, -1.0j])
    core = c @ phi_mat @ np.linalg.inv(c)
    k0 = cmath.sqrt(energy)
    t_free = np.array([[1, 1], [k0, -k0]], dtype=complex)
    return np.linalg.inv(t_free) @ core @ t_free


def rectangular_transmission(v0: float, length: float, energy: float) -> float:
    """Closed-form transmission through one real rectangular slab."""
    k0 = cmath.sqrt(energy)
    k1 = cmath.sqrt(energy - v0)
    s = cmath.sin(k1 * length)
    denominator = 1 + abs((k0 ** 2 - k1 ** 2) ** 2 * s ** 2
                          / (4 * k0 ** 2 * k1 ** 2))
    return 1.0 / denominator
