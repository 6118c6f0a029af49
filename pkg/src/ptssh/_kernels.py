"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The fast path is selected at import time: numba is used when it imports
cleanly and the environment variable ``PTSSH_NO_NUMBA`` is unset (or set to
0/false/no).  Both paths are always importable (``evolve_states_numpy``,
``stack_entries_numpy``, and their jitted twins when available) so the
benchmark suite can time them against each other; the rest of the package
only calls the dispatching wrappers ``evolve_states`` and ``stack_entries``.
"""

from __future__ import annotations

import cmath
import os

import numpy as np

_flag = os.environ.get("PTSSH_NO_NUMBA", "").strip().lower()
_numba_disabled = _flag in ("1", "true", "yes", "on")

if not _numba_disabled:
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False
else:
    USING_NUMBA = False


def evolve_states_numpy(u_step: np.ndarray, psi0: np.ndarray, n_steps: int,
                        substeps: int) -> np.ndarray:
    """Apply a one-step propagator repeatedly, recording every grid state.

    ``u_step`` advances the state by one sub-step; ``substeps`` sub-steps make
    one grid step.  Returns an ``(n_steps + 1, n)`` complex array whose row 0
    is ``psi0``.
    """
    n = psi0.shape[0]
    states = np.empty((n_steps + 1, n), dtype=np.complex128)
    states[0] = psi0
    psi = psi0.copy()
    for i in range(n_steps):
        for _ in range(substeps):
            psi = u_step @ psi
        states[i + 1] = psi
    return states


def _evolve_states_loop(u_step, psi0, n_steps, substeps):
    n = psi0.shape[0]
    states = np.empty((n_steps + 1, n), dtype=np.complex128)
    states[0] = psi0
    psi = psi0.copy()
    for i in range(n_steps):
        for _ in range(substeps):
            psi = u_step @ psi
        states[i + 1] = psi
    return states


def _slab_wavevectors(potentials: np.ndarray, energies: np.ndarray) -> np.ndarray:
    # principal branch of sqrt(E - V); the slab factor is even in k so the
    # branch choice cannot change results
    return np.sqrt(energies[:, None].astype(np.complex128) - potentials[None, :])


def stack_entries_numpy(potentials: np.ndarray, lengths: np.ndarray,
                        energies: np.ndarray) -> np.ndarray:
    """Transfer-matrix entries for a slab stack at many energies at once.

    Product order is output-side first: ``t_R^{-1} @ T(slab_0) @ T(slab_1)
    @ ... @ t_L`` with free-region basis matrices at ``k0 = sqrt(E)``.
    Returns an ``(n_energies, 2, 2)`` complex array.
    """
    energies = np.asarray(energies, dtype=np.float64)
    n_e = energies.shape[0]
    k0 = np.sqrt(energies.astype(np.complex128))

    # accumulator starts as t_R^{-1} = [[1/2, 1/(2 k0)], [1/2, -1/(2 k0)]]
    acc = np.empty((n_e, 2, 2), dtype=np.complex128)
    acc[:, 0, 0] = 0.5
    acc[:, 0, 1] = 0.5 / k0
    acc[:, 1, 0] = 0.5
    acc[:, 1, 1] = -0.5 / k0

    if potentials.shape[0]:
        k = _slab_wavevectors(np.asarray(potentials, dtype=np.complex128), energies)
        kl = k * np.asarray(lengths, dtype=np.float64)[None, :]
        cos_kl = np.cos(kl)
        sin_kl = np.sin(kl)
        slab = np.empty((n_e, 2, 2), dtype=np.complex128)
        for s in range(potentials.shape[0]):
            slab[:, 0, 0] = cos_kl[:, s]
            slab[:, 0, 1] = 1j * sin_kl[:, s] / k[:, s]
            slab[:, 1, 0] = 1j * k[:, s] * sin_kl[:, s]
            slab[:, 1, 1] = cos_kl[:, s]
            acc = acc @ slab

    t_left = np.empty((n_e, 2, 2), dtype=np.complex128)
    t_left[:, 0, 0] = 1.0
    t_left[:, 0, 1] = 1.0
    t_left[:, 1, 0] = k0
    t_left[:, 1, 1] = -k0
    return acc @ t_left


def _stack_entries_loop(potentials, lengths, energies):
    n_e = energies.shape[0]
    out = np.empty((n_e, 2, 2), dtype=np.complex128)
    for e in range(n_e):
        k0 = cmath.sqrt(energies[e])
        a00 = 0.5 + 0.0j
        a01 = 0.5 / k0
        a10 = 0.5 + 0.0j
        a11 = -0.5 / k0
        for s in range(potentials.shape[0]):
            k = cmath.sqrt(energies[e] - potentials[s])
            kl = k * lengths[s]
            c = cmath.cos(kl)
            sk = cmath.sin(kl)
            t00 = c
            t01 = 1j * sk / k
            t10 = 1j * k * sk
            t11 = c
            b00 = a00 * t00 + a01 * t10
            b01 = a00 * t01 + a01 * t11
            b10 = a10 * t00 + a11 * t10
            b11 = a10 * t01 + a11 * t11
            a00, a01, a10, a11 = b00, b01, b10, b11
        out[e, 0, 0] = a00 + a01 * k0
        out[e, 0, 1] = a00 - a01 * k0
        out[e, 1, 0] = a10 + a11 * k0
        out[e, 1, 1] = a10 - a11 * k0
    return out


if USING_NUMBA:
    evolve_states_jit = njit(cache=True)(_evolve_states_loop)
    stack_entries_jit = njit(cache=True)(_stack_entries_loop)
    evolve_states = evolve_states_jit
    stack_entries = stack_entries_jit
else:
    evolve_states_jit = None
    stack_entries_jit = None
    evolve_states = evolve_states_numpy
    stack_entries = stack_entries_numpy
