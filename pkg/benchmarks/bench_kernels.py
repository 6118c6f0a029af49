"""Time the jitted kernels against their pure-numpy twins.

Run as a script::

    python benchmarks/bench_kernels.py [--sites 220] [--steps 600]
                                       [--energies 400] [--repeats 5]

Both code paths are imported directly, so the comparison does not depend
on the PTSSH_NO_NUMBA flag.  The jitted rows are skipped when numba is
not importable.
"""

import argparse
import time

import numpy as np
from scipy.linalg import expm

from ptssh import _kernels
from ptssh.lattice import HybridChainSpec, build_hamiltonian
from ptssh.scatter import PotentialStack


def best_of(fn, repeats):
    timings = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - t0)
    return min(timings)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sites", type=int, default=220)
    parser.add_argument("--steps", type=int, default=600)
    parser.add_argument("--energies", type=int, default=400)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    spec = HybridChainSpec(n_sites=args.sites, v=0.5, w=0.4, u_re=-0.3,
                           u_im=0.1, pt_first_site=args.sites // 2 - 9,
                           pt_last_site=args.sites // 2 + 10)
    h = build_hamiltonian(spec)
    dt = 0.55
    u_step = expm(-1j * h * dt)
    psi0 = np.zeros(args.sites, dtype=np.complex128)
    psi0[0] = 1.0

    stack = PotentialStack.alternating(10, 6.0, 10.0, -0.3, 0.1)
    energies = np.logspace(np.log10(0.02), np.log10(5.0), args.energies)
    potentials = stack.potentials
    lengths = stack.lengths

    rows = []

    t_np = best_of(lambda: _kernels.evolve_states_numpy(
        u_step, psi0, args.steps, 1), args.repeats)
    rows.append(("evolve_states", "numpy", t_np, 1.0))
    if _kernels.evolve_states_jit is not None:
        _kernels.evolve_states_jit(u_step, psi0, 2, 1)  # compile outside timing
        t_jit = best_of(lambda: _kernels.evolve_states_jit(
            u_step, psi0, args.steps, 1), args.repeats)
        rows.append(("evolve_states", "numba", t_jit, t_np / t_jit))

    t_np = best_of(lambda: _kernels.stack_entries_numpy(
        potentials, lengths, energies), args.repeats)
    rows.append(("stack_entries", "numpy", t_np, 1.0))
    if _kernels.stack_entries_jit is not None:
        _kernels.stack_entries_jit(potentials, lengths, energies[:2])
        t_jit = best_of(lambda: _kernels.stack_entries_jit(
            potentials, lengths, energies), args.repeats)
        rows.append(("stack_entries", "numba", t_jit, t_np / t_jit))

    print(f"{'kernel':<16}{'path':<8}{'best [ms]':>12}{'speedup':>10}")
    for kernel, path, secs, speedup in rows:
        print(f"{kernel:<16}{path:<8}{secs * 1e3:>12.3f}{speedup:>10.2f}")
    if _kernels.evolve_states_jit is None:
        print("numba unavailable; jitted rows skipped")


if __name__ == "__main__":
    main()
