"""Continuum transfer-matrix model of the complex potential region.

Piecewise-constant complex potential slabs, their 2x2 transfer matrices,
the transfer-to-scattering conversion, and reflection/transmission sweeps
over energy.  Units: hbar^2/2m = 1, so a slab's interior wavevector is
k = sqrt(E - V) on the principal branch.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

SIGMA_TOL = 1e-14


@dataclass(frozen=True)
class PotentialSlab:
    """One uniform slab: complex potential value and positive length."""

    v_complex: complex
    length: float

    def __post_init__(self):
        if not (self.length > 0) or not np.isfinite(self.length):
            raise ValueError(f"slab length must be finite and positive, got {self.length}")
        if not np.isfinite(self.v_complex.real) or not np.isfinite(self.v_complex.imag):
            raise ValueError("slab potential must be finite")


@dataclass(frozen=True)
class PotentialStack:
    """Ordered slab sequence; ``n_blocks`` counts repetitions of an AB unit."""

    slabs: tuple[PotentialSlab, ...]
    n_blocks: int = 0

    @classmethod
    def alternating(cls, n_blocks: int, l_a: float, l_b: float,
                    u_re: float, u_im: float) -> "PotentialStack":
        """n_blocks repetitions of [A-slab(u_re - i*u_im, l_a), B-slab(u_re + i*u_im, l_b)]."""
        if n_blocks < 0:
            raise ValueError(f"n_blocks must be >= 0, got {n_blocks}")
        a = PotentialSlab(complex(u_re, -u_im), l_a)
        b = PotentialSlab(complex(u_re, +u_im), l_b)
        return cls(slabs=(a, b) * n_blocks, n_blocks=n_blocks)

    def reversed(self) -> "PotentialStack":
        return PotentialStack(slabs=self.slabs[::-1], n_blocks=self.n_blocks)

    @property
    def potentials(self) -> np.ndarray:
        return np.array([s.v_complex for s in self.slabs], dtype=np.complex128)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.slabs], dtype=np.float64)


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 transfer matrix [[alpha, beta], [gamma, sigma]].

    For full-stack matrices the basis is (right-moving, left-moving)
    plane-wave amplitudes in the free outer regions; single-slab matrices
    propagate the boundary-value pair (psi, -i psi') across the slab.
    """

    alpha: complex
    beta: complex
    gamma: complex
    sigma: complex

    @classmethod
    def from_array(cls, m: np.ndarray) -> "TransferMatrix":
        return cls(alpha=complex(m[0, 0]), beta=complex(m[0, 1]),
                   gamma=complex(m[1, 0]), sigma=complex(m[1, 1]))

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.alpha, self.beta], [self.gamma, self.sigma]],
                        dtype=np.complex128)

    @property
    def det(self) -> complex:
        return self.alpha * self.sigma - self.beta * self.gamma


@dataclass(frozen=True)
class ScatteringResult:
    """S-matrix entries and derived coefficients at one energy.

    s11 and s22 are the left and right reflection amplitudes; r_left,
    r_right, and transmission are their squared magnitudes.
    """

    energy: float
    s11: complex
    s12: complex
    s21: complex
    s22: complex

    @property
    def r_left(self) -> float:
        return abs(self.s11) ** 2

    @property
    def r_right(self) -> float:
        return abs(self.s22) ** 2

    @property
    def transmission(self) -> float:
        return abs(self.s21) ** 2


@dataclass
class ReflectionSweep:
    """Per-energy scattering results plus the energies that failed.

    ``failures`` holds (energy, reason) pairs for energies where the
    pipeline broke down (degenerate slab wavevector, vanishing sigma);
    they are reported rather than aborting the sweep.
    """

    results: list[ScatteringResult]
    failures: list[tuple[float, str]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.results)

    def __len__(self) -> int:
        return len(self.results)


def slab_transfer(slab: PotentialSlab, energy: float) -> TransferMatrix:
    """Transfer matrix of one uniform slab at a real energy.

    Propagates (psi, -i psi') across the slab:
    [[cos kL, i sin(kL)/k], [i k sin kL, cos kL]] with k = sqrt(E - V) on
    the principal branch.  The entries are even in k, so the branch choice
    cannot affect the result; det is identically 1.
    """
    dk2 = complex(energy) - complex(slab.v_complex)
    if dk2 == 0:
        raise ValueError(
            f"energy {energy} equals the slab potential exactly; the slab "
            f"wavevector vanishes and the transfer matrix is degenerate"
        )
    k = cmath.sqrt(dk2)
    kl = k * slab.length
    c = cmath.cos(kl)
    s = cmath.sin(kl)
    return TransferMatrix(alpha=c, beta=1j * s / k, gamma=1j * k * s, sigma=c)


def _check_slab_energies(stack: PotentialStack, energy: float) -> None:
    for i, slab in enumerate(stack.slabs):
        if complex(energy) - complex(slab.v_complex) == 0:
            raise ValueError(
                f"energy {energy} equals the potential of slab {i} exactly"
            )


def stack_transfer(stack: PotentialStack, energy: float) -> TransferMatrix:
    """Whole-stack transfer matrix between outer plane-wave amplitudes.

    The product runs output side first: inverse right free-region basis
    matrix, then the slab matrices in stack order, then the left basis
    matrix, all at outer wavevector k0 = sqrt(energy).  An empty stack
    gives the identity.
    """
    if not (energy > 0):
        raise ValueError(
            f"energy must be > 0 for propagating outer waves, got {energy}"
        )
    _check_slab_energies(stack, energy)
    entries = _kernels.stack_entries(
        stack.potentials, stack.lengths, np.array([energy], dtype=np.float64)
    )
    return TransferMatrix.from_array(entries[0])


def scattering_matrix(t: TransferMatrix, energy: float = float("nan")) -> ScatteringResult:
    """Convert a transfer matrix to the scattering matrix.

    S = [[-gamma/sigma, 1/sigma], [alpha - beta*gamma/sigma, beta/sigma]].
    A vanishing sigma means the conversion is singular (a resonance of the
    amplifying stack) and raises.
    """
    if abs(t.sigma) < SIGMA_TOL:
        raise ValueError(
            f"transfer matrix has |sigma| = {abs(t.sigma):.3e} < {SIGMA_TOL:.0e} "
            f"at energy {energy}; scattering matrix is singular"
        )
    inv_sigma = 1.0 / t.sigma
    return ScatteringResult(
        energy=float(energy),
        s11=-t.gamma * inv_sigma,
        s12=inv_sigma,
        s21=t.alpha - t.beta * t.gamma * inv_sigma,
        s22=t.beta * inv_sigma,
    )


def reflection_sweep(stack: PotentialStack, energies) -> ReflectionSweep:
    """Scattering results over an energy grid, batched over energies.

    Per-energy breakdowns (degenerate slab wavevector, vanishing sigma)
    are collected into ``failures`` instead of aborting; results keep the
    input energy order.
    """
    energies = np.asarray(energies, dtype=np.float64)
    if energies.size == 0:
        raise ValueError("energy grid must be nonempty")
    if not np.all(energies > 0):
        raise ValueError("all sweep energies must be > 0")

    potentials = stack.potentials
    lengths = stack.lengths

    # energies that collide with a real slab potential would divide by zero
    # inside the kernel; route them to the failure list up front
    degenerate = np.zeros(energies.size, dtype=bool)
    for slab in stack.slabs:
        if slab.v_complex.imag == 0:
            degenerate |= energies == slab.v_complex.real

    good = np.flatnonzero(~degenerate)
    entries = _kernels.stack_entries(potentials, lengths, energies[good])

    results: list[ScatteringResult] = []
    failures: list[tuple[float, str]] = []
    by_index = {int(g): entries[j] for j, g in enumerate(good)}
    for i, energy in enumerate(energies):
        if degenerate[i]:
            failures.append((float(energy), "energy equals a slab potential exactly"))
            continue
        t = TransferMatrix.from_array(by_index[i])
        try:
            results.append(scattering_matrix(t, float(energy)))
        except ValueError as exc:
            failures.append((float(energy), str(exc)))
    return ReflectionSweep(results=results, failures=failures)


def default_energy_grid(e_min: float = 0.02, e_max: float = 5.0,
                        count: int = 400) -> np.ndarray:
    """Logarithmic energy grid covering the asymmetric window and both limits."""
    if not (0 < e_min < e_max) or count < 2:
        raise ValueError("need 0 < e_min < e_max and count >= 2")
    return np.logspace(np.log10(e_min), np.log10(e_max), count)
