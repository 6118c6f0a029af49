"""Post-quench evolution of edge states and transport diagnostics.

An edge state of the pre-quench chain is evolved under the post-quench
Hamiltonian; the resulting probability field gives light-cone maps,
end-site reflection signals, and a front-speed estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .lattice import HybridChainSpec, build_hamiltonian
from .spectral import SpectralDecomposition, decompose, edge_state_on_side

DIP_THRESHOLD_FRACTION = 0.01
FRONT_EDGE_FRACTION = 0.01
DEFAULT_TIME_STEPS = 600
# keep the expm argument within the Pade sweet spot; one grid step is split
# into substeps whenever ||H||*dt exceeds this
MAX_STEP_NORM = 16.0


def max_group_velocity(v: float, w: float) -> float:
    """Largest group speed of the bulk dispersion, in sites per unit time.

    The two-band dispersion E(k) = |v + w e^{ik}| has max |dE/dk| =
    v*w/max(v,w) = min(v,w) in cell units; a cell is two sites.
    """
    v, w = abs(v), abs(w)
    if v == 0.0 or w == 0.0:
        return 0.0
    return 2.0 * min(v, w)


def _default_t_max(post_spec: HybridChainSpec) -> float:
    speed = max_group_velocity(post_spec.v, post_spec.w)
    if speed == 0.0:
        raise ValueError(
            "post-quench chain has zero group velocity; t_max cannot be derived"
        )
    return 1.2 * post_spec.n_sites / speed


@dataclass(frozen=True)
class QuenchProtocol:
    """Sudden hopping change applied to one edge state of the pre chain.

    ``t_max`` defaults to 1.2 * n_sites / (post-quench front speed), long
    enough for a mid-chain reflection to travel back to the starting edge.
    ``n_time_steps`` counts evolution steps; the grid has one more sample.
    """

    pre_spec: HybridChainSpec
    post_spec: HybridChainSpec
    initial_side: str = "left"
    t_max: float = 0.0  # 0 means: derive from post_spec
    n_time_steps: int = DEFAULT_TIME_STEPS

    def __post_init__(self):
        if self.initial_side not in ("left", "right"):
            raise ValueError(
                f"initial_side must be 'left' or 'right', got {self.initial_side!r}"
            )
        if self.pre_spec.n_sites != self.post_spec.n_sites:
            raise ValueError("pre and post chains must have the same length")
        if (self.pre_spec.pt_first_site != self.post_spec.pt_first_site
                or self.pre_spec.pt_last_site != self.post_spec.pt_last_site):
            raise ValueError("pre and post chains must share the PT-region bounds")
        if self.n_time_steps < 1:
            raise ValueError(f"n_time_steps must be positive, got {self.n_time_steps}")
        if self.t_max < 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.t_max == 0.0:
            object.__setattr__(self, "t_max", _default_t_max(self.post_spec))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_time_steps + 1)


@dataclass
class LightCone:
    """Raw probability density over the (time x site) grid.

    ``density[i, j] = |psi_j(times[i])|^2`` with no renormalization;
    ``norm_series`` tracks the total per time, which non-Hermitian
    evolution need not conserve.
    """

    times: np.ndarray
    density: np.ndarray
    norm_series: np.ndarray
    protocol: QuenchProtocol = field(repr=False)


@dataclass
class ReflectionSignal:
    """Density history at one end site with its dip and re-emergence.

    ``dip_interval`` brackets the first window where the density stays
    below the dip threshold after the initial decay; ``reemergence_peak``
    is the largest density seen after that window closes.
    """

    site: int
    times: np.ndarray
    values: np.ndarray
    dip_interval: tuple[float, float]
    reemergence_peak: float


def _check_times(times: np.ndarray) -> float:
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need at least two time samples")
    if times[0] != 0.0:
        raise ValueError(f"time grid must start at 0, got {times[0]}")
    dt = times[1] - times[0]
    if dt <= 0 or not np.allclose(np.diff(times), dt, rtol=1e-9, atol=1e-12):
        raise ValueError("time grid must be uniform and ascending")
    return float(dt)


def propagate_expm(h: np.ndarray, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Evolve psi0 on a uniform time grid via the matrix exponential.

    Ground truth for any complex H, exceptional points included: the
    one-step propagator exp(-i H dt) is computed once by scaling-and-
    squaring and applied repeatedly.  Steps with large ||H||*dt are split
    into substeps rather than silently losing accuracy.  Returns an
    ``(n_times, n)`` array whose first row is psi0.
    """
    h = np.asarray(h, dtype=np.complex128)
    psi0 = np.asarray(psi0, dtype=np.complex128)
    times = np.asarray(times, dtype=np.float64)
    norm0 = np.linalg.norm(psi0)
    if abs(norm0 - 1.0) > 1e-9:
        raise ValueError(f"psi0 must be unit-normalized, got norm {norm0}")
    dt = _check_times(times)

    h_norm = float(np.linalg.norm(h, 1))
    substeps = max(1, math.ceil(h_norm * dt / MAX_STEP_NORM))
    u_step = scipy.linalg.expm(-1j * h * (dt / substeps))
    return _kernels.evolve_states(u_step, psi0, times.size - 1, substeps)


def propagate_spectral(
    dec: SpectralDecomposition,
    psi0: np.ndarray,
    times: np.ndarray,
) -> np.ndarray:
    """Evolve psi0 by biorthogonal spectral expansion.

    psi(t) = sum_f exp(-i E_f t) psi_f <L_f|psi0>, with the coefficients
    taken against the biorthonormalized left eigenvectors.  Refuses
    decompositions with defective pairs, where the expansion does not
    exist; use propagate_expm there.
    """
    if dec.left_eigenvectors is None:
        raise ValueError("decomposition lacks left eigenvectors; rerun with with_left")
    if dec.any_defective:
        raise ValueError(
            "decomposition has defective eigenvalue pairs; the biorthogonal "
            "expansion breaks down there, use propagate_expm instead"
        )
    psi0 = np.asarray(psi0, dtype=np.complex128)
    times = np.asarray(times, dtype=np.float64)
    coeffs = dec.left_eigenvectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, dec.eigenvalues))
    return (phases * coeffs[None, :]) @ dec.right_eigenvectors.T


def run_quench(protocol: QuenchProtocol) -> LightCone:
    """Evolve the selected pre-quench edge state under the post-quench chain."""
    pre_dec = decompose(build_hamiltonian(protocol.pre_spec), with_left=False)
    try:
        edge = edge_state_on_side(pre_dec, protocol.initial_side)
    except ValueError as exc:
        raise ValueError(
            f"pre-quench chain (v={protocol.pre_spec.v}, w={protocol.pre_spec.w}) "
            f"hosts no {protocol.initial_side} edge state"
        ) from exc

    psi0 = edge.amplitude / np.linalg.norm(edge.amplitude)
    times = protocol.times
    states = propagate_expm(build_hamiltonian(protocol.post_spec), psi0, times)
    density = np.abs(states) ** 2
    return LightCone(
        times=times,
        density=density,
        norm_series=density.sum(axis=1),
        protocol=protocol,
    )


def reflection_signal(cone: LightCone, site: int) -> ReflectionSignal:
    """Density history at an end site, with dip window and re-emergence peak.

    The dip starts when the density first falls below 1% of its initial
    value and ends when it first recovers above that threshold; the peak is
    the maximum after the dip closes.  A signal that never leaves its
    initial level marks a non-transporting protocol and is an error.
    """
    n_sites = cone.density.shape[1]
    if site not in (1, n_sites):
        raise ValueError(f"site must be an end site (1 or {n_sites}), got {site}")
    values = cone.density[:, site - 1]
    times = cone.times
    threshold = DIP_THRESHOLD_FRACTION * values[0]

    below = values < threshold
    if not below.any():
        raise ValueError(
            "non-transporting protocol: end-site density never drops below "
            "the dip threshold"
        )
    # the dip is the LONGEST below-threshold window: brief oscillation dips
    # during the initial decay must not shadow the quiet transit window
    edges = np.diff(below.astype(np.int8))
    starts = np.flatnonzero(edges == 1) + 1
    ends = np.flatnonzero(edges == -1)
    if below[0]:
        starts = np.concatenate(([0], starts))
    if below[-1]:
        ends = np.concatenate((ends, [below.size - 1]))
    longest = int(np.argmax(ends - starts))
    i_start, i_end = int(starts[longest]), int(ends[longest])
    if i_end + 1 < values.size:
        i_end += 1  # first sample back above threshold closes the dip
        peak = float(values[i_end:].max())
    else:
        peak = 0.0

    return ReflectionSignal(
        site=site,
        times=times,
        values=values,
        dip_interval=(float(times[i_start]), float(times[i_end])),
        reemergence_peak=peak,
    )


def front_speed(cone: LightCone) -> float:
    """Speed of the leading density edge, in sites per unit time.

    The edge position at each time is the outermost site where the
    cumulative (renormalized) density from the far end still exceeds 1%;
    a straight line is fitted over the window where the front is in
    transit, which must span at least 10 samples.
    """
    density = cone.density
    n_times, n_sites = density.shape
    norms = density.sum(axis=1)
    prob = density / norms[:, None]

    # orient so the front always travels toward increasing site index
    if cone.protocol.initial_side == "right":
        prob = prob[:, ::-1]

    tail = np.cumsum(prob[:, ::-1], axis=1)[:, ::-1]
    exceeds = tail > FRONT_EDGE_FRACTION
    # argmax on a reversed boolean row finds its last True
    edge_pos = n_sites - 1 - np.argmax(exceeds[:, ::-1], axis=1)

    start0 = int(edge_pos[0])
    in_transit = (edge_pos > start0 + 2) & (edge_pos < n_sites - 3)
    window = np.flatnonzero(in_transit)
    if window.size == 0:
        raise ValueError("non-transporting protocol: the density front never departs")
    # keep the first contiguous run; after the front arrives, positions saturate
    breaks = np.flatnonzero(np.diff(window) > 1)
    if breaks.size:
        window = window[: breaks[0] + 1]
    if window.size < 10:
        raise ValueError(
            f"front fit window has {window.size} samples, need at least 10"
        )
    slope = np.polyfit(cone.times[window], edge_pos[window].astype(float), 1)[0]
    return float(abs(slope))
