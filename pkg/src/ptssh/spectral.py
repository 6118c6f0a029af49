"""Spectral analysis of the hybrid chain.

Eigenpairs of the non-Hermitian Hamiltonian with biorthonormalized left
vectors, detection and characterization of near-zero-energy edge states,
and sweeps of the complex spectrum across the topological transition.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .lattice import HybridChainSpec, build_hamiltonian

RESIDUAL_RTOL = 1e-9
DEFECTIVE_OVERLAP_TOL = 1e-10
EDGE_ENERGY_TOL = 1e-6
EDGE_WEIGHT_THRESHOLD = 0.5


@dataclass
class SpectralDecomposition:
    """Sorted eigensystem with right and optional biorthonormal left vectors.

    ``eigenvalues`` is sorted by (Re, Im); columns of ``right_eigenvectors``
    (unit 2-norm) and ``left_eigenvectors`` follow that order.  Left columns
    are scaled so ``vdot(left[:, f], right[:, f]) == 1`` except where
    ``defective`` is set, in which case the raw left column is kept: there
    the overlap underflowed and no biorthogonal normalization exists.
    """

    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray
    left_eigenvectors: np.ndarray | None
    defective: np.ndarray
    max_residual: float

    @property
    def dimension(self) -> int:
        return self.right_eigenvectors.shape[0]

    @property
    def any_defective(self) -> bool:
        return bool(self.defective.any())


@dataclass
class EdgeStateReport:
    """One near-zero-energy state and its spatial character.

    ``edge_weight`` is the probability fraction in the outer ``n_edge``
    sites at both ends combined; ``side`` is "delocalized" when that
    fraction is below threshold, else whichever end holds the majority of
    it.  ``amplitude`` keeps the site-resolved eigenvector for profile
    export.
    """

    index: int
    energy: complex
    side: str
    edge_weight: float
    ipr: float
    amplitude: np.ndarray


@dataclass
class BandSweepTable:
    """Full complex spectrum as a function of the intracell hopping.

    Rows are sorted by v; row ``i`` of ``eigenvalues`` is the sorted
    spectrum of ``base`` with ``v = v_values[i]``.  ``base`` carries the
    fixed w, onsite potential, and PT-region bounds.
    """

    v_values: np.ndarray
    eigenvalues: np.ndarray
    base: HybridChainSpec

    @property
    def max_abs_imag(self) -> np.ndarray:
        """Largest |Im E| per row; discriminates real-spectrum regimes."""
        return np.abs(self.eigenvalues.imag).max(axis=1)

    @property
    def min_abs_real(self) -> np.ndarray:
        """Smallest |Re E| per row; tracks the zero-energy edge modes."""
        return np.abs(self.eigenvalues.real).min(axis=1)


def _phase_fix(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude component is real positive."""
    k = int(np.argmax(np.abs(vec)))
    a = vec[k]
    if a == 0:
        return vec
    return vec * (abs(a) / a)


def decompose(h: np.ndarray, with_left: bool = True) -> SpectralDecomposition:
    """Full eigendecomposition of a general complex matrix.

    Eigenvalues come back sorted lexicographically by (Re, Im), right
    eigenvectors phase-fixed; a RuntimeError is raised if any residual
    ``|H r - E r|`` exceeds ``1e-9 * ||H||``.  With ``with_left``, left
    eigenvectors are biorthonormalized; pairs whose raw overlap is below
    the breakdown tolerance are flagged defective instead.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 2:
        raise ValueError(f"need a square matrix of dimension >= 2, got shape {h.shape}")

    if with_left:
        eigenvalues, vl, vr = scipy.linalg.eig(h, left=True, right=True)
    else:
        eigenvalues, vr = scipy.linalg.eig(h)
        vl = None

    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    eigenvalues = eigenvalues[order]
    vr = vr[:, order]
    if vl is not None:
        vl = vl[:, order]

    n = h.shape[0]
    h_norm = float(np.linalg.norm(h, 2))
    residuals = np.linalg.norm(h @ vr - vr * eigenvalues[None, :], axis=0)
    max_residual = float(residuals.max())
    if max_residual > RESIDUAL_RTOL * h_norm:
        raise RuntimeError(
            f"eigenpair residual {max_residual:.3e} exceeds "
            f"{RESIDUAL_RTOL:.0e} * ||H|| = {RESIDUAL_RTOL * h_norm:.3e} "
            f"(worst eigenvalue index {int(residuals.argmax())})"
        )

    defective = np.zeros(n, dtype=bool)
    for f in range(n):
        vr[:, f] = _phase_fix(vr[:, f])
        if vl is None:
            continue
        overlap = np.vdot(vl[:, f], vr[:, f])
        if abs(overlap) < DEFECTIVE_OVERLAP_TOL:
            defective[f] = True
        else:
            # afterwards vdot(left, right) == 1 for this pair
            vl[:, f] = vl[:, f] / np.conj(overlap)

    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        right_eigenvectors=vr,
        left_eigenvectors=vl,
        defective=defective,
        max_residual=max_residual,
    )


def _localize_degenerate_pair(pair: np.ndarray) -> np.ndarray:
    """Resolve a numerically degenerate two-state subspace onto the edges.

    When the zero-mode splitting underflows, the eigensolver returns an
    arbitrary mixture of the left- and right-localized states; any basis of
    the subspace is equally valid.  Diagonalizing the left-half projector
    restricted to the subspace picks the combinations of extremal left-half
    weight, which are the side-localized ones.
    """
    q, _ = np.linalg.qr(pair)
    n = q.shape[0]
    half = np.zeros(n)
    half[: n // 2] = 1.0
    m = q.conj().T @ (half[:, None] * q)
    m = 0.5 * (m + m.conj().T)
    _, rot = np.linalg.eigh(m)
    out = q @ rot
    for k in range(out.shape[1]):
        out[:, k] = _phase_fix(out[:, k])
    return out


def find_edge_states(
    dec: SpectralDecomposition,
    energy_tol: float = EDGE_ENERGY_TOL,
    n_edge: int = 10,
) -> list[EdgeStateReport]:
    """Reports for every state with |E| <= energy_tol.

    A state is "delocalized" when less than half its probability sits in
    the outer ``n_edge`` sites at the two ends combined; otherwise its side
    is whichever end holds the larger share.  Output order: left states,
    then right, then delocalized, each by ascending eigenvalue index.
    An empty list is not an error (post-transition regime).
    """
    sel = np.flatnonzero(np.abs(dec.eigenvalues) <= energy_tol)
    n_sites = dec.dimension
    amps = dec.right_eigenvectors[:, sel].copy()

    if sel.size == 2:
        gap = abs(dec.eigenvalues[sel[0]] - dec.eigenvalues[sel[1]])
        if gap <= energy_tol:
            # pairing of the rotated states to the two (equal within tol)
            # eigenvalues is arbitrary; fixed by ascending index
            amps = _localize_degenerate_pair(amps)

    reports = []
    for k in range(sel.size):
        psi = amps[:, k]
        prob = np.abs(psi) ** 2
        total = prob.sum()
        left_w = prob[:n_edge].sum() / total
        right_w = prob[n_sites - n_edge:].sum() / total
        edge_weight = left_w + right_w
        ipr = float((prob**2).sum() / total**2)
        if edge_weight < EDGE_WEIGHT_THRESHOLD:
            side = "delocalized"
        elif left_w >= right_w:
            side = "left"
        else:
            side = "right"
        reports.append(EdgeStateReport(
            index=int(sel[k]),
            energy=complex(dec.eigenvalues[sel[k]]),
            side=side,
            edge_weight=float(edge_weight),
            ipr=ipr,
            amplitude=psi,
        ))

    rank = {"left": 0, "right": 1, "delocalized": 2}
    reports.sort(key=lambda r: (rank[r.side], r.index))
    return reports


def edge_state_on_side(
    dec: SpectralDecomposition,
    side: str,
    energy_tol: float = EDGE_ENERGY_TOL,
    n_edge: int = 10,
) -> EdgeStateReport:
    """The unique edge state on the requested side, or a ValueError."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    hits = [r for r in find_edge_states(dec, energy_tol, n_edge) if r.side == side]
    if len(hits) != 1:
        raise ValueError(
            f"expected exactly one edge state on the {side} side, found {len(hits)}"
        )
    return hits[0]


def edge_overlap(
    dec_hybrid: SpectralDecomposition,
    dec_plain: SpectralDecomposition,
    side: str,
) -> float:
    """Overlap magnitude between same-side edge states of two chains.

    Both vectors are unit-normalized, so the result lies in [0, 1] and is
    symmetric in the two decompositions and insensitive to global phases.
    """
    if dec_hybrid.dimension != dec_plain.dimension:
        raise ValueError(
            f"chains differ in size: {dec_hybrid.dimension} vs {dec_plain.dimension}"
        )
    a = edge_state_on_side(dec_hybrid, side).amplitude
    b = edge_state_on_side(dec_plain, side).amplitude
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(abs(np.vdot(a, b)))


def _sweep_point(spec: HybridChainSpec) -> np.ndarray:
    try:
        return decompose(build_hamiltonian(spec), with_left=False).eigenvalues
    except Exception as exc:
        raise RuntimeError(f"decomposition failed at v={spec.v}") from exc


def band_sweep(
    base: HybridChainSpec,
    v_values,
    threads: int = 1,
) -> BandSweepTable:
    """Spectrum of ``base`` at each intracell hopping in ``v_values``.

    Rows come back sorted by v regardless of input order.  ``threads > 1``
    distributes the independent diagonalizations over a thread pool with
    results identical to the serial path.
    """
    v_values = np.sort(np.asarray(v_values, dtype=np.float64))
    if v_values.size == 0:
        raise ValueError("v_values must be nonempty")
    if not np.all(np.isfinite(v_values)):
        raise ValueError("v_values must all be finite")
    specs = [base.with_v(float(v)) for v in v_values]

    if threads > 1 and len(specs) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_point, specs))
    else:
        rows = [_sweep_point(s) for s in specs]

    return BandSweepTable(
        v_values=v_values,
        eigenvalues=np.vstack(rows),
        base=base,
    )
