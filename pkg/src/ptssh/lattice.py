"""Hybrid SSH chain: a PT-symmetric segment embedded in a Hermitian chain.

The chain alternates A and B sites (site 1 is an A site), with intracell
hopping ``v`` on A-B bonds and intercell hopping ``w`` on B-A bonds.  Inside
the PT segment, A sites carry the onsite potential ``u_re - i*u_im`` and B
sites the conjugate ``u_re + i*u_im``; everywhere else the diagonal is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class HybridChainSpec:
    """Full parameterization of the hybrid open chain.

    Site indices are 1-based; ``pt_first_site``/``pt_last_site`` bound the
    PT segment inclusively and must cover whole unit cells (odd first site,
    even last site) so the segment holds equal numbers of A and B sites.
    """

    n_sites: int
    v: float
    w: float
    u_re: float = 0.0
    u_im: float = 0.0
    pt_first_site: int = 1
    pt_last_site: int = 2

    def __post_init__(self):
        if self.n_sites < 2 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be a positive even integer, got {self.n_sites}")
        if not (1 <= self.pt_first_site <= self.pt_last_site <= self.n_sites):
            raise ValueError(
                f"PT segment [{self.pt_first_site}, {self.pt_last_site}] is not "
                f"within [1, {self.n_sites}]"
            )
        if self.pt_first_site % 2 == 0:
            raise ValueError(
                f"pt_first_site must be odd (an A site), got {self.pt_first_site}"
            )
        if self.pt_last_site % 2 != 0:
            raise ValueError(
                f"pt_last_site must be even (a B site), got {self.pt_last_site}"
            )
        if self.u_im < 0:
            raise ValueError(f"u_im must be >= 0, got {self.u_im}")
        for name in ("v", "w", "u_re", "u_im"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def n_pt_cells(self) -> int:
        return (self.pt_last_site - self.pt_first_site + 1) // 2

    def with_v(self, v: float) -> "HybridChainSpec":
        """Same chain with a different intracell hopping."""
        return replace(self, v=v)

    def hermitian_counterpart(self) -> "HybridChainSpec":
        """Same chain with the onsite potential switched off entirely."""
        return replace(self, u_re=0.0, u_im=0.0)


def build_hamiltonian(spec: HybridChainSpec) -> np.ndarray:
    """Dense complex Hamiltonian of the hybrid chain.

    The matrix is tridiagonal: off-diagonals alternate v, w, v, w, ...
    starting with v, and the diagonal is ``u_re -/+ i*u_im`` on A/B sites of
    the PT segment, zero outside.  With ``u_im = 0`` the result is exactly
    Hermitian.
    """
    n = spec.n_sites
    h = np.zeros((n, n), dtype=np.complex128)

    hop = np.empty(n - 1, dtype=np.complex128)
    hop[0::2] = spec.v
    hop[1::2] = spec.w
    idx = np.arange(n - 1)
    h[idx, idx + 1] = hop
    h[idx + 1, idx] = hop

    lo = spec.pt_first_site - 1
    hi = spec.pt_last_site  # exclusive
    sites = np.arange(lo, hi)
    onsite = np.where(sites % 2 == 0,  # 0-based even = A site
                      spec.u_re - 1j * spec.u_im,
                      spec.u_re + 1j * spec.u_im)
    h[sites, sites] = onsite
    return h


def pt_symmetry_check(h: np.ndarray, spec: HybridChainSpec, atol: float = 1e-12) -> bool:
    """Check PT invariance of the embedded segment.

    Restricted to the PT block, parity is the site-reversal about the
    segment center and time reversal is complex conjugation; the block must
    be reproduced by conjugating and reversing it.
    """
    lo = spec.pt_first_site - 1
    hi = spec.pt_last_site
    block = h[lo:hi, lo:hi]
    transformed = np.conj(block[::-1, ::-1])
    return bool(np.allclose(transformed, block, rtol=0.0, atol=atol))
