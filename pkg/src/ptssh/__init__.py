"""Hybrid SSH chain with an embedded PT-symmetric segment.

Spectra and edge states of the non-Hermitian chain, post-quench light-cone
transport with direction-dependent reflection, and a continuum
transfer-matrix model of the complex potential region.
"""

from ._kernels import USING_NUMBA
from .dynamics import (
    LightCone,
    QuenchProtocol,
    ReflectionSignal,
    front_speed,
    max_group_velocity,
    propagate_expm,
    propagate_spectral,
    reflection_signal,
    run_quench,
)
from .lattice import HybridChainSpec, build_hamiltonian, pt_symmetry_check
from .scatter import (
    PotentialSlab,
    PotentialStack,
    ReflectionSweep,
    ScatteringResult,
    TransferMatrix,
    default_energy_grid,
    reflection_sweep,
    scattering_matrix,
    slab_transfer,
    stack_transfer,
)
from .spectral import (
    BandSweepTable,
    EdgeStateReport,
    SpectralDecomposition,
    band_sweep,
    decompose,
    edge_overlap,
    edge_state_on_side,
    find_edge_states,
)

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "HybridChainSpec",
    "build_hamiltonian",
    "pt_symmetry_check",
    "SpectralDecomposition",
    "EdgeStateReport",
    "BandSweepTable",
    "decompose",
    "find_edge_states",
    "edge_state_on_side",
    "edge_overlap",
    "band_sweep",
    "QuenchProtocol",
    "LightCone",
    "ReflectionSignal",
    "propagate_expm",
    "propagate_spectral",
    "run_quench",
    "reflection_signal",
    "front_speed",
    "max_group_velocity",
    "PotentialSlab",
    "PotentialStack",
    "TransferMatrix",
    "ScatteringResult",
    "ReflectionSweep",
    "slab_transfer",
    "stack_transfer",
    "scattering_matrix",
    "reflection_sweep",
    "default_energy_grid",
    "__version__",
]
