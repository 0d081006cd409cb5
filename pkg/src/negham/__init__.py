"""Post-quench entanglement and negativity Hamiltonians for free-fermion chains.

Three layers: a quasiparticle predictor (negham.qp), an exact Gaussian
lattice engine (negham.gaussian), and dense Fock-space oracles
(negham.oracles), glued by shared domain types (negham.core) and a CLI
(negham.cli).
"""

__version__ = "0.1.0"

from .core import (
    Dispersion,
    OccupationFunction,
    PhaseFunction,
    TripartiteGeometry,
    NumericalError,
    binary_entropy,
    clip_filling,
    constant_occupation,
    dimer_occupation,
    dimer_state,
    entanglement_energy,
    hopping_dispersion,
    midpoint_kgrid,
    pair_log_moment,
)

__all__ = [
    "Dispersion",
    "OccupationFunction",
    "PhaseFunction",
    "TripartiteGeometry",
    "NumericalError",
    "binary_entropy",
    "clip_filling",
    "constant_occupation",
    "dimer_occupation",
    "dimer_state",
    "entanglement_energy",
    "hopping_dispersion",
    "midpoint_kgrid",
    "pair_log_moment",
    "__version__",
]
