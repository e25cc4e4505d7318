"""qgraph: spectra, exact Green functions, and regularized vacuum energies
for one-dimensional metric graphs."""

from .casimir import (
    CasimirResult,
    Method,
    RegularizationConfig,
    casimir_green_method,
    casimir_integrand,
    casimir_mode_sum,
    cavity_amplitudes,
    extrapolate_tau,
    geometric_taus,
    reflection_at_infinity,
)
from .errors import (
    ExtrapolationError,
    GraphFormatError,
    InputError,
    InsufficientSpectrumError,
    NumericalError,
    PoleProximityError,
    QGraphError,
    ResonantBondError,
    SingularWavenumberError,
    UnsupportedTopologyError,
)
from .graph import (
    DIRICHLET,
    KIRCHHOFF,
    Bond,
    CouplingKind,
    Graph,
    Lead,
    VertexCoupling,
    delta,
    emit_graph,
    parse_graph,
    total_length,
    validate,
)
from .greens import (
    GreenDecomposition,
    bond_wavefunction,
    free_green,
    star_green,
    trace_gamma,
    two_vertex_green,
)
from .scattering import (
    CompositeAmplitudes,
    RTPair,
    VertexSMatrix,
    build_vertex_smatrix,
    composite_amplitudes,
    vertex_reflection_transmission,
)
from .spectrum import (
    SpectrumResult,
    dirichlet_eigenvalues,
    find_eigenvalues,
    secular_function,
    weyl_count,
)

__version__ = "0.1.0"

__all__ = [
    "Bond",
    "CasimirResult",
    "CompositeAmplitudes",
    "CouplingKind",
    "DIRICHLET",
    "ExtrapolationError",
    "Graph",
    "GraphFormatError",
    "GreenDecomposition",
    "InputError",
    "InsufficientSpectrumError",
    "KIRCHHOFF",
    "Lead",
    "Method",
    "NumericalError",
    "PoleProximityError",
    "QGraphError",
    "RTPair",
    "RegularizationConfig",
    "ResonantBondError",
    "SingularWavenumberError",
    "SpectrumResult",
    "UnsupportedTopologyError",
    "VertexCoupling",
    "VertexSMatrix",
    "bond_wavefunction",
    "build_vertex_smatrix",
    "casimir_green_method",
    "casimir_integrand",
    "casimir_mode_sum",
    "cavity_amplitudes",
    "composite_amplitudes",
    "delta",
    "dirichlet_eigenvalues",
    "emit_graph",
    "extrapolate_tau",
    "find_eigenvalues",
    "free_green",
    "geometric_taus",
    "parse_graph",
    "reflection_at_infinity",
    "secular_function",
    "star_green",
    "total_length",
    "trace_gamma",
    "two_vertex_green",
    "validate",
    "vertex_reflection_transmission",
    "weyl_count",
]
