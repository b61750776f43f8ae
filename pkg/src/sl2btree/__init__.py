"""Exact arithmetic on the Bruhat-Tits tree of SL2 over F_q((pi)).

Truncated Laurent-series arithmetic with explicit precision, the (q+1)-regular
tree of lattice classes with its boundary, classification of tree
automorphisms, the polynomial-entry lattices SL2(F_q[t]) and their principal
congruence subgroups, quotient graphs of groups with exact covolumes, and
cusp detection and contraction.
"""

from .errors import (
    DoesNotFixEnd,
    EndPrecisionExhausted,
    EqualEndsError,
    IndeterminateValuation,
    InsufficientPrecision,
    InvalidInputError,
    NonterminationGuard,
    NotFixingError,
    NotOnAxisError,
    NotTypePreserving,
    SizeGuardExceeded,
    Sl2BTreeError,
    UncertifiedTail,
)
from .field import Field, FieldElement, field
from .series import INFINITY, LaurentSeries
from .tree import (
    End,
    Line,
    RationalEnd,
    Tree,
    TruncatedEnd,
    UpEnd,
    Vertex,
    end_from_vector,
)
from .autom import (
    BorelDecomposition,
    Classification,
    TreeAutomorphism,
    UnipotentInfo,
    decompose_end_stabilizer,
    drift_along_end,
)
from .literals import (
    format_end,
    format_matrix,
    format_series,
    format_vertex,
    parse_end,
    parse_matrix,
    parse_series,
    parse_vertex,
)
from .lattice import (
    CongruenceLattice,
    CosetTable,
    CuspData,
    NagaoLattice,
    NotCuspidal,
    ReducedVertex,
    StabilizerGroup,
    UnknownCusp,
    lattice_from_config,
    stabilizer_bruteforce,
)
from .quotient import (
    CertifiedIndependent,
    CounterexamplePair,
    CovolumeResult,
    CuspsReport,
    FamilyCertificate,
    FreeProductReport,
    GraphOfGroups,
    GrowthProbe,
    QuotientEdge,
    QuotientVertex,
    RayTail,
    SymbolicCuspGroup,
    certify_independent_family,
    certify_independent_horoball,
    contract,
    covolume,
    covolume_partial_with_tail,
    cusps_report,
    free_product_report,
    growth_probe,
    quotient_graph,
)
from .verify import SUITES, SuiteResult, run_all, run_suite

__version__ = "0.1.0"

__all__ = [
    "BorelDecomposition",
    "CertifiedIndependent",
    "Classification",
    "CongruenceLattice",
    "CosetTable",
    "CounterexamplePair",
    "CovolumeResult",
    "CuspData",
    "CuspsReport",
    "DoesNotFixEnd",
    "End",
    "EndPrecisionExhausted",
    "EqualEndsError",
    "FamilyCertificate",
    "Field",
    "FieldElement",
    "FreeProductReport",
    "GraphOfGroups",
    "GrowthProbe",
    "INFINITY",
    "IndeterminateValuation",
    "InsufficientPrecision",
    "InvalidInputError",
    "LaurentSeries",
    "Line",
    "NagaoLattice",
    "NonterminationGuard",
    "NotCuspidal",
    "NotFixingError",
    "NotOnAxisError",
    "NotTypePreserving",
    "QuotientEdge",
    "QuotientVertex",
    "RationalEnd",
    "RayTail",
    "ReducedVertex",
    "SUITES",
    "SizeGuardExceeded",
    "Sl2BTreeError",
    "StabilizerGroup",
    "SuiteResult",
    "SymbolicCuspGroup",
    "Tree",
    "TreeAutomorphism",
    "TruncatedEnd",
    "UnipotentInfo",
    "UnknownCusp",
    "UpEnd",
    "UncertifiedTail",
    "Vertex",
    "certify_independent_family",
    "certify_independent_horoball",
    "contract",
    "covolume",
    "covolume_partial_with_tail",
    "cusps_report",
    "decompose_end_stabilizer",
    "drift_along_end",
    "end_from_vector",
    "field",
    "format_end",
    "format_matrix",
    "format_series",
    "format_vertex",
    "free_product_report",
    "growth_probe",
    "lattice_from_config",
    "parse_end",
    "parse_matrix",
    "parse_series",
    "parse_vertex",
    "quotient_graph",
    "run_all",
    "run_suite",
    "stabilizer_bruteforce",
]
