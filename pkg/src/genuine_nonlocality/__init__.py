"""Construction and certification of genuinely nonlocal sets of orthogonal product states."""

from .constructors import (
    Block,
    CompositionPlan,
    UflUnitary,
    bipartite_boundary_set,
    chain_plan,
    compose_chain,
    compose_general,
    compose_star,
    compose_tristar,
    down_extension,
    fourier,
    hadamard,
    pad,
    random_ufl,
    resolve_unitary,
    star_plan,
    synthesize,
    tripartite_plan,
    tripartite_set,
    tristar_plan,
    ufl_check,
    up_extension,
)
from .errors import (
    BudgetError,
    DomainError,
    InputError,
    NeedsExternalSeed,
    NonlocalityError,
    PlanError,
    ShapeError,
)
from .partition_graph import Bipartition, bipartitions, build_graph, is_connected
from .planfile import read_plan, write_plan
from .states import (
    OrderedBasis,
    ProductState,
    StateSet,
    apply_basis,
    assemble,
    basis_vector,
    inner_product,
    read_state_set,
    write_state_set,
)
from .verifier import (
    Certificate,
    Verdict,
    certify,
    certify_set,
    check_orthogonality,
    direct_sweep,
    opm_space,
    render_markdown,
)

__all__ = [
    "apply_basis",
    "assemble",
    "basis_vector",
    "bipartite_boundary_set",
    "Bipartition",
    "bipartitions",
    "Block",
    "BudgetError",
    "build_graph",
    "Certificate",
    "certify",
    "certify_set",
    "chain_plan",
    "check_orthogonality",
    "compose_chain",
    "compose_general",
    "compose_star",
    "compose_tristar",
    "CompositionPlan",
    "direct_sweep",
    "DomainError",
    "down_extension",
    "fourier",
    "hadamard",
    "inner_product",
    "InputError",
    "is_connected",
    "NeedsExternalSeed",
    "NonlocalityError",
    "opm_space",
    "OrderedBasis",
    "pad",
    "PlanError",
    "ProductState",
    "random_ufl",
    "read_plan",
    "read_state_set",
    "render_markdown",
    "resolve_unitary",
    "ShapeError",
    "star_plan",
    "StateSet",
    "synthesize",
    "tripartite_plan",
    "tripartite_set",
    "tristar_plan",
    "ufl_check",
    "UflUnitary",
    "up_extension",
    "Verdict",
    "write_plan",
    "write_state_set",
]

__version__ = "0.1.0"
