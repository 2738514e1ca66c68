"""Trial-and-error constraint satisfaction toolkit."""
from .core import (
    EXCEPTION,
    NO,
    AdmissibleSet,
    BackendContractError,
    Constraint,
    CspError,
    CspParams,
    InputError,
    Instance,
    PreconditionError,
    ProtocolError,
    Relation,
    ResourceError,
    Verdict,
    brute_force_solve,
    eval_relation,
    make_instance,
    project_admissible,
    violations,
)
from .closures import (
    ExtendedRelation,
    UnionRelation,
    dim_union,
    eval_extended,
    extend,
    extend_over_set,
    union_closure,
)
from .oracles import YES, RevealLevel, Violation, make_fixed_oracle, make_lazy_oracle, submit
from .transfer import (
    reverse_extension_via_hidden,
    reverse_union_via_hidden,
    reverse_unionx_via_hidden,
    solve_hidden_empty,
    solve_hidden_r,
    solve_hidden_rv,
    solve_hidden_v,
    solve_hidden_v_promise,
)

__version__ = "0.1.0"
