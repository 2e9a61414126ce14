"""Quantified linear-time temporal logic over counterpart models.

Worlds are finite multi-sorted algebras (directed graphs as the bundled
preset); transitions are structure-preserving relations that may delete,
duplicate, or merge elements. The library decides satisfiability of formulae
on ultimately-periodic traces, converts to positive normal form, and ships
differential and counterexample tooling for the relational-vs-functional
equivalence landscape.
"""

from .algebra import (
    Algebra,
    AlgebraError,
    FuncDecl,
    PredicateLabeling,
    RelMorphism,
    Signature,
    compose,
    graph_signature,
    identity_morphism,
    is_functional,
    is_structure_preserving,
)
from .logic import (
    And,
    App,
    Assignment,
    Context,
    Eq,
    Exists,
    Forall,
    Formula,
    Label,
    NegAtom,
    Next,
    NextAll,
    Not,
    Or,
    ScopeError,
    SortError,
    Term,
    Then,
    TRUE,
    TrueF,
    Until,
    UntilAll,
    Var,
    WUntil,
    always,
    always_all,
    counterpart_assignments,
    eventually,
    eventually_all,
    extend,
    free_vars,
    interpret_term,
    is_base_formula,
    is_pnf_formula,
    to_pnf,
    typecheck,
)
from .model import CounterpartModel, LassoTrace, ModelError, TraceStep
from .semantics import (
    ContextCapError,
    EvalError,
    EvalQuery,
    Evaluator,
    eval_until,
    sat_pnf,
    sat_qltl,
    until_witness_step,
)
from .textio import (
    ModelFile,
    ParseError,
    SourceSpan,
    parse_formula,
    parse_formula_auto,
    parse_formula_pnf,
    parse_model,
    parse_model_file,
    serialize_formula,
    serialize_model,
    serialize_model_file,
)

__version__ = "0.1.0"
