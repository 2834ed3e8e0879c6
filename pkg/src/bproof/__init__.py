"""A proof kernel, tactic engine and command-line prover for the B logic."""

from .term import (
    And,
    Big,
    Choice,
    Cmp,
    Elem,
    Eq,
    Exists,
    Forall,
    Iff,
    Implies,
    In,
    MapsTo,
    Not,
    Or,
    Pow,
    PredVar,
    Prod,
    Sort,
    SortError,
    Term,
    Var,
    dangling,
    depth,
    equal,
    sort_of,
)
from .binder import (
    BinderError,
    NotAComprehension,
    NotAForall,
    bind,
    bind_cmp,
    bind_exists,
    bind_forall,
    fresh_bigname,
    fresh_index,
    graft_pred,
    included,
    inst_cmp,
    inst_forall,
    lift,
    member,
    not_free,
    not_free_all,
    subst,
    subst_pred,
)
from .kernel import (
    CongruenceKind,
    InvalidStep,
    KernelError,
    PremiseMismatch,
    ProofTree,
    RuleTag,
    Sequent,
    SideConditionViolated,
    Theorem,
    apply_rule,
    check,
    congruence,
    derived,
    proof_depth,
)
from .syntax import (
    DecodeError,
    ParseError,
    ScopeTable,
    decode_proof,
    encode_proof,
    parse_sequent,
    parse_term,
    print_sequent,
    print_term,
)
from .tactics import (
    CaptureModeMismatch,
    GoalShapeMismatch,
    Occurrence,
    ScriptFailed,
    Tactic,
    TacticError,
    OccurrenceNotFound,
    backward,
    or_else,
    parse_script,
    prop_decide,
    repeat,
    rewrite_equiv,
    rewrite_tactic,
    run_script,
    t_and_intro,
    t_hyp,
    then_,
    try_,
)

__version__ = "0.1.0"
