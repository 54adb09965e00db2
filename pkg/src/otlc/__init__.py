"""An occurrence-typed lambda calculus: typechecker, small-step
evaluator, refinement erasure, and a randomized soundness harness."""

from .checker import (
    Judgment,
    Mode,
    TypeCheckError,
    combfilter,
    env_minus,
    env_plus,
    is_subpred,
    remove,
    restrict,
    subpred,
    typecheck,
)
from .harness import FuzzConfig, FuzzReport, check_subject_reduction, gen_typed_term, run_fuzz
from .refine import (
    declare_refinement,
    erase_env,
    erase_expr,
    erase_pred,
    erase_type,
    erased_judgment_holds,
)
from .semantics import (
    AlreadyValue,
    EvalOutcome,
    FuelExhausted,
    StepResult,
    Stepped,
    Stuck,
    StuckAt,
    Value,
    apply_constant,
    delta_apply,
    evaluate,
    step,
    trace,
)
from .subtyping import (
    UndeclaredRefinement,
    constant_type,
    normalize,
    refinement_base,
    subtype,
    type_equal,
)
from .syntax import (
    BOOLEAN,
    BOT,
    FALSE_T,
    FF,
    NONE_PRED,
    NUM,
    TOP,
    TRUE_T,
    TT,
    Abs,
    App,
    Arrow,
    Bool,
    Const,
    Constant,
    Expr,
    FalsePred,
    If,
    NonePred,
    Num,
    ParseError,
    Pred,
    Refine,
    TruePred,
    Type,
    TypeOfPred,
    UnionT,
    Var,
    VarPred,
    free_vars,
    is_value,
    parse_expr,
    parse_pred,
    parse_program,
    parse_type,
    print_expr,
    print_pred,
    print_type,
    substitute,
)

__all__ = [name for name in dir() if not name.startswith("_")]
